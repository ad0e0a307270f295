#pragma once

// N(a_1..a_r; p): the number of primitive roots beta mod p such that every
// a_i - beta is again a primitive root. Three independent routes:
//   count_bruteforce  - scan the primitive-root mask
//   count_indicator   - multiply indicator values pointwise
//   sigma_split       - expand all indicators into characters and split the
//                       resulting (r+1)-fold character sum into the
//                       all-principal part (sigma1) and the rest (sigma2)

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "golomb/characters.hpp"

namespace golomb {

struct TargetTuple {
  std::vector<u64> shifts;  // pairwise distinct, each in 1..p-1; order preserved

  TargetTuple(std::vector<u64> s, const PrimeContext& ctx) : shifts(std::move(s)) {
    if (shifts.empty()) throw std::invalid_argument("TargetTuple: need r >= 1 shifts");
    for (u64 a : shifts)
      if (a == 0 || a >= ctx.p)
        throw std::invalid_argument("TargetTuple: shifts must be nonzero residues in 1..p-1");
    std::vector<u64> sorted = shifts;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("TargetTuple: shifts must be pairwise distinct");
  }

  std::size_t r() const { return shifts.size(); }
};

struct CountBreakdown {
  u64 n_exact = 0;
  double main_term = 0.0;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double sigma1_exact_form = 0.0;  // (phi(p-1)/(p-1))^(r+1) * (p - (r+1))
  double error = 0.0;              // n_exact - main_term
  double explicit_bound = 0.0;
};

struct DecompositionConfig {
  u64 budget = kDefaultBudget;  // cap on estimated term evaluations
  int workers = 0;              // 0 = auto
};

struct BudgetExceeded : std::runtime_error {
  double estimated_terms;
  u64 budget;

  BudgetExceeded(double est, u64 budget_)
      : std::runtime_error(format_message(est, budget_)),
        estimated_terms(est),
        budget(budget_) {}

 private:
  static std::string format_message(double est, u64 budget_) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "sigma_split: refusing to run, estimated %.6g term evaluations exceed "
                  "the budget of %llu",
                  est, static_cast<unsigned long long>(budget_));
    return buf;
  }
};

namespace detail {

inline void validate_tuple(const TargetTuple& tuple, const PrimeContext& ctx) {
  for (u64 a : tuple.shifts)
    if (a == 0 || a >= ctx.p)
      throw std::invalid_argument("tuple does not fit this context (shift out of 1..p-1)");
}

struct WeightedCharacter {
  u64 k, d;
  double w;  // mu(k) / phi(k)
};

// All M = prod_{q | p-1} (1 + phi(q)) characters with squarefree k, ordered
// by k then d. Index 0 is the principal character.
inline std::vector<WeightedCharacter> squarefree_character_basis(const PrimeContext& ctx) {
  std::vector<WeightedCharacter> chars;
  for (u64 k : ctx.squarefree_divisors) {
    int sign = 1;
    u64 phik = 1;
    for (const auto& [q, e] : ctx.pm1_fact.factors) {
      if (k % q == 0) {
        sign = -sign;
        phik *= q - 1;
      }
    }
    double w = static_cast<double>(sign) / static_cast<double>(phik);
    for (u64 d = 1; d <= k; ++d)
      if (std::gcd(d, k) == 1) chars.push_back({k, d, w});
  }
  return chars;
}

// conjugate_of[c] = index of (k, k-d), the complex conjugate of character c.
// Only (1,1) and (1,2) are their own conjugates.
inline std::vector<std::size_t> conjugate_partners(
    const std::vector<WeightedCharacter>& chars) {
  std::vector<std::size_t> partner(chars.size());
  std::size_t block = 0;
  while (block < chars.size()) {
    std::size_t end = block;
    while (end < chars.size() && chars[end].k == chars[block].k) ++end;
    for (std::size_t c = block; c < end; ++c) {
      u64 want = chars[c].k - chars[c].d;  // k - d, or d itself when k | 2d
      if (want == 0) want = chars[c].k;    // k = 1
      std::size_t lo = block, hi = end - 1;
      while (lo < hi) {  // d ascending within the block
        std::size_t mid = (lo + hi) / 2;
        if (chars[mid].d < want)
          lo = mid + 1;
        else
          hi = mid;
      }
      partner[c] = lo;
    }
    block = end;
  }
  return partner;
}

}  // namespace detail

// phi(p-1)^(r+1) / p^r, evaluated as phi * (phi/p)^r to stay in range.
inline double main_term(const TargetTuple& tuple, const PrimeContext& ctx) {
  double ratio = static_cast<double>(ctx.phi_pm1) / static_cast<double>(ctx.p);
  double out = static_cast<double>(ctx.phi_pm1);
  for (std::size_t i = 0; i < tuple.r(); ++i) out *= ratio;
  return out;
}

// (phi(p-1)/(p-1))^(r+1) * (r+1) * sqrt(p) * (2^((r+1)*omega(p-1)) - 1):
// each of the 2^((r+1)*omega) - 1 not-all-principal character tuples
// contributes at most (r+1) * sqrt(p) to the unscaled sum.
inline double explicit_error_bound(const TargetTuple& tuple, const PrimeContext& ctx) {
  double density = static_cast<double>(ctx.phi_pm1) / static_cast<double>(ctx.p - 1);
  double coeff = std::pow(density, static_cast<double>(tuple.r() + 1));
  double tuples =
      std::pow(2.0, static_cast<double>((tuple.r() + 1) * ctx.omega_pm1)) - 1.0;
  return coeff * static_cast<double>(tuple.r() + 1) *
         std::sqrt(static_cast<double>(ctx.p)) * tuples;
}

inline u64 count_bruteforce(const TargetTuple& tuple, const PrimeContext& ctx) {
  detail::validate_tuple(tuple, ctx);
  const u64 p = ctx.p;
  const u8* mask = ctx.pr_mask.data();
  u64 count = 0;
  for (u64 beta = 1; beta < p; ++beta) {
    if (!mask[beta]) continue;
    bool ok = true;
    for (u64 a : tuple.shifts) {
      u64 alpha = a >= beta ? a - beta : a + p - beta;  // a - beta mod p
      if (!mask[alpha]) {  // mask[0] is false, so beta = a_i fails here
        ok = false;
        break;
      }
    }
    if (ok) ++count;
  }
  return count;
}

// sum over beta of indicator(beta) * prod_i indicator(a_i - beta); lands
// within kDecompTol of the brute-force count.
inline double count_indicator(const TargetTuple& tuple, const PrimeContext& ctx) {
  detail::validate_tuple(tuple, ctx);
  const u64 p = ctx.p;
  std::vector<double> ind_val(p);
  for (u64 x = 0; x < p; ++x) ind_val[x] = indicator(x, ctx);
  double acc = 0.0;
  for (u64 beta = 1; beta < p; ++beta) {
    double term = ind_val[beta];
    for (u64 a : tuple.shifts) {
      u64 alpha = a >= beta ? a - beta : a + p - beta;
      term *= ind_val[alpha];
    }
    acc += term;
  }
  return acc;
}

namespace detail {

// Depth-first walk over the r+1 character choices. Levels 0..r-1 pick the
// character attached to a_j - beta and maintain the running product over
// beta; the leaf runs the unshifted character against that product, one
// full beta-sum per character, M^(r+1) * p term evaluations in total.
struct BranchEval {
  u64 p;
  std::size_t r, m;
  const std::vector<WeightedCharacter>* chars;
  const std::vector<std::size_t>* partner;
  const std::vector<const cnum*>* char_roots;
  const std::vector<std::vector<u32>>* shifted;
  const u32* ind;
  const double* vr = nullptr;  // materialized unshifted values, row c at c*p
  const double* vi = nullptr;

  std::vector<std::vector<double>> prod_re, prod_im;
  cnum rest{0.0, 0.0};
  cnum principal{0.0, 0.0};

  void init() {
    prod_re.assign(r, std::vector<double>(p, 0.0));
    prod_im.assign(r, std::vector<double>(p, 0.0));
  }

  void apply(std::size_t level, std::size_t c) {
    const WeightedCharacter& ch = (*chars)[c];
    const cnum* roots = (*char_roots)[c];
    const u32* sh = (*shifted)[level].data();
    double* out_re = prod_re[level].data();
    double* out_im = prod_im[level].data();
    if (level == 0) {
      for (u64 b = 1; b < p; ++b) {
        u32 t = sh[b];
        if (t == kNoIndex) {
          out_re[b] = 0.0;
          out_im[b] = 0.0;
          continue;
        }
        cnum z = roots[ch.d * t % ch.k];
        out_re[b] = z.real();
        out_im[b] = z.imag();
      }
    } else {
      const double* in_re = prod_re[level - 1].data();
      const double* in_im = prod_im[level - 1].data();
      for (u64 b = 1; b < p; ++b) {
        u32 t = sh[b];
        if (t == kNoIndex) {
          out_re[b] = 0.0;
          out_im[b] = 0.0;
          continue;
        }
        cnum z = roots[ch.d * t % ch.k];
        out_re[b] = in_re[b] * z.real() - in_im[b] * z.imag();
        out_im[b] = in_re[b] * z.imag() + in_im[b] * z.real();
      }
    }
  }

  // One beta-sum per character. A character and its conjugate share the four
  // real dot products (re*re, im*im, re*im, im*re), so each pair is read off
  // one pass at half the arithmetic.
  void leaf(bool path_principal, double path_weight) {
    const double* pr = prod_re[r - 1].data();
    const double* pi = prod_im[r - 1].data();
    for (std::size_t c = 0; c < m; ++c) {
      const std::size_t cc = (*partner)[c];
      if (cc < c) continue;  // handled together with its conjugate
      double rr = 0.0, ii = 0.0, ri = 0.0, ir = 0.0;
      if (vr != nullptr) {
        const double* cr = vr + c * p;
        const double* ci = vi + c * p;
        for (u64 b = 1; b < p; ++b) {
          rr += cr[b] * pr[b];
          ii += ci[b] * pi[b];
          ri += cr[b] * pi[b];
          ir += ci[b] * pr[b];
        }
      } else {
        const WeightedCharacter& ch = (*chars)[c];
        const cnum* roots = (*char_roots)[c];
        for (u64 b = 1; b < p; ++b) {
          cnum z = roots[ch.d * ind[b] % ch.k];
          rr += z.real() * pr[b];
          ii += z.imag() * pi[b];
          ri += z.real() * pi[b];
          ir += z.imag() * pr[b];
        }
      }
      double w = path_weight * (*chars)[c].w;
      cnum contrib{w * (rr - ii), w * (ri + ir)};
      if (path_principal && c == 0)
        principal += contrib;
      else
        rest += contrib;
      if (cc != c) rest += cnum{w * (rr + ii), w * (ri - ir)};  // conjugate character
    }
  }

  void descend(std::size_t level, bool path_principal, double path_weight) {
    if (level == r) {
      leaf(path_principal, path_weight);
      return;
    }
    for (std::size_t c = 0; c < m; ++c) {
      apply(level, c);
      descend(level + 1, path_principal && c == 0, path_weight * (*chars)[c].w);
    }
  }
};

}  // namespace detail

inline CountBreakdown sigma_split(const TargetTuple& tuple, const PrimeContext& ctx,
                                  const DecompositionConfig& cfg = {}) {
  detail::validate_tuple(tuple, ctx);
  const u64 p = ctx.p;
  const std::size_t r = tuple.r();

  auto chars = detail::squarefree_character_basis(ctx);
  auto partner = detail::conjugate_partners(chars);
  const std::size_t m = chars.size();

  // Estimated work is M^(r+1) * p term evaluations; refuse over budget.
  long double est = static_cast<long double>(p);
  for (std::size_t i = 0; i <= r; ++i) est *= static_cast<long double>(m);
  if (est > static_cast<long double>(cfg.budget))
    throw BudgetExceeded(static_cast<double>(est), cfg.budget);

  // Root tables built up front so the parallel section only reads them.
  std::vector<const cnum*> char_roots(m);
  for (std::size_t c = 0; c < m; ++c)
    char_roots[c] = detail::unit_roots(chars[c].k).data();

  const u32* ind = ctx.index_of.data();

  // shifted[j][beta] = ind(a_j - beta), kNoIndex at beta = a_j where the
  // argument hits 0 and every character vanishes. beta = p contributes
  // nothing for the same reason, so the beta loops run over 1..p-1 only.
  std::vector<std::vector<u32>> shifted(r, std::vector<u32>(p, kNoIndex));
  for (std::size_t j = 0; j < r; ++j) {
    u64 a = tuple.shifts[j];
    for (u64 beta = 1; beta < p; ++beta) {
      u64 alpha = a >= beta ? a - beta : a + p - beta;
      shifted[j][beta] = alpha == 0 ? kNoIndex : ind[alpha];
    }
  }

  // Unshifted character values, split re/im rows, when they fit in memory.
  constexpr double kMatrixCapBytes = 256.0 * 1024 * 1024;
  const bool materialize =
      static_cast<double>(m) * static_cast<double>(p) * 16.0 <= kMatrixCapBytes;
  std::vector<double> vr, vi;
  if (materialize) {
    vr.assign(m * p, 0.0);
    vi.assign(m * p, 0.0);
    for (std::size_t c = 0; c < m; ++c) {
      const cnum* roots = char_roots[c];
      const u64 k = chars[c].k, d = chars[c].d;
      double* rr = vr.data() + c * p;
      double* ri = vi.data() + c * p;
      for (u64 b = 1; b < p; ++b) {
        cnum z = roots[d * ind[b] % k];
        rr[b] = z.real();
        ri[b] = z.imag();
      }
    }
  }

  // One task per top-level character keeps the reduction order fixed:
  // partial sums land in their slot and are combined in index order.
  std::vector<cnum> rest_parts(m, cnum{0.0, 0.0});
  std::vector<cnum> principal_parts(m, cnum{0.0, 0.0});
  parallel_for(m, cfg.workers, [&](std::size_t c1) {
    detail::BranchEval ev;
    ev.p = p;
    ev.r = r;
    ev.m = m;
    ev.chars = &chars;
    ev.partner = &partner;
    ev.char_roots = &char_roots;
    ev.shifted = &shifted;
    ev.ind = ind;
    if (materialize) {
      ev.vr = vr.data();
      ev.vi = vi.data();
    }
    ev.init();
    ev.apply(0, c1);
    ev.descend(1, c1 == 0, chars[c1].w);
    rest_parts[c1] = ev.rest;
    principal_parts[c1] = ev.principal;
  });
  cnum rest{0.0, 0.0}, principal{0.0, 0.0};
  for (std::size_t c = 0; c < m; ++c) {
    rest += rest_parts[c];
    principal += principal_parts[c];
  }

  const double density = static_cast<double>(ctx.phi_pm1) / static_cast<double>(p - 1);
  const double coeff = std::pow(density, static_cast<double>(r + 1));

  cnum total = principal + rest;
  if (coeff * std::abs(total.imag()) > kDecompTol)
    throw std::runtime_error("sigma_split: imaginary residue " +
                             std::to_string(coeff * total.imag()) + " exceeds tolerance");

  CountBreakdown out;
  out.sigma1 = coeff * principal.real();
  out.sigma2 = coeff * rest.real();
  out.sigma1_exact_form = coeff * static_cast<double>(p - (r + 1));
  double total_real = out.sigma1 + out.sigma2;
  long long rounded = std::llround(total_real);
  if (rounded < 0 || std::abs(total_real - static_cast<double>(rounded)) > kRoundDriftTol)
    throw std::runtime_error("sigma_split: decomposed total " + std::to_string(total_real) +
                             " strayed from an integer");
  out.n_exact = static_cast<u64>(rounded);
  out.main_term = main_term(tuple, ctx);
  out.error = static_cast<double>(out.n_exact) - out.main_term;
  out.explicit_bound = explicit_error_bound(tuple, ctx);
  if (std::abs(out.sigma2) > out.explicit_bound + kDecompTol)
    throw std::runtime_error("sigma_split: sigma2 exceeded its explicit bound");
  return out;
}

}  // namespace golomb

#pragma once

// Prime sweeps with pluggable tuple policies, and the log-log fit of the
// observed error term against the square-root prediction.

#include <cmath>
#include <cstdio>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "golomb/counting.hpp"

namespace golomb {

enum class PolicyKind { canonical, fixed, random };

struct TuplePolicy {
  PolicyKind kind = PolicyKind::canonical;
  std::vector<u64> fixed_shifts;  // kind == fixed
  u64 random_count = 1;           // kind == random

  static TuplePolicy canonical() { return TuplePolicy{}; }

  static TuplePolicy fixed(std::vector<u64> shifts) {
    TuplePolicy p;
    p.kind = PolicyKind::fixed;
    p.fixed_shifts = std::move(shifts);
    return p;
  }

  static TuplePolicy random(u64 count) {
    TuplePolicy p;
    p.kind = PolicyKind::random;
    p.random_count = count;
    return p;
  }

  // "canonical" | "fixed:a1,a2,..." | "random:count"
  static TuplePolicy parse(const std::string& text) {
    if (text == "canonical") return canonical();
    if (text.rfind("fixed:", 0) == 0) {
      std::vector<u64> shifts;
      std::stringstream ss(text.substr(6));
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        std::size_t pos = 0;
        u64 v = std::stoull(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument("TuplePolicy: bad shift '" + tok + "'");
        shifts.push_back(v);
      }
      if (shifts.empty()) throw std::invalid_argument("TuplePolicy: fixed policy needs shifts");
      return fixed(std::move(shifts));
    }
    if (text.rfind("random:", 0) == 0) {
      std::size_t pos = 0;
      u64 count = std::stoull(text.substr(7), &pos);
      if (pos != text.size() - 7 || count == 0)
        throw std::invalid_argument("TuplePolicy: bad random count in '" + text + "'");
      return random(count);
    }
    throw std::invalid_argument("TuplePolicy: unknown policy '" + text + "'");
  }

  std::string str() const {
    switch (kind) {
      case PolicyKind::canonical:
        return "canonical";
      case PolicyKind::fixed: {
        std::string out = "fixed:";
        for (std::size_t i = 0; i < fixed_shifts.size(); ++i) {
          if (i) out += ',';
          out += std::to_string(fixed_shifts[i]);
        }
        return out;
      }
      case PolicyKind::random:
        return "random:" + std::to_string(random_count);
    }
    return "?";
  }
};

struct SweepConfig {
  u64 seed = 0;
  bool decompose = false;
  u64 budget = kDefaultBudget;
  int workers = 0;
};

struct SweepRecord {
  u64 p = 0;
  u32 r = 0;
  std::vector<u64> shifts;  // ascending
  u64 n_exact = 0;
  double main_term = 0.0;
  double error = 0.0;  // n_exact - main_term
  double abs_error = 0.0;
  std::optional<double> sigma2;          // present when the decomposition ran
  std::optional<double> explicit_bound;  // same
  u64 phi_pm1 = 0;
  u32 omega_pm1 = 0;
  std::optional<double> phi_ratio;  // phi(p-1) * log log p / p, only for p >= 17
};

namespace detail {

inline u64 splitmix64(u64 x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Uniform in [0, n) by rejection on the raw engine output; identical on
// every platform, unlike std::uniform_int_distribution.
inline u64 bounded_rand(std::mt19937_64& rng, u64 n) {
  u64 lim = UINT64_MAX - UINT64_MAX % n;
  u64 v;
  do {
    v = rng();
  } while (v >= lim);
  return v % n;
}

// Engine for per-(seed, p, r) draws; the mix keeps streams independent.
inline std::mt19937_64 tuple_rng(u64 seed, u64 p, u32 r) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(p * 0x9E3779B97F4A7C15ull + r)));
}

// r distinct shifts drawn uniformly from 1..p-1, returned ascending.
inline std::vector<u64> draw_tuple(std::mt19937_64& rng, u32 r, u64 p) {
  std::vector<u64> shifts;
  shifts.reserve(r);
  while (shifts.size() < r) {
    u64 v = 1 + bounded_rand(rng, p - 1);
    if (std::find(shifts.begin(), shifts.end(), v) == shifts.end()) shifts.push_back(v);
  }
  std::sort(shifts.begin(), shifts.end());
  return shifts;
}

}  // namespace detail

// Shift tuples the policy produces for one prime. Returns an empty list and
// a warning when the policy cannot produce a valid tuple for this p; fixed
// shifts are never reduced mod p.
inline std::vector<std::vector<u64>> policy_tuples(const TuplePolicy& policy, u32 r, u64 p,
                                                   u64 seed, std::string* warning = nullptr) {
  auto warn = [&](const std::string& msg) {
    if (warning) *warning = msg;
  };
  if (r >= p) {
    warn("p = " + std::to_string(p) + " skipped: needs r < p, got r = " + std::to_string(r));
    return {};
  }
  switch (policy.kind) {
    case PolicyKind::canonical: {
      std::vector<u64> shifts(r);
      for (u32 i = 0; i < r; ++i) shifts[i] = i + 1;
      return {std::move(shifts)};
    }
    case PolicyKind::fixed: {
      for (u64 a : policy.fixed_shifts)
        if (a == 0 || a >= p) {
          warn("p = " + std::to_string(p) + " skipped: fixed shift " + std::to_string(a) +
               " outside 1..p-1");
          return {};
        }
      return {policy.fixed_shifts};
    }
    case PolicyKind::random: {
      auto rng = detail::tuple_rng(seed, p, r);
      std::vector<std::vector<u64>> out;
      out.reserve(policy.random_count);
      for (u64 t = 0; t < policy.random_count; ++t)
        out.push_back(detail::draw_tuple(rng, r, p));
      return out;
    }
  }
  return {};
}

// One record per (prime, tuple) over primes in [min_p, max_p]. n_exact always
// comes from the brute-force count; with cfg.decompose the character split
// runs too, cross-checks the count, and fills sigma2 / explicit_bound.
// Records are sorted by (p, shifts) regardless of worker count.
inline std::vector<SweepRecord> sweep(u64 min_p, u64 max_p, u32 r, const TuplePolicy& policy,
                                      const SweepConfig& cfg = {}) {
  if (r == 0) throw std::invalid_argument("sweep: r must be >= 1");
  if (policy.kind == PolicyKind::fixed && policy.fixed_shifts.size() != r)
    throw std::invalid_argument("sweep: fixed policy has " +
                                std::to_string(policy.fixed_shifts.size()) +
                                " shifts but r = " + std::to_string(r));
  auto primes = primes_in_range(std::max<u64>(min_p, 3), max_p);
  std::vector<std::vector<SweepRecord>> slots(primes.size());

  parallel_for(primes.size(), cfg.workers, [&](std::size_t i) {
    const u64 p = primes[i];
    std::string warning;
    auto tuples = policy_tuples(policy, r, p, cfg.seed, &warning);
    if (!warning.empty()) std::fprintf(stderr, "[sweep] %s\n", warning.c_str());
    if (tuples.empty()) return;
    PrimeContext ctx = build_context(p);
    for (auto& shifts : tuples) {
      TargetTuple tuple(shifts, ctx);
      SweepRecord rec;
      rec.p = p;
      rec.r = r;
      rec.shifts = std::move(shifts);
      rec.n_exact = count_bruteforce(tuple, ctx);
      rec.main_term = main_term(tuple, ctx);
      rec.error = static_cast<double>(rec.n_exact) - rec.main_term;
      rec.abs_error = std::abs(rec.error);
      rec.phi_pm1 = ctx.phi_pm1;
      rec.omega_pm1 = ctx.omega_pm1;
      if (p >= 17)
        rec.phi_ratio = static_cast<double>(ctx.phi_pm1) *
                        std::log(std::log(static_cast<double>(p))) / static_cast<double>(p);
      if (cfg.decompose) {
        try {
          // Prime-level parallelism is already in play; keep the split serial.
          CountBreakdown b = sigma_split(tuple, ctx, DecompositionConfig{cfg.budget, 1});
          if (b.n_exact != rec.n_exact)
            throw std::runtime_error("sweep: decomposition count " +
                                     std::to_string(b.n_exact) + " != brute-force count " +
                                     std::to_string(rec.n_exact) + " at p = " +
                                     std::to_string(p));
          rec.sigma2 = b.sigma2;
          rec.explicit_bound = b.explicit_bound;
        } catch (const BudgetExceeded& e) {
          std::fprintf(stderr, "[sweep] p = %llu: %s\n",
                       static_cast<unsigned long long>(p), e.what());
        }
      }
      slots[i].push_back(std::move(rec));
    }
  });

  std::vector<SweepRecord> records;
  for (auto& slot : slots)
    for (auto& rec : slot) records.push_back(std::move(rec));
  std::sort(records.begin(), records.end(), [](const SweepRecord& a, const SweepRecord& b) {
    if (a.p != b.p) return a.p < b.p;
    return a.shifts < b.shifts;
  });
  return records;
}

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t sample_count = 0;  // records entering the log-log fit
  double r_value = 0.0;          // Pearson correlation of (log p, log |error|)
  double max_normalized_error = 0.0;  // max |error| / p^(1/2 + epsilon)
  std::size_t zero_error_count = 0;   // records excluded for |error| = 0
};

// Least squares of log |error| against log p. Exact-zero errors carry no
// information on the exponent and are excluded (counted instead).
inline FitResult fit_error_exponent(const std::vector<SweepRecord>& records,
                                    double epsilon = 0.1) {
  FitResult fit;
  std::vector<double> xs, ys;
  for (const auto& rec : records) {
    double norm = rec.abs_error / std::pow(static_cast<double>(rec.p), 0.5 + epsilon);
    fit.max_normalized_error = std::max(fit.max_normalized_error, norm);
    if (rec.abs_error > 0.0) {
      xs.push_back(std::log(static_cast<double>(rec.p)));
      ys.push_back(std::log(rec.abs_error));
    } else {
      ++fit.zero_error_count;
    }
  }
  if (xs.size() < 2)
    throw std::invalid_argument("fit_error_exponent: need at least 2 records with nonzero error");
  const std::size_t n = xs.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = xs[i] - mx, dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0)
    throw std::invalid_argument("fit_error_exponent: all samples share one prime");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_value = syy > 0.0 ? sxy / std::sqrt(sxx * syy) : 0.0;
  fit.sample_count = n;
  return fit;
}

}  // namespace golomb

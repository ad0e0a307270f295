#pragma once

// Multiplicative characters mod p through the index table:
//   chi_{d,k}(a) = e(d * ind(a) / k)  for p coprime to a,  chi_{d,k}(a) = 0 for p | a.
// The principal character is exactly (d, k) = (1, 1). On top of that sit the
// primitive-root indicator and shifted-product character sums with their
// square-root bound.

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "golomb/ntcore.hpp"

namespace golomb {

namespace detail {

// k-th roots of unity, entry t = e^(2*pi*i*t/k). Tables depend on k alone,
// so one process-wide cache serves every context; built once under a lock.
inline const std::vector<cnum>& unit_roots(u64 k) {
  static std::mutex mu;
  static std::map<u64, std::vector<cnum>> cache;
  std::scoped_lock lock(mu);
  auto it = cache.find(k);
  if (it == cache.end()) {
    std::vector<cnum> tab(k);
    for (u64 t = 0; t < k; ++t) {
      double ang = 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(k);
      tab[t] = cnum{std::cos(ang), std::sin(ang)};
    }
    it = cache.emplace(k, std::move(tab)).first;
  }
  return it->second;
}

}  // namespace detail

struct CharacterId {
  u64 k = 1;  // k | p-1
  u64 d = 1;  // 1 <= d <= k, gcd(d, k) = 1

  CharacterId() = default;

  CharacterId(u64 k_, u64 d_, const PrimeContext& ctx) : k(k_), d(d_) {
    if (k == 0 || ctx.pm1() % k != 0)
      throw std::domain_error("CharacterId: k = " + std::to_string(k) +
                              " does not divide p-1 = " + std::to_string(ctx.pm1()));
    if (d == 0 || d > k || std::gcd(d, k) != 1)
      throw std::domain_error("CharacterId: d = " + std::to_string(d) +
                              " must lie in 1..k with gcd(d, k) = 1 (k = " +
                              std::to_string(k) + ")");
  }

  // For internal enumeration where (k, d) validity is already established.
  static CharacterId unchecked(u64 k_, u64 d_) {
    CharacterId c;
    c.k = k_;
    c.d = d_;
    return c;
  }

  bool principal() const { return k == 1; }

  bool operator==(const CharacterId& o) const { return k == o.k && d == o.d; }
};

inline cnum chi_eval(const CharacterId& chi, u64 a, const PrimeContext& ctx) {
  if (a >= ctx.p) throw std::domain_error("chi_eval: residue out of range");
  if (chi.k == 0 || ctx.pm1() % chi.k != 0)
    throw std::domain_error("chi_eval: character does not belong to this context");
  if (a == 0) return cnum{0.0, 0.0};  // includes the principal character
  u64 t = chi.d * ctx.index_of[a] % chi.k;  // exact integer phase
  return detail::unit_roots(chi.k)[t];
}

// Full complex value of the indicator sum
//   (phi(p-1)/(p-1)) * sum_{squarefree k | p-1} mu(k)/phi(k)
//                    * sum_{1<=d<=k, (d,k)=1} e(d * ind(a) / k);
// non-squarefree k drop out since mu kills them.
inline cnum indicator_sum(u64 a, const PrimeContext& ctx) {
  if (a >= ctx.p) throw std::domain_error("indicator_sum: residue out of range");
  if (a == 0) return cnum{0.0, 0.0};
  const u64 ia = ctx.index_of[a];
  cnum acc{0.0, 0.0};
  for (u64 k : ctx.squarefree_divisors) {
    int sign = 1;
    u64 phik = 1;
    for (const auto& [q, e] : ctx.pm1_fact.factors) {
      if (k % q == 0) {
        sign = -sign;
        phik *= q - 1;
      }
    }
    const auto& roots = detail::unit_roots(k);
    cnum inner{0.0, 0.0};
    for (u64 d = 1; d <= k; ++d) {
      if (std::gcd(d, k) != 1) continue;
      inner += roots[d * ia % k];
    }
    acc += (static_cast<double>(sign) / static_cast<double>(phik)) * inner;
  }
  double scale = static_cast<double>(ctx.phi_pm1) / static_cast<double>(ctx.p - 1);
  return scale * acc;
}

// Real indicator value: within kDecompTol of 1 on primitive roots and of 0
// elsewhere. A noticeable imaginary part means the sum was assembled wrong.
inline double indicator(u64 a, const PrimeContext& ctx) {
  cnum v = indicator_sum(a, ctx);
  if (std::abs(v.imag()) > kDecompTol)
    throw std::runtime_error("indicator: imaginary part " + std::to_string(v.imag()) +
                             " exceeds tolerance at a = " + std::to_string(a));
  return v.real();
}

// sum_{x=1}^{p} chi_1(x + b_1) * ... * chi_s(x + b_s), shifts reduced mod p.
// Any k | p-1 is allowed here, squarefree or not.
inline cnum weil_sum(const std::vector<CharacterId>& chis, const std::vector<u64>& shifts,
                     const PrimeContext& ctx) {
  if (chis.empty() || chis.size() != shifts.size())
    throw std::invalid_argument("weil_sum: need s >= 1 characters with one shift each");
  const u64 p = ctx.p;
  for (const auto& chi : chis)
    if (chi.k == 0 || ctx.pm1() % chi.k != 0)
      throw std::domain_error("weil_sum: character does not belong to this context");
  for (u64 b : shifts)
    if (b >= p) throw std::domain_error("weil_sum: shifts must be residues in 0..p-1");
  for (std::size_t i = 0; i < shifts.size(); ++i)
    for (std::size_t j = i + 1; j < shifts.size(); ++j)
      if (shifts[i] == shifts[j])
        throw std::invalid_argument("weil_sum: shifts must be pairwise distinct");

  struct Slot {
    const cnum* roots;
    u64 d, k, b;
  };
  std::vector<Slot> slots;
  slots.reserve(chis.size());
  for (std::size_t i = 0; i < chis.size(); ++i)
    slots.push_back({detail::unit_roots(chis[i].k).data(), chis[i].d, chis[i].k, shifts[i]});

  const u32* ind = ctx.index_of.data();
  cnum acc{0.0, 0.0};
  for (u64 x = 1; x <= p; ++x) {
    cnum term{1.0, 0.0};
    for (const Slot& s : slots) {
      u64 y = (x + s.b) % p;
      if (y == 0) {  // chi(0) = 0 annihilates the product
        term = cnum{0.0, 0.0};
        break;
      }
      term *= s.roots[s.d * ind[y] % s.k];
    }
    acc += term;
  }
  return acc;
}

struct WeilBoundCheck {
  cnum value;
  double bound = 0.0;  // s * sqrt(p)
  bool holds = false;
};

// |weil_sum| <= s * sqrt(p) whenever at least one character is nonprincipal
// and the shifts are distinct. All-principal input has no such bound and is
// rejected.
inline WeilBoundCheck check_weil_bound(const std::vector<CharacterId>& chis,
                                       const std::vector<u64>& shifts,
                                       const PrimeContext& ctx) {
  bool nonprincipal = false;
  for (const auto& chi : chis) nonprincipal = nonprincipal || !chi.principal();
  if (!nonprincipal)
    throw std::domain_error("check_weil_bound: needs at least one nonprincipal character");
  WeilBoundCheck out;
  out.value = weil_sum(chis, shifts, ctx);
  out.bound = static_cast<double>(chis.size()) * std::sqrt(static_cast<double>(ctx.p));
  out.holds = std::abs(out.value) <= out.bound + kCharSumTol;
  return out;
}

}  // namespace golomb

#pragma once

// Elementary number theory plus the per-prime context (generator, index
// table, primitive-root mask) that every other header builds on.

#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "golomb/common.hpp"

namespace golomb {

inline u64 mul_mod(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<unsigned __int128>(a) * b % m);
}

inline u64 pow_mod(u64 base, u64 exp, u64 m) {
  if (m == 0) throw std::domain_error("pow_mod: modulus must be positive");
  if (m == 1) return 0;
  u64 r = 1;
  base %= m;
  while (exp > 0) {
    if (exp & 1) r = mul_mod(r, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return r;
}

inline bool is_prime(u64 n) {
  if (n < 2) return false;
  if (n < 4) return true;
  if (n % 2 == 0 || n % 3 == 0) return false;
  for (u64 i = 5; i * i <= n; i += 6)
    if (n % i == 0 || n % (i + 2) == 0) return false;
  return true;
}

struct Factorization {
  u64 n = 1;
  std::vector<std::pair<u64, u32>> factors;  // (prime, exponent), primes ascending

  u32 omega() const { return static_cast<u32>(factors.size()); }
  bool squarefree() const {
    for (const auto& [q, e] : factors)
      if (e > 1) return false;
    return true;
  }
};

inline Factorization factorize(u64 n) {
  if (n == 0) throw std::domain_error("factorize: argument must be a positive integer");
  Factorization f;
  f.n = n;
  auto strip = [&](u64 q) {
    u32 e = 0;
    while (n % q == 0) {
      n /= q;
      ++e;
    }
    if (e > 0) f.factors.emplace_back(q, e);
  };
  strip(2);
  strip(3);
  for (u64 i = 5; i * i <= n; i += 6) {
    strip(i);
    strip(i + 2);
  }
  if (n > 1) f.factors.emplace_back(n, 1);
  return f;
}

inline int mobius(u64 k) {
  Factorization f = factorize(k);
  if (!f.squarefree()) return 0;
  return f.omega() % 2 == 0 ? 1 : -1;
}

inline u64 euler_phi(u64 k) {
  Factorization f = factorize(k);
  u64 phi = 1;
  for (const auto& [q, e] : f.factors) {
    phi *= q - 1;
    for (u32 i = 1; i < e; ++i) phi *= q;
  }
  return phi;
}

// All divisors, ascending.
inline std::vector<u64> divisors_of(const Factorization& f) {
  std::vector<u64> divs{1};
  for (const auto& [q, e] : f.factors) {
    std::size_t base = divs.size();
    u64 power = 1;
    for (u32 i = 1; i <= e; ++i) {
      power *= q;
      for (std::size_t j = 0; j < base; ++j) divs.push_back(divs[j] * power);
    }
  }
  std::sort(divs.begin(), divs.end());
  return divs;
}

// The 2^omega(n) squarefree divisors, ascending.
inline std::vector<u64> squarefree_divisors_of(const Factorization& f) {
  std::vector<u64> divs{1};
  for (const auto& [q, e] : f.factors) {
    std::size_t base = divs.size();
    for (std::size_t j = 0; j < base; ++j) divs.push_back(divs[j] * q);
  }
  std::sort(divs.begin(), divs.end());
  return divs;
}

// Least t > 0 with a^t = 1 mod p; scans the divisors of p-1 in order.
inline u64 multiplicative_order(u64 a, u64 p) {
  if (p < 2) throw std::domain_error("multiplicative_order: p must be at least 2");
  a %= p;
  if (a == 0) throw std::domain_error("multiplicative_order: argument divisible by p");
  for (u64 d : divisors_of(factorize(p - 1)))
    if (pow_mod(a, d, p) == 1) return d;
  throw std::logic_error("multiplicative_order: order not found (is p prime?)");
}

inline constexpr u32 kNoIndex = 0xFFFFFFFFu;

// Everything downstream work needs about one prime p. index_of[a] = ind(a)
// relative to the smallest generator; pr_mask[a] != 0 iff gcd(ind(a), p-1) = 1.
struct PrimeContext {
  u64 p = 0;
  Factorization pm1_fact;
  u64 phi_pm1 = 0;
  u32 omega_pm1 = 0;
  std::vector<u64> squarefree_divisors;  // squarefree k | p-1, ascending
  u64 generator = 0;
  std::vector<u32> index_of;  // size p; index_of[0] = kNoIndex sentinel
  std::vector<u8> pr_mask;    // size p; pr_mask[0] = 0

  u64 pm1() const { return p - 1; }

  u32 ind(u64 a) const {
    if (a == 0 || a >= p) throw std::domain_error("ind: argument must lie in 1..p-1");
    return index_of[a];
  }
};

inline PrimeContext build_context(u64 p) {
  if (p % 2 == 0)
    throw std::domain_error("build_context: p must be odd (got " + std::to_string(p) + ")");
  if (p < 3)
    throw std::domain_error("build_context: p must be at least 3");
  if (!is_prime(p))
    throw std::domain_error("build_context: p must be prime (" + std::to_string(p) +
                            " is composite)");
  if (p >= (u64{1} << 31))
    throw std::domain_error("build_context: p exceeds the supported range (p < 2^31)");

  PrimeContext ctx;
  ctx.p = p;
  ctx.pm1_fact = factorize(p - 1);
  ctx.omega_pm1 = ctx.pm1_fact.omega();
  ctx.phi_pm1 = 1;
  for (const auto& [q, e] : ctx.pm1_fact.factors) {
    ctx.phi_pm1 *= q - 1;
    for (u32 i = 1; i < e; ++i) ctx.phi_pm1 *= q;
  }
  ctx.squarefree_divisors = squarefree_divisors_of(ctx.pm1_fact);

  // Smallest generator: g works iff g^((p-1)/q) != 1 for every prime q | p-1.
  for (u64 g = 2; g < p; ++g) {
    bool ok = true;
    for (const auto& [q, e] : ctx.pm1_fact.factors) {
      if (pow_mod(g, (p - 1) / q, p) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) {
      ctx.generator = g;
      break;
    }
  }
  if (ctx.generator == 0)
    throw std::logic_error("build_context: no generator found (is p prime?)");

  // One walk through the powers of g fills the whole index table.
  ctx.index_of.assign(p, kNoIndex);
  u64 val = 1;
  for (u64 t = 0; t + 1 < p; ++t) {
    ctx.index_of[val] = static_cast<u32>(t);
    val = val * ctx.generator % p;  // p < 2^31 keeps the product in range
  }

  ctx.pr_mask.assign(p, 0);
  for (u64 a = 1; a < p; ++a)
    ctx.pr_mask[a] = std::gcd(static_cast<u64>(ctx.index_of[a]), p - 1) == 1 ? 1 : 0;
  return ctx;
}

inline bool is_primitive_root(u64 a, const PrimeContext& ctx) {
  if (a >= ctx.p) throw std::domain_error("is_primitive_root: residue out of range");
  // pr_mask bakes in the gcd(ind(a), p-1) = 1 test; a = 0 is never a root.
  return ctx.pr_mask[a] != 0;
}

// Primes in [lo, hi] by plain sieve. Desk scale only.
inline std::vector<u64> primes_in_range(u64 lo, u64 hi) {
  std::vector<u64> out;
  if (hi < 2 || hi < lo) return out;
  if (hi > 1'000'000'000ull)
    throw std::domain_error("primes_in_range: upper bound too large for a flat sieve");
  std::vector<u8> composite(hi + 1, 0);
  for (u64 i = 2; i * i <= hi; ++i)
    if (!composite[i])
      for (u64 j = i * i; j <= hi; j += i) composite[j] = 1;
  for (u64 n = std::max<u64>(lo, 2); n <= hi; ++n)
    if (!composite[n]) out.push_back(n);
  return out;
}

}  // namespace golomb

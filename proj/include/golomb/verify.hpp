#pragma once

// Property suites over prime ranges:
//   indicator     - indicator values against a direct order computation
//   weil          - sampled shifted-product sums against the s*sqrt(p) bound
//   decomposition - brute force vs indicator vs character split
// Each suite reports how many checks ran, how many failed, and the first
// failure in detail.

#include <string>
#include <vector>

#include "golomb/harness.hpp"

namespace golomb {

enum class VerifyKind { indicator, weil, decomposition, all };

inline VerifyKind parse_verify_kind(const std::string& text) {
  if (text == "indicator") return VerifyKind::indicator;
  if (text == "weil") return VerifyKind::weil;
  if (text == "decomposition") return VerifyKind::decomposition;
  if (text == "all") return VerifyKind::all;
  throw std::invalid_argument("kind must be indicator, weil, decomposition or all");
}

struct VerifyConfig {
  u64 seed = 0;
  u64 samples = 100;       // weil: configurations per prime
  u64 random_tuples = 2;   // decomposition: random tuples per (p, r) beyond canonical
  std::vector<u32> rs = {1, 2};
  u64 budget = kDefaultBudget;
  int workers = 0;
};

struct VerifyOutcome {
  std::string kind;
  u64 checks = 0;
  u64 failures = 0;
  u64 skipped = 0;  // decomposition tuples refused by the budget
  std::string first_failure;

  void fail(const std::string& detail) {
    if (failures == 0) first_failure = detail;
    ++failures;
  }

  void merge(const VerifyOutcome& other) {
    checks += other.checks;
    skipped += other.skipped;
    if (failures == 0 && other.failures > 0) first_failure = other.first_failure;
    failures += other.failures;
  }
};

// indicator(a) must sit within kDecompTol of the 0/1 membership value
// computed from the multiplicative order, for every a in 0..p-1.
inline VerifyOutcome verify_indicator(u64 min_p, u64 max_p, const VerifyConfig& cfg = {}) {
  auto primes = primes_in_range(std::max<u64>(min_p, 3), max_p);
  std::vector<VerifyOutcome> slots(primes.size());
  parallel_for(primes.size(), cfg.workers, [&](std::size_t i) {
    const u64 p = primes[i];
    VerifyOutcome& out = slots[i];
    PrimeContext ctx = build_context(p);
    auto divisors = divisors_of(ctx.pm1_fact);
    for (u64 a = 0; a < p; ++a) {
      bool member = false;
      if (a != 0) {
        for (u64 d : divisors) {
          if (pow_mod(a, d, p) == 1) {
            member = d == p - 1;
            break;
          }
        }
      }
      double v = indicator(a, ctx);
      double dev = std::abs(v - (member ? 1.0 : 0.0));
      ++out.checks;
      if (dev > kDecompTol)
        out.fail("indicator: p = " + std::to_string(p) + ", a = " + std::to_string(a) +
                 ", value " + std::to_string(v) + ", expected " + (member ? "1" : "0"));
    }
  });
  VerifyOutcome out;
  out.kind = "indicator";
  for (const auto& s : slots) out.merge(s);
  return out;
}

// Per prime: cfg.samples random configurations of s in 1..3 characters
// (any divisor k, at least one nonprincipal) with distinct shifts.
inline VerifyOutcome verify_weil(u64 min_p, u64 max_p, const VerifyConfig& cfg = {}) {
  auto primes = primes_in_range(std::max<u64>(min_p, 5), max_p);
  std::vector<VerifyOutcome> slots(primes.size());
  parallel_for(primes.size(), cfg.workers, [&](std::size_t i) {
    const u64 p = primes[i];
    VerifyOutcome& out = slots[i];
    PrimeContext ctx = build_context(p);
    auto divisors = divisors_of(ctx.pm1_fact);  // all of them, not only squarefree
    auto rng = detail::tuple_rng(cfg.seed, p, 0);
    for (u64 sample = 0; sample < cfg.samples; ++sample) {
      u64 s = 1 + detail::bounded_rand(rng, 3);
      std::vector<CharacterId> chis;
      for (u64 j = 0; j < s; ++j) {
        u64 k = divisors[detail::bounded_rand(rng, divisors.size())];
        u64 d = 1;
        if (k > 1)
          do {
            d = 1 + detail::bounded_rand(rng, k);
          } while (std::gcd(d, k) != 1);
        chis.push_back(CharacterId(k, d, ctx));
      }
      bool any_nonprincipal = false;
      for (const auto& chi : chis) any_nonprincipal = any_nonprincipal || !chi.principal();
      if (!any_nonprincipal) {
        // Force one slot away from principal; p >= 3 guarantees a k > 1.
        u64 k = divisors.back();
        u64 d = 1;
        do {
          d = 1 + detail::bounded_rand(rng, k);
        } while (std::gcd(d, k) != 1);
        chis[0] = CharacterId(k, d, ctx);
      }
      std::vector<u64> shifts;
      while (shifts.size() < s) {
        u64 b = detail::bounded_rand(rng, p);  // 0 is a legal shift here
        if (std::find(shifts.begin(), shifts.end(), b) == shifts.end()) shifts.push_back(b);
      }
      WeilBoundCheck check = check_weil_bound(chis, shifts, ctx);
      ++out.checks;
      if (!check.holds) {
        std::string detail = "weil: p = " + std::to_string(p) + ", s = " + std::to_string(s) +
                             ", |sum| = " + std::to_string(std::abs(check.value)) +
                             " > bound " + std::to_string(check.bound) + ", chis =";
        for (const auto& chi : chis)
          detail += " (" + std::to_string(chi.d) + "," + std::to_string(chi.k) + ")";
        out.fail(detail);
      }
    }
  });
  VerifyOutcome out;
  out.kind = "weil";
  for (const auto& s : slots) out.merge(s);
  return out;
}

// Canonical plus seeded random tuples per (p, r): the three count routes must
// agree, sigma1 must equal its closed form, and |sigma2| must respect the
// explicit bound. Tuples the budget refuses are counted as skipped.
inline VerifyOutcome verify_decomposition(u64 min_p, u64 max_p, const VerifyConfig& cfg = {}) {
  auto primes = primes_in_range(std::max<u64>(min_p, 3), max_p);
  std::vector<VerifyOutcome> slots(primes.size());
  parallel_for(primes.size(), cfg.workers, [&](std::size_t i) {
    const u64 p = primes[i];
    VerifyOutcome& out = slots[i];
    PrimeContext ctx = build_context(p);
    for (u32 r : cfg.rs) {
      if (r >= p) continue;
      auto tuples = policy_tuples(TuplePolicy::canonical(), r, p, cfg.seed);
      auto extra = policy_tuples(TuplePolicy::random(cfg.random_tuples), r, p, cfg.seed);
      tuples.insert(tuples.end(), extra.begin(), extra.end());
      for (const auto& shifts : tuples) {
        TargetTuple tuple(shifts, ctx);
        u64 brute = count_bruteforce(tuple, ctx);
        double via_ind = count_indicator(tuple, ctx);
        CountBreakdown split;
        try {
          split = sigma_split(tuple, ctx, DecompositionConfig{cfg.budget, 1});
        } catch (const BudgetExceeded&) {
          ++out.skipped;
          continue;
        }
        ++out.checks;
        std::string where = "p = " + std::to_string(p) + ", shifts = " + shifts_token(shifts);
        if (std::abs(via_ind - static_cast<double>(brute)) > kDecompTol)
          out.fail("decomposition: indicator count " + std::to_string(via_ind) +
                   " vs brute " + std::to_string(brute) + " at " + where);
        else if (split.n_exact != brute)
          out.fail("decomposition: split count " + std::to_string(split.n_exact) +
                   " vs brute " + std::to_string(brute) + " at " + where);
        else if (std::abs(split.sigma1 - split.sigma1_exact_form) > kDecompTol)
          out.fail("decomposition: sigma1 " + std::to_string(split.sigma1) +
                   " vs closed form " + std::to_string(split.sigma1_exact_form) + " at " +
                   where);
        else if (std::abs(split.sigma2) > split.explicit_bound + kDecompTol)
          out.fail("decomposition: |sigma2| = " + std::to_string(std::abs(split.sigma2)) +
                   " > bound " + std::to_string(split.explicit_bound) + " at " + where);
      }
    }
  });
  VerifyOutcome out;
  out.kind = "decomposition";
  for (const auto& s : slots) out.merge(s);
  return out;
}

inline std::vector<VerifyOutcome> verify(VerifyKind kind, u64 min_p, u64 max_p,
                                         const VerifyConfig& cfg = {}) {
  std::vector<VerifyOutcome> outcomes;
  if (kind == VerifyKind::indicator || kind == VerifyKind::all)
    outcomes.push_back(verify_indicator(min_p, max_p, cfg));
  if (kind == VerifyKind::weil || kind == VerifyKind::all)
    outcomes.push_back(verify_weil(min_p, max_p, cfg));
  if (kind == VerifyKind::decomposition || kind == VerifyKind::all)
    outcomes.push_back(verify_decomposition(min_p, max_p, cfg));
  return outcomes;
}

}  // namespace golomb

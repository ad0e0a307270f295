#pragma once

#include <algorithm>
#include <atomic>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace golomb {

using u8 = std::uint8_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;
using cnum = std::complex<double>;

inline constexpr const char* kVersion = "0.1.0";

// Tolerance ladder: single character values, then single character sums,
// then assembled indicators / decompositions.
inline constexpr double kCharValueTol = 1e-12;
inline constexpr double kCharSumTol = 1e-9;
inline constexpr double kDecompTol = 1e-6;
// A decomposed count farther than this from an integer is a hard error.
inline constexpr double kRoundDriftTol = 1e-3;

// Default cap on estimated term evaluations in sigma_split.
inline constexpr u64 kDefaultBudget = 100'000'000;

inline constexpr const char* kWorkersEnvVar = "GOLOMB_WORKERS";

// Effective worker count: GOLOMB_WORKERS wins over the requested value,
// which wins over hardware concurrency.
inline int worker_count(int requested = 0) {
  if (const char* env = std::getenv(kWorkersEnvVar); env && *env) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs fn(0..n-1) on a small pool. Each index writes only its own outputs,
// so results do not depend on the worker count; callers reduce in index
// order. The first exception thrown by any worker is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  if (n == 0) return;
  std::size_t pool_size =
      std::min<std::size_t>(static_cast<std::size_t>(worker_count(workers)), n);
  if (pool_size <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(pool_size);
  std::vector<std::thread> pool;
  pool.reserve(pool_size);
  for (std::size_t t = 0; t < pool_size; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace golomb

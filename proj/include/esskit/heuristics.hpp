#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace esskit {

// Smallest integer count >= v, robust to values like 0.8 * 10 landing a hair
// above the true product.
inline std::size_t ceil_count(double v) {
  if (v <= 0.0) return 0;
  return static_cast<std::size_t>(std::ceil(v - 1e-9));
}

// Slots (1-based) on which the regulation band must hold.
struct TrackedSet {
  std::vector<std::size_t> slots;  // sorted ascending
  double rho2 = 1.0;
  std::size_t total_slots = 0;
};

namespace detail {

inline void check_rho2(double rho2) {
  if (!(rho2 > 0.0) || rho2 > 1.0)
    throw std::invalid_argument("rho2 must be in (0, 1]");
}

// Unbiased draw from [0, n) without relying on distribution internals.
inline std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

}  // namespace detail

// Uniformly random tracked subset, reproducible from the seed. The set for a
// smaller rho2 at the same seed is a subset of the one for a larger rho2, so
// relaxing the tracking requirement never removes options.
inline TrackedSet rand_select(std::size_t total, double rho2,
                              std::uint64_t seed) {
  detail::check_rho2(rho2);
  const std::size_t keep = ceil_count(rho2 * static_cast<double>(total));
  std::vector<std::size_t> perm(total);
  std::iota(perm.begin(), perm.end(), std::size_t{1});
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < total; ++i) {
    const std::size_t j = i + detail::bounded_draw(rng, total - i);
    std::swap(perm[i], perm[j]);
  }
  perm.resize(keep);
  std::sort(perm.begin(), perm.end());
  return TrackedSet{std::move(perm), rho2, total};
}

// The slots with the smallest signal magnitudes; ties go to the lower index.
inline TrackedSet min_cap_select(const std::vector<double>& signal,
                                 double rho2) {
  detail::check_rho2(rho2);
  const std::size_t total = signal.size();
  const std::size_t keep = ceil_count(rho2 * static_cast<double>(total));
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{1});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return std::fabs(signal[a - 1]) < std::fabs(signal[b - 1]);
                   });
  order.resize(keep);
  std::sort(order.begin(), order.end());
  return TrackedSet{std::move(order), rho2, total};
}

// Spreads the allowed violations evenly: slot ceil(k*T/V) for k = 1..V is
// exempt from tracking, everything else is tracked.
inline TrackedSet fix_int_select(std::size_t total, double rho2) {
  detail::check_rho2(rho2);
  const std::size_t keep = ceil_count(rho2 * static_cast<double>(total));
  const std::size_t viol = total - keep;
  std::vector<bool> skip(total + 1, false);
  for (std::size_t k = 1; k <= viol; ++k)
    skip[(k * total + viol - 1) / viol] = true;
  std::vector<std::size_t> slots;
  slots.reserve(keep);
  for (std::size_t s = 1; s <= total; ++s)
    if (!skip[s]) slots.push_back(s);
  return TrackedSet{std::move(slots), rho2, total};
}

}  // namespace esskit

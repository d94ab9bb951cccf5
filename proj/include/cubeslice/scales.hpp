#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "rational.hpp"
#include "rng.hpp"

namespace cubeslice {

// Frozen constant of the two-sided mass inequality: C0 = 10 satisfies
// (1 - C0^-2)^2 / 7 - C0^-2 >= 1/C0 (9 is the minimal integer, 10 is kept for
// slack). Consecutive scales are separated by a factor 4*C0^2.
inline constexpr long c0_constant() { return 10; }
inline constexpr long scale_ratio() { return 4 * c0_constant() * c0_constant(); }       // 400
inline constexpr long scale_ratio_sq() { return scale_ratio() * scale_ratio(); }        // 160000

// Exact check of the admissibility inequality for a candidate integer C0.
inline bool c0_admissible(long c) {
  if (c <= 0) return false;
  Rational inv2(1, c * c);
  inv2.canonicalize();
  Rational lhs = (1 - inv2) * (1 - inv2) / 7 - inv2;
  Rational rhs(1, c);
  rhs.canonicalize();
  return lhs >= rhs;
}

// Ordered partition of coordinate indices into blocks of decreasing norm;
// consecutive block norms separated by at least scale_ratio(). The last block
// is the smallest scale.
struct ScalePartition {
  std::vector<std::vector<int>> blocks;
};

namespace scales_detail {
template <class T>
T block_sq_norm(const std::vector<T>& v, const std::vector<int>& block) {
  T s = T(0);
  for (int j : block) s += v[j] * v[j];
  return s;
}
}  // namespace scales_detail

// Structural problems (overlap, out-of-range, support not covered) throw;
// a failed norm-chain comparison returns false. For T = Rational the chain
// is decided exactly on squared norms.
template <class T>
bool verify_scale_partition(const std::vector<T>& v, const ScalePartition& sp) {
  const int n = static_cast<int>(v.size());
  if (sp.blocks.empty()) throw std::invalid_argument("scale partition: no blocks");
  std::vector<char> seen(n, 0);
  for (const auto& block : sp.blocks)
    for (int j : block) {
      if (j < 0 || j >= n) throw std::invalid_argument("scale partition: index outside vector");
      if (seen[j]) throw std::invalid_argument("scale partition: overlapping blocks");
      seen[j] = 1;
    }
  for (int j = 0; j < n; ++j)
    if (!seen[j] && !(v[j] == T(0)))
      throw std::invalid_argument("scale partition: support not covered");

  const long rs = scale_ratio_sq();
  for (std::size_t s = 0; s + 1 < sp.blocks.size(); ++s) {
    T cur = scales_detail::block_sq_norm(v, sp.blocks[s]);
    T nxt = scales_detail::block_sq_norm(v, sp.blocks[s + 1]);
    if (!(cur >= T(rs) * nxt)) return false;
  }
  return true;
}

// Norm of the last block (the smallest scale), as a double.
template <class T>
double smallest_scale(const std::vector<T>& v, const ScalePartition& sp) {
  if (sp.blocks.empty()) throw std::invalid_argument("scale partition: no blocks");
  T sq = scales_detail::block_sq_norm(v, sp.blocks.back());
  if constexpr (std::is_same_v<T, Rational>)
    return std::sqrt(sq.get_d());
  else
    return std::sqrt(double(sq));
}

// Greedy maximal partition: coordinates sorted by decreasing magnitude; a
// block closes as soon as the remaining tail norm falls below the current
// block norm divided by scale_ratio(). The output always verifies.
template <class T>
ScalePartition greedy_scales(const std::vector<T>& v) {
  const int n = static_cast<int>(v.size());
  if (n == 0) throw std::invalid_argument("greedy_scales: empty vector");
  bool all_zero = true;
  for (const auto& x : v)
    if (!(x == T(0))) all_zero = false;
  if (all_zero) throw std::invalid_argument("greedy_scales: zero vector");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    T aa = v[a] * v[a], bb = v[b] * v[b];
    return bb < aa;
  });
  std::vector<T> suffix_sq(n + 1, T(0));  // tail mass after position i in sorted order
  for (int i = n - 1; i >= 0; --i) suffix_sq[i] = suffix_sq[i + 1] + v[order[i]] * v[order[i]];

  const long rs = scale_ratio_sq();
  ScalePartition sp;
  std::vector<int> cur;
  T cur_sq = T(0);
  for (int i = 0; i < n; ++i) {
    cur.push_back(order[i]);
    cur_sq += v[order[i]] * v[order[i]];
    if (T(rs) * suffix_sq[i + 1] <= cur_sq) {
      sp.blocks.push_back(cur);
      cur.clear();
      cur_sq = T(0);
    }
  }
  if (!cur.empty()) sp.blocks.push_back(cur);  // unreachable: tail 0 closes the last block
  return sp;
}

struct TailEstimate {
  double estimate = 0.0;
  double half_width = 0.0;
  double delta = 0.0;  // smallest scale used
  std::uint64_t hits = 0;
  std::uint64_t trials = 0;
};

// Monte Carlo Pr_{x ~ {-1,1}^n} [ |<x,v> - a| < b * delta ] where delta is the
// smallest scale of the partition. Requires b >= 2 and a valid partition.
inline TailEstimate many_scales_tail_estimate(const std::vector<double>& v,
                                              const ScalePartition& sp, double a, double b,
                                              std::uint64_t trials, Rng& rng) {
  if (b < 2.0) throw std::invalid_argument("tail estimate: b must be >= 2");
  if (trials == 0) throw std::invalid_argument("tail estimate: zero trials");
  if (!verify_scale_partition(v, sp))
    throw std::invalid_argument("tail estimate: partition fails the norm chain");
  const double delta = smallest_scale(v, sp);
  const double window = b * delta;
  const int n = static_cast<int>(v.size());
  std::uint64_t hits = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    double dot = 0.0;
    int j = 0;
    while (j < n) {
      std::uint64_t bits = rng.next_u64();
      int take = n - j < 64 ? n - j : 64;
      for (int b2 = 0; b2 < take; ++b2, ++j) dot += (bits >> b2) & 1ull ? v[j] : -v[j];
    }
    if (std::fabs(dot - a) < window) ++hits;
  }
  TailEstimate est;
  est.hits = hits;
  est.trials = trials;
  est.delta = delta;
  est.estimate = double(hits) / double(trials);
  est.half_width = 1.96 * std::sqrt(est.estimate * (1.0 - est.estimate) / double(trials));
  return est;
}

}  // namespace cubeslice

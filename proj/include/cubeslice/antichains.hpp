#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_set>
#include <utility>
#include <vector>

#include "cube.hpp"
#include "product_measure.hpp"
#include "rational.hpp"
#include "rng.hpp"

namespace cubeslice {

// Family of subsets of [n] (vertices of {0,1}^n), no duplicates.
struct VertexFamily {
  int n = 0;
  std::vector<std::uint32_t> sets;

  void validate() const {
    if (n < 1 || n > 31) throw std::invalid_argument("vertex family: n outside [1,31]");
    std::vector<std::uint32_t> sorted = sets;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("vertex family: duplicate member");
    for (auto s : sets)
      if (s >> n) throw std::invalid_argument("vertex family: member outside [n]");
  }
};

// Truth table of f: {0,1}^n -> {0,1}; entry index is the vertex mask.
struct BooleanFunction {
  int n = 0;
  std::vector<std::uint8_t> table;

  void validate() const {
    if (n < 1 || n > 25) throw std::invalid_argument("boolean function: n outside [1,25]");
    if (table.size() != (std::size_t(1) << n))
      throw std::invalid_argument("boolean function: table size != 2^n");
    for (auto v : table)
      if (v > 1) throw std::invalid_argument("boolean function: non-boolean entry");
  }
  int eval(std::uint32_t mask) const { return table[mask]; }
};

// Edges of {0,1}^n oriented away from the base point u: an edge is stored as
// (a, dir) with a agreeing with u at dir, so after shifting by u the second
// endpoint strictly contains the first.
struct OrientedEdge {
  std::uint32_t a = 0;
  int dir = 0;
  bool operator==(const OrientedEdge&) const = default;
};

struct OrientedEdgeFamily {
  int n = 0;
  std::uint32_t u = 0;
  std::vector<OrientedEdge> edges;

  void validate() const {
    if (n < 1 || n > 31) throw std::invalid_argument("edge family: n outside [1,31]");
    if (u >> n) throw std::invalid_argument("edge family: u outside [n]");
    for (const auto& e : edges) {
      if (e.dir < 0 || e.dir >= n) throw std::invalid_argument("edge family: bad direction");
      if (e.a >> n) throw std::invalid_argument("edge family: endpoint outside [n]");
      if (((e.a >> e.dir) & 1u) != ((u >> e.dir) & 1u))
        throw std::invalid_argument("edge family: edge not oriented away from u");
    }
  }
};

inline bool is_antichain(const VertexFamily& A) {
  A.validate();
  for (std::size_t i = 0; i < A.sets.size(); ++i)
    for (std::size_t j = 0; j < A.sets.size(); ++j) {
      if (i == j) continue;
      std::uint32_t a = A.sets[i], b = A.sets[j];
      if (a != b && (a & b) == a) return false;  // a strictly below b
    }
  return true;
}

struct BoundReport {
  Rational value;
  Rational bound;
  bool holds = false;
};

// Generalized LYM: sum over members of the level-conditional point
// probability is at most one. Exact.
inline BoundReport lym_check(const VertexFamily& A, const ProductMeasure& P) {
  A.validate();
  P.validate();
  if (A.n != P.n()) throw std::invalid_argument("lym: dimension mismatch");
  if (!is_antichain(A)) throw std::invalid_argument("lym: family is not an antichain");
  Rational total = 0;
  for (auto s : A.sets) total += conditional_point_prob(P, s);
  return BoundReport{total, 1, total <= 1};
}

// Sperner bound: Pr[z in A] <= max_l Pr[|z| = l]. Exact.
inline BoundReport sperner_check(const VertexFamily& A, const ProductMeasure& P) {
  A.validate();
  P.validate();
  if (A.n != P.n()) throw std::invalid_argument("sperner: dimension mismatch");
  if (!is_antichain(A)) throw std::invalid_argument("sperner: family is not an antichain");
  Rational hit = 0;
  for (auto s : A.sets) {
    Rational pt = 1;
    for (int j = 0; j < A.n; ++j) pt *= ((s >> j) & 1u) ? P.p[j] : (1 - P.p[j]);
    hit += pt;
  }
  std::vector<Rational> levels = level_distribution(P);
  Rational mx = 0;
  for (const auto& v : levels)
    if (v > mx) mx = v;
  return BoundReport{hit, mx, hit <= mx};
}

// Two oriented edges lie on a common maximal u-chain iff (after the u-shift)
// the top of one is contained in the bottom of the other. An edge family is a
// u-antichain iff no two distinct members are comparable in this sense.
inline bool is_u_edge_antichain(const OrientedEdgeFamily& E) {
  E.validate();
  std::vector<std::pair<std::uint32_t, std::uint32_t>> shifted;  // (bottom, top)
  shifted.reserve(E.edges.size());
  for (const auto& e : E.edges) {
    std::uint32_t bot = e.a ^ E.u;
    shifted.emplace_back(bot, bot | (1u << e.dir));
  }
  std::sort(shifted.begin(), shifted.end());
  shifted.erase(std::unique(shifted.begin(), shifted.end()), shifted.end());
  for (std::size_t i = 0; i < shifted.size(); ++i)
    for (std::size_t j = i + 1; j < shifted.size(); ++j) {
      const auto& [b1, t1] = shifted[i];
      const auto& [b2, t2] = shifted[j];
      if ((t1 & b2) == t1 || (t2 & b1) == t2) return false;
    }
  return true;
}

// The edges sliced by a skew hyperplane, oriented away from u_j = [v_j > 0]
// (vertex mask bit j = 1 corresponds to cube coordinate +1). The result is
// always a u-antichain.
inline OrientedEdgeFamily sliced_edge_family(const Hyperplane& h, const Guards& g = {}) {
  const int n = h.dimension();
  if (!h.is_skew()) throw std::invalid_argument("sliced_edge_family: non-skew plane");
  check_edge_guard(n, g);
  std::uint32_t u = 0;
  for (int j = 0; j < n; ++j)
    if (h.normal[j] > 0) u |= 1u << j;

  std::vector<std::int8_t> sgns;
  detail::margin_signs(h, sgns);
  OrientedEdgeFamily out;
  out.n = n;
  out.u = u;
  for (int dir = 0; dir < n; ++dir) {
    const std::uint32_t bit = 1u << dir;
    const std::uint32_t verts = 1u << n;
    for (std::uint32_t m = 0; m < verts; ++m) {
      if (m & bit) continue;
      if (int(sgns[m]) * int(sgns[m | bit]) < 0) {
        std::uint32_t a = (u & bit) ? (m | bit) : m;
        out.edges.push_back({a, dir});
      }
    }
  }
  return out;
}

// Unordered edge of {0,1}^n as (x, dir); x is either endpoint.
struct SampledEdge {
  std::uint32_t x = 0;
  int dir = 0;
};

// x ~ P; y flips a uniform coordinate among those with variance at least
// sigma_P^2 / (2n). That index set J* is never empty: coordinates below the
// cutoff contribute less than half of sigma_P^2 in total.
inline SampledEdge baker_edge_sampler(const ProductMeasure& P, Rng& rng) {
  P.validate();
  const int n = P.n();
  Rational cutoff = P.sigma2() / (2 * n);
  std::vector<int> jstar;
  for (int j = 0; j < n; ++j) {
    Rational var = P.p[j] * (1 - P.p[j]);
    if (var >= cutoff) jstar.push_back(j);
  }
  if (jstar.empty()) throw std::logic_error("baker sampler: empty J*");
  std::uint32_t x = 0;
  for (int j = 0; j < n; ++j)
    if (rng.bernoulli(P.p[j])) x |= 1u << j;
  int dir = jstar[rng.below(jstar.size())];
  return SampledEdge{x, dir};
}

// x ~ P; direction j with probability proportional to (p_j (1-p_j))^2.
// The weight vector is normalized explicitly.
inline SampledEdge monotone_edge_sampler(const ProductMeasure& P, Rng& rng) {
  P.validate();
  const int n = P.n();
  std::vector<Rational> w(n);
  for (int j = 0; j < n; ++j) {
    Rational var = P.p[j] * (1 - P.p[j]);
    w[j] = var * var;
  }
  std::uint32_t x = 0;
  for (int j = 0; j < n; ++j)
    if (rng.bernoulli(P.p[j])) x |= 1u << j;
  int dir = static_cast<int>(rng.categorical(w));
  return SampledEdge{x, dir};
}

struct HitEstimate {
  double estimate = 0.0;
  double half_width = 0.0;  // 1.96 * sqrt(est*(1-est)/trials)
  std::uint64_t hits = 0;
  std::uint64_t trials = 0;
};

enum class EdgeSamplerKind { Baker, Monotone };

// Monte Carlo estimate of the probability that the sampled edge lies in A
// (as an unordered edge).
inline HitEstimate edge_antichain_hit_estimate(const OrientedEdgeFamily& A,
                                               const ProductMeasure& P,
                                               EdgeSamplerKind kind, std::uint64_t trials,
                                               Rng& rng) {
  A.validate();
  P.validate();
  if (A.n != P.n()) throw std::invalid_argument("hit estimate: dimension mismatch");
  if (trials == 0) throw std::invalid_argument("hit estimate: zero trials");
  std::unordered_set<std::uint64_t> members;
  members.reserve(A.edges.size() * 2);
  for (const auto& e : A.edges) {
    std::uint32_t base = e.a & ~(1u << e.dir);
    members.insert((std::uint64_t(e.dir) << 32) | base);
  }
  std::uint64_t hits = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    SampledEdge e = kind == EdgeSamplerKind::Baker ? baker_edge_sampler(P, rng)
                                                   : monotone_edge_sampler(P, rng);
    std::uint32_t base = e.x & ~(1u << e.dir);
    if (members.count((std::uint64_t(e.dir) << 32) | base)) ++hits;
  }
  HitEstimate est;
  est.hits = hits;
  est.trials = trials;
  est.estimate = double(hits) / double(trials);
  est.half_width = 1.96 * std::sqrt(est.estimate * (1.0 - est.estimate) / double(trials));
  return est;
}

// f is u-monotone iff f(z xor u) is monotone in the usual order.
inline bool is_u_monotone(const BooleanFunction& f, std::uint32_t u) {
  f.validate();
  if (u >> f.n) throw std::invalid_argument("is_u_monotone: u outside [n]");
  const std::uint32_t verts = 1u << f.n;
  for (std::uint32_t z = 0; z < verts; ++z)
    for (int j = 0; j < f.n; ++j) {
      std::uint32_t bit = 1u << j;
      if (z & bit) continue;
      if (f.table[z ^ u] > f.table[(z | bit) ^ u]) return false;
    }
  return true;
}

// Exact Pr[f(x) != f(y)] under the monotone edge sampler, against the bound
// 1/sigma_P. Requires f u-monotone. The bound is irrational, so the verdict
// compares value^2 * sigma2 <= 1 over Q.
struct BoundaryReport {
  Rational value;
  double bound = 0.0;  // 1 / sigma_P
  bool holds = false;
};

inline BoundaryReport boundary_prob(const BooleanFunction& f, const ProductMeasure& P,
                                    std::uint32_t u, const Guards& g = {}) {
  f.validate();
  P.validate();
  if (f.n != P.n()) throw std::invalid_argument("boundary_prob: dimension mismatch");
  check_vertex_guard(f.n, g);
  if (!is_u_monotone(f, u)) throw std::invalid_argument("boundary_prob: f is not u-monotone");
  const int n = f.n;
  std::vector<Rational> w(n);
  Rational wtotal = 0;
  for (int j = 0; j < n; ++j) {
    Rational var = P.p[j] * (1 - P.p[j]);
    w[j] = var * var;
    wtotal += w[j];
  }
  const std::uint32_t verts = 1u << n;
  Rational acc = 0;
  for (std::uint32_t x = 0; x < verts; ++x) {
    Rational px = 1;
    for (int j = 0; j < n; ++j) px *= ((x >> j) & 1u) ? P.p[j] : (1 - P.p[j]);
    Rational flip = 0;
    for (int j = 0; j < n; ++j)
      if (f.table[x] != f.table[x ^ (1u << j)]) flip += w[j];
    acc += px * flip;
  }
  acc /= wtotal;
  Rational s2 = P.sigma2();
  BoundaryReport rep;
  rep.value = acc;
  rep.bound = 1.0 / std::sqrt(s2.get_d());
  Rational lhs = acc * acc * s2;  // value <= 1/sigma_P  <=>  value^2 * sigma2 <= 1
  rep.holds = lhs <= 1;
  return rep;
}

// Degree-1 coefficient in the biased Fourier basis chi_j(z) =
// (z_j - p_j) / sqrt(p_j (1-p_j)). The rational part E[(z_j - p_j) f(z)] is
// computed exactly and divided by the (irrational) normalizer as a double.
inline double biased_fourier_degree1(const BooleanFunction& f, const ProductMeasure& P, int j,
                                     const Guards& g = {}) {
  f.validate();
  P.validate();
  if (f.n != P.n()) throw std::invalid_argument("fourier: dimension mismatch");
  if (j < 0 || j >= f.n) throw std::invalid_argument("fourier: j outside [n]");
  check_vertex_guard(f.n, g);
  const std::uint32_t verts = 1u << f.n;
  Rational acc = 0;
  for (std::uint32_t x = 0; x < verts; ++x) {
    if (!f.table[x]) continue;
    Rational px = 1;
    for (int a = 0; a < f.n; ++a) px *= ((x >> a) & 1u) ? P.p[a] : (1 - P.p[a]);
    Rational zj = ((x >> j) & 1u) ? Rational(1) : Rational(0);
    acc += px * (zj - P.p[j]);
  }
  Rational var = P.p[j] * (1 - P.p[j]);
  return acc.get_d() / std::sqrt(var.get_d());
}

}  // namespace cubeslice

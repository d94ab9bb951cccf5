#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rational.hpp"
#include "rng.hpp"

namespace cubeslice {

// Product measure on {0,1}^n with marginals Pr[z_j = 1] = p_j, 0 < p_j < 1.
// q_j = p_j / (1 - p_j) is the odds ratio; all derived probabilities are exact.
struct ProductMeasure {
  std::vector<Rational> p;

  int n() const { return static_cast<int>(p.size()); }

  void validate() const {
    if (p.empty()) throw std::invalid_argument("measure: empty");
    for (const auto& pj : p)
      if (pj <= 0 || pj >= 1) throw std::invalid_argument("measure: p_j outside (0,1)");
  }

  std::vector<Rational> odds() const {
    std::vector<Rational> q(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
      q[j] = p[j] / (1 - p[j]);
    }
    return q;
  }

  // sigma_P^2 = sum p_j (1 - p_j)
  Rational sigma2() const {
    Rational s = 0;
    for (const auto& pj : p) s += pj * (1 - pj);
    return s;
  }
};

// g_l(q) = sum over l-subsets of the products of their q entries.
// Standard O(|q| * lmax) dynamic program; returns g_0..g_lmax.
inline std::vector<Rational> elem_sym_all(const std::vector<Rational>& q, int lmax) {
  if (lmax < 0) throw std::invalid_argument("elem_sym: negative level");
  std::vector<Rational> e(lmax + 1, Rational(0));
  e[0] = 1;
  int processed = 0;
  for (const auto& qj : q) {
    ++processed;
    int top = processed < lmax ? processed : lmax;
    for (int a = top; a >= 1; --a) e[a] += qj * e[a - 1];
  }
  return e;
}

inline Rational elem_sym(const std::vector<Rational>& q, int l) {
  if (l > static_cast<int>(q.size())) return 0;
  return elem_sym_all(q, l)[l];
}

// Pr[|z| = l] for l = 0..n: product of (1-p_j) times g_l(q).
inline std::vector<Rational> level_distribution(const ProductMeasure& P) {
  P.validate();
  const int n = P.n();
  Rational base = 1;
  for (const auto& pj : P.p) base *= (1 - pj);
  std::vector<Rational> g = elem_sym_all(P.odds(), n);
  std::vector<Rational> out(n + 1);
  for (int l = 0; l <= n; ++l) out[l] = base * g[l];
  return out;
}

namespace measure_detail {
inline void check_subset(std::uint32_t s, int n) {
  if (n > 31) throw std::invalid_argument("subset mask limited to n <= 31");
  if (s >> n) throw std::invalid_argument("subset outside [n]");
}
}  // namespace measure_detail

// P_l(s) = prod_{a in s} q_a / g_l(q), the level-conditional point probability.
inline Rational conditional_point_prob(const ProductMeasure& P, std::uint32_t s) {
  P.validate();
  measure_detail::check_subset(s, P.n());
  const int l = std::popcount(s);
  std::vector<Rational> q = P.odds();
  Rational num = 1;
  for (int j = 0; j < P.n(); ++j)
    if ((s >> j) & 1u) num *= q[j];
  return num / elem_sym(q, l);
}

// h_{s,j} = sum over l-subsets t avoiding j of (1/|(s u {j}) \ t|) prod q_t.
// Evaluated in polynomial time by splitting t into its part inside s (size a)
// and its part in the complement of s u {j} (size l-a); the denominator is
// then l - a + 1.
inline Rational h_coeff(const ProductMeasure& P, std::uint32_t s, int j) {
  P.validate();
  const int n = P.n();
  measure_detail::check_subset(s, n);
  if (j < 0 || j >= n) throw std::invalid_argument("h_coeff: j outside [n]");
  if ((s >> j) & 1u) throw std::invalid_argument("h_coeff: j in s");
  const int l = std::popcount(s);
  std::vector<Rational> q = P.odds();
  std::vector<Rational> qs, qr;
  for (int a = 0; a < n; ++a) {
    if ((s >> a) & 1u)
      qs.push_back(q[a]);
    else if (a != j)
      qr.push_back(q[a]);
  }
  std::vector<Rational> A = elem_sym_all(qs, l);
  std::vector<Rational> B = elem_sym_all(qr, l);
  Rational h = 0;
  for (int a = 0; a <= l; ++a) {
    Rational term = A[a] * B[l - a];
    term /= (l - a + 1);
    h += term;
  }
  return h;
}

// Transition weights of the chain at state s: Pr[s -> s u {j}] =
// q_j h_{s,j} / g_{l+1}(q) for j outside s. The weights sum to one exactly.
inline std::vector<std::pair<int, Rational>> chain_step_weights(const ProductMeasure& P,
                                                                std::uint32_t s) {
  P.validate();
  const int n = P.n();
  measure_detail::check_subset(s, n);
  const int l = std::popcount(s);
  if (l >= n) throw std::invalid_argument("chain_step: s already full");
  std::vector<Rational> q = P.odds();
  Rational gnext = elem_sym(q, l + 1);
  std::vector<std::pair<int, Rational>> out;
  out.reserve(n - l);
  for (int j = 0; j < n; ++j) {
    if ((s >> j) & 1u) continue;
    Rational w = q[j] * h_coeff(P, s, j) / gnext;
    out.emplace_back(j, w);
  }
  return out;
}

// One chain step: samples j with the exact transition weights, returns s u {j}.
inline std::uint32_t chain_step(const ProductMeasure& P, std::uint32_t s, Rng& rng) {
  auto wj = chain_step_weights(P, s);
  std::vector<Rational> w(wj.size());
  for (std::size_t i = 0; i < wj.size(); ++i) w[i] = wj[i].second;
  return s | (1u << wj[rng.categorical(w)].first);
}

// Full chain from the empty set; returns the coordinates in insertion order.
// The level-l state of the chain is distributed P_l.
inline std::vector<int> sample_chain(const ProductMeasure& P, Rng& rng) {
  P.validate();
  std::vector<int> order;
  order.reserve(P.n());
  std::uint32_t s = 0;
  for (int l = 0; l < P.n(); ++l) {
    std::uint32_t t = chain_step(P, s, rng);
    order.push_back(std::countr_zero(t & ~s));
    s = t;
  }
  return order;
}

struct AnticoncentrationReport {
  Rational max_level_prob;
  double bound = 0.0;  // sqrt(pi) / sigma_P, reporting value
  bool holds = false;  // certified: max^2 * sigma2 <= pi (rational lower enclosure)
};

// max_l Pr[|z| = l] <= sqrt(pi) / sigma_P. The verdict squares the comparison
// so it is decided entirely over Q against an enclosure of pi; the double
// `bound` is for reporting only.
inline AnticoncentrationReport anticoncentration_check(const ProductMeasure& P) {
  std::vector<Rational> levels = level_distribution(P);
  Rational mx = 0;
  for (const auto& v : levels)
    if (v > mx) mx = v;
  Rational s2 = P.sigma2();
  AnticoncentrationReport rep;
  rep.max_level_prob = mx;
  rep.bound = std::sqrt(3.14159265358979323846 / s2.get_d());
  Rational lhs = mx * mx * s2;
  rep.holds = lhs <= pi_lower();
  return rep;
}

}  // namespace cubeslice

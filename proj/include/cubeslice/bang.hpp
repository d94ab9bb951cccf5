#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rational.hpp"

namespace cubeslice {

// Instance of the sign-vector margin problem: M symmetric with unit diagonal,
// theta >= 0. A solution is epsilon in {-1,+1}^k with
// |theta * (M eps)_i - gamma_i| >= theta for every i.
struct BangInstance {
  std::vector<std::vector<Rational>> M;
  std::vector<Rational> gamma;
  Rational theta;

  int k() const { return static_cast<int>(gamma.size()); }

  void validate() const {
    const std::size_t n = gamma.size();
    if (M.size() != n) throw std::invalid_argument("bang: M/gamma size mismatch");
    if (theta < 0) throw std::invalid_argument("bang: theta must be >= 0");
    for (std::size_t i = 0; i < n; ++i) {
      if (M[i].size() != n) throw std::invalid_argument("bang: M not square");
      if (M[i][i] != 1) throw std::invalid_argument("bang: diagonal entry != 1");
      for (std::size_t j = i + 1; j < n; ++j)
        if (M[i][j] != M[j][i]) throw std::invalid_argument("bang: M not symmetric");
    }
  }
};

struct BangSolution {
  std::vector<int> epsilon;                 // entries +-1
  std::vector<Rational> margins;            // |theta*(M eps)_i - gamma_i|
  std::vector<Rational> potential_history;  // G after each accepted flip, strictly increasing
  std::uint64_t flips = 0;
};

inline std::vector<Rational> bang_margins(const BangInstance& inst,
                                          const std::vector<int>& epsilon) {
  const int k = inst.k();
  if (static_cast<int>(epsilon.size()) != k)
    throw std::invalid_argument("bang: epsilon size mismatch");
  std::vector<Rational> out(k);
  for (int i = 0; i < k; ++i) {
    Rational me = 0;
    for (int j = 0; j < k; ++j) {
      if (epsilon[j] > 0)
        me += inst.M[i][j];
      else
        me -= inst.M[i][j];
    }
    Rational m = inst.theta * me - inst.gamma[i];
    out[i] = abs(m);
  }
  return out;
}

inline bool bang_verify(const BangInstance& inst, const std::vector<int>& epsilon) {
  inst.validate();
  for (const auto& m : bang_margins(inst, epsilon))
    if (m < inst.theta) return false;
  return true;
}

// Maximizes G(eps) = theta * eps^T M eps - 2 <gamma, eps> by steepest single
// flips (ties broken toward the lowest index). The flip difference is exactly
// 4 (theta - eps_i (theta (M eps)_i - gamma_i)), so at any local maximum every
// margin is >= theta. All arithmetic exact; the certificate is unconditional.
inline BangSolution bang_solve(const BangInstance& inst) {
  inst.validate();
  const int k = inst.k();
  BangSolution sol;
  sol.epsilon.assign(k, +1);
  if (k == 0) return sol;

  std::vector<Rational> Me(k);  // (M eps)_i
  for (int i = 0; i < k; ++i) {
    Rational s = 0;
    for (int j = 0; j < k; ++j) s += inst.M[i][j];
    Me[i] = s;
  }
  Rational G = 0;
  for (int i = 0; i < k; ++i) {
    G += inst.theta * Me[i];  // eps_i = +1
    G -= 2 * inst.gamma[i];
  }
  sol.potential_history.push_back(G);

  // strict increase of G bounds the flip count by 2^k; the cap is defensive
  const std::uint64_t cap = k < 40 ? (std::uint64_t(1) << k) : ~std::uint64_t(0);
  for (;;) {
    int best = -1;
    Rational best_gain = 0;
    for (int i = 0; i < k; ++i) {
      Rational gain = 4 * (inst.theta - sol.epsilon[i] * (inst.theta * Me[i] - inst.gamma[i]));
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    if (best < 0) break;
    // flip
    Rational delta = -2 * sol.epsilon[best];
    for (int j = 0; j < k; ++j) Me[j] += delta * inst.M[j][best];
    sol.epsilon[best] = -sol.epsilon[best];
    G += best_gain;
    sol.potential_history.push_back(G);
    if (++sol.flips > cap) throw std::logic_error("bang_solve: flip cap exceeded");
  }
  sol.margins = bang_margins(inst, sol.epsilon);
  return sol;
}

}  // namespace cubeslice

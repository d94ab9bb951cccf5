#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "antichains.hpp"
#include "bang.hpp"
#include "cube.hpp"
#include "decompose.hpp"
#include "product_measure.hpp"
#include "rational.hpp"
#include "rng.hpp"

// Seeded instance generators for randomized batteries. Every draw goes
// through Rng, so a fixed seed reproduces the same instance everywhere.

namespace cubeslice {

inline Hyperplane random_skew_plane(int n, Rng& rng) {
  Hyperplane h;
  h.normal.resize(n);
  for (int j = 0; j < n; ++j) {
    long num = 0;
    while (num == 0) num = static_cast<long>(rng.below(19)) - 9;
    long den = 1 + static_cast<long>(rng.below(3));
    Rational r(num, den);
    r.canonicalize();
    h.normal[j] = r;
  }
  long mu_num = static_cast<long>(rng.below(4 * n + 1)) - 2 * n;
  Rational mu(mu_num, 2);
  mu.canonicalize();
  h.mu = mu;
  return h;
}

inline HyperplaneFamily random_skew_family(int n, int k, Rng& rng) {
  HyperplaneFamily F;
  F.n = n;
  for (int i = 0; i < k; ++i) F.planes.push_back(random_skew_plane(n, rng));
  F.validate();
  return F;
}

inline ProductMeasure random_measure(int n, Rng& rng, unsigned max_den = 16) {
  ProductMeasure P;
  P.p.resize(n);
  for (int j = 0; j < n; ++j) {
    unsigned long den = 2 + rng.below(max_den - 1);
    unsigned long num = 1 + rng.below(den - 1);
    Rational r(num, den);
    r.canonicalize();
    P.p[j] = r;
  }
  P.validate();
  return P;
}

// Symmetric unit-diagonal matrix built as a normalized Gram matrix of
// Gaussian rows, with off-diagonal entries rationalized from their double
// values so the instance is exact.
inline BangInstance random_bang_instance(int k, Rng& rng) {
  int m = k + 2;
  std::vector<std::vector<double>> A(k, std::vector<double>(m));
  for (auto& row : A)
    for (auto& x : row) x = rng.gaussian();
  std::vector<double> d(k);
  for (int a = 0; a < k; ++a) {
    double s = 0;
    for (int c = 0; c < m; ++c) s += A[a][c] * A[a][c];
    d[a] = std::sqrt(s);
  }
  BangInstance inst;
  inst.M.assign(k, std::vector<Rational>(k, Rational(0)));
  for (int a = 0; a < k; ++a) {
    inst.M[a][a] = 1;
    for (int b = a + 1; b < k; ++b) {
      double g = 0;
      for (int c = 0; c < m; ++c) g += A[a][c] * A[b][c];
      Rational r = rational_from_double(g / (d[a] * d[b]));
      inst.M[a][b] = r;
      inst.M[b][a] = r;
    }
  }
  inst.gamma.resize(k);
  for (int a = 0; a < k; ++a) {
    Rational g(static_cast<long>(rng.below(401)) - 200, 100);
    g.canonicalize();
    inst.gamma[a] = g;
  }
  Rational th(1 + static_cast<long>(rng.below(99)), 100);
  th.canonicalize();
  inst.theta = th;
  inst.validate();
  return inst;
}

// Skew family covering every vertex: repeatedly passes a small-entry skew
// plane through the lowest uncovered vertex. Entries in {+-1, +-2} make each
// plane hit many vertices, keeping the family small.
inline HyperplaneFamily random_skew_cover(int n, Rng& rng) {
  check_vertex_guard(n, Guards{});
  const std::uint32_t size = 1u << n;
  std::vector<char> covered(size, 0);
  HyperplaneFamily F;
  F.n = n;
  for (std::uint32_t guard = 0; guard <= size; ++guard) {
    std::uint32_t target = size;
    for (std::uint32_t m = 0; m < size; ++m)
      if (!covered[m]) {
        target = m;
        break;
      }
    if (target == size) break;
    Hyperplane h;
    h.normal.resize(n);
    Rational mu = 0;
    for (int j = 0; j < n; ++j) {
      long mag = 1 + static_cast<long>(rng.below(2));
      long sgn = (rng.next_u64() & 1ull) ? 1 : -1;
      h.normal[j] = Rational(sgn * mag);
      mu += ((target >> j) & 1u) ? h.normal[j] : -h.normal[j];
    }
    h.mu = mu;
    for (std::uint32_t m = 0; m < size; ++m) {
      if (covered[m]) continue;
      if (margin(h, CubeVertex{n, m}) == 0) covered[m] = 1;
    }
    F.planes.push_back(std::move(h));
  }
  F.validate();
  return F;
}

// Rows for the decomposition battery: a coin picks per row between a dense
// Gaussian row and a nested concentrated row whose spike weights shrink by a
// factor eta = tau/2 per level, with the leftover mass spread over all other
// coordinates. The concentrated rows force drops, removals, and residual
// cascades.
inline Matrix random_decompose_matrix(int k, int n, Rng& rng, double tau) {
  Matrix V(k, std::vector<double>(n, 0.0));
  double eta = tau / 2;
  for (int i = 0; i < k; ++i) {
    if (rng.next_u64() & 1ull) {
      bool nonzero = false;
      for (int j = 0; j < n; ++j) {
        V[i][j] = rng.gaussian();
        nonzero = nonzero || V[i][j] != 0.0;
      }
      if (!nonzero) V[i][0] = 1.0;
      continue;
    }
    int L = 1 + static_cast<int>(rng.below(std::min(4, n)));
    std::vector<int> cols(n);
    std::iota(cols.begin(), cols.end(), 0);
    for (int t = 0; t < L; ++t) {
      int pick = t + static_cast<int>(rng.below(n - t));
      std::swap(cols[t], cols[pick]);
    }
    double level = 1.0;
    for (int t = 0; t < L; ++t) {
      double sgn = (rng.next_u64() & 1ull) ? 1.0 : -1.0;
      V[i][cols[t]] = sgn * std::sqrt(level * (1.0 - eta));
      level *= eta;
    }
    if (L < n) {
      double tail = std::sqrt(level / (n - L));
      for (int t = L; t < n; ++t) {
        double sgn = (rng.next_u64() & 1ull) ? 1.0 : -1.0;
        V[i][cols[t]] = sgn * tail;
      }
    }
  }
  return V;
}

inline BooleanFunction random_function(int n, Rng& rng) {
  BooleanFunction f;
  f.n = n;
  f.table.resize(std::size_t(1) << n);
  std::uint64_t bits = 0;
  int have = 0;
  for (std::size_t m = 0; m < f.table.size(); ++m) {
    if (have == 0) {
      bits = rng.next_u64();
      have = 64;
    }
    f.table[m] = bits & 1ull;
    bits >>= 1;
    --have;
  }
  f.validate();
  return f;
}

// All antichains of the subset lattice of [n], enumerated as the minimal
// 1-sets of monotone boolean functions (a bijection). Sizes follow the
// Dedekind numbers: 168 at n = 4, 7581 at n = 5.
inline std::vector<std::vector<std::uint32_t>> all_antichains(int n) {
  if (n < 1 || n > 5) throw std::invalid_argument("all_antichains: n outside [1,5]");
  const std::uint32_t size = 1u << n;
  std::vector<std::uint32_t> order(size);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [](std::uint32_t a, std::uint32_t b) {
    int pa = std::popcount(a), pb = std::popcount(b);
    return pa != pb ? pa < pb : a < b;
  });
  std::vector<std::uint8_t> f(size, 0);
  std::vector<std::vector<std::uint32_t>> out;
  auto rec = [&](auto&& self, std::uint32_t pos) -> void {
    if (pos == size) {
      std::vector<std::uint32_t> minimal;
      for (std::uint32_t m = 0; m < size; ++m) {
        if (!f[m]) continue;
        bool is_min = true;
        for (int b = 0; b < n && is_min; ++b)
          if (((m >> b) & 1u) && f[m ^ (1u << b)]) is_min = false;
        if (is_min) minimal.push_back(m);
      }
      out.push_back(std::move(minimal));
      return;
    }
    std::uint32_t m = order[pos];
    bool forced = false;
    for (int b = 0; b < n && !forced; ++b)
      if (((m >> b) & 1u) && f[m ^ (1u << b)]) forced = true;
    if (!forced) {
      f[m] = 0;
      self(self, pos + 1);
    }
    f[m] = 1;
    self(self, pos + 1);
    f[m] = 0;
  };
  rec(rec, 0);
  return out;
}

}  // namespace cubeslice

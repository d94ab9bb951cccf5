#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "scales.hpp"

namespace cubeslice {

using Matrix = std::vector<std::vector<double>>;

// Loop parameters. Standard values: mass_threshold = n^-0.488, column_bound =
// n^-0.487, tau with sqrt((1-tau)/tau) = 4*C0^2 (so tau = 1/160001), and
// S = floor(n^0.001) drops before a row is moved out. All are configurable,
// but tau must stay <= 1/160001 or the drop certificates would not meet the
// scale_ratio() separation that verify_scale_partition checks.
struct DecompositionParams {
  double mass_threshold = 0.0;
  double column_bound = 0.0;
  double tau = 1.0 / 160001.0;
  int S = 1;

  static DecompositionParams standard(int n) {
    DecompositionParams p;
    p.mass_threshold = std::pow(double(n), -0.488);
    p.column_bound = std::pow(double(n), -0.487);
    p.tau = 1.0 / 160001.0;
    p.S = std::max(1, static_cast<int>(std::floor(std::pow(double(n), 0.001))));
    return p;
  }

  void validate() const {
    if (!(mass_threshold > 0)) throw std::invalid_argument("params: mass_threshold <= 0");
    if (!(column_bound > 0)) throw std::invalid_argument("params: column_bound <= 0");
    if (!(tau > 0 && tau < 1)) throw std::invalid_argument("params: tau outside (0,1)");
    if (tau > 1.0 / 160001.0 + 1e-15)
      throw std::invalid_argument("params: tau too large for the scale-ratio certificates");
    if (S < 1) throw std::invalid_argument("params: S < 1");
  }
};

// Certificate for a removed row: each drop contributed one block (the columns
// removed from the retained set since the previous drop), the residual block
// is the smallest scale and contains every column still retained when the row
// left. Block norms are measured on the unit-normalized input row; the drop
// rule makes consecutive blocks separated by more than scale_ratio().
struct ScaleCertificate {
  int row = 0;  // original row index
  ScalePartition partition;
};

struct DecompositionResult {
  std::vector<int> row_order;  // retained rows (ascending), then removed rows in removal order
  std::vector<int> col_order;  // retained columns (ascending), then removed in removal order
  int k_prime = 0;
  int n_prime = 0;
  Matrix V_prime;                          // k' x n', rows renormalized to unit norm
  std::vector<double> retained_row_norm;   // per retained row: norm of its retained part
                                           // on the unit-normalized input row
  std::vector<ScaleCertificate> certificates;  // removed rows, in removal order
  std::vector<int> drop_counts;                // per original row
  int removals = 0;
};

namespace decompose_detail {

inline Matrix unit_rows(const Matrix& V) {
  Matrix W = V;
  for (auto& row : W) {
    double sq = 0;
    for (double x : row) sq += x * x;
    if (!(sq > 0)) throw std::invalid_argument("decompose: zero row");
    double inv = 1.0 / std::sqrt(sq);
    for (double& x : row) x *= inv;
  }
  return W;
}

}  // namespace decompose_detail

// Repeatedly removes the heaviest column whose mass (under the current row
// normalizations) reaches mass_threshold; a row whose retained mass falls
// below tau records a drop and is renormalized, and a row dropping more than
// S times is moved out with its scale certificate. After the threshold loop,
// columns that would still violate column_bound under the final
// renormalization are removed the same way, so the emitted invariants hold
// unconditionally. Ties always break toward the lowest column index.
inline DecompositionResult decompose(const Matrix& V, const DecompositionParams& params,
                                     int ncols = -1) {
  params.validate();
  const int k = static_cast<int>(V.size());
  const int n = k == 0 ? ncols : static_cast<int>(V[0].size());
  if (n < 0) throw std::invalid_argument("decompose: empty matrix needs an explicit width");
  for (const auto& row : V)
    if (static_cast<int>(row.size()) != n) throw std::invalid_argument("decompose: ragged matrix");

  Matrix W = decompose_detail::unit_rows(V);

  std::vector<char> row_live(k, 1), col_live(n, 1);
  std::vector<double> row_scale(k, 1.0);              // current normalization multiplier
  std::vector<int> drop_marker(k, 0);                 // removals seen at the row's last drop
  std::vector<std::vector<std::vector<int>>> drop_blocks(k);
  std::vector<int> removal_list;                      // removed columns in order
  std::vector<int> removed_rows;                      // removed rows in order
  DecompositionResult res;
  res.drop_counts.assign(k, 0);

  auto retained_sq = [&](int i) {
    double s = 0;
    for (int j = 0; j < n; ++j)
      if (col_live[j]) s += W[i][j] * W[i][j];
    return s;
  };

  int iterations = 0;
  for (;;) {
    if (++iterations > n + 1) throw std::logic_error("decompose: nontermination guard tripped");

    // phase 1 selection: current-normalization mass >= mass_threshold
    auto heaviest = [&](const std::vector<double>& row_factor, double threshold) {
      int pick = -1;
      double pick_mass = -1;
      for (int j = 0; j < n; ++j) {
        if (!col_live[j]) continue;
        double m = 0;
        for (int i = 0; i < k; ++i)
          if (row_live[i]) m += row_factor[i] * W[i][j] * W[i][j];
        if (m >= threshold && m > pick_mass) {
          pick_mass = m;
          pick = j;
        }
      }
      return pick;
    };
    std::vector<double> factor(k, 0.0);
    for (int i = 0; i < k; ++i)
      if (row_live[i]) factor[i] = row_scale[i] * row_scale[i];
    int pick = heaviest(factor, params.mass_threshold);
    // phase 2 selection: final-normalization mass >= column_bound
    if (pick < 0) {
      for (int i = 0; i < k; ++i) {
        factor[i] = 0.0;
        if (row_live[i]) {
          double r2 = retained_sq(i);
          if (r2 > 0) factor[i] = 1.0 / r2;
        }
      }
      pick = heaviest(factor, params.column_bound);
    }
    if (pick < 0) break;

    col_live[pick] = 0;
    removal_list.push_back(pick);
    ++res.removals;

    // drop / removal bookkeeping, rows in ascending index for determinism
    for (int i = 0; i < k; ++i) {
      if (!row_live[i]) continue;
      double r2 = retained_sq(i);
      double cur_mass = row_scale[i] * row_scale[i] * r2;
      if (cur_mass >= params.tau) continue;
      // drop fires
      ++res.drop_counts[i];
      std::vector<int> block(removal_list.begin() + drop_marker[i], removal_list.end());
      drop_blocks[i].push_back(std::move(block));
      drop_marker[i] = static_cast<int>(removal_list.size());
      const bool dead_mass = r2 < std::numeric_limits<double>::min();
      if (res.drop_counts[i] > params.S || dead_mass) {
        row_live[i] = 0;
        removed_rows.push_back(i);
        ScaleCertificate cert;
        cert.row = i;
        cert.partition.blocks = drop_blocks[i];
        std::vector<int> residual;
        for (int j = 0; j < n; ++j)
          if (col_live[j]) residual.push_back(j);
        cert.partition.blocks.push_back(std::move(residual));
        res.certificates.push_back(std::move(cert));
      } else {
        row_scale[i] = 1.0 / std::sqrt(r2);
      }
    }
  }

  for (int i = 0; i < k; ++i)
    if (row_live[i]) res.row_order.push_back(i);
  res.k_prime = static_cast<int>(res.row_order.size());
  res.row_order.insert(res.row_order.end(), removed_rows.begin(), removed_rows.end());
  std::vector<int> retained_cols;
  for (int j = 0; j < n; ++j)
    if (col_live[j]) retained_cols.push_back(j);
  res.n_prime = static_cast<int>(retained_cols.size());
  res.col_order = retained_cols;
  res.col_order.insert(res.col_order.end(), removal_list.begin(), removal_list.end());

  res.V_prime.assign(res.k_prime, std::vector<double>(res.n_prime, 0.0));
  res.retained_row_norm.assign(res.k_prime, 0.0);
  for (int a = 0; a < res.k_prime; ++a) {
    int i = res.row_order[a];
    double r2 = retained_sq(i);
    double r = std::sqrt(r2);
    res.retained_row_norm[a] = r;
    for (int b = 0; b < res.n_prime; ++b) res.V_prime[a][b] = W[i][retained_cols[b]] / r;
  }
  return res;
}

// From-scratch verification of a DecompositionResult against the input
// matrix: permutation structure, recomputed V', unit rows, the column_bound
// mass bound and its l1 consequence, and every removed row's certificate
// (partition of all n coordinates, norm chain, smallest scale containing the
// retained columns, and S+2 blocks unless the residual is numerically zero).
inline bool check_result(const Matrix& V, const DecompositionResult& res,
                         const DecompositionParams& params, double tol = 1e-12) {
  params.validate();
  const int k = static_cast<int>(V.size());
  const int n = k == 0 ? static_cast<int>(res.col_order.size()) : static_cast<int>(V[0].size());

  auto is_perm = [](const std::vector<int>& v, int m) {
    if (static_cast<int>(v.size()) != m) return false;
    std::vector<char> seen(m, 0);
    for (int x : v) {
      if (x < 0 || x >= m || seen[x]) return false;
      seen[x] = 1;
    }
    return true;
  };
  if (!is_perm(res.row_order, k) || !is_perm(res.col_order, n)) return false;
  if (res.k_prime < 0 || res.k_prime > k || res.n_prime < 0 || res.n_prime > n) return false;
  if (static_cast<int>(res.certificates.size()) != k - res.k_prime) return false;

  Matrix W = decompose_detail::unit_rows(V);

  // recompute V' and compare
  if (static_cast<int>(res.V_prime.size()) != res.k_prime) return false;
  for (int a = 0; a < res.k_prime; ++a) {
    if (static_cast<int>(res.V_prime[a].size()) != res.n_prime) return false;
    int i = res.row_order[a];
    double r2 = 0;
    for (int b = 0; b < res.n_prime; ++b) {
      double x = W[i][res.col_order[b]];
      r2 += x * x;
    }
    if (!(r2 > 0)) return false;
    double r = std::sqrt(r2);
    double unit = 0;
    for (int b = 0; b < res.n_prime; ++b) {
      double expect = W[i][res.col_order[b]] / r;
      if (std::fabs(expect - res.V_prime[a][b]) > tol) return false;
      unit += res.V_prime[a][b] * res.V_prime[a][b];
    }
    if (std::fabs(unit - 1.0) > tol && res.n_prime > 0) return false;
  }

  // column bounds on the final matrix (vacuous with no retained rows)
  const double l1_bound = std::sqrt(double(k) * params.column_bound);
  for (int b = 0; b < res.n_prime && res.k_prime > 0; ++b) {
    double mass = 0, l1 = 0;
    for (int a = 0; a < res.k_prime; ++a) {
      mass += res.V_prime[a][b] * res.V_prime[a][b];
      l1 += std::fabs(res.V_prime[a][b]);
    }
    if (!(mass < params.column_bound)) return false;
    if (!(l1 < l1_bound)) return false;
  }

  // certificates: one per removed row
  std::vector<char> removed_seen(k, 0);
  for (int a = res.k_prime; a < k; ++a) removed_seen[res.row_order[a]] = 1;
  for (const auto& cert : res.certificates) {
    if (cert.row < 0 || cert.row >= k || !removed_seen[cert.row]) return false;
    removed_seen[cert.row] = 0;  // each removed row certified exactly once
    const std::vector<double>& row = W[cert.row];
    std::size_t covered = 0;
    for (const auto& blk : cert.partition.blocks) covered += blk.size();
    if (covered != static_cast<std::size_t>(n)) return false;  // must partition all columns
    try {
      if (!verify_scale_partition(row, cert.partition)) return false;
    } catch (const std::invalid_argument&) {
      return false;
    }
    const auto& residual = cert.partition.blocks.back();
    std::vector<char> in_res(n, 0);
    for (int j : residual) in_res[j] = 1;
    for (int b = 0; b < res.n_prime; ++b)
      if (!in_res[res.col_order[b]]) return false;
    double res_sq = 0;
    for (int j : residual) res_sq += row[j] * row[j];
    bool dead = res_sq < std::numeric_limits<double>::min();
    if (!dead && static_cast<int>(cert.partition.blocks.size()) < params.S + 2) return false;
  }
  return true;
}

}  // namespace cubeslice

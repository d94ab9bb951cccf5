#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "antichains.hpp"
#include "bang.hpp"
#include "cube.hpp"
#include "decompose.hpp"
#include "product_measure.hpp"
#include "rational.hpp"
#include "rng.hpp"

namespace cubeslice {

// exp(-t^2 / (2 sigma^2 + 2t)): one-sided tail for sums of centered variables
// bounded by 2 with total variance sigma^2. Requires t > 0.
inline double bernstein_bound(double sigma2, double t) {
  if (!(t > 0)) throw std::invalid_argument("bernstein_bound: t must be > 0");
  if (sigma2 < 0) throw std::invalid_argument("bernstein_bound: negative variance");
  return std::exp(-(t * t) / (2.0 * sigma2 + 2.0 * t));
}

struct AdversaryParams {
  double theta = 0.0;  // <= 0 selects the default n^-0.0115
  std::optional<DecompositionParams> decomp;  // default: DecompositionParams::standard(n)
  std::uint64_t x2_attempts = 1000;
  std::uint64_t edge_attempts = 200;
};

struct FindX2Result {
  bool success = false;
  std::vector<int> x2;  // +-1 per removed column, in col_order[n'..] order
  std::uint64_t attempts = 0;
  int min_violating_rows = 0;  // best attempt seen when unsuccessful
};

// Looks for x'' in {-1,+1}^(n-n') that clears every removed row i:
// |<x'', v''_i> - mu_i| > ||v'_i||_1 + ||v'_i||_inf, margins measured on the
// unit-normalized input rows. Such an x'' makes every removed plane unable to
// slice any edge that keeps x'' fixed, whatever the retained coordinates do.
inline FindX2Result find_x2(const Matrix& W, const std::vector<double>& mu_unit,
                            const DecompositionResult& dec, std::uint64_t attempts, Rng& rng) {
  const int k = static_cast<int>(W.size());
  const int n = static_cast<int>(dec.col_order.size());
  const int removed_cols = n - dec.n_prime;
  const int removed_rows = k - dec.k_prime;

  struct RowData {
    int row;
    double bar;  // l1 + linf of the retained part
    std::vector<double> vpp;  // removed-column entries, col_order[n'..] order
  };
  std::vector<RowData> rows;
  rows.reserve(removed_rows);
  for (int a = dec.k_prime; a < k; ++a) {
    int i = dec.row_order[a];
    RowData rd;
    rd.row = i;
    double l1 = 0, linf = 0;
    for (int b = 0; b < dec.n_prime; ++b) {
      double x = std::fabs(W[i][dec.col_order[b]]);
      l1 += x;
      linf = std::max(linf, x);
    }
    rd.bar = l1 + linf;
    rd.vpp.resize(removed_cols);
    for (int t = 0; t < removed_cols; ++t) rd.vpp[t] = W[i][dec.col_order[dec.n_prime + t]];
    rows.push_back(std::move(rd));
  }

  FindX2Result out;
  out.min_violating_rows = removed_rows;
  if (removed_rows == 0) {
    out.success = true;
    out.x2.assign(removed_cols, +1);
    out.attempts = 0;
    out.min_violating_rows = 0;
    return out;
  }
  std::vector<int> x2(removed_cols);
  for (std::uint64_t trial = 0; trial < attempts; ++trial) {
    for (int t = 0; t < removed_cols; ++t) x2[t] = rng.next_u64() & 1ull ? +1 : -1;
    int violations = 0;
    for (const auto& rd : rows) {
      double dot = 0;
      for (int t = 0; t < removed_cols; ++t) dot += x2[t] * rd.vpp[t];
      if (!(std::fabs(dot - mu_unit[rd.row]) > rd.bar)) ++violations;
    }
    out.attempts = trial + 1;
    if (violations < out.min_violating_rows) out.min_violating_rows = violations;
    if (violations == 0) {
      out.success = true;
      out.x2 = x2;
      return out;
    }
  }
  return out;
}

struct BangStepResult {
  std::vector<int> epsilon;
  std::vector<double> u;           // theta * V'^T epsilon, length n'
  std::vector<Rational> margins;   // exact margins of the solved instance
  std::vector<double> gamma;       // rescaled thresholds mu_i/r_i - <v''_i/r_i, x''>
};

// Builds the sign-vector instance for the retained rows. Each retained
// hyperplane is rescaled by its retained-part norm r_i so that its retained
// part is exactly the unit row of V'; gamma_i is the threshold seen by the
// retained coordinates once x'' is fixed. M is the exact Gram matrix of the
// (rationalized) V' rows with the diagonal clamped to 1: the true diagonal is
// 1 up to representation error, and clamping keeps the instance exactly
// admissible so the local-search certificate stays unconditional.
inline BangStepResult bang_step(const Matrix& W, const std::vector<double>& mu_unit,
                                const DecompositionResult& dec, const std::vector<int>& x2,
                                double theta) {
  const int kp = dec.k_prime;
  const int np = dec.n_prime;
  const int n = static_cast<int>(dec.col_order.size());
  if (!(theta >= 0)) throw std::invalid_argument("bang_step: theta must be >= 0");

  BangStepResult out;
  out.u.assign(np, 0.0);
  if (kp == 0) return out;

  std::vector<std::vector<Rational>> vp(kp, std::vector<Rational>(np));
  for (int a = 0; a < kp; ++a)
    for (int b = 0; b < np; ++b) vp[a][b] = rational_from_double(dec.V_prime[a][b]);

  BangInstance inst;
  inst.theta = rational_from_double(theta);
  inst.M.assign(kp, std::vector<Rational>(kp));
  inst.gamma.resize(kp);
  out.gamma.resize(kp);
  for (int a = 0; a < kp; ++a) {
    for (int b = a; b < kp; ++b) {
      if (a == b) {
        inst.M[a][b] = 1;
        continue;
      }
      Rational dot = 0;
      for (int c = 0; c < np; ++c) dot += vp[a][c] * vp[b][c];
      inst.M[a][b] = dot;
      inst.M[b][a] = dot;
    }
    int i = dec.row_order[a];
    double r = dec.retained_row_norm[a];
    double g = mu_unit[i] / r;
    for (std::size_t t = 0; t < x2.size(); ++t)
      g -= x2[t] * W[i][dec.col_order[np + static_cast<int>(t)]] / r;
    out.gamma[a] = g;
    inst.gamma[a] = rational_from_double(g);
  }

  BangSolution sol = bang_solve(inst);
  out.epsilon = sol.epsilon;
  out.margins = sol.margins;

  for (int b = 0; b < np; ++b) {
    double s = 0;
    for (int a = 0; a < kp; ++a) s += sol.epsilon[a] * dec.V_prime[a][b];
    out.u[b] = theta * s;
  }

  // postconditions: margins certified >= theta exactly; |<u, v'_a> - gamma_a|
  // matches the certified margin up to the diagonal clamp; ||u||_inf bounded
  // by theta times the worst column l1 sum.
  for (int a = 0; a < kp; ++a)
    if (sol.margins[a] < inst.theta) throw std::logic_error("bang_step: margin below theta");
  double col_l1_max = 0;
  for (int b = 0; b < np; ++b) {
    double s = 0;
    for (int a = 0; a < kp; ++a) s += std::fabs(dec.V_prime[a][b]);
    col_l1_max = std::max(col_l1_max, s);
  }
  for (int b = 0; b < np; ++b)
    if (std::fabs(out.u[b]) > theta * col_l1_max * (1.0 + 1e-9) + 1e-12)
      throw std::logic_error("bang_step: ||u||_inf bound violated");
  for (int a = 0; a < kp; ++a) {
    double dot = 0;
    for (int b = 0; b < np; ++b) dot += out.u[b] * dec.V_prime[a][b];
    double margin = std::fabs(dot - out.gamma[a]);
    double certified = sol.margins[a].get_d();
    if (std::fabs(margin - certified) > 1e-8 * (1.0 + std::fabs(certified)))
      throw std::logic_error("bang_step: floating margin drifted from certificate");
  }
  return out;
}

namespace adversary_detail {

// One vector in the nullspace of the rows of A restricted to the given
// columns, or empty when the restriction has full column rank. Gaussian
// elimination with partial pivoting; pivots below rank_tol count as zero.
inline std::vector<double> restricted_nullspace_vector(const Matrix& A,
                                                       const std::vector<int>& cols,
                                                       double rank_tol) {
  const int r = static_cast<int>(A.size());
  const int c = static_cast<int>(cols.size());
  if (c == 0) return {};
  Matrix m(r, std::vector<double>(c));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m[i][j] = A[i][cols[j]];

  std::vector<int> pivot_col;  // per eliminated row
  int row = 0;
  for (int col = 0; col < c && row < r; ++col) {
    int best = -1;
    double best_abs = rank_tol;
    for (int i = row; i < r; ++i)
      if (std::fabs(m[i][col]) > best_abs) {
        best_abs = std::fabs(m[i][col]);
        best = i;
      }
    if (best < 0) continue;
    std::swap(m[row], m[best]);
    double inv = 1.0 / m[row][col];
    for (int j = col; j < c; ++j) m[row][j] *= inv;
    for (int i = 0; i < r; ++i) {
      if (i == row) continue;
      double f = m[i][col];
      if (f == 0.0) continue;
      for (int j = col; j < c; ++j) m[i][j] -= f * m[row][j];
    }
    pivot_col.push_back(col);
    ++row;
  }
  std::vector<char> is_pivot(c, 0);
  for (int pc : pivot_col) is_pivot[pc] = 1;
  int free_col = -1;
  for (int j = 0; j < c; ++j)
    if (!is_pivot[j]) {
      free_col = j;
      break;
    }
  if (free_col < 0) return {};
  std::vector<double> x(c, 0.0);
  x[free_col] = 1.0;
  for (int i = static_cast<int>(pivot_col.size()) - 1; i >= 0; --i) {
    int pc = pivot_col[i];
    double s = 0;
    for (int j = pc + 1; j < c; ++j) s += m[i][j] * x[j];
    x[pc] = -s;  // row is normalized: m[i][pc] == 1
  }
  return x;
}

}  // namespace adversary_detail

struct RoundResult {
  std::vector<double> w;    // |w_j| <= 1, at most k' fractional coordinates
  std::vector<int> free_coords;  // indices with |w_j| < 1
  double preservation_error = 0.0;  // max_i |<w - u, v'_i>|
  int steps = 0;
};

// Moves u inside [-1,1]^n' along directions orthogonal to every V' row until
// the free coordinates no longer support a nullspace direction; each step
// drives at least one new coordinate to exactly +-1. Requires ||u||_inf <= 1.
inline RoundResult round_to_face(const std::vector<double>& u, const Matrix& V_prime,
                                 double rank_tol = 1e-9, double snap_tol = 1e-12) {
  const int np = static_cast<int>(u.size());
  for (double x : u)
    if (std::fabs(x) > 1.0 + snap_tol)
      throw std::invalid_argument("round_to_face: u outside the unit cube");

  RoundResult out;
  out.w = u;
  std::vector<int> free;
  for (int j = 0; j < np; ++j) {
    if (std::fabs(out.w[j]) >= 1.0 - snap_tol)
      out.w[j] = out.w[j] < 0 ? -1.0 : 1.0;
    else
      free.push_back(j);
  }

  while (!free.empty()) {
    if (out.steps > np + 1) throw std::logic_error("round_to_face: step guard tripped");
    std::vector<double> a =
        adversary_detail::restricted_nullspace_vector(V_prime, free, rank_tol);
    if (a.empty()) break;
    double amax = 0;
    for (double x : a) amax = std::max(amax, std::fabs(x));
    if (amax <= 0) break;
    for (double& x : a) x /= amax;

    double alpha = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < free.size(); ++t) {
      if (std::fabs(a[t]) < 1e-14) continue;
      double room = a[t] > 0 ? (1.0 - out.w[free[t]]) / a[t] : (-1.0 - out.w[free[t]]) / a[t];
      alpha = std::min(alpha, room);
    }
    if (!std::isfinite(alpha)) break;  // direction numerically zero on free coords
    if (alpha < 0) alpha = 0;
    for (std::size_t t = 0; t < free.size(); ++t) out.w[free[t]] += alpha * a[t];
    ++out.steps;

    std::vector<int> still_free;
    bool fixed_one = false;
    for (std::size_t t = 0; t < free.size(); ++t) {
      int j = free[t];
      if (std::fabs(out.w[j]) >= 1.0 - snap_tol) {
        out.w[j] = out.w[j] < 0 ? -1.0 : 1.0;
        fixed_one = true;
      } else {
        still_free.push_back(j);
      }
    }
    if (!fixed_one) throw std::logic_error("round_to_face: step fixed no coordinate");
    free = std::move(still_free);
  }

  out.free_coords = free;
  double err = 0;
  for (const auto& row : V_prime) {
    double d = 0;
    for (int j = 0; j < np; ++j) d += (out.w[j] - u[j]) * row[j];
    err = std::max(err, std::fabs(d));
  }
  out.preservation_error = err;
  if (err > 1e-10) throw std::logic_error("round_to_face: inner products drifted");
  if (static_cast<int>(free.size()) > static_cast<int>(V_prime.size()))
    throw std::logic_error("round_to_face: more free coordinates than constraints");
  return out;
}

struct FractionalSample {
  std::vector<double> delta;  // per coordinate; 0 on fixed coordinates
  std::vector<int> signs;     // resulting +-1 vertex
};

// delta_j = 1 - w_j with probability (1+w_j)/2, else -1 - w_j, independently
// on the fractional coordinates. E delta_j = 0 and E delta_j^2 = 1 - w_j^2.
// The Bernoulli draws are exact on the rationalized w.
inline FractionalSample sample_fractional_vertex(const std::vector<double>& w, Rng& rng) {
  FractionalSample s;
  const int np = static_cast<int>(w.size());
  s.delta.assign(np, 0.0);
  s.signs.assign(np, 0);
  for (int j = 0; j < np; ++j) {
    if (std::fabs(w[j]) > 1.0) throw std::invalid_argument("sample_fractional_vertex: |w_j| > 1");
    if (w[j] == 1.0 || w[j] == -1.0) {
      s.signs[j] = w[j] > 0 ? +1 : -1;
      continue;
    }
    Rational p = (1 + rational_from_double(w[j])) / 2;
    if (rng.bernoulli(p)) {
      s.signs[j] = +1;
      s.delta[j] = 1.0 - w[j];
    } else {
      s.signs[j] = -1;
      s.delta[j] = -1.0 - w[j];
    }
  }
  return s;
}

struct PlaneDiagnostics {
  double sigma2 = 0.0;          // sum_j (1 - w_j^2) v'_ij^2
  double bernstein = 1.0;       // 2 exp(-t^2/(2 sigma^2 + 2t)), t = theta - 2||v'||_inf
  double slack = 0.0;           // t above (may be <= 0, bound then trivial)
  std::uint64_t sliced_count = 0;  // attempts in which this plane sliced the candidate
};

struct AdversaryTrace {
  std::uint64_t seed = 0;
  double theta = 0.0;
  int n = 0, k = 0, k_prime = 0, n_prime = 0;
  int removals = 0;
  std::vector<int> drop_counts;
  FindX2Result x2;
  std::vector<int> epsilon;
  std::vector<double> u;
  std::vector<double> w;
  int k_tilde = 0;
  double preservation_error = 0.0;
  double sigma_p2 = 0.0;            // fractional-measure variance sum
  double anticoncentration_scale = 0.0;  // 1 / sigma_P (inf when sigma_P = 0)
  std::vector<PlaneDiagnostics> retained_planes;
  std::uint64_t edge_attempts_used = 0;
  std::string stage;                // failure stage, empty on success
  std::string reason;
};

struct AdversaryOutcome {
  bool found = false;
  CubeEdge edge;  // valid when found
  AdversaryTrace trace;
};

// End-to-end missing-edge search. Heuristic stages run in floating point; a
// candidate edge is only ever returned after an exact rational check that no
// input plane slices it, so a Found result is unconditionally sound.
inline AdversaryOutcome find_missing_edge(const HyperplaneFamily& F, const AdversaryParams& params,
                                          std::uint64_t seed) {
  F.validate();
  const int n = F.n;
  const int k = static_cast<int>(F.planes.size());
  for (const auto& h : F.planes)
    if (!h.is_skew()) throw std::invalid_argument("find_missing_edge: non-skew plane");

  AdversaryOutcome out;
  AdversaryTrace& tr = out.trace;
  tr.seed = seed;
  tr.n = n;
  tr.k = k;
  double theta = params.theta > 0 ? params.theta : std::pow(double(n), -0.0115);
  tr.theta = theta;
  Rng rng(seed);

  // unit-normalized rows and thresholds (heuristic scale only)
  Matrix W(k, std::vector<double>(n));
  std::vector<double> mu_unit(k, 0.0);
  for (int i = 0; i < k; ++i) {
    double sq = 0;
    for (int j = 0; j < n; ++j) {
      W[i][j] = F.planes[i].normal[j].get_d();
      sq += W[i][j] * W[i][j];
    }
    double inv = 1.0 / std::sqrt(sq);
    for (int j = 0; j < n; ++j) W[i][j] *= inv;
    mu_unit[i] = F.planes[i].mu.get_d() * inv;
  }

  DecompositionParams dp = params.decomp ? *params.decomp : DecompositionParams::standard(n);
  DecompositionResult dec = decompose(W, dp, n);
  tr.k_prime = dec.k_prime;
  tr.n_prime = dec.n_prime;
  tr.removals = dec.removals;
  tr.drop_counts = dec.drop_counts;

  tr.x2 = find_x2(W, mu_unit, dec, params.x2_attempts, rng);
  if (!tr.x2.success) {
    tr.stage = "find_x2";
    tr.reason = "no x'' cleared all removed rows";
    return out;
  }

  BangStepResult bang = bang_step(W, mu_unit, dec, tr.x2.x2, theta);
  tr.epsilon = bang.epsilon;
  tr.u = bang.u;

  for (double x : bang.u)
    if (std::fabs(x) > 1.0) {
      tr.stage = "rounding";
      tr.reason = "||u||_inf > 1 at this scale";
      return out;
    }

  RoundResult rounded;
  try {
    rounded = round_to_face(bang.u, dec.V_prime);
  } catch (const std::logic_error& e) {
    tr.stage = "rounding";
    tr.reason = e.what();
    return out;
  }
  tr.w = rounded.w;
  tr.k_tilde = static_cast<int>(rounded.free_coords.size());
  tr.preservation_error = rounded.preservation_error;

  // per-plane diagnostics on the retained rows
  tr.retained_planes.resize(dec.k_prime);
  for (int a = 0; a < dec.k_prime; ++a) {
    PlaneDiagnostics& d = tr.retained_planes[a];
    double linf = 0;
    for (int b = 0; b < dec.n_prime; ++b) {
      double v = dec.V_prime[a][b];
      d.sigma2 += (1.0 - rounded.w[b] * rounded.w[b]) * v * v;
      linf = std::max(linf, std::fabs(v));
    }
    d.slack = theta - 2.0 * linf;
    d.bernstein = d.slack > 0 ? 2.0 * bernstein_bound(d.sigma2, d.slack) : 1.0;
  }
  double sp2 = 0;
  for (int j : rounded.free_coords) sp2 += (1.0 - rounded.w[j] * rounded.w[j]) / 4.0;
  tr.sigma_p2 = sp2;
  tr.anticoncentration_scale =
      sp2 > 0 ? 1.0 / std::sqrt(sp2) : std::numeric_limits<double>::infinity();

  // assemble a full +-1 vertex in original coordinates from retained signs
  // and x''; returns the mask
  auto assemble = [&](const std::vector<int>& retained_signs) {
    std::uint32_t mask = 0;
    for (int b = 0; b < dec.n_prime; ++b)
      if (retained_signs[b] > 0) mask |= 1u << dec.col_order[b];
    for (int t = 0; t < n - dec.n_prime; ++t)
      if (tr.x2.x2[t] > 0) mask |= 1u << dec.col_order[dec.n_prime + t];
    return mask;
  };
  auto edge_unsliced_exact = [&](std::uint32_t mask, int dir) {
    CubeEdge e{CubeVertex{n, mask}, dir};
    for (int i = 0; i < k; ++i)
      if (slices(F.planes[i], e)) return false;
    return true;
  };

  const bool degenerate_sigma = sp2 < 1e-30;
  if (tr.k_tilde == 0 || degenerate_sigma) {
    // single candidate vertex: snap every coordinate and sweep directions
    std::vector<int> signs(dec.n_prime, +1);
    for (int b = 0; b < dec.n_prime; ++b) signs[b] = rounded.w[b] >= 0 ? +1 : -1;
    std::uint32_t mask = assemble(signs);
    for (int b = 0; b < dec.n_prime; ++b)
      if (edge_unsliced_exact(mask, dec.col_order[b])) {
        out.found = true;
        out.edge = CubeEdge{CubeVertex{n, mask}, dec.col_order[b]};
        return out;
      }
    for (int t = 0; t < n - dec.n_prime; ++t)
      if (edge_unsliced_exact(mask, dec.col_order[dec.n_prime + t])) {
        out.found = true;
        out.edge = CubeEdge{CubeVertex{n, mask}, dec.col_order[dec.n_prime + t]};
        return out;
      }
    tr.stage = "edge_sampling";
    tr.reason = "no unsliced direction at the rounded vertex";
    return out;
  }

  // direction weights over the fractional coordinates: normalized squared
  // variances, matching the monotone edge sampler
  std::vector<Rational> dir_weights(rounded.free_coords.size());
  for (std::size_t t = 0; t < rounded.free_coords.size(); ++t) {
    double wj = rounded.w[rounded.free_coords[t]];
    Rational p = (1 + rational_from_double(wj)) / 2;
    Rational var = p * (1 - p);
    dir_weights[t] = var * var;
  }

  for (std::uint64_t attempt = 0; attempt < params.edge_attempts; ++attempt) {
    tr.edge_attempts_used = attempt + 1;
    FractionalSample frac = sample_fractional_vertex(rounded.w, rng);
    int pick = static_cast<int>(rng.categorical(dir_weights));
    int flip_internal = rounded.free_coords[pick];
    std::uint32_t mask = assemble(frac.signs);
    int dir = dec.col_order[flip_internal];
    CubeEdge e{CubeVertex{n, mask}, dir};
    bool ok = true;
    for (int i = 0; i < k; ++i)
      if (slices(F.planes[i], e)) {
        ok = false;
        for (int a = 0; a < dec.k_prime; ++a)
          if (dec.row_order[a] == i) {
            ++tr.retained_planes[a].sliced_count;
            break;
          }
      }
    if (ok) {
      out.found = true;
      out.edge = e;
      return out;
    }
  }
  tr.stage = "edge_sampling";
  tr.reason = "all sampled edges were sliced";
  return out;
}

}  // namespace cubeslice

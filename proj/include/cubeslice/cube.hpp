#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rational.hpp"
#include "rng.hpp"

namespace cubeslice {

// Vertices of {-1,+1}^n. Bit j of mask set <=> coordinate j+1 equals +1.
struct CubeVertex {
  int n = 0;
  std::uint32_t mask = 0;

  int coord(int j) const { return (mask >> j) & 1u ? +1 : -1; }
  std::vector<int> coords() const {
    std::vector<int> c(n);
    for (int j = 0; j < n; ++j) c[j] = coord(j);
    return c;
  }
  bool operator==(const CubeVertex&) const = default;
};

// Edge = unordered vertex pair differing in exactly coordinate dir (0-based).
struct CubeEdge {
  CubeVertex base;
  int dir = 0;

  CubeVertex other() const { return CubeVertex{base.n, base.mask ^ (1u << dir)}; }
  bool operator==(const CubeEdge&) const = default;
};

struct Hyperplane {
  std::vector<Rational> normal;
  Rational mu;

  int dimension() const { return static_cast<int>(normal.size()); }
  bool is_skew() const {
    for (const auto& v : normal)
      if (v == 0) return false;
    return true;
  }
};

struct HyperplaneFamily {
  int n = 0;
  std::vector<Hyperplane> planes;

  void validate() const {
    if (n < 1) throw std::invalid_argument("family dimension must be >= 1");
    for (const auto& h : planes)
      if (h.dimension() != n) throw std::invalid_argument("plane dimension mismatch");
  }
};

// Enumeration guards. Edge loops walk n * 2^(n-1) edges, vertex loops walk
// 2^n vertices against every plane; both are exponential and refuse to run
// past these limits unless the caller raises them.
struct Guards {
  int edge_n = 22;
  int vertex_n = 20;
};

class guard_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void check_edge_guard(int n, const Guards& g) {
  if (n > g.edge_n)
    throw guard_error("edge enumeration guard exceeded: n=" + std::to_string(n) +
                      " > " + std::to_string(g.edge_n));
}
inline void check_vertex_guard(int n, const Guards& g) {
  if (n > g.vertex_n)
    throw guard_error("vertex enumeration guard exceeded: n=" + std::to_string(n) +
                      " > " + std::to_string(g.vertex_n));
}

// margin(x) = <x, v> - mu, exact.
inline Rational margin(const Hyperplane& h, const CubeVertex& x) {
  if (h.dimension() != x.n) throw std::invalid_argument("dimension mismatch");
  Rational m = -h.mu;
  for (int j = 0; j < x.n; ++j) {
    if (x.coord(j) > 0)
      m += h.normal[j];
    else
      m -= h.normal[j];
  }
  return m;
}

// A hyperplane slices an edge iff the endpoint margins have strictly opposite
// signs. A zero margin (vertex on the plane) never slices.
inline bool slices(const Hyperplane& h, const CubeEdge& e) {
  Rational mx = margin(h, e.base);
  Rational my = margin(h, e.other());
  return sign(mx) * sign(my) < 0;
}

inline bool covers(const Hyperplane& h, const CubeVertex& x) { return margin(h, x) == 0; }

namespace detail {

// Fills out[mask] with sign(<x,v> - mu) for every vertex, one exact addition
// per tree node (2^(n+1) total) instead of a length-n dot product per vertex.
inline void margin_signs(const Hyperplane& h, std::vector<std::int8_t>& out) {
  const int n = h.dimension();
  out.assign(std::size_t(1) << n, 0);
  std::vector<Rational> acc(n + 1);
  acc[0] = -h.mu;
  // explicit DFS over coordinates; state = (depth, mask-so-far)
  struct Frame {
    int depth;
    std::uint32_t mask;
    int stage;  // 0: descend -, 1: descend +, 2: done
  };
  std::vector<Frame> stack;
  stack.push_back({0, 0, 0});
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.depth == n) {
      out[f.mask] = static_cast<std::int8_t>(sgn(acc[n]));
      stack.pop_back();
      continue;
    }
    if (f.stage == 0) {
      f.stage = 1;
      acc[f.depth + 1] = acc[f.depth] - h.normal[f.depth];
      stack.push_back({f.depth + 1, f.mask, 0});
    } else if (f.stage == 1) {
      f.stage = 2;
      acc[f.depth + 1] = acc[f.depth] + h.normal[f.depth];
      stack.push_back({f.depth + 1, f.mask | (1u << f.depth), 0});
    } else {
      stack.pop_back();
    }
  }
}

// Same walk, but records zero-margin vertices and the minimum nonzero |margin|.
inline void margin_zero_and_min(const Hyperplane& h, std::vector<bool>& zero,
                                std::optional<Rational>& min_nonzero_abs) {
  const int n = h.dimension();
  zero.assign(std::size_t(1) << n, false);
  std::vector<Rational> acc(n + 1);
  acc[0] = -h.mu;
  struct Frame {
    int depth;
    std::uint32_t mask;
    int stage;
  };
  std::vector<Frame> stack;
  stack.push_back({0, 0, 0});
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.depth == n) {
      if (acc[n] == 0) {
        zero[f.mask] = true;
      } else {
        Rational a = abs(acc[n]);
        if (!min_nonzero_abs || a < *min_nonzero_abs) min_nonzero_abs = a;
      }
      stack.pop_back();
      continue;
    }
    if (f.stage == 0) {
      f.stage = 1;
      acc[f.depth + 1] = acc[f.depth] - h.normal[f.depth];
      stack.push_back({f.depth + 1, f.mask, 0});
    } else if (f.stage == 1) {
      f.stage = 2;
      acc[f.depth + 1] = acc[f.depth] + h.normal[f.depth];
      stack.push_back({f.depth + 1, f.mask | (1u << f.depth), 0});
    } else {
      stack.pop_back();
    }
  }
}

// Edge slot: direction-major, base vertex with bit dir removed.
inline std::size_t edge_slot(std::uint32_t mask, int dir, int n) {
  std::uint32_t low = mask & ((1u << dir) - 1u);
  std::uint32_t high = (mask >> (dir + 1)) << dir;
  return (std::size_t(dir) << (n - 1)) + (low | high);
}

// Bitset over all n * 2^(n-1) edges; starts full, planes clear sliced slots.
class EdgeSet {
 public:
  EdgeSet(int n) : n_(n), bits_(((std::size_t(n) << (n - 1)) + 63) / 64, ~0ull) {
    total_ = std::size_t(n) << (n - 1);
    std::size_t tail = total_ % 64;
    if (tail) bits_.back() = (1ull << tail) - 1;
    remaining_ = total_;
  }
  void clear_sliced(const std::vector<std::int8_t>& sgns, int dir) {
    const std::uint32_t half = 1u << (n_ - 1);
    const std::uint32_t bit = 1u << dir;
    for (std::uint32_t c = 0; c < half; ++c) {
      // expand compressed index back to a full mask with bit dir = 0
      std::uint32_t low = c & (bit - 1u);
      std::uint32_t high = (c >> dir) << (dir + 1);
      std::uint32_t m = low | high;
      if (int(sgns[m]) * int(sgns[m | bit]) < 0) {
        std::size_t slot = (std::size_t(dir) << (n_ - 1)) + c;
        std::uint64_t& word = bits_[slot >> 6];
        std::uint64_t msk = 1ull << (slot & 63);
        if (word & msk) {
          word &= ~msk;
          --remaining_;
        }
      }
    }
  }
  bool contains(std::uint32_t mask, int dir) const {
    std::size_t slot = edge_slot(mask, dir, n_);
    return (bits_[slot >> 6] >> (slot & 63)) & 1ull;
  }
  std::size_t remaining() const { return remaining_; }
  std::size_t total() const { return total_; }

 private:
  int n_;
  std::vector<std::uint64_t> bits_;
  std::size_t total_ = 0;
  std::size_t remaining_ = 0;
};

// t-th vertex in lexicographic coordinate order (coordinate 1 most
// significant, -1 < +1) mapped to its mask.
inline std::uint32_t lex_to_mask(std::uint64_t t, int n) {
  std::uint32_t mask = 0;
  for (int j = 0; j < n; ++j)
    if ((t >> (n - 1 - j)) & 1ull) mask |= 1u << j;
  return mask;
}

inline EdgeSet unsliced_edges(const HyperplaneFamily& F, const Guards& g) {
  F.validate();
  check_edge_guard(F.n, g);
  EdgeSet edges(F.n);
  std::vector<std::int8_t> sgns;
  for (const auto& h : F.planes) {
    if (edges.remaining() == 0) break;
    margin_signs(h, sgns);
    for (int dir = 0; dir < F.n; ++dir) edges.clear_sliced(sgns, dir);
  }
  return edges;
}

}  // namespace detail

// First edge (lexicographic on (base, direction)) sliced by no plane, or
// nullopt if the family slices everything.
inline std::optional<CubeEdge> find_unsliced_edge(const HyperplaneFamily& F,
                                                  const Guards& g = {}) {
  detail::EdgeSet edges = detail::unsliced_edges(F, g);
  if (edges.remaining() == 0) return std::nullopt;
  const std::uint64_t verts = 1ull << F.n;
  for (std::uint64_t t = 0; t < verts; ++t) {
    std::uint32_t mask = detail::lex_to_mask(t, F.n);
    for (int dir = 0; dir < F.n; ++dir)
      if (edges.contains(mask, dir)) return CubeEdge{CubeVertex{F.n, mask}, dir};
  }
  return std::nullopt;  // unreachable: remaining() > 0
}

// Exact count of unsliced edges; cheaper interface for search loops.
inline std::size_t unsliced_edge_count(const HyperplaneFamily& F, const Guards& g = {}) {
  return detail::unsliced_edges(F, g).remaining();
}

inline bool covers_all(const HyperplaneFamily& F, const Guards& g = {}) {
  F.validate();
  check_vertex_guard(F.n, g);
  const std::size_t verts = std::size_t(1) << F.n;
  std::vector<bool> covered(verts, false);
  std::vector<bool> zero;
  std::optional<Rational> unused;
  std::size_t covered_count = 0;
  for (const auto& h : F.planes) {
    detail::margin_zero_and_min(h, zero, unused);
    for (std::size_t m = 0; m < verts; ++m)
      if (zero[m] && !covered[m]) {
        covered[m] = true;
        ++covered_count;
      }
    if (covered_count == verts) return true;
  }
  return covered_count == verts;
}

// Covering-to-slicing conversion: replaces each plane (v, mu) by
// (v, mu - beta) and (v, mu + beta) where 2*beta is the minimum nonzero
// |margin| over all vertices and planes. Requires every plane skew and the
// family covering; the output family slices every edge.
inline HyperplaneFamily cover_to_slicing(const HyperplaneFamily& F, const Guards& g = {}) {
  F.validate();
  check_vertex_guard(F.n, g);
  if (F.planes.empty()) throw std::invalid_argument("cover_to_slicing: empty family");
  for (const auto& h : F.planes)
    if (!h.is_skew()) throw std::invalid_argument("cover_to_slicing: non-skew plane");

  const std::size_t verts = std::size_t(1) << F.n;
  std::vector<bool> covered(verts, false);
  std::vector<bool> zero;
  std::optional<Rational> min_abs;
  for (const auto& h : F.planes) {
    detail::margin_zero_and_min(h, zero, min_abs);
    for (std::size_t m = 0; m < verts; ++m)
      if (zero[m]) covered[m] = true;
  }
  for (std::size_t m = 0; m < verts; ++m)
    if (!covered[m]) throw std::invalid_argument("cover_to_slicing: family does not cover all vertices");
  // A skew plane cannot contain every vertex (flipping coordinate j moves the
  // margin by 2 v_j != 0), so some nonzero margin exists.
  if (!min_abs) throw std::logic_error("cover_to_slicing: no nonzero margin");

  Rational beta = *min_abs / 2;
  HyperplaneFamily out;
  out.n = F.n;
  out.planes.reserve(2 * F.planes.size());
  for (const auto& h : F.planes) {
    Hyperplane lo = h, hi = h;
    lo.mu = h.mu - beta;
    hi.mu = h.mu + beta;
    out.planes.push_back(lo);
    out.planes.push_back(hi);
  }
  return out;
}

// Fraction of the n * 2^(n-1) edges sliced by a single plane, exact.
inline Rational sliced_fraction(const Hyperplane& h, const Guards& g = {}) {
  HyperplaneFamily F{h.dimension(), {h}};
  detail::EdgeSet edges = detail::unsliced_edges(F, g);
  std::size_t sliced = edges.total() - edges.remaining();
  Rational r(static_cast<unsigned long>(sliced), static_cast<unsigned long>(edges.total()));
  r.canonicalize();
  return r;
}

struct SearchOutcome {
  bool success = false;
  HyperplaneFamily family;
  std::size_t unsliced = 0;
  std::uint64_t evaluations = 0;
};

// Randomized local search for a k-plane family slicing every edge of
// {-1,1}^n. Integer normals in [-3,3], thresholds on the half-integer grid.
// Hill climbing with sideways moves and restarts; returns best found.
inline SearchOutcome search_slicing_family(int n, int k, std::uint64_t budget, Rng& rng,
                                           const Guards& g = {}) {
  if (n < 1 || k < 1) throw std::invalid_argument("search_slicing_family: n, k >= 1");
  check_edge_guard(n, g);

  auto random_plane = [&]() {
    Hyperplane h;
    h.normal.resize(n);
    bool nonzero = false;
    for (int j = 0; j < n; ++j) {
      long c = static_cast<long>(rng.below(7)) - 3;
      h.normal[j] = c;
      if (c != 0) nonzero = true;
    }
    if (!nonzero) h.normal[rng.below(n)] = 1;
    h.mu = Rational(static_cast<long>(rng.below(4 * n + 1)) - 2 * n, 2);
    h.mu.canonicalize();
    return h;
  };
  auto random_family = [&]() {
    HyperplaneFamily F;
    F.n = n;
    for (int i = 0; i < k; ++i) F.planes.push_back(random_plane());
    return F;
  };

  HyperplaneFamily cur = random_family();
  std::size_t cur_cost = unsliced_edge_count(cur, g);
  SearchOutcome best{cur_cost == 0, cur, cur_cost, 1};
  std::uint64_t evals = 1;
  std::uint64_t stagnant = 0;

  while (evals < budget && best.unsliced > 0) {
    HyperplaneFamily cand = cur;
    Hyperplane& h = cand.planes[rng.below(k)];
    std::uint64_t r = rng.below(10);
    if (r < 5) {
      int j = static_cast<int>(rng.below(n));
      h.normal[j] = static_cast<long>(rng.below(7)) - 3;
      bool nonzero = false;
      for (const auto& c : h.normal)
        if (c != 0) nonzero = true;
      if (!nonzero) h.normal[j] = 1;
    } else if (r < 8) {
      h.mu = Rational(static_cast<long>(rng.below(4 * n + 1)) - 2 * n, 2);
      h.mu.canonicalize();
    } else {
      h = random_plane();
    }
    std::size_t cost = unsliced_edge_count(cand, g);
    ++evals;
    bool accept = cost < cur_cost || (cost == cur_cost && rng.below(2) == 0);
    if (cost < cur_cost)
      stagnant = 0;
    else
      ++stagnant;
    if (accept) {
      cur = std::move(cand);
      cur_cost = cost;
    }
    if (cur_cost < best.unsliced) {
      best.family = cur;
      best.unsliced = cur_cost;
    }
    if (stagnant >= 400) {
      cur = random_family();
      cur_cost = unsliced_edge_count(cur, g);
      ++evals;
      stagnant = 0;
      if (cur_cost < best.unsliced) {
        best.family = cur;
        best.unsliced = cur_cost;
      }
    }
  }
  best.success = best.unsliced == 0;
  best.evaluations = evals;
  return best;
}

}  // namespace cubeslice

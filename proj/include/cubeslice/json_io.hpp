#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "adversary.hpp"
#include "antichains.hpp"
#include "bang.hpp"
#include "cube.hpp"
#include "decompose.hpp"
#include "product_measure.hpp"
#include "rational.hpp"
#include "scales.hpp"

// Wire conventions: coordinate and row indices are 1-based in JSON and
// 0-based in memory; exact rationals travel as strings ("3/4", "0.25", "12")
// or JSON integers, never JSON floats; truth tables travel as hex strings.
// Serialization uses ordered_json so emitted documents are byte-stable.

namespace cubeslice {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

inline Rational rational_from_json(const json& j, const std::string& where) {
  if (j.is_number_integer()) {
    Rational r(static_cast<long>(j.get<std::int64_t>()));
    return r;
  }
  if (j.is_number_unsigned()) {
    Rational r(static_cast<unsigned long>(j.get<std::uint64_t>()));
    return r;
  }
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_float())
    throw parse_error(where + ": rationals must be strings or integers, not floats");
  throw parse_error(where + ": expected a rational as string or integer");
}

inline std::vector<Rational> rational_vector_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw parse_error(where + ": expected an array");
  std::vector<Rational> out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back(rational_from_json(e, where));
  return out;
}

inline ordered_json rationals_to_json(const std::vector<Rational>& v) {
  ordered_json a = ordered_json::array();
  for (const auto& r : v) a.push_back(format_rational(r));
  return a;
}

namespace json_detail {

inline const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw parse_error(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw parse_error(where + ": missing field '" + key + "'");
  return *it;
}

inline int int_field(const json& j, const char* key, const std::string& where) {
  const json& f = field(j, key, where);
  if (!f.is_number_integer() && !f.is_number_unsigned())
    throw parse_error(where + ": field '" + key + "' must be an integer");
  return f.get<int>();
}

// 1-based, distinct, within [1, n]; returned as a bit mask
inline std::uint32_t mask_from_indices(const json& j, int n, const std::string& where) {
  if (!j.is_array()) throw parse_error(where + ": expected an index array");
  std::uint32_t mask = 0;
  for (const auto& e : j) {
    if (!e.is_number_integer() && !e.is_number_unsigned())
      throw parse_error(where + ": indices must be integers");
    long v = e.get<long>();
    if (v < 1 || v > n) throw parse_error(where + ": index out of range");
    std::uint32_t bit = 1u << (v - 1);
    if (mask & bit) throw parse_error(where + ": duplicate index");
    mask |= bit;
  }
  return mask;
}

inline ordered_json indices_from_mask(std::uint32_t mask, int n) {
  ordered_json a = ordered_json::array();
  for (int j = 0; j < n; ++j)
    if ((mask >> j) & 1u) a.push_back(j + 1);
  return a;
}

}  // namespace json_detail

// ---- product measures: {"p": [rational...]} ----

inline ProductMeasure measure_from_json(const json& j) {
  ProductMeasure P;
  P.p = rational_vector_from_json(json_detail::field(j, "p", "measure"), "measure.p");
  P.validate();
  return P;
}

inline ordered_json measure_to_json(const ProductMeasure& P) {
  ordered_json j;
  j["p"] = rationals_to_json(P.p);
  return j;
}

// ---- hyperplane families:
// {"n": int, "planes": [{"normal": [rational...], "mu": rational}, ...]} ----

inline HyperplaneFamily family_from_json(const json& j) {
  HyperplaneFamily F;
  F.n = json_detail::int_field(j, "n", "family");
  const json& planes = json_detail::field(j, "planes", "family");
  if (!planes.is_array()) throw parse_error("family.planes: expected an array");
  for (const auto& pj : planes) {
    Hyperplane h;
    h.normal = rational_vector_from_json(json_detail::field(pj, "normal", "plane"), "plane.normal");
    h.mu = rational_from_json(json_detail::field(pj, "mu", "plane"), "plane.mu");
    F.planes.push_back(std::move(h));
  }
  F.validate();
  return F;
}

inline ordered_json family_to_json(const HyperplaneFamily& F) {
  ordered_json j;
  j["n"] = F.n;
  ordered_json planes = ordered_json::array();
  for (const auto& h : F.planes) {
    ordered_json pj;
    pj["normal"] = rationals_to_json(h.normal);
    pj["mu"] = format_rational(h.mu);
    planes.push_back(std::move(pj));
  }
  j["planes"] = std::move(planes);
  return j;
}

// ---- cube edges (output): vertex as +-1 list, 1-based direction ----

inline ordered_json edge_to_json(const CubeEdge& e) {
  ordered_json j;
  ordered_json v = ordered_json::array();
  for (int c = 0; c < e.base.n; ++c) v.push_back(((e.base.mask >> c) & 1u) ? 1 : -1);
  j["vertex"] = std::move(v);
  j["dir"] = e.dir + 1;
  return j;
}

// ---- sign-vector instances:
// {"M": [[rational...]...], "gamma": [rational...], "theta": rational} ----

inline BangInstance bang_instance_from_json(const json& j) {
  BangInstance inst;
  const json& M = json_detail::field(j, "M", "instance");
  if (!M.is_array()) throw parse_error("instance.M: expected an array of rows");
  for (const auto& row : M)
    inst.M.push_back(rational_vector_from_json(row, "instance.M row"));
  inst.gamma = rational_vector_from_json(json_detail::field(j, "gamma", "instance"), "instance.gamma");
  inst.theta = rational_from_json(json_detail::field(j, "theta", "instance"), "instance.theta");
  inst.validate();
  return inst;
}

inline ordered_json bang_solution_to_json(const BangSolution& sol) {
  ordered_json j;
  j["epsilon"] = sol.epsilon;
  j["margins"] = rationals_to_json(sol.margins);
  j["flips"] = sol.flips;
  return j;
}

// ---- vertex families over {0,1}^n:
// {"n": int, "sets": [[1-based indices]...]} ----

inline VertexFamily vertex_family_from_json(const json& j) {
  VertexFamily A;
  A.n = json_detail::int_field(j, "n", "vertex family");
  const json& sets = json_detail::field(j, "sets", "vertex family");
  if (!sets.is_array()) throw parse_error("vertex family.sets: expected an array");
  for (const auto& s : sets)
    A.sets.push_back(json_detail::mask_from_indices(s, A.n, "vertex family set"));
  A.validate();
  return A;
}

inline ordered_json vertex_family_to_json(const VertexFamily& A) {
  ordered_json j;
  j["n"] = A.n;
  ordered_json sets = ordered_json::array();
  for (auto s : A.sets) sets.push_back(json_detail::indices_from_mask(s, A.n));
  j["sets"] = std::move(sets);
  return j;
}

// ---- oriented edge families:
// {"n": int, "u": [1-based indices of coordinates where u = 1],
//  "edges": [{"a": [1-based indices], "dir": 1-based}]} ----

inline OrientedEdgeFamily edge_family_from_json(const json& j) {
  OrientedEdgeFamily E;
  E.n = json_detail::int_field(j, "n", "edge family");
  E.u = json_detail::mask_from_indices(json_detail::field(j, "u", "edge family"), E.n,
                                       "edge family.u");
  const json& edges = json_detail::field(j, "edges", "edge family");
  if (!edges.is_array()) throw parse_error("edge family.edges: expected an array");
  for (const auto& ej : edges) {
    OrientedEdge e;
    e.a = json_detail::mask_from_indices(json_detail::field(ej, "a", "edge"), E.n, "edge.a");
    e.dir = json_detail::int_field(ej, "dir", "edge") - 1;
    E.edges.push_back(e);
  }
  E.validate();
  return E;
}

inline ordered_json edge_family_to_json(const OrientedEdgeFamily& E) {
  ordered_json j;
  j["n"] = E.n;
  j["u"] = json_detail::indices_from_mask(E.u, E.n);
  ordered_json edges = ordered_json::array();
  for (const auto& e : E.edges) {
    ordered_json ej;
    ej["a"] = json_detail::indices_from_mask(e.a, E.n);
    ej["dir"] = e.dir + 1;
    edges.push_back(std::move(ej));
  }
  j["edges"] = std::move(edges);
  return j;
}

// ---- boolean functions:
// {"n": int, "table_hex": hex of sum_mask f(mask) 2^mask, zero-padded to
//  max(1, 2^n/4) digits} ----

inline BooleanFunction function_from_json(const json& j) {
  BooleanFunction f;
  f.n = json_detail::int_field(j, "n", "function");
  if (f.n < 1 || f.n > 25) throw parse_error("function: n outside [1,25]");
  const json& hexj = json_detail::field(j, "table_hex", "function");
  if (!hexj.is_string()) throw parse_error("function.table_hex: expected a string");
  std::string hex = hexj.get<std::string>();
  if (hex.empty()) throw parse_error("function.table_hex: empty");
  mpz_class t;
  if (t.set_str(hex, 16) != 0) throw parse_error("function.table_hex: invalid hex");
  if (sgn(t) < 0) throw parse_error("function.table_hex: negative");
  std::size_t size = std::size_t(1) << f.n;
  if (mpz_sizeinbase(t.get_mpz_t(), 2) > size && t != 0)
    throw parse_error("function.table_hex: table wider than 2^n bits");
  f.table.resize(size);
  for (std::size_t m = 0; m < size; ++m)
    f.table[m] = mpz_tstbit(t.get_mpz_t(), m) ? 1 : 0;
  f.validate();
  return f;
}

inline ordered_json function_to_json(const BooleanFunction& f) {
  mpz_class t = 0;
  for (std::size_t m = 0; m < f.table.size(); ++m)
    if (f.table[m]) mpz_setbit(t.get_mpz_t(), m);
  std::string hex = t.get_str(16);
  std::size_t want = std::max<std::size_t>(1, (std::size_t(1) << f.n) / 4);
  if (hex.size() < want) hex.insert(hex.begin(), want - hex.size(), '0');
  ordered_json j;
  j["n"] = f.n;
  j["table_hex"] = hex;
  return j;
}

// ---- real matrices: {"rows": [[number...]...], "cols": optional int} ----

inline Matrix matrix_from_json(const json& j, int* ncols_out = nullptr) {
  Matrix V;
  const json& rows = json_detail::field(j, "rows", "matrix");
  if (!rows.is_array()) throw parse_error("matrix.rows: expected an array");
  for (const auto& rj : rows) {
    if (!rj.is_array()) throw parse_error("matrix row: expected an array");
    std::vector<double> row;
    row.reserve(rj.size());
    for (const auto& e : rj) {
      if (!e.is_number()) throw parse_error("matrix entry: expected a number");
      row.push_back(e.get<double>());
    }
    V.push_back(std::move(row));
  }
  int ncols = -1;
  if (j.contains("cols")) ncols = json_detail::int_field(j, "cols", "matrix");
  if (ncols_out) *ncols_out = ncols;
  return V;
}

inline ordered_json matrix_to_json(const Matrix& V) {
  ordered_json j;
  ordered_json rows = ordered_json::array();
  for (const auto& r : V) rows.push_back(r);
  j["rows"] = std::move(rows);
  return j;
}

// ---- scale partitions: {"blocks": [[1-based indices]...]} ----

inline ScalePartition scale_partition_from_json(const json& j, int n) {
  ScalePartition sp;
  const json& blocks = json_detail::field(j, "blocks", "partition");
  if (!blocks.is_array()) throw parse_error("partition.blocks: expected an array");
  for (const auto& bj : blocks) {
    if (!bj.is_array()) throw parse_error("partition block: expected an array");
    std::vector<int> block;
    for (const auto& e : bj) {
      if (!e.is_number_integer() && !e.is_number_unsigned())
        throw parse_error("partition block: indices must be integers");
      long v = e.get<long>();
      if (v < 1 || v > n) throw parse_error("partition block: index out of range");
      block.push_back(static_cast<int>(v - 1));
    }
    sp.blocks.push_back(std::move(block));
  }
  return sp;
}

inline ordered_json scale_partition_to_json(const ScalePartition& sp) {
  ordered_json blocks = ordered_json::array();
  for (const auto& b : sp.blocks) {
    ordered_json bj = ordered_json::array();
    for (int c : b) bj.push_back(c + 1);
    blocks.push_back(std::move(bj));
  }
  ordered_json j;
  j["blocks"] = std::move(blocks);
  return j;
}

// ---- decomposition results (output) ----

inline ordered_json decomposition_to_json(const DecompositionResult& res) {
  ordered_json j;
  j["k_prime"] = res.k_prime;
  j["n_prime"] = res.n_prime;
  ordered_json ro = ordered_json::array();
  for (int r : res.row_order) ro.push_back(r + 1);
  j["row_order"] = std::move(ro);
  ordered_json co = ordered_json::array();
  for (int c : res.col_order) co.push_back(c + 1);
  j["col_order"] = std::move(co);
  j["V_prime"] = matrix_to_json(res.V_prime)["rows"];
  j["retained_row_norm"] = res.retained_row_norm;
  j["drop_counts"] = res.drop_counts;
  j["removals"] = res.removals;
  ordered_json certs = ordered_json::array();
  for (const auto& c : res.certificates) {
    ordered_json cj;
    cj["row"] = c.row + 1;
    cj["partition"] = scale_partition_to_json(c.partition);
    certs.push_back(std::move(cj));
  }
  j["certificates"] = std::move(certs);
  return j;
}

// ---- report helpers ----

inline ordered_json bound_report_to_json(const BoundReport& r) {
  ordered_json j;
  j["value"] = format_rational(r.value);
  j["value_approx"] = r.value.get_d();
  j["bound"] = format_rational(r.bound);
  j["bound_approx"] = r.bound.get_d();
  j["holds"] = r.holds;
  return j;
}

inline ordered_json anticoncentration_report_to_json(const AnticoncentrationReport& r) {
  ordered_json j;
  j["max_level_prob"] = format_rational(r.max_level_prob);
  j["max_level_prob_approx"] = r.max_level_prob.get_d();
  j["bound_approx"] = r.bound;
  j["holds"] = r.holds;
  return j;
}

inline ordered_json boundary_report_to_json(const BoundaryReport& r) {
  ordered_json j;
  j["value"] = format_rational(r.value);
  j["value_approx"] = r.value.get_d();
  j["bound_approx"] = r.bound;
  j["holds"] = r.holds;
  return j;
}

inline ordered_json hit_estimate_to_json(const HitEstimate& h) {
  ordered_json j;
  j["estimate"] = h.estimate;
  j["half_width"] = h.half_width;
  j["hits"] = h.hits;
  j["trials"] = h.trials;
  return j;
}

// ---- adversary traces (output), schema_version 1 ----

inline ordered_json adversary_trace_to_json(const AdversaryTrace& tr) {
  ordered_json j;
  j["schema_version"] = 1;
  j["seed"] = tr.seed;
  j["theta"] = tr.theta;
  j["n"] = tr.n;
  j["k"] = tr.k;
  j["k_prime"] = tr.k_prime;
  j["n_prime"] = tr.n_prime;
  j["removals"] = tr.removals;
  j["drop_counts"] = tr.drop_counts;
  ordered_json x2;
  x2["success"] = tr.x2.success;
  x2["attempts"] = tr.x2.attempts;
  x2["min_violating_rows"] = tr.x2.min_violating_rows;
  x2["x2"] = tr.x2.x2;
  j["x2"] = std::move(x2);
  j["epsilon"] = tr.epsilon;
  j["u"] = tr.u;
  j["w"] = tr.w;
  j["k_tilde"] = tr.k_tilde;
  j["preservation_error"] = tr.preservation_error;
  j["sigma_p2"] = tr.sigma_p2;
  j["anticoncentration_scale"] = tr.anticoncentration_scale;
  ordered_json planes = ordered_json::array();
  for (const auto& d : tr.retained_planes) {
    ordered_json pj;
    pj["sigma2"] = d.sigma2;
    pj["bernstein"] = d.bernstein;
    pj["slack"] = d.slack;
    pj["sliced_count"] = d.sliced_count;
    planes.push_back(std::move(pj));
  }
  j["retained_planes"] = std::move(planes);
  j["edge_attempts_used"] = tr.edge_attempts_used;
  j["stage"] = tr.stage;
  j["reason"] = tr.reason;
  return j;
}

}  // namespace cubeslice

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include <cubeslice/adversary.hpp>
#include <cubeslice/antichains.hpp>
#include <cubeslice/bang.hpp>
#include <cubeslice/cube.hpp>
#include <cubeslice/decompose.hpp>
#include <cubeslice/json_io.hpp>
#include <cubeslice/product_measure.hpp>
#include <cubeslice/rational.hpp>
#include <cubeslice/rng.hpp>
#include <cubeslice/suite.hpp>

namespace {

using namespace cubeslice;

// exit codes: 0 = success / property verified, 2 = ran fine but the verified
// property is false (or nothing was found), 1 = bad input

Guards env_guards() {
  Guards g;
  if (const char* e = std::getenv("CUBESLICE_EDGE_GUARD")) g.edge_n = std::atoi(e);
  if (const char* v = std::getenv("CUBESLICE_VERTEX_GUARD")) g.vertex_n = std::atoi(v);
  if (g.edge_n < 1 || g.vertex_n < 1)
    throw std::invalid_argument("guard environment variables must be positive integers");
  return g;
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return j;
}

void emit(const ordered_json& j, const std::string& out_path) {
  std::string text = j.dump(2);
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw std::invalid_argument("cannot write " + out_path);
    out << text << '\n';
  }
  std::cout << text << '\n';
}

std::uint32_t mask_from_coords(const std::vector<int>& coords, int n, const char* what) {
  std::uint32_t mask = 0;
  for (int c : coords) {
    if (c < 1 || c > n) throw std::invalid_argument(std::string(what) + ": coordinate out of range");
    std::uint32_t bit = 1u << (c - 1);
    if (mask & bit) throw std::invalid_argument(std::string(what) + ": duplicate coordinate");
    mask |= bit;
  }
  return mask;
}

int cmd_verify(const std::string& family_path) {
  HyperplaneFamily F = family_from_json(load_json(family_path));
  Guards g = env_guards();
  std::size_t missing = unsliced_edge_count(F, g);
  ordered_json out;
  out["n"] = F.n;
  out["k"] = F.planes.size();
  out["all_sliced"] = missing == 0;
  out["unsliced_count"] = missing;
  if (missing > 0) out["first_unsliced"] = edge_to_json(*find_unsliced_edge(F, g));
  emit(out, "");
  return missing == 0 ? 0 : 2;
}

int cmd_find_unsliced(const std::string& family_path) {
  HyperplaneFamily F = family_from_json(load_json(family_path));
  Guards g = env_guards();
  auto e = find_unsliced_edge(F, g);
  ordered_json out;
  out["found"] = e.has_value();
  if (e) out["edge"] = edge_to_json(*e);
  emit(out, "");
  return e ? 0 : 2;
}

int cmd_cover_to_slice(const std::string& family_path, const std::string& out_path) {
  HyperplaneFamily F = family_from_json(load_json(family_path));
  Guards g = env_guards();
  HyperplaneFamily S = cover_to_slicing(F, g);
  emit(family_to_json(S), out_path);
  return 0;
}

int cmd_bang_solve(const std::string& instance_path) {
  BangInstance inst = bang_instance_from_json(load_json(instance_path));
  BangSolution sol = bang_solve(inst);
  ordered_json out = bang_solution_to_json(sol);
  out["verified"] = bang_verify(inst, sol.epsilon);
  emit(out, "");
  return 0;
}

int cmd_sample_chain(const std::string& measure_path, std::uint64_t seed) {
  ProductMeasure P = measure_from_json(load_json(measure_path));
  Rng rng(seed);
  std::vector<int> order = sample_chain(P, rng);
  ordered_json out;
  out["seed"] = seed;
  ordered_json oj = ordered_json::array();
  for (int c : order) oj.push_back(c + 1);
  out["order"] = std::move(oj);
  emit(out, "");
  return 0;
}

int cmd_check_lym(const std::string& sets_path, const std::string& measure_path, bool sperner) {
  VertexFamily A = vertex_family_from_json(load_json(sets_path));
  ProductMeasure P = measure_from_json(load_json(measure_path));
  BoundReport rep = sperner ? sperner_check(A, P) : lym_check(A, P);
  ordered_json out = bound_report_to_json(rep);
  out["is_antichain"] = is_antichain(A);
  emit(out, "");
  return rep.holds ? 0 : 2;
}

int cmd_check_anticoncentration(const std::string& measure_path) {
  ProductMeasure P = measure_from_json(load_json(measure_path));
  AnticoncentrationReport rep = anticoncentration_check(P);
  emit(anticoncentration_report_to_json(rep), "");
  return rep.holds ? 0 : 2;
}

int cmd_check_monotone(const std::string& function_path, const std::string& measure_path,
                       const std::vector<int>& u_coords) {
  BooleanFunction f = function_from_json(load_json(function_path));
  ProductMeasure P = measure_from_json(load_json(measure_path));
  std::uint32_t u = mask_from_coords(u_coords, f.n, "--u");
  Guards g = env_guards();
  BoundaryReport rep = boundary_prob(f, P, u, g);
  ordered_json out = boundary_report_to_json(rep);
  ordered_json coeffs = ordered_json::array();
  for (int j = 0; j < f.n; ++j) coeffs.push_back(biased_fourier_degree1(f, P, j, g));
  out["degree1_coefficients"] = std::move(coeffs);
  emit(out, "");
  return rep.holds ? 0 : 2;
}

int cmd_decompose(const std::string& matrix_path, double mass_threshold, double column_bound,
                  double tau, int S, bool check) {
  int ncols = -1;
  Matrix V = matrix_from_json(load_json(matrix_path), &ncols);
  if (ncols < 0 && !V.empty()) ncols = static_cast<int>(V[0].size());
  if (ncols < 0) throw std::invalid_argument("empty matrix needs a 'cols' field");
  DecompositionParams params = DecompositionParams::standard(std::max(ncols, 2));
  if (mass_threshold > 0) params.mass_threshold = mass_threshold;
  if (column_bound > 0) params.column_bound = column_bound;
  if (tau > 0) params.tau = tau;
  if (S > 0) params.S = S;
  params.validate();
  DecompositionResult res = decompose(V, params, ncols);
  ordered_json out = decomposition_to_json(res);
  if (check) out["check"] = check_result(V, res, params);
  emit(out, "");
  if (check && !out["check"].get<bool>()) return 2;
  return 0;
}

int cmd_find_missing_edge(const std::string& family_path, std::uint64_t seed, double theta,
                          std::uint64_t x2_attempts, std::uint64_t edge_attempts) {
  HyperplaneFamily F = family_from_json(load_json(family_path));
  AdversaryParams params;
  params.theta = theta;
  params.x2_attempts = x2_attempts;
  params.edge_attempts = edge_attempts;
  AdversaryOutcome out = find_missing_edge(F, params, seed);
  ordered_json j;
  j["seed"] = seed;
  j["found"] = out.found;
  if (out.found) j["edge"] = edge_to_json(out.edge);
  j["trace"] = adversary_trace_to_json(out.trace);
  emit(j, "");
  return out.found ? 0 : 2;
}

int cmd_search_family(int n, int k, std::uint64_t budget, std::uint64_t seed) {
  Guards g = env_guards();
  Rng rng(seed);
  SearchOutcome out = search_slicing_family(n, k, budget, rng, g);
  ordered_json j;
  j["seed"] = seed;
  j["success"] = out.success;
  j["evaluations"] = out.evaluations;
  j["best_unsliced"] = out.unsliced;
  j["family"] = family_to_json(out.family);
  emit(j, "");
  return out.success ? 0 : 2;
}

int cmd_suite(std::uint64_t seed, int workers, const std::string& out_path) {
  if (workers < 1) workers = std::max(1u, std::thread::hardware_concurrency());
  SuiteReport rep = run_suite(seed, workers);
  emit(suite_report_to_json(rep), out_path);
  return rep.all_pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"computational laboratory for hyperplane slicings of the hypercube"};
  app.require_subcommand(1);
  int exit_code = 0;

  std::string family_path, measure_path, sets_path, function_path, instance_path, matrix_path;
  std::string out_path;
  std::uint64_t seed = 0;
  double theta = 0.0;
  std::uint64_t x2_attempts = 1000, edge_attempts = 200, budget = 200000;
  double mass_threshold = 0.0, column_bound = 0.0, tau = 0.0;
  int S = 0, n = 0, k = 0, workers = 0;
  std::vector<int> u_coords;
  bool check = false;

  auto* verify = app.add_subcommand("verify", "check whether a family slices every cube edge");
  verify->add_option("--family", family_path, "family JSON file")->required();
  verify->callback([&] { exit_code = cmd_verify(family_path); });

  auto* findu = app.add_subcommand("find-unsliced", "report the first edge missed by a family");
  findu->add_option("--family", family_path, "family JSON file")->required();
  findu->callback([&] { exit_code = cmd_find_unsliced(family_path); });

  auto* cts = app.add_subcommand("cover-to-slice",
                                 "double a skew vertex cover into an edge-slicing family");
  cts->add_option("--family", family_path, "covering family JSON file")->required();
  cts->add_option("--out", out_path, "also write the converted family here");
  cts->callback([&] { exit_code = cmd_cover_to_slice(family_path, out_path); });

  auto* bang = app.add_subcommand("bang-solve", "run local search on a sign-vector instance");
  bang->add_option("--instance", instance_path, "instance JSON file")->required();
  bang->callback([&] { exit_code = cmd_bang_solve(instance_path); });

  auto* chain = app.add_subcommand("sample-chain", "sample one coordinate-insertion chain");
  chain->add_option("--measure", measure_path, "product measure JSON file")->required();
  chain->add_option("--seed", seed, "random seed");
  chain->callback([&] { exit_code = cmd_sample_chain(measure_path, seed); });

  auto* lym = app.add_subcommand("check-lym", "exact point-counting bound for a set family");
  lym->add_option("--sets", sets_path, "vertex family JSON file")->required();
  lym->add_option("--measure", measure_path, "product measure JSON file")->required();
  lym->callback([&] { exit_code = cmd_check_lym(sets_path, measure_path, false); });

  auto* sper = app.add_subcommand("check-sperner", "exact level bound for a set family");
  sper->add_option("--sets", sets_path, "vertex family JSON file")->required();
  sper->add_option("--measure", measure_path, "product measure JSON file")->required();
  sper->callback([&] { exit_code = cmd_check_lym(sets_path, measure_path, true); });

  auto* ac = app.add_subcommand("check-anticoncentration",
                                "certified max level probability bound for a measure");
  ac->add_option("--measure", measure_path, "product measure JSON file")->required();
  ac->callback([&] { exit_code = cmd_check_anticoncentration(measure_path); });

  auto* mono = app.add_subcommand("check-monotone",
                                  "boundary bound and degree-1 coefficients of a function");
  mono->add_option("--function", function_path, "boolean function JSON file")->required();
  mono->add_option("--measure", measure_path, "product measure JSON file")->required();
  mono->add_option("--u", u_coords, "1-based coordinates flipped by the shift")->delimiter(',');
  mono->callback([&] { exit_code = cmd_check_monotone(function_path, measure_path, u_coords); });

  auto* dec = app.add_subcommand("decompose", "split a matrix into scales and a retained core");
  dec->add_option("--matrix", matrix_path, "matrix JSON file")->required();
  dec->add_option("--mass-threshold", mass_threshold, "column mass threshold");
  dec->add_option("--column-bound", column_bound, "retained column mass bound");
  dec->add_option("--tau", tau, "drop threshold");
  dec->add_option("--S", S, "drops tolerated before a removal");
  dec->add_flag("--check", check, "re-verify the decomposition");
  dec->callback([&] {
    exit_code = cmd_decompose(matrix_path, mass_threshold, column_bound, tau, S, check);
  });

  auto* fme = app.add_subcommand("find-missing-edge",
                                 "search for an edge missed by a skew family");
  fme->add_option("--family", family_path, "family JSON file")->required();
  fme->add_option("--seed", seed, "random seed");
  fme->add_option("--theta", theta, "margin scale (default n^-0.0115)");
  fme->add_option("--x2-attempts", x2_attempts, "attempts for the removed-coordinate stage");
  fme->add_option("--edge-attempts", edge_attempts, "sampled candidate edges");
  fme->callback([&] {
    exit_code = cmd_find_missing_edge(family_path, seed, theta, x2_attempts, edge_attempts);
  });

  auto* sf = app.add_subcommand("search-family", "randomized search for a small slicing family");
  sf->add_option("--n", n, "dimension")->required();
  sf->add_option("--k", k, "number of planes")->required();
  sf->add_option("--budget", budget, "evaluation budget");
  sf->add_option("--seed", seed, "random seed");
  sf->callback([&] { exit_code = cmd_search_family(n, k, budget, seed); });

  auto* suite = app.add_subcommand("suite", "run the full self-check battery");
  suite->add_option("--seed", seed, "battery seed");
  suite->add_option("--workers", workers, "worker threads (default: hardware)");
  suite->add_option("--out", out_path, "also write the report here");
  suite->callback([&] { exit_code = cmd_suite(seed, workers, out_path); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const guard_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const parse_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return exit_code;
}

// Acceptance gate: runs every suite criterion at seed 42 with one line of
// output per criterion, enforcing wall-clock budgets on the two expensive
// ones. Budgets affect the printed verdict and exit code, never the report
// handed to the determinism re-run (which must serialize exactly like a
// plain run_core_criteria pass).

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <thread>

#include <cubeslice/suite.hpp>

using namespace cubeslice;

namespace {

using Criterion = CriterionResult (*)(std::uint64_t, int);

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
  const std::uint64_t seed = 42;
  int workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;

  struct Entry {
    Criterion fn;
    double budget_s;  // 0 = untimed
  };
  const Entry entries[] = {
      {criterion_verifier_oracle, 60.0},
      {criterion_cover_conversion, 0.0},
      {criterion_local_search, 0.0},
      {criterion_chain_identities, 0.0},
      {criterion_antichain_bounds, 0.0},
      {criterion_anticoncentration, 0.0},
      {criterion_monotone_boundary, 0.0},
      {criterion_edge_antichains, 0.0},
      {criterion_decomposition, 0.0},
      {criterion_pipeline_soundness, 600.0},
  };

  SuiteReport rep;
  rep.seed = seed;
  bool all_pass = true;
  for (const Entry& e : entries) {
    auto t0 = std::chrono::steady_clock::now();
    CriterionResult r = e.fn(seed, workers);
    double secs = seconds_since(t0);
    bool verdict = r.pass;
    const char* note = "";
    if (e.budget_s > 0 && secs > e.budget_s) {
      verdict = false;
      note = " [over time budget]";
    }
    std::printf("criterion %d: %s - %s (%.1fs)%s\n", r.id, verdict ? "PASS" : "FAIL",
                r.name.c_str(), secs, note);
    std::fflush(stdout);
    all_pass = all_pass && verdict;
    rep.results.push_back(std::move(r));
  }

  rep.all_pass = true;
  for (const auto& c : rep.results) rep.all_pass = rep.all_pass && c.pass;

  auto t0 = std::chrono::steady_clock::now();
  CriterionResult det = criterion_determinism(seed, workers, rep);
  double secs = seconds_since(t0);
  std::printf("criterion %d: %s - %s (%.1fs)\n", det.id, det.pass ? "PASS" : "FAIL",
              det.name.c_str(), secs);
  all_pass = all_pass && det.pass;

  std::printf("%s\n", all_pass ? "acceptance: all criteria passed"
                               : "acceptance: FAILURES PRESENT");
  return all_pass ? 0 : 1;
}

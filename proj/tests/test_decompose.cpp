#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <cubeslice/decompose.hpp>
#include <cubeslice/instances.hpp>
#include <cubeslice/rng.hpp>

using namespace cubeslice;

TEST_CASE("parameter validation", "[decompose]") {
  REQUIRE_NOTHROW(DecompositionParams::standard(64).validate());
  DecompositionParams p = DecompositionParams::standard(64);
  p.tau = 1.0 / 160000.0;  // violates the scale-ratio separation
  REQUIRE_THROWS(p.validate());
  p = DecompositionParams::standard(64);
  p.mass_threshold = 0.0;
  REQUIRE_THROWS(p.validate());
  p = DecompositionParams::standard(64);
  p.S = 0;
  REQUIRE_THROWS(p.validate());
  p = DecompositionParams::standard(64);
  p.column_bound = -1.0;
  REQUIRE_THROWS(p.validate());
  REQUIRE(DecompositionParams::standard(64).S == 1);
}

TEST_CASE("single spiked row: one drop, row survives", "[decompose]") {
  const int n = 64;
  std::vector<double> row(n, std::sqrt(1e-6 / 63));
  row[0] = std::sqrt(1.0 - 1e-6);
  Matrix V{row};
  DecompositionParams params = DecompositionParams::standard(n);
  DecompositionResult res = decompose(V, params);
  REQUIRE(res.removals == 1);
  REQUIRE(res.drop_counts == std::vector<int>{1});
  REQUIRE(res.k_prime == 1);
  REQUIRE(res.n_prime == 63);
  REQUIRE(res.certificates.empty());
  REQUIRE(res.col_order.back() == 0);  // the spike column went out first
  REQUIRE(res.retained_row_norm[0] == Catch::Approx(1e-3).epsilon(1e-9));
  for (int b = 0; b < 63; ++b)
    REQUIRE(res.V_prime[0][b] == Catch::Approx(std::sqrt(1.0 / 63)).epsilon(1e-9));
  REQUIRE(check_result(V, res, params));

  SECTION("tampering is caught") {
    DecompositionResult bad = res;
    bad.V_prime[0][0] += 1e-6;
    REQUIRE_FALSE(check_result(V, bad, params));
    bad = res;
    bad.n_prime = 62;
    REQUIRE_FALSE(check_result(V, bad, params));
    bad = res;
    std::swap(bad.col_order[0], bad.col_order.back());
    REQUIRE_FALSE(check_result(V, bad, params));
  }
}

TEST_CASE("flat row: nothing reaches the thresholds", "[decompose]") {
  Matrix V{std::vector<double>(256, 1.0)};
  DecompositionParams params = DecompositionParams::standard(256);
  DecompositionResult res = decompose(V, params);
  REQUIRE(res.removals == 0);
  REQUIRE(res.k_prime == 1);
  REQUIRE(res.n_prime == 256);
  REQUIRE(res.drop_counts == std::vector<int>{0});
  REQUIRE(res.retained_row_norm[0] == Catch::Approx(1.0).epsilon(1e-12));
  REQUIRE(res.V_prime[0][17] == Catch::Approx(1.0 / 16.0).epsilon(1e-12));
  REQUIRE(check_result(V, res, params));
}

TEST_CASE("cascade removes the row with a dead residual", "[decompose]") {
  Matrix V{{1.0, 1e-12}};
  DecompositionParams params = DecompositionParams::standard(2);
  DecompositionResult res = decompose(V, params);
  REQUIRE(res.removals == 2);
  REQUIRE(res.k_prime == 0);
  REQUIRE(res.n_prime == 0);
  REQUIRE(res.drop_counts == std::vector<int>{2});
  REQUIRE(res.certificates.size() == 1);
  REQUIRE(res.certificates[0].row == 0);
  REQUIRE(res.certificates[0].partition.blocks ==
          std::vector<std::vector<int>>{{0}, {1}, {}});
  REQUIRE(check_result(V, res, params));

  SECTION("certificate tampering is caught") {
    DecompositionResult bad = res;
    bad.certificates[0].row = 5;
    REQUIRE_FALSE(check_result(V, bad, params));
    bad = res;
    bad.certificates[0].partition.blocks = {{1}, {0}, {}};  // chain reversed
    REQUIRE_FALSE(check_result(V, bad, params));
    bad = res;
    bad.certificates[0].partition.blocks = {{0}, {}};  // column 1 unaccounted
    REQUIRE_FALSE(check_result(V, bad, params));
    bad = res;
    bad.certificates.clear();
    REQUIRE_FALSE(check_result(V, bad, params));
  }
}

TEST_CASE("removal with a live residual keeps the full block chain", "[decompose]") {
  Matrix V{{1.0, 1e-3, 1e-6}};
  DecompositionParams params = DecompositionParams::standard(3);
  DecompositionResult res = decompose(V, params);
  REQUIRE(res.removals == 2);
  REQUIRE(res.k_prime == 0);
  REQUIRE(res.n_prime == 1);
  REQUIRE(res.col_order == std::vector<int>{2, 0, 1});
  REQUIRE(res.certificates.size() == 1);
  REQUIRE(res.certificates[0].partition.blocks ==
          std::vector<std::vector<int>>{{0}, {1}, {2}});
  REQUIRE(check_result(V, res, params));

  // a live residual must show S + 2 blocks; demanding a larger S breaks it
  DecompositionParams stricter = params;
  stricter.S = 2;
  REQUIRE_FALSE(check_result(V, res, stricter));
}

TEST_CASE("empty matrix needs an explicit width", "[decompose]") {
  DecompositionParams params = DecompositionParams::standard(5);
  REQUIRE_THROWS(decompose(Matrix{}, params));
  DecompositionResult res = decompose(Matrix{}, params, 5);
  REQUIRE(res.k_prime == 0);
  REQUIRE(res.n_prime == 5);
  REQUIRE(res.removals == 0);
  REQUIRE(res.certificates.empty());
  REQUIRE(check_result(Matrix{}, res, params));
}

TEST_CASE("malformed matrices throw", "[decompose]") {
  DecompositionParams params = DecompositionParams::standard(4);
  REQUIRE_THROWS(decompose(Matrix{{1.0, 0.5}, {1.0}}, params));           // ragged
  REQUIRE_THROWS(decompose(Matrix{{0.0, 0.0}}, params));                  // zero row
}

TEST_CASE("random matrices decompose and verify", "[decompose]") {
  Rng rng(601);
  DecompositionParams desk;
  desk.mass_threshold = 0.25;
  desk.column_bound = 0.3;
  int with_removals = 0;
  for (int trial = 0; trial < 60; ++trial) {
    int k = 1 + static_cast<int>(rng.below(6));
    int n = 2 + static_cast<int>(rng.below(39));
    DecompositionParams params = trial % 2 ? desk : DecompositionParams::standard(n);
    Matrix V = random_decompose_matrix(k, n, rng, params.tau);
    DecompositionResult res = decompose(V, params);
    REQUIRE(check_result(V, res, params));
    REQUIRE(res.removals == n - res.n_prime);
    REQUIRE(static_cast<int>(res.certificates.size()) == k - res.k_prime);
    if (res.removals > 0) ++with_removals;
  }
  REQUIRE(with_removals > 0);  // the battery must actually exercise the loop
}

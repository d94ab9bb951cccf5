#include <catch2/catch_amalgamated.hpp>

#include <cubeslice/bang.hpp>
#include <cubeslice/instances.hpp>
#include <cubeslice/rng.hpp>

using namespace cubeslice;

namespace {

BangInstance make(std::vector<std::vector<Rational>> M, std::vector<Rational> g, Rational th) {
  BangInstance inst;
  inst.M = std::move(M);
  inst.gamma = std::move(g);
  inst.theta = std::move(th);
  return inst;
}

}  // namespace

TEST_CASE("validation rejects malformed instances", "[bang]") {
  REQUIRE_THROWS(make({{1, Rational(1, 2)}, {Rational(1, 3), 1}}, {0, 0}, 1).validate());  // asymmetric
  REQUIRE_THROWS(make({{Rational(2)}}, {0}, 1).validate());                                // diagonal
  REQUIRE_THROWS(make({{1}}, {0}, Rational(-1)).validate());                               // theta < 0
  REQUIRE_THROWS(make({{1, 0}}, {0, 0}, 1).validate());                                    // not square
  REQUIRE_NOTHROW(make({{1, Rational(1, 2)}, {Rational(1, 2), 1}}, {0, 0}, 0).validate());
}

TEST_CASE("already-local-maximal start needs no flips", "[bang]") {
  BangInstance inst = make({{1, Rational(1, 2)}, {Rational(1, 2), 1}},
                           {Rational(1, 4), Rational(-1, 4)}, Rational(1, 2));
  BangSolution sol = bang_solve(inst);
  REQUIRE(sol.flips == 0);
  REQUIRE(sol.epsilon == std::vector<int>{1, 1});
  REQUIRE(sol.margins[0] == Rational(1, 2));
  REQUIRE(sol.margins[1] == 1);
  REQUIRE(bang_verify(inst, sol.epsilon));
}

TEST_CASE("a profitable flip is taken and certified", "[bang]") {
  BangInstance inst = make({{1, 0}, {0, 1}}, {1, -1}, Rational(1, 2));
  BangSolution sol = bang_solve(inst);
  REQUIRE(sol.flips == 1);
  REQUIRE(sol.epsilon == std::vector<int>{-1, 1});
  REQUIRE(sol.margins[0] == Rational(3, 2));
  REQUIRE(sol.margins[1] == Rational(3, 2));
  REQUIRE(bang_verify(inst, sol.epsilon));
  REQUIRE(sol.potential_history.size() == 2);
  REQUIRE(sol.potential_history[1] > sol.potential_history[0]);
}

TEST_CASE("ties break toward the lowest index", "[bang]") {
  BangInstance inst = make({{1, 0}, {0, 1}}, {1, 1}, 0);
  BangSolution sol = bang_solve(inst);
  // both flips gain 4 at the start; index 0 must flip first, then index 1
  REQUIRE(sol.flips == 2);
  REQUIRE(sol.epsilon == std::vector<int>{-1, -1});
  REQUIRE(sol.margins[0] == 1);
  REQUIRE(sol.margins[1] == 1);
}

TEST_CASE("zero-size instances are fine", "[bang]") {
  BangInstance inst;
  inst.theta = 1;
  BangSolution sol = bang_solve(inst);
  REQUIRE(sol.epsilon.empty());
  REQUIRE(sol.flips == 0);
  REQUIRE(bang_verify(inst, sol.epsilon));
}

TEST_CASE("random instances always certify, with bounded flips", "[bang]") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    int k = 1 + static_cast<int>(rng.below(7));
    BangInstance inst = random_bang_instance(k, rng);
    BangSolution sol = bang_solve(inst);
    REQUIRE(bang_verify(inst, sol.epsilon));
    REQUIRE(sol.flips <= (std::uint64_t(1) << k));
    REQUIRE(sol.margins == bang_margins(inst, sol.epsilon));
    for (std::size_t t = 1; t < sol.potential_history.size(); ++t)
      REQUIRE(sol.potential_history[t] > sol.potential_history[t - 1]);
    for (const auto& m : sol.margins) REQUIRE(m >= inst.theta);
  }
}

TEST_CASE("verification rejects sub-theta margins", "[bang]") {
  // eps = (+1,+1) has margin 0 on both rows: verify must fail for theta > 0
  BangInstance inst = make({{1, 0}, {0, 1}}, {Rational(1, 2), Rational(1, 2)}, Rational(1, 2));
  REQUIRE_FALSE(bang_verify(inst, {1, 1}));
  REQUIRE(bang_verify(inst, {-1, -1}));
}

#include <catch2/catch_amalgamated.hpp>

#include <cubeslice/cube.hpp>
#include <cubeslice/instances.hpp>
#include <cubeslice/rng.hpp>

using namespace cubeslice;

namespace {

Hyperplane plane(std::vector<Rational> v, Rational mu) { return Hyperplane{std::move(v), std::move(mu)}; }

}  // namespace

TEST_CASE("margins are exact", "[cube]") {
  Hyperplane h = plane({Rational(1), Rational(1, 2)}, Rational(1, 4));
  // vertices: (-1,-1), (+1,-1), (-1,+1), (+1,+1)
  REQUIRE(margin(h, CubeVertex{2, 0b00}) == Rational(-7, 4));
  REQUIRE(margin(h, CubeVertex{2, 0b01}) == Rational(1, 4));
  REQUIRE(margin(h, CubeVertex{2, 0b10}) == Rational(-3, 4));
  REQUIRE(margin(h, CubeVertex{2, 0b11}) == Rational(5, 4));
}

TEST_CASE("zero margins never slice", "[cube]") {
  Hyperplane h = plane({Rational(1), Rational(1)}, Rational(0));
  // edge between (-1,+1) and (+1,+1): margins 0 and 2
  CubeEdge e{CubeVertex{2, 0b10}, 0};
  REQUIRE(margin(h, e.base) == 0);
  REQUIRE(margin(h, e.other()) == 2);
  REQUIRE_FALSE(slices(h, e));
  REQUIRE(covers(h, e.base));
  // edge between (+1,-1) and (+1,+1): margins 0 and 2, same verdict
  CubeEdge e2{CubeVertex{2, 0b01}, 1};
  REQUIRE_FALSE(slices(h, e2));
  // edge between (-1,-1) and (+1,-1): margins -2 and 0
  CubeEdge e3{CubeVertex{2, 0b00}, 0};
  REQUIRE_FALSE(slices(h, e3));
}

TEST_CASE("a plane pinching one vertex slices exactly its incident edges", "[cube]") {
  for (int n : {2, 3, 5}) {
    std::vector<Rational> v(n, Rational(1));
    Hyperplane h = plane(v, Rational(2 * n - 1, 2));  // between levels n-2 and n
    HyperplaneFamily F{n, {h}};
    std::size_t total = std::size_t(n) << (n - 1);
    REQUIRE(unsliced_edge_count(F) == total - n);
    Rational expect(static_cast<unsigned long>(n), static_cast<unsigned long>(total));
    expect.canonicalize();
    REQUIRE(sliced_fraction(h) == expect);
  }
}

TEST_CASE("incremental sign enumeration matches direct margins", "[cube]") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 1 + static_cast<int>(rng.below(6));
    Hyperplane h = random_skew_plane(n, rng);
    std::vector<std::int8_t> sgns;
    detail::margin_signs(h, sgns);
    for (std::uint32_t m = 0; m < (1u << n); ++m)
      REQUIRE(int(sgns[m]) == sign(margin(h, CubeVertex{n, m})));
  }
}

TEST_CASE("find_unsliced_edge returns the lexicographically first edge", "[cube]") {
  // a plane through the all-plus corner: the single unsliced-or-sliced split
  // leaves predictable first edges; with no planes at all the first edge in
  // (-1,...,-1) with direction n is the very first in (base, direction) order
  HyperplaneFamily empty{3, {}};
  auto e = find_unsliced_edge(empty);
  REQUIRE(e.has_value());
  REQUIRE(e->base.mask == 0);
  REQUIRE(e->dir == 0);

  Hyperplane h = plane({Rational(1), Rational(1), Rational(1)}, Rational(5, 2));
  HyperplaneFamily F{3, {h}};
  auto e2 = find_unsliced_edge(F);
  REQUIRE(e2.has_value());
  // edges incident to mask 7 are sliced; (mask 0, dir 0) is not
  REQUIRE(e2->base.mask == 0);
  REQUIRE(e2->dir == 0);
  bool any_sliced = false;
  for (const auto& p : F.planes) any_sliced = any_sliced || slices(p, *e2);
  REQUIRE_FALSE(any_sliced);
}

TEST_CASE("cover to slicing on a hand-checked square cover", "[cube]") {
  HyperplaneFamily cover{2, {plane({Rational(1), Rational(1)}, Rational(0)),
                            plane({Rational(1), Rational(-1)}, Rational(0))}};
  REQUIRE(covers_all(cover));
  REQUIRE(unsliced_edge_count(cover) == 4);  // zero margins slice nothing
  HyperplaneFamily sliced = cover_to_slicing(cover);
  REQUIRE(sliced.planes.size() == 4);
  REQUIRE(unsliced_edge_count(sliced) == 0);
  REQUIRE(find_unsliced_edge(sliced) == std::nullopt);
}

TEST_CASE("cover to slicing rejects bad inputs", "[cube]") {
  HyperplaneFamily not_cover{2, {plane({Rational(1), Rational(1)}, Rational(0))}};
  REQUIRE_FALSE(covers_all(not_cover));
  REQUIRE_THROWS_AS(cover_to_slicing(not_cover), std::invalid_argument);

  HyperplaneFamily degenerate{2, {plane({Rational(1), Rational(0)}, Rational(0)),
                                  plane({Rational(0), Rational(1)}, Rational(0))}};
  REQUIRE_THROWS_AS(cover_to_slicing(degenerate), std::invalid_argument);

  HyperplaneFamily empty{2, {}};
  REQUIRE_THROWS_AS(cover_to_slicing(empty), std::invalid_argument);
}

TEST_CASE("random covers always convert to slicings", "[cube]") {
  Rng rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    int n = 2 + static_cast<int>(rng.below(4));
    HyperplaneFamily cover = random_skew_cover(n, rng);
    REQUIRE(covers_all(cover));
    HyperplaneFamily sliced = cover_to_slicing(cover);
    REQUIRE(sliced.planes.size() == 2 * cover.planes.size());
    REQUIRE(unsliced_edge_count(sliced) == 0);
  }
}

TEST_CASE("guards refuse oversized enumerations", "[cube]") {
  HyperplaneFamily big{30, {}};
  REQUIRE_THROWS_AS(unsliced_edge_count(big), guard_error);
  REQUIRE_THROWS_AS(covers_all(big), guard_error);
  Guards loose{30, 30};
  HyperplaneFamily ok{5, {}};
  REQUIRE(unsliced_edge_count(ok, loose) == 5u << 4);
}

TEST_CASE("randomized family search can slice the square", "[cube]") {
  Rng rng(4);
  SearchOutcome out = search_slicing_family(2, 2, 20000, rng);
  REQUIRE(out.success);
  REQUIRE(out.unsliced == 0);
  REQUIRE(unsliced_edge_count(out.family) == 0);
  REQUIRE(out.evaluations <= 20000);
}

TEST_CASE("family validation", "[cube]") {
  HyperplaneFamily bad{2, {plane({Rational(1)}, Rational(0))}};
  REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
  HyperplaneFamily zero_dim{0, {}};
  REQUIRE_THROWS_AS(zero_dim.validate(), std::invalid_argument);
}

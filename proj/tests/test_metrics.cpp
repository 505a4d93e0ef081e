#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>
#include <string>
#include <vector>

#include "cayley/metrics.hpp"

using namespace cayley;

namespace {

Elem zn(const Group& g, std::vector<Int> v) {
  Elem e = g.identity();
  e.v = std::move(v);
  return e;
}

// Independent oracle: spell every letter word of length <= k and keep the
// shortest spelling per element. Exponential in k, so k stays small.
std::map<std::string, int> word_ball(const Group& g, int k) {
  std::map<std::string, int> out;
  std::vector<Elem> layer{g.identity()};
  out.emplace(elem_key(layer[0]), 0);
  for (int len = 1; len <= k; ++len) {
    std::vector<Elem> next;
    for (const Elem& e : layer)
      for (int l = 0; l < g.letter_count(); ++l) {
        Elem ne = g.multiply(e, g.letter(l));
        next.push_back(ne);
        out.emplace(elem_key(ne), len);  // emplace keeps the first, shortest
      }
    layer = std::move(next);
  }
  return out;
}

}  // namespace

TEST_CASE("lattice balls match the closed-form counts") {
  Ball b1 = Ball::grow(make_free_abelian(1), 12);
  for (int r = 0; r <= 12; ++r) REQUIRE(b1.count_upto(r) == 2ull * r + 1);

  Ball b2 = Ball::grow(make_free_abelian(2), 10);
  for (int r = 0; r <= 10; ++r)
    REQUIRE(b2.count_upto(r) == 2ull * r * r + 2ull * r + 1);
}

TEST_CASE("balls agree with exhaustive word enumeration") {
  struct Case {
    GroupPtr g;
    int k;
  };
  std::vector<Case> cases;
  cases.push_back({make_heisenberg(), 4});
  cases.push_back({make_lamplighter(), 5});
  cases.push_back({make_ut(3), 4});
  cases.push_back({make_dinf(), 6});
  cases.push_back({make_free_product(make_free_abelian(1), make_free_abelian(1)), 5});
  for (auto& [g, k] : cases) {
    auto oracle = word_ball(*g, k);
    Ball b = Ball::grow(g, k);
    REQUIRE(b.size() == oracle.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
      auto it = oracle.find(elem_key(b.elems[i]));
      REQUIRE(it != oracle.end());
      REQUIRE(it->second == b.dist[i]);
    }
  }
}

TEST_CASE("extension never loses or revisits elements") {
  Ball whole = Ball::grow(make_heisenberg(), 6);
  Ball grown = Ball::grow(make_heisenberg(), 2);
  grown.extend(4);
  grown.extend(6);
  REQUIRE(grown.size() == whole.size());
  for (int r = 0; r <= 6; ++r) REQUIRE(grown.count_upto(r) == whole.count_upto(r));
  for (std::size_t i = 0; i < whole.size(); ++i) {
    auto at = grown.find(whole.elems[i]);
    REQUIRE(at);
    REQUIRE(grown.dist[*at] == whole.dist[i]);
  }
}

TEST_CASE("distance is inversion invariant") {
  for (GroupPtr g : {make_heisenberg(), make_lamplighter()}) {
    Ball b = Ball::grow(g, 5);
    for (const Elem& e : b.elems) {
      auto d = b.distance_of(e), di = b.distance_of(g->inverse(e));
      REQUIRE(d);
      REQUIRE(di);
      REQUIRE(*d == *di);
    }
  }
}

TEST_CASE("products obey the triangle inequality") {
  GroupPtr g = make_heisenberg();
  Ball b = Ball::grow(g, 6);
  std::mt19937_64 rng(5150);
  for (int t = 0; t < 4000; ++t) {
    const Elem& x = b.elems[rng() % b.size()];
    const Elem& y = b.elems[rng() % b.size()];
    auto d = b.distance_of(g->multiply(x, y));
    if (!d) continue;  // product escaped the ball
    REQUIRE(*d <= *b.distance_of(x) + *b.distance_of(y));
  }
}

TEST_CASE("geodesics evaluate to their target at the right length") {
  GroupPtr g = make_lamplighter();
  Ball b = Ball::grow(g, 6);
  for (std::size_t i = 0; i < b.size(); ++i) {
    std::vector<int> w = b.geodesic(b.elems[i]);
    REQUIRE((int)w.size() == b.dist[i]);
    REQUIRE(g->eval(w) == b.elems[i]);
    // every prefix of a geodesic is itself geodesic
    for (std::size_t t = 0; t <= w.size(); ++t) {
      auto dt = b.distance_of(path_point(*g, w, t));
      REQUIRE(dt);
      REQUIRE(*dt == (int)t);
    }
  }
  Elem far = g->identity();
  far.v = {Int(100)};
  REQUIRE_THROWS_AS(b.geodesic(far), usage_error);
}

TEST_CASE("path_point walks prefixes") {
  GroupPtr g = make_free_abelian(1);
  std::vector<int> w = {0, 0, 1};  // x1 x1 x1-
  REQUIRE(path_point(*g, w, 0) == zn(*g, {0}));
  REQUIRE(path_point(*g, w, 1) == zn(*g, {1}));
  REQUIRE(path_point(*g, w, 2) == zn(*g, {2}));
  REQUIRE(path_point(*g, w, 3) == zn(*g, {1}));
  REQUIRE(path_point(*g, w, 99) == zn(*g, {1}));
}

TEST_CASE("ball growth respects the element cap") {
  GroupPtr f = make_free_product(make_free_abelian(1), make_free_abelian(1));
  REQUIRE_THROWS_AS(Ball::grow(f, 8, 100), cap_exceeded);
}

TEST_CASE("family estimators sandwich the exact distance") {
  struct Case {
    GroupPtr g;
    int r;
  };
  std::vector<Case> cases;
  cases.push_back({make_free_abelian(2), 8});
  cases.push_back({make_heisenberg(), 8});
  cases.push_back({make_ut(3), 8});
  cases.push_back({make_ut(4), 4});
  cases.push_back({make_semidirect({{1, 0}, {1, 1}}), 7});
  cases.push_back({make_lamplighter(), 8});
  cases.push_back({make_direct_product(make_free_abelian(1), make_free_abelian(1)), 8});
  cases.push_back({make_free_product(make_free_abelian(1), make_free_abelian(1)), 7});
  cases.push_back({make_dinf(), 8});
  for (auto& [g, r] : cases) {
    Ball b = Ball::grow(g, r);
    for (std::size_t i = 0; i < b.size(); ++i) {
      DistanceBound db = detail::family_distance(*g, b.elems[i]);
      REQUIRE(db.lower <= b.dist[i]);
      if (db.upper) REQUIRE(*db.upper >= b.dist[i]);
    }
  }
}

TEST_CASE("exact closed forms: lattice, lamplighter sweep") {
  // ZN: l1 norm is the distance, so the estimator must be exact everywhere
  {
    GroupPtr g = make_free_abelian(2);
    Ball b = Ball::grow(g, 8);
    for (std::size_t i = 0; i < b.size(); ++i) {
      DistanceBound db = detail::family_distance(*g, b.elems[i]);
      REQUIRE(db.exact());
      REQUIRE(db.lower == b.dist[i]);
    }
  }
  // lamplighter: one toggle per lit lamp plus the better of the two sweeps
  {
    GroupPtr g = make_lamplighter();
    Ball b = Ball::grow(g, 8);
    for (std::size_t i = 0; i < b.size(); ++i) {
      DistanceBound db = detail::family_distance(*g, b.elems[i]);
      REQUIRE(db.exact());
      REQUIRE(db.lower == b.dist[i]);
    }
  }
}

TEST_CASE("heisenberg axis and central distances") {
  GroupPtr g = make_heisenberg();
  Ball b = Ball::grow(g, 10);
  for (int n = 1; n <= 10; ++n) {
    REQUIRE(*b.distance_of(zn(*g, {n, 0, 0})) == n);   // s^n
    REQUIRE(*b.distance_of(zn(*g, {0, n, 0})) == n);   // p^n
  }
  // central: a closed length-L walk encloses area at most (L/4)^2, so up to
  // q^10 the direct letters are optimal; the commutator route first wins at
  // area 25, where [s^5, p^5] spends 20 letters
  for (int n = 1; n <= 10; ++n) REQUIRE(*b.distance_of(zn(*g, {0, 0, n})) == n);
  REQUIRE(detail::central_cost(Int(25)) == 20);
  DistanceBound db = detail::family_distance(*g, zn(*g, {0, 0, 25}));
  REQUIRE(*db.upper == 20);
  REQUIRE(db.lower <= 20);
}

TEST_CASE("distance oracle certifies exactly on a full ball") {
  GroupPtr g = make_heisenberg();
  Ball b = Ball::grow(g, 6);
  DistanceOracle oracle(g);
  for (std::size_t i = 0; i < b.size(); ++i) {
    DistanceBound db = oracle.bound(b.elems[i]);
    REQUIRE(db.exact());
    REQUIRE(db.lower == b.dist[i]);
    // memoized second query answers the same
    REQUIRE(oracle.bound(b.elems[i]).lower == db.lower);
  }
}

TEST_CASE("distance oracle certifies a lower bound when the radius runs out") {
  GroupPtr g = make_free_abelian(2);
  DistanceOracle oracle(g, 2'000'000, 4);
  DistanceBound db = oracle.bound(zn(*g, {100, 100}));
  REQUIRE(db.exact());  // formula answers without any search
  REQUIRE(db.lower == 200);
  // extension family has no estimator; the search certifies exclusion
  GroupPtr d = make_dinf();
  DistanceOracle od(d, 2'000'000, 4);
  Elem far = d->identity();
  far.h = std::make_shared<Elem>(zn(*d->base, {50}));
  DistanceBound fb = od.bound(far);
  REQUIRE(!fb.upper);
  REQUIRE(fb.lower >= 5);
  REQUIRE(fb.lower_by == "bfs-exclusion");
}

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <random>

#include "cayley/json_io.hpp"
#include "helpers.hpp"

using namespace cayley;
using namespace testutil;

namespace {

bool same_dfa(const Dfa& a, const Dfa& b) {
  return a.alphabet == b.alphabet && a.states == b.states && a.initial == b.initial &&
         a.accepting == b.accepting && a.next == b.next;
}

}  // namespace

TEST_CASE("automaton documents round-trip losslessly") {
  std::mt19937 rng(1001);
  Alphabet base = Alphabet::atoms({"plus", "minus", "x"});
  for (int arity = 1; arity <= 3; ++arity) {
    Alphabet alpha = arity == 1 ? base : Alphabet::tuple(base, arity);
    for (int iter = 0; iter < 30; ++iter) {
      Dfa d = determinize(random_nfa(rng, alpha, 5, 8));
      Json j = dfa_to_json(d);
      Dfa back = dfa_from_json(j);
      REQUIRE(same_dfa(d, back));
      // and through a real file
      std::string path = "roundtrip_tmp.json";
      save_dfa(d, path);
      Dfa back2 = load_dfa(path);
      std::remove(path.c_str());
      REQUIRE(same_dfa(d, back2));
    }
  }
}

TEST_CASE("symbol spelling uses atoms and tilde padding") {
  Alphabet base = Alphabet::atoms({"a", "b"});
  Alphabet pair = Alphabet::tuple(base, 2);
  Dfa d(pair);
  d.add_state(false);
  d.add_state(true);
  d.add_edge(0, pair.encode({0, 2}), 1);  // (a, ~)
  d.sort_edges();
  Json j = dfa_to_json(d);
  REQUIRE(j["transitions"][0][1] == Json::array({"a", "~"}));
  REQUIRE(same_dfa(dfa_from_json(j), d));

  // arity 1 symbols are bare strings
  Dfa e(base);
  e.add_state(true);
  e.add_edge(0, 1, 0);
  e.sort_edges();
  REQUIRE(dfa_to_json(e)["transitions"][0][1] == "b");
}

TEST_CASE("loader rejects malformed documents") {
  Alphabet base = Alphabet::atoms({"a", "b"});
  Dfa d(base);
  d.add_state(true);
  d.add_edge(0, 0, 0);
  d.sort_edges();
  Json good = dfa_to_json(d);

  SECTION("unknown top-level field") {
    Json j = good;
    j["comment"] = "hi";
    REQUIRE_THROWS_AS(dfa_from_json(j), usage_error);
  }
  SECTION("unknown alphabet field") {
    Json j = good;
    j["alphabet"]["pad"] = "~";
    REQUIRE_THROWS_AS(dfa_from_json(j), usage_error);
  }
  SECTION("missing field") {
    Json j = good;
    j.erase("accepting");
    REQUIRE_THROWS_AS(dfa_from_json(j), usage_error);
  }
  SECTION("initial out of range") {
    Json j = good;
    j["initial"] = 5;
    REQUIRE_THROWS_AS(dfa_from_json(j), usage_error);
  }
  SECTION("transition state out of range") {
    Json j = good;
    j["transitions"].push_back(Json::array({0, "a", 7}));
    REQUIRE_THROWS_AS(dfa_from_json(j), usage_error);
  }
  SECTION("unknown atom in symbol") {
    Json j = good;
    j["transitions"][0][1] = "c";
    REQUIRE_THROWS_AS(dfa_from_json(j), usage_error);
  }
  SECTION("duplicate transition") {
    Json j = good;
    j["transitions"].push_back(Json::array({0, "a", 0}));
    REQUIRE_THROWS_AS(dfa_from_json(j), usage_error);
  }
  SECTION("negative state") {
    Json j = good;
    j["initial"] = -1;
    REQUIRE_THROWS_AS(dfa_from_json(j), usage_error);
  }
  SECTION("zero states") {
    Json j = good;
    j["states"] = 0;
    j["transitions"] = Json::array();
    j["accepting"] = Json::array();
    REQUIRE_THROWS_AS(dfa_from_json(j), usage_error);
  }
}

TEST_CASE("all-pad symbols cannot be smuggled through a document") {
  Alphabet base = Alphabet::atoms({"a", "b"});
  Json j;
  j["alphabet"] = {{"atoms", {"a", "b"}}, {"arity", 2}};
  j["states"] = 2;
  j["initial"] = 0;
  j["accepting"] = Json::array({1});
  j["transitions"] = Json::array({Json::array({0, Json::array({"~", "~"}), 1})});
  REQUIRE_THROWS_AS(dfa_from_json(j), usage_error);
}

TEST_CASE("loaded automata accept the same language they were saved with") {
  std::mt19937 rng(77);
  Alphabet base = Alphabet::atoms({"a", "b"});
  for (int iter = 0; iter < 20; ++iter) {
    Dfa d = minimize(determinize(random_nfa(rng, base, 5, 9)));
    Json j = dfa_to_json(d);
    Dfa back = dfa_from_json(j);
    REQUIRE(oracle_lang(back, 7) == oracle_lang(d, 7));
  }
}

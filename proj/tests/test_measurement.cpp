#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "cayley/measurement.hpp"
#include "cayley/reps.hpp"

using namespace cayley;

namespace {

Int int_abs(const Int& v) { return v < 0 ? Int(-v) : v; }

// Walk element of a name under an explicit atom -> letter map.
Elem walk_of(const CayleyRep& rep, const Word& w) {
  std::vector<int> letters = sigma_letters(rep);
  Elem e = rep.group->identity();
  for (Sym c : w) e = rep.group->multiply(e, rep.group->letter(letters[c]));
  return e;
}

}  // namespace

TEST_CASE("atoms resolve to group letters") {
  CHECK(*try_sigma_letters(rep_by_id("unary-z")) == std::vector<int>{0, 1});
  CHECK(*try_sigma_letters(rep_by_id("dinf")) == std::vector<int>{0, 2, 1});
  CHECK(*try_sigma_letters(rep_by_id("z-x-z")) == std::vector<int>{0, 2, 1, 3});
  CHECK(*try_sigma_letters(rep_by_id("z-star-z")) == std::vector<int>{0, 2, 1, 3});
  // re-encoded reps carry the letter names themselves
  CHECK(*try_sigma_letters(rep_by_id("heisenberg-s")) == std::vector<int>{0, 1, 2, 3, 4, 5});
  CHECK(*try_sigma_letters(rep_by_id("binary-z-s")) == std::vector<int>{0, 1});
  CHECK(*try_sigma_letters(rep_by_id("lamplighter-s")) == std::vector<int>{0, 1, 2, 3});

  CHECK_FALSE(try_sigma_letters(rep_by_id("binary-z")).has_value());
  CHECK_FALSE(try_sigma_letters(rep_by_id("heisenberg")).has_value());
  CHECK_FALSE(try_sigma_letters(rep_by_id("ut3")).has_value());

  // an explicit map of the wrong size is no map at all
  CayleyRep broken = rep_unary_z();
  broken.atom_letter = {0};
  CHECK_FALSE(try_sigma_letters(broken).has_value());
  CHECK_THROWS_AS(sigma_letters(broken), usage_error);

  bool guided = false;
  try {
    measure_h(rep_by_id("binary-z"), 4);
  } catch (const usage_error& e) {
    guided = std::string(e.what()).find("block_reencode") != std::string::npos;
  }
  CHECK(guided);
}

TEST_CASE("deviation vanishes when names spell the walk") {
  for (const char* id : {"unary-z", "dinf", "z-x-z", "z-star-z"}) {
    int n = std::string(id) == "unary-z" || std::string(id) == "dinf" ? 12 : 8;
    MeasurementSeries se = measure_h(rep_by_id(id), n);
    REQUIRE(se.rows.size() == static_cast<std::size_t>(n) + 1);
    for (const SeriesRow& r : se.rows) {
      CHECK(*r.h_lower == 0);
      CHECK(*r.h_upper == 0);
    }
  }
}

TEST_CASE("deviation of signed binary names grows like the named value") {
  const CayleyRep& rep = rep_by_id("binary-z-s");
  const int n = 14;
  MeasurementSeries se = measure_h(rep, n);

  // independent recomputation: the group is Z, so the deviation of a name is
  // |value - walk sum| and the profile is a plain running max
  std::vector<Word> words = enumerate_upto(rep.language, n, 1 << 20);
  std::vector<Int> want(n + 1, Int(0));
  for (const Word& w : words) {
    Int named = rep.decode(w).v[0];
    Int walked = walk_of(rep, w).v[0];
    Int dev = int_abs(named - walked);
    for (std::size_t m = w.size(); m <= static_cast<std::size_t>(n); ++m)
      if (dev > want[m]) want[m] = dev;
  }
  for (int m = 0; m <= n; ++m) {
    CHECK(*se.rows[m].h_lower == want[m]);
    CHECK(*se.rows[m].h_upper == want[m]);
  }

  // short names for big elements force the walk far off target
  for (int k = 3; 2 * k + 2 <= n; ++k)
    CHECK(*se.rows[2 * k + 2].h_lower >= (Int(1) << k) - (2 * k + 2));

  // the L_count column counts names, not samples
  CHECK(*se.rows[4].words == 3);
  CHECK(*se.rows[14].words == 127);
}

TEST_CASE("deviation rows match exhaustive search distances") {
  const CayleyRep& rep = rep_by_id("heisenberg-s");
  const int n = 8;
  MeasurementSeries se = measure_h(rep, n);

  // same profile recomputed against raw breadth-first distances only
  Ball b = Ball::grow(rep.group, 16, 2'000'000);
  std::vector<Word> words = enumerate_upto(rep.language, n, 1 << 20);
  std::vector<Int> want(n + 1, Int(0));
  const Group& g = *rep.group;
  for (const Word& w : words) {
    Elem delta = g.multiply(g.inverse(walk_of(rep, w)), rep.decode(w));
    auto d = b.distance_of(delta);
    REQUIRE(d.has_value());
    for (std::size_t m = w.size(); m <= static_cast<std::size_t>(n); ++m)
      if (*d > want[m]) want[m] = *d;
  }
  for (int m = 0; m <= n; ++m) {
    CHECK(*se.rows[m].h_lower == want[m]);
    CHECK(*se.rows[m].h_upper == want[m]);
  }
  CHECK(want[8] > 0);  // the profile is nontrivial at this depth
}

TEST_CASE("deviation of one name") {
  const CayleyRep& rep = rep_by_id("binary-z-s");
  Elem e;
  e.v = {64};
  Word w = rep.encode(e);
  // the walk of that name sums to zero, so the whole value is deviation
  REQUIRE(walk_of(rep, w).v[0] == 0);
  DistanceOracle oracle(rep.group);
  DistanceBound b = deviation_of(rep, w, oracle);
  CHECK(b.exact());
  CHECK(b.lower == 64);
}

TEST_CASE("sampling measures a subset and says so") {
  const CayleyRep& rep = rep_by_id("binary-z-s");
  MeasurementSeries full = measure_h(rep, 12);
  MeasureOptions opt;
  opt.sample = true;
  opt.samples_per_length = 64;
  opt.seed = 7;
  MeasurementSeries part = measure_h(rep, 12, opt);
  CHECK(full.exhaustive);
  CHECK_FALSE(part.exhaustive);
  for (int m = 0; m <= 12; ++m) {
    CHECK(*part.rows[m].h_lower <= *full.rows[m].h_lower);
    CHECK(*part.rows[m].words == *full.rows[m].words);
  }
  CHECK(*part.rows[12].h_lower > 0);
  // same seed, same rows
  MeasurementSeries again = measure_h(rep, 12, opt);
  for (int m = 0; m <= 12; ++m) CHECK(*again.rows[m].h_lower == *part.rows[m].h_lower);
}

TEST_CASE("fellow traveler spread of the unary line is flat") {
  MeasurementSeries se = measure_s(rep_by_id("unary-z"), 12);
  CHECK(*se.rows[0].s == 0);
  // the two walks agree until one name ends one letter early
  for (int t = 1; t <= 12; ++t) CHECK(*se.rows[t].s == 1);
}

TEST_CASE("fellow traveler spread matches a sweep over value pairs") {
  const CayleyRep& rep = rep_by_id("binary-z-s");
  const int n = 8;
  MeasurementSeries se = measure_s(rep, n);

  // every frontier class this deep already occurs among successor pairs of
  // small values, so a direct sweep over them reproduces the curve
  std::vector<Int> want(n + 1, Int(0));
  for (long long k = -256; k <= 256; ++k) {
    Elem a, b;
    a.v = {k};
    b.v = {k + 1};
    Word u = rep.encode(a), v = rep.encode(b);
    Int pu = 0, pv = 0;
    std::vector<int> letters = sigma_letters(rep);
    const Group& g = *rep.group;
    for (int t = 1; t <= n; ++t) {
      if (static_cast<std::size_t>(t) <= u.size())
        pu += g.letter(letters[u[t - 1]]).v[0];
      if (static_cast<std::size_t>(t) <= v.size())
        pv += g.letter(letters[v[t - 1]]).v[0];
      if (static_cast<std::size_t>(t) > u.size() && static_cast<std::size_t>(t) > v.size()) break;
      Int spread = int_abs(pv - pu);
      if (spread > want[t]) want[t] = spread;
    }
  }
  Int run = 0;
  for (int t = 0; t <= n; ++t) {
    if (want[t] > run) run = want[t];
    CHECK(*se.rows[t].s == run);
  }
}

TEST_CASE("fellow traveler spreads stay inside both ceilings") {
  const int n = 8;
  std::vector<CayleyRep> reps;
  for (const char* id : {"unary-z", "binary-z-s", "heisenberg-s", "lamplighter-s", "dinf",
                         "z-x-z", "z-star-z"})
    reps.push_back(rep_by_id(id));
  reps.push_back(block_reencode(rep_unitriangular(3), "ut3-s"));

  for (const CayleyRep& rep : reps) {
    INFO(rep.id);
    MeasurementSeries hs = measure_h(rep, n);
    MeasurementSeries ss = measure_s(rep, n);
    REQUIRE(hs.rows[n].h_upper.has_value());
    Int ceiling = 2 * *hs.rows[n].h_upper + 4 * max_multiplier_states(rep) + 1;
    Int prev_h = 0, prev_s = 0;
    for (int t = 0; t <= n; ++t) {
      const Int& s = *ss.rows[t].s;
      CHECK(s <= 2 * t);
      CHECK(s <= ceiling);
      // profiles never step down
      CHECK(*hs.rows[t].h_lower >= prev_h);
      CHECK(s >= prev_s);
      prev_h = *hs.rows[t].h_lower;
      prev_s = s;
    }
  }
}

TEST_CASE("one multiplication moves the name length a bounded amount") {
  CHECK(bounded_difference_const(rep_by_id("unary-z"), 12) == 1);
  // a successor changes one binary digit run; two letters per block
  CHECK(bounded_difference_const(rep_by_id("binary-z-s"), 10) == 2);
}

TEST_CASE("generic elements carry honest name lengths") {
  const CayleyRep& rep = rep_by_id("lamplighter-sigma");
  MeasurementSeries se = almost_all_stats(rep, 9);

  std::vector<std::uint64_t> balls{1, 4, 10, 22, 44, 84, 155, 278, 490, 850};
  for (int r = 0; r <= 9; ++r) {
    CHECK(*se.rows[r].ball == balls[r]);
    CHECK(*se.rows[r].q <= *se.rows[r].ball);
  }
  CHECK(*se.rows[0].fraction == 1.0);  // the identity counts as generic
  CHECK(*se.rows[9].fraction >= 0.8);
  CHECK(*se.rows[7].fraction <= *se.rows[8].fraction);
  CHECK(*se.rows[8].fraction <= *se.rows[9].fraction);

  // window factors come from the data: growth estimate and length bound
  double lam = std::sqrt(850.0 / 278.0);
  CHECK(se.lambda1 == Catch::Approx(0.5 * std::log(lam) / std::log(4.0)));
  CHECK(se.lambda2 == 2.0);
  CHECK(bounded_difference_const(rep, 9) == 2);

  // a line has polynomial ball growth: short and generic coincide, refuse
  CHECK_THROWS_AS(almost_all_stats(rep_by_id("unary-z"), 8), usage_error);
  // unless the caller pins the window, in which case every name of the line
  // sits inside [0.1 d, 3 d] and the share is one
  MeasurementSeries forced = almost_all_stats(rep_by_id("unary-z"), 6, 0.1, 3.0);
  for (const SeriesRow& r : forced.rows) CHECK(*r.fraction == 1.0);
}

TEST_CASE("growth classes order totally") {
  std::vector<FunctionClass> chain{
      fn_zero(),           fn_const(),          fn_log_pow(1),      fn_log_pow(2),
      fn_poly_log(1, 2),   fn_poly_log(1, 2, 1), fn_poly_log(1, 1),  fn_poly_log(1, 1, 1),
      fn_poly_log(3, 2),   fn_poly_log(2, 1),   fn_poly_log(5, 2),  fn_poly_log(3, 1),
      fn_exp()};
  for (std::size_t i = 0; i < chain.size(); ++i)
    for (std::size_t j = 0; j < chain.size(); ++j) {
      Ordering o = coarse_compare(chain[i], chain[j]);
      if (i < j) CHECK(o == Ordering::StrictlyLess);
      if (i == j) CHECK(o == Ordering::Equal);
      if (i > j) CHECK(o == Ordering::StrictlyGreater);
    }

  // factories normalize: reduced fractions, degenerate exponents collapse
  CHECK(fn_poly_log(2, 4) == fn_poly_log(1, 2));
  CHECK(fn_poly_log(0, 3, 2) == fn_log_pow(2));
  CHECK(fn_poly_log(0, 5) == fn_const());
  CHECK(fn_log_pow(0) == fn_const());
  CHECK(fn_identity() == fn_poly_log(3, 3));
  CHECK_THROWS_AS(fn_poly_log(-1, 2), usage_error);
  CHECK_THROWS_AS(fn_poly_log(1, 0), usage_error);
  CHECK_THROWS_AS(fn_log_pow(-1), usage_error);
}

TEST_CASE("growth classes parse and print") {
  for (const char* s : {"zero", "const", "log", "log^3", "poly:2", "poly:1/2", "poly:3*log",
                        "poly:2/3*log^2", "exp"})
    CHECK(function_class_str(parse_function_class(s)) == s);
  CHECK(parse_function_class("identity") == fn_identity());
  CHECK(function_class_str(parse_function_class("poly:4/2")) == "poly:2");
  CHECK(function_class_str(parse_function_class("poly:0*log")) == "log");
  for (const char* s : {"bogus", "poly:", "poly:1/0", "log^x", "poly:1*lug"})
    CHECK_THROWS_AS(parse_function_class(s), usage_error);
}

TEST_CASE("area lower bounds read off the deviation class") {
  CHECK(*dehn_lower_bound(parse_function_class("poly:3")) == parse_function_class("poly:1/3"));
  CHECK(*dehn_lower_bound(parse_function_class("poly:5/2")) == parse_function_class("poly:1/5"));
  CHECK(*dehn_lower_bound(parse_function_class("poly:4")) == parse_function_class("poly:1/2"));
  CHECK(*dehn_lower_bound(fn_exp()) == fn_identity());
  CHECK_FALSE(dehn_lower_bound(parse_function_class("poly:2")).has_value());
  CHECK_FALSE(dehn_lower_bound(fn_identity()).has_value());
  CHECK_THROWS_AS(dehn_lower_bound(fn_const()), usage_error);
  CHECK_THROWS_AS(dehn_lower_bound(fn_log_pow(1)), usage_error);
  CHECK_THROWS_AS(dehn_lower_bound(parse_function_class("poly:3*log")), usage_error);
}

TEST_CASE("superadditivity splits the classes") {
  for (const FunctionClass& f : {fn_identity(), fn_exp(), fn_poly_log(3, 2), fn_zero()}) {
    SuperadditivityResult r = superadditivity_check(f);
    CHECK(r.holds);
    CHECK(r.n0 == 1);
  }
  for (const FunctionClass& f : {fn_const(), fn_log_pow(1), fn_log_pow(2), fn_poly_log(1, 2)}) {
    SuperadditivityResult r = superadditivity_check(f);
    CHECK_FALSE(r.holds);
    auto [x, y] = r.counterexample;
    REQUIRE(x >= 1);
    REQUIRE(y == x);
    // the returned pair really does break the inequality
    double lhs = detail::fn_eval(f, double(x)) + detail::fn_eval(f, double(y));
    CHECK(lhs > detail::fn_eval(f, double(x + y)));
  }
  CHECK(superadditivity_check(fn_const()).counterexample == std::pair<long long, long long>{1, 1});
  CHECK(superadditivity_check(fn_log_pow(1)).counterexample.first >= 3);
}

TEST_CASE("series export to csv and json") {
  MeasurementSeries se = measure_h(rep_by_id("unary-z"), 2);
  CHECK(series_csv(se) ==
        "n,h_lower,h_upper,s,L_count,ball,Q,fraction\n"
        "0,0,0,,1,,,\n"
        "1,0,0,,3,,,\n"
        "2,0,0,,5,,,\n");

  Json j = series_json(se);
  CHECK(j["rep"] == "unary-z");
  CHECK(j["kind"] == "h");
  CHECK(j["exhaustive"] == true);
  CHECK(j["caps"]["words"] == 4'000'000);
  CHECK(j["rows"].size() == 3);
  CHECK(j["rows"][2]["h_lower"] == "0");
  CHECK(j["rows"][2]["L_count"] == "5");
  CHECK_FALSE(j.contains("lambda"));

  Json aa = series_json(almost_all_stats(rep_by_id("lamplighter-sigma"), 4));
  CHECK(aa["lambda"].contains("low"));
  CHECK(aa["rows"][0]["fraction"] == 1.0);
  CHECK(aa["rows"][4]["ball"] == 44);

  MeasurementSeries ss = measure_s(rep_by_id("unary-z"), 2);
  CHECK(series_csv(ss) ==
        "n,h_lower,h_upper,s,L_count,ball,Q,fraction\n"
        "0,,,0,,,,\n"
        "1,,,1,,,,\n"
        "2,,,1,,,,\n");
}

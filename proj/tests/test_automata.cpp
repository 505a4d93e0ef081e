#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>
#include <set>

#include "cayley/alphabet.hpp"
#include "cayley/automaton.hpp"
#include "cayley/automaton_ops.hpp"
#include "helpers.hpp"

using namespace cayley;
using namespace testutil;

namespace {

Alphabet ab() { return Alphabet::atoms({"a", "b"}); }

Word w(std::initializer_list<Sym> v) { return Word(v); }

}  // namespace

TEST_CASE("alphabet codes round-trip and exclude the all-pad tuple") {
  std::mt19937 rng(20240601);
  for (int iter = 0; iter < 400; ++iter) {
    std::uniform_int_distribution<int> nd(1, 5), kd(1, 4);
    int n = nd(rng), k = kd(rng);
    std::vector<std::string> atoms;
    for (int i = 0; i < n; ++i) atoms.push_back(std::string(1, char('a' + i)));
    Alphabet base = Alphabet::atoms(atoms);
    Alphabet conv = Alphabet::tuple(base, k);

    // oracle: count tuples over {0..n} minus the all-pad one by odometer
    std::vector<Sym> dig(k, 0);
    std::uint64_t count = 0;
    for (;;) {
      bool allpad = true;
      for (Sym d : dig)
        if (d != static_cast<Sym>(n)) allpad = false;
      if (!allpad) ++count;
      int i = k - 1;
      while (i >= 0 && dig[i] == static_cast<Sym>(n)) dig[i--] = 0;
      if (i < 0) break;
      ++dig[i];
    }
    REQUIRE(conv.size() == count);

    std::uniform_int_distribution<Sym> cd(0, conv.size() - 1);
    for (int j = 0; j < 20; ++j) {
      Sym code = cd(rng);
      auto digits = conv.decode(code);
      REQUIRE(digits.size() == static_cast<std::size_t>(k));
      REQUIRE(conv.encode(digits) == code);
    }
    REQUIRE_THROWS(conv.encode(std::vector<Sym>(k, static_cast<Sym>(n))));
  }
}

TEST_CASE("convolve and deconvolve are inverse on random tracks") {
  std::mt19937 rng(7);
  Alphabet base = Alphabet::atoms({"x", "y", "z"});
  for (int iter = 0; iter < 10000; ++iter) {
    std::uniform_int_distribution<int> kd(1, 4), ld(0, 6);
    std::uniform_int_distribution<Sym> sd(0, 2);
    int k = kd(rng);
    std::vector<Word> tracks(k);
    std::size_t maxlen = 0;
    for (auto& t : tracks) {
      int len = ld(rng);
      for (int i = 0; i < len; ++i) t.push_back(sd(rng));
      maxlen = std::max(maxlen, t.size());
    }
    Word conv = convolve(tracks, base);
    REQUIRE(conv.size() == maxlen);
    auto back = deconvolve(conv, k == 1 ? base : Alphabet::tuple(base, k));
    REQUIRE(back == tracks);
  }
  // pad followed by data on a track is not a convolution
  Alphabet conv2 = Alphabet::tuple(base, 2);
  Word bad = {conv2.encode({0, 3}), conv2.encode({0, 1})};
  REQUIRE_THROWS(deconvolve(bad, conv2));
}

TEST_CASE("determinize matches subset-simulation oracle on the a|ab automaton") {
  // residuals of {a, ab}: after epsilon {a,ab}, after a {eps,b}, after ab
  // {eps}; three live classes, so the minimal partial automaton has 3 states
  Nfa n(ab());
  State s0 = n.add_state(false);
  State s1 = n.add_state(true);
  State s2 = n.add_state(false);
  State s3 = n.add_state(true);
  n.initial.push_back(s0);
  n.add_edge(s0, 0, s1);
  n.add_edge(s0, 0, s2);
  n.add_edge(s2, 1, s3);

  Dfa d = determinize(n);
  REQUIRE(oracle_lang(d, 6) == oracle_nfa_lang(n, 6));
  Dfa m = minimize(d);
  REQUIRE(m.states == 3);
  REQUIRE(oracle_lang(m, 6) == oracle_nfa_lang(n, 6));
  REQUIRE(sorted_words(oracle_lang(m, 6)) == sorted_words({w({0}), w({0, 1})}));
}

TEST_CASE("determinize and minimize preserve random NFA languages") {
  std::mt19937 rng(99);
  for (int iter = 0; iter < 120; ++iter) {
    Nfa n = random_nfa(rng, ab(), 5, 10, 2);
    Dfa d = determinize(n);
    Dfa m = minimize(d);
    auto want = oracle_nfa_lang(n, 7);
    REQUIRE(oracle_lang(d, 7) == want);
    REQUIRE(oracle_lang(m, 7) == want);
    REQUIRE(m.states <= std::max<State>(d.states, 1));
    Dfa m2 = minimize(m);
    REQUIRE(m2.states == m.states);
    // canonical numbering makes repeated minimization structurally equal
    REQUIRE(m2.next == m.next);
    REQUIRE(m2.accepting == m.accepting);
  }
}

TEST_CASE("for_each_word agrees with the brute walk and respects order") {
  std::mt19937 rng(31337);
  for (int iter = 0; iter < 60; ++iter) {
    Nfa n = random_nfa(rng, ab(), 5, 9, 1);
    Dfa d = determinize(n);
    auto got = enumerate_upto(d, 6);
    auto want = oracle_lang(d, 6);
    std::stable_sort(want.begin(), want.end(), [](const Word& x, const Word& y) {
      if (x.size() != y.size()) return x.size() < y.size();
      return x < y;
    });
    REQUIRE(got == want);
  }
}

TEST_CASE("set operations match set algebra on enumerations") {
  std::mt19937 rng(4242);
  for (int iter = 0; iter < 80; ++iter) {
    Dfa a = determinize(random_nfa(rng, ab(), 4, 8));
    Dfa b = determinize(random_nfa(rng, ab(), 4, 8));
    std::set<Word> sa, sb;
    for (auto& x : oracle_lang(a, 7)) sa.insert(x);
    for (auto& x : oracle_lang(b, 7)) sb.insert(x);

    auto check = [&](SetOp op, const std::set<Word>& want) {
      Dfa c = combine(op, a, b);
      std::set<Word> got;
      for (auto& x : oracle_lang(c, 7)) got.insert(x);
      REQUIRE(got == want);
    };
    std::set<Word> u = sa, i, d;
    u.insert(sb.begin(), sb.end());
    std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(),
                          std::inserter(i, i.begin()));
    std::set_difference(sa.begin(), sa.end(), sb.begin(), sb.end(),
                        std::inserter(d, d.begin()));
    check(SetOp::Union, u);
    check(SetOp::Intersect, i);
    check(SetOp::Difference, d);

    REQUIRE(language_subset(a, b) == !language_nonempty(difference(a, b)));
    REQUIRE(language_subset(a, union_lang(a, b)));
    REQUIRE(language_subset(intersect(a, b), a));
    REQUIRE(language_equal(a, a));
    REQUIRE(language_equal(union_lang(a, b), union_lang(b, a)));
  }
}

TEST_CASE("conv_join computes the relational join on finite fixtures") {
  std::mt19937 rng(555);
  Alphabet base = Alphabet::atoms({"a", "b"});
  Alphabet pair = Alphabet::tuple(base, 2);
  Alphabet triple = Alphabet::tuple(base, 3);

  auto random_word = [&](int maxlen) {
    std::uniform_int_distribution<int> ld(0, maxlen);
    std::uniform_int_distribution<Sym> sd(0, 1);
    Word w;
    int len = ld(rng);
    for (int i = 0; i < len; ++i) w.push_back(sd(rng));
    return w;
  };

  for (int iter = 0; iter < 40; ++iter) {
    std::set<std::pair<Word, Word>> r1, r2;
    for (int i = 0; i < 12; ++i) r1.emplace(random_word(3), random_word(3));
    for (int i = 0; i < 12; ++i) r2.emplace(random_word(3), random_word(3));

    std::vector<Word> conv1, conv2;
    for (auto& [u, v] : r1) conv1.push_back(convolve({u, v}, base));
    for (auto& [u, v] : r2) conv2.push_back(convolve({u, v}, base));
    Dfa d1 = literal_dfa(pair, conv1);
    Dfa d2 = literal_dfa(pair, conv2);

    // join on the middle coordinate
    Dfa j = conv_join(d1, {0, 1}, d2, {1, 2}, 3);
    std::vector<Word> want;
    for (auto& [u, v] : r1)
      for (auto& [x, y] : r2)
        if (v == x) want.push_back(convolve({u, v, y}, base));
    REQUIRE(sorted_words(oracle_lang(j, 10)) == sorted_words(want));

    // intersection as a join on both coordinates
    Dfa both = conv_join(d1, {0, 1}, d2, {0, 1}, 2);
    std::vector<Word> wboth;
    for (auto& [u, v] : r1)
      if (r2.count({u, v})) wboth.push_back(convolve({u, v}, base));
    REQUIRE(sorted_words(oracle_lang(both, 10)) == sorted_words(wboth));
  }

  // cylindrification against an infinite third coordinate
  Dfa d1 = literal_dfa(pair, {convolve({w({0}), w({0, 1, 1})}, base),
                              convolve({w({1, 1}), Word{}}, base)});
  Dfa ev;  // (ab)*
  {
    Dfa t(base);
    State q0 = t.add_state(true);
    State q1 = t.add_state(false);
    t.add_edge(q0, 0, q1);
    t.add_edge(q1, 1, q0);
    t.sort_edges();
    ev = t;
  }
  Dfa cyl = conv_join(d1, {0, 1}, ev, {2}, 3);
  std::vector<Word> want;
  for (auto& ww : oracle_lang(ev, 5)) {
    Word c1 = convolve({w({0}), w({0, 1, 1}), ww}, base);
    Word c2 = convolve({w({1, 1}), Word{}, ww}, base);
    if (c1.size() <= 5) want.push_back(c1);
    if (c2.size() <= 5) want.push_back(c2);
  }
  REQUIRE(sorted_words(oracle_lang(cyl, 5)) == sorted_words(want));
}

TEST_CASE("project drops a track and keeps suffix padding legal") {
  Alphabet base = Alphabet::atoms({"a", "b"});
  Alphabet pair = Alphabet::tuple(base, 2);
  // includes pairs where the surviving track is shorter, so dropped-track
  // tails become epsilon moves
  std::vector<std::pair<Word, Word>> rel = {
      {w({0, 1, 1}), w({1})}, {w({0}), w({0, 0})}, {Word{}, w({1, 1})}, {w({1, 0}), Word{}}};
  std::vector<Word> conv;
  for (auto& [u, v] : rel) conv.push_back(convolve({u, v}, base));
  Dfa d = literal_dfa(pair, conv);

  Dfa p0 = project_min(d, 0);
  std::vector<Word> want0;
  for (auto& [u, v] : rel) want0.push_back(v);
  REQUIRE(sorted_words(oracle_lang(p0, 8)) == sorted_words(want0));

  Dfa p1 = project_min(d, 1);
  std::vector<Word> want1;
  for (auto& [u, v] : rel) want1.push_back(u);
  REQUIRE(sorted_words(oracle_lang(p1, 8)) == sorted_words(want1));
}

TEST_CASE("valid_convolutions accepts exactly suffix-padded tuples") {
  Alphabet base = Alphabet::atoms({"a", "b"});
  Dfa v2 = valid_convolutions(base, 2);
  std::vector<Word> want;
  std::vector<Word> all;
  {
    Word cur;
    std::function<void()> rec = [&]() {
      all.push_back(cur);
      if (cur.size() == 4) return;
      for (Sym a = 0; a < 2; ++a) {
        cur.push_back(a);
        rec();
        cur.pop_back();
      }
    };
    rec();
  }
  for (auto& u : all)
    for (auto& vv : all) {
      Word c = convolve({u, vv}, base);
      if (c.size() <= 4) want.push_back(c);
    }
  REQUIRE(sorted_words(oracle_lang(v2, 4)) == sorted_words(want));

  Alphabet pair = Alphabet::tuple(base, 2);
  Word bad = {pair.encode({0, 2}), pair.encode({0, 0})};
  REQUIRE_FALSE(v2.accepts(bad));
}

TEST_CASE("permute_tracks and remap_syms relabel languages exactly") {
  Alphabet base = Alphabet::atoms({"a", "b"});
  Alphabet pair = Alphabet::tuple(base, 2);
  std::vector<std::pair<Word, Word>> rel = {{w({0, 1}), w({1})}, {w({1}), Word{}}};
  std::vector<Word> conv;
  for (auto& [u, v] : rel) conv.push_back(convolve({u, v}, base));
  Dfa d = literal_dfa(pair, conv);

  Dfa swapped = permute_tracks(d, {1, 0});
  std::vector<Word> want;
  for (auto& [u, v] : rel) want.push_back(convolve({v, u}, base));
  REQUIRE(sorted_words(oracle_lang(swapped, 8)) == sorted_words(want));

  Alphabet wide = Alphabet::atoms({"a", "b", "c"});
  Dfa lit = literal_dfa(base, {w({0, 1, 0})});
  Dfa moved = remap_syms(lit, wide, [](Sym s) { return s + 1; });
  REQUIRE(sorted_words(oracle_lang(moved, 5)) == sorted_words({w({1, 2, 1})}));
}

TEST_CASE("concat and star build the expected languages") {
  Alphabet base = ab();
  Dfa x = literal_dfa(base, {w({0}), w({0, 1})});
  Dfa y = literal_dfa(base, {w({1})});
  REQUIRE(sorted_words(oracle_lang(concat_lang(x, y), 6)) ==
          sorted_words({w({0, 1}), w({0, 1, 1})}));

  Dfa s = star_lang(literal_dfa(base, {w({0, 1})}));
  std::vector<Word> want = {Word{}, w({0, 1}), w({0, 1, 0, 1}), w({0, 1, 0, 1, 0, 1})};
  REQUIRE(sorted_words(oracle_lang(s, 6)) == sorted_words(want));
}

TEST_CASE("count_by_length matches brute enumeration") {
  std::mt19937 rng(2718);
  for (int iter = 0; iter < 40; ++iter) {
    Dfa d = determinize(random_nfa(rng, ab(), 5, 9));
    auto counts = count_by_length(d, 8);
    std::map<std::size_t, Int> want;
    for (auto& word : oracle_lang(d, 8)) want[word.size()] += 1;
    for (std::size_t k = 0; k <= 8; ++k) REQUIRE(counts[k] == want[k]);
  }
  // (a|b)* doubles each length
  Dfa all = universal_dfa(ab());
  auto counts = count_by_length(all, 20);
  Int pow = 1;
  for (std::size_t k = 0; k <= 20; ++k, pow *= 2) REQUIRE(counts[k] == pow);
}

TEST_CASE("shortest_accepted finds a witness of minimal length") {
  Alphabet base = ab();
  REQUIRE(shortest_accepted(literal_dfa(base, {w({0, 1}), w({1})})) == Word{w({1})});
  REQUIRE_FALSE(shortest_accepted(empty_dfa(base)).has_value());
  REQUIRE(shortest_accepted(epsilon_dfa(base)) == Word{});

  std::mt19937 rng(123);
  for (int iter = 0; iter < 40; ++iter) {
    Dfa d = determinize(random_nfa(rng, base, 5, 8));
    auto counts = count_by_length(d, 12);
    std::optional<std::size_t> firstlen;
    for (std::size_t k = 0; k <= 12; ++k)
      if (counts[k] > 0) {
        firstlen = k;
        break;
      }
    auto witness = shortest_accepted(d);
    if (firstlen) {
      REQUIRE(witness.has_value());
      REQUIRE(witness->size() == *firstlen);
      REQUIRE(d.accepts(*witness));
    }
  }
}

TEST_CASE("growth classification on hand-derived fixtures") {
  Alphabet base = ab();

  // finite language
  REQUIRE(classify_growth(literal_dfa(base, {w({0, 1}), w({1})})) == GrowthClass{false, -1});
  REQUIRE(classify_growth(empty_dfa(base)) == GrowthClass{false, -1});

  // a*: one cycle component, counts are constant
  Dfa astar(base);
  astar.add_state(true);
  astar.add_edge(0, 0, 0);
  astar.sort_edges();
  REQUIRE(classify_growth(astar) == GrowthClass{false, 0});

  // a*b*: two chained cycles, counts grow linearly
  Dfa ab2(base);
  ab2.add_state(true);
  ab2.add_state(true);
  ab2.add_edge(0, 0, 0);
  ab2.add_edge(0, 1, 1);
  ab2.add_edge(1, 1, 1);
  ab2.sort_edges();
  REQUIRE(classify_growth(ab2) == GrowthClass{false, 1});

  // a*ba*ba*: quadratic
  Dfa a3(base);
  for (int i = 0; i < 3; ++i) a3.add_state(i == 2);
  for (int i = 0; i < 3; ++i) a3.add_edge(i, 0, i);
  a3.add_edge(0, 1, 1);
  a3.add_edge(1, 1, 2);
  a3.sort_edges();
  REQUIRE(classify_growth(a3) == GrowthClass{false, 2});

  // two letters looping on one state
  REQUIRE(classify_growth(universal_dfa(base)).exponential);

  // branching inside one strongly connected component: (ab|b)* style
  Dfa br(base);
  br.add_state(true);
  br.add_state(false);
  br.add_edge(0, 0, 1);
  br.add_edge(0, 1, 0);
  br.add_edge(1, 1, 0);
  br.sort_edges();
  REQUIRE(classify_growth(br).exponential);

  // numeric cross-check: polynomial fixtures stay under a fitted n^d bound
  // and the exponential fixture overtakes any such bound
  auto counts_poly = count_by_length(a3, 60);
  for (std::size_t n = 3; n <= 60; ++n) {
    Int bound = Int(n) * Int(n);
    REQUIRE(counts_poly[n] <= bound);
    // quadratic from below: (n-2 choose 2) placements of the two b letters
    Int low = Int(n - 2) * Int(n - 1) / 4;
    REQUIRE(counts_poly[n] >= low / 2);
  }
  auto counts_exp = count_by_length(universal_dfa(base), 40);
  REQUIRE(counts_exp[40] > Int(40) * Int(40) * Int(40) * Int(40) * Int(40));
}

TEST_CASE("growth classification agrees with independent oracles on random automata") {
  std::mt19937 rng(8086);
  auto npow = [](std::size_t n, long long d) {
    Int p = 1;
    for (long long i = 0; i < d; ++i) p *= Int(n);
    return p;
  };
  for (int iter = 0; iter < 60; ++iter) {
    Dfa d = minimize(determinize(random_nfa(rng, ab(), 4, 8)));
    GrowthClass g = classify_growth(d);
    REQUIRE(g.exponential == oracle_exponential(d));
    if (g.exponential) continue;

    auto counts = count_by_length(d, 224);
    if (g.degree == -1) {
      // a live cycle would show a word longer than the state count
      for (std::size_t n = 17; n <= 224; ++n) REQUIRE(counts[n] == 0);
      continue;
    }
    // Reported degree d means counts[n] ~ n^d along a quasi-period.  Fit the
    // constant on an early window wide enough to contain every residue class
    // and check both directions, with margin, on a late window.  A degree off
    // by one would shift the late ratios by about 180/36 = 5x, past the 2x
    // and 4x margins used here.  High degrees converge too slowly for the
    // margins, so the numeric check stops at 4.
    if (g.degree > 4) continue;
    Int kup = 1;
    for (std::size_t n = 20; n <= 52; ++n) {
      Int nd = npow(n, g.degree);
      Int need = (counts[n] + nd - 1) / nd;
      if (need > kup) kup = need;
    }
    Int early_max = 0, late_max = 0;
    const Int SCALE = 1000000;
    for (std::size_t n = 20; n <= 52; ++n)
      early_max = std::max(early_max, Int(counts[n] * SCALE / npow(n, g.degree)));
    for (std::size_t n = 160; n <= 224; ++n) {
      Int nd = npow(n, g.degree);
      REQUIRE(counts[n] <= 2 * kup * nd);
      late_max = std::max(late_max, Int(counts[n] * SCALE / nd));
    }
    REQUIRE(late_max * 4 >= early_max);
  }
}

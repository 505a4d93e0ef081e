#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "cayley/automaton.hpp"
#include "cayley/automaton_ops.hpp"
#include "cayley/common.hpp"
#include "cayley/group.hpp"
#include "cayley/json_io.hpp"
#include "cayley/metrics.hpp"
#include "cayley/representation.hpp"

namespace cayley {

// ---------------------------------------------------------------------------
// Symbolic growth classes: zero, constants, log powers, n^(p/q) log^a n, and
// exponential, totally ordered by eventual domination.

enum class FnKind { Zero, Const, LogPow, PolyLog, Exp };

struct FunctionClass {
  FnKind kind = FnKind::Zero;
  long long num = 0, den = 1;  // exponent of n, as a reduced fraction
  long long lg = 0;            // exponent of the log factor
  friend bool operator==(const FunctionClass&, const FunctionClass&) = default;
};

inline FunctionClass fn_zero() { return {FnKind::Zero, 0, 1, 0}; }
inline FunctionClass fn_const() { return {FnKind::Const, 0, 1, 0}; }

inline FunctionClass fn_log_pow(long long a) {
  if (a < 0) throw usage_error("log exponent must be nonnegative");
  if (a == 0) return fn_const();
  return {FnKind::LogPow, 0, 1, a};
}

inline FunctionClass fn_poly_log(long long num, long long den, long long a = 0) {
  if (den == 0) throw usage_error("polynomial exponent needs a nonzero denominator");
  if (den < 0) {
    den = -den;
    num = -num;
  }
  if (num < 0) throw usage_error("polynomial exponent must be nonnegative");
  if (a < 0) throw usage_error("log exponent must be nonnegative");
  if (num == 0) return a == 0 ? fn_const() : fn_log_pow(a);
  long long g = std::gcd(num, den);
  return {FnKind::PolyLog, num / g, den / g, a};
}

inline FunctionClass fn_identity() { return fn_poly_log(1, 1); }
inline FunctionClass fn_exp() { return {FnKind::Exp, 0, 1, 0}; }

enum class Ordering { StrictlyLess, Equal, StrictlyGreater };

inline Ordering coarse_compare(const FunctionClass& f, const FunctionClass& g) {
  auto rank = [](FnKind k) {
    switch (k) {
      case FnKind::Zero: return 0;
      case FnKind::Const: return 1;
      case FnKind::LogPow: return 2;
      case FnKind::PolyLog: return 3;
      case FnKind::Exp: return 4;
    }
    return 0;
  };
  auto out = [](long long a, long long b) {
    return a < b ? Ordering::StrictlyLess : Ordering::StrictlyGreater;
  };
  if (rank(f.kind) != rank(g.kind)) return out(rank(f.kind), rank(g.kind));
  if (f.kind == FnKind::LogPow && f.lg != g.lg) return out(f.lg, g.lg);
  if (f.kind == FnKind::PolyLog) {
    // cross-multiplied exponent compare, then the log factor breaks ties
    Int l = Int(f.num) * g.den, r = Int(g.num) * f.den;
    if (l != r) return l < r ? Ordering::StrictlyLess : Ordering::StrictlyGreater;
    if (f.lg != g.lg) return out(f.lg, g.lg);
  }
  return Ordering::Equal;
}

inline std::string function_class_str(const FunctionClass& f) {
  switch (f.kind) {
    case FnKind::Zero: return "zero";
    case FnKind::Const: return "const";
    case FnKind::LogPow: return f.lg == 1 ? "log" : "log^" + std::to_string(f.lg);
    case FnKind::Exp: return "exp";
    case FnKind::PolyLog: {
      std::string s = "poly:" + std::to_string(f.num);
      if (f.den != 1) s += "/" + std::to_string(f.den);
      if (f.lg > 0) s += f.lg == 1 ? "*log" : "*log^" + std::to_string(f.lg);
      return s;
    }
  }
  return "zero";
}

namespace detail {

inline long long parse_ll(const std::string& s) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    throw usage_error("expected an integer, got '" + s + "'");
  }
  if (pos != s.size()) throw usage_error("expected an integer, got '" + s + "'");
  return v;
}

inline long long parse_log_factor(const std::string& t) {
  if (t == "log") return 1;
  if (t.rfind("log^", 0) == 0) return parse_ll(t.substr(4));
  throw usage_error("expected a log factor, got '" + t + "'");
}

}  // namespace detail

inline FunctionClass parse_function_class(const std::string& s) {
  if (s == "zero") return fn_zero();
  if (s == "const") return fn_const();
  if (s == "exp") return fn_exp();
  if (s == "identity") return fn_identity();
  if (s.rfind("log", 0) == 0) return fn_log_pow(detail::parse_log_factor(s));
  if (s.rfind("poly:", 0) == 0) {
    std::string rest = s.substr(5), core = rest, logpart;
    if (auto star = rest.find('*'); star != std::string::npos) {
      core = rest.substr(0, star);
      logpart = rest.substr(star + 1);
    }
    long long num, den = 1;
    if (auto slash = core.find('/'); slash != std::string::npos) {
      num = detail::parse_ll(core.substr(0, slash));
      den = detail::parse_ll(core.substr(slash + 1));
    } else {
      num = detail::parse_ll(core);
    }
    long long a = logpart.empty() ? 0 : detail::parse_log_factor(logpart);
    return fn_poly_log(num, den, a);
  }
  throw usage_error("unrecognized growth class '" + s + "'");
}

// ---------------------------------------------------------------------------
// Consequences of a deviation class.

// Isoperimetric lower bound read off the deviation class: a pure power n^a
// with a > 2 forces area at least n^((a-2)/a), exponential deviation forces
// linear area. At quadratic or below the argument says nothing.
inline std::optional<FunctionClass> dehn_lower_bound(const FunctionClass& f) {
  if (f.kind == FnKind::Exp) return fn_identity();
  if (f.kind == FnKind::PolyLog && f.lg == 0) {
    if (f.num <= 2 * f.den) return std::nullopt;
    return fn_poly_log(f.num - 2 * f.den, f.num);
  }
  throw usage_error("isoperimetric table covers pure powers n^d and exponential only");
}

struct SuperadditivityResult {
  bool holds = false;
  long long n0 = 0;  // f(x+y) >= f(x) + f(y) whenever x, y >= n0
  std::pair<long long, long long> counterexample{0, 0};
};

namespace detail {

inline double fn_eval(const FunctionClass& f, double x) {
  switch (f.kind) {
    case FnKind::Zero: return 0.0;
    case FnKind::Const: return 1.0;
    case FnKind::LogPow: return std::pow(std::log(x), static_cast<double>(f.lg));
    case FnKind::PolyLog:
      return std::pow(x, static_cast<double>(f.num) / static_cast<double>(f.den)) *
             std::pow(std::log(x), static_cast<double>(f.lg));
    case FnKind::Exp: return std::exp2(std::min(x, 1000.0));
  }
  return 0.0;
}

}  // namespace detail

// Powers n^a with a >= 1 are superadditive from 1 on (the log factor only
// helps, being monotone); so is 2^n, and the zero function trivially. The
// rest fail somewhere, and a doubling scan finds a failing pair.
inline SuperadditivityResult superadditivity_check(const FunctionClass& f) {
  SuperadditivityResult r;
  if (f.kind == FnKind::Zero || f.kind == FnKind::Exp ||
      (f.kind == FnKind::PolyLog && f.num >= f.den)) {
    r.holds = true;
    r.n0 = 1;
    return r;
  }
  for (long long x = 1; x <= (1LL << 40); x = x < 64 ? x + 1 : 2 * x) {
    double fx = detail::fn_eval(f, static_cast<double>(x));
    double f2 = detail::fn_eval(f, static_cast<double>(2 * x));
    if (fx + fx > f2 + 1e-9) {
      r.counterexample = {x, x};
      return r;
    }
  }
  throw usage_error("no superadditivity counterexample found below 2^41");
}

// ---------------------------------------------------------------------------
// Measurement series: one row per radius, sparse columns.

struct SeriesRow {
  int n = 0;
  std::optional<Int> h_lower, h_upper;  // deviation bounds at this radius
  std::optional<Int> s;                 // fellow-traveler spread
  std::optional<Int> words;             // names of length <= n
  std::optional<std::uint64_t> ball, q;
  std::optional<double> fraction;
};

struct MeasurementSeries {
  std::string rep;
  std::string kind;        // "h", "s" or "almost-all"
  bool exhaustive = true;  // false when rows come from sampled names
  double lambda1 = 0, lambda2 = 0;
  std::uint64_t cap_words = 0, cap_ball = 0;
  std::vector<SeriesRow> rows;
};

namespace detail {

inline std::string int_str(const Int& v) {
  std::ostringstream o;
  o << v;
  return o.str();
}

}  // namespace detail

inline std::string series_csv(const MeasurementSeries& se) {
  std::ostringstream out;
  out << "n,h_lower,h_upper,s,L_count,ball,Q,fraction\n";
  for (const SeriesRow& r : se.rows) {
    out << r.n << ',';
    if (r.h_lower) out << *r.h_lower;
    out << ',';
    if (r.h_upper) out << *r.h_upper;
    out << ',';
    if (r.s) out << *r.s;
    out << ',';
    if (r.words) out << *r.words;
    out << ',';
    if (r.ball) out << *r.ball;
    out << ',';
    if (r.q) out << *r.q;
    out << ',';
    if (r.fraction) out << std::fixed << std::setprecision(6) << *r.fraction;
    out << '\n';
  }
  return out.str();
}

inline Json series_json(const MeasurementSeries& se) {
  Json rows = Json::array();
  for (const SeriesRow& r : se.rows) {
    Json o;
    o["n"] = r.n;
    if (r.h_lower) o["h_lower"] = detail::int_str(*r.h_lower);
    if (r.h_upper) o["h_upper"] = detail::int_str(*r.h_upper);
    if (r.s) o["s"] = detail::int_str(*r.s);
    if (r.words) o["L_count"] = detail::int_str(*r.words);
    if (r.ball) o["ball"] = *r.ball;
    if (r.q) o["Q"] = *r.q;
    if (r.fraction) o["fraction"] = *r.fraction;
    rows.push_back(std::move(o));
  }
  Json j;
  j["rep"] = se.rep;
  j["kind"] = se.kind;
  j["exhaustive"] = se.exhaustive;
  j["caps"] = Json{{"words", se.cap_words}, {"ball", se.cap_ball}};
  if (se.kind == "almost-all") j["lambda"] = Json{{"low", se.lambda1}, {"high", se.lambda2}};
  j["rows"] = std::move(rows);
  return j;
}

struct MeasureOptions {
  std::uint64_t cap_words = 4'000'000;
  std::uint64_t cap_ball = 1'000'000;
  std::uint64_t frontier_cap = 4'000'000;
  int oracle_radius = 24;
  bool sample = false;  // measure a per-length sample instead of everything
  std::uint64_t samples_per_length = 512;
  std::uint64_t seed = 1;
};

namespace detail {

inline Elem walk_elem(const Group& g, const std::vector<int>& letters, const Word& w) {
  Elem e = g.identity();
  for (Sym c : w) e = g.multiply(e, g.letter(letters[static_cast<std::size_t>(c)]));
  return e;
}

// Uniform accepted words of one exact length, drawn by suffix counts. Each
// draw picks an index below the count and walks the unique matching path.
inline std::vector<Word> sample_exact_length(const Dfa& d, int m, std::uint64_t want,
                                             std::mt19937_64& rng) {
  std::vector<std::vector<Int>> cnt(static_cast<std::size_t>(m) + 1,
                                    std::vector<Int>(d.states, Int(0)));
  for (State s = 0; s < d.states; ++s) cnt[0][s] = d.accepting[s] ? 1 : 0;
  for (int t = 1; t <= m; ++t)
    for (State s = 0; s < d.states; ++s) {
      Int acc = 0;
      for (auto [a, to] : d.next[s]) acc += cnt[static_cast<std::size_t>(t) - 1][to];
      cnt[static_cast<std::size_t>(t)][s] = std::move(acc);
    }
  std::vector<Word> out;
  if (d.states == 0) return out;
  const Int& total = cnt[static_cast<std::size_t>(m)][d.initial];
  if (total == 0) return out;
  unsigned bits = 0;
  for (Int t = total; t > 0; t >>= 1) ++bits;
  auto draw = [&]() {
    for (;;) {
      Int r = 0;
      for (unsigned got = 0; got < bits; got += 32) {
        r <<= 32;
        r += static_cast<std::uint32_t>(rng());
      }
      r &= (Int(1) << bits) - 1;
      if (r < total) return r;
    }
  };
  for (std::uint64_t i = 0; i < want; ++i) {
    Int idx = draw();
    Word w;
    State s = d.initial;
    for (int t = m; t > 0; --t) {
      for (auto [a, to] : d.next[s]) {
        const Int& c = cnt[static_cast<std::size_t>(t) - 1][to];
        if (idx < c) {
          w.push_back(a);
          s = to;
          break;
        }
        idx -= c;
      }
    }
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace detail

// Deviation of one name: distance between the walk spelled by the name and
// the element the name denotes.
inline DistanceBound deviation_of(const CayleyRep& rep, const Word& w, DistanceOracle& oracle) {
  const Group& g = *rep.group;
  std::vector<int> letters = sigma_letters(rep);
  Elem walk = detail::walk_elem(g, letters, w);
  return oracle.bound(g.multiply(g.inverse(walk), rep.decode(w)));
}

// Deviation profile h: for each radius m, the largest distance between a
// name's walk and its element over all names of length at most m. Distances
// come with certificates, so the profile is an interval; the upper column
// drops out as soon as one element resists certification within the caps.
inline MeasurementSeries measure_h(const CayleyRep& rep, int n, MeasureOptions opt = {}) {
  std::vector<int> letters = sigma_letters(rep);
  const Group& g = *rep.group;
  MeasurementSeries se;
  se.rep = rep.id;
  se.kind = "h";
  se.cap_words = opt.cap_words;
  se.cap_ball = opt.cap_ball;

  std::vector<std::vector<Word>> bylen(static_cast<std::size_t>(n) + 1);
  if (!opt.sample) {
    std::vector<Word> words;
    try {
      words = enumerate_upto(rep.language, static_cast<std::size_t>(n), opt.cap_words);
    } catch (const cap_exceeded&) {
      throw cap_exceeded("more than " + std::to_string(opt.cap_words) + " names up to length " +
                         std::to_string(n) + "; raise the word cap or sample (non-exhaustive)");
    }
    for (Word& w : words) {
      std::size_t len = w.size();
      bylen[len].push_back(std::move(w));
    }
  } else {
    se.exhaustive = false;
    std::mt19937_64 rng(opt.seed);
    for (int m = 0; m <= n; ++m)
      bylen[static_cast<std::size_t>(m)] =
          detail::sample_exact_length(rep.language, m, opt.samples_per_length, rng);
  }

  std::vector<Int> counts = count_by_length(rep.language, static_cast<std::size_t>(n));
  DistanceOracle oracle(rep.group, opt.cap_ball, opt.oracle_radius);
  Int hl = 0, total = 0;
  std::optional<Int> hu = Int(0);
  for (int m = 0; m <= n; ++m) {
    for (const Word& w : bylen[static_cast<std::size_t>(m)]) {
      Elem walk = detail::walk_elem(g, letters, w);
      Elem delta = g.multiply(g.inverse(walk), rep.decode(w));
      if (delta == g.identity()) continue;  // walk and name agree
      DistanceBound b = oracle.bound(delta);
      if (b.lower > hl) hl = b.lower;
      if (hu) {
        if (b.upper) {
          if (*b.upper > *hu) hu = b.upper;
        } else {
          hu.reset();
        }
      }
    }
    total += counts[static_cast<std::size_t>(m)];
    SeriesRow row;
    row.n = m;
    row.h_lower = hl;
    row.h_upper = hu;
    row.words = total;
    se.rows.push_back(std::move(row));
  }
  return se;
}

// Fellow-traveler profile s: the largest distance between the two walks of a
// multiplier pair after t letters, over all pairs and t <= n. The frontier
// holds (state, offset) classes; a class met once never needs revisiting
// because later occurrences replay the same futures at larger t.
inline MeasurementSeries measure_s(const CayleyRep& rep, int n, MeasureOptions opt = {}) {
  std::vector<int> letters = sigma_letters(rep);
  const Group& g = *rep.group;
  const Alphabet& sig = rep.sigma();
  const Sym PAD = sig.pad_digit();
  std::vector<Elem> lel, linv;
  for (Sym c = 0; c < sig.size(); ++c) {
    Elem e = g.letter(letters[c]);
    linv.push_back(g.inverse(e));
    lel.push_back(std::move(e));
  }

  DistanceOracle oracle(rep.group, opt.cap_ball, opt.oracle_radius);
  std::vector<Int> svals(static_cast<std::size_t>(n) + 1, Int(0));
  for (const Dfa& mult : rep.mult) {
    Dfa M = trim(mult);
    const Alphabet& pair = M.alphabet;
    std::vector<std::pair<State, Elem>> cur{{M.initial, g.identity()}};
    std::unordered_set<std::string> seen{std::to_string(M.initial) + '|' +
                                         elem_key(g.identity())};
    for (int t = 1; t <= n && !cur.empty(); ++t) {
      std::vector<std::pair<State, Elem>> nxt;
      for (const auto& [st, delta] : cur)
        for (auto [cell, to] : M.next[st]) {
          std::vector<Sym> dg = pair.decode(cell);
          Elem d2 = delta;
          if (dg[0] != PAD) d2 = g.multiply(linv[dg[0]], d2);
          if (dg[1] != PAD) d2 = g.multiply(d2, lel[dg[1]]);
          std::string key = std::to_string(to) + '|' + elem_key(d2);
          if (!seen.insert(std::move(key)).second) continue;
          if (seen.size() > opt.frontier_cap)
            throw cap_exceeded("fellow-traveler frontier exceeds the configured cap");
          nxt.emplace_back(to, std::move(d2));
        }
      for (const auto& [st, delta] : nxt) {
        DistanceBound b = oracle.bound(delta);
        if (!b.exact())
          throw cap_exceeded(
              "walk offset not certified within the ball caps; raise cap_ball or oracle_radius");
        if (b.lower > svals[static_cast<std::size_t>(t)]) {
          svals[static_cast<std::size_t>(t)] = b.lower;
        }
      }
      cur = std::move(nxt);
    }
  }

  MeasurementSeries se;
  se.rep = rep.id;
  se.kind = "s";
  se.cap_words = opt.cap_words;
  se.cap_ball = opt.cap_ball;
  Int run = 0;
  for (int t = 0; t <= n; ++t) {
    if (svals[static_cast<std::size_t>(t)] > run) run = svals[static_cast<std::size_t>(t)];
    SeriesRow row;
    row.n = t;
    row.s = run;
    se.rows.push_back(std::move(row));
  }
  return se;
}

// Largest multiplier size; fellow-traveler spreads are bounded in terms of it.
inline int max_multiplier_states(const CayleyRep& rep) {
  int t = 0;
  for (const Dfa& m : rep.mult) t = std::max(t, static_cast<int>(m.states));
  return t;
}

// Largest one-step change of name length, over names of length <= k and all
// letters of the group.
inline long long bounded_difference_const(const CayleyRep& rep, int k, MeasureOptions opt = {}) {
  const Group& g = *rep.group;
  std::vector<Word> words = enumerate_upto(rep.language, static_cast<std::size_t>(k), opt.cap_words);
  long long best = 0;
  for (const Word& w : words) {
    Elem e = rep.decode(w);
    for (int l = 0; l < g.letter_count(); ++l) {
      Word v = rep.encode(g.multiply(e, g.letter(l)));
      long long d = static_cast<long long>(v.size()) - static_cast<long long>(w.size());
      best = std::max(best, d < 0 ? -d : d);
    }
  }
  return best;
}

// Share of ball elements whose name length sits inside the window
// [lambda1 * d, lambda2 * d]. The window defaults are read off the data: the
// per-step volume factor fixes lambda1, the one-step length bound lambda2.
// The identity (d = 0) counts as inside; so the radius-0 row reads 1.
inline MeasurementSeries almost_all_stats(const CayleyRep& rep, int n,
                                          std::optional<double> lam1 = std::nullopt,
                                          std::optional<double> lam2 = std::nullopt,
                                          MeasureOptions opt = {}) {
  const Group& g = *rep.group;
  Ball b = Ball::grow(rep.group, n, opt.cap_ball);
  double l1, l2;
  if (lam1 && lam2) {
    l1 = *lam1;
    l2 = *lam2;
  } else {
    if (n < 2) throw usage_error("almost-all statistics need radius at least 2");
    double ratio = static_cast<double>(b.count_upto(n)) / static_cast<double>(b.count_upto(n - 2));
    if (ratio <= 1.5)
      throw usage_error(
          "almost-all statistics: ball growth looks polynomial (#B_" + std::to_string(n) + " / #B_" +
          std::to_string(n - 2) + " = " + std::to_string(ratio) +
          "), so generic and short names coincide and the window is uninformative; pass both "
          "window factors explicitly to force the computation");
    double lam = std::sqrt(ratio);
    l1 = lam1 ? *lam1 : 0.5 * std::log(lam) / std::log(static_cast<double>(g.letter_count()));
    l2 = lam2 ? *lam2
              : std::max(1.0, static_cast<double>(bounded_difference_const(rep, n, opt)));
  }

  MeasurementSeries se;
  se.rep = rep.id;
  se.kind = "almost-all";
  se.cap_words = opt.cap_words;
  se.cap_ball = opt.cap_ball;
  se.lambda1 = l1;
  se.lambda2 = l2;

  std::vector<std::uint64_t> by_radius(static_cast<std::size_t>(n) + 1, 0);
  for (std::size_t i = 0; i < b.elems.size(); ++i) {
    int d = b.dist[i];
    bool in_q = true;
    if (d > 0) {
      auto len = static_cast<double>(rep.encode(b.elems[i]).size());
      in_q = l1 * d <= len && len <= l2 * d;
    }
    if (in_q) by_radius[static_cast<std::size_t>(d)] += 1;
  }
  std::uint64_t qrun = 0;
  for (int r = 0; r <= n; ++r) {
    qrun += by_radius[static_cast<std::size_t>(r)];
    SeriesRow row;
    row.n = r;
    row.ball = b.count_upto(r);
    row.q = qrun;
    row.fraction = static_cast<double>(qrun) / static_cast<double>(b.count_upto(r));
    se.rows.push_back(std::move(row));
  }
  return se;
}

}  // namespace cayley

#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cayley/common.hpp"
#include "cayley/group.hpp"

namespace cayley {

// Exact metric ball, breadth-first over the symmetrized generating set.
// Letters are expanded in declared order, so element order, BFS tree and all
// derived reports are deterministic.
struct Ball {
  GroupPtr group;
  int radius = 0;
  std::vector<Elem> elems;  // BFS order, elems[0] = identity
  std::vector<int> dist;
  std::vector<std::uint32_t> parent;  // BFS tree edge towards the identity
  std::vector<int> via;               // letter applied at the parent, -1 at the root
  std::unordered_map<std::string, std::uint32_t> index;  // elem_key -> position
  std::vector<std::uint64_t> cum;                        // cum[r] = #B_r

  static Ball grow(GroupPtr g, int radius, std::uint64_t cap = 2'000'000) {
    Ball b;
    b.group = std::move(g);
    b.elems.push_back(b.group->identity());
    b.dist.push_back(0);
    b.parent.push_back(0);
    b.via.push_back(-1);
    b.index.emplace(elem_key(b.elems[0]), 0);
    b.extend(radius, cap);
    return b;
  }

  // Resumes the search; nodes at the old radius are exactly the unscanned
  // frontier, so extension never revisits an edge.
  void extend(int new_radius, std::uint64_t cap = 2'000'000) {
    const Group& g = *group;
    const int nl = g.letter_count();
    for (std::size_t i = scan_; i < elems.size(); ++i) {
      if (dist[i] >= new_radius) break;
      scan_ = i + 1;
      for (int l = 0; l < nl; ++l) {
        Elem ne = g.multiply(elems[i], g.letter(l));
        std::string key = elem_key(ne);
        if (index.count(key)) continue;
        if (elems.size() >= cap) throw cap_exceeded("ball: element cap reached");
        index.emplace(std::move(key), static_cast<std::uint32_t>(elems.size()));
        dist.push_back(dist[i] + 1);
        parent.push_back(static_cast<std::uint32_t>(i));
        via.push_back(l);
        elems.push_back(std::move(ne));
      }
    }
    radius = new_radius;
    cum.assign(static_cast<std::size_t>(radius) + 1, 0);
    for (int d : dist) ++cum[d];
    for (std::size_t r = 1; r < cum.size(); ++r) cum[r] += cum[r - 1];
  }

  std::size_t size() const { return elems.size(); }
  std::uint64_t count_upto(int r) const {
    if (r < 0) return 0;
    return cum[static_cast<std::size_t>(r < radius ? r : radius)];
  }

  std::optional<std::uint32_t> find(const Elem& e) const {
    auto it = index.find(elem_key(e));
    if (it == index.end()) return std::nullopt;
    return it->second;
  }
  std::optional<int> distance_of(const Elem& e) const {
    auto i = find(e);
    if (!i) return std::nullopt;
    return dist[*i];
  }

  // Geodesic letter word from the identity to a ball element.
  std::vector<int> geodesic(const Elem& e) const {
    auto i = find(e);
    if (!i) throw usage_error("geodesic: element outside the ball");
    std::vector<int> w;
    for (std::uint32_t at = *i; via[at] >= 0; at = parent[at]) w.push_back(via[at]);
    std::reverse(w.begin(), w.end());
    return w;
  }

 private:
  std::size_t scan_ = 0;  // first index not yet expanded
};

// pi of the length-t prefix of a letter word; t past the end gives pi(w).
inline Elem path_point(const Group& g, const std::vector<int>& w, std::size_t t) {
  Elem e = g.identity();
  for (std::size_t i = 0; i < w.size() && i < t; ++i) e = g.multiply(e, g.letter(w[i]));
  return e;
}

// Certified distance interval: lower <= d(g), and d(g) <= upper when known.
// The *_by tags name the estimator that produced each side.
struct DistanceBound {
  Int lower = 0;
  std::optional<Int> upper;
  std::string lower_by = "trivial";
  std::string upper_by;
  bool exact() const { return upper && *upper == lower; }
};

namespace detail {

inline Int iabs(const Int& z) { return z < 0 ? Int(-z) : z; }

// Smallest n with n(n+1)/2 >= c; how far a quadratically-accumulating
// coordinate can get in n steps.
inline Int quad_steps(const Int& c) {
  if (c <= 0) return 0;
  Int n = boost::multiprecision::sqrt(Int(2) * c);
  while (n * (n + 1) / 2 < c) ++n;
  while (n > 0 && (n - 1) * n / 2 >= c) --n;
  return n;
}

// Cost of spelling the central element q^c: direct q letters, or a
// commutator block [s^a, p^b] = q^{ab} plus a remainder. Every candidate is
// a real word, so the minimum is a certified upper bound.
inline Int central_cost(const Int& c0) {
  Int c = iabs(c0);
  if (c == 0) return 0;
  Int best = c;
  Int r = boost::multiprecision::sqrt(c);
  for (Int a = r > 2 ? Int(r - 2) : Int(1); a <= r + 2; ++a) {
    if (a < 1) continue;
    Int b = c / a;
    Int cand = 2 * a + 2 * b + (c - a * b);
    if (cand < best) best = cand;
  }
  return best;
}

// (x, y, z) with the multiplication (x,y,z)(x',y',z') = (x+x', y+y', z+z'+xy').
// Lower: abelianization plus the quadratic bound on z, applied to both the
// element and its inverse (whose central part is z - xy). Upper: two
// constructive spellings, s^x p^y q^(z-xy) and p^y s^x q^z.
inline DistanceBound heis_triple_bound(const Int& x, const Int& y, const Int& z) {
  DistanceBound b;
  b.lower = iabs(x) + iabs(y);
  b.lower_by = "abelianization";
  Int q1 = quad_steps(iabs(z)), q2 = quad_steps(iabs(z - x * y));
  if (q1 > b.lower) {
    b.lower = q1;
    b.lower_by = "central-quadratic";
  }
  if (q2 > b.lower) {
    b.lower = q2;
    b.lower_by = "central-quadratic";
  }
  Int u1 = iabs(x) + iabs(y) + central_cost(z - x * y);
  Int u2 = iabs(x) + iabs(y) + central_cost(z);
  b.upper = u1 < u2 ? u1 : u2;
  b.upper_by = "spelling";
  return b;
}

inline DistanceBound family_distance(const Group& g, const Elem& e);

// Clears superdiagonals outward; the elementary factor for span s only
// disturbs spans beyond s, so the letter count is a certified upper bound.
inline Int ut_elimination_cost(const Group& g, const Elem& e) {
  Elem cur = e;
  Int cost = 0;
  std::vector<std::pair<int, int>> order;  // (span, coordinate), cleared in span order
  for (int i = 0; i + 1 < g.n; ++i)
    for (int j = i + 1; j < g.n; ++j) order.emplace_back(j - i, ut_index(i, j, g.n));
  std::sort(order.begin(), order.end());
  for (auto [span, idx] : order) {
    Int c = cur.v[idx];
    if (c == 0) continue;
    Elem f = g.identity();
    f.v[idx] = -c;
    cur = g.multiply(cur, f);
    cost += iabs(c);
  }
  return cost;
}

inline DistanceBound family_distance(const Group& g, const Elem& e) {
  DistanceBound b;
  switch (g.fam) {
    case Family::ZN: {
      Int s = 0;
      for (const Int& c : e.v) s += iabs(c);
      b.lower = s;
      b.upper = s;
      b.lower_by = b.upper_by = "l1-formula";
      return b;
    }
    case Family::Lamp: {
      // toggle every lit lamp once, plus the shortest walk from 0 through
      // the support ending at the cursor
      Int c = e.v[0];
      Int hi = c > 0 ? c : Int(0), lo = c < 0 ? c : Int(0);
      for (const Int& p : e.supp) {
        if (p > hi) hi = p;
        if (p < lo) lo = p;
      }
      Int right_first = hi + (hi - lo) + (c - lo);
      Int left_first = -lo + (hi - lo) + (hi - c);
      Int d = Int(e.supp.size()) + (right_first < left_first ? right_first : left_first);
      b.lower = d;
      b.upper = d;
      b.lower_by = b.upper_by = "sweep-formula";
      return b;
    }
    case Family::Heis:
      return heis_triple_bound(e.v[0], e.v[1], e.v[2]);
    case Family::UT: {
      if (g.n == 3) {
        // same multiplication law as the Heisenberg triple under
        // (x, y, z) = (a12, a23, a13)
        return heis_triple_bound(e.v[0], e.v[2], e.v[1]);
      }
      Int s = 0;
      for (const Int& c : g.abelianize(e)) s += iabs(c);
      b.lower = s;
      b.lower_by = "abelianization";
      b.upper = ut_elimination_cost(g, e);
      b.upper_by = "elimination";
      return b;
    }
    case Family::Semi: {
      const Int& y = e.v[0];
      b.lower = iabs(y);
      b.lower_by = "abelianization";
      Int direct = iabs(y);
      for (int i = 1; i <= g.n; ++i) direct += iabs(e.v[i]);
      b.upper = direct;
      b.upper_by = "shear-spelling";
      if (iabs(y) <= 64) {
        // conjugated spelling a^(A^-y zbar) t^y
        Mat p = mat_pow(g.A, g.Ainv, -y);
        std::vector<Int> zbar(e.v.begin() + 1, e.v.end());
        std::vector<Int> w = mat_apply(p, zbar);
        Int alt = iabs(y);
        for (const Int& c : w) alt += iabs(c);
        if (alt < *b.upper) b.upper = alt;
      }
      return b;
    }
    case Family::Direct: {
      DistanceBound l = family_distance(*g.g1, *e.a);
      DistanceBound r = family_distance(*g.g2, *e.b);
      b.lower = l.lower + r.lower;
      b.lower_by = "factor-sum";
      if (l.upper && r.upper) {
        b.upper = *l.upper + *r.upper;
        b.upper_by = "factor-sum";
      }
      return b;
    }
    case Family::Free: {
      // geodesics in a free product spell each syllable in full
      b.lower = 0;
      b.lower_by = "syllable-sum";
      Int up = 0;
      bool have_up = true;
      for (const auto& [f, s] : e.syll) {
        DistanceBound sb = family_distance(f == 0 ? *g.g1 : *g.g2, s);
        b.lower += sb.lower;
        if (sb.upper && have_up)
          up += *sb.upper;
        else
          have_up = false;
      }
      if (have_up) {
        b.upper = up;
        b.upper_by = "syllable-sum";
      }
      return b;
    }
    case Family::Ext:
      b.lower = 0;
      b.lower_by = "trivial";
      return b;  // search-only family
  }
  return b;
}

}  // namespace detail

// Distance queries with certificates. Family estimators answer first; when
// they leave a gap the oracle grows a BFS ball until the element is found,
// the radius limit is hit, or the ball cap trips. Missing an element of B_r
// still certifies lower > r.
class DistanceOracle {
 public:
  explicit DistanceOracle(GroupPtr g, std::uint64_t ball_cap = 2'000'000, int max_radius = 64)
      : g_(std::move(g)), cap_(ball_cap), max_radius_(max_radius) {}

  DistanceBound bound(const Elem& e) {
    std::string key = elem_key(e);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    DistanceBound b = detail::family_distance(*g_, e);
    if (!b.exact()) refine(e, b);
    memo_.emplace(std::move(key), b);
    return b;
  }

  Int lower(const Elem& e) { return bound(e).lower; }

  const Ball* current_ball() const { return ball_ ? &*ball_ : nullptr; }

 private:
  void refine(const Elem& e, DistanceBound& b) {
    if (!ball_) {
      ball_.emplace(Ball::grow(g_, 0, cap_));
    }
    for (;;) {
      if (auto d = ball_->distance_of(e)) {
        b.lower = *d;
        b.upper = *d;
        b.lower_by = b.upper_by = "bfs";
        return;
      }
      if (b.lower < ball_->radius + 1) {
        b.lower = ball_->radius + 1;
        b.lower_by = "bfs-exclusion";
      }
      if (b.upper && *b.upper <= ball_->radius) {
        // estimator upper says it must be inside, but it is not: the caller
        // fed an element outside the group generated as declared
        throw usage_error("distance oracle: certified upper contradicts BFS");
      }
      if (ball_->radius >= max_radius_ || capped_) return;
      try {
        ball_->extend(ball_->radius + 2, cap_);
      } catch (const cap_exceeded&) {
        capped_ = true;
        return;
      }
    }
  }

  GroupPtr g_;
  std::uint64_t cap_;
  int max_radius_;
  std::optional<Ball> ball_;
  bool capped_ = false;
  std::unordered_map<std::string, DistanceBound> memo_;
};

inline Ball ball(GroupPtr g, int radius, std::uint64_t cap = 2'000'000) {
  return Ball::grow(std::move(g), radius, cap);
}

inline DistanceBound distance(GroupPtr g, const Elem& e, std::uint64_t cap = 2'000'000,
                              int max_radius = 64) {
  DistanceOracle oracle(std::move(g), cap, max_radius);
  return oracle.bound(e);
}

}  // namespace cayley

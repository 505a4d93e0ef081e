#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <queue>
#include <unordered_map>
#include <vector>

#include "cayley/alphabet.hpp"
#include "cayley/common.hpp"

namespace cayley {

using State = std::uint32_t;
inline constexpr State kNoState = 0xffffffffu;

struct Nfa {
  Alphabet alphabet;
  State states = 0;
  std::vector<State> initial;
  std::vector<char> accepting;
  std::vector<std::vector<std::pair<Sym, State>>> next;
  std::vector<std::vector<State>> eps;

  explicit Nfa(Alphabet a = {}) : alphabet(std::move(a)) {}

  State add_state(bool acc = false) {
    accepting.push_back(acc ? 1 : 0);
    next.emplace_back();
    eps.emplace_back();
    return states++;
  }
  void add_edge(State s, Sym a, State t) { next[s].emplace_back(a, t); }
  void add_eps(State s, State t) { eps[s].push_back(t); }
};

// Deterministic and total after implicit sink completion: a missing
// transition is a transition to a rejecting sink.
struct Dfa {
  Alphabet alphabet;
  State states = 0;
  State initial = 0;
  std::vector<char> accepting;
  std::vector<std::vector<std::pair<Sym, State>>> next;  // sorted by symbol

  explicit Dfa(Alphabet a = {}) : alphabet(std::move(a)) {}

  State add_state(bool acc = false) {
    accepting.push_back(acc ? 1 : 0);
    next.emplace_back();
    return states++;
  }
  void add_edge(State s, Sym a, State t) { next[s].emplace_back(a, t); }
  void sort_edges() {
    for (auto& v : next) std::sort(v.begin(), v.end());
  }
  State step(State s, Sym a) const {
    const auto& v = next[s];
    auto it = std::lower_bound(v.begin(), v.end(), std::make_pair(a, State{0}));
    if (it != v.end() && it->first == a) return it->second;
    return kNoState;
  }
  bool accepts(const Word& w) const {
    State s = initial;
    for (Sym a : w) {
      s = step(s, a);
      if (s == kNoState) return false;
    }
    return accepting[s] != 0;
  }
  std::uint64_t transition_count() const {
    std::uint64_t n = 0;
    for (const auto& v : next) n += v.size();
    return n;
  }
};

namespace detail {

struct VecHash {
  std::size_t operator()(const std::vector<std::uint32_t>& v) const {
    std::size_t h = 0xcbf29ce484222325ull;
    for (auto x : v) {
      h ^= x + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

inline std::vector<State> eps_closure(const Nfa& n, std::vector<State> set) {
  std::vector<char> in(n.states, 0);
  std::deque<State> q;
  for (State s : set) {
    if (!in[s]) {
      in[s] = 1;
      q.push_back(s);
    }
  }
  set.clear();
  while (!q.empty()) {
    State s = q.front();
    q.pop_front();
    set.push_back(s);
    for (State t : n.eps[s])
      if (!in[t]) {
        in[t] = 1;
        q.push_back(t);
      }
  }
  std::sort(set.begin(), set.end());
  return set;
}

}  // namespace detail

// Subset construction; epsilon transitions are honoured.  State numbering is
// the deterministic discovery order (BFS, symbols ascending).
inline Dfa determinize(const Nfa& n) {
  Dfa d(n.alphabet);
  std::unordered_map<std::vector<State>, State, detail::VecHash> index;
  std::deque<std::vector<State>> work;
  auto intern = [&](std::vector<State> set) -> State {
    auto it = index.find(set);
    if (it != index.end()) return it->second;
    bool acc = false;
    for (State s : set)
      if (n.accepting[s]) acc = true;
    State id = d.add_state(acc);
    index.emplace(set, id);
    work.push_back(std::move(set));
    return id;
  };
  intern(detail::eps_closure(n, n.initial));
  for (State cur = 0; !work.empty(); ++cur) {
    std::vector<State> set = std::move(work.front());
    work.pop_front();
    std::unordered_map<Sym, std::vector<State>> moves;
    for (State s : set)
      for (auto [a, t] : n.next[s]) moves[a].push_back(t);
    std::vector<Sym> syms;
    syms.reserve(moves.size());
    for (auto& [a, _] : moves) syms.push_back(a);
    std::sort(syms.begin(), syms.end());
    for (Sym a : syms) {
      auto& ts = moves[a];
      std::sort(ts.begin(), ts.end());
      ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
      d.add_edge(cur, a, intern(detail::eps_closure(n, std::move(ts))));
    }
  }
  d.sort_edges();
  return d;
}

// Keeps states reachable from the initial state that can reach an accepting
// state; the initial state survives even when the language is empty.
inline Dfa trim(const Dfa& d) {
  std::vector<char> fwd(d.states, 0);
  {
    std::deque<State> q{d.initial};
    fwd[d.initial] = 1;
    while (!q.empty()) {
      State s = q.front();
      q.pop_front();
      for (auto [a, t] : d.next[s])
        if (!fwd[t]) {
          fwd[t] = 1;
          q.push_back(t);
        }
    }
  }
  std::vector<std::vector<State>> rev(d.states);
  for (State s = 0; s < d.states; ++s)
    for (auto [a, t] : d.next[s]) rev[t].push_back(s);
  std::vector<char> bwd(d.states, 0);
  {
    std::deque<State> q;
    for (State s = 0; s < d.states; ++s)
      if (d.accepting[s] && fwd[s]) {
        bwd[s] = 1;
        q.push_back(s);
      }
    while (!q.empty()) {
      State s = q.front();
      q.pop_front();
      for (State p : rev[s])
        if (fwd[p] && !bwd[p]) {
          bwd[p] = 1;
          q.push_back(p);
        }
    }
  }
  std::vector<State> remap(d.states, kNoState);
  Dfa out(d.alphabet);
  State init = out.add_state(d.accepting[d.initial] && bwd[d.initial]);
  remap[d.initial] = init;
  for (State s = 0; s < d.states; ++s)
    if (s != d.initial && fwd[s] && bwd[s]) remap[s] = out.add_state(d.accepting[s] != 0);
  for (State s = 0; s < d.states; ++s) {
    if (remap[s] == kNoState) continue;
    if (!bwd[s]) continue;  // dead initial keeps no edges
    for (auto [a, t] : d.next[s])
      if (remap[t] != kNoState && bwd[t]) out.add_edge(remap[s], a, remap[t]);
  }
  out.initial = init;
  out.sort_edges();
  return out;
}

namespace detail {

inline Dfa canonical_renumber(const Dfa& d) {
  std::vector<State> remap(d.states, kNoState);
  std::vector<State> order;
  order.reserve(d.states);
  std::deque<State> q{d.initial};
  remap[d.initial] = 0;
  order.push_back(d.initial);
  while (!q.empty()) {
    State s = q.front();
    q.pop_front();
    for (auto [a, t] : d.next[s])
      if (remap[t] == kNoState) {
        remap[t] = static_cast<State>(order.size());
        order.push_back(t);
        q.push_back(t);
      }
  }
  Dfa out(d.alphabet);
  for (State i = 0; i < order.size(); ++i) out.add_state(d.accepting[order[i]] != 0);
  for (State i = 0; i < order.size(); ++i)
    for (auto [a, t] : d.next[order[i]]) out.add_edge(i, a, remap[t]);
  out.initial = 0;
  out.sort_edges();
  return out;
}

}  // namespace detail

// Partition refinement on the trimmed partial automaton.  Absent transitions
// all lead to the one rejecting sink, so two live states merge exactly when
// their accept flags and live transition maps agree blockwise.
inline Dfa minimize(const Dfa& dfa) {
  Dfa d = trim(dfa);
  std::vector<std::uint32_t> block(d.states);
  for (State s = 0; s < d.states; ++s) block[s] = d.accepting[s] ? 1 : 0;
  // Each pass refines the previous partition (the key embeds the state's own
  // block), so an equal block count means the partition is stable.
  std::uint32_t blocks = 0;
  for (;;) {
    std::unordered_map<std::vector<std::uint32_t>, std::uint32_t, detail::VecHash> sig;
    std::vector<std::uint32_t> nb(d.states);
    for (State s = 0; s < d.states; ++s) {
      std::vector<std::uint32_t> key;
      key.reserve(d.next[s].size() * 2 + 1);
      key.push_back(block[s]);
      for (auto [a, t] : d.next[s]) {
        key.push_back(a);
        key.push_back(block[t]);
      }
      auto it = sig.find(key);
      if (it == sig.end()) it = sig.emplace(std::move(key), static_cast<std::uint32_t>(sig.size())).first;
      nb[s] = it->second;
    }
    std::uint32_t count = static_cast<std::uint32_t>(sig.size());
    bool stable = count == blocks;
    block = std::move(nb);
    blocks = count;
    if (stable || count == d.states) break;
  }
  Dfa out(d.alphabet);
  std::vector<State> rep(blocks, kNoState);
  for (State s = 0; s < d.states; ++s)
    if (rep[block[s]] == kNoState) rep[block[s]] = s;
  std::vector<State> id(blocks);
  for (std::uint32_t b = 0; b < blocks; ++b) id[b] = out.add_state(d.accepting[rep[b]] != 0);
  for (std::uint32_t b = 0; b < blocks; ++b)
    for (auto [a, t] : d.next[rep[b]]) out.add_edge(id[b], a, id[block[t]]);
  out.initial = id[block[d.initial]];
  out.sort_edges();
  return detail::canonical_renumber(out);
}

inline Dfa determinize_minimize(const Nfa& n) { return minimize(determinize(n)); }

inline bool language_nonempty(const Dfa& d) {
  std::vector<char> seen(d.states, 0);
  std::deque<State> q{d.initial};
  seen[d.initial] = 1;
  while (!q.empty()) {
    State s = q.front();
    q.pop_front();
    if (d.accepting[s]) return true;
    for (auto [a, t] : d.next[s])
      if (!seen[t]) {
        seen[t] = 1;
        q.push_back(t);
      }
  }
  return false;
}

// A included in B, checked on the sink-completed product without
// materialising B's complement.
inline bool language_subset(const Dfa& a, const Dfa& b) {
  if (a.alphabet != b.alphabet) throw usage_error("language_subset: alphabet mismatch");
  const State SINK = b.states;
  std::unordered_map<std::uint64_t, char> seen;
  std::deque<std::pair<State, State>> q;
  auto push = [&](State sa, State sb) {
    std::uint64_t key = (static_cast<std::uint64_t>(sa) << 32) | sb;
    if (!seen.emplace(key, 1).second) return;
    q.emplace_back(sa, sb);
  };
  push(a.initial, b.initial);
  while (!q.empty()) {
    auto [sa, sb] = q.front();
    q.pop_front();
    if (a.accepting[sa] && (sb == SINK || !b.accepting[sb])) return false;
    for (auto [sym, ta] : a.next[sa]) {
      State tb = sb == SINK ? SINK : b.step(sb, sym);
      push(ta, tb == kNoState ? SINK : tb);
    }
  }
  return true;
}

inline bool language_equal(const Dfa& a, const Dfa& b) {
  return language_subset(a, b) && language_subset(b, a);
}

enum class SetOp { Union, Intersect, Difference };

// Product over sink-completed operands; result is trimmed and minimized.
inline Dfa combine(SetOp op, const Dfa& a, const Dfa& b) {
  if (a.alphabet != b.alphabet) throw usage_error("combine: alphabet mismatch");
  const State SA = a.states, SB = b.states;  // sink ids
  Dfa out(a.alphabet);
  std::unordered_map<std::uint64_t, State> index;
  std::deque<std::pair<State, State>> work;
  auto acc = [&](State sa, State sb) {
    bool aa = sa != SA && a.accepting[sa];
    bool bb = sb != SB && b.accepting[sb];
    switch (op) {
      case SetOp::Union: return aa || bb;
      case SetOp::Intersect: return aa && bb;
      case SetOp::Difference: return aa && !bb;
    }
    return false;
  };
  auto intern = [&](State sa, State sb) -> State {
    std::uint64_t key = (static_cast<std::uint64_t>(sa) << 32) | sb;
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    State id = out.add_state(acc(sa, sb));
    index.emplace(key, id);
    work.emplace_back(sa, sb);
    return id;
  };
  intern(a.initial, b.initial);
  while (!work.empty()) {
    auto [sa, sb] = work.front();
    work.pop_front();
    State cur = index[(static_cast<std::uint64_t>(sa) << 32) | sb];
    std::vector<Sym> syms;
    if (sa != SA)
      for (auto [sym, t] : a.next[sa]) syms.push_back(sym);
    if (op != SetOp::Intersect && op != SetOp::Difference && sb != SB)
      for (auto [sym, t] : b.next[sb]) syms.push_back(sym);
    if (op == SetOp::Intersect && sa != SA && sb != SB) {
      // keep only symbols both sides can take
      std::vector<Sym> keep;
      for (Sym sym : syms)
        if (b.step(sb, sym) != kNoState) keep.push_back(sym);
      syms = std::move(keep);
    }
    std::sort(syms.begin(), syms.end());
    syms.erase(std::unique(syms.begin(), syms.end()), syms.end());
    for (Sym sym : syms) {
      State ta = sa == SA ? SA : a.step(sa, sym);
      State tb = sb == SB ? SB : b.step(sb, sym);
      if (ta == kNoState) ta = SA;
      if (tb == kNoState) tb = SB;
      if (ta == SA && tb == SB) continue;
      out.add_edge(cur, sym, intern(ta, tb));
    }
  }
  out.initial = 0;
  out.sort_edges();
  return minimize(out);
}

inline Dfa intersect(const Dfa& a, const Dfa& b) { return combine(SetOp::Intersect, a, b); }
inline Dfa union_lang(const Dfa& a, const Dfa& b) { return combine(SetOp::Union, a, b); }
inline Dfa difference(const Dfa& a, const Dfa& b) { return combine(SetOp::Difference, a, b); }

}  // namespace cayley

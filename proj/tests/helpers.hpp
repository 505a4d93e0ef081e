#pragma once

// Shared oracle helpers for the test suite.  Everything here recomputes
// results by direct definition (brute walks, set algebra on enumerated
// words) so the library algorithms are checked against independent code.

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "cayley/automaton.hpp"
#include "cayley/automaton_ops.hpp"

namespace testutil {

using cayley::Alphabet;
using cayley::Dfa;
using cayley::Nfa;
using cayley::State;
using cayley::Sym;
using cayley::Word;

// Brute walk over the raw transition table, no reachability or distance
// pruning beyond following edges that exist.
inline void oracle_walk(const Dfa& d, State s, std::size_t maxlen, Word& w,
                        std::vector<Word>& out) {
  if (d.accepting[s]) out.push_back(w);
  if (w.size() == maxlen) return;
  for (auto [a, t] : d.next[s]) {
    w.push_back(a);
    oracle_walk(d, t, maxlen, w, out);
    w.pop_back();
  }
}

inline std::vector<Word> oracle_lang(const Dfa& d, std::size_t maxlen) {
  std::vector<Word> out;
  Word w;
  oracle_walk(d, d.initial, maxlen, w, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline std::vector<Word> sorted_words(std::vector<Word> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Subset simulation of an NFA done longhand, used as the oracle for
// determinize.  Epsilon edges are chased with a fixpoint loop.
inline std::set<State> oracle_closure(const Nfa& n, std::set<State> s) {
  for (;;) {
    std::set<State> grow = s;
    for (State q : s)
      for (State t : n.eps[q]) grow.insert(t);
    if (grow == s) return s;
    s = std::move(grow);
  }
}

inline bool oracle_nfa_accepts(const Nfa& n, const Word& w) {
  std::set<State> cur = oracle_closure(n, {n.initial.begin(), n.initial.end()});
  for (Sym a : w) {
    std::set<State> nxt;
    for (State q : cur)
      for (auto [b, t] : n.next[q])
        if (b == a) nxt.insert(t);
    cur = oracle_closure(n, std::move(nxt));
    if (cur.empty()) return false;
  }
  for (State q : cur)
    if (n.accepting[q]) return true;
  return false;
}

// All words over the symbols that occur anywhere in the NFA, filtered by the
// subset simulation above.
inline std::vector<Word> oracle_nfa_lang(const Nfa& n, std::size_t maxlen) {
  std::set<Sym> symset;
  for (const auto& edges : n.next)
    for (auto [a, t] : edges) symset.insert(a);
  std::vector<Sym> syms(symset.begin(), symset.end());
  std::vector<Word> out;
  Word w;
  std::function<void()> rec = [&]() {
    if (oracle_nfa_accepts(n, w)) out.push_back(w);
    if (w.size() == maxlen) return;
    for (Sym a : syms) {
      w.push_back(a);
      rec();
      w.pop_back();
    }
  };
  rec();
  std::sort(out.begin(), out.end());
  return out;
}

// Independent exponential-growth test: the language of a DFA grows
// exponentially iff some useful state q has two distinct length-L loops for
// some L (distinct loops in a DFA spell distinct words).  Loop pairs, when
// they exist, exist at some L <= 2 * states^2, and path counts saturated at
// 2 detect them exactly.
inline bool oracle_exponential(const Dfa& d) {
  // useful = reachable and co-reachable, recomputed longhand
  std::vector<char> fwd(d.states, 0), bwd(d.states, 0);
  {
    std::vector<State> stk{d.initial};
    fwd[d.initial] = 1;
    while (!stk.empty()) {
      State s = stk.back();
      stk.pop_back();
      for (auto [a, t] : d.next[s])
        if (!fwd[t]) {
          fwd[t] = 1;
          stk.push_back(t);
        }
    }
    std::vector<std::vector<State>> rev(d.states);
    for (State s = 0; s < d.states; ++s)
      for (auto [a, t] : d.next[s]) rev[t].push_back(s);
    std::vector<State> stk2;
    for (State s = 0; s < d.states; ++s)
      if (d.accepting[s]) {
        bwd[s] = 1;
        stk2.push_back(s);
      }
    while (!stk2.empty()) {
      State s = stk2.back();
      stk2.pop_back();
      for (State p : rev[s])
        if (!bwd[p]) {
          bwd[p] = 1;
          stk2.push_back(p);
        }
    }
  }
  std::vector<State> useful;
  for (State s = 0; s < d.states; ++s)
    if (fwd[s] && bwd[s]) useful.push_back(s);
  const int n = static_cast<int>(useful.size());
  if (n == 0) return false;
  std::vector<int> pos(d.states, -1);
  for (int i = 0; i < n; ++i) pos[useful[i]] = i;

  auto sat = [](int x) { return x > 2 ? 2 : x; };
  std::vector<std::uint8_t> A(static_cast<std::size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i)
    for (auto [a, t] : d.next[useful[i]])
      if (pos[t] >= 0) A[static_cast<std::size_t>(i) * n + pos[t]] =
          static_cast<std::uint8_t>(sat(A[static_cast<std::size_t>(i) * n + pos[t]] + 1));
  std::vector<std::uint8_t> P = A;
  int limit = 2 * n * n + 2;
  for (int L = 1; L <= limit; ++L) {
    for (int i = 0; i < n; ++i)
      if (P[static_cast<std::size_t>(i) * n + i] >= 2) return true;
    std::vector<std::uint8_t> Q(static_cast<std::size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        std::uint8_t v = P[static_cast<std::size_t>(i) * n + k];
        if (!v) continue;
        for (int j = 0; j < n; ++j) {
          auto& c = Q[static_cast<std::size_t>(i) * n + j];
          c = static_cast<std::uint8_t>(sat(c + v * A[static_cast<std::size_t>(k) * n + j]));
        }
      }
    P = std::move(Q);
  }
  return false;
}

inline Nfa random_nfa(std::mt19937& rng, const Alphabet& alpha, int states, int edges,
                      int epsilons = 0) {
  Nfa n(alpha);
  std::uniform_int_distribution<int> st(0, states - 1);
  std::uniform_int_distribution<Sym> sy(0, alpha.size() - 1);
  std::uniform_int_distribution<int> coin(0, 3);
  for (int i = 0; i < states; ++i) n.add_state(coin(rng) == 0);
  n.initial.push_back(0);
  if (!std::any_of(n.accepting.begin(), n.accepting.end(), [](char c) { return c; }))
    n.accepting[states - 1] = 1;
  for (int i = 0; i < edges; ++i) n.add_edge(st(rng), sy(rng), st(rng));
  for (int i = 0; i < epsilons; ++i) {
    int u = st(rng), v = st(rng);
    if (u != v) n.add_eps(u, v);
  }
  return n;
}

}  // namespace testutil

#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <unordered_map>
#include <vector>

#include "cayley/automaton.hpp"

namespace cayley {

// Convolution join.  Tracks of the result are numbered 0..arity-1; operand A
// supplies the tracks listed in pos_a, operand B those in pos_b, overlapping
// positions must carry equal digits.  Once an operand has accepted it may
// retire, its tracks padding out while the other side finishes.  Operands and
// result share one atom set per track, so a retired side never clashes with
// a live pad and the product stays deterministic.
inline Dfa conv_join(const Dfa& a, const std::vector<int>& pos_a, const Dfa& b,
                     const std::vector<int>& pos_b, int arity, bool do_min = true) {
  const Alphabet& base = a.alphabet.base();
  if (!(b.alphabet.base() == base)) throw usage_error("conv_join: base alphabet mismatch");
  if (static_cast<int>(pos_a.size()) != a.alphabet.arity() ||
      static_cast<int>(pos_b.size()) != b.alphabet.arity())
    throw usage_error("conv_join: track list does not match operand arity");
  std::vector<char> covered(arity, 0);
  for (int p : pos_a) covered.at(p) = 1;
  for (int p : pos_b) covered.at(p) = 1;
  for (int t = 0; t < arity; ++t)
    if (!covered[t]) throw usage_error("conv_join: uncovered result track");

  Alphabet conv = arity == 1 ? base : Alphabet::tuple(base, arity);
  const Sym PAD = base.pad_digit();
  const State DA = a.states, DB = b.states;

  std::vector<int> shared;  // result tracks fed by both operands
  {
    std::vector<char> ina(arity, 0);
    for (int p : pos_a) ina[p] = 1;
    for (int p : pos_b)
      if (ina[p]) shared.push_back(p);
    std::sort(shared.begin(), shared.end());
  }
  std::vector<int> shared_at_a(shared.size()), shared_at_b(shared.size());
  for (std::size_t i = 0; i < shared.size(); ++i) {
    shared_at_a[i] = static_cast<int>(std::find(pos_a.begin(), pos_a.end(), shared[i]) - pos_a.begin());
    shared_at_b[i] = static_cast<int>(std::find(pos_b.begin(), pos_b.end(), shared[i]) - pos_b.begin());
  }

  struct Move {
    std::vector<Sym> digits;  // operand-local, pads for the retire move
    State to;
  };
  auto moves_of = [&](const Dfa& d, State s, State done) {
    std::vector<Move> out;
    if (s == done) {
      out.push_back({std::vector<Sym>(static_cast<std::size_t>(d.alphabet.arity()), PAD), done});
      return out;
    }
    for (auto [sym, t] : d.next[s]) out.push_back({d.alphabet.decode(sym), t});
    if (d.accepting[s])
      out.push_back({std::vector<Sym>(static_cast<std::size_t>(d.alphabet.arity()), PAD), done});
    return out;
  };

  Dfa out(conv);
  std::unordered_map<std::uint64_t, State> index;
  std::deque<std::pair<State, State>> work;
  auto acc = [&](State sa, State sb) {
    return (sa == DA || a.accepting[sa]) && (sb == DB || b.accepting[sb]);
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
    auto ma = moves_of(a, sa, DA);
    auto mb = moves_of(b, sb, DB);
    // bucket B-moves by their digits on the shared tracks
    std::unordered_map<std::vector<Sym>, std::vector<std::size_t>, detail::VecHash> bucket;
    for (std::size_t j = 0; j < mb.size(); ++j) {
      std::vector<Sym> sig(shared.size());
      for (std::size_t i = 0; i < shared.size(); ++i) sig[i] = mb[j].digits[shared_at_b[i]];
      bucket[sig].push_back(j);
    }
    for (const auto& va : ma) {
      std::vector<Sym> sig(shared.size());
      for (std::size_t i = 0; i < shared.size(); ++i) sig[i] = va.digits[shared_at_a[i]];
      auto it = bucket.find(sig);
      if (it == bucket.end()) continue;
      for (std::size_t j : it->second) {
        const auto& vb = mb[j];
        std::vector<Sym> digits(arity, PAD);
        for (std::size_t i = 0; i < pos_a.size(); ++i) digits[pos_a[i]] = va.digits[i];
        for (std::size_t i = 0; i < pos_b.size(); ++i) digits[pos_b[i]] = vb.digits[i];
        bool allpad = true;
        for (Sym dg : digits)
          if (dg != PAD) allpad = false;
        if (allpad) continue;  // both sides retired, no cell to emit
        out.add_edge(cur, conv.encode(digits), intern(va.to, vb.to));
      }
    }
  }
  out.initial = 0;
  out.sort_edges();
  return do_min ? minimize(out) : trim(out);
}

// Join two relations whose tracks are named by arbitrary global ids; the
// result ranges over the sorted union of the ids, compacted to positions
// 0..arity-1.  Returns the automaton together with that sorted id list.
inline std::pair<Dfa, std::vector<int>> join_on_tracks(const Dfa& a, const std::vector<int>& ids_a,
                                                       const Dfa& b,
                                                       const std::vector<int>& ids_b,
                                                       bool do_min = true) {
  std::vector<int> all = ids_a;
  all.insert(all.end(), ids_b.begin(), ids_b.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  auto pos = [&](int id) {
    return static_cast<int>(std::lower_bound(all.begin(), all.end(), id) - all.begin());
  };
  std::vector<int> pa, pb;
  for (int id : ids_a) pa.push_back(pos(id));
  for (int id : ids_b) pb.push_back(pos(id));
  return {conv_join(a, pa, b, pb, static_cast<int>(all.size()), do_min), all};
}

// Drops one track; cells that become all-pad turn into epsilon moves, which
// stay a run suffix because per-track padding is absorbing.
inline Nfa project(const Dfa& d, int drop) {
  int arity = d.alphabet.arity();
  if (arity < 2) throw usage_error("project: need arity >= 2");
  if (drop < 0 || drop >= arity) throw usage_error("project: track out of range");
  const Alphabet& base = d.alphabet.base();
  Alphabet small = arity == 2 ? base : Alphabet::tuple(base, arity - 1);
  const Sym PAD = base.pad_digit();
  Nfa out(small);
  for (State s = 0; s < d.states; ++s) out.add_state(d.accepting[s] != 0);
  out.initial.push_back(d.initial);
  for (State s = 0; s < d.states; ++s)
    for (auto [sym, t] : d.next[s]) {
      std::vector<Sym> digits = d.alphabet.decode(sym);
      digits.erase(digits.begin() + drop);
      bool allpad = true;
      for (Sym dg : digits)
        if (dg != PAD) allpad = false;
      if (allpad)
        out.add_eps(s, t);
      else
        out.add_edge(s, small.encode(digits), t);
    }
  return out;
}

inline Dfa project_min(const Dfa& d, int drop) { return determinize_minimize(project(d, drop)); }

// perm[i] is the new position of old track i.
inline Dfa permute_tracks(const Dfa& d, const std::vector<int>& perm) {
  int arity = d.alphabet.arity();
  if (static_cast<int>(perm.size()) != arity) throw usage_error("permute_tracks: bad permutation");
  Dfa out(d.alphabet);
  for (State s = 0; s < d.states; ++s) out.add_state(d.accepting[s] != 0);
  out.initial = d.initial;
  for (State s = 0; s < d.states; ++s)
    for (auto [sym, t] : d.next[s]) {
      std::vector<Sym> digits = d.alphabet.decode(sym);
      std::vector<Sym> moved(digits.size());
      for (int i = 0; i < arity; ++i) moved[perm[i]] = digits[i];
      out.add_edge(s, d.alphabet.encode(moved), t);
    }
  out.sort_edges();
  return out;
}

// Relabels every transition symbol; fn must be injective on the symbols that
// actually occur or the result would stop being deterministic.
template <class F>
inline Dfa remap_syms(const Dfa& d, Alphabet target, F&& fn) {
  Dfa out(std::move(target));
  for (State s = 0; s < d.states; ++s) out.add_state(d.accepting[s] != 0);
  out.initial = d.initial;
  for (State s = 0; s < d.states; ++s) {
    for (auto [sym, t] : d.next[s]) out.add_edge(s, fn(sym), t);
    auto& v = out.next[s];
    std::sort(v.begin(), v.end());
    for (std::size_t i = 1; i < v.size(); ++i)
      if (v[i].first == v[i - 1].first) throw usage_error("remap_syms: symbol map not injective");
  }
  return out;
}

// { (w, w) : w in L } as a two-track relation.
inline Dfa diagonal_relation(const Dfa& lang) {
  Alphabet pair = Alphabet::tuple(lang.alphabet, 2);
  return remap_syms(lang, pair, [&](Sym a) { return pair.encode({a, a}); });
}

// All words over the k-track alphabet whose padding is a per-track suffix.
inline Dfa valid_convolutions(const Alphabet& base, int k) {
  Alphabet conv = k == 1 ? base : Alphabet::tuple(base, k);
  if (conv.size() > (1u << 22)) throw cap_exceeded("valid_convolutions: alphabet too large");
  const Sym PAD = base.pad_digit();
  Dfa out(conv);
  for (std::uint32_t mask = 0; mask < (1u << k); ++mask) out.add_state(true);
  out.initial = 0;
  for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
    for (Sym code = 0; code < conv.size(); ++code) {
      std::vector<Sym> digits = k == 1 ? std::vector<Sym>{code} : conv.decode(code);
      std::uint32_t nmask = mask;
      bool ok = true;
      for (int t = 0; t < k; ++t) {
        if (digits[t] == PAD)
          nmask |= 1u << t;
        else if (mask & (1u << t))
          ok = false;  // pad then data on one track
      }
      if (ok) out.add_edge(mask, code, nmask);
    }
  }
  out.sort_edges();
  return out;
}

inline Dfa empty_dfa(Alphabet a) {
  Dfa d(std::move(a));
  d.add_state(false);
  return d;
}

inline Dfa epsilon_dfa(Alphabet a) {
  Dfa d(std::move(a));
  d.add_state(true);
  return d;
}

inline Dfa universal_dfa(Alphabet a) {
  if (a.size() > (1u << 22)) throw cap_exceeded("universal_dfa: alphabet too large");
  Dfa d(a);
  d.add_state(true);
  for (Sym s = 0; s < a.size(); ++s) d.add_edge(0, s, 0);
  d.sort_edges();
  return d;
}

inline Dfa literal_dfa(const Alphabet& a, const std::vector<Word>& words) {
  Dfa trie(a);
  trie.add_state(false);
  for (const Word& w : words) {
    State s = 0;
    for (Sym c : w) {
      State t = trie.step(s, c);
      if (t == kNoState) {
        t = trie.add_state(false);
        trie.add_edge(s, c, t);
        trie.sort_edges();  // keep step() usable while building
      }
      s = t;
    }
    trie.accepting[s] = 1;
  }
  return minimize(trie);
}

inline Nfa nfa_of(const Dfa& d) {
  Nfa n(d.alphabet);
  for (State s = 0; s < d.states; ++s) n.add_state(d.accepting[s] != 0);
  n.initial.push_back(d.initial);
  for (State s = 0; s < d.states; ++s)
    for (auto [sym, t] : d.next[s]) n.add_edge(s, sym, t);
  return n;
}

inline Dfa concat_lang(const Dfa& a, const Dfa& b) {
  if (a.alphabet != b.alphabet) throw usage_error("concat_lang: alphabet mismatch");
  Nfa n(a.alphabet);
  for (State s = 0; s < a.states; ++s) n.add_state(false);
  State off = a.states;
  for (State s = 0; s < b.states; ++s) n.add_state(b.accepting[s] != 0);
  n.initial.push_back(a.initial);
  for (State s = 0; s < a.states; ++s) {
    for (auto [sym, t] : a.next[s]) n.add_edge(s, sym, t);
    if (a.accepting[s]) n.add_eps(s, off + b.initial);
  }
  for (State s = 0; s < b.states; ++s)
    for (auto [sym, t] : b.next[s]) n.add_edge(off + s, sym, off + t);
  return determinize_minimize(n);
}

inline Dfa star_lang(const Dfa& a) {
  Nfa n(a.alphabet);
  for (State s = 0; s < a.states; ++s) n.add_state(false);
  State hub = n.add_state(true);
  n.initial.push_back(hub);
  n.add_eps(hub, a.initial);
  for (State s = 0; s < a.states; ++s) {
    for (auto [sym, t] : a.next[s]) n.add_edge(s, sym, t);
    if (a.accepting[s]) n.add_eps(s, hub);
  }
  return determinize_minimize(n);
}

// ---- enumeration and counting ----

namespace detail {

inline std::vector<std::uint32_t> dist_to_accept(const Dfa& d) {
  const std::uint32_t INF = 0xffffffffu;
  std::vector<std::uint32_t> dist(d.states, INF);
  std::vector<std::vector<State>> rev(d.states);
  std::deque<State> q;
  for (State s = 0; s < d.states; ++s) {
    for (auto [a, t] : d.next[s]) rev[t].push_back(s);
    if (d.accepting[s]) {
      dist[s] = 0;
      q.push_back(s);
    }
  }
  while (!q.empty()) {
    State s = q.front();
    q.pop_front();
    for (State p : rev[s])
      if (dist[p] == INF) {
        dist[p] = dist[s] + 1;
        q.push_back(p);
      }
  }
  return dist;
}

}  // namespace detail

// Depth-first over live prefixes; words arrive in lexicographic prefix order
// with lengths interleaved.  f returns false to stop the walk early.
template <class F>
bool for_each_word(const Dfa& d, std::size_t maxlen, F&& f) {
  auto dist = detail::dist_to_accept(d);
  const std::uint32_t INF = 0xffffffffu;
  Word w;
  std::function<bool(State)> go = [&](State s) -> bool {
    if (dist[s] == INF || dist[s] > maxlen - w.size()) return true;
    if (d.accepting[s] && !f(static_cast<const Word&>(w))) return false;
    if (w.size() == maxlen) return true;
    for (auto [a, t] : d.next[s]) {
      w.push_back(a);
      bool cont = go(t);
      w.pop_back();
      if (!cont) return false;
    }
    return true;
  };
  return go(d.initial);
}

// Length-then-lex, hard bounded by cap.
inline std::vector<Word> enumerate_upto(const Dfa& d, std::size_t maxlen,
                                        std::size_t cap = 50'000'000) {
  std::vector<Word> out;
  bool done = for_each_word(d, maxlen, [&](const Word& w) {
    if (out.size() >= cap) return false;
    out.push_back(w);
    return true;
  });
  if (!done) throw cap_exceeded("enumerate_upto: word cap exceeded");
  std::stable_sort(out.begin(), out.end(), [](const Word& x, const Word& y) {
    if (x.size() != y.size()) return x.size() < y.size();
    return x < y;
  });
  return out;
}

// counts[k] = number of accepted words of length exactly k.
inline std::vector<Int> count_by_length(const Dfa& dfa, std::size_t n) {
  Dfa d = trim(dfa);
  std::vector<Int> counts(n + 1, Int(0));
  std::vector<Int> cur(d.states, Int(0)), nxt;
  cur[d.initial] = 1;
  for (std::size_t k = 0;; ++k) {
    for (State s = 0; s < d.states; ++s)
      if (d.accepting[s]) counts[k] += cur[s];
    if (k == n) break;
    nxt.assign(d.states, Int(0));
    for (State s = 0; s < d.states; ++s) {
      if (cur[s] == 0) continue;
      for (auto [a, t] : d.next[s]) nxt[t] += cur[s];
    }
    cur.swap(nxt);
  }
  return counts;
}

inline Int count_upto(const Dfa& d, std::size_t n) {
  Int total = 0;
  for (const Int& c : count_by_length(d, n)) total += c;
  return total;
}

inline std::optional<Word> shortest_accepted(const Dfa& d) {
  std::vector<std::pair<State, Sym>> parent(d.states, {kNoState, 0});
  std::vector<char> seen(d.states, 0);
  std::deque<State> q{d.initial};
  seen[d.initial] = 1;
  State hit = kNoState;
  if (d.accepting[d.initial]) hit = d.initial;
  while (!q.empty() && hit == kNoState) {
    State s = q.front();
    q.pop_front();
    for (auto [a, t] : d.next[s]) {
      if (seen[t]) continue;
      seen[t] = 1;
      parent[t] = {s, a};
      if (d.accepting[t]) {
        hit = t;
        break;
      }
      q.push_back(t);
    }
  }
  if (hit == kNoState) return std::nullopt;
  Word w;
  for (State s = hit; s != d.initial;) {
    auto [p, a] = parent[s];
    w.push_back(a);
    s = p;
  }
  std::reverse(w.begin(), w.end());
  return w;
}

// ---- growth classification ----

struct GrowthClass {
  bool exponential = false;
  // -1: finitely many words.  d >= 0: word counts grow like n^d.
  long long degree = -1;
  bool operator==(const GrowthClass&) const = default;
};

// The counting function of a trimmed automaton is exponential exactly when
// some state has two distinct edges that stay inside its own strongly
// connected component; otherwise every SCC is a simple cycle and the degree
// is the longest condensation chain of cycle-bearing SCCs, minus one.
inline GrowthClass classify_growth(const Dfa& dfa) {
  Dfa d = trim(dfa);
  if (!language_nonempty(d)) return {false, -1};

  // iterative Tarjan
  std::vector<std::uint32_t> idx(d.states, 0), low(d.states, 0), comp(d.states, 0);
  std::vector<char> onstack(d.states, 0), visited(d.states, 0);
  std::vector<State> stk;
  std::uint32_t counter = 1, ncomp = 0;
  struct Frame {
    State s;
    std::size_t edge;
  };
  for (State root = 0; root < d.states; ++root) {
    if (visited[root]) continue;
    std::vector<Frame> call{{root, 0}};
    while (!call.empty()) {
      auto& fr = call.back();
      State s = fr.s;
      if (fr.edge == 0) {
        visited[s] = 1;
        idx[s] = low[s] = counter++;
        stk.push_back(s);
        onstack[s] = 1;
      }
      if (fr.edge < d.next[s].size()) {
        State t = d.next[s][fr.edge++].second;
        if (!visited[t])
          call.push_back({t, 0});
        else if (onstack[t])
          low[s] = std::min(low[s], idx[t]);
      } else {
        if (low[s] == idx[s]) {
          for (;;) {
            State t = stk.back();
            stk.pop_back();
            onstack[t] = 0;
            comp[t] = ncomp;
            if (t == s) break;
          }
          ++ncomp;
        }
        call.pop_back();
        if (!call.empty()) low[call.back().s] = std::min(low[call.back().s], low[s]);
      }
    }
  }

  std::vector<char> cyclic(ncomp, 0);
  std::vector<std::uint32_t> insize(ncomp, 0);
  for (State s = 0; s < d.states; ++s) ++insize[comp[s]];
  for (State s = 0; s < d.states; ++s) {
    std::uint32_t within = 0;
    for (auto [a, t] : d.next[s]) {
      if (comp[t] == comp[s]) {
        ++within;
        cyclic[comp[s]] = 1;
      }
    }
    if (within >= 2) return {true, 0};
  }

  // Tarjan numbers components in reverse topological order: every edge goes
  // from a higher component id to a lower or equal one.
  std::vector<long long> best(ncomp, 0);
  for (std::uint32_t c = 0; c < ncomp; ++c) best[c] = cyclic[c] ? 1 : 0;
  std::vector<std::vector<State>> members(ncomp);
  for (State s = 0; s < d.states; ++s) members[comp[s]].push_back(s);
  for (std::uint32_t c = 0; c < ncomp; ++c) {
    long long follow = 0;
    for (State s : members[c])
      for (auto [a, t] : d.next[s])
        if (comp[t] != c) follow = std::max(follow, best[comp[t]]);
    best[c] += follow;
  }
  return {false, best[comp[d.initial]] - 1};
}

}  // namespace cayley

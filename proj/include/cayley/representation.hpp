#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <future>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cayley/alphabet.hpp"
#include "cayley/automaton.hpp"
#include "cayley/automaton_ops.hpp"
#include "cayley/group.hpp"
#include "cayley/metrics.hpp"

namespace cayley {

// ---------------------------------------------------------------------------
// Convolution words as data.

inline Word convolve(const Alphabet& conv, const std::vector<Word>& tracks) {
  const int k = conv.arity();
  if (static_cast<int>(tracks.size()) != k) throw usage_error("convolve: track count mismatch");
  const Sym PAD = conv.pad_digit();
  std::size_t n = 0;
  for (const Word& t : tracks)
    if (t.size() > n) n = t.size();
  Word out;
  out.reserve(n);
  std::vector<Sym> cell(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < n; ++i) {
    for (int t = 0; t < k; ++t) cell[t] = i < tracks[t].size() ? tracks[t][i] : PAD;
    out.push_back(conv.encode(cell));
  }
  return out;
}

inline std::vector<Word> unconvolve(const Alphabet& conv, const Word& w) {
  const int k = conv.arity();
  const Sym PAD = conv.pad_digit();
  std::vector<Word> tracks(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < w.size(); ++i) {
    std::vector<Sym> cell = conv.decode(w[i]);
    for (int t = 0; t < k; ++t) {
      if (cell[t] == PAD) continue;
      // padding must be a per-track suffix
      if (tracks[t].size() != i) throw usage_error("unconvolve: interior padding");
      tracks[t].push_back(cell[t]);
    }
  }
  return tracks;
}

inline Word convolve2(const Alphabet& pair, const Word& a, const Word& b) {
  return convolve(pair, {a, b});
}

inline std::pair<Word, Word> unconvolve2(const Alphabet& pair, const Word& w) {
  std::vector<Word> t = unconvolve(pair, w);
  return {std::move(t[0]), std::move(t[1])};
}

// ---------------------------------------------------------------------------
// Alphabet plumbing. Several representations write the cells of a k-track
// convolution as single letters; naming each tuple symbol gives an ordinary
// atom alphabet whose codes coincide with the tuple codes, so automata move
// between the two views by identity relabeling.

inline Alphabet flat_alphabet(const Alphabet& conv) {
  std::vector<std::string> names;
  names.reserve(conv.size());
  for (Sym c = 0; c < conv.size(); ++c) names.push_back(conv.name(c));
  return Alphabet::atoms(names);
}

inline Dfa flatten_lang(const Dfa& d, const Alphabet& flat) {
  return remap_syms(d, flat, [](Sym s) { return s; });
}

// (x_1..x_k, y_1..y_k) relation over 2k base tracks, regrouped as a pair of
// flat k-track cells. An all-pad half becomes the pair-level pad.
inline Dfa split_tracks_to_pair(const Dfa& rel, int k, const Alphabet& flat) {
  const Alphabet& big = rel.alphabet;
  if (big.arity() != 2 * k) throw usage_error("split_tracks_to_pair: arity mismatch");
  Alphabet conv = k == 1 ? big.base() : Alphabet::tuple(big.base(), k);
  Alphabet pair = Alphabet::tuple(flat, 2);
  const Sym BPAD = big.base().pad_digit();
  const Sym FPAD = flat.pad_digit();
  auto half = [&](const std::vector<Sym>& digits, int off) -> Sym {
    bool allpad = true;
    for (int t = 0; t < k; ++t)
      if (digits[off + t] != BPAD) allpad = false;
    if (allpad) return FPAD;
    std::vector<Sym> sub(digits.begin() + off, digits.begin() + off + k);
    return conv.encode(sub);  // flat code == tuple code by construction
  };
  return remap_syms(rel, pair, [&](Sym s) {
    std::vector<Sym> digits = big.decode(s);
    return pair.encode({half(digits, 0), half(digits, k)});
  });
}

// Relabel into a larger atom alphabet, matching atoms by name.
inline Dfa embed_atoms(const Dfa& d, const Alphabet& big) {
  const Alphabet& small = d.alphabet;
  if (small.arity() != 1 || big.arity() != 1) throw usage_error("embed_atoms: atoms only");
  std::vector<Sym> map(small.size());
  for (Sym c = 0; c < small.size(); ++c) {
    map[c] = big.atom_index(small.name(c));
    if (map[c] == kNoSym) throw usage_error("embed_atoms: no atom named " + small.name(c));
  }
  return remap_syms(d, big, [&](Sym s) { return map[s]; });
}

// tuple(small,2) -> tuple(big,2), atoms matched by name on both tracks.
inline Dfa embed_pair(const Dfa& d, const Alphabet& big) {
  const Alphabet small = d.alphabet.base();
  Alphabet smallpair = d.alphabet;
  if (smallpair.arity() != 2) throw usage_error("embed_pair: pair relation expected");
  Alphabet bigpair = Alphabet::tuple(big, 2);
  std::vector<Sym> map(small.size());
  for (Sym c = 0; c < small.size(); ++c) {
    map[c] = big.atom_index(small.name(c));
    if (map[c] == kNoSym) throw usage_error("embed_pair: no atom named " + small.name(c));
  }
  const Sym SPAD = small.pad_digit(), BPAD = big.pad_digit();
  return remap_syms(d, bigpair, [&](Sym s) {
    std::vector<Sym> dg = smallpair.decode(s);
    return bigpair.encode(
        {dg[0] == SPAD ? BPAD : map[dg[0]], dg[1] == SPAD ? BPAD : map[dg[1]]});
  });
}

// { u (x) v : u in a, v in b } as a two-track relation.
inline Dfa lang_pair(const Dfa& a, const Dfa& b) { return join_on_tracks(a, {0}, b, {1}).first; }

// ---------------------------------------------------------------------------
// How unevenly the two tracks of a relation can end. In a suffix-padded
// convolution the one-side-padded cells form a suffix, so the answer is the
// longest pad-edge path into acceptance; a pad cycle means no bound.
inline int skew_bound(const Dfa& rel) {
  Dfa d = trim(rel);
  if (d.alphabet.arity() != 2) throw usage_error("skew_bound: pair relation expected");
  const Sym PAD = d.alphabet.base().pad_digit();
  std::vector<std::vector<State>> pad_next(d.states);
  for (State s = 0; s < d.states; ++s)
    for (auto [sym, t] : d.next[s]) {
      std::vector<Sym> dg = d.alphabet.decode(sym);
      if ((dg[0] == PAD) != (dg[1] == PAD)) pad_next[s].push_back(t);
    }
  constexpr int UNSET = -3, ON_STACK = -2, DEAD = -1;  // DEAD: no pad path ends here
  std::vector<int> g(d.states, UNSET);
  std::function<int(State)> go = [&](State s) -> int {
    if (g[s] == ON_STACK) throw usage_error("skew_bound: unbounded track skew");
    if (g[s] != UNSET) return g[s];
    g[s] = ON_STACK;
    int best = d.accepting[s] ? 0 : DEAD;
    for (State t : pad_next[s]) {
      int sub = go(t);
      if (sub >= 0 && sub + 1 > best) best = sub + 1;
    }
    return g[s] = best;
  };
  int bound = 0;
  for (State s = 0; s < d.states; ++s)
    if (go(s) > bound) bound = g[s];
  return bound;
}

// ---------------------------------------------------------------------------
// Relation concatenation. Every word splits as u v with u over region-1
// letters and v over region-2 letters (regions are a partition of the atoms,
// or everything from a separator atom onward). The result accepts
// (u v) (x) (u' v') whenever r1 accepts u (x) u' and r2 accepts v (x) v'.
// Because |u| and |u'| may differ, the early side's v-letters wait in a FIFO
// of capacity max_skew until the late side reaches its own region 2.
struct ConcatRegions {
  std::vector<int> atom_region;  // per atom, 1 or 2; empty in separator mode
  Sym separator = kNoSym;        // first region-2 letter, owned by region 2

  static ConcatRegions atoms(std::vector<int> classes) {
    ConcatRegions r;
    r.atom_region = std::move(classes);
    return r;
  }
  static ConcatRegions split_at(Sym sep) {
    ConcatRegions r;
    r.separator = sep;
    return r;
  }
};

inline Dfa concat_relation(const Dfa& r1, const Dfa& r2, const ConcatRegions& rg, int max_skew,
                           std::uint64_t state_cap = 1u << 21) {
  const Alphabet& pa = r1.alphabet;
  if (pa.arity() != 2) throw usage_error("concat_relation: pair relations expected");
  if (!(r2.alphabet == pa)) throw usage_error("concat_relation: alphabet mismatch");
  const Alphabet base = pa.base();
  const Sym PAD = base.pad_digit();
  const bool sep_mode = rg.separator != kNoSym;
  if (!sep_mode && rg.atom_region.size() != base.size())
    throw usage_error("concat_relation: region table must cover the alphabet");
  if (max_skew < 0) throw usage_error("concat_relation: negative skew");

  const State DONE1 = r1.states;  // r1 has accepted and retired
  // composite state: q1, q2, phase per track (1 region-1, 2 region-2,
  // 3 track ended), queue owner side (0 none), queued base letters
  using Key = std::vector<std::uint32_t>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::size_t h = 1469598103934665603ull;
      for (std::uint32_t v : k) h = (h ^ v) * 1099511628211ull;
      return h;
    }
  };

  // region of a letter given the track's phase; 0 = regression, rejected
  auto region_of = [&](Sym a, std::uint32_t ph) -> int {
    if (sep_mode) return ph == 2 ? 2 : (a == rg.separator ? 2 : 1);
    int r = rg.atom_region[a];
    return r < static_cast<int>(ph) ? 0 : r;
  };

  // can r2 accept after pairing the queued letters with pads
  auto drain_accepts = [&](State q2, std::uint32_t side, const Key& key, std::size_t qoff) {
    State at = q2;
    for (std::size_t i = qoff; i < key.size(); ++i) {
      Sym f = key[i];
      at = r2.step(at, pa.encode({side == 1 ? f : PAD, side == 1 ? PAD : f}));
      if (at == kNoState) return false;
    }
    return r2.accepting[at] != 0;
  };

  Dfa out(pa);
  std::unordered_map<Key, State, KeyHash> index;
  std::deque<Key> work;
  constexpr std::size_t QOFF = 5;  // queue starts here in the key
  auto intern = [&](Key k) -> State {
    auto it = index.find(k);
    if (it != index.end()) return it->second;
    if (out.states >= state_cap) throw cap_exceeded("concat_relation: state cap");
    bool acc = (k[0] == DONE1 || r1.accepting[k[0]]) && drain_accepts(k[1], k[4], k, QOFF);
    State id = out.add_state(acc);
    index.emplace(k, id);
    work.push_back(std::move(k));
    return id;
  };
  intern(Key{r1.initial, r2.initial, 1, 1, 0});

  while (!work.empty()) {
    Key key = std::move(work.front());
    work.pop_front();
    State cur = index[key];
    const State q1 = key[0], q2 = key[1];
    const std::uint32_t ph1 = key[2], ph2 = key[3], side = key[4];

    for (Sym sym = 0; sym < pa.size(); ++sym) {
      std::vector<Sym> dg = pa.decode(sym);
      const Sym x = dg[0], y = dg[1];
      // 0 = region-1 letter, 1 = region-2 letter, 2 = pad
      int ev1, ev2;
      std::uint32_t nph1, nph2;
      if (x == PAD) {
        ev1 = 2;
        nph1 = 3;
      } else {
        if (ph1 == 3) continue;
        int r = region_of(x, ph1);
        if (r == 0) continue;
        ev1 = r == 2 ? 1 : 0;
        nph1 = static_cast<std::uint32_t>(r);
      }
      if (y == PAD) {
        ev2 = 2;
        nph2 = 3;
      } else {
        if (ph2 == 3) continue;
        int r = region_of(y, ph2);
        if (r == 0) continue;
        ev2 = r == 2 ? 1 : 0;
        nph2 = static_cast<std::uint32_t>(r);
      }

      // feed r1 while either track still contributes region-1 letters
      State nq1 = q1;
      if (ev1 == 0 || ev2 == 0) {
        if (nq1 == DONE1) continue;  // phases are monotone, defensive
        nq1 = r1.step(nq1, pa.encode({ev1 == 0 ? x : PAD, ev2 == 0 ? y : PAD}));
        if (nq1 == kNoState) continue;
      } else if (nq1 != DONE1) {
        if (!r1.accepting[nq1]) continue;
        nq1 = DONE1;
      }

      // route region-2 letters through the queue into r2
      State nq2 = q2;
      std::uint32_t nside = side;
      std::vector<std::uint32_t> queue(key.begin() + QOFF, key.end());
      bool ok = true;
      auto feed = [&](Sym a, Sym b) {
        nq2 = r2.step(nq2, pa.encode({a, b}));
        return nq2 != kNoState;
      };
      auto push = [&](Sym a) {
        if (static_cast<int>(queue.size()) >= max_skew) return false;
        queue.push_back(a);
        return true;
      };
      if (side == 0) {
        if (ev1 == 1 && ev2 == 1)
          ok = feed(x, y);
        else if (ev1 == 1 && ev2 == 2)
          ok = feed(x, PAD);
        else if (ev2 == 1 && ev1 == 2)
          ok = feed(PAD, y);
        else if (ev1 == 1) {
          ok = push(x);
          nside = 1;
        } else if (ev2 == 1) {
          ok = push(y);
          nside = 2;
        }
      } else if (side == 1) {
        if (ev2 == 1) {
          Sym f = queue.front();
          queue.erase(queue.begin());
          ok = feed(f, y);
          if (ok && ev1 == 1) ok = push(x);
        } else if (ev2 == 2) {
          for (Sym f : queue)
            if (!(ok = feed(f, PAD))) break;
          queue.clear();
          if (ok && ev1 == 1) ok = feed(x, PAD);
        } else if (ev1 == 1) {
          ok = push(x);
        }
      } else {
        if (ev1 == 1) {
          Sym f = queue.front();
          queue.erase(queue.begin());
          ok = feed(x, f);
          if (ok && ev2 == 1) ok = push(y);
        } else if (ev1 == 2) {
          for (Sym f : queue)
            if (!(ok = feed(PAD, f))) break;
          queue.clear();
          if (ok && ev2 == 1) ok = feed(PAD, y);
        } else if (ev2 == 1) {
          ok = push(y);
        }
      }
      if (!ok) continue;
      if (queue.empty()) nside = 0;

      Key nk{nq1, nq2, nph1, nph2, nside};
      nk.insert(nk.end(), queue.begin(), queue.end());
      out.add_edge(cur, sym, intern(std::move(nk)));
    }
  }
  out.initial = 0;
  out.sort_edges();
  return minimize(out);
}

// {(x, z) : exists y with (x,y) in r and (y,z) in s}; chains right
// multiplications.
inline Dfa relation_compose(const Dfa& r, const Dfa& s) {
  auto [joined, ids] = join_on_tracks(r, {0, 1}, s, {1, 2});
  return project_min(joined, 1);
}

// ---------------------------------------------------------------------------
// A Cayley automatic representation: a regular language of names, decode and
// encode between names and group elements, and one two-track automaton per
// generator recognising right multiplication in coordinates.
struct CayleyRep {
  std::string id;
  GroupPtr group;
  Dfa language;           // over the name alphabet Sigma
  std::vector<Dfa> mult;  // per positive generator, over tuple(Sigma, 2)
  std::function<Elem(const Word&)> decode_fn;
  std::function<Word(const Elem&)> encode_fn;
  // when Sigma is the letter set under different spellings, maps each atom to
  // its group letter; empty means "resolve by name or not at all"
  std::vector<int> atom_letter;

  const Alphabet& sigma() const { return language.alphabet; }
  Elem decode(const Word& w) const { return decode_fn(w); }
  Word encode(const Elem& e) const { return encode_fn(e); }
  const Dfa& multiplier(int gen) const { return mult.at(static_cast<std::size_t>(gen)); }

  // relation for any letter; an inverse letter is the generator relation read
  // backwards, i.e. with the tracks swapped
  Dfa letter_multiplier(int l) const {
    int m = group->gen_count();
    if (l < m) return mult.at(static_cast<std::size_t>(l));
    return minimize(permute_tracks(mult.at(static_cast<std::size_t>(l - m)), {1, 0}));
  }

  // pair relation for right multiplication by a fixed element, spelled as a
  // letter word; the empty word gives the diagonal
  Dfa word_multiplier(const std::vector<int>& letters) const {
    if (letters.empty()) return diagonal_relation(language);
    Dfa r = letter_multiplier(letters[0]);
    for (std::size_t i = 1; i < letters.size(); ++i)
      r = relation_compose(r, letter_multiplier(letters[i]));
    return r;
  }
};

// Atom -> group letter map, when one exists.  An explicit atom_letter wins;
// otherwise atoms are matched to letters by name.  Nullopt means the name
// alphabet is not a spelling of the letter set.
inline std::optional<std::vector<int>> try_sigma_letters(const CayleyRep& rep) {
  const Alphabet& sig = rep.sigma();
  const Group& g = *rep.group;
  if (!rep.atom_letter.empty()) {
    if (rep.atom_letter.size() != static_cast<std::size_t>(sig.size())) return std::nullopt;
    for (int l : rep.atom_letter)
      if (l < 0 || l >= g.letter_count()) return std::nullopt;
    return rep.atom_letter;
  }
  std::vector<int> out;
  for (Sym c = 0; c < sig.size(); ++c) {
    int found = -1;
    for (int l = 0; l < g.letter_count() && found < 0; ++l)
      if (g.letter_name(l) == sig.name(c)) found = l;
    if (found < 0) return std::nullopt;
    out.push_back(found);
  }
  return out;
}

inline std::vector<int> sigma_letters(const CayleyRep& rep) {
  auto m = try_sigma_letters(rep);
  if (!m)
    throw usage_error("representation '" + rep.id +
                      "': name alphabet is not the generating set; re-encode over the group "
                      "letters (block_reencode) first");
  return *m;
}

// ---------------------------------------------------------------------------
// Definition check at radius k: names decode injectively, encode inverts
// decode, multipliers match group arithmetic in both directions, and every
// ball element has a name. The bounded-difference constant is the largest
// length jump seen across one multiplication.
struct VerifyReport {
  bool pass = false;
  bool injective = true;
  bool codec_ok = true;
  bool mult_sound = true;
  bool mult_complete = true;
  bool ball_covered = true;
  long long bounded_difference = 0;
  std::uint64_t words = 0, pairs = 0, ball_size = 0;
  std::string counterexample;
};

inline VerifyReport verify_rep(const CayleyRep& rep, int k, std::uint64_t cap_words = 4'000'000,
                               std::uint64_t cap_ball = 2'000'000, int workers = 0) {
  const Group& g = *rep.group;
  const Alphabet pair = Alphabet::tuple(rep.sigma(), 2);
  VerifyReport rpt;
  auto fail = [&](bool& flag, std::string msg) {
    flag = false;
    if (rpt.counterexample.empty()) rpt.counterexample = std::move(msg);
  };
  auto show = [&](const Word& w) { return word_to_string(rep.sigma(), w); };

  std::vector<Word> words = enumerate_upto(rep.language, static_cast<std::size_t>(k), cap_words);
  rpt.words = words.size();

  std::vector<Elem> els;
  els.reserve(words.size());
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < words.size(); ++i) {
    els.push_back(rep.decode(words[i]));
    auto [it, fresh] = seen.emplace(elem_key(els.back()), i);
    if (!fresh)
      fail(rpt.injective,
           "words " + show(words[it->second]) + " and " + show(words[i]) + " share an element");
    Word back = rep.encode(els.back());
    if (back != words[i])
      fail(rpt.codec_ok, "encode(decode(" + show(words[i]) + ")) = " + show(back));
  }

  // accepted multiplier pairs must satisfy the group equation
  const int m = g.gen_count();
  for (int a = 0; a < m; ++a) {
    std::vector<Word> pairs =
        enumerate_upto(rep.mult[static_cast<std::size_t>(a)], static_cast<std::size_t>(k), cap_words);
    rpt.pairs += pairs.size();
    for (const Word& cw : pairs) {
      auto [w1, w2] = unconvolve2(pair, cw);
      if (!rep.language.accepts(w1) || !rep.language.accepts(w2)) {
        fail(rpt.mult_sound, "multiplier " + g.gen_names[a] + " accepts pair outside L: " +
                                 show(w1) + " , " + show(w2));
        continue;
      }
      if (!(g.multiply(rep.decode(w1), g.generator(a)) == rep.decode(w2)))
        fail(rpt.mult_sound,
             "multiplier " + g.gen_names[a] + " wrong on " + show(w1) + " , " + show(w2));
    }
  }

  // the group equation must be accepted; parallel over name chunks with a
  // deterministic first-counterexample merge
  struct ChunkResult {
    long long skew = 0;
    std::optional<std::pair<std::size_t, int>> bad;  // (word index, generator)
    std::string msg;
  };
  auto run_chunk = [&](std::size_t lo, std::size_t hi) {
    ChunkResult r;
    for (std::size_t i = lo; i < hi && !r.bad; ++i) {
      for (int a = 0; a < m; ++a) {
        Word w2 = rep.encode(g.multiply(els[i], g.generator(a)));
        long long d = static_cast<long long>(w2.size()) - static_cast<long long>(words[i].size());
        if (d < 0) d = -d;
        if (d > r.skew) r.skew = d;
        if (!rep.language.accepts(w2)) {
          r.bad = {i, a};
          r.msg = "encode leaves L: " + show(w2);
          break;
        }
        if (!rep.mult[static_cast<std::size_t>(a)].accepts(convolve2(pair, words[i], w2))) {
          r.bad = {i, a};
          r.msg = "multiplier " + g.gen_names[a] + " misses " + show(words[i]) + " , " + show(w2);
          break;
        }
      }
    }
    return r;
  };
  int nw = workers > 0 ? workers
                       : static_cast<int>(std::min(8u, std::max(1u, std::thread::hardware_concurrency())));
  std::vector<ChunkResult> results;
  if (nw <= 1 || words.size() < 2048) {
    results.push_back(run_chunk(0, words.size()));
  } else {
    std::vector<std::future<ChunkResult>> futs;
    std::size_t step = (words.size() + nw - 1) / nw;
    for (std::size_t lo = 0; lo < words.size(); lo += step)
      futs.push_back(std::async(std::launch::async, run_chunk, lo,
                                std::min(words.size(), lo + step)));
    for (auto& f : futs) results.push_back(f.get());
  }
  std::optional<std::pair<std::size_t, int>> first;
  for (const auto& r : results) {
    if (r.skew > rpt.bounded_difference) rpt.bounded_difference = r.skew;
    if (r.bad && (!first || *r.bad < *first)) first = r.bad;
  }
  if (first)
    for (const auto& r : results)
      if (r.bad == first) {
        fail(rpt.mult_complete, r.msg);
        break;
      }

  // every element of the radius-k ball gets a name that round-trips
  Ball b = Ball::grow(rep.group, k, cap_ball);
  rpt.ball_size = b.size();
  for (const Elem& e : b.elems) {
    Word w = rep.encode(e);
    if (!rep.language.accepts(w)) {
      fail(rpt.ball_covered, "ball element encodes outside L: " + show(w));
      break;
    }
    if (!(rep.decode(w) == e)) {
      fail(rpt.ball_covered, "ball element does not round-trip: " + show(w));
      break;
    }
  }

  rpt.pass = rpt.injective && rpt.codec_ok && rpt.mult_sound && rpt.mult_complete &&
             rpt.ball_covered;
  return rpt;
}

}  // namespace cayley

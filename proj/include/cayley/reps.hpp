#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "cayley/arith_automata.hpp"
#include "cayley/codec.hpp"
#include "cayley/group.hpp"
#include "cayley/metrics.hpp"
#include "cayley/representation.hpp"

namespace cayley {

namespace detail {

// {(gamma(k), gamma(k+1))}: append a P, or drop the final N.
inline Dfa unary_succ_pair_dfa() {
  Alphabet pair = Alphabet::tuple(unary_alphabet(), 2);
  const Sym PAD = unary_alphabet().pad_digit();
  Dfa d(pair);
  auto sy = [&](Sym a, Sym b) { return pair.encode({a, b}); };
  State q0 = d.add_state(), qp = d.add_state(), qn = d.add_state(), f = d.add_state(true);
  d.add_edge(q0, sy(0, 0), qp);
  d.add_edge(q0, sy(PAD, 0), f);
  d.add_edge(q0, sy(1, 1), qn);
  d.add_edge(q0, sy(1, PAD), f);
  d.add_edge(qp, sy(0, 0), qp);
  d.add_edge(qp, sy(PAD, 0), f);
  d.add_edge(qn, sy(1, 1), qn);
  d.add_edge(qn, sy(1, PAD), f);
  d.sort_edges();
  return d;
}

inline Alphabet letter_alphabet(const Group& g) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(g.letter_count()));
  for (int l = 0; l < g.letter_count(); ++l) names.push_back(g.letter_name(l));
  return Alphabet::atoms(names);
}

// Geodesic spelling of an element, for elements near the identity.
inline std::vector<int> spell_in_letters(GroupPtr g, const Elem& e, int max_radius = 16) {
  Ball b = Ball::grow(std::move(g), 1);
  while (!b.find(e)) {
    if (b.radius >= max_radius) throw cap_exceeded("spell_in_letters: element out of reach");
    b.extend(b.radius + 1);
  }
  return b.geodesic(e);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Letter-to-block substitution. Every source atom becomes a fixed-length
// block over the target alphabet; words stretch by exactly that factor.
struct BlockMap {
  Alphabet source, target;
  int len = 1;
  std::vector<Word> blocks;  // per source atom
};

inline BlockMap default_block_map(const Alphabet& source, const Alphabet& target) {
  if (source.arity() != 1 || target.arity() != 1)
    throw usage_error("block map endpoints must be atom alphabets");
  BlockMap bm;
  bm.source = source;
  bm.target = target;
  bm.len = 1;
  std::uint64_t cap = target.size();
  while (cap < source.size()) {
    cap *= target.size();
    ++bm.len;
  }
  // k-th atom gets the k-th length-len target word in lexicographic order
  for (Sym k = 0; k < source.size(); ++k) {
    Word w(static_cast<std::size_t>(bm.len));
    Sym v = k;
    for (int r = bm.len - 1; r >= 0; --r) {
      w[static_cast<std::size_t>(r)] = v % target.size();
      v /= target.size();
    }
    bm.blocks.push_back(std::move(w));
  }
  return bm;
}

namespace detail {

inline void check_block_map(const BlockMap& bm) {
  if (bm.blocks.size() != bm.source.size() || bm.len < 1)
    throw usage_error("block map must cover the source alphabet");
  std::map<Word, Sym> seen;
  for (Sym c = 0; c < bm.source.size(); ++c) {
    if (static_cast<int>(bm.blocks[c].size()) != bm.len)
      throw usage_error("block map blocks must share one length");
    if (!seen.emplace(bm.blocks[c], c).second)
      throw usage_error("block map must be injective");
  }
}

inline Dfa substitute_lang(const Dfa& d, const BlockMap& bm) {
  Nfa n(bm.target);
  for (State s = 0; s < d.states; ++s) n.add_state(d.accepting[s] != 0);
  for (State s = 0; s < d.states; ++s)
    for (auto [a, t] : d.next[s]) {
      State at = s;
      for (int r = 0; r < bm.len; ++r) {
        State nx = r + 1 == bm.len ? t : n.add_state();
        n.add_edge(at, bm.blocks[a][static_cast<std::size_t>(r)], nx);
        at = nx;
      }
    }
  n.initial = {d.initial};
  return determinize_minimize(n);
}

// Pair cells substitute trackwise; a padded track stays padded, so the image
// pair is the convolution of the image words.
inline Dfa substitute_pair(const Dfa& d, const BlockMap& bm) {
  Alphabet sp = d.alphabet;
  Alphabet tp = Alphabet::tuple(bm.target, 2);
  const Sym SPAD = bm.source.pad_digit(), TPAD = bm.target.pad_digit();
  Nfa n(tp);
  for (State s = 0; s < d.states; ++s) n.add_state(d.accepting[s] != 0);
  for (State s = 0; s < d.states; ++s)
    for (auto [a, t] : d.next[s]) {
      std::vector<Sym> dg = sp.decode(a);
      State at = s;
      for (int r = 0; r < bm.len; ++r) {
        State nx = r + 1 == bm.len ? t : n.add_state();
        Sym x = dg[0] == SPAD ? TPAD : bm.blocks[dg[0]][static_cast<std::size_t>(r)];
        Sym y = dg[1] == SPAD ? TPAD : bm.blocks[dg[1]][static_cast<std::size_t>(r)];
        n.add_edge(at, tp.encode({x, y}), nx);
        at = nx;
      }
    }
  n.initial = {d.initial};
  return determinize_minimize(n);
}

}  // namespace detail

inline CayleyRep block_reencode(const CayleyRep& rep, const BlockMap& bm, std::string id) {
  if (!(bm.source == rep.sigma()))
    throw usage_error("block map source must match the representation alphabet");
  detail::check_block_map(bm);
  CayleyRep out;
  out.id = std::move(id);
  out.group = rep.group;
  out.language = detail::substitute_lang(rep.language, bm);
  out.mult.reserve(rep.mult.size());
  for (const Dfa& m : rep.mult) out.mult.push_back(detail::substitute_pair(m, bm));

  std::map<Word, Sym> inv;
  for (Sym c = 0; c < bm.source.size(); ++c) inv.emplace(bm.blocks[c], c);
  int len = bm.len;
  auto base_decode = rep.decode_fn;
  auto base_encode = rep.encode_fn;
  std::vector<Word> blocks = bm.blocks;
  out.decode_fn = [inv, len, base_decode](const Word& w) {
    if (w.size() % static_cast<std::size_t>(len) != 0)
      throw usage_error("block decode: length not a block multiple");
    Word plain;
    plain.reserve(w.size() / static_cast<std::size_t>(len));
    for (std::size_t i = 0; i < w.size(); i += static_cast<std::size_t>(len)) {
      auto it = inv.find(Word(w.begin() + i, w.begin() + i + len));
      if (it == inv.end()) throw usage_error("block decode: unknown block");
      plain.push_back(it->second);
    }
    return base_decode(plain);
  };
  out.encode_fn = [blocks, base_encode](const Elem& e) {
    Word plain = base_encode(e), w;
    for (Sym c : plain) w.insert(w.end(), blocks[c].begin(), blocks[c].end());
    return w;
  };
  return out;
}

// Re-encode over the group's own letters S = generators and inverses.
inline CayleyRep block_reencode(const CayleyRep& rep, std::string id) {
  BlockMap bm = default_block_map(rep.sigma(), detail::letter_alphabet(*rep.group));
  return block_reencode(rep, bm, std::move(id));
}

// ---------------------------------------------------------------------------
// Z in unary: names spell the element, so the walk and the name agree.
inline CayleyRep rep_unary_z() {
  CayleyRep r;
  r.id = "unary-z";
  r.group = make_free_abelian(1);
  r.language = unary_lang_dfa();
  r.mult = {detail::unary_succ_pair_dfa()};
  r.atom_letter = {0, 1};  // P is the generator step, N its inverse
  r.decode_fn = [](const Word& w) {
    Elem e;
    e.v = {unary_decode(w)};
    return e;
  };
  r.encode_fn = [](const Elem& e) { return unary_encode(e.v[0]); };
  return r;
}

// Z in signed binary: short names for huge elements.
inline CayleyRep rep_binary_z() {
  CayleyRep r;
  r.id = "binary-z";
  r.group = make_free_abelian(1);
  r.language = canonical_beta_dfa();
  r.mult = {successor_dfa()};
  r.decode_fn = [](const Word& w) {
    Elem e;
    e.v = {beta_decode(w)};
    return e;
  };
  r.encode_fn = [](const Elem& e) { return beta_encode(e.v[0]); };
  return r;
}

namespace detail {

// Shared machinery for Z^n x| Z: names are u v with u the unary exponent of
// t and v the convolution of the binary coordinate words.
struct SemiParts {
  int rank = 0;
  Alphabet conv;   // tuple(beta, rank), or beta itself for rank 1
  Alphabet sigma;  // P, N, then the convolution cells
  Dfa language;
  Dfa mult_t;
  std::vector<Dfa> mult_a;
};

inline SemiParts build_semi_parts(const Mat& A) {
  const int n = static_cast<int>(A.size());
  SemiParts p;
  p.rank = n;
  p.conv = n == 1 ? beta_alphabet() : Alphabet::tuple(beta_alphabet(), n);
  Alphabet flat = flat_alphabet(p.conv);
  std::vector<std::string> names{"P", "N"};
  for (Sym c = 0; c < flat.size(); ++c) names.push_back(flat.name(c));
  p.sigma = Alphabet::atoms(names);

  Dfa uni = embed_atoms(unary_lang_dfa(), p.sigma);
  Dfa vconv = embed_atoms(flatten_lang(canonical_conv_dfa(n), flat), p.sigma);
  p.language = minimize(concat_lang(uni, vconv));

  std::vector<int> region(p.sigma.size(), 2);
  region[0] = region[1] = 1;
  ConcatRegions rg = ConcatRegions::atoms(region);

  // t: bump the exponent, apply the matrix to the coordinates
  Dfa usucc = embed_pair(unary_succ_pair_dfa(), p.sigma);
  Dfa vmap = embed_pair(split_tracks_to_pair(linear_map_dfa(A), n, flat), p.sigma);
  p.mult_t = concat_relation(usucc, vmap, rg, 2);

  // coordinate steps: exponent fixed, one track incremented
  Dfa udiag = diagonal_relation(uni);
  for (int i = 0; i < n; ++i) {
    Mat M = mat_identity(n);
    std::vector<Int> c(static_cast<std::size_t>(n), Int(0));
    c[static_cast<std::size_t>(i)] = 1;
    Dfa vrel = embed_pair(split_tracks_to_pair(affine_system_dfa(M, c), n, flat), p.sigma);
    p.mult_a.push_back(concat_relation(udiag, vrel, rg, 1));
  }
  return p;
}

inline std::pair<Int, std::vector<Int>> semi_split(const SemiParts& p, const Word& w) {
  std::size_t cut = 0;
  while (cut < w.size() && w[cut] < 2) ++cut;
  Int y = unary_decode(Word(w.begin(), w.begin() + cut));
  Word v;
  for (std::size_t i = cut; i < w.size(); ++i) {
    if (w[i] < 2) throw usage_error("semidirect name: unary letter after the coordinates");
    v.push_back(w[i] - 2);
  }
  std::vector<Word> tracks = unconvolve(p.conv, v);
  std::vector<Int> z;
  z.reserve(tracks.size());
  for (const Word& t : tracks) z.push_back(beta_decode(t));
  return {std::move(y), std::move(z)};
}

inline Word semi_join(const SemiParts& p, const Int& y, const std::vector<Int>& z) {
  Word w = unary_encode(y);
  std::vector<Word> tracks;
  tracks.reserve(z.size());
  for (const Int& c : z) tracks.push_back(beta_encode(c));
  for (Sym cell : convolve(p.conv, tracks)) w.push_back(cell + 2);
  return w;
}

}  // namespace detail

inline CayleyRep rep_semidirect(const detail::Mat& A) {
  auto parts = std::make_shared<detail::SemiParts>(detail::build_semi_parts(A));
  CayleyRep r;
  r.id = "semidirect";
  r.group = make_semidirect(A);
  r.language = parts->language;
  r.mult.push_back(parts->mult_t);
  for (const Dfa& m : parts->mult_a) r.mult.push_back(m);
  r.decode_fn = [parts](const Word& w) {
    auto [y, z] = detail::semi_split(*parts, w);
    Elem e;
    e.v.push_back(std::move(y));
    for (Int& c : z) e.v.push_back(std::move(c));
    return e;
  };
  r.encode_fn = [parts](const Elem& e) {
    return detail::semi_join(*parts, e.v[0], std::vector<Int>(e.v.begin() + 1, e.v.end()));
  };
  return r;
}

// The discrete Heisenberg group carried by the rank-2 semidirect machinery:
// conjugation by the middle generator acts on the abelian plane spanned by
// the outer generators as [[1,0],[1,1]], and coordinates transport as
// (x, y, z) <-> (exponent y, plane (x, z)).
inline CayleyRep rep_heisenberg() {
  detail::Mat T{{Int(1), Int(0)}, {Int(1), Int(1)}};
  auto parts = std::make_shared<detail::SemiParts>(detail::build_semi_parts(T));
  CayleyRep r;
  r.id = "heisenberg";
  r.group = make_heisenberg();
  r.mult = {parts->mult_a[0], parts->mult_t, parts->mult_a[1]};  // s, p, q
  r.language = parts->language;
  r.decode_fn = [parts](const Word& w) {
    auto [y, z] = detail::semi_split(*parts, w);
    Elem e;
    e.v = {z[0], std::move(y), z[1]};
    return e;
  };
  r.encode_fn = [parts](const Elem& e) {
    return detail::semi_join(*parts, e.v[1], {e.v[0], e.v[2]});
  };
  return r;
}

// Unitriangular matrices as the convolution of their strict upper entries.
// Right multiplication by t_ij adds column i to column j, an affine map on
// the coordinate vector.
inline CayleyRep rep_unitriangular(int n) {
  if (n < 3) throw usage_error("unitriangular representation needs size >= 3");
  const int m = n * (n - 1) / 2;
  auto conv = std::make_shared<Alphabet>(Alphabet::tuple(beta_alphabet(), m));
  Alphabet flat = flat_alphabet(*conv);
  CayleyRep r;
  r.id = "ut" + std::to_string(n);
  r.group = make_ut(n);
  r.language = flatten_lang(canonical_conv_dfa(m), flat);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      detail::Mat M = detail::mat_identity(m);
      for (int a = 0; a < i; ++a) M[detail::ut_index(a, j, n)][detail::ut_index(a, i, n)] = 1;
      std::vector<Int> c(static_cast<std::size_t>(m), Int(0));
      c[static_cast<std::size_t>(detail::ut_index(i, j, n))] = 1;
      r.mult.push_back(split_tracks_to_pair(affine_system_dfa(M, c), m, flat));
    }
  r.decode_fn = [conv](const Word& w) {
    Elem e;
    for (const Word& t : unconvolve(*conv, w)) e.v.push_back(beta_decode(t));
    return e;
  };
  r.encode_fn = [conv](const Elem& e) {
    std::vector<Word> tracks;
    tracks.reserve(e.v.size());
    for (const Int& c : e.v) tracks.push_back(beta_encode(c));
    return convolve(*conv, tracks);
  };
  return r;
}

namespace detail {

inline const Alphabet& lamp_alphabet() {
  static const Alphabet a = Alphabet::atoms({"+", "-", "0", "1", "C0", "C1", "#"});
  return a;
}

// Codes into lamp_alphabet. The first four coincide with the signed-binary
// digit codes, so the offset part reuses the msb codec verbatim.
inline constexpr Sym kLC0 = 4, kLC1 = 5, kLHash = 6;

// hash, then lamp letters with exactly one cursor, lit or cursor at both ends
inline Dfa lamp_window_dfa() {
  const Alphabet& sig = lamp_alphabet();
  Dfa d(sig);
  State h = d.add_state();
  State w0 = d.add_state();
  State a00 = d.add_state(), a01 = d.add_state(), a10 = d.add_state(), a11 = d.add_state(true);
  d.add_edge(h, kLHash, w0);
  d.add_edge(w0, kD1, a01);
  d.add_edge(w0, kLC0, a11);
  d.add_edge(w0, kLC1, a11);
  for (State s : {a00, a01}) {
    d.add_edge(s, kD0, a00);
    d.add_edge(s, kD1, a01);
    d.add_edge(s, kLC0, a11);
    d.add_edge(s, kLC1, a11);
  }
  for (State s : {a10, a11}) {
    d.add_edge(s, kD0, a10);
    d.add_edge(s, kD1, a11);
  }
  d.sort_edges();
  return d;
}

// For every pair below the tracks are (name of g, name of g t).

// Cursor leaves a lit start or an interior cell: the offset is unchanged and
// the cursor mark hops one cell right, extending the window when it falls
// off the end.
inline Dfa lamp_move_same_start() {
  const Alphabet& sig = lamp_alphabet();
  Alphabet pair = Alphabet::tuple(sig, 2);
  const Sym PAD = sig.pad_digit();
  Dfa d(pair);
  auto sy = [&](Sym a, Sym b) { return pair.encode({a, b}); };
  State q0 = d.add_state(), s0 = d.add_state(), s = d.add_state(), x = d.add_state();
  State a = d.add_state(true), f = d.add_state(true);
  d.add_edge(q0, sy(kLHash, kLHash), s0);
  d.add_edge(s0, sy(kD1, kD1), s);
  d.add_edge(s0, sy(kLC1, kD1), x);
  d.add_edge(s, sy(kD0, kD0), s);
  d.add_edge(s, sy(kD1, kD1), s);
  d.add_edge(s, sy(kLC0, kD0), x);
  d.add_edge(s, sy(kLC1, kD1), x);
  d.add_edge(x, sy(kD0, kLC0), a);
  d.add_edge(x, sy(kD1, kLC1), a);
  d.add_edge(x, sy(PAD, kLC0), f);
  d.add_edge(a, sy(kD0, kD0), a);
  d.add_edge(a, sy(kD1, kD1), a);
  d.sort_edges();
  return d;
}

// Cursor leaves an unlit left end: the window sheds its first cell, so the
// second name runs one cell ahead of the first for the rest of the window.
inline Dfa lamp_move_shed_start() {
  const Alphabet& sig = lamp_alphabet();
  Alphabet pair = Alphabet::tuple(sig, 2);
  const Sym PAD = sig.pad_digit();
  Dfa d(pair);
  auto sy = [&](Sym a, Sym b) { return pair.encode({a, b}); };
  State q0 = d.add_state(), p0 = d.add_state();
  State e0b = d.add_state(true);  // lone C0 window may end right here
  State e0 = d.add_state(), e1 = d.add_state(), acc = d.add_state(true);
  d.add_edge(q0, sy(kLHash, kLHash), p0);
  d.add_edge(p0, sy(kLC0, kLC0), e0b);
  d.add_edge(p0, sy(kLC0, kLC1), e1);
  for (auto [st, digit] : {std::pair<State, Sym>{e0b, kD0}, {e0, kD0}, {e1, kD1}}) {
    d.add_edge(st, sy(digit, kD0), e0);
    d.add_edge(st, sy(digit, kD1), e1);
    d.add_edge(st, sy(digit, PAD), acc);
  }
  d.sort_edges();
  return d;
}

// Toggle: names agree except the cursor mark flips.
inline Dfa lamp_toggle_pair() {
  const Alphabet& sig = lamp_alphabet();
  Alphabet pair = Alphabet::tuple(sig, 2);
  Dfa d(pair);
  State t0 = d.add_state(), t1 = d.add_state(true);
  for (Sym c = 0; c < sig.size(); ++c) {
    d.add_edge(t0, pair.encode({c, c}), t0);
    d.add_edge(t1, pair.encode({c, c}), t1);
  }
  d.add_edge(t0, pair.encode({kLC0, kLC1}), t1);
  d.add_edge(t0, pair.encode({kLC1, kLC0}), t1);
  d.sort_edges();
  return d;
}

}  // namespace detail

// Lamp configurations as offset # window: the window spans the lit lamps and
// the cursor, the offset locates its left end, and the cursor cell is marked
// C0 or C1 in place of its digit.
inline CayleyRep rep_lamplighter_sigma() {
  const Alphabet& sig = detail::lamp_alphabet();
  CayleyRep r;
  r.id = "lamplighter-sigma";
  r.group = make_lamplighter();

  Dfa msb = embed_atoms(msb_binary_dfa(), sig);
  r.language = minimize(concat_lang(msb, detail::lamp_window_dfa()));
  Dfa ll = lang_pair(r.language, r.language);

  Dfa toggle = minimize(intersect(detail::lamp_toggle_pair(), ll));
  ConcatRegions rg = ConcatRegions::split_at(detail::kLHash);
  Dfa same = concat_relation(diagonal_relation(msb), detail::lamp_move_same_start(), rg, 2);
  Dfa shed = concat_relation(embed_pair(msb_successor_dfa(), sig), detail::lamp_move_shed_start(),
                             rg, 2);
  Dfa move = minimize(intersect(union_lang(same, shed), ll));
  r.mult = {toggle, move};

  r.decode_fn = [](const Word& w) {
    auto hash = std::find(w.begin(), w.end(), detail::kLHash);
    if (hash == w.end()) throw usage_error("lamp name: missing the window marker");
    Int s = msb_decode(Word(w.begin(), hash));
    Elem e;
    bool cursor = false;
    Int pos = s;
    for (auto it = hash + 1; it != w.end(); ++it, ++pos) {
      if (*it == detail::kLC0 || *it == detail::kLC1) {
        if (cursor) throw usage_error("lamp name: two cursor marks");
        cursor = true;
        e.v = {pos};
      }
      if (*it == kD1 || *it == detail::kLC1) e.supp.push_back(pos);
      if (*it < kD0 || *it > detail::kLC1) throw usage_error("lamp name: stray letter in window");
    }
    if (!cursor) throw usage_error("lamp name: no cursor mark");
    return e;
  };
  r.encode_fn = [](const Elem& e) {
    const Int& z = e.v[0];
    Int lo = e.supp.empty() ? z : std::min(e.supp.front(), z);
    Int hi = e.supp.empty() ? z : std::max(e.supp.back(), z);
    Word w = msb_encode(lo);
    w.push_back(detail::kLHash);
    for (Int i = lo; i <= hi; ++i) {
      bool lit = std::binary_search(e.supp.begin(), e.supp.end(), i);
      if (i == z)
        w.push_back(lit ? detail::kLC1 : detail::kLC0);
      else
        w.push_back(lit ? kD1 : kD0);
    }
    return w;
  };
  return r;
}

namespace detail {

// Merged alphabet for two-factor constructions: the second factor's atoms
// are primed until fresh, mirroring how merged generator names are built.
struct MergedSigma {
  Alphabet sigma;
  Sym offset = 0;  // second factor's atoms start here
};

inline MergedSigma merge_alphabets(const Alphabet& a, const Alphabet& b) {
  std::vector<std::string> names;
  for (Sym c = 0; c < a.size(); ++c) names.push_back(a.name(c));
  MergedSigma m;
  m.offset = a.size();
  for (Sym c = 0; c < b.size(); ++c) {
    std::string cand = b.name(c);
    while (std::find(names.begin(), names.end(), cand) != names.end()) cand += "'";
    names.push_back(std::move(cand));
  }
  m.sigma = Alphabet::atoms(names);
  return m;
}

inline Dfa shift_atoms(const Dfa& d, const Alphabet& big, Sym off) {
  return remap_syms(d, big, [off](Sym s) { return s + off; });
}

inline Dfa shift_pair(const Dfa& d, const Alphabet& big, Sym off) {
  Alphabet sp = d.alphabet;
  Alphabet bp = Alphabet::tuple(big, 2);
  const Sym SPAD = sp.base().pad_digit(), BPAD = big.pad_digit();
  return remap_syms(d, bp, [sp, bp, SPAD, BPAD, off](Sym s) {
    std::vector<Sym> dg = sp.decode(s);
    return bp.encode(
        {dg[0] == SPAD ? BPAD : dg[0] + off, dg[1] == SPAD ? BPAD : dg[1] + off});
  });
}

}  // namespace detail

// Names are a first-factor name then a second-factor name; the alphabets are
// kept disjoint so the boundary is visible to a one-state detector.
inline CayleyRep rep_direct_product(const CayleyRep& r1, const CayleyRep& r2) {
  auto ms = detail::merge_alphabets(r1.sigma(), r2.sigma());
  const Alphabet& sigma = ms.sigma;
  const Sym off = ms.offset;
  Dfa e1 = embed_atoms(r1.language, sigma);
  Dfa e2 = detail::shift_atoms(r2.language, sigma, off);

  CayleyRep r;
  r.id = "direct-product";
  r.group = make_direct_product(r1.group, r2.group);
  r.language = minimize(concat_lang(e1, e2));

  std::vector<int> region(sigma.size(), 2);
  for (Sym c = 0; c < off; ++c) region[c] = 1;
  ConcatRegions rg = ConcatRegions::atoms(region);
  Dfa d1 = diagonal_relation(e1), d2 = diagonal_relation(e2);
  for (const Dfa& m : r1.mult) {
    Dfa em = embed_pair(m, sigma);
    r.mult.push_back(concat_relation(em, d2, rg, skew_bound(em) + 1));
  }
  for (const Dfa& m : r2.mult)
    r.mult.push_back(concat_relation(d1, detail::shift_pair(m, sigma, off), rg, 1));

  // factor letter maps survive the merge: product generators list the first
  // factor's and then the second's, inverses after all generators
  if (auto l1 = try_sigma_letters(r1)) {
    if (auto l2 = try_sigma_letters(r2)) {
      const int m1 = r1.group->gen_count(), m2 = r2.group->gen_count();
      for (int l : *l1) r.atom_letter.push_back(l < m1 ? l : m1 + m2 + (l - m1));
      for (int l : *l2) r.atom_letter.push_back(l < m2 ? m1 + l : m1 + m2 + m1 + (l - m2));
    }
  }

  auto dec1 = r1.decode_fn, dec2 = r2.decode_fn;
  auto enc1 = r1.encode_fn, enc2 = r2.encode_fn;
  r.decode_fn = [off, dec1, dec2](const Word& w) {
    std::size_t cut = 0;
    while (cut < w.size() && w[cut] < off) ++cut;
    Word u(w.begin(), w.begin() + cut), v;
    for (std::size_t i = cut; i < w.size(); ++i) {
      if (w[i] < off) throw usage_error("product name: first-factor letter after the boundary");
      v.push_back(w[i] - off);
    }
    Elem e;
    e.a = std::make_shared<Elem>(dec1(u));
    e.b = std::make_shared<Elem>(dec2(v));
    return e;
  };
  r.encode_fn = [off, enc1, enc2](const Elem& e) {
    Word w = enc1(*e.a);
    for (Sym c : enc2(*e.b)) w.push_back(c + off);
    return w;
  };
  return r;
}

namespace detail {

// Pairs (x u, x u') with x in the prefix language and (u, u') in the block
// relation: a shared prefix read diagonally, then one relation step on the
// final block.
inline Dfa final_block_rel(const Dfa& x, const Dfa& m) {
  Alphabet pair = m.alphabet;
  const Alphabet base = pair.base();
  Nfa n(pair);
  for (State s = 0; s < x.states; ++s) n.add_state(false);
  const State off = x.states;
  for (State s = 0; s < m.states; ++s) n.add_state(m.accepting[s] != 0);
  for (State s = 0; s < x.states; ++s) {
    for (auto [a, t] : x.next[s]) n.add_edge(s, pair.encode({a, a}), t);
    if (x.accepting[s]) n.add_eps(s, off + m.initial);
  }
  for (State s = 0; s < m.states; ++s)
    for (auto [a, t] : m.next[s]) n.add_edge(off + s, a, off + t);
  n.initial = {x.initial};
  return determinize_minimize(n);
}

}  // namespace detail

// Normal forms are alternating blocks from the two factor languages. A
// generator only ever touches the final block: it rewrites it within its
// factor, cancels it, or starts a fresh one, and all three cases are pairs
// of words sharing a prefix from the right parity language.
inline CayleyRep rep_free_product(const CayleyRep& r1, const CayleyRep& r2) {
  if (!r1.encode(r1.group->identity()).empty() || !r2.encode(r2.group->identity()).empty())
    throw usage_error("free product factors must name the identity by the empty word");
  auto ms = detail::merge_alphabets(r1.sigma(), r2.sigma());
  const Alphabet& sigma = ms.sigma;
  const Sym off = ms.offset;
  Dfa eps = epsilon_dfa(sigma);
  Dfa n1 = minimize(difference(embed_atoms(r1.language, sigma), eps));
  Dfa n2 = minimize(difference(detail::shift_atoms(r2.language, sigma, off), eps));
  Dfa a = concat_lang(n1, n2), b = concat_lang(n2, n1);

  CayleyRep r;
  r.id = "free-product";
  r.group = make_free_product(r1.group, r2.group);
  r.language = minimize(union_lang(union_lang(star_lang(a), concat_lang(star_lang(a), n1)),
                                   union_lang(star_lang(b), concat_lang(star_lang(b), n2))));
  // words that may precede a block of either factor
  Dfa x1 = minimize(union_lang(star_lang(a), concat_lang(star_lang(b), n2)));
  Dfa x2 = minimize(union_lang(star_lang(b), concat_lang(star_lang(a), n1)));
  for (const Dfa& m : r1.mult)
    r.mult.push_back(detail::final_block_rel(x1, embed_pair(m, sigma)));
  for (const Dfa& m : r2.mult)
    r.mult.push_back(detail::final_block_rel(x2, detail::shift_pair(m, sigma, off)));

  if (auto l1 = try_sigma_letters(r1)) {
    if (auto l2 = try_sigma_letters(r2)) {
      const int m1 = r1.group->gen_count(), m2 = r2.group->gen_count();
      for (int l : *l1) r.atom_letter.push_back(l < m1 ? l : m1 + m2 + (l - m1));
      for (int l : *l2) r.atom_letter.push_back(l < m2 ? m1 + l : m1 + m2 + m1 + (l - m2));
    }
  }

  auto dec1 = r1.decode_fn, dec2 = r2.decode_fn;
  auto enc1 = r1.encode_fn, enc2 = r2.encode_fn;
  GroupPtr g1 = r1.group, g2 = r2.group;
  r.decode_fn = [off, dec1, dec2, g1, g2](const Word& w) {
    Elem e;
    std::size_t i = 0;
    while (i < w.size()) {
      bool second = w[i] >= off;
      std::size_t j = i;
      Word block;
      while (j < w.size() && (w[j] >= off) == second) block.push_back(w[j] - (second ? off : 0)), ++j;
      Elem s = second ? dec2(block) : dec1(block);
      if (s == (second ? g2 : g1)->identity())
        throw usage_error("free product name: identity syllable");
      if (!e.syll.empty() && e.syll.back().first == (second ? 1 : 0))
        throw usage_error("free product name: adjacent blocks from one factor");
      e.syll.emplace_back(second ? 1 : 0, std::move(s));
      i = j;
    }
    return e;
  };
  r.encode_fn = [off, enc1, enc2](const Elem& e) {
    Word w;
    for (const auto& [f, s] : e.syll) {
      if (f == 0) {
        for (Sym c : enc1(s)) w.push_back(c);
      } else {
        for (Sym c : enc2(s)) w.push_back(c + off);
      }
    }
    return w;
  };
  return r;
}

// Extension by finitely many cosets: a subgroup name followed by at most one
// coset letter. A generator sends the coset letter through the product
// table and right-multiplies the subgroup part by a fixed correction.
inline CayleyRep rep_finite_extension(const CayleyRep& rh, const CosetSystem& cs) {
  GroupPtr g = make_finite_extension(rh.group, cs);  // validates the tables
  const Group& hgrp = *rh.group;
  std::vector<std::string> names;
  for (Sym c = 0; c < rh.sigma().size(); ++c) names.push_back(rh.sigma().name(c));
  const Sym off = rh.sigma().size();
  for (std::uint32_t j = 1; j < cs.m; ++j) {
    std::string cand = "k" + std::to_string(j);
    while (std::find(names.begin(), names.end(), cand) != names.end()) cand += "'";
    names.push_back(std::move(cand));
  }
  Alphabet sigma = Alphabet::atoms(names);
  Alphabet pair = Alphabet::tuple(sigma, 2);
  const Sym PAD = sigma.pad_digit();

  CayleyRep r;
  r.id = "finite-extension";
  r.group = g;
  std::vector<Word> tails{Word{}};
  for (std::uint32_t j = 1; j < cs.m; ++j) tails.push_back(Word{off + j - 1});
  r.language =
      minimize(concat_lang(embed_atoms(rh.language, sigma), literal_dfa(sigma, tails)));

  std::vector<int> region(sigma.size(), 2);
  for (Sym c = 0; c < off; ++c) region[c] = 1;
  ConcatRegions rg = ConcatRegions::atoms(region);
  for (const auto& gen : cs.gens) {
    Dfa acc;
    for (std::uint32_t i = 0; i < cs.m; ++i) {
      const auto& [corr, j] = cs.prod[i][gen.k];
      Elem c = hgrp.multiply(cs.act[i](hgrp, gen.h), corr);
      Dfa ru = embed_pair(rh.word_multiplier(detail::spell_in_letters(rh.group, c)), sigma);
      Dfa rv = i == 0 && j == 0
                   ? epsilon_dfa(pair)
                   : literal_dfa(pair, {Word{pair.encode({i ? off + i - 1 : PAD,
                                                          j ? off + j - 1 : PAD})}});
      Dfa branch = concat_relation(ru, rv, rg, skew_bound(ru) + 1);
      acc = i == 0 ? std::move(branch) : union_lang(acc, branch);
    }
    r.mult.push_back(minimize(acc));
  }

  // each name piece denotes an element of this group; when the subgroup atoms
  // are its letters, match the denoted elements against our own letter list
  if (auto lh = try_sigma_letters(rh)) {
    std::vector<Elem> denote;
    for (int l : *lh) {
      Elem e = g->identity();
      e.h = std::make_shared<Elem>(hgrp.letter(l));
      denote.push_back(std::move(e));
    }
    for (std::uint32_t j = 1; j < cs.m; ++j) {
      Elem e = g->identity();
      e.k = j;
      denote.push_back(std::move(e));
    }
    std::vector<int> map;
    for (const Elem& e : denote) {
      int found = -1;
      for (int l = 0; l < g->letter_count() && found < 0; ++l)
        if (g->letter(l) == e) found = l;
      if (found < 0) {
        map.clear();
        break;
      }
      map.push_back(found);
    }
    r.atom_letter = std::move(map);
  }

  auto dech = rh.decode_fn;
  auto ench = rh.encode_fn;
  r.decode_fn = [off, dech](const Word& w) {
    Word u = w;
    std::uint32_t k = 0;
    if (!u.empty() && u.back() >= off) {
      k = u.back() - off + 1;
      u.pop_back();
    }
    for (Sym c : u)
      if (c >= off) throw usage_error("extension name: coset letter before the end");
    Elem e;
    e.h = std::make_shared<Elem>(dech(u));
    e.k = k;
    return e;
  };
  r.encode_fn = [off, ench](const Elem& e) {
    Word w = ench(*e.h);
    if (e.k) w.push_back(off + e.k - 1);
    return w;
  };
  return r;
}

inline CayleyRep rep_dinf() {
  GroupPtr d = make_dinf();
  CayleyRep r = rep_finite_extension(rep_unary_z(), d->cs);
  r.id = "dinf";
  return r;
}

// ---------------------------------------------------------------------------
// Named corpus.

inline std::vector<std::string> rep_ids() {
  return {"binary-z", "binary-z-s",       "dinf",          "heisenberg",
          "heisenberg-s", "lamplighter-s", "lamplighter-sigma", "unary-z",
          "ut3",      "z-star-z",         "z-x-z"};
}

namespace detail {

inline CayleyRep build_rep(const std::string& id) {
  if (id == "unary-z") return rep_unary_z();
  if (id == "binary-z") return rep_binary_z();
  if (id == "binary-z-s") return block_reencode(rep_binary_z(), "binary-z-s");
  if (id == "heisenberg") return rep_heisenberg();
  if (id == "heisenberg-s") return block_reencode(rep_heisenberg(), "heisenberg-s");
  if (id == "ut3") return rep_unitriangular(3);
  if (id == "lamplighter-sigma") return rep_lamplighter_sigma();
  if (id == "lamplighter-s") return block_reencode(rep_lamplighter_sigma(), "lamplighter-s");
  if (id == "dinf") return rep_dinf();
  if (id == "z-x-z") {
    CayleyRep r = rep_direct_product(rep_unary_z(), rep_unary_z());
    r.id = "z-x-z";
    return r;
  }
  if (id == "z-star-z") {
    CayleyRep r = rep_free_product(rep_unary_z(), rep_unary_z());
    r.id = "z-star-z";
    return r;
  }
  throw usage_error("unknown representation: " + id);
}

}  // namespace detail

// Built-ins are constructed once and shared; constructions are pure, so the
// cache only saves time.
inline const CayleyRep& rep_by_id(const std::string& id) {
  static std::mutex mu;
  static std::map<std::string, CayleyRep> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(id);
  if (it == cache.end()) it = cache.emplace(id, detail::build_rep(id)).first;
  return it->second;
}

}  // namespace cayley

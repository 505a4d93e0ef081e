#pragma once

#include <unordered_map>
#include <vector>

#include "cayley/automaton_ops.hpp"
#include "cayley/codec.hpp"

namespace cayley {

// Canonical signed-binary words: "+0" for zero, otherwise a sign and
// least-significant-first digits ending in 1.
inline Dfa canonical_beta_dfa() {
  Dfa d(beta_alphabet());
  State start = d.add_state(false);
  State plus = d.add_state(false);
  State minus = d.add_state(false);
  State zero = d.add_state(true);   // exactly "+0"
  State one = d.add_state(true);    // last digit was 1
  State mid = d.add_state(false);   // last digit was 0, more digits required
  d.add_edge(start, kPlus, plus);
  d.add_edge(start, kMinus, minus);
  d.add_edge(plus, kD0, zero);
  d.add_edge(plus, kD1, one);
  d.add_edge(minus, kD0, mid);
  d.add_edge(minus, kD1, one);
  d.add_edge(zero, kD0, mid);
  d.add_edge(zero, kD1, one);
  d.add_edge(one, kD0, mid);
  d.add_edge(one, kD1, one);
  d.add_edge(mid, kD0, mid);
  d.add_edge(mid, kD1, one);
  d.sort_edges();
  return minimize(d);
}

// P* union N*.
inline Dfa unary_lang_dfa() {
  Dfa d(unary_alphabet());
  State start = d.add_state(true);
  State ps = d.add_state(true);
  State ns = d.add_state(true);
  d.add_edge(start, 0, ps);
  d.add_edge(start, 1, ns);
  d.add_edge(ps, 0, ps);
  d.add_edge(ns, 1, ns);
  d.sort_edges();
  return d;
}

// Canonical most-significant-first words: "+0" for zero, otherwise sign and
// digits with a leading 1.
inline Dfa msb_binary_dfa() {
  Dfa d(beta_alphabet());
  State start = d.add_state(false);
  State plus = d.add_state(false);
  State minus = d.add_state(false);
  State zero = d.add_state(true);
  State num = d.add_state(true);
  d.add_edge(start, kPlus, plus);
  d.add_edge(start, kMinus, minus);
  d.add_edge(plus, kD0, zero);
  d.add_edge(plus, kD1, num);
  d.add_edge(minus, kD1, num);
  d.add_edge(num, kD0, num);
  d.add_edge(num, kD1, num);
  d.sort_edges();
  return minimize(d);
}

namespace detail {

// Per-track reading state of the digit-synchronous adder.
// 0 sign pending, 1 fresh '+', 2 fresh '-', 3 last digit 0 sign '+',
// 4 last digit 0 sign '-', 5 last digit 1 sign '+', 6 last digit 1 sign '-',
// 7 ended, 9 exactly "+0" read (the canonical zero, also a valid prefix).
inline int adder_sign(std::uint32_t code) { return code % 2 == 1 ? 1 : -1; }
inline bool adder_endable(std::uint32_t code) {
  // legal stopping points: "+0", either-sign word whose last digit was 1, done.
  return code == 5 || code == 6 || code == 7 || code == 9;
}

}  // namespace detail

// Relation { (x_1..x_m, y) : y = sum coeffs[j] * x_j + c } on canonical
// signed-binary encodings, as an (m+1)-track convolution automaton with the
// output on the last track.  Digits stream least significant first, so a
// bounded carry per cell decides the relation.
inline Dfa affine_row_dfa(const std::vector<Int>& coeffs, const Int& c0) {
  const int m = static_cast<int>(coeffs.size());
  const int arity = m + 1;
  std::vector<long long> M(m);
  long long K = 0;
  for (int j = 0; j < m; ++j) {
    M[j] = to_i64(coeffs[j]);
    K += M[j] < 0 ? -M[j] : M[j];
  }
  const long long c = to_i64(c0);
  const long long B = std::max(c < 0 ? -c : c, K + 1);
  const std::uint32_t OFF = static_cast<std::uint32_t>(B);

  Alphabet conv = arity == 1 ? beta_alphabet() : Alphabet::tuple(beta_alphabet(), arity);
  const Sym PAD = beta_alphabet().pad_digit();
  Dfa out(conv);

  // key = [carry + OFF, track codes...]
  std::unordered_map<std::vector<std::uint32_t>, State, detail::VecHash> index;
  std::deque<std::vector<std::uint32_t>> work;
  auto accepting = [&](const std::vector<std::uint32_t>& key) {
    if (key[0] != OFF) return false;
    for (int t = 0; t < arity; ++t)
      if (!detail::adder_endable(key[1 + t])) return false;
    return true;
  };
  auto intern = [&](std::vector<std::uint32_t> key) -> State {
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    State id = out.add_state(accepting(key));
    index.emplace(key, id);
    work.push_back(std::move(key));
    if (out.states > 200000) throw cap_exceeded("affine_row_dfa: state cap");
    return id;
  };
  std::vector<std::uint32_t> init(1 + arity, 0);
  init[0] = OFF + static_cast<std::uint32_t>(c);
  intern(init);

  while (!work.empty()) {
    std::vector<std::uint32_t> key = std::move(work.front());
    work.pop_front();
    State cur = index[key];
    long long r = static_cast<long long>(key[0]) - B;

    std::vector<std::vector<Sym>> options(arity);
    for (int t = 0; t < arity; ++t) {
      std::uint32_t code = key[1 + t];
      if (code == 0)
        options[t] = {kPlus, kMinus};
      else if (code == 7)
        options[t] = {PAD};
      else {
        options[t] = {kD0, kD1};
        if (detail::adder_endable(code)) options[t].push_back(PAD);
      }
    }
    std::vector<std::size_t> pick(arity, 0);
    for (;;) {
      std::vector<Sym> digits(arity);
      bool allpad = true;
      for (int t = 0; t < arity; ++t) {
        digits[t] = options[t][pick[t]];
        if (digits[t] != PAD) allpad = false;
      }
      if (!allpad) {
        std::vector<std::uint32_t> nk = key;
        bool signcell = key[1] == 0;  // all tracks share the sign cell
        long long v = r;
        bool ok = true;
        for (int t = 0; t < arity && ok; ++t) {
          Sym d = digits[t];
          std::uint32_t code = key[1 + t];
          if (signcell) {
            nk[1 + t] = d == kPlus ? 1 : 2;
          } else if (d == PAD) {
            nk[1 + t] = 7;
          } else {
            int e = d == kD1 ? 1 : 0;
            int s = detail::adder_sign(code);
            if (t < m)
              v += s * M[t] * e;
            else
              v -= s * e;
            if (code == 1 && e == 0)
              nk[1 + t] = 9;  // "+0" so far: may stop as zero or keep reading
            else
              nk[1 + t] = static_cast<std::uint32_t>((e ? 5 : 3) + (s > 0 ? 0 : 1));
          }
        }
        if (!signcell) {
          if (v % 2 != 0) ok = false;
          if (ok) {
            long long nr = v / 2;
            if (nr < -B || nr > B) throw cap_exceeded("affine_row_dfa: carry bound");
            nk[0] = OFF + static_cast<std::uint32_t>(nr);
          }
        }
        if (ok) out.add_edge(cur, conv.encode(digits), intern(std::move(nk)));
      }
      int t = arity - 1;
      while (t >= 0 && ++pick[t] == options[t].size()) pick[t--] = 0;
      if (t < 0) break;
    }
  }
  out.initial = 0;
  out.sort_edges();
  return minimize(out);
}

inline Dfa successor_dfa() { return affine_row_dfa({Int(1)}, Int(1)); }

// Relation { (x_1..x_k, y_1..y_l) : y = M x + c } built row by row and
// joined over shared input tracks; inputs a row ignores are constrained only
// by the rows that use them, with bare canonical cylinders for inputs no row
// touches.
inline Dfa affine_system_dfa(const std::vector<std::vector<Int>>& M, const std::vector<Int>& c) {
  const int l = static_cast<int>(M.size());
  if (l == 0) throw usage_error("affine_system_dfa: no rows");
  const int k = static_cast<int>(M[0].size());
  if (static_cast<int>(c.size()) != l) throw usage_error("affine_system_dfa: constant size");
  for (auto& row : M)
    if (static_cast<int>(row.size()) != k) throw usage_error("affine_system_dfa: ragged matrix");

  Dfa acc;
  std::vector<int> ids;
  std::vector<char> used(k, 0);
  for (int i = 0; i < l; ++i) {
    std::vector<Int> coeffs;
    std::vector<int> rowids;
    for (int j = 0; j < k; ++j)
      if (M[i][j] != 0) {
        coeffs.push_back(M[i][j]);
        rowids.push_back(j);
        used[j] = 1;
      }
    rowids.push_back(k + i);  // output track
    Dfa row = affine_row_dfa(coeffs, c[i]);
    if (i == 0) {
      acc = std::move(row);
      ids = std::move(rowids);
    } else {
      std::tie(acc, ids) = join_on_tracks(acc, ids, row, rowids);
    }
  }
  Dfa canon = canonical_beta_dfa();
  for (int j = 0; j < k; ++j)
    if (!used[j]) std::tie(acc, ids) = join_on_tracks(acc, ids, canon, {j});
  // ids is now exactly 0..k+l-1
  return acc;
}

inline Dfa linear_map_dfa(const std::vector<std::vector<Int>>& M) {
  return affine_system_dfa(M, std::vector<Int>(M.size(), Int(0)));
}

// k-track convolutions of canonical signed-binary words.
inline Dfa canonical_conv_dfa(int k) {
  Dfa canon = canonical_beta_dfa();
  if (k == 1) return canon;
  Dfa acc = canon;
  std::vector<int> ids{0};
  for (int j = 1; j < k; ++j) std::tie(acc, ids) = join_on_tracks(acc, ids, canon, {j});
  return acc;
}

// Relation { (u, u') : u' encodes value(u) + 1 } on canonical
// most-significant-first words.  Incrementing flips a trailing run of ones
// (or borrows through a trailing run of zeros on the negative side), so the
// aligned pair language is a short hand-built pattern automaton.
inline Dfa msb_successor_dfa() {
  Alphabet pair = Alphabet::tuple(beta_alphabet(), 2);
  const Sym PAD = beta_alphabet().pad_digit();
  Dfa d(pair);
  auto sy = [&](Sym a, Sym b) { return pair.encode({a, b}); };

  State S = d.add_state(false);    // start
  State P0 = d.add_state(false);   // "+","+" read
  State PZ = d.add_state(true);    // "+0" -> "+1" complete
  State P1 = d.add_state(false);   // positive, exactly the leading (1,1) matched
  State PE = d.add_state(false);   // positive, two or more (1,1) matched, no 0 yet
  State PA = d.add_state(false);   // positive, matched prefix containing a 0
  State PT = d.add_state(true);    // positive flip done, reading (1,0) tail
  State PO = d.add_state(false);   // positive overflow 1^m -> 10^m, tail
  State POE = d.add_state(true);   // overflow complete after (~,0)
  State N0 = d.add_state(false);   // "-","-" read
  State NE = d.add_state(false);   // negative, only (1,1) matched
  State NA = d.add_state(false);   // negative, matched prefix with a 0 or 11
  State NT = d.add_state(true);    // negative flip done, reading (0,1) tail
  State ND = d.add_state(false);   // negative length-drop 10^j -> 1^j tail
  State NDE = d.add_state(true);   // drop complete after (0,~)
  State M1 = d.add_state(false);   // "-","+" read: the -1 -> +0 bridge
  State M2 = d.add_state(true);    // bridge complete

  d.add_edge(S, sy(kPlus, kPlus), P0);
  d.add_edge(S, sy(kMinus, kMinus), N0);
  d.add_edge(S, sy(kMinus, kPlus), M1);

  d.add_edge(P0, sy(kD0, kD1), PZ);
  d.add_edge(P0, sy(kD1, kD1), P1);
  // overflow 1^m -> 1 0^m pairs the leading cell only; after a second (1,1)
  // the y side already committed to matching x's length, so no (1,0)/pad exit.
  d.add_edge(P1, sy(kD1, kD1), PE);
  d.add_edge(P1, sy(kD0, kD0), PA);
  d.add_edge(P1, sy(kD0, kD1), PT);
  d.add_edge(P1, sy(kD1, kD0), PO);
  d.add_edge(P1, sy(PAD, kD0), POE);
  d.add_edge(PE, sy(kD1, kD1), PE);
  d.add_edge(PE, sy(kD0, kD0), PA);
  d.add_edge(PE, sy(kD0, kD1), PT);
  d.add_edge(PA, sy(kD1, kD1), PA);
  d.add_edge(PA, sy(kD0, kD0), PA);
  d.add_edge(PA, sy(kD0, kD1), PT);
  d.add_edge(PT, sy(kD1, kD0), PT);
  d.add_edge(PO, sy(kD1, kD0), PO);
  d.add_edge(PO, sy(PAD, kD0), POE);

  d.add_edge(N0, sy(kD1, kD1), NE);
  d.add_edge(NE, sy(kD1, kD1), NA);
  d.add_edge(NE, sy(kD0, kD0), NA);
  d.add_edge(NE, sy(kD0, kD1), ND);
  d.add_edge(NE, sy(kD0, PAD), NDE);
  d.add_edge(NE, sy(kD1, kD0), NT);
  d.add_edge(NA, sy(kD1, kD1), NA);
  d.add_edge(NA, sy(kD0, kD0), NA);
  d.add_edge(NA, sy(kD1, kD0), NT);
  d.add_edge(NT, sy(kD0, kD1), NT);
  d.add_edge(ND, sy(kD0, kD1), ND);
  d.add_edge(ND, sy(kD0, PAD), NDE);

  d.add_edge(M1, sy(kD1, kD0), M2);

  d.initial = S;
  d.sort_edges();
  return minimize(d);
}

}  // namespace cayley

#pragma once

#include <string>

#include "cayley/alphabet.hpp"
#include "cayley/common.hpp"

namespace cayley {

// Signed binary digit atoms, shared by the least-significant-first integer
// encoding and the most-significant-first window-offset encoding.
inline constexpr Sym kPlus = 0;
inline constexpr Sym kMinus = 1;
inline constexpr Sym kD0 = 2;
inline constexpr Sym kD1 = 3;

inline const Alphabet& beta_alphabet() {
  static const Alphabet a = Alphabet::atoms({"+", "-", "0", "1"});
  return a;
}

inline const Alphabet& unary_alphabet() {
  static const Alphabet a = Alphabet::atoms({"P", "N"});
  return a;
}

// sign, then |z| least significant bit first, most significant bit last and
// equal to 1.  Zero is "+0".
inline Word beta_encode(Int z) {
  Word w{kPlus};
  if (z < 0) {
    w[0] = kMinus;
    z = -z;
  }
  if (z == 0) {
    w.push_back(kD0);
    return w;
  }
  while (z > 0) {
    w.push_back(z % 2 == 0 ? kD0 : kD1);
    z /= 2;
  }
  return w;
}

inline Int beta_decode(const Word& w) {
  if (w.size() < 2 || (w[0] != kPlus && w[0] != kMinus))
    throw usage_error("beta_decode: missing sign or digits");
  if (w.size() == 2 && w[1] == kD0) {
    if (w[0] == kMinus) throw usage_error("beta_decode: zero must be written '+0'");
    return 0;
  }
  if (w.back() != kD1) throw usage_error("beta_decode: trailing zero");
  Int v = 0, p = 1;
  for (std::size_t i = 1; i < w.size(); ++i, p *= 2) {
    if (w[i] == kD1)
      v += p;
    else if (w[i] != kD0)
      throw usage_error("beta_decode: digit expected");
  }
  return w[0] == kMinus ? Int(-v) : v;
}

// z copies of P for positive z, -z copies of N for negative, empty for zero.
inline Word unary_encode(const Int& z) {
  Int n = z < 0 ? Int(-z) : z;
  Word w;
  for (Int i = 0; i < n; ++i) w.push_back(z < 0 ? 1 : 0);
  return w;
}

inline Int unary_decode(const Word& w) {
  Int v = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] != w[0]) throw usage_error("unary_decode: mixed letters");
    v += w[i] == 0 ? 1 : -1;
  }
  return v;
}

// sign, then |z| most significant bit first with no leading zeros.  Zero is
// "+0".
inline Word msb_encode(Int z) {
  Word w{kPlus};
  if (z < 0) {
    w[0] = kMinus;
    z = -z;
  }
  if (z == 0) {
    w.push_back(kD0);
    return w;
  }
  Word bits;
  while (z > 0) {
    bits.push_back(z % 2 == 0 ? kD0 : kD1);
    z /= 2;
  }
  w.insert(w.end(), bits.rbegin(), bits.rend());
  return w;
}

inline Int msb_decode(const Word& w) {
  if (w.size() < 2 || (w[0] != kPlus && w[0] != kMinus))
    throw usage_error("msb_decode: missing sign or digits");
  if (w.size() == 2 && w[1] == kD0) {
    if (w[0] == kMinus) throw usage_error("msb_decode: zero must be written '+0'");
    return 0;
  }
  if (w[1] != kD1) throw usage_error("msb_decode: leading zero");
  Int v = 0;
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (w[i] != kD0 && w[i] != kD1) throw usage_error("msb_decode: digit expected");
    v = v * 2 + (w[i] == kD1 ? 1 : 0);
  }
  return w[0] == kMinus ? Int(-v) : v;
}

}  // namespace cayley

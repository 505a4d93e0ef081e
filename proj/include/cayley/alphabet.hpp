#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "cayley/common.hpp"

namespace cayley {

using Sym = std::uint32_t;
inline constexpr Sym kNoSym = 0xffffffffu;

// Finite ordered alphabet.  arity 1: plain symbols, codes 0..n-1.
// arity k: the convolution alphabet over k tracks sharing one atom list;
// a symbol is a k-tuple of atoms-or-padding, excluding the all-padding tuple.
// Codes are mixed-radix over base n+1 (digit n = padding), track 0 most
// significant, so code order is lexicographic with padding sorting last.
class Alphabet {
 public:
  Alphabet() = default;

  static Alphabet atoms(std::vector<std::string> names) {
    Alphabet a;
    a.track_ = std::move(names);
    a.arity_ = 1;
    a.init();
    return a;
  }

  static Alphabet tuple(const Alphabet& base, int arity) {
    if (base.arity_ != 1) throw usage_error("tuple alphabet must be built over an arity-1 alphabet");
    if (arity < 1) throw usage_error("tuple arity must be positive");
    Alphabet a;
    a.track_ = base.track_;
    a.arity_ = arity;
    a.init();
    return a;
  }

  int arity() const { return arity_; }
  const std::vector<std::string>& track() const { return track_; }
  std::size_t track_size() const { return track_.size(); }
  Sym pad_digit() const { return static_cast<Sym>(track_.size()); }

  // Total symbol count: (n+1)^arity - 1.
  std::uint64_t size() const { return size_; }

  Alphabet base() const { return atoms(track_); }

  bool same_track(const Alphabet& o) const { return track_ == o.track_; }
  bool operator==(const Alphabet& o) const { return arity_ == o.arity_ && track_ == o.track_; }
  bool operator!=(const Alphabet& o) const { return !(*this == o); }

  // digits[i] in [0, n]; n means padding on track i.
  Sym encode(const std::vector<Sym>& digits) const {
    if (static_cast<int>(digits.size()) != arity_) throw usage_error("digit count does not match arity");
    std::uint64_t code = 0;
    bool all_pad = true;
    const std::uint64_t radix = track_.size() + 1;
    for (int i = 0; i < arity_; ++i) {
      if (digits[i] > track_.size()) throw usage_error("digit out of range");
      if (digits[i] != pad_digit()) all_pad = false;
      code = code * radix + digits[i];
    }
    if (all_pad) throw usage_error("all-padding tuple is not a symbol");
    return static_cast<Sym>(code);
  }

  std::vector<Sym> decode(Sym code) const {
    check(code);
    std::vector<Sym> digits(arity_);
    const std::uint64_t radix = track_.size() + 1;
    std::uint64_t c = code;
    for (int i = arity_ - 1; i >= 0; --i) {
      digits[i] = static_cast<Sym>(c % radix);
      c /= radix;
    }
    return digits;
  }

  Sym digit(Sym code, int trk) const {
    check(code);
    const std::uint64_t radix = track_.size() + 1;
    std::uint64_t c = code;
    for (int i = arity_ - 1; i > trk; --i) c /= radix;
    return static_cast<Sym>(c % radix);
  }

  Sym atom_index(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? kNoSym : it->second;
  }

  // Mangled display name; "~" marks padding in tuples.
  std::string name(Sym code) const {
    if (arity_ == 1) {
      check(code);
      return track_[code];
    }
    auto digits = decode(code);
    std::string out;
    for (int i = 0; i < arity_; ++i) {
      if (i) out += '|';
      out += digits[i] == pad_digit() ? "~" : track_[digits[i]];
    }
    return out;
  }

  std::vector<std::string> tuple_names(Sym code) const {
    auto digits = decode(code);
    std::vector<std::string> out;
    out.reserve(arity_);
    for (int i = 0; i < arity_; ++i)
      out.push_back(digits[i] == pad_digit() ? "~" : track_[digits[i]]);
    return out;
  }

 private:
  void init() {
    if (track_.empty()) throw usage_error("alphabet must have at least one symbol");
    const std::uint64_t radix = track_.size() + 1;
    std::uint64_t total = 1;
    for (int i = 0; i < arity_; ++i) {
      total *= radix;
      if (total > (1ull << 31)) throw cap_exceeded("tuple alphabet too large");
    }
    size_ = total - 1;
    for (std::size_t i = 0; i < track_.size(); ++i) {
      if (track_[i].empty() || track_[i] == "~") throw usage_error("invalid atom name");
      if (!index_.emplace(track_[i], static_cast<Sym>(i)).second)
        throw usage_error("duplicate atom name: " + track_[i]);
    }
  }

  void check(Sym code) const {
    if (code >= size_) throw usage_error("symbol code out of range");
  }

  std::vector<std::string> track_;
  std::unordered_map<std::string, Sym> index_;
  std::uint64_t size_ = 0;
  int arity_ = 1;
};

using Word = std::vector<Sym>;

// Convolution of k words over `base`: cell i holds track digits, shorter
// tracks padded at the tail; the result is over Alphabet::tuple(base, k)
// and has length max |w_i|.
inline Word convolve(const std::vector<Word>& tracks, const Alphabet& base) {
  if (base.arity() != 1) throw usage_error("convolve expects an arity-1 base alphabet");
  if (tracks.empty()) throw usage_error("convolve expects at least one track");
  Alphabet conv = Alphabet::tuple(base, static_cast<int>(tracks.size()));
  std::size_t len = 0;
  for (const auto& w : tracks) len = std::max(len, w.size());
  Word out;
  out.reserve(len);
  std::vector<Sym> digits(tracks.size());
  for (std::size_t i = 0; i < len; ++i) {
    for (std::size_t t = 0; t < tracks.size(); ++t) {
      if (i < tracks[t].size()) {
        if (tracks[t][i] >= base.size()) throw usage_error("convolve: symbol outside base alphabet");
        digits[t] = tracks[t][i];
      } else {
        digits[t] = conv.pad_digit();
      }
    }
    out.push_back(conv.encode(digits));
  }
  return out;
}

// Inverse of convolve; rejects words whose padding is not a per-track suffix.
inline std::vector<Word> deconvolve(const Word& w, const Alphabet& conv) {
  const int k = conv.arity();
  if (k < 1) throw usage_error("deconvolve expects a tuple alphabet");
  std::vector<Word> tracks(k);
  std::vector<bool> ended(k, false);
  for (Sym code : w) {
    auto digits = conv.decode(code);
    for (int t = 0; t < k; ++t) {
      if (digits[t] == conv.pad_digit()) {
        ended[t] = true;
      } else {
        if (ended[t]) throw usage_error("deconvolve: padding is not a per-track suffix");
        tracks[t].push_back(digits[t]);
      }
    }
  }
  return tracks;
}

inline Word word_from_names(const Alphabet& a, const std::vector<std::string>& names) {
  Word w;
  w.reserve(names.size());
  for (const auto& n : names) {
    Sym s = a.atom_index(n);
    if (s == kNoSym) throw usage_error("unknown symbol: " + n);
    w.push_back(s);
  }
  return w;
}

inline std::string word_to_string(const Alphabet& a, const Word& w) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (a.arity() > 1 && i) out += ' ';
    out += a.name(w[i]);
  }
  return out;
}

}  // namespace cayley

#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cayley/automaton.hpp"

namespace cayley {

using Json = nlohmann::json;

// On-disk automaton document.  Field set is closed: alphabet, states,
// initial, accepting, transitions.  The alphabet names one atom list shared
// by all tracks plus the arity; a transition symbol is an atom string at
// arity 1 and an array of atom-or-"~" strings otherwise.

inline Json alphabet_to_json(const Alphabet& a) {
  Json j;
  j["atoms"] = a.track();
  j["arity"] = a.arity();
  return j;
}

inline Alphabet alphabet_from_json(const Json& j) {
  if (!j.is_object()) throw usage_error("alphabet: expected object");
  for (auto& [key, val] : j.items())
    if (key != "atoms" && key != "arity") throw usage_error("alphabet: unknown field '" + key + "'");
  if (!j.contains("atoms") || !j["atoms"].is_array())
    throw usage_error("alphabet: missing atoms array");
  std::vector<std::string> atoms;
  for (auto& x : j["atoms"]) {
    if (!x.is_string()) throw usage_error("alphabet: atoms must be strings");
    atoms.push_back(x.get<std::string>());
  }
  int arity = 1;
  if (j.contains("arity")) {
    if (!j["arity"].is_number_integer()) throw usage_error("alphabet: arity must be an integer");
    arity = j["arity"].get<int>();
  }
  Alphabet base = Alphabet::atoms(atoms);
  return arity == 1 ? base : Alphabet::tuple(base, arity);
}

inline Json sym_to_json(const Alphabet& a, Sym code) {
  if (a.arity() == 1) return a.track()[code];
  Json arr = Json::array();
  for (Sym d : a.decode(code)) arr.push_back(d == a.pad_digit() ? "~" : a.track()[d]);
  return arr;
}

inline Sym sym_from_json(const Alphabet& a, const Json& j) {
  auto digit = [&](const Json& x) -> Sym {
    if (!x.is_string()) throw usage_error("transition symbol: expected atom string");
    std::string s = x.get<std::string>();
    if (s == "~") return a.pad_digit();
    Sym d = a.atom_index(s);
    if (d == kNoSym) throw usage_error("transition symbol: unknown atom '" + s + "'");
    return d;
  };
  if (a.arity() == 1) return digit(j);
  if (!j.is_array() || static_cast<int>(j.size()) != a.arity())
    throw usage_error("transition symbol: expected one atom per track");
  std::vector<Sym> digits;
  for (auto& x : j) digits.push_back(digit(x));
  return a.encode(digits);  // rejects the all-pad tuple
}

inline Json dfa_to_json(const Dfa& d) {
  Json j;
  j["alphabet"] = alphabet_to_json(d.alphabet);
  j["states"] = d.states;
  j["initial"] = d.initial;
  Json acc = Json::array();
  for (State s = 0; s < d.states; ++s)
    if (d.accepting[s]) acc.push_back(s);
  j["accepting"] = acc;
  Json trans = Json::array();
  for (State s = 0; s < d.states; ++s)
    for (auto [a, t] : d.next[s]) trans.push_back(Json::array({s, sym_to_json(d.alphabet, a), t}));
  j["transitions"] = trans;
  return j;
}

inline Dfa dfa_from_json(const Json& j) {
  if (!j.is_object()) throw usage_error("automaton: expected object");
  for (auto& [key, val] : j.items())
    if (key != "alphabet" && key != "states" && key != "initial" && key != "accepting" &&
        key != "transitions")
      throw usage_error("automaton: unknown field '" + key + "'");
  for (const char* need : {"alphabet", "states", "initial", "accepting", "transitions"})
    if (!j.contains(need)) throw usage_error(std::string("automaton: missing field '") + need + "'");

  Dfa d(alphabet_from_json(j["alphabet"]));
  if (!j["states"].is_number_unsigned()) throw usage_error("automaton: states must be a count");
  std::uint64_t n = j["states"].get<std::uint64_t>();
  if (n == 0 || n > (1u << 26)) throw usage_error("automaton: state count out of range");
  for (std::uint64_t i = 0; i < n; ++i) d.add_state(false);

  auto state_of = [&](const Json& x) -> State {
    if (!x.is_number_unsigned()) throw usage_error("automaton: state must be a nonnegative integer");
    std::uint64_t s = x.get<std::uint64_t>();
    if (s >= n) throw usage_error("automaton: state index out of range");
    return static_cast<State>(s);
  };
  d.initial = state_of(j["initial"]);
  if (!j["accepting"].is_array()) throw usage_error("automaton: accepting must be an array");
  for (auto& x : j["accepting"]) d.accepting[state_of(x)] = 1;
  if (!j["transitions"].is_array()) throw usage_error("automaton: transitions must be an array");
  for (auto& t : j["transitions"]) {
    if (!t.is_array() || t.size() != 3) throw usage_error("automaton: transition must be [from, symbol, to]");
    State from = state_of(t[0]);
    Sym sym = sym_from_json(d.alphabet, t[1]);
    State to = state_of(t[2]);
    d.add_edge(from, sym, to);
  }
  d.sort_edges();
  for (State s = 0; s < d.states; ++s)
    for (std::size_t i = 1; i < d.next[s].size(); ++i)
      if (d.next[s][i].first == d.next[s][i - 1].first)
        throw usage_error("automaton: duplicate transition leaves state " + std::to_string(s));
  return d;
}

inline void save_json(const Json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw usage_error("cannot write " + path);
  out << j.dump(1) << "\n";
}

inline Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw usage_error("cannot read " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw usage_error(path + ": " + e.what());
  }
  return j;
}

inline void save_dfa(const Dfa& d, const std::string& path) { save_json(dfa_to_json(d), path); }
inline Dfa load_dfa(const std::string& path) { return dfa_from_json(load_json(path)); }

}  // namespace cayley

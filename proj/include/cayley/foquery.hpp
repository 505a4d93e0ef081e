#pragma once

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cayley/alphabet.hpp"
#include "cayley/arith_automata.hpp"
#include "cayley/automaton.hpp"
#include "cayley/automaton_ops.hpp"
#include "cayley/codec.hpp"
#include "cayley/common.hpp"
#include "cayley/representation.hpp"

namespace cayley {

// A named relation on words: k synchronized tracks over one base alphabet,
// each track a word of the ambient domain language.
struct RelAutomaton {
  Dfa automaton;                      // k-track convolution, or 1-track for unary
  std::vector<std::string> varnames;  // one label per track
  Dfa domain;                         // the ambient language every track lives in
};

// {(u, v) in rel : u in lang} and its mirror image.
inline Dfa restrict_left(const Dfa& rel, const Dfa& lang) {
  if (rel.alphabet.arity() != 2) throw usage_error("restrict_left: pair relation expected");
  return join_on_tracks(rel, {0, 1}, lang, {0}).first;
}
inline Dfa restrict_right(const Dfa& rel, const Dfa& lang) {
  if (rel.alphabet.arity() != 2) throw usage_error("restrict_right: pair relation expected");
  return join_on_tracks(rel, {0, 1}, lang, {1}).first;
}

// ---------------------------------------------------------------------------
// Formulas: atoms over named relations, the boolean connectives, and
// existential quantification.  One bound variable per quantifier node;
// surface syntax with a variable list desugars to a nested chain.

struct Formula {
  enum class Kind { Atom, And, Or, Not, Exists };
  Kind kind = Kind::Atom;
  std::string name;                // Atom: relation name; Exists: bound variable
  std::vector<std::string> args;   // Atom: argument variables, in track order
  std::vector<Formula> kids;       // And/Or: two; Not/Exists: one
};

inline Formula f_atom(std::string rel, std::vector<std::string> args) {
  Formula f;
  f.kind = Formula::Kind::Atom;
  f.name = std::move(rel);
  f.args = std::move(args);
  return f;
}
inline Formula f_and(Formula a, Formula b) {
  Formula f;
  f.kind = Formula::Kind::And;
  f.kids.push_back(std::move(a));
  f.kids.push_back(std::move(b));
  return f;
}
inline Formula f_or(Formula a, Formula b) {
  Formula f;
  f.kind = Formula::Kind::Or;
  f.kids.push_back(std::move(a));
  f.kids.push_back(std::move(b));
  return f;
}
inline Formula f_not(Formula a) {
  Formula f;
  f.kind = Formula::Kind::Not;
  f.kids.push_back(std::move(a));
  return f;
}
inline Formula f_exists(std::string var, Formula body) {
  Formula f;
  f.kind = Formula::Kind::Exists;
  f.name = std::move(var);
  f.kids.push_back(std::move(body));
  return f;
}
inline Formula f_exists(const std::vector<std::string>& vars, Formula body) {
  if (vars.empty()) throw usage_error("f_exists: at least one variable");
  Formula f = std::move(body);
  for (auto it = vars.rbegin(); it != vars.rend(); ++it) f = f_exists(*it, std::move(f));
  return f;
}

inline std::string formula_str(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::Atom: {
      std::string out = f.name + "(";
      for (std::size_t j = 0; j < f.args.size(); ++j) {
        if (j) out += ",";
        out += f.args[j];
      }
      return out + ")";
    }
    case Formula::Kind::Not:
      return "!" + formula_str(f.kids[0]);
    case Formula::Kind::And:
      return "(" + formula_str(f.kids[0]) + " & " + formula_str(f.kids[1]) + ")";
    case Formula::Kind::Or:
      return "(" + formula_str(f.kids[0]) + " | " + formula_str(f.kids[1]) + ")";
    case Formula::Kind::Exists: {
      std::string vars = f.name;
      const Formula* body = &f.kids[0];
      while (body->kind == Formula::Kind::Exists) {
        vars += "," + body->name;
        body = &body->kids[0];
      }
      std::string b = formula_str(*body);
      if (b.empty() || b.front() != '(') b = "(" + b + ")";
      return "exists " + vars + " " + b;
    }
  }
  throw usage_error("formula_str: malformed node");
}

// Free variables in order of first appearance, quantifier binders excluded.
inline std::vector<std::string> formula_free_vars(const Formula& f) {
  std::vector<std::string> out, scope;
  std::set<std::string> seen;
  std::function<void(const Formula&)> walk = [&](const Formula& g) {
    switch (g.kind) {
      case Formula::Kind::Atom:
        for (const std::string& v : g.args) {
          if (std::find(scope.rbegin(), scope.rend(), v) != scope.rend()) continue;
          if (seen.insert(v).second) out.push_back(v);
        }
        break;
      case Formula::Kind::Exists:
        scope.push_back(g.name);
        walk(g.kids[0]);
        scope.pop_back();
        break;
      default:
        for (const Formula& k : g.kids) walk(k);
    }
  };
  walk(f);
  return out;
}

// Grammar, loosest binder first:  or := and ('|' and)*,  and := unary ('&' unary)*,
// unary := '!' unary | '(' or ')' | 'exists' v,.. '(' or ')' | name '(' v,.. ')'.
namespace detail {

struct FoParser {
  const std::string& s;
  std::size_t i = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw usage_error("formula: " + msg + " at offset " + std::to_string(i));
  }
  void skip() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool eat(char c) {
    skip();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }
  void expect(char c, const char* where) {
    if (!eat(c)) fail(std::string("expected '") + c + "' " + where);
  }
  std::string name_opt() {
    skip();
    std::size_t j = i;
    auto head = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };
    auto tail = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
    if (j >= s.size() || !head(s[j])) return "";
    while (j < s.size() && tail(s[j])) ++j;
    std::string n = s.substr(i, j - i);
    i = j;
    return n;
  }
  std::string name_req(const char* what) {
    std::string n = name_opt();
    if (n.empty()) fail(std::string("expected ") + what);
    if (n == "exists") fail("'exists' is reserved");
    return n;
  }
  std::vector<std::string> name_list(const char* what) {
    std::vector<std::string> v{name_req(what)};
    while (eat(',')) v.push_back(name_req(what));
    return v;
  }

  Formula parse_or() {
    Formula l = parse_and();
    while (eat('|')) l = f_or(std::move(l), parse_and());
    return l;
  }
  Formula parse_and() {
    Formula l = parse_unary();
    while (eat('&')) l = f_and(std::move(l), parse_unary());
    return l;
  }
  Formula parse_unary() {
    if (eat('!')) return f_not(parse_unary());
    skip();
    if (i < s.size() && s[i] == '(') {
      ++i;
      Formula f = parse_or();
      expect(')', "to close the group");
      return f;
    }
    std::string n = name_opt();
    if (n.empty()) fail("expected a relation, 'exists', '!' or '('");
    if (n == "exists") {
      std::vector<std::string> vars = name_list("a quantified variable");
      expect('(', "after the quantified variables");
      Formula body = parse_or();
      expect(')', "to close the quantifier body");
      return f_exists(vars, std::move(body));
    }
    expect('(', "after the relation name");
    std::vector<std::string> args = name_list("an argument variable");
    expect(')', "to close the argument list");
    return f_atom(std::move(n), std::move(args));
  }
};

}  // namespace detail

inline Formula parse_formula(const std::string& text) {
  detail::FoParser p{text};
  Formula f = p.parse_or();
  p.skip();
  if (p.i != text.size()) p.fail("unexpected trailing input");
  return f;
}

// ---------------------------------------------------------------------------
// Evaluation.  Variables get consecutive ranks in textual order of first
// appearance and every intermediate automaton keeps its tracks sorted by
// rank, so compilation is deterministic.  Conjunction joins on the shared
// tracks, disjunction first pads both sides to the union with unconstrained
// domain tracks, negation complements against the domain cylinder, and a
// quantifier block over a conjunction eliminates one variable at a time
// (cheapest join first) so the live arity stays near the formula's atom
// width rather than its variable count.

namespace detail {

struct FoRel {
  Dfa aut;
  std::vector<int> ids;  // ascending ranks, one per track
};

struct FoCtx {
  FoCtx(const std::map<std::string, RelAutomaton>& e, const Dfa& d) : env(e), domain(d) {}

  const std::map<std::string, RelAutomaton>& env;
  const Dfa& domain;
  int next_id = 0;
  std::vector<std::string> id_names;
  std::vector<std::pair<std::string, int>> binders;  // innermost last
  std::map<std::string, int> frees;
  std::set<std::string> validated;

  int fresh(std::string name) {
    id_names.push_back(std::move(name));
    return next_id++;
  }
  int resolve(const std::string& v) {
    for (auto it = binders.rbegin(); it != binders.rend(); ++it)
      if (it->first == v) return it->second;
    auto it = frees.find(v);
    if (it != frees.end()) return it->second;
    int id = fresh(v);
    frees.emplace(v, id);
    return id;
  }
};

inline Alphabet fo_alphabet(const FoCtx& ctx, std::size_t k) {
  return k <= 1 ? ctx.domain.alphabet : Alphabet::tuple(ctx.domain.alphabet, static_cast<int>(k));
}

// strip a k-track relation down to one track
inline Dfa fo_single_track(const Dfa& rel, int keep) {
  Dfa cur = rel;
  int pos = keep;
  while (cur.alphabet.arity() > 1) {
    int drop = pos == 0 ? 1 : 0;
    cur = project_min(cur, drop);
    if (drop < pos) --pos;
  }
  return cur;
}

inline void fo_validate(FoCtx& ctx, const std::string& name, const RelAutomaton& rel) {
  if (!ctx.validated.insert(name).second) return;
  const std::size_t k = rel.varnames.size();
  if (k == 0) throw usage_error("relation " + name + ": nullary relations are not supported");
  if (std::set<std::string>(rel.varnames.begin(), rel.varnames.end()).size() != k)
    throw usage_error("relation " + name + ": duplicate track names");
  if (!(rel.automaton.alphabet == fo_alphabet(ctx, k)))
    throw usage_error("relation " + name + ": tracks do not match the domain alphabet");
  if (!(rel.domain.alphabet == ctx.domain.alphabet) || !language_equal(rel.domain, ctx.domain))
    throw usage_error("relation " + name + ": relation domain differs from the evaluation domain");
  for (std::size_t t = 0; t < k; ++t) {
    Dfa tr = k == 1 ? rel.automaton : fo_single_track(rel.automaton, static_cast<int>(t));
    if (!language_subset(tr, ctx.domain))
      throw usage_error("relation " + name + ": track " + std::to_string(t) +
                        " escapes the domain");
  }
}

inline FoRel fo_join(FoRel a, const FoRel& b) {
  auto [aut, ids] = join_on_tracks(a.aut, a.ids, b.aut, b.ids);
  return {std::move(aut), std::move(ids)};
}

// callers only project ids that are present and never the last track
inline FoRel fo_project(FoRel r, int id) {
  auto pos = std::find(r.ids.begin(), r.ids.end(), id);
  r.aut = project_min(r.aut, static_cast<int>(pos - r.ids.begin()));
  r.ids.erase(pos);
  return r;
}

inline FoRel fo_cylindrify(const FoCtx& ctx, FoRel r, const std::vector<int>& target) {
  for (int id : target)
    if (std::find(r.ids.begin(), r.ids.end(), id) == r.ids.end()) {
      auto [aut, ids] = join_on_tracks(r.aut, r.ids, ctx.domain, {id});
      r = {std::move(aut), std::move(ids)};
    }
  return r;
}

inline FoRel fo_domain_cylinder(const FoCtx& ctx, const std::vector<int>& ids) {
  FoRel r{ctx.domain, {ids.front()}};
  for (std::size_t j = 1; j < ids.size(); ++j) {
    auto [aut, nids] = join_on_tracks(r.aut, r.ids, ctx.domain, {ids[j]});
    r = {std::move(aut), std::move(nids)};
  }
  return r;
}

inline void fo_flatten(const Formula& f, std::vector<const Formula*>& out) {
  if (f.kind == Formula::Kind::And) {
    fo_flatten(f.kids[0], out);
    fo_flatten(f.kids[1], out);
  } else {
    out.push_back(&f);
  }
}

inline FoRel fo_compile(FoCtx& ctx, const Formula& f);

inline FoRel fo_eliminate(FoCtx& ctx, std::vector<FoRel> parts, std::vector<int> bound) {
  std::vector<int> free_ids;
  {
    std::set<int> all;
    for (const FoRel& p : parts) all.insert(p.ids.begin(), p.ids.end());
    for (int id : bound)
      if (!all.count(id))
        throw usage_error("eval_formula: quantified variable " + ctx.id_names[id] +
                          " never occurs");
    for (int id : all)
      if (std::find(bound.begin(), bound.end(), id) == bound.end()) free_ids.push_back(id);
  }
  bool dead = false;
  while (!bound.empty() && !dead) {
    int best = -1;
    std::size_t best_size = 0;
    for (int v : bound) {  // ascending, so ties go to the first-seen variable
      std::set<int> u;
      for (const FoRel& p : parts)
        if (std::find(p.ids.begin(), p.ids.end(), v) != p.ids.end())
          u.insert(p.ids.begin(), p.ids.end());
      if (best < 0 || u.size() < best_size) {
        best = v;
        best_size = u.size();
      }
    }
    FoRel acc;
    bool have = false;
    std::vector<FoRel> rest;
    for (FoRel& p : parts) {
      if (std::find(p.ids.begin(), p.ids.end(), best) == p.ids.end()) {
        rest.push_back(std::move(p));
        continue;
      }
      if (!have) {
        acc = std::move(p);
        have = true;
      } else {
        acc = fo_join(std::move(acc), p);
      }
    }
    if (acc.ids.size() == 1) {
      // the variable met nothing else: the conjunct is a plain truth value
      if (!language_nonempty(acc.aut)) dead = true;
    } else {
      rest.push_back(fo_project(std::move(acc), best));
    }
    parts = std::move(rest);
    bound.erase(std::find(bound.begin(), bound.end(), best));
  }
  if (dead || parts.empty()) {
    if (free_ids.empty())
      throw usage_error("eval_formula: a subformula closes over all its variables");
    return {empty_dfa(fo_alphabet(ctx, free_ids.size())), std::move(free_ids)};
  }
  FoRel out = std::move(parts.front());
  for (std::size_t j = 1; j < parts.size(); ++j) out = fo_join(std::move(out), parts[j]);
  return out;
}

inline FoRel fo_compile(FoCtx& ctx, const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::Atom: {
      auto it = ctx.env.find(f.name);
      if (it == ctx.env.end()) throw usage_error("eval_formula: unbound relation " + f.name);
      const RelAutomaton& rel = it->second;
      fo_validate(ctx, f.name, rel);
      const std::size_t k = rel.varnames.size();
      if (f.args.size() != k)
        throw usage_error("relation " + f.name + " expects " + std::to_string(k) +
                          " arguments, got " + std::to_string(f.args.size()));
      std::vector<int> raw;
      raw.reserve(k);
      for (const std::string& v : f.args) raw.push_back(ctx.resolve(v));
      // a repeated argument gets a scratch track tied back by an equality
      // join; the scratch is projected away again immediately
      std::vector<std::pair<int, int>> dups;
      std::vector<int> track_ids;
      std::set<int> taken;
      for (int id : raw) {
        if (taken.insert(id).second) {
          track_ids.push_back(id);
        } else {
          int tmp = ctx.fresh(ctx.id_names[static_cast<std::size_t>(id)] + "'");
          dups.emplace_back(id, tmp);
          track_ids.push_back(tmp);
        }
      }
      std::vector<int> order(track_ids.size());
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(),
                [&](int x, int y) { return track_ids[x] < track_ids[y]; });
      std::vector<int> perm(track_ids.size());
      for (std::size_t j = 0; j < order.size(); ++j) perm[order[j]] = static_cast<int>(j);
      Dfa aut = k == 1 ? rel.automaton : permute_tracks(rel.automaton, perm);
      std::vector<int> ids;
      ids.reserve(order.size());
      for (int j : order) ids.push_back(track_ids[static_cast<std::size_t>(j)]);
      FoRel cur{minimize(aut), std::move(ids)};
      for (auto [orig, tmp] : dups) {
        Dfa eq = diagonal_relation(ctx.domain);
        auto [aut2, ids2] = join_on_tracks(cur.aut, cur.ids, eq, {orig, tmp});
        cur = fo_project({std::move(aut2), std::move(ids2)}, tmp);
      }
      return cur;
    }
    case Formula::Kind::And: {
      std::vector<const Formula*> leaves;
      fo_flatten(f, leaves);
      FoRel out = fo_compile(ctx, *leaves[0]);
      for (std::size_t j = 1; j < leaves.size(); ++j)
        out = fo_join(std::move(out), fo_compile(ctx, *leaves[j]));
      return out;
    }
    case Formula::Kind::Or: {
      FoRel a = fo_compile(ctx, f.kids[0]);
      FoRel b = fo_compile(ctx, f.kids[1]);
      std::set<int> u(a.ids.begin(), a.ids.end());
      u.insert(b.ids.begin(), b.ids.end());
      std::vector<int> target(u.begin(), u.end());
      a = fo_cylindrify(ctx, std::move(a), target);
      b = fo_cylindrify(ctx, std::move(b), target);
      return {union_lang(a.aut, b.aut), std::move(target)};
    }
    case Formula::Kind::Not: {
      FoRel c = fo_compile(ctx, f.kids[0]);
      FoRel cyl = fo_domain_cylinder(ctx, c.ids);
      return {difference(cyl.aut, c.aut), std::move(c.ids)};
    }
    case Formula::Kind::Exists: {
      std::vector<int> bound;
      const Formula* body = &f;
      std::size_t pushed = 0;
      while (body->kind == Formula::Kind::Exists) {
        int id = ctx.fresh(body->name);
        ctx.binders.emplace_back(body->name, id);
        ++pushed;
        bound.push_back(id);
        body = &body->kids[0];
      }
      std::vector<const Formula*> leaves;
      fo_flatten(*body, leaves);
      std::vector<FoRel> parts;
      parts.reserve(leaves.size());
      for (const Formula* leaf : leaves) parts.push_back(fo_compile(ctx, *leaf));
      ctx.binders.resize(ctx.binders.size() - pushed);
      return fo_eliminate(ctx, std::move(parts), std::move(bound));
    }
  }
  throw usage_error("eval_formula: malformed formula node");
}

}  // namespace detail

// Accepted tuples = the satisfying assignments with every variable ranging
// over the domain.  Tracks of the result follow first appearance in the
// formula.
inline RelAutomaton eval_formula(const Formula& phi, const std::map<std::string, RelAutomaton>& env,
                                 const Dfa& domain) {
  if (domain.alphabet.arity() != 1)
    throw usage_error("eval_formula: the domain must be a one-track language");
  detail::FoCtx ctx(env, domain);
  detail::FoRel out = detail::fo_compile(ctx, phi);
  if (out.ids.empty()) throw usage_error("eval_formula: the formula has no free variables");
  std::vector<std::string> vars;
  vars.reserve(out.ids.size());
  for (int id : out.ids) vars.push_back(ctx.id_names[static_cast<std::size_t>(id)]);
  return {std::move(out.aut), std::move(vars), domain};
}

// ---------------------------------------------------------------------------
// The Heisenberg name relations.  Names are a unary exponent followed by the
// convolution of two signed-binary coordinates; the exponent-zero names form
// a plane, and conjugation by the exponent generator shears that plane.  Each
// relation below pairs a plane name with its image under a fixed linear map:
// the shear itself, and the two line projectors.

struct HeisenbergRelations {
  Dfa r0;        // (x, z) -> (x, x + z), the shear
  Dfa r1;        // (x, z) -> (x, 0), first-line projector
  Dfa r2;        // (x, z) -> (0, z), second-line projector
  Word w0;       // name of the identity
  Dfa lh;        // all plane names (zero exponent)
  Dfa lh1, lh2;  // the two coordinate lines
  Dfa language;  // full ambient name language
};

inline HeisenbergRelations build_heisenberg_relations(const CayleyRep& rep) {
  Alphabet conv = Alphabet::tuple(beta_alphabet(), 2);
  Alphabet flat = flat_alphabet(conv);
  std::vector<std::string> names{"P", "N"};
  for (Sym c = 0; c < flat.size(); ++c) names.push_back(flat.name(c));
  Alphabet sigma = Alphabet::atoms(names);

  const char* kWrongFamily =
      "build_heisenberg_relations: expects the exponent-then-plane representation whose "
      "exponent generator shears the plane";
  if (!(rep.language.alphabet == sigma)) throw usage_error(kWrongFamily);

  Dfa uni = embed_atoms(unary_lang_dfa(), sigma);
  Dfa vconv = embed_atoms(flatten_lang(canonical_conv_dfa(2), flat), sigma);
  Dfa language = minimize(concat_lang(uni, vconv));
  if (!language_equal(rep.language, language)) throw usage_error(kWrongFamily);

  auto make_name = [&](const Int& y, const Int& z1, const Int& z2) {
    Word w = unary_encode(y);
    for (Sym cell : convolve(conv, {beta_encode(z1), beta_encode(z2)})) w.push_back(cell + 2);
    return w;
  };

  // pin the twist: conjugating a plane element by the exponent generator
  // must add the first coordinate into the second
  try {
    const Group& g = *rep.group;
    Elem t = rep.decode(make_name(1, 0, 0));
    Elem ti = g.inverse(t);
    auto conj = [&](const Elem& e) { return g.multiply(g.multiply(ti, e), t); };
    if (rep.encode(conj(rep.decode(make_name(0, 1, 0)))) != make_name(0, 1, 1) ||
        rep.encode(conj(rep.decode(make_name(0, 0, 1)))) != make_name(0, 0, 1))
      throw usage_error(kWrongFamily);
  } catch (const usage_error&) {
    throw usage_error(kWrongFamily);
  }

  auto coord_rel = [&](const std::vector<std::vector<Int>>& m) {
    return minimize(embed_pair(split_tracks_to_pair(linear_map_dfa(m), 2, flat), sigma));
  };

  HeisenbergRelations out;
  out.r0 = coord_rel({{Int(1), Int(0)}, {Int(1), Int(1)}});
  out.r1 = coord_rel({{Int(1), Int(0)}, {Int(0), Int(0)}});
  out.r2 = coord_rel({{Int(0), Int(0)}, {Int(0), Int(1)}});
  out.w0 = make_name(0, 0, 0);
  out.lh = minimize(vconv);
  out.lh1 = project_min(out.r1, 0);
  out.lh2 = project_min(out.r2, 0);
  out.language = std::move(language);
  return out;
}

// Ternary relation on names: (a, b, c) holds exactly when a and c lie on the
// first line and the coordinates add up, chased through the shear and the
// projectors.  The identity name rides through one bound variable pinned by
// a singleton relation, so atoms stay variable-only.
inline RelAutomaton eta_addition(const HeisenbergRelations& h) {
  std::map<std::string, RelAutomaton> env;
  env.emplace("R0", RelAutomaton{h.r0, {"u", "v"}, h.language});
  env.emplace("R1", RelAutomaton{h.r1, {"u", "v"}, h.language});
  env.emplace("R2", RelAutomaton{h.r2, {"u", "v"}, h.language});
  env.emplace("W0",
              RelAutomaton{minimize(literal_dfa(h.language.alphabet, {h.w0})), {"u"}, h.language});
  Formula phi = parse_formula(
      "exists r,s1,s2,t1,t2,t3 ("
      "R1(r,a)"
      " & (R0(b,s1) & R2(s1,s2) & R2(r,s2))"
      " & (R0(r,t1) & R2(t1,t2))"
      " & (exists w0v (R2(c,w0v) & W0(w0v)) & R0(c,t3) & R2(t3,t2)))");
  return eval_formula(phi, env, h.language);
}

}  // namespace cayley

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cayley/common.hpp"

namespace cayley {

// Group element payload. Exactly one shape is populated; which one is fixed
// by the owning group's family, so equality is plain field comparison.
//   v     coordinate families: Z^n, Heisenberg (x,y,z), UT_n strict upper
//         entries in row-lex order, semidirect (y, zbar), lamplighter cursor
//   supp  lamplighter lamp positions, sorted strictly increasing
//   a,b   direct product components
//   syll  free product normal form: alternating (factor, element), no
//         identity syllables
//   h,k   finite extension: H-part and coset index
struct Elem {
  std::vector<Int> v;
  std::vector<Int> supp;
  std::shared_ptr<const Elem> a, b;
  std::vector<std::pair<int, Elem>> syll;
  std::shared_ptr<const Elem> h;
  std::uint32_t k = 0;

  friend bool operator==(const Elem& x, const Elem& y) {
    auto pe = [](const std::shared_ptr<const Elem>& p, const std::shared_ptr<const Elem>& q) {
      if (!p || !q) return !p && !q;
      return *p == *q;
    };
    return x.v == y.v && x.supp == y.supp && x.syll == y.syll && x.k == y.k &&
           pe(x.a, y.a) && pe(x.b, y.b) && pe(x.h, y.h);
  }
  friend bool operator!=(const Elem& x, const Elem& y) { return !(x == y); }
};

// Canonical byte key, used as a hash-map key during ball searches.
inline void elem_key(const Elem& e, std::string& out) {
  out.push_back('v');
  for (const Int& z : e.v) {
    out += z.str();
    out.push_back(';');
  }
  if (!e.supp.empty()) {
    out.push_back('L');
    for (const Int& z : e.supp) {
      out += z.str();
      out.push_back(';');
    }
  }
  if (e.a) {
    out.push_back('(');
    elem_key(*e.a, out);
    out.push_back(',');
    elem_key(*e.b, out);
    out.push_back(')');
  }
  if (!e.syll.empty()) {
    out.push_back('F');
    for (const auto& [f, s] : e.syll) {
      out.push_back(f == 0 ? 'l' : 'r');
      elem_key(s, out);
    }
  }
  if (e.h) {
    out.push_back('E');
    out += std::to_string(e.k);
    elem_key(*e.h, out);
  }
}

inline std::string elem_key(const Elem& e) {
  std::string s;
  elem_key(e, s);
  return s;
}

namespace detail {

using Mat = std::vector<std::vector<Int>>;

inline Mat mat_identity(int n) {
  Mat m(n, std::vector<Int>(n, 0));
  for (int i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

inline Mat mat_mul(const Mat& x, const Mat& y) {
  int n = (int)x.size();
  Mat r(n, std::vector<Int>(n, 0));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      if (x[i][k] == 0) continue;
      for (int j = 0; j < n; ++j) r[i][j] += x[i][k] * y[k][j];
    }
  return r;
}

inline std::vector<Int> mat_apply(const Mat& m, const std::vector<Int>& v) {
  int n = (int)m.size();
  std::vector<Int> r(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r[i] += m[i][j] * v[j];
  return r;
}

inline Int mat_det(const Mat& m) {
  int n = (int)m.size();
  if (n == 1) return m[0][0];
  Int d = 0;
  for (int c = 0; c < n; ++c) {
    if (m[0][c] == 0) continue;
    Mat minor(n - 1, std::vector<Int>(n - 1));
    for (int i = 1; i < n; ++i) {
      int jj = 0;
      for (int j = 0; j < n; ++j)
        if (j != c) minor[i - 1][jj++] = m[i][j];
    }
    Int t = m[0][c] * mat_det(minor);
    d += (c % 2 == 0) ? t : Int(-t);
  }
  return d;
}

// Inverse of a unimodular integer matrix via the adjugate. Only small n.
inline Mat mat_inv_unimodular(const Mat& m) {
  int n = (int)m.size();
  Int det = mat_det(m);
  if (det != 1 && det != -1) throw usage_error("semidirect matrix must have determinant +1 or -1");
  Mat inv(n, std::vector<Int>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (n == 1) {
        inv[0][0] = det;
        break;
      }
      Mat minor(n - 1, std::vector<Int>(n - 1));
      int ii = 0;
      for (int r = 0; r < n; ++r) {
        if (r == j) continue;
        int jj = 0;
        for (int c = 0; c < n; ++c)
          if (c != i) minor[ii][jj++] = m[r][c];
        ++ii;
      }
      Int cof = mat_det(minor);
      if ((i + j) % 2 == 1) cof = -cof;
      inv[i][j] = det == 1 ? cof : Int(-cof);
    }
  return inv;
}

inline Mat mat_pow(const Mat& a, const Mat& ainv, const Int& k) {
  const Mat& b0 = k < 0 ? ainv : a;
  Int e = k < 0 ? Int(-k) : k;
  Mat r = mat_identity((int)a.size());
  Mat b = b0;
  while (e > 0) {
    if ((e & 1) != 0) r = mat_mul(r, b);
    b = mat_mul(b, b);
    e >>= 1;
  }
  return r;
}

// symmetric difference of two strictly increasing sequences
inline std::vector<Int> sym_diff(const std::vector<Int>& x, const std::vector<Int>& y) {
  std::vector<Int> r;
  std::size_t i = 0, j = 0;
  while (i < x.size() || j < y.size()) {
    if (j == y.size() || (i < x.size() && x[i] < y[j]))
      r.push_back(x[i++]);
    else if (i == x.size() || y[j] < x[i])
      r.push_back(y[j++]);
    else {
      ++i;
      ++j;
    }
  }
  return r;
}

inline int ut_index(int i, int j, int n) {
  // strict upper entries (i<j), rows in order, 0-based result
  int idx = 0;
  for (int r = 0; r < i; ++r) idx += n - 1 - r;
  return idx + (j - i - 1);
}

}  // namespace detail

struct Group;

// Coset data for a finite extension of a base group H:
//   elements are pairs (h, i) standing for h * k_i,
//   k_i * k_j = corr(i,j) * k_{idx(i,j)},
//   k_i * h * k_i^{-1} = act[i](h) with inverse automorphism act_inv[i].
// Generators of the extension are given as explicit (h, coset) pairs.
struct CosetSystem {
  std::uint32_t m = 0;
  std::vector<std::vector<std::pair<Elem, std::uint32_t>>> prod;
  std::vector<std::function<Elem(const Group&, const Elem&)>> act;
  std::vector<std::function<Elem(const Group&, const Elem&)>> act_inv;
  struct Gen {
    Elem h;
    std::uint32_t k = 0;
    std::string name;
  };
  std::vector<Gen> gens;
};

enum class Family { ZN, Heis, UT, Semi, Lamp, Direct, Free, Ext };

struct Group {
  Family fam = Family::ZN;
  int n = 1;  // rank (ZN, Semi) or matrix size (UT)
  detail::Mat A, Ainv;
  std::shared_ptr<const Group> g1, g2;
  std::shared_ptr<const Group> base;
  CosetSystem cs;
  std::vector<std::string> gen_names;

  int gen_count() const { return (int)gen_names.size(); }
  int letter_count() const { return 2 * gen_count(); }
  // letters 0..m-1 are the generators, m..2m-1 their inverses
  std::string letter_name(int l) const {
    int m = gen_count();
    return l < m ? gen_names[l] : gen_names[l - m] + "-";
  }
  int letter_index(const std::string& name) const {
    for (int l = 0; l < letter_count(); ++l)
      if (letter_name(l) == name) return l;
    throw usage_error("unknown generator letter: " + name);
  }

  Elem identity() const;
  Elem multiply(const Elem& x, const Elem& y) const;
  Elem inverse(const Elem& x) const;
  Elem generator(int i) const;
  Elem letter(int l) const {
    int m = gen_count();
    return l < m ? generator(l) : inverse(generator(l - m));
  }
  Elem eval(const std::vector<int>& word) const {
    Elem g = identity();
    for (int l : word) g = multiply(g, letter(l));
    return g;
  }

  // free part of the abelianization; every generator maps to a vector of
  // 1-norm at most 1, so |word| >= |abelianize(pi(word))|_1
  int ab_rank() const;
  std::vector<Int> abelianize(const Elem& e) const;
};

using GroupPtr = std::shared_ptr<const Group>;

inline Elem Group::identity() const {
  Elem e;
  switch (fam) {
    case Family::ZN: e.v.assign(n, 0); break;
    case Family::Heis: e.v.assign(3, 0); break;
    case Family::UT: e.v.assign((std::size_t)n * (n - 1) / 2, 0); break;
    case Family::Semi: e.v.assign(1 + n, 0); break;
    case Family::Lamp: e.v.assign(1, 0); break;
    case Family::Direct:
      e.a = std::make_shared<Elem>(g1->identity());
      e.b = std::make_shared<Elem>(g2->identity());
      break;
    case Family::Free: break;
    case Family::Ext:
      e.h = std::make_shared<Elem>(base->identity());
      e.k = 0;
      break;
  }
  return e;
}

inline Elem Group::multiply(const Elem& x, const Elem& y) const {
  Elem r;
  switch (fam) {
    case Family::ZN: {
      r.v.resize(n);
      for (int i = 0; i < n; ++i) r.v[i] = x.v[i] + y.v[i];
      break;
    }
    case Family::Heis: {
      r.v.resize(3);
      r.v[0] = x.v[0] + y.v[0];
      r.v[1] = x.v[1] + y.v[1];
      r.v[2] = x.v[2] + y.v[2] + x.v[0] * y.v[1];
      break;
    }
    case Family::UT: {
      r.v.assign((std::size_t)n * (n - 1) / 2, 0);
      auto at = [&](const Elem& e, int i, int j) -> Int {
        if (i == j) return 1;
        if (i > j) return 0;
        return e.v[detail::ut_index(i, j, n)];
      };
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          Int s = 0;
          for (int k2 = i; k2 <= j; ++k2) s += at(x, i, k2) * at(y, k2, j);
          r.v[detail::ut_index(i, j, n)] = s;
        }
      break;
    }
    case Family::Semi: {
      // (y1, z1)(y2, z2) = (y1+y2, A^{y2} z1 + z2)
      r.v.resize(1 + n);
      r.v[0] = x.v[0] + y.v[0];
      std::vector<Int> z1(x.v.begin() + 1, x.v.end());
      detail::Mat p = detail::mat_pow(A, Ainv, y.v[0]);
      std::vector<Int> moved = detail::mat_apply(p, z1);
      for (int i = 0; i < n; ++i) r.v[1 + i] = moved[i] + y.v[1 + i];
      break;
    }
    case Family::Lamp: {
      // (f, c)(f', c') = (f xor shift_c f', c + c')
      std::vector<Int> shifted;
      shifted.reserve(y.supp.size());
      for (const Int& s : y.supp) shifted.push_back(s + x.v[0]);
      r.supp = detail::sym_diff(x.supp, shifted);
      r.v.assign(1, x.v[0] + y.v[0]);
      break;
    }
    case Family::Direct: {
      r.a = std::make_shared<Elem>(g1->multiply(*x.a, *y.a));
      r.b = std::make_shared<Elem>(g2->multiply(*x.b, *y.b));
      break;
    }
    case Family::Free: {
      r.syll = x.syll;
      const Group& f0 = *g1;
      const Group& f1 = *g2;
      for (const auto& [f, s] : y.syll) {
        if (!r.syll.empty() && r.syll.back().first == f) {
          const Group& fac = f == 0 ? f0 : f1;
          Elem merged = fac.multiply(r.syll.back().second, s);
          r.syll.pop_back();
          if (!(merged == fac.identity())) r.syll.emplace_back(f, std::move(merged));
        } else {
          r.syll.emplace_back(f, s);
        }
      }
      break;
    }
    case Family::Ext: {
      const auto& [corr, kk] = cs.prod[x.k][y.k];
      Elem mid = cs.act[x.k](*base, *y.h);
      Elem hh = base->multiply(base->multiply(*x.h, mid), corr);
      r.h = std::make_shared<Elem>(std::move(hh));
      r.k = kk;
      break;
    }
  }
  return r;
}

inline Elem Group::inverse(const Elem& x) const {
  Elem r;
  switch (fam) {
    case Family::ZN: {
      r.v.resize(n);
      for (int i = 0; i < n; ++i) r.v[i] = -x.v[i];
      break;
    }
    case Family::Heis: {
      r.v.resize(3);
      r.v[0] = -x.v[0];
      r.v[1] = -x.v[1];
      r.v[2] = -x.v[2] + x.v[0] * x.v[1];
      break;
    }
    case Family::UT: {
      // (I+N)^{-1} = I - N + N^2 - ..., N strictly upper so nilpotent
      detail::Mat m = detail::mat_identity(n);
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) m[i][j] = x.v[detail::ut_index(i, j, n)];
      detail::Mat inv = detail::mat_identity(n), pw = detail::mat_identity(n);
      detail::Mat negn(n, std::vector<Int>(n, 0));
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) negn[i][j] = -m[i][j];
      for (int k2 = 1; k2 < n; ++k2) {
        pw = detail::mat_mul(pw, negn);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) inv[i][j] += pw[i][j];
      }
      r.v.resize((std::size_t)n * (n - 1) / 2);
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) r.v[detail::ut_index(i, j, n)] = inv[i][j];
      break;
    }
    case Family::Semi: {
      // (y, z)^{-1} = (-y, -A^{-y} z)
      r.v.assign(1 + n, 0);
      r.v[0] = -x.v[0];
      std::vector<Int> z(x.v.begin() + 1, x.v.end());
      detail::Mat p = detail::mat_pow(A, Ainv, r.v[0]);
      std::vector<Int> moved = detail::mat_apply(p, z);
      for (int i = 0; i < n; ++i) r.v[1 + i] = -moved[i];
      break;
    }
    case Family::Lamp: {
      r.v.assign(1, -x.v[0]);
      r.supp.reserve(x.supp.size());
      for (const Int& s : x.supp) r.supp.push_back(s - x.v[0]);
      break;
    }
    case Family::Direct: {
      r.a = std::make_shared<Elem>(g1->inverse(*x.a));
      r.b = std::make_shared<Elem>(g2->inverse(*x.b));
      break;
    }
    case Family::Free: {
      r.syll.reserve(x.syll.size());
      for (auto it = x.syll.rbegin(); it != x.syll.rend(); ++it)
        r.syll.emplace_back(it->first, (it->first == 0 ? *g1 : *g2).inverse(it->second));
      break;
    }
    case Family::Ext: {
      // solve (h,i)(h',j) = (e,0): j with idx(i,j)=0, h' = act_i^{-1}(h^{-1} corr^{-1})
      std::uint32_t j = 0;
      for (std::uint32_t c = 0; c < cs.m; ++c)
        if (cs.prod[x.k][c].second == 0) {
          j = c;
          break;
        }
      const Elem& corr = cs.prod[x.k][j].first;
      Elem t = base->inverse(base->multiply(*x.h, corr));
      r.h = std::make_shared<Elem>(cs.act_inv[x.k](*base, t));
      r.k = j;
      break;
    }
  }
  return r;
}

inline Elem Group::generator(int i) const {
  Elem e = identity();
  switch (fam) {
    case Family::ZN: e.v[i] = 1; break;
    case Family::Heis: e.v[i] = 1; break;
    case Family::UT: e.v[i] = 1; break;  // gen_names order matches ut_index order
    case Family::Semi: e.v[i] = 1; break;  // gen 0 = t, gen 1+i = coordinate step
    case Family::Lamp:
      if (i == 0)
        e.supp.assign(1, 0);  // toggle the lamp under the cursor
      else
        e.v[0] = 1;  // move the cursor
      break;
    case Family::Direct: {
      int m1 = g1->gen_count();
      if (i < m1)
        e.a = std::make_shared<Elem>(g1->generator(i));
      else
        e.b = std::make_shared<Elem>(g2->generator(i - m1));
      break;
    }
    case Family::Free: {
      int m1 = g1->gen_count();
      if (i < m1)
        e.syll.emplace_back(0, g1->generator(i));
      else
        e.syll.emplace_back(1, g2->generator(i - m1));
      break;
    }
    case Family::Ext:
      e.h = std::make_shared<Elem>(cs.gens[i].h);
      e.k = cs.gens[i].k;
      break;
  }
  return e;
}

inline int Group::ab_rank() const {
  switch (fam) {
    case Family::ZN: return n;
    case Family::Heis: return 2;
    case Family::UT: return n - 1;
    case Family::Semi: return 1;
    case Family::Lamp: return 1;
    case Family::Direct: return g1->ab_rank() + g2->ab_rank();
    case Family::Free: return g1->ab_rank() + g2->ab_rank();
    case Family::Ext: return 0;
  }
  return 0;
}

inline std::vector<Int> Group::abelianize(const Elem& e) const {
  std::vector<Int> r;
  switch (fam) {
    case Family::ZN: return e.v;
    case Family::Heis: return {e.v[0], e.v[1]};
    case Family::UT: {
      r.reserve(n - 1);
      for (int i = 0; i + 1 < n; ++i) r.push_back(e.v[detail::ut_index(i, i + 1, n)]);
      return r;
    }
    case Family::Semi: return {e.v[0]};
    case Family::Lamp: return {e.v[0]};
    case Family::Direct: {
      r = g1->abelianize(*e.a);
      std::vector<Int> s = g2->abelianize(*e.b);
      r.insert(r.end(), s.begin(), s.end());
      return r;
    }
    case Family::Free: {
      r.assign(ab_rank(), 0);
      int off1 = g1->ab_rank();
      for (const auto& [f, s] : e.syll) {
        std::vector<Int> part = (f == 0 ? *g1 : *g2).abelianize(s);
        int off = f == 0 ? 0 : off1;
        for (std::size_t i = 0; i < part.size(); ++i) r[off + i] += part[i];
      }
      return r;
    }
    case Family::Ext: return {};
  }
  return r;
}

// ---- factories ----

inline GroupPtr make_free_abelian(int n) {
  if (n < 1 || n > 64) throw usage_error("free abelian rank must be in [1,64]");
  auto g = std::make_shared<Group>();
  g->fam = Family::ZN;
  g->n = n;
  for (int i = 1; i <= n; ++i) g->gen_names.push_back("x" + std::to_string(i));
  return g;
}

inline GroupPtr make_heisenberg() {
  auto g = std::make_shared<Group>();
  g->fam = Family::Heis;
  g->gen_names = {"s", "p", "q"};
  return g;
}

inline GroupPtr make_ut(int n) {
  if (n < 2 || n > 9) throw usage_error("unitriangular size must be in [2,9]");
  auto g = std::make_shared<Group>();
  g->fam = Family::UT;
  g->n = n;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      g->gen_names.push_back("t" + std::to_string(i + 1) + std::to_string(j + 1));
  return g;
}

inline GroupPtr make_semidirect(const std::vector<std::vector<Int>>& a) {
  int n = (int)a.size();
  if (n < 1 || n > 6) throw usage_error("semidirect rank must be in [1,6]");
  for (const auto& row : a)
    if ((int)row.size() != n) throw usage_error("semidirect matrix must be square");
  auto g = std::make_shared<Group>();
  g->fam = Family::Semi;
  g->n = n;
  g->A = a;
  g->Ainv = detail::mat_inv_unimodular(a);
  g->gen_names.push_back("t");
  for (int i = 1; i <= n; ++i) g->gen_names.push_back("a" + std::to_string(i));
  return g;
}

inline GroupPtr make_lamplighter() {
  auto g = std::make_shared<Group>();
  g->fam = Family::Lamp;
  g->gen_names = {"a", "t"};
  return g;
}

namespace detail {

inline std::vector<std::string> merged_gen_names(const Group& a, const Group& b) {
  std::vector<std::string> names = a.gen_names;
  for (const std::string& nm : b.gen_names) {
    std::string cand = nm;
    while (std::find(names.begin(), names.end(), cand) != names.end()) cand += "'";
    names.push_back(cand);
  }
  return names;
}

}  // namespace detail

inline GroupPtr make_direct_product(GroupPtr a, GroupPtr b) {
  auto g = std::make_shared<Group>();
  g->fam = Family::Direct;
  g->g1 = std::move(a);
  g->g2 = std::move(b);
  g->gen_names = detail::merged_gen_names(*g->g1, *g->g2);
  return g;
}

inline GroupPtr make_free_product(GroupPtr a, GroupPtr b) {
  auto g = std::make_shared<Group>();
  g->fam = Family::Free;
  g->g1 = std::move(a);
  g->g2 = std::move(b);
  g->gen_names = detail::merged_gen_names(*g->g1, *g->g2);
  return g;
}

inline Elem random_element(const Group& g, std::mt19937_64& rng, int mag);

inline GroupPtr make_finite_extension(GroupPtr h, CosetSystem cs) {
  if (cs.m == 0 || cs.prod.size() != cs.m || cs.act.size() != cs.m || cs.act_inv.size() != cs.m)
    throw usage_error("coset system tables must cover every coset");
  for (const auto& row : cs.prod)
    if (row.size() != cs.m) throw usage_error("coset product table must be square");
  auto g = std::make_shared<Group>();
  g->fam = Family::Ext;
  g->base = std::move(h);
  g->cs = std::move(cs);
  for (const auto& gen : g->cs.gens) g->gen_names.push_back(gen.name);
  // spot-check associativity; an inconsistent table fails fast here
  std::mt19937_64 rng(12021);
  for (int t = 0; t < 200; ++t) {
    Elem x = random_element(*g, rng, 4), y = random_element(*g, rng, 4), z = random_element(*g, rng, 4);
    if (!(g->multiply(g->multiply(x, y), z) == g->multiply(x, g->multiply(y, z))))
      throw usage_error("coset system is not associative");
    Elem inv = g->inverse(x);
    if (!(g->multiply(x, inv) == g->identity()))
      throw usage_error("coset system breaks the inverse law");
  }
  return g;
}

// Infinite dihedral group as the index-2 extension of Z: elements n k^eps
// with k the reflection, k n k = -n.
inline GroupPtr make_dinf() {
  GroupPtr z = make_free_abelian(1);
  CosetSystem cs;
  cs.m = 2;
  Elem zero;
  zero.v.assign(1, 0);
  cs.prod = {{{zero, 0}, {zero, 1}}, {{zero, 1}, {zero, 0}}};
  cs.act.resize(2);
  cs.act_inv.resize(2);
  auto ident = [](const Group&, const Elem& e) { return e; };
  auto neg = [](const Group& h, const Elem& e) { return h.inverse(e); };
  cs.act[0] = ident;
  cs.act_inv[0] = ident;
  cs.act[1] = neg;
  cs.act_inv[1] = neg;
  Elem one;
  one.v.assign(1, 1);
  cs.gens.push_back({one, 0, "x"});
  cs.gens.push_back({zero, 1, "r"});
  return make_finite_extension(z, std::move(cs));
}

inline Elem random_element(const Group& g, std::mt19937_64& rng, int mag) {
  auto ri = [&](int lo, int hi) { return (int)(lo + (std::int64_t)(rng() % (std::uint64_t)(hi - lo + 1))); };
  Elem e = g.identity();
  switch (g.fam) {
    case Family::ZN:
    case Family::Heis:
    case Family::UT:
      for (auto& c : e.v) c = ri(-mag, mag);
      break;
    case Family::Semi:
      e.v[0] = ri(-3, 3);  // keep matrix powers small
      for (int i = 1; i <= g.n; ++i) e.v[i] = ri(-mag, mag);
      break;
    case Family::Lamp: {
      e.v[0] = ri(-mag, mag);
      std::vector<Int> s;
      for (int p = -mag; p <= mag; ++p)
        if (rng() % 3 == 0) s.push_back(p);
      e.supp = std::move(s);
      break;
    }
    case Family::Direct:
      e.a = std::make_shared<Elem>(random_element(*g.g1, rng, mag));
      e.b = std::make_shared<Elem>(random_element(*g.g2, rng, mag));
      break;
    case Family::Free: {
      int len = ri(0, 3);
      int f = ri(0, 1);
      for (int i = 0; i < len; ++i) {
        const Group& fac = f == 0 ? *g.g1 : *g.g2;
        Elem s = random_element(fac, rng, mag);
        if (s == fac.identity()) continue;  // only flip factors after a real syllable
        e.syll.emplace_back(f, std::move(s));
        f ^= 1;
      }
      break;
    }
    case Family::Ext:
      e.h = std::make_shared<Elem>(random_element(*g.base, rng, mag));
      e.k = (std::uint32_t)ri(0, (int)g.cs.m - 1);
      break;
  }
  return e;
}

}  // namespace cayley

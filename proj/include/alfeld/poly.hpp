#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "alfeld/rational.hpp"

namespace alfeld {

using Exps = std::array<uint8_t, 4>;  // exponents, unused variables zero

inline uint32_t pack_exps(const Exps& e) {
  return uint32_t(e[0]) | (uint32_t(e[1]) << 8) | (uint32_t(e[2]) << 16) | (uint32_t(e[3]) << 24);
}

/// All multi-indices in `nvars` variables of total degree exactly `degree`,
/// in lexicographic order, with O(1) index lookup.
struct MonoTable {
  int nvars = 0, degree = 0;
  std::vector<Exps> list;
  std::unordered_map<uint32_t, int32_t> pos;

  int32_t index(const Exps& e) const {
    auto it = pos.find(pack_exps(e));
    if (it == pos.end()) throw std::logic_error("MonoTable: exponent not in table");
    return it->second;
  }
  std::size_t size() const { return list.size(); }
};

inline const MonoTable& mono_table(int nvars, int degree) {
  static std::map<std::pair<int, int>, MonoTable> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto key = std::make_pair(nvars, degree);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  MonoTable t;
  t.nvars = nvars;
  t.degree = degree;
  Exps e{0, 0, 0, 0};
  // lexicographic descending on the first variable, recursively
  auto rec = [&](auto&& self, int var, int remaining) -> void {
    if (var == nvars - 1) {
      e[var] = static_cast<uint8_t>(remaining);
      t.pos[pack_exps(e)] = static_cast<int32_t>(t.list.size());
      t.list.push_back(e);
      e[var] = 0;
      return;
    }
    for (int d = remaining; d >= 0; --d) {
      e[var] = static_cast<uint8_t>(d);
      self(self, var + 1, remaining - d);
    }
    e[var] = 0;
  };
  rec(rec, 0, degree);
  return cache.emplace(key, std::move(t)).first->second;
}

inline std::size_t mono_count(int nvars, int degree) {
  // C(degree + nvars - 1, nvars - 1)
  std::size_t num = 1, den = 1;
  for (int i = 1; i <= nvars - 1; ++i) {
    num *= static_cast<std::size_t>(degree + i);
    den *= static_cast<std::size_t>(i);
  }
  return num / den;
}

/// Sparse exact polynomial in up to 4 variables (deterministic term order).
struct Poly {
  int nvars = 3;
  std::map<Exps, Rational> terms;

  Poly() = default;
  explicit Poly(int nv) : nvars(nv) {}

  static Poly constant(int nv, Rational c) {
    Poly p(nv);
    if (!is_zero(c)) p.terms[{0, 0, 0, 0}] = std::move(c);
    return p;
  }
  static Poly variable(int nv, int var, Rational coef = Rational(1)) {
    Poly p(nv);
    Exps e{0, 0, 0, 0};
    e[var] = 1;
    if (!is_zero(coef)) p.terms[e] = std::move(coef);
    return p;
  }

  bool is_zero_poly() const { return terms.empty(); }

  int degree() const {
    int d = 0;
    for (const auto& [e, c] : terms) d = std::max(d, int(e[0]) + e[1] + e[2] + e[3]);
    return d;
  }

  void add_term(const Exps& e, const Rational& c) {
    if (is_zero(c)) return;
    auto [it, fresh] = terms.emplace(e, c);
    if (!fresh) {
      it->second += c;
      if (is_zero(it->second)) terms.erase(it);
    }
  }

  Poly& operator+=(const Poly& o) {
    for (const auto& [e, c] : o.terms) add_term(e, c);
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    for (const auto& [e, c] : o.terms) add_term(e, -c);
    return *this;
  }
  Poly operator+(const Poly& o) const {
    Poly r = *this;
    r += o;
    return r;
  }
  Poly operator-(const Poly& o) const {
    Poly r = *this;
    r -= o;
    return r;
  }
  Poly operator*(const Rational& c) const {
    Poly r(nvars);
    if (is_zero(c)) return r;
    for (const auto& [e, v] : terms) r.terms[e] = v * c;
    return r;
  }
  Poly operator*(const Poly& o) const {
    Poly r(nvars);
    for (const auto& [e1, c1] : terms)
      for (const auto& [e2, c2] : o.terms) {
        Exps e{uint8_t(e1[0] + e2[0]), uint8_t(e1[1] + e2[1]), uint8_t(e1[2] + e2[2]),
               uint8_t(e1[3] + e2[3])};
        r.add_term(e, c1 * c2);
      }
    return r;
  }
  bool operator==(const Poly& o) const { return nvars == o.nvars && terms == o.terms; }

  Poly partial(int var) const {
    Poly r(nvars);
    for (const auto& [e, c] : terms) {
      if (e[var] == 0) continue;
      Exps d = e;
      d[var] -= 1;
      r.add_term(d, c * int(e[var]));
    }
    return r;
  }

  Rational eval(std::span<const Rational> x) const {
    Rational acc(0);
    for (const auto& [e, c] : terms) {
      Rational t = c;
      for (int v = 0; v < nvars; ++v)
        for (int k = 0; k < e[v]; ++k) t *= x[v];
      acc += t;
    }
    return acc;
  }

  /// Substitutes x_v -> subs[v]; the substitute polynomials share a variable
  /// count and may differ from nvars.
  Poly compose(const std::vector<Poly>& subs) const {
    if (static_cast<int>(subs.size()) != nvars) throw std::invalid_argument("compose: arity");
    int nv_out = subs.empty() ? nvars : subs[0].nvars;
    Poly r(nv_out);
    for (const auto& [e, c] : terms) {
      Poly t = Poly::constant(nv_out, c);
      for (int v = 0; v < nvars; ++v)
        for (int k = 0; k < e[v]; ++k) t = t * subs[v];
      r += t;
    }
    return r;
  }
};

/// Multiplies a barycentric polynomial by powers of (sum of variables) so
/// every term reaches total degree `degree`.
inline Poly homogenize(const Poly& p, int degree) {
  Poly sum(p.nvars);
  for (int v = 0; v < p.nvars; ++v) sum += Poly::variable(p.nvars, v);
  Poly r(p.nvars);
  for (const auto& [e, c] : p.terms) {
    int d = int(e[0]) + e[1] + e[2] + e[3];
    if (d > degree) throw std::invalid_argument("homogenize: degree too small");
    Poly t(p.nvars);
    t.terms[e] = c;
    for (int k = 0; k < degree - d; ++k) t = t * sum;
    r += t;
  }
  return r;
}

/// Exact integral of a barycentric monomial over a d-simplex of the given
/// measure: d! * measure * prod(a_i!) / (|a| + d)!.
inline Rational simplex_mono_integral(const Exps& e, int nvars, const Rational& measure) {
  int d = nvars - 1;
  int total = int(e[0]) + e[1] + e[2] + e[3];
  BigInt num = factorial(static_cast<unsigned>(d));
  for (int v = 0; v < nvars; ++v) num *= factorial(e[v]);
  BigInt den = factorial(static_cast<unsigned>(total + d));
  Rational frac(num, den);
  frac.canonicalize();
  return frac * measure;
}

/// Integral of a (not necessarily homogeneous) barycentric polynomial over a
/// simplex with (nvars-1) dimensions and the given measure.
inline Rational simplex_integral(const Poly& p, const Rational& measure) {
  Rational acc(0);
  for (const auto& [e, c] : p.terms) acc += c * simplex_mono_integral(e, p.nvars, measure);
  return acc;
}

/// Monomials of total degree <= d in nv variables (deterministic order),
/// e.g. multiplier bases P_d(F).
inline std::vector<Exps> monomials_upto(int nvars, int d) {
  std::vector<Exps> out;
  for (int deg = 0; deg <= d; ++deg) {
    const MonoTable& t = mono_table(nvars, deg);
    out.insert(out.end(), t.list.begin(), t.list.end());
  }
  return out;
}

}  // namespace alfeld

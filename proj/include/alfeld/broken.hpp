#pragma once

#include <array>
#include <cassert>
#include <functional>
#include <stdexcept>
#include <vector>

#include "alfeld/geometry.hpp"
#include "alfeld/poly.hpp"
#include "alfeld/rational.hpp"
#include "alfeld/sparse.hpp"

namespace alfeld {

enum class Shape { Scalar, Vector3, Matrix3, Sym3 };

inline int ncomp(Shape s) {
  switch (s) {
    case Shape::Scalar: return 1;
    case Shape::Vector3: return 3;
    case Shape::Matrix3: return 9;
    case Shape::Sym3: return 6;
  }
  return 0;
}

/// Component index of entry (i,j) in a Matrix3 field (row-major).
inline int mat_comp(int i, int j) { return 3 * i + j; }

/// Sym3 stores (00,01,02,11,12,22).
inline int sym_comp(int i, int j) {
  if (i > j) std::swap(i, j);
  static constexpr int tab[3][3] = {{0, 1, 2}, {-1, 3, 4}, {-1, -1, 5}};
  return tab[i][j];
}

/// Frobenius weights for the Sym3 component layout.
inline int sym_weight(int c) { return (c == 0 || c == 3 || c == 5) ? 1 : 2; }

inline std::size_t broken_block(int degree) { return mono_count(4, degree); }

inline std::size_t broken_dim(int degree, Shape s) {
  return 4 * static_cast<std::size_t>(ncomp(s)) * broken_block(degree);
}

inline int32_t coeff_index(int degree, Shape s, int subtet, int comp, int32_t mono) {
  return static_cast<int32_t>((static_cast<std::size_t>(subtet) * ncomp(s) + comp) *
                                  broken_block(degree) +
                              mono);
}

/// A piecewise polynomial field on an Alfeld split: per subtet and component,
/// coefficients in the homogeneous monomial basis of the subtet's own
/// barycentric coordinates.
class BrokenField {
 public:
  BrokenField(const AlfeldSplit* split, int degree, Shape shape)
      : split_(split), degree_(degree), shape_(shape), c_(broken_dim(degree, shape), Rational(0)) {}

  const AlfeldSplit& split() const { return *split_; }
  const AlfeldSplit* split_ptr() const { return split_; }
  int degree() const { return degree_; }
  Shape shape() const { return shape_; }
  std::size_t size() const { return c_.size(); }

  Rational& at(int subtet, int comp, int32_t mono) {
    return c_[coeff_index(degree_, shape_, subtet, comp, mono)];
  }
  const Rational& at(int subtet, int comp, int32_t mono) const {
    return c_[coeff_index(degree_, shape_, subtet, comp, mono)];
  }
  std::vector<Rational>& coeffs() { return c_; }
  const std::vector<Rational>& coeffs() const { return c_; }

  bool is_zero_field() const {
    for (const auto& v : c_)
      if (!is_zero(v)) return false;
    return true;
  }

  /// One component on one subtet as a polynomial in the 4 local barycentric
  /// coordinates (homogeneous of degree `degree_`).
  Poly component_poly(int subtet, int comp) const {
    const MonoTable& t = mono_table(4, degree_);
    Poly p(4);
    for (std::size_t m = 0; m < t.size(); ++m) {
      const Rational& v = at(subtet, comp, static_cast<int32_t>(m));
      if (!is_zero(v)) p.terms[t.list[m]] = v;
    }
    return p;
  }

  /// Sets one component from a barycentric polynomial of degree <= degree_.
  void set_component_poly(int subtet, int comp, const Poly& p) {
    const MonoTable& t = mono_table(4, degree_);
    Poly h = homogenize(p, degree_);
    for (std::size_t m = 0; m < t.size(); ++m) at(subtet, comp, static_cast<int32_t>(m)) = 0;
    for (const auto& [e, v] : h.terms) at(subtet, comp, t.index(e)) = v;
  }

  BrokenField& operator+=(const BrokenField& o) {
    check_same(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  BrokenField& operator-=(const BrokenField& o) {
    check_same(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  BrokenField operator*(const Rational& s) const {
    BrokenField r = *this;
    for (auto& v : r.c_) v *= s;
    return r;
  }
  bool operator==(const BrokenField& o) const {
    return degree_ == o.degree_ && shape_ == o.shape_ && c_ == o.c_;
  }

  /// Same field re-expressed at a higher homogeneous degree.
  BrokenField homogenized_to(int degree) const {
    if (degree == degree_) return *this;
    if (degree < degree_) throw std::invalid_argument("homogenized_to: cannot lower degree");
    BrokenField out(split_, degree, shape_);
    for (int k = 0; k < 4; ++k)
      for (int c = 0; c < ncomp(shape_); ++c) out.set_component_poly(k, c, component_poly(k, c));
    return out;
  }

  /// Value of component `comp` at point p evaluated from subtet k.
  Rational eval(int subtet, int comp, const Vec3& p) const {
    auto l = split_->subtet(subtet).barycentric(p);
    const MonoTable& t = mono_table(4, degree_);
    Rational acc(0);
    for (std::size_t m = 0; m < t.size(); ++m) {
      const Rational& v = at(subtet, comp, static_cast<int32_t>(m));
      if (is_zero(v)) continue;
      Rational term = v;
      const Exps& e = t.list[m];
      for (int x = 0; x < 4; ++x)
        for (int q = 0; q < e[x]; ++q) term *= l[x];
      acc += term;
    }
    return acc;
  }

 private:
  void check_same(const BrokenField& o) const {
    if (degree_ != o.degree_ || shape_ != o.shape_ || split_ != o.split_)
      throw std::invalid_argument("BrokenField: shape/degree mismatch");
  }

  const AlfeldSplit* split_;
  int degree_;
  Shape shape_;
  std::vector<Rational> c_;
};

/// Cartesian partial derivative of a barycentric polynomial on a subtet:
/// d/dx_j = sum_v grad(lambda_v)[j] * d/dlambda_v.
inline Poly cartesian_partial(const Poly& p, const SubTet& s, int j) {
  Poly out(4);
  for (int v = 0; v < 4; ++v) {
    const Rational& g = s.grad_lambda[v][j];
    if (is_zero(g)) continue;
    out += p.partial(v) * g;
  }
  return out;
}

/// A sparse exact linear map between broken coefficient vectors.
struct LinearOp {
  int degree_in = 0, degree_out = 0;
  Shape shape_in = Shape::Scalar, shape_out = Shape::Scalar;
  // terms produced by each input coefficient
  std::vector<std::vector<std::pair<int32_t, Rational>>> by_input;
  mutable std::vector<std::vector<std::pair<int32_t, Rational>>> by_output_;  // lazy

  std::size_t dim_in() const { return by_input.size(); }
  std::size_t dim_out() const { return broken_dim(degree_out, shape_out); }

  void add(int32_t in, int32_t out, const Rational& v) {
    if (!is_zero(v)) by_input[in].emplace_back(out, v);
  }

  std::vector<Rational> apply(const std::vector<Rational>& x) const {
    std::vector<Rational> y(dim_out(), Rational(0));
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (is_zero(x[i])) continue;
      for (const auto& [o, v] : by_input[i]) y[o] += v * x[i];
    }
    return y;
  }

  BrokenField apply(const BrokenField& f) const {
    BrokenField out(f.split_ptr(), degree_out, shape_out);
    out.coeffs() = apply(f.coeffs());
    return out;
  }

  SparseVec apply_sparse(const SparseVec& x) const {
    SparseVec y;
    for (const auto& [i, xv] : x.terms)
      for (const auto& [o, v] : by_input[static_cast<std::size_t>(i)]) y.add_term(o, v * xv);
    y.compress();
    return y;
  }

  const std::vector<std::vector<std::pair<int32_t, Rational>>>& by_output() const {
    if (by_output_.empty() && !by_input.empty()) {
      by_output_.resize(dim_out());
      for (std::size_t i = 0; i < by_input.size(); ++i)
        for (const auto& [o, v] : by_input[i]) by_output_[o].emplace_back(static_cast<int32_t>(i), v);
    }
    return by_output_;
  }

  /// row_on_output . Op, as a row over input coefficients.
  SparseVec compose_row(const SparseVec& row) const {
    const auto& T = by_output();
    SparseVec out;
    for (const auto& [o, rv] : row.terms)
      for (const auto& [i, v] : T[static_cast<std::size_t>(o)]) out.add_term(i, rv * v);
    out.compress();
    return out;
  }
};

/// B after A (apply A first).
inline LinearOp compose(const LinearOp& b, const LinearOp& a) {
  if (a.degree_out != b.degree_in || a.shape_out != b.shape_in)
    throw std::invalid_argument("compose: op shapes do not chain");
  LinearOp r;
  r.degree_in = a.degree_in;
  r.shape_in = a.shape_in;
  r.degree_out = b.degree_out;
  r.shape_out = b.shape_out;
  r.by_input.resize(a.by_input.size());
  for (std::size_t i = 0; i < a.by_input.size(); ++i) {
    SparseVec acc;
    for (const auto& [mid, v] : a.by_input[i])
      for (const auto& [o, w] : b.by_input[static_cast<std::size_t>(mid)]) acc.add_term(o, v * w);
    acc.compress();
    r.by_input[i].assign(acc.terms.begin(), acc.terms.end());
  }
  return r;
}

namespace detail {

/// Per-subtet table: coefficient terms of d(lambda^m)/dx_j over degree-(r-1)
/// monomials.
inline void scalar_derivative_terms(const AlfeldSplit& split, int r, int subtet, int j,
                                    int32_t mono,
                                    std::vector<std::pair<int32_t, Rational>>& out) {
  const MonoTable& tin = mono_table(4, r);
  const MonoTable& tout = mono_table(4, r - 1);
  const SubTet& s = split.subtet(subtet);
  const Exps& e = tin.list[mono];
  for (int v = 0; v < 4; ++v) {
    if (e[v] == 0) continue;
    const Rational& g = s.grad_lambda[v][j];
    if (is_zero(g)) continue;
    Exps d = e;
    d[v] -= 1;
    out.emplace_back(tout.index(d), g * int(e[v]));
  }
}

}  // namespace detail

/// grad: Scalar -> Vector3 ((grad f)_j = df/dx_j) or Vector3 -> Matrix3
/// (Jacobian rows, (grad v)_ij = dv_i/dx_j).
inline LinearOp op_grad(const AlfeldSplit& split, int r, Shape in) {
  if (in != Shape::Scalar && in != Shape::Vector3) throw std::invalid_argument("op_grad: shape");
  LinearOp op;
  op.degree_in = r;
  op.degree_out = r > 0 ? r - 1 : 0;
  op.shape_in = in;
  op.shape_out = in == Shape::Scalar ? Shape::Vector3 : Shape::Matrix3;
  op.by_input.resize(broken_dim(r, in));
  if (r == 0) return op;
  const MonoTable& tin = mono_table(4, r);
  for (int k = 0; k < 4; ++k)
    for (int c = 0; c < ncomp(in); ++c)
      for (int32_t m = 0; m < static_cast<int32_t>(tin.size()); ++m) {
        int32_t iidx = coeff_index(r, in, k, c, m);
        for (int j = 0; j < 3; ++j) {
          std::vector<std::pair<int32_t, Rational>> terms;
          detail::scalar_derivative_terms(split, r, k, j, m, terms);
          int oc = (in == Shape::Scalar) ? j : mat_comp(c, j);
          for (auto& [om, v] : terms)
            op.add(iidx, coeff_index(op.degree_out, op.shape_out, k, oc, om), v);
        }
      }
  return op;
}

/// curl: Vector3 -> Vector3, or Matrix3 -> Matrix3 row by row.
inline LinearOp op_curl(const AlfeldSplit& split, int r, Shape in) {
  if (in != Shape::Vector3 && in != Shape::Matrix3) throw std::invalid_argument("op_curl: shape");
  LinearOp op;
  op.degree_in = r;
  op.degree_out = r > 0 ? r - 1 : 0;
  op.shape_in = in;
  op.shape_out = in;
  op.by_input.resize(broken_dim(r, in));
  if (r == 0) return op;
  const MonoTable& tin = mono_table(4, r);
  int nrows = (in == Shape::Vector3) ? 1 : 3;
  // (curl v)_0 = dv2/dy - dv1/dz, etc., per row
  static constexpr int comp_a[3] = {2, 0, 1};
  static constexpr int dir_a[3] = {1, 2, 0};
  static constexpr int comp_b[3] = {1, 2, 0};
  static constexpr int dir_b[3] = {2, 0, 1};
  for (int k = 0; k < 4; ++k)
    for (int row = 0; row < nrows; ++row)
      for (int cc = 0; cc < 3; ++cc)
        for (int32_t m = 0; m < static_cast<int32_t>(tin.size()); ++m) {
          int in_comp = (in == Shape::Vector3) ? cc : mat_comp(row, cc);
          int32_t iidx = coeff_index(r, in, k, in_comp, m);
          for (int oc = 0; oc < 3; ++oc) {
            // contribution of component cc to (curl .)_oc
            int sign = 0, dir = -1;
            if (comp_a[oc] == cc) {
              sign = 1;
              dir = dir_a[oc];
            } else if (comp_b[oc] == cc) {
              sign = -1;
              dir = dir_b[oc];
            } else {
              continue;
            }
            std::vector<std::pair<int32_t, Rational>> terms;
            detail::scalar_derivative_terms(split, r, k, dir, m, terms);
            int out_comp = (in == Shape::Vector3) ? oc : mat_comp(row, oc);
            for (auto& [om, v] : terms)
              op.add(iidx, coeff_index(op.degree_out, in, k, out_comp, om), sign * v);
          }
        }
  return op;
}

/// div: Vector3 -> Scalar, or Matrix3 -> Vector3 row by row.
inline LinearOp op_div(const AlfeldSplit& split, int r, Shape in) {
  if (in != Shape::Vector3 && in != Shape::Matrix3) throw std::invalid_argument("op_div: shape");
  LinearOp op;
  op.degree_in = r;
  op.degree_out = r > 0 ? r - 1 : 0;
  op.shape_in = in;
  op.shape_out = in == Shape::Vector3 ? Shape::Scalar : Shape::Vector3;
  op.by_input.resize(broken_dim(r, in));
  if (r == 0) return op;
  const MonoTable& tin = mono_table(4, r);
  int nrows = (in == Shape::Vector3) ? 1 : 3;
  for (int k = 0; k < 4; ++k)
    for (int row = 0; row < nrows; ++row)
      for (int j = 0; j < 3; ++j)
        for (int32_t m = 0; m < static_cast<int32_t>(tin.size()); ++m) {
          int in_comp = (in == Shape::Vector3) ? j : mat_comp(row, j);
          int32_t iidx = coeff_index(r, in, k, in_comp, m);
          std::vector<std::pair<int32_t, Rational>> terms;
          detail::scalar_derivative_terms(split, r, k, j, m, terms);
          int out_comp = (in == Shape::Vector3) ? 0 : row;
          for (auto& [om, v] : terms)
            op.add(iidx, coeff_index(op.degree_out, op.shape_out, k, out_comp, om), v);
        }
  return op;
}

/// Pointwise linear component maps (constant coefficients).
enum class AlgebraicMap {
  Xi,          // M' - tr(M) I          Matrix3 -> Matrix3
  XiInv,       // M' - tr(M)/2 I        Matrix3 -> Matrix3
  Mskw,        // Vector3 -> Matrix3
  Vskw,        // Matrix3 -> Vector3
  SymPart,     // Matrix3 -> Matrix3
  SkwPart,     // Matrix3 -> Matrix3
  Transpose,   // Matrix3 -> Matrix3
  TraceMap,    // Matrix3 -> Scalar
  SymToFull,   // Sym3 -> Matrix3
  FullToSym,   // Matrix3 -> Sym3 (takes the symmetric part)
};

inline void algebraic_component_terms(AlgebraicMap map, int in_comp,
                                      std::vector<std::pair<int, Rational>>& out) {
  auto half = Rational(1, 2);
  switch (map) {
    case AlgebraicMap::Xi: {
      int i = in_comp / 3, j = in_comp % 3;
      out.emplace_back(mat_comp(j, i), Rational(1));
      if (i == j)
        for (int d = 0; d < 3; ++d) out.emplace_back(mat_comp(d, d), Rational(-1));
      break;
    }
    case AlgebraicMap::XiInv: {
      int i = in_comp / 3, j = in_comp % 3;
      out.emplace_back(mat_comp(j, i), Rational(1));
      if (i == j)
        for (int d = 0; d < 3; ++d) out.emplace_back(mat_comp(d, d), -half);
      break;
    }
    case AlgebraicMap::Mskw: {
      // mskw(v) = [[0,-v3,v2],[v3,0,-v1],[-v2,v1,0]]
      static constexpr int plus[3][2] = {{2, 1}, {0, 2}, {1, 0}};
      static constexpr int minus[3][2] = {{1, 2}, {2, 0}, {0, 1}};
      out.emplace_back(mat_comp(plus[in_comp][0], plus[in_comp][1]), Rational(1));
      out.emplace_back(mat_comp(minus[in_comp][0], minus[in_comp][1]), Rational(-1));
      break;
    }
    case AlgebraicMap::Vskw: {
      // vskw(M) = ((M21-M12)/2, (M02-M20)/2, (M10-M01)/2)
      int i = in_comp / 3, j = in_comp % 3;
      if (i == 2 && j == 1) out.emplace_back(0, half);
      if (i == 1 && j == 2) out.emplace_back(0, -half);
      if (i == 0 && j == 2) out.emplace_back(1, half);
      if (i == 2 && j == 0) out.emplace_back(1, -half);
      if (i == 1 && j == 0) out.emplace_back(2, half);
      if (i == 0 && j == 1) out.emplace_back(2, -half);
      break;
    }
    case AlgebraicMap::SymPart: {
      int i = in_comp / 3, j = in_comp % 3;
      out.emplace_back(mat_comp(i, j), half);
      out.emplace_back(mat_comp(j, i), half);
      break;
    }
    case AlgebraicMap::SkwPart: {
      int i = in_comp / 3, j = in_comp % 3;
      out.emplace_back(mat_comp(i, j), half);
      out.emplace_back(mat_comp(j, i), -half);
      break;
    }
    case AlgebraicMap::Transpose: {
      int i = in_comp / 3, j = in_comp % 3;
      out.emplace_back(mat_comp(j, i), Rational(1));
      break;
    }
    case AlgebraicMap::TraceMap: {
      int i = in_comp / 3, j = in_comp % 3;
      if (i == j) out.emplace_back(0, Rational(1));
      break;
    }
    case AlgebraicMap::SymToFull: {
      static constexpr int ii[6] = {0, 0, 0, 1, 1, 2};
      static constexpr int jj[6] = {0, 1, 2, 1, 2, 2};
      int i = ii[in_comp], j = jj[in_comp];
      out.emplace_back(mat_comp(i, j), Rational(1));
      if (i != j) out.emplace_back(mat_comp(j, i), Rational(1));
      break;
    }
    case AlgebraicMap::FullToSym: {
      int i = in_comp / 3, j = in_comp % 3;
      if (i == j)
        out.emplace_back(sym_comp(i, j), Rational(1));
      else
        out.emplace_back(sym_comp(i, j), half);
      break;
    }
  }
}

inline Shape algebraic_shape_in(AlgebraicMap m) {
  switch (m) {
    case AlgebraicMap::Mskw: return Shape::Vector3;
    case AlgebraicMap::SymToFull: return Shape::Sym3;
    default: return Shape::Matrix3;
  }
}

inline Shape algebraic_shape_out(AlgebraicMap m) {
  switch (m) {
    case AlgebraicMap::Vskw: return Shape::Vector3;
    case AlgebraicMap::TraceMap: return Shape::Scalar;
    case AlgebraicMap::FullToSym: return Shape::Sym3;
    default: return Shape::Matrix3;
  }
}

inline LinearOp op_algebraic(AlgebraicMap map, int r) {
  LinearOp op;
  op.degree_in = op.degree_out = r;
  op.shape_in = algebraic_shape_in(map);
  op.shape_out = algebraic_shape_out(map);
  op.by_input.resize(broken_dim(r, op.shape_in));
  std::size_t block = broken_block(r);
  for (int k = 0; k < 4; ++k)
    for (int c = 0; c < ncomp(op.shape_in); ++c) {
      std::vector<std::pair<int, Rational>> terms;
      algebraic_component_terms(map, c, terms);
      for (int32_t m = 0; m < static_cast<int32_t>(block); ++m) {
        int32_t iidx = coeff_index(r, op.shape_in, k, c, m);
        for (auto& [oc, v] : terms)
          op.add(iidx, coeff_index(r, op.shape_out, k, oc, m), v);
      }
    }
  return op;
}

inline LinearOp op_scale(int r, Shape s, const Rational& c) {
  LinearOp op;
  op.degree_in = op.degree_out = r;
  op.shape_in = op.shape_out = s;
  op.by_input.resize(broken_dim(r, s));
  for (std::size_t i = 0; i < op.by_input.size(); ++i)
    op.add(static_cast<int32_t>(i), static_cast<int32_t>(i), c);
  return op;
}

inline BrokenField apply_algebraic(AlgebraicMap map, const BrokenField& f) {
  return op_algebraic(map, f.degree()).apply(f);
}

/// inc u = curl (curl u)' for symmetric u.
inline BrokenField inc_field(const BrokenField& u) {
  if (u.shape() != Shape::Sym3) throw std::invalid_argument("inc: field must be symmetric");
  const AlfeldSplit& sp = u.split();
  BrokenField full = apply_algebraic(AlgebraicMap::SymToFull, u);
  BrokenField c1 = op_curl(sp, full.degree(), Shape::Matrix3).apply(full);
  BrokenField c1t = apply_algebraic(AlgebraicMap::Transpose, c1);
  return op_curl(sp, c1t.degree(), Shape::Matrix3).apply(c1t);
}

/// deff v = sym(grad v), the linearized strain.
inline BrokenField deff_field(const BrokenField& v) {
  if (v.shape() != Shape::Vector3) throw std::invalid_argument("deff: field must be a vector");
  BrokenField g = op_grad(v.split(), v.degree(), Shape::Vector3).apply(v);
  return apply_algebraic(AlgebraicMap::FullToSym, g);
}

/// inc as a LinearOp: Sym3(r) -> Matrix3(r-2), via curl o transpose o curl.
inline LinearOp op_inc(const AlfeldSplit& split, int r) {
  LinearOp to_full = op_algebraic(AlgebraicMap::SymToFull, r);
  LinearOp c1 = op_curl(split, r, Shape::Matrix3);
  LinearOp tr = op_algebraic(AlgebraicMap::Transpose, c1.degree_out);
  LinearOp c2 = op_curl(split, tr.degree_out, Shape::Matrix3);
  return compose(c2, compose(tr, compose(c1, to_full)));
}

/// embed a global polynomial (Cartesian coordinates) into the broken space
inline BrokenField embed_global(const AlfeldSplit& split, const std::vector<Poly>& comps,
                                int degree, Shape shape) {
  if (static_cast<int>(comps.size()) != ncomp(shape))
    throw std::invalid_argument("embed_global: component count");
  BrokenField out(&split, degree, shape);
  for (int k = 0; k < 4; ++k) {
    const SubTet& s = split.subtet(k);
    // x_j as degree-1 barycentric polynomials
    std::vector<Poly> xyz;
    for (int j = 0; j < 3; ++j) {
      Poly xj(4);
      for (int v = 0; v < 4; ++v) xj += Poly::variable(4, v, s.coords[v][j]);
      xyz.push_back(xj);
    }
    for (int c = 0; c < ncomp(shape); ++c) {
      if (comps[c].degree() > degree) throw std::invalid_argument("embed_global: degree too low");
      out.set_component_poly(k, c, comps[c].compose(xyz));
    }
  }
  return out;
}

/// D^alpha (Cartesian multi-order) of one component at a parent vertex,
/// evaluated from one subtet. Returns the exact limiting value.
inline Rational eval_vertex_derivative(const BrokenField& f, int subtet, int comp,
                                       int parent_vertex, const std::array<int, 3>& alpha) {
  const AlfeldSplit& sp = f.split();
  int loc = sp.local_index(subtet, parent_vertex);
  if (loc < 0) throw std::invalid_argument("vertex not in subtet");
  Poly p = f.component_poly(subtet, comp);
  const SubTet& s = sp.subtet(subtet);
  for (int j = 0; j < 3; ++j)
    for (int q = 0; q < alpha[j]; ++q) p = cartesian_partial(p, s, j);
  std::array<Rational, 4> l{};
  l[loc] = 1;
  return p.eval(std::span<const Rational>(l.data(), 4));
}

/// All pairwise differences of D^alpha limits at a parent vertex, for every
/// |alpha| <= order; empty-of-nonzeros iff f is C^order there.
inline std::vector<Rational> jump_at_vertex(const BrokenField& f, int parent_vertex, int order) {
  const AlfeldSplit& sp = f.split();
  auto ks = sp.subtets_at_vertex(parent_vertex);
  std::vector<std::array<int, 3>> alphas;
  for (int total = 0; total <= order; ++total)
    for (int a = total; a >= 0; --a)
      for (int b = total - a; b >= 0; --b) alphas.push_back({a, b, total - a - b});
  std::vector<Rational> out;
  for (int c = 0; c < ncomp(f.shape()); ++c)
    for (const auto& al : alphas)
      for (int p = 0; p < 3; ++p)
        for (int q = p + 1; q < 3; ++q)
          out.push_back(eval_vertex_derivative(f, ks[p], c, parent_vertex, al) -
                        eval_vertex_derivative(f, ks[q], c, parent_vertex, al));
  return out;
}

// ---------------------------------------------------------------------------
// traces
// ---------------------------------------------------------------------------

/// Trace of one component on a parent face (owner subtet is the one opposite
/// the face's opposite vertex). Result: homogeneous barycentric polynomial in
/// the face's 3 vertices, ordered as ParentFace::verts.
inline Poly trace_on_parent_face(const BrokenField& f, int face, int comp) {
  const AlfeldSplit& sp = f.split();
  const ParentFace& pf = sp.faces()[face];
  int k = pf.opposite;  // T_i has the parent face opposite x_i as its facet
  const MonoTable& tin = mono_table(4, f.degree());
  std::array<int, 3> loc{};
  for (int m = 0; m < 3; ++m) loc[m] = sp.local_index(k, pf.verts[m]);
  int zloc = 0;  // local index of z
  Poly out(3);
  for (std::size_t mi = 0; mi < tin.size(); ++mi) {
    const Rational& v = f.at(k, comp, static_cast<int32_t>(mi));
    if (is_zero(v)) continue;
    const Exps& e = tin.list[mi];
    if (e[zloc] != 0) continue;  // z-coordinate vanishes on the parent face
    Exps out_e{0, 0, 0, 0};
    for (int m = 0; m < 3; ++m) out_e[m] = e[loc[m]];
    out.add_term(out_e, v);
  }
  return out;
}

/// Trace on an interior facet [z, x_i, x_j] from adjacency side 0 or 1.
/// Variables ordered (z, x_i, x_j).
inline Poly trace_on_interior_facet(const BrokenField& f, int facet, int side, int comp) {
  const AlfeldSplit& sp = f.split();
  const InteriorFacet& g = sp.interior_facets()[facet];
  int k = g.adjacent[side];
  const MonoTable& tin = mono_table(4, f.degree());
  std::array<int, 3> loc = {sp.local_index(k, 4), sp.local_index(k, g.xs[0]),
                            sp.local_index(k, g.xs[1])};
  // the vertex of T_k not on the facet is x_m where m indexes the other side
  int missing = sp.local_index(k, g.adjacent[1 - side]);
  Poly out(3);
  for (std::size_t mi = 0; mi < tin.size(); ++mi) {
    const Rational& v = f.at(k, comp, static_cast<int32_t>(mi));
    if (is_zero(v)) continue;
    const Exps& e = tin.list[mi];
    if (e[missing] != 0) continue;
    Exps out_e{0, 0, 0, 0};
    for (int m = 0; m < 3; ++m) out_e[m] = e[loc[m]];
    out.add_term(out_e, v);
  }
  return out;
}

/// Trace on a parent edge [a,b] from a containing subtet; 2-variable
/// homogeneous polynomial in (nu_a, nu_b).
inline Poly trace_on_parent_edge(const BrokenField& f, int edge, int comp) {
  const AlfeldSplit& sp = f.split();
  const ParentEdge& pe = sp.edges()[edge];
  int k = sp.subtets_at_edge(pe.verts[0], pe.verts[1])[0];
  const MonoTable& tin = mono_table(4, f.degree());
  std::array<int, 2> loc = {sp.local_index(k, pe.verts[0]), sp.local_index(k, pe.verts[1])};
  Poly out(2);
  for (std::size_t mi = 0; mi < tin.size(); ++mi) {
    const Rational& v = f.at(k, comp, static_cast<int32_t>(mi));
    if (is_zero(v)) continue;
    const Exps& e = tin.list[mi];
    bool on_edge = true;
    for (int m = 0; m < 4; ++m)
      if (m != loc[0] && m != loc[1] && e[m] != 0) on_edge = false;
    if (!on_edge) continue;
    Exps out_e{e[loc[0]], e[loc[1]], 0, 0};
    out.add_term(out_e, v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// integration
// ---------------------------------------------------------------------------

/// Exact L2 pairing over T (true volume measure); Sym3 uses Frobenius
/// weights so it matches the pairing of the corresponding full matrices.
inline Rational integrate_pairing(const BrokenField& a, const BrokenField& b) {
  if (a.shape() != b.shape() || a.split_ptr() != b.split_ptr())
    throw std::invalid_argument("integrate_pairing: mismatch");
  Rational acc(0);
  for (int k = 0; k < 4; ++k) {
    const Rational& vol = a.split().subtet(k).abs_volume;
    for (int c = 0; c < ncomp(a.shape()); ++c) {
      Poly prod = a.component_poly(k, c) * b.component_poly(k, c);
      Rational w = (a.shape() == Shape::Sym3) ? Rational(sym_weight(c)) : Rational(1);
      acc += w * simplex_integral(prod, vol);
    }
  }
  return acc;
}

/// Integral of a scalar broken field over T.
inline Rational integrate_scalar(const BrokenField& f) {
  if (f.shape() != Shape::Scalar) throw std::invalid_argument("integrate_scalar: shape");
  Rational acc(0);
  for (int k = 0; k < 4; ++k)
    acc += simplex_integral(f.component_poly(k, 0), f.split().subtet(k).abs_volume);
  return acc;
}

}  // namespace alfeld

#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "alfeld/geometry.hpp"
#include "alfeld/poly.hpp"
#include "alfeld/random.hpp"
#include "alfeld/spaces.hpp"

namespace alfeld {

// ---------------------------------------------------------------------------
// smooth (global polynomial) field algebra in Cartesian coordinates
// ---------------------------------------------------------------------------

using PolyVec = std::array<Poly, 3>;
using PolyMat = std::array<Poly, 9>;  // row-major

inline PolyVec make_poly_vec() { return {Poly(3), Poly(3), Poly(3)}; }
inline PolyMat make_poly_mat() {
  PolyMat m;
  m.fill(Poly(3));
  return m;
}

inline PolyVec grad3(const Poly& f) { return {f.partial(0), f.partial(1), f.partial(2)}; }

/// Jacobian: (grad v)_ij = dv_i/dx_j.
inline PolyMat grad3(const PolyVec& v) {
  PolyMat m = make_poly_mat();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[mat_comp(i, j)] = v[i].partial(j);
  return m;
}

inline PolyVec curl3(const PolyVec& v) {
  return {v[2].partial(1) - v[1].partial(2), v[0].partial(2) - v[2].partial(0),
          v[1].partial(0) - v[0].partial(1)};
}

inline PolyMat curl3(const PolyMat& m) {
  PolyMat out = make_poly_mat();
  for (int i = 0; i < 3; ++i) {
    PolyVec row{m[mat_comp(i, 0)], m[mat_comp(i, 1)], m[mat_comp(i, 2)]};
    PolyVec c = curl3(row);
    for (int j = 0; j < 3; ++j) out[mat_comp(i, j)] = c[j];
  }
  return out;
}

inline Poly div3(const PolyVec& v) { return v[0].partial(0) + v[1].partial(1) + v[2].partial(2); }

inline PolyVec div3(const PolyMat& m) {
  PolyVec out = make_poly_vec();
  for (int i = 0; i < 3; ++i)
    out[i] = m[mat_comp(i, 0)].partial(0) + m[mat_comp(i, 1)].partial(1) +
             m[mat_comp(i, 2)].partial(2);
  return out;
}

inline PolyMat transpose(const PolyMat& m) {
  PolyMat out = make_poly_mat();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[mat_comp(i, j)] = m[mat_comp(j, i)];
  return out;
}

inline Poly trace3(const PolyMat& m) { return m[0] + m[4] + m[8]; }

inline PolyMat xi_map(const PolyMat& m) {
  PolyMat out = transpose(m);
  Poly tr = trace3(m);
  for (int d = 0; d < 3; ++d) out[mat_comp(d, d)] -= tr;
  return out;
}

inline PolyMat xi_inv_map(const PolyMat& m) {
  PolyMat out = transpose(m);
  Poly tr = trace3(m) * Rational(1, 2);
  for (int d = 0; d < 3; ++d) out[mat_comp(d, d)] -= tr;
  return out;
}

inline PolyMat mskw3(const PolyVec& v) {
  PolyMat m = make_poly_mat();
  m[mat_comp(0, 1)] = v[2] * Rational(-1);
  m[mat_comp(0, 2)] = v[1];
  m[mat_comp(1, 0)] = v[2];
  m[mat_comp(1, 2)] = v[0] * Rational(-1);
  m[mat_comp(2, 0)] = v[1] * Rational(-1);
  m[mat_comp(2, 1)] = v[0];
  return m;
}

inline PolyVec vskw3(const PolyMat& m) {
  return {(m[mat_comp(2, 1)] - m[mat_comp(1, 2)]) * Rational(1, 2),
          (m[mat_comp(0, 2)] - m[mat_comp(2, 0)]) * Rational(1, 2),
          (m[mat_comp(1, 0)] - m[mat_comp(0, 1)]) * Rational(1, 2)};
}

inline PolyMat sym3(const PolyMat& m) {
  PolyMat out = make_poly_mat();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      out[mat_comp(i, j)] = (m[mat_comp(i, j)] + m[mat_comp(j, i)]) * Rational(1, 2);
  return out;
}

inline PolyMat eps3(const PolyVec& v) { return sym3(grad3(v)); }

inline PolyMat inc3(const PolyMat& u) { return curl3(transpose(curl3(u))); }

inline bool mat_is_zero(const PolyMat& m) {
  for (const Poly& p : m)
    if (!p.is_zero_poly()) return false;
  return true;
}
inline bool vec_poly_is_zero(const PolyVec& v) {
  return v[0].is_zero_poly() && v[1].is_zero_poly() && v[2].is_zero_poly();
}

// ---------------------------------------------------------------------------
// face charts: exact orthonormal in-plane coordinates on frame-exact faces
// ---------------------------------------------------------------------------

/// Chart of a face in its orthonormal frame: xi = ((x-O).t1, (x-O).t2).
/// Pullbacks of global polynomials, true-measure surface integrals and
/// oriented boundary line integrals are all exact.
struct FaceChart {
  FaceFrame frame;
  std::array<Vec3, 3> corner;                 // ccw vertex coordinates
  std::array<std::array<Rational, 2>, 3> xi;  // chart coordinates of corners
  Rational area;                              // true (rational) face area

  static FaceChart make(const AlfeldSplit& sp, int face) {
    FaceChart c;
    c.frame = face_frame(sp, face, /*require_unit=*/true);
    const ParentFace& pf = sp.faces()[face];
    for (int m = 0; m < 3; ++m) c.corner[m] = sp.parent().v[pf.ccw[m]];
    for (int m = 0; m < 3; ++m) {
      Vec3 d = c.corner[m] - c.frame.origin;
      c.xi[m] = {dot(d, c.frame.t1), dot(d, c.frame.t2)};
    }
    if (!pf.area_rational) throw FrameUnavailableError("face area not rational");
    c.area = pf.area;
    return c;
  }

  /// Pullback of a global Cartesian polynomial to chart coordinates.
  Poly pull(const Poly& p) const {
    std::vector<Poly> subs;
    for (int j = 0; j < 3; ++j) {
      Poly xj(2);
      xj += Poly::constant(2, frame.origin[j]);
      xj += Poly::variable(2, 0, frame.t1[j]);
      xj += Poly::variable(2, 1, frame.t2[j]);
      subs.push_back(xj);
    }
    return p.compose(subs);
  }

  std::array<Poly, 3> pull(const PolyVec& v) const { return {pull(v[0]), pull(v[1]), pull(v[2])}; }

  /// True-measure integral of a chart polynomial over the face.
  Rational integrate(const Poly& p2) const {
    // substitute xi = nu1 * xi[1] + nu2 * xi[2] (corner 0 sits at the origin)
    std::vector<Poly> subs;
    for (int j = 0; j < 2; ++j) {
      Poly s(3);
      s += Poly::variable(3, 1, xi[1][j]);
      s += Poly::variable(3, 2, xi[2][j]);
      subs.push_back(s);
    }
    Poly q = p2.compose(subs);
    return simplex_integral(homogenize(q, q.degree()), area);
  }

  /// Oriented boundary integral: sum over ccw edges of the line integral of
  /// f * (w . dl), with f, w given in chart form (w as 3 chart polynomials).
  Rational boundary_integral(const Poly& f2, const std::array<Poly, 3>& w) const {
    Rational acc(0);
    for (int e = 0; e < 3; ++e) {
      int a = e, b = (e + 1) % 3;
      Vec3 dl = corner[b] - corner[a];
      // restrict chart polynomials to the segment xi(a) + tau (xi(b)-xi(a))
      std::vector<Poly> seg;
      for (int j = 0; j < 2; ++j) {
        Poly s(1);
        s += Poly::constant(1, xi[a][j]);
        s += Poly::variable(1, 0, xi[b][j] - xi[a][j]);
        seg.push_back(s);
      }
      Poly integrand(1);
      for (int c = 0; c < 3; ++c) {
        if (is_zero(dl[c])) continue;
        integrand += (f2 * w[c]).compose(seg) * dl[c];
      }
      // exact integral over tau in [0,1]
      for (const auto& [ex, cv] : integrand.terms) acc += cv / (int(ex[0]) + 1);
    }
    return acc;
  }
};

// chart-level surface fields: scalars are Poly(2); tangent fields store
// frame components (w1, w2); 2x2 matrix fields store frame components u[i][j].
using Tan2 = std::array<Poly, 2>;
using Mat2 = std::array<std::array<Poly, 2>, 2>;

inline Tan2 grad_F(const Poly& f) { return {f.partial(0), f.partial(1)}; }
inline Tan2 rot_F(const Poly& f) { return {f.partial(1), f.partial(0) * Rational(-1)}; }
inline Poly curl_F(const Tan2& w) { return w[1].partial(0) - w[0].partial(1); }

/// grad_F of a tangent field: row i = grad_F(w_i).
inline Mat2 grad_F(const Tan2& w) {
  return {{{w[0].partial(0), w[0].partial(1)}, {w[1].partial(0), w[1].partial(1)}}};
}

/// rot_F of a row field q = q1 t1' + q2 t2': row i = (rot_F q_i)'.
inline Mat2 rot_F(const Tan2& q) {
  return {{{q[0].partial(1), q[0].partial(0) * Rational(-1)},
           {q[1].partial(1), q[1].partial(0) * Rational(-1)}}};
}

/// curl_F of a 2x2 (FF-part) matrix field: component j = curl_F((u_{F t_j})').
inline Tan2 curl_F(const Mat2& u) {
  // u_{F t_j} as a row has components (u[j][0], u[j][1]); its transpose is the
  // tangent field (u[j][0], u[j][1]).
  return {curl_F(Tan2{u[0][0], u[0][1]}), curl_F(Tan2{u[1][0], u[1][1]})};
}

inline Poly tr_F(const Mat2& u) { return u[0][0] + u[1][1]; }

inline Mat2 dev_F(const Mat2& u) {
  Poly half_tr = tr_F(u) * Rational(1, 2);
  Mat2 out = u;
  out[0][0] -= half_tr;
  out[1][1] -= half_tr;
  return out;
}

inline Mat2 eps_F(const Tan2& v) {
  Mat2 g = grad_F(v);
  Mat2 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out[i][j] = (g[i][j] + g[j][i]) * Rational(1, 2);
  return out;
}

inline Poly frob2(const Mat2& a, const Mat2& b) {
  Poly acc(2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) acc += a[i][j] * b[i][j];
  return acc;
}

inline Poly dot2(const Tan2& a, const Tan2& b) { return a[0] * b[0] + a[1] * b[1]; }

/// 3D chart representation of a tangent field (components along x,y,z).
inline std::array<Poly, 3> to3(const FaceChart& c, const Tan2& w) {
  std::array<Poly, 3> out{Poly(2), Poly(2), Poly(2)};
  for (int j = 0; j < 3; ++j) out[j] = w[0] * c.frame.t1[j] + w[1] * c.frame.t2[j];
  return out;
}

/// Frame components of a pulled-back matrix field.
struct FaceMatrixView {
  const FaceChart* chart;
  std::array<Poly, 9> m;  // chart polynomials, row-major 3D components

  static FaceMatrixView make(const FaceChart& c, const PolyMat& u) {
    FaceMatrixView v;
    v.chart = &c;
    for (int i = 0; i < 9; ++i) v.m[i] = c.pull(u[i]);
    return v;
  }

  Poly bilinear(const Vec3& a, const Vec3& b) const {  // a' M b
    Poly acc(2);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        Rational w = a[i] * b[j];
        if (!is_zero(w)) acc += m[mat_comp(i, j)] * w;
      }
    return acc;
  }

  Mat2 FF() const {
    const auto& f = chart->frame;
    return {{{bilinear(f.t1, f.t1), bilinear(f.t1, f.t2)},
             {bilinear(f.t2, f.t1), bilinear(f.t2, f.t2)}}};
  }
  /// u_{F s} = s' u Q as frame components (a row field).
  Tan2 Fs(const Vec3& s) const {
    const auto& f = chart->frame;
    return {bilinear(s, f.t1), bilinear(s, f.t2)};
  }
  /// u_{s F} = Q u s as frame components (a tangent field).
  Tan2 sF(const Vec3& s) const {
    const auto& f = chart->frame;
    return {bilinear(f.t1, s), bilinear(f.t2, s)};
  }
  Poly nn() const { return bilinear(chart->frame.n, chart->frame.n); }
  Poly trF() const {
    const auto& f = chart->frame;
    return bilinear(f.t1, f.t1) + bilinear(f.t2, f.t2);
  }
};

}  // namespace alfeld

#pragma once

#include <array>

#include "alfeld/broken.hpp"
#include "alfeld/geometry.hpp"
#include "alfeld/poly.hpp"

namespace alfeld {

/// Barycentric coordinates of the parent tetrahedron as global Cartesian
/// polynomials (degree 1, variables x,y,z).
inline std::array<Poly, 4> parent_barycentric_cartesian(const Tetrahedron& tet) {
  // lambda_m(x) = c_m + g_m . x with the same adjugate construction used for
  // subtets.
  Vec3 e1 = tet.v[1] - tet.v[0];
  Vec3 e2 = tet.v[2] - tet.v[0];
  Vec3 e3 = tet.v[3] - tet.v[0];
  Rational det = dot(e1, cross(e2, e3));
  std::array<Vec3, 4> g;
  g[1] = (1 / det) * cross(e2, e3);
  g[2] = (1 / det) * cross(e3, e1);
  g[3] = (1 / det) * cross(e1, e2);
  g[0] = Vec3{-g[1][0] - g[2][0] - g[3][0], -g[1][1] - g[2][1] - g[3][1],
              -g[1][2] - g[2][2] - g[3][2]};
  std::array<Poly, 4> out;
  for (int m = 0; m < 4; ++m) {
    Poly p(3);
    Rational c = (m == 0 ? Rational(1) : Rational(0)) - dot(g[m], tet.v[0]);
    p += Poly::constant(3, c);
    for (int j = 0; j < 3; ++j) p += Poly::variable(3, j, g[m][j]);
    out[m] = p;
  }
  return out;
}

/// The split bubble: continuous, piecewise linear, mu(z)=1, mu(x_i)=0.
/// On each subtet it is the barycentric coordinate of z.
inline BrokenField bubble_mu(const AlfeldSplit& split) {
  BrokenField f(&split, 1, Shape::Scalar);
  for (int k = 0; k < 4; ++k) f.set_component_poly(k, 0, Poly::variable(4, 0));
  return f;
}

/// Face cubic bubble b_F: the product of the parent barycentric coordinates
/// of the three vertices of F, as a global polynomial.
inline Poly face_bubble_cartesian(const AlfeldSplit& split, int face) {
  auto lam = parent_barycentric_cartesian(split.parent());
  const ParentFace& pf = split.faces()[face];
  return lam[pf.verts[0]] * lam[pf.verts[1]] * lam[pf.verts[2]];
}

/// Mean-free vertex quadratics: ell_i(x_j) = delta_ij, integral zero.
/// Realized as lambda_i - 5 lambda_j lambda_k for the first two j<k != i
/// (the edge-bubble coefficient -5 makes the mean vanish on any tet).
inline std::array<Poly, 4> ell_basis(const Tetrahedron& tet) {
  auto lam = parent_barycentric_cartesian(tet);
  std::array<Poly, 4> out;
  for (int i = 0; i < 4; ++i) {
    int j = -1, k = -1;
    for (int m = 0; m < 4 && k < 0; ++m) {
      if (m == i) continue;
      if (j < 0)
        j = m;
      else
        k = m;
    }
    out[i] = lam[i] - lam[j] * lam[k] * Rational(5);
  }
  return out;
}

inline Rational eval_poly3(const Poly& p, const Vec3& x) {
  std::array<Rational, 3> a{x[0], x[1], x[2]};
  return p.eval(std::span<const Rational>(a.data(), 3));
}

/// Integral of a global Cartesian polynomial over the parent tetrahedron
/// (embeds on one subtet ... integrates over all four, exactly).
inline Rational integrate_global_over_tet(const AlfeldSplit& split, const Poly& p) {
  BrokenField f = embed_global(split, {p}, std::max(p.degree(), 0), Shape::Scalar);
  return integrate_scalar(f);
}

}  // namespace alfeld

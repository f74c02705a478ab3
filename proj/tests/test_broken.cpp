#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "alfeld/broken.hpp"
#include "alfeld/fields.hpp"

using namespace alfeld;

namespace {

/// Test-side numerical oracle: tensor Gauss-Legendre quadrature on the unit
/// tetrahedron via a Duffy-type collapsed map, in doubles. Independent of the
/// exact integration path it vouches for.
double quad_unit_tet_monomial(const Exps& e) {
  static const double gx[8] = {0.01985507175123188, 0.10166676129318664, 0.2372337950418355,
                               0.40828267875217505, 0.591717321247825,   0.7627662049581645,
                               0.8983332387068134,  0.9801449282487681};
  static const double gw[8] = {0.05061426814518813, 0.11119051722668723, 0.15685332293894363,
                               0.18134189168918097, 0.18134189168918097, 0.15685332293894363,
                               0.11119051722668723, 0.05061426814518813};
  double acc = 0.0;
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b)
      for (int c = 0; c < 8; ++c) {
        double u = gx[a], v = gx[b], w = gx[c];
        double x = u;
        double y = v * (1 - u);
        double z = w * (1 - u) * (1 - v);
        double jac = (1 - u) * (1 - u) * (1 - v);
        double l0 = 1 - x - y - z, l1 = x, l2 = y, l3 = z;
        double f = std::pow(l0, e[0]) * std::pow(l1, e[1]) * std::pow(l2, e[2]) *
                   std::pow(l3, e[3]);
        acc += gw[a] * gw[b] * gw[c] * f * jac;
      }
  return acc;
}

std::mt19937_64 g_rng(424242);

Poly random_poly3(int degree, std::mt19937_64& rng) {
  Poly p(3);
  std::uniform_int_distribution<long> num(-5, 5);
  for (const Exps& e : monomials_upto(3, degree)) p.add_term(e, rat(num(rng), 1 + rng() % 3));
  return p;
}

}  // namespace

TEST_CASE("exact simplex integration agrees with the quadrature oracle") {
  // a fixed corpus of monomials up to degree 6 on the unit tetrahedron
  int checked = 0;
  for (int deg = 0; deg <= 6 && checked < 50; ++deg) {
    const MonoTable& t = mono_table(4, deg);
    for (const Exps& e : t.list) {
      if (checked >= 50) break;
      Rational exact = simplex_mono_integral(e, 4, rat(1, 6));
      double approx = quad_unit_tet_monomial(e);
      CHECK(std::abs(exact.get_d() - approx) < 1e-12);
      ++checked;
    }
  }
  CHECK(checked == 50);
}

TEST_CASE("stated integration examples") {
  // integral over T of lambda0*lambda1 = |T|/20
  Exps e{1, 1, 0, 0};
  CHECK(simplex_mono_integral(e, 4, rat(1, 6)) == rat(1, 6) / 20);
  // integral of 1 = measure
  CHECK(simplex_mono_integral(Exps{0, 0, 0, 0}, 4, rat(5, 3)) == rat(5, 3));
  // face bubble over a reference face: 1/60 with the unit-measure convention
  CHECK(simplex_mono_integral(Exps{1, 1, 1, 0}, 3, rat(1)) == rat(1, 60));
}

TEST_CASE("curl grad and div curl vanish exactly on random fields") {
  AlfeldSplit sp(canonical_tet());
  for (int trial = 0; trial < 5; ++trial) {
    int r = 3 + trial % 2;
    Poly w = random_poly3(r, g_rng);
    BrokenField f = embed_global(sp, {w}, r, Shape::Scalar);
    BrokenField g = op_grad(sp, r, Shape::Scalar).apply(f);
    BrokenField cg = op_curl(sp, g.degree(), Shape::Vector3).apply(g);
    CHECK(cg.is_zero_field());

    std::vector<Poly> vv{random_poly3(r, g_rng), random_poly3(r, g_rng), random_poly3(r, g_rng)};
    BrokenField v = embed_global(sp, vv, r, Shape::Vector3);
    BrokenField cv = op_curl(sp, r, Shape::Vector3).apply(v);
    BrokenField dcv = op_div(sp, cv.degree(), Shape::Vector3).apply(cv);
    CHECK(dcv.is_zero_field());
  }
}

TEST_CASE("grad of constant is zero, div of identity field is 3") {
  AlfeldSplit sp(reference_tet());
  BrokenField c = embed_global(sp, {Poly::constant(3, rat(7))}, 2, Shape::Scalar);
  CHECK(op_grad(sp, 2, Shape::Scalar).apply(c).is_zero_field());

  std::vector<Poly> id{Poly::variable(3, 0), Poly::variable(3, 1), Poly::variable(3, 2)};
  BrokenField x = embed_global(sp, id, 1, Shape::Vector3);
  BrokenField d = op_div(sp, 1, Shape::Vector3).apply(x);
  for (int k = 0; k < 4; ++k) {
    Poly p = d.component_poly(k, 0);
    // constant 3 written as a homogeneous degree-0 polynomial
    CHECK(p == Poly::constant(4, rat(3)));
  }
}

TEST_CASE("embedding commutes with differentiation") {
  AlfeldSplit sp(canonical_tet());
  int r = 4;
  Poly w = random_poly3(r, g_rng);
  BrokenField f = embed_global(sp, {w}, r, Shape::Scalar);
  BrokenField g = op_grad(sp, r, Shape::Scalar).apply(f);
  BrokenField g2 = embed_global(sp, {w.partial(0), w.partial(1), w.partial(2)}, r - 1,
                                Shape::Vector3);
  CHECK(g == g2);
}

TEST_CASE("the split bubble mu") {
  AlfeldSplit sp(canonical_tet());
  BrokenField mu = bubble_mu(sp);
  for (int k = 0; k < 4; ++k) {
    CHECK(mu.eval(k, 0, sp.z()) == 1);
    for (int m = 1; m < 4; ++m) {
      int g = sp.subtet(k).verts[m];
      CHECK(mu.eval(k, 0, sp.parent().v[g]) == 0);
    }
  }
  // midpoint of z--x0 (evaluated on a subtet containing x0)
  Vec3 mid = Rational(1, 2) * (sp.z() + sp.parent().v[0]);
  CHECK(mu.eval(1, 0, mid) == rat(1, 2));
  // continuity: order-0 jumps vanish at every vertex
  for (int i = 0; i < 4; ++i)
    for (const Rational& j : jump_at_vertex(mu, i, 0)) CHECK(is_zero(j));
  // gradient jumps at a vertex are not all zero
  bool any = false;
  for (const Rational& j : jump_at_vertex(mu, 0, 1)) any |= !is_zero(j);
  CHECK(any);
}

TEST_CASE("face bubble values and face integral") {
  AlfeldSplit sp(canonical_tet());
  for (int face = 0; face < 4; ++face) {
    Poly bf = face_bubble_cartesian(sp, face);
    const ParentFace& pf = sp.faces()[face];
    for (int m = 0; m < 3; ++m) CHECK(eval_poly3(bf, sp.parent().v[pf.verts[m]]) == 0);
    Vec3 bary = Rational(1, 3) *
                (sp.parent().v[pf.verts[0]] + sp.parent().v[pf.verts[1]] + sp.parent().v[pf.verts[2]]);
    CHECK(eval_poly3(bf, bary) == rat(1, 27));
  }
  // trace of b_F on its face integrates to 1/60 under the unit convention
  BrokenField b = embed_global(sp, {face_bubble_cartesian(sp, 2)}, 3, Shape::Scalar);
  Poly tr = trace_on_parent_face(b, 2, 0);
  CHECK(simplex_integral(homogenize(tr, 3), rat(1)) == rat(1, 60));
}

TEST_CASE("ell basis: Kronecker property and zero mean") {
  AlfeldSplit sp(canonical_tet());
  auto ell = ell_basis(sp.parent());
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j)
      CHECK(eval_poly3(ell[i], sp.parent().v[j]) == (i == j ? rat(1) : rat(0)));
    CHECK(integrate_global_over_tet(sp, ell[i]) == 0);
  }
}

TEST_CASE("global polynomials embed with zero jumps at all orders") {
  AlfeldSplit sp(canonical_tet());
  int r = 3;
  Poly w = random_poly3(r, g_rng);
  BrokenField f = embed_global(sp, {w}, r, Shape::Scalar);
  for (int i = 0; i < 4; ++i)
    for (const Rational& j : jump_at_vertex(f, i, r)) CHECK(is_zero(j));
}

TEST_CASE("traces on interior facets match from both sides for continuous fields") {
  AlfeldSplit sp(canonical_tet());
  Poly w = random_poly3(2, g_rng);
  BrokenField f = embed_global(sp, {w}, 2, Shape::Scalar);
  for (int g = 0; g < 6; ++g) {
    Poly a = trace_on_interior_facet(f, g, 0, 0);
    Poly b = trace_on_interior_facet(f, g, 1, 0);
    CHECK(a == b);
  }
}

TEST_CASE("vertex derivative evaluation matches polynomial calculus") {
  AlfeldSplit sp(canonical_tet());
  Poly w = random_poly3(3, g_rng);
  BrokenField f = embed_global(sp, {w}, 3, Shape::Scalar);
  // d/dx d/dy at x2, from any subtet containing it
  Poly ref = w.partial(0).partial(1);
  Rational want = eval_poly3(ref, sp.parent().v[2]);
  for (int k : sp.subtets_at_vertex(2))
    CHECK(eval_vertex_derivative(f, k, 0, 2, {1, 1, 0}) == want);
}

TEST_CASE("integrate_pairing is symmetric and matches hand values") {
  AlfeldSplit sp(reference_tet());
  BrokenField one = embed_global(sp, {Poly::constant(3, rat(1))}, 1, Shape::Scalar);
  CHECK(integrate_scalar(one) == rat(1, 6));
  BrokenField mu = bubble_mu(sp);
  CHECK(integrate_pairing(one, mu) == integrate_pairing(mu, one));
}

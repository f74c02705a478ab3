#include <catch2/catch_amalgamated.hpp>

#include "alfeld/fields.hpp"
#include "alfeld/geometry.hpp"

using namespace alfeld;

TEST_CASE("reference split: four subtets of volume 1/24") {
  AlfeldSplit sp(reference_tet());
  Rational total(0);
  for (int k = 0; k < 4; ++k) {
    CHECK(sp.subtet(k).abs_volume == rat(1, 24));
    total += sp.subtet(k).abs_volume;
  }
  CHECK(total == reference_tet().volume());
}

TEST_CASE("canonical tet: volume 1 and the (6,3,2)/7 oblique normal") {
  Tetrahedron t = canonical_tet();
  CHECK(t.volume() == rat(1));
  AlfeldSplit sp(t);
  // face opposite x0 is the oblique one
  FaceFrame fr = face_frame(sp, 0, /*require_unit=*/true);
  CHECK(fr.n == (Vec3{rat(6, 7), rat(3, 7), rat(2, 7)}));
  CHECK(fr.t1 == (Vec3{rat(2, 7), rat(-6, 7), rat(3, 7)}));
  CHECK(fr.t2 == (Vec3{rat(3, 7), rat(-2, 7), rat(-6, 7)}));
  CHECK(dot(fr.n, fr.t1) == 0);
  CHECK(dot(fr.n, fr.t2) == 0);
  CHECK(dot(fr.t1, fr.t2) == 0);
  CHECK(norm2(fr.n) == 1);
  CHECK(norm2(fr.t1) == 1);
  CHECK(norm2(fr.t2) == 1);
  CHECK(cross(fr.t1, fr.t2) == fr.n);

  // every face of the canonical tet admits a rational unit frame
  for (int f = 0; f < 4; ++f) CHECK_NOTHROW(face_frame(sp, f, true));
  // coordinate face z=0 (opposite x3) has outward normal (0,0,-1)
  FaceFrame f3 = face_frame(sp, 3, true);
  CHECK(f3.n == (Vec3{rat(0), rat(0), rat(-1)}));
}

TEST_CASE("split point validation") {
  Tetrahedron t = reference_tet();
  CHECK_THROWS_AS(AlfeldSplit(t, Vec3{rat(2), rat(2), rat(2)}), InvalidSplitError);
  CHECK_THROWS_AS(AlfeldSplit(t, Vec3{rat(0), rat(0), rat(0)}), InvalidSplitError);  // on boundary
  CHECK_NOTHROW(AlfeldSplit(t, Vec3{rat(1, 8), rat(1, 8), rat(1, 8)}));
}

TEST_CASE("projector algebra on a generic tetrahedron") {
  Tetrahedron t{{Vec3{rat(0), rat(0), rat(0)}, Vec3{rat(2), rat(1, 3), rat(0)},
                 Vec3{rat(-1, 2), rat(3), rat(1)}, Vec3{rat(1), rat(1), rat(4)}}};
  AlfeldSplit sp(t);
  for (int f = 0; f < 4; ++f) {
    FaceFrame fr = face_frame(sp, f, false);
    // Q^2 = Q, Q n = 0, Q' = Q, P + Q = I, all exact
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        Rational qq(0);
        for (int k = 0; k < 3; ++k) qq += fr.Q[i][k] * fr.Q[k][j];
        CHECK(qq == fr.Q[i][j]);
        CHECK(fr.Q[i][j] == fr.Q[j][i]);
        CHECK(fr.P[i][j] + fr.Q[i][j] == (i == j ? rat(1) : rat(0)));
      }
    Vec3 qn{rat(0), rat(0), rat(0)};
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) qn[i] += fr.Q[i][k] * fr.n[k];
    CHECK(vec_is_zero(qn));
    // rational tangents orthogonal to each other and to n
    CHECK(is_zero(dot(fr.t1, fr.n)));
    CHECK(is_zero(dot(fr.t2, fr.n)));
    CHECK(is_zero(dot(fr.t1, fr.t2)));
  }
  for (std::size_t e = 0; e < sp.edges().size(); ++e) {
    EdgeFrame fr = edge_frame(sp, static_cast<int>(e), false);
    CHECK(is_zero(dot(fr.t, fr.np)));
    CHECK(is_zero(dot(fr.t, fr.nm)));
    CHECK(is_zero(dot(fr.np, fr.nm)));
  }
}

TEST_CASE("edge frames on the axis edges of the canonical tet are exact") {
  AlfeldSplit sp(canonical_tet());
  for (auto [a, b] : {std::pair{0, 1}, {0, 2}, {0, 3}}) {
    EdgeFrame fr = edge_frame(sp, sp.edge_index(a, b), true);
    CHECK(norm2(fr.t) == 1);
    CHECK(norm2(fr.np) == 1);
    CHECK(norm2(fr.nm) == 1);
  }
  // the edge x1-x2 has direction (-1,2,0); no rational unit tangent exists
  CHECK_THROWS_AS(edge_frame(sp, sp.edge_index(1, 2), true), FrameUnavailableError);
}

TEST_CASE("interior facet tables") {
  AlfeldSplit sp(reference_tet());
  CHECK(sp.interior_facets().size() == 6);
  for (int i = 0; i < 4; ++i) CHECK(sp.interior_facets_at(i).size() == 3);
  for (const auto& g : sp.interior_facets()) {
    CHECK(g.adjacent[0] != g.adjacent[1]);
    for (int s : {0, 1}) {
      int k = g.adjacent[s];
      CHECK(k != g.xs[0]);
      CHECK(k != g.xs[1]);
    }
  }
}

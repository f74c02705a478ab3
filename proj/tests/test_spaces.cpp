#include <catch2/catch_amalgamated.hpp>

#include "alfeld/spaces.hpp"

using namespace alfeld;

namespace {

AlfeldSplit& the_split() {
  static AlfeldSplit sp(canonical_tet());
  return sp;
}

SpaceCache& the_cache() {
  static SpaceCache cache(the_split());
  return cache;
}

bool contained_in(const FESpace& sub, const FESpace& super) {
  for (std::size_t j = 0; j < sub.dim(); ++j) {
    std::vector<Rational> v = sub.basis[j].to_dense(sub.ambient_dim());
    if (!super.contains(v)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("broken space dimensions") {
  CHECK(broken_dim(2, Shape::Scalar) == 40);   // dim W3_2
  CHECK(broken_dim(0, Shape::Vector3) == 12);
  CHECK(broken_dim(6, Shape::Sym3) == 2016);
}

TEST_CASE("closed-form dimension spot values from the catalog") {
  CHECK(expected_dimension(parse_label("S0"), 5) == 68);
  CHECK(expected_dimension(parse_label("S0"), 3) == 20);
  CHECK(expected_dimension(parse_label("oV1"), 1) == 0);
  CHECK(expected_dimension(parse_label("V2"), 2) == 72);
  CHECK(expected_dimension(parse_label("oV2"), 2) == 48);
  CHECK(expected_dimension(parse_label("Z1"), 4) == 128);
  CHECK(expected_dimension(parse_label("oZ1"), 4) == 10);
  CHECK(expected_dimension(parse_label("Z3"), 2) == 32);
  CHECK(expected_dimension(parse_label("W1"), 2) == 60);
  CHECK(expected_dimension(parse_label("U1"), 4) == 270);
  CHECK(expected_dimension(parse_label("U2"), 2) == 120);
  CHECK(expected_dimension(parse_label("oU2"), 2) == 60);
  CHECK(expected_dimension(parse_label("U3"), 1) == 48);
  CHECK(expected_dimension(parse_label("U0"), 5) == 204);
  CHECK(expected_dimension(parse_label("U0"), 5) == 3 * expected_dimension(parse_label("S0"), 5));
  CHECK_THROWS_AS(expected_dimension(parse_label("Z1"), 3), std::out_of_range);
  CHECK_THROWS_AS(expected_dimension(parse_label("S1"), 4), std::out_of_range);
}

TEST_CASE("computed dimensions match the table at low degrees") {
  SpaceCache& cache = the_cache();
  for (const char* name : {"W0", "oW0", "W1", "oW1", "W2", "oW2", "W3", "oW3", "L1", "oL1",
                           "S0", "oS0", "V1", "oV1", "V2", "oV2", "Z2", "oZ2", "Z3", "oZ3",
                           "Zhat3", "Ztilde3"}) {
    SpaceLabel l = parse_label(name);
    for (int r = 1; r <= 3; ++r) {
      long want;
      try {
        want = expected_dimension(l, r);
      } catch (const std::out_of_range&) {
        continue;
      }
      INFO(name << " at degree " << r);
      CHECK(static_cast<long>(cache.get(l, r).dim()) == want);
    }
  }
}

TEST_CASE("S0 at degree 3 is the global cubic space") {
  const FESpace& s = the_cache().get("S0", 3);
  REQUIRE(s.dim() == 20);
  for (std::size_t j = 0; j < s.dim(); ++j) {
    BrokenField f = s.basis_field(j);
    for (int i = 0; i < 4; ++i)
      for (const Rational& v : jump_at_vertex(f, i, 3)) CHECK(is_zero(v));
  }
}

TEST_CASE("Z1 and ringed Z1 at degree 4") {
  CHECK(the_cache().get("Z1", 4).dim() == 128);
  CHECK(the_cache().get("oZ1", 4).dim() == 10);
}

TEST_CASE("U spaces at the low end of the window") {
  SpaceCache& cache = the_cache();
  CHECK(cache.get("U2", 2).dim() == 120);
  CHECK(cache.get("oU2", 2).dim() == 60);
  CHECK(cache.get("U3", 1).dim() == 48);
  CHECK(cache.get("oU3", 1).dim() == 42);
  CHECK(cache.get("U0", 5).dim() == 204);
  CHECK(cache.get("oU0", 5).dim() == 12);
  CHECK(cache.get("oU0", 5).dim() == expected_dimension(parse_label("oU0"), 5));
  CHECK(cache.get("U1", 4).dim() == 270);
  CHECK(cache.get("oU1", 4).dim() == 30);
}

TEST_CASE("containment gradations S in L in W") {
  SpaceCache& cache = the_cache();
  int r = 3;
  CHECK(contained_in(cache.get("S1", r), cache.get("L1", r)));
  CHECK(contained_in(cache.get("L1", r), cache.get("W1", r)));
  CHECK(contained_in(cache.get("S0", r), cache.get("W0", r)));
  CHECK(contained_in(cache.get("L2", r), cache.get("W2", r)));
}

TEST_CASE("Z2 equals V1 as sets") {
  SpaceCache& cache = the_cache();
  for (int r : {2, 3}) {
    const FESpace& z2 = cache.get("Z2", r);
    const FESpace& v1 = cache.get("V1", r);
    CHECK(z2.dim() == v1.dim());
    CHECK(contained_in(z2, v1));
    CHECK(contained_in(v1, z2));
  }
}

TEST_CASE("Lemma 4.1 identities at degree 4") {
  SpaceCache& cache = the_cache();
  const AlfeldSplit& sp = the_split();
  int r = 4;

  // oZ1 = Z1 intersect oS1: stack both constraint sets
  auto rows = space_constraints(parse_label("Z1"), r, sp);
  auto extra = space_constraints(parse_label("oS1"), r, sp);
  rows.insert(rows.end(), extra.begin(), extra.end());
  FESpace inter = space_from_constraints(parse_label("oZ1"), r, Shape::Vector3, sp,
                                         std::move(rows), "Z1 ^ oS1");
  const FESpace& oz1 = cache.get("oZ1", r);
  CHECK(inter.dim() == oz1.dim());
  CHECK(contained_in(oz1, inter));

  // oZ2 = Z2 intersect oL2
  auto rows2 = space_constraints(parse_label("Z2"), r, sp);
  auto extra2 = space_constraints(parse_label("oL2"), r, sp);
  rows2.insert(rows2.end(), extra2.begin(), extra2.end());
  FESpace inter2 = space_from_constraints(parse_label("oZ2"), r, Shape::Vector3, sp,
                                          std::move(rows2), "Z2 ^ oL2");
  const FESpace& oz2 = cache.get("oZ2", r);
  CHECK(inter2.dim() == oz2.dim());
  CHECK(contained_in(oz2, inter2));
}

TEST_CASE("the two characterizations of ringed V2 agree") {
  const AlfeldSplit& sp = the_split();
  for (int r : {2, 3}) {
    FESpace alt = space_from_constraints(parse_label("oV2"), r, Shape::Vector3, sp,
                                         vo2_alternative_constraints(sp, r),
                                         "oW2 with vanishing facet-normal vertex values");
    const FESpace& direct = the_cache().get("oV2", r);
    CHECK(alt.dim() == direct.dim());
    CHECK(contained_in(direct, alt));
    CHECK(contained_in(alt, direct));
  }
}

TEST_CASE("Z3 decompositions by rank arithmetic") {
  SpaceCache& cache = the_cache();
  const AlfeldSplit& sp = the_split();
  int r = 3;
  // Z3 = Zhat3 + P1(T) with trivial intersection
  const FESpace& z3 = cache.get("Z3", r);
  const FESpace& zhat = cache.get("Zhat3", r);
  CHECK(z3.dim() == zhat.dim() + 4);
  RowReducer red(static_cast<int32_t>(z3.ambient_dim()));
  for (const auto& b : zhat.basis) red.add_row(b);
  for (const SparseVec& v : global_poly_span(sp, 1, Shape::Scalar)) {
    BrokenField f(&sp, 1, Shape::Scalar);
    for (const auto& [i, c] : v.terms) f.coeffs()[i] = c;
    red.add_row(SparseVec::from_dense(f.homogenized_to(r).coeffs()));
  }
  CHECK(red.rank() == static_cast<int32_t>(z3.dim()));

  // Ztilde3 = oZ3 + M2(T), again with trivial intersection
  const FESpace& zt = cache.get("Ztilde3", r);
  const FESpace& oz3 = cache.get("oZ3", r);
  CHECK(zt.dim() == oz3.dim() + 4);
  RowReducer red2(static_cast<int32_t>(z3.ambient_dim()));
  for (const auto& b : oz3.basis) red2.add_row(b);
  for (const Poly& ell : ell_basis(sp.parent())) {
    BrokenField f = embed_global(sp, {ell}, r, Shape::Scalar);
    red2.add_row(SparseVec::from_dense(f.coeffs()));
  }
  CHECK(red2.rank() == static_cast<int32_t>(zt.dim()));
}

TEST_CASE("auxiliary spaces: rigid motions") {
  const AlfeldSplit& sp = the_split();
  auto rigid = rigid_motion_polys();
  CHECK(rigid.size() == 6);
  RowReducer red(static_cast<int32_t>(broken_dim(1, Shape::Vector3)));
  for (const auto& comps : rigid) {
    BrokenField f = embed_global(sp, comps, 1, Shape::Vector3);
    // rigid motions have symmetric gradient zero
    CHECK(deff_field(f).is_zero_field());
    red.add_row(SparseVec::from_dense(f.coeffs()));
  }
  CHECK(red.rank() == 6);
}

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "alfeld/calculus.hpp"
#include "alfeld/random.hpp"

namespace alfeld {

struct IdentityResult {
  std::string id;
  bool pass = false;
  bool printed_form_holds = true;  // false when the sign-corrected form was needed
  std::string witness;             // discrepancy description on failure
};

namespace detail_id {

inline bool tan_eq(const Tan2& a, const Tan2& b) { return a[0] == b[0] && a[1] == b[1]; }
inline bool mat2_eq(const Mat2& a, const Mat2& b) {
  return a[0][0] == b[0][0] && a[0][1] == b[0][1] && a[1][0] == b[1][0] && a[1][1] == b[1][1];
}

inline PolyMat random_mat(FieldRng& rng, int deg) {
  PolyMat m;
  for (int i = 0; i < 9; ++i) m[i] = rng.poly(3, deg);
  return m;
}
inline PolyVec random_vec(FieldRng& rng, int deg) {
  return {rng.poly(3, deg), rng.poly(3, deg), rng.poly(3, deg)};
}

}  // namespace detail_id

/// Pointwise and surface-calculus identity checks on seeded polynomial
/// fields of degree <= max_degree (default 4), exact equality throughout.
/// Face identities run on every face of the (frame-exact) tetrahedron.
inline IdentityResult verify_identity(const AlfeldSplit& sp, const std::string& id,
                                      uint64_t seed, int count = 20, int max_degree = 4) {
  using namespace detail_id;
  FieldRng rng(seed);
  IdentityResult res;
  res.id = id;
  res.pass = true;

  std::vector<FaceChart> charts;
  bool needs_faces = !(id == "alg1" || id == "alg2" || id == "613" || id == "713" ||
                       id == "trcurl0" || id == "more1");
  if (needs_faces)
    for (int f = 0; f < 4; ++f) charts.push_back(FaceChart::make(sp, f));

  auto fail = [&](const std::string& w) {
    res.pass = false;
    if (res.witness.empty()) res.witness = w;
  };

  for (int trial = 0; trial < count && res.pass; ++trial) {
    int deg = 1 + static_cast<int>(rng.raw() % max_degree);

    if (id == "alg1") {
      PolyMat m = random_mat(rng, deg);
      PolyVec lhs = div3(xi_map(m));
      PolyVec v = vskw3(curl3(m));
      PolyVec rhs = {v[0] * Rational(2), v[1] * Rational(2), v[2] * Rational(2)};
      if (!(lhs[0] == rhs[0] && lhs[1] == rhs[1] && lhs[2] == rhs[2]))
        fail("div Xi != 2 vskw curl");
      continue;
    }
    if (id == "alg2") {
      PolyVec v = random_vec(rng, deg);
      PolyMat lhs = xi_map(grad3(v));
      PolyMat rhs = curl3(mskw3(v));
      for (int i = 0; i < 9; ++i) rhs[i] = rhs[i] * Rational(-1);
      bool ok = true;
      for (int i = 0; i < 9; ++i) ok &= (lhs[i] == rhs[i]);
      if (!ok) fail("Xi grad != -curl mskw");
      continue;
    }
    if (id == "613") {
      PolyVec v = random_vec(rng, deg);
      if (!mat_is_zero(curl3(xi_inv_map(curl3(mskw3(v)))))) fail("curl XiInv curl mskw != 0");
      continue;
    }
    if (id == "713") {
      PolyMat m = random_mat(rng, deg);
      if (!vec_poly_is_zero(vskw3(curl3(xi_inv_map(curl3(m))))))
        fail("vskw curl XiInv curl != 0");
      continue;
    }
    if (id == "trcurl0") {
      PolyMat u = sym3(random_mat(rng, deg));
      if (!trace3(curl3(u)).is_zero_poly()) fail("tr curl of symmetric field != 0");
      continue;
    }
    if (id == "more1") {
      PolyVec v = random_vec(rng, deg);
      PolyMat lhs = transpose(curl3(eps3(v)));
      for (int i = 0; i < 9; ++i) lhs[i] = lhs[i] * Rational(2);
      PolyMat rhs = grad3(curl3(v));
      bool ok = true;
      for (int i = 0; i < 9; ++i) ok &= (lhs[i] == rhs[i]);
      if (!ok) fail("2(curl eps)' != grad curl");
      continue;
    }

    // face identities
    for (const FaceChart& c : charts) {
      const Vec3& n = c.frame.n;

      if (id == "curlid") {
        PolyMat u = random_mat(rng, deg);
        FaceMatrixView cu = FaceMatrixView::make(c, curl3(u));
        FaceMatrixView uu = FaceMatrixView::make(c, u);
        for (const Vec3& s : {c.frame.t1, c.frame.t2, c.frame.n}) {
          Poly lhs = cu.bilinear(s, n);
          // (u_{F s})' is the tangent field with the same frame components
          Poly rhs = curl_F(uu.Fs(s));
          if (!(lhs == rhs)) fail("s'(curl u)n != curl_F (u_Fs)'");
        }
      } else if (id == "id4") {
        PolyMat u = random_mat(rng, deg);
        FaceMatrixView cut = FaceMatrixView::make(c, transpose(curl3(u)));
        FaceMatrixView uu = FaceMatrixView::make(c, u);
        if (!tan_eq(cut.Fs(n), curl_F(uu.FF()))) fail("[(curl u)']_Fn != curl_F u_FF");
      } else if (id == "id1") {
        PolyMat u = sym3(random_mat(rng, deg));
        FaceMatrixView iu = FaceMatrixView::make(c, inc3(u));
        FaceMatrixView uu = FaceMatrixView::make(c, u);
        Tan2 cf = curl_F(uu.FF());
        if (!(iu.nn() == curl_F(cf))) fail("(inc u)_nn != curl_F (curl_F u_FF)'");
      } else if (id == "id2") {
        PolyMat u = sym3(random_mat(rng, deg));
        FaceMatrixView iu = FaceMatrixView::make(c, inc3(u));
        FaceMatrixView cut = FaceMatrixView::make(c, transpose(curl3(u)));
        if (!tan_eq(iu.Fs(n), curl_F(cut.FF()))) fail("(inc u)_Fn != curl_F [(curl u)']_FF");
      } else if (id == "id3") {
        PolyMat u = sym3(random_mat(rng, deg));
        FaceMatrixView cu = FaceMatrixView::make(c, curl3(u));
        FaceMatrixView uu = FaceMatrixView::make(c, u);
        Poly rhs = curl_F(uu.Fs(n)) * Rational(-1);
        if (!(cu.trF() == rhs)) fail("tr_F curl u != -curl_F (u_Fn)'");
      } else if (id == "more2") {
        PolyVec v = random_vec(rng, deg);
        FaceMatrixView lhs_view = FaceMatrixView::make(c, transpose(curl3(eps3(v))));
        Mat2 lhs = lhs_view.FF();
        for (auto& row : lhs)
          for (auto& p : row) p = p * Rational(2);
        PolyVec cv = curl3(v);
        Tan2 cvF{c.pull(cv[0] * c.frame.t1[0] + cv[1] * c.frame.t1[1] + cv[2] * c.frame.t1[2]),
                 c.pull(cv[0] * c.frame.t2[0] + cv[1] * c.frame.t2[1] + cv[2] * c.frame.t2[2])};
        if (!mat2_eq(lhs, grad_F(cvF))) fail("2[(curl eps v)']_FF != grad_F (curl v)_F");
      } else if (id == "more3") {
        PolyVec v = random_vec(rng, deg);
        PolyVec cv = curl3(v);
        // v_F frame components and v.n
        FaceMatrixView gv = FaceMatrixView::make(c, grad3(v));
        Tan2 vF{Poly(2), Poly(2)};
        Poly vn(2);
        {
          std::array<Poly, 3> pv = {c.pull(v[0]), c.pull(v[1]), c.pull(v[2])};
          for (int j = 0; j < 3; ++j) {
            vF[0] += pv[j] * c.frame.t1[j];
            vF[1] += pv[j] * c.frame.t2[j];
            vn += pv[j] * c.frame.n[j];
          }
        }
        // dn v = (grad v) n, pulled back
        std::array<Poly, 3> dnv = {Poly(2), Poly(2), Poly(2)};
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            if (!is_zero(c.frame.n[j])) dnv[i] += gv.m[mat_comp(i, j)] * c.frame.n[j];
        // n x dn v
        std::array<Poly, 3> nxdnv = {dnv[2] * n[1] - dnv[1] * n[2],
                                     dnv[0] * n[2] - dnv[2] * n[0],
                                     dnv[1] * n[0] - dnv[0] * n[1]};
        Poly cfvF = curl_F(vF);
        std::array<Poly, 3> rot3 = to3(c, rot_F(vn));
        bool ok = true;
        for (int i = 0; i < 3; ++i) {
          Poly rhs = cfvF * n[i] + rot3[i] + nxdnv[i];
          ok &= (c.pull(cv[i]) == rhs);
        }
        if (!ok) fail("more3 decomposition of curl v failed");
      } else if (id == "more4") {
        PolyVec v = random_vec(rng, deg);
        FaceMatrixView ev = FaceMatrixView::make(c, eps3(v));
        Tan2 lhs = ev.sF(n);
        lhs[0] = lhs[0] * Rational(2);
        lhs[1] = lhs[1] * Rational(2);
        // symmetric matrix: [eps]_{nF} = ([eps]_{Fn})'
        if (!tan_eq(lhs, Tan2{ev.Fs(n)[0] * Rational(2), ev.Fs(n)[1] * Rational(2)}))
          fail("[eps]_nF != ([eps]_Fn)' for symmetric eps");
        Poly vn(2);
        std::array<Poly, 3> pv = {c.pull(v[0]), c.pull(v[1]), c.pull(v[2])};
        for (int j = 0; j < 3; ++j) vn += pv[j] * c.frame.n[j];
        FaceMatrixView gv = FaceMatrixView::make(c, grad3(v));
        // dn v_F: frame components of Q (grad v) n
        Tan2 dnvF = gv.sF(n);
        Tan2 rhs = grad_F(vn);
        rhs[0] += dnvF[0];
        rhs[1] += dnvF[1];
        if (!tan_eq(lhs, rhs)) fail("2[eps(v)]_nF != grad_F(v.n) + dn v_F");
      } else if (id == "more5") {
        PolyVec v = random_vec(rng, deg);
        Tan2 vF{Poly(2), Poly(2)};
        std::array<Poly, 3> pv = {c.pull(v[0]), c.pull(v[1]), c.pull(v[2])};
        for (int j = 0; j < 3; ++j) {
          vF[0] += pv[j] * c.frame.t1[j];
          vF[1] += pv[j] * c.frame.t2[j];
        }
        Poly lhs = tr_F(rot_F(vF));  // rot_F of the row field v_F'
        Poly printed = curl_F(vF);
        if (!(lhs == printed)) {
          res.printed_form_holds = false;
          Poly corrected = printed * Rational(-1);
          if (!(lhs == corrected)) fail("more5 fails in both sign conventions");
        }
      } else if (id == "eq13") {
        PolyMat u = sym3(random_mat(rng, deg));
        Poly phi = rng.poly(3, std::max(0, deg - 1));
        Poly phi2 = c.pull(phi);
        FaceMatrixView iu = FaceMatrixView::make(c, inc3(u));
        FaceMatrixView uu = FaceMatrixView::make(c, u);
        Rational lhs = c.integrate(iu.nn() * phi2);
        Mat2 uFF = uu.FF();
        Rational a1 = c.integrate(frob2(uFF, rot_F(rot_F(phi2))));
        // boundary: (curl_F u_FF) t phi + u_FF t . (rot_F phi)'
        Tan2 cf = curl_F(uFF);
        std::array<Poly, 3> cf3 = to3(c, cf);
        Rational b1 = c.boundary_integral(phi2, cf3);
        // u_FF t . rot_F phi: rows of u_FF dotted in; compute w_c = sum over
        // frame: u_FF t has 3d components; pair with rot via transpose trick:
        // (u_FF t) . rot = rot' u_FF t = (u_FF' rot) . t = (u_FF rot) . t
        Tan2 rphi = rot_F(phi2);
        // u_FF rphi as a tangent field (u symmetric makes u_FF symmetric)
        Tan2 urow{uFF[0][0] * rphi[0] + uFF[0][1] * rphi[1],
                  uFF[1][0] * rphi[0] + uFF[1][1] * rphi[1]};
        Rational b2 = c.boundary_integral(Poly::constant(2, rat(1)), to3(c, urow));
        if (lhs != a1 + b1 + b2) fail("eq13 integral identity failed");
      } else if (id == "eq14") {
        PolyMat u = sym3(random_mat(rng, deg));
        Tan2 q{rng.poly(2, std::max(0, deg - 1)), rng.poly(2, std::max(0, deg - 1))};
        FaceMatrixView iu = FaceMatrixView::make(c, inc3(u));
        FaceMatrixView uu = FaceMatrixView::make(c, u);
        FaceMatrixView cut = FaceMatrixView::make(c, transpose(curl3(u)));
        Rational lhs = c.integrate(dot2(iu.Fs(n), q));
        Mat2 cutFF = cut.FF();
        Rational a1 = c.integrate(frob2(cutFF, dev_F(rot_F(q))));
        Tan2 unF = uu.sF(n);
        Poly cq = curl_F(Tan2{q[0], q[1]});  // curl_F q' (q' has the same components)
        Rational a2 = Rational(-1, 2) * c.integrate(dot2(unF, rot_F(cq)));
        // boundary: [(curl u)']_FF t . q' = (([(curl u)']_FF)' q) . t
        Tan2 colrow{cutFF[0][0] * q[0] + cutFF[1][0] * q[1],
                    cutFF[0][1] * q[0] + cutFF[1][1] * q[1]};
        Rational b1 = c.boundary_integral(Poly::constant(2, rat(1)), to3(c, colrow));
        Rational b2 = Rational(-1, 2) * c.boundary_integral(cq, to3(c, unF));
        if (lhs != a1 + a2 + b1 + b2) {
          // corrected variant: the two u_nF terms enter with + (the printed
          // derivation picks up a sign through the rot/trace identity)
          Rational alt = a1 - a2 + b1 - b2;
          res.printed_form_holds = false;
          if (lhs != alt) fail("eq14 fails in both sign conventions");
        }
      } else if (id != "more5" && id != "eq13" && id != "eq14") {
        fail("unknown identity id: " + id);
      }
    }
  }
  return res;
}

inline std::vector<std::string> identity_catalog() {
  return {"alg1", "alg2", "613",   "713",   "trcurl0", "curlid", "id4",  "id1",
          "id2",  "id3",  "more1", "more2", "more3",   "more4",  "more5", "eq13", "eq14"};
}

// ---------------------------------------------------------------------------
// 2D auxiliary spaces on a face chart
// ---------------------------------------------------------------------------

/// Raviart-Thomas D_k(F) = [P_{k-1}(F)]^2 + x P_{k-1}(F) in chart
/// coordinates; dimension k(k+2).
inline std::vector<Tan2> rt_space(int k) {
  std::vector<Tan2> basis;
  if (k <= 0) return basis;
  for (const Exps& e : monomials_upto(2, k - 1)) {
    Poly m(2);
    m.terms[e] = Rational(1);
    basis.push_back({m, Poly(2)});
    basis.push_back({Poly(2), m});
  }
  const MonoTable& hom = mono_table(2, k - 1);
  for (const Exps& e : hom.list) {
    Poly m(2);
    m.terms[e] = Rational(1);
    basis.push_back({Poly::variable(2, 0) * m, Poly::variable(2, 1) * m});
  }
  return basis;
}

/// In-plane rigid displacements R(F): constants plus the in-plane rotation.
inline std::vector<Tan2> face_rigid_space() {
  Poly one = Poly::constant(2, rat(1));
  return {{one, Poly(2)},
          {Poly(2), one},
          {Poly::variable(2, 1) * Rational(-1), Poly::variable(2, 0)}};
}

/// Scalar polynomial space P_k(F) as chart monomials (empty for k < 0).
inline std::vector<Poly> face_poly_space(int k) {
  std::vector<Poly> out;
  if (k < 0) return out;
  for (const Exps& e : monomials_upto(2, k)) {
    Poly m(2);
    m.terms[e] = Rational(1);
    out.push_back(m);
  }
  return out;
}

namespace detail_id {

inline std::vector<Rational> tan_coeffs(const Tan2& t, int degree) {
  std::vector<Rational> v;
  for (int comp = 0; comp < 2; ++comp)
    for (const Exps& e : monomials_upto(2, degree)) {
      auto it = t[comp].terms.find(e);
      v.push_back(it == t[comp].terms.end() ? Rational(0) : it->second);
    }
  return v;
}

inline std::vector<Rational> poly_coeffs(const Poly& p, int degree) {
  std::vector<Rational> v;
  for (const Exps& e : monomials_upto(2, degree)) {
    auto it = p.terms.find(e);
    v.push_back(it == p.terms.end() ? Rational(0) : it->second);
  }
  return v;
}

}  // namespace detail_id

/// Monomial-ordered complement of span(sub) inside P_k(F): the monomials not
/// pivotal for the subspace after exact reduction.
inline std::vector<Poly> quotient_complement_scalar(const std::vector<Poly>& sub, int k) {
  auto monos = monomials_upto(2, k);
  RowReducer red(static_cast<int32_t>(monos.size()));
  for (const Poly& p : sub) red.add_row(SparseVec::from_dense(detail_id::poly_coeffs(p, k)));
  std::vector<Poly> out;
  for (int32_t f : red.free_cols()) {
    Poly m(2);
    m.terms[monos[static_cast<std::size_t>(f)]] = Rational(1);
    out.push_back(m);
  }
  return out;
}

/// Same for vector fields: complement of span(sub) inside [P_k(F)]^2.
inline std::vector<Tan2> quotient_complement_tan(const std::vector<Tan2>& sub, int k) {
  auto monos = monomials_upto(2, k);
  RowReducer red(static_cast<int32_t>(2 * monos.size()));
  for (const Tan2& t : sub) red.add_row(SparseVec::from_dense(detail_id::tan_coeffs(t, k)));
  std::vector<Tan2> out;
  for (int32_t f : red.free_cols()) {
    int comp = f / static_cast<int32_t>(monos.size());
    Poly m(2);
    m.terms[monos[static_cast<std::size_t>(f % static_cast<int32_t>(monos.size()))]] = Rational(1);
    Tan2 t{Poly(2), Poly(2)};
    t[comp] = m;
    out.push_back(t);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lemma 5.9: 2D face exactness construction
// ---------------------------------------------------------------------------

struct FaceExactnessResult {
  bool pass = false;
  long hypothesis_dim = 0;
  long rhs_dim = 0;  // dimension of eps_F(b_F^2 [P_{r-5}]^2)
  std::string note;
};

/// Builds the space of symmetric u_FF in P_r(F) with curl_F(curl_F u_FF)'=0,
/// u_FF = 0 on the face boundary and t.curl_F(u_FF) = 0 there, then solves
/// u_FF = eps_F(b_F^2 phi) for seeded members.
inline FaceExactnessResult face_exactness_check(const AlfeldSplit& sp, int face, int r,
                                                uint64_t seed, int samples = 5) {
  FaceChart c = FaceChart::make(sp, face);
  FaceExactnessResult res;

  auto monos = monomials_upto(2, r);
  const std::size_t nm = monos.size();
  // unknowns: coefficients of (u11, u12, u22)
  auto entry_poly = [&](const std::vector<Rational>& x, int which) {
    Poly p(2);
    for (std::size_t m = 0; m < nm; ++m)
      if (!is_zero(x[which * nm + m])) p.terms[monos[m]] = x[which * nm + m];
    return p;
  };

  // barycentric coordinates of the chart triangle (affine in xi)
  std::array<Poly, 3> nu;
  {
    // nu1, nu2 solve xi = nu1 xi1 + nu2 xi2; nu0 = 1 - nu1 - nu2
    Rational det = c.xi[1][0] * c.xi[2][1] - c.xi[1][1] * c.xi[2][0];
    Poly x0 = Poly::variable(2, 0), x1 = Poly::variable(2, 1);
    nu[1] = (x0 * c.xi[2][1] - x1 * c.xi[2][0]) * (1 / det);
    nu[2] = (x1 * c.xi[1][0] - x0 * c.xi[1][1]) * (1 / det);
    nu[0] = Poly::constant(2, rat(1)) - nu[1] - nu[2];
  }
  Poly bF = nu[0] * nu[1] * nu[2];

  // constraint rows over the 3*nm coefficients
  RowReducer red(static_cast<int32_t>(3 * nm));
  // helper: coefficient rows of a linear map u-coeffs -> polynomial
  auto rows_of = [&](const std::function<Poly(const Mat2&)>& op, int out_deg) {
    auto out_monos = monomials_upto(2, out_deg);
    std::map<Exps, std::size_t> pos;
    for (std::size_t i = 0; i < out_monos.size(); ++i) pos[out_monos[i]] = i;
    std::vector<SparseVec> rows(out_monos.size());
    for (std::size_t j = 0; j < 3 * nm; ++j) {
      std::vector<Rational> unit(3 * nm, Rational(0));
      unit[j] = 1;
      Mat2 u{{{entry_poly(unit, 0), entry_poly(unit, 1)},
              {entry_poly(unit, 1), entry_poly(unit, 2)}}};
      Poly img = op(u);
      for (const auto& [e, v] : img.terms) rows[pos.at(e)].add_term(static_cast<int32_t>(j), v);
    }
    for (auto& rw : rows) rw.compress();
    return rows;
  };

  // curl_F (curl_F u)' = 0
  for (SparseVec& rw : rows_of([](const Mat2& u) { return curl_F(curl_F(u)); },
                               std::max(0, r - 2)))
    red.add_row(std::move(rw));
  // u = 0 on each boundary edge and t . curl_F u = 0 there
  for (int e = 0; e < 3; ++e) {
    int a = e, b = (e + 1) % 3;
    std::vector<Poly> seg;
    for (int j = 0; j < 2; ++j) {
      Poly s(1);
      s += Poly::constant(1, c.xi[a][j]);
      s += Poly::variable(1, 0, c.xi[b][j] - c.xi[a][j]);
      seg.push_back(s);
    }
    Vec3 dl = c.corner[b] - c.corner[a];
    Rational d1 = dot(dl, c.frame.t1), d2 = dot(dl, c.frame.t2);
    for (int which = 0; which < 3; ++which) {
      // restriction of each entry to the edge vanishes
      std::vector<SparseVec> rows(static_cast<std::size_t>(r) + 1);
      for (std::size_t m = 0; m < nm; ++m) {
        Poly mono(2);
        mono.terms[monos[m]] = Rational(1);
        Poly restr = mono.compose(seg);
        for (const auto& [ex, v] : restr.terms)
          rows[ex[0]].add_term(static_cast<int32_t>(which * nm + m), v);
      }
      for (auto& rw : rows) red.add_row(std::move(rw));
    }
    // t . curl_F u restricted to the edge (direction vector suffices)
    {
      std::vector<SparseVec> rows(static_cast<std::size_t>(std::max(0, r - 1)) + 1);
      for (std::size_t j = 0; j < 3 * nm; ++j) {
        std::vector<Rational> unit(3 * nm, Rational(0));
        unit[j] = 1;
        Mat2 u{{{entry_poly(unit, 0), entry_poly(unit, 1)},
                {entry_poly(unit, 1), entry_poly(unit, 2)}}};
        Tan2 cf = curl_F(u);
        Poly tc = (cf[0] * d1 + cf[1] * d2).compose(seg);
        for (const auto& [ex, v] : tc.terms) rows[ex[0]].add_term(static_cast<int32_t>(j), v);
      }
      for (auto& rw : rows) red.add_row(std::move(rw));
    }
  }

  auto kernel = red.nullspace();
  res.hypothesis_dim = static_cast<long>(kernel.size());

  // right-hand side family eps_F(b_F^2 phi), phi in [P_{r-5}]^2
  std::vector<Tan2> phis;
  for (const Poly& m : face_poly_space(r - 5)) {
    phis.push_back({bF * bF * m, Poly(2)});
    phis.push_back({Poly(2), bF * bF * m});
  }
  RowReducer img(static_cast<int32_t>(3 * nm));
  std::vector<SparseVec> img_cols;
  auto mat_coeffs = [&](const Mat2& u) {
    std::vector<Rational> v(3 * nm, Rational(0));
    const Poly* entries[3] = {&u[0][0], &u[0][1], &u[1][1]};
    for (int which = 0; which < 3; ++which)
      for (const auto& [e, val] : entries[which]->terms) {
        for (std::size_t m = 0; m < nm; ++m)
          if (monos[m] == e) {
            v[which * nm + m] = val;
            break;
          }
      }
    return v;
  };
  for (const Tan2& phi : phis) {
    SparseVec col = SparseVec::from_dense(mat_coeffs(eps_F(phi)));
    img_cols.push_back(col);
    img.add_row(col);
  }
  res.rhs_dim = img.rank();

  // solve for seeded members of the hypothesis space
  FieldRng rng(seed);
  res.pass = true;
  for (int s = 0; s < samples; ++s) {
    SparseVec target;
    for (const auto& kv : kernel) {
      Rational w = rng.small_rational();
      target.axpy(w, kv);
    }
    // consistency: target must lie in the span of img_cols
    RowReducer chk(static_cast<int32_t>(3 * nm));
    for (const SparseVec& cc : img_cols) chk.add_row(cc);
    int32_t before = chk.rank();
    chk.add_row(target);
    if (chk.rank() != before) {
      res.pass = false;
      res.note = "hypothesis member not representable as eps_F(b_F^2 phi)";
      break;
    }
  }
  if (res.hypothesis_dim == 0) res.note = "hypothesis space empty at this degree";
  return res;
}

}  // namespace alfeld

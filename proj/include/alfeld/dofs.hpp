#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "alfeld/calculus.hpp"
#include "alfeld/identities.hpp"
#include "alfeld/linalg.hpp"
#include "alfeld/spaces.hpp"

namespace alfeld {

struct UnsupportedRangeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class DofKind { PointDerivative, EdgeMoment, FaceMoment, InteriorMoment };

/// One exact linear functional on broken fields, degree-parametric so the
/// same dof evaluates polynomial inputs of any degree.
struct DofFunctional {
  std::string block;
  DofKind kind = DofKind::InteriorMoment;
  std::function<SparseVec(int degree)> make_row;

  Rational apply(const BrokenField& f) const {
    SparseVec row = make_row(f.degree());
    Rational acc(0);
    for (const auto& [i, v] : row.terms) acc += v * f.coeffs()[i];
    return acc;
  }
};

namespace dof_detail {

/// Shared per-degree caches for the differential operators a dof family
/// composes with.
struct OpCache {
  const AlfeldSplit* split;
  std::map<std::pair<std::string, int>, LinearOp> ops;
  std::mutex mtx;

  const LinearOp& get(const std::string& kind, int r) {
    std::lock_guard<std::mutex> lk(mtx);
    auto key = std::make_pair(kind, r);
    auto it = ops.find(key);
    if (it != ops.end()) return it->second;
    LinearOp op;
    if (kind == "grad_s") op = op_grad(*split, r, Shape::Scalar);
    else if (kind == "grad_v") op = op_grad(*split, r, Shape::Vector3);
    else if (kind == "curl_v") op = op_curl(*split, r, Shape::Vector3);
    else if (kind == "div_v") op = op_div(*split, r, Shape::Vector3);
    else if (kind == "eps") op = compose(op_algebraic(AlgebraicMap::FullToSym, r > 0 ? r - 1 : 0),
                                          op_grad(*split, r, Shape::Vector3));
    else if (kind == "inc") op = op_inc(*split, r);
    else if (kind == "curl_sym_t") {
      // (curl u)' for symmetric u
      LinearOp full = op_algebraic(AlgebraicMap::SymToFull, r);
      LinearOp c = op_curl(*split, r, Shape::Matrix3);
      LinearOp t = op_algebraic(AlgebraicMap::Transpose, c.degree_out);
      op = compose(t, compose(c, full));
    } else if (kind == "div_sym") {
      op = compose(op_div(*split, r, Shape::Matrix3), op_algebraic(AlgebraicMap::SymToFull, r));
    } else {
      throw std::logic_error("OpCache: unknown op " + kind);
    }
    return ops.emplace(key, std::move(op)).first->second;
  }
};

/// integral over [0,1] of (1-t)^p t^q.
inline Rational beta_int(int p, int q) {
  Rational v(factorial(p) * factorial(q), factorial(p + q + 1));
  v.canonicalize();
  return v;
}

/// Row of the edge moment: integral over e of sum_c combo_c(tau) * comp_c,
/// trace taken from subtet k, parametrized from the lower-id vertex.
inline SparseVec edge_moment_row(const AlfeldSplit& sp, int deg, Shape shape, int edge, int k,
                                 const std::vector<std::pair<int, Poly>>& combos) {
  const ParentEdge& pe = sp.edges()[edge];
  const MonoTable& t4 = mono_table(4, deg);
  int la = sp.local_index(k, pe.verts[0]);
  int lb = sp.local_index(k, pe.verts[1]);
  SparseVec row;
  for (const auto& [comp, sigma] : combos) {
    for (std::size_t m = 0; m < t4.size(); ++m) {
      const Exps& e = t4.list[m];
      bool on_edge = true;
      for (int v = 0; v < 4; ++v)
        if (v != la && v != lb && e[v] != 0) on_edge = false;
      if (!on_edge) continue;
      int p = e[la], q = e[lb];
      Rational acc(0);
      for (const auto& [se, sc] : sigma.terms) acc += sc * beta_int(p, q + se[0]);
      if (!is_zero(acc)) row.add_term(coeff_index(deg, shape, k, comp, static_cast<int32_t>(m)), acc);
    }
  }
  row.compress();
  return row;
}

/// A face chart extended with the sorted-order barycentric maps needed to
/// convert chart multipliers into face-barycentric integration space.
struct FaceCtx {
  FaceChart chart;
  std::array<int, 3> sorted_verts;   // parent vertex ids, ascending
  std::array<Poly, 2> xi_of_nu;      // chart coords as degree-1 polys in nu (3 vars)

  static FaceCtx make(const AlfeldSplit& sp, int face) {
    FaceCtx ctx;
    ctx.chart = FaceChart::make(sp, face);
    const ParentFace& pf = sp.faces()[face];
    ctx.sorted_verts = pf.verts;
    for (int j = 0; j < 2; ++j) {
      Poly s(3);
      for (int m = 0; m < 3; ++m) {
        // chart coordinate of sorted vertex m
        Vec3 d = sp.parent().v[pf.verts[m]] - ctx.chart.frame.origin;
        Rational xi = dot(d, j == 0 ? ctx.chart.frame.t1 : ctx.chart.frame.t2);
        s += Poly::variable(3, m, xi);
      }
      ctx.xi_of_nu[j] = s;
    }
    return ctx;
  }

  /// Chart polynomial -> barycentric polynomial in the sorted vertex order.
  Poly to_nu(const Poly& p2) const {
    return p2.compose({xi_of_nu[0], xi_of_nu[1]});
  }
};

/// Row of the face moment: integral over F of sum_c combo_c(x) * comp_c,
/// trace from the face's owner subtet, multipliers as chart polynomials,
/// true (rational) area measure.
inline SparseVec face_moment_row(const AlfeldSplit& sp, int deg, Shape shape, int face,
                                 const FaceCtx& ctx,
                                 const std::vector<std::pair<int, Poly>>& combos) {
  const ParentFace& pf = sp.faces()[face];
  int k = pf.opposite;
  const MonoTable& t4 = mono_table(4, deg);
  std::array<int, 3> loc{};
  for (int m = 0; m < 3; ++m) loc[m] = sp.local_index(k, pf.verts[m]);
  int zloc = sp.local_index(k, 4);
  SparseVec row;
  for (const auto& [comp, kappa2] : combos) {
    Poly kappa = ctx.to_nu(kappa2);
    for (std::size_t m = 0; m < t4.size(); ++m) {
      const Exps& e = t4.list[m];
      if (e[zloc] != 0) continue;
      Exps nu{0, 0, 0, 0};
      for (int v = 0; v < 3; ++v) nu[v] = e[loc[v]];
      Poly mono(3);
      mono.terms[nu] = Rational(1);
      Rational val = simplex_integral(mono * kappa, ctx.chart.area);
      if (!is_zero(val)) row.add_term(coeff_index(deg, shape, k, comp, static_cast<int32_t>(m)), val);
    }
  }
  row.compress();
  return row;
}

/// Generic face functional: feed the chart traces of all components of the
/// (possibly derived) field into `func`. Used for surface-operator dofs.
inline SparseVec face_functional_row(
    const AlfeldSplit& sp, int deg, Shape shape, int face, const FaceCtx& ctx,
    const std::function<Rational(const std::vector<Poly>&)>& func) {
  const ParentFace& pf = sp.faces()[face];
  int k = pf.opposite;
  const MonoTable& t4 = mono_table(4, deg);
  std::array<int, 3> loc{};
  for (int m = 0; m < 3; ++m) loc[m] = sp.local_index(k, pf.verts[m]);
  int zloc = sp.local_index(k, 4);

  // nu as affine chart polynomials (sorted order), to convert traces to xi
  std::array<Poly, 3> nu_of_xi;
  {
    const auto& ch = ctx.chart;
    std::array<std::array<Rational, 2>, 3> xs;
    for (int m = 0; m < 3; ++m) {
      Vec3 d = sp.parent().v[pf.verts[m]] - ch.frame.origin;
      xs[m] = {dot(d, ch.frame.t1), dot(d, ch.frame.t2)};
    }
    // solve for barycentric coordinates of the xi-plane triangle
    Rational ax = xs[1][0] - xs[0][0], ay = xs[1][1] - xs[0][1];
    Rational bx = xs[2][0] - xs[0][0], by = xs[2][1] - xs[0][1];
    Rational det = ax * by - ay * bx;
    Poly dx = Poly::variable(2, 0) - Poly::constant(2, xs[0][0]);
    Poly dy = Poly::variable(2, 1) - Poly::constant(2, xs[0][1]);
    nu_of_xi[1] = (dx * by - dy * bx) * (1 / det);
    nu_of_xi[2] = (dy * ax - dx * ay) * (1 / det);
    nu_of_xi[0] = Poly::constant(2, rat(1)) - nu_of_xi[1] - nu_of_xi[2];
  }

  SparseVec row;
  std::vector<Poly> traces(ncomp(shape), Poly(2));
  for (int comp = 0; comp < ncomp(shape); ++comp) {
    for (std::size_t m = 0; m < t4.size(); ++m) {
      const Exps& e = t4.list[m];
      if (e[zloc] != 0) continue;
      Poly tr(2);
      tr += Poly::constant(2, rat(1));
      for (int v = 0; v < 3; ++v)
        for (int q = 0; q < e[loc[v]]; ++q) tr = tr * nu_of_xi[v];
      for (auto& t : traces) t = Poly(2);
      traces[comp] = tr;
      Rational val = func(traces);
      if (!is_zero(val)) row.add_term(coeff_index(deg, shape, k, comp, static_cast<int32_t>(m)), val);
    }
  }
  row.compress();
  return row;
}

}  // namespace dof_detail

// ---------------------------------------------------------------------------
// DofSet
// ---------------------------------------------------------------------------

struct DofSet {
  SpaceLabel label;
  int degree = 0;           // degree of the target space
  int family_param = 0;     // the paper's family parameter
  Shape shape = Shape::Scalar;
  const AlfeldSplit* split = nullptr;
  bool frame_exact = true;
  std::vector<DofFunctional> dofs;
  std::vector<std::pair<std::string, long>> block_counts;   // realized sizes
  std::vector<std::pair<std::string, long>> printed_counts; // the paper's formulas

  std::size_t size() const { return dofs.size(); }

  const std::vector<SparseVec>& rows_at(int deg) const {
    std::lock_guard<std::mutex> lk(mtx_);
    auto it = row_cache_.find(deg);
    if (it != row_cache_.end()) return it->second;
    std::vector<SparseVec> rows;
    rows.reserve(dofs.size());
    for (const auto& d : dofs) rows.push_back(d.make_row(deg));
    return row_cache_.emplace(deg, std::move(rows)).first->second;
  }

  std::vector<Rational> apply_all(const BrokenField& f) const {
    const auto& rows = rows_at(f.degree());
    std::vector<Rational> out(rows.size(), Rational(0));
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (const auto& [j, v] : rows[i].terms) out[i] += v * f.coeffs()[j];
    return out;
  }

  /// M[i][j] = dof_i(basis_j).
  ExactMatrix unisolvency_matrix(const FESpace& space) const {
    const auto& rows = rows_at(space.degree);
    ExactMatrix m(rows.size(), space.dim());
    for (std::size_t j = 0; j < space.dim(); ++j)
      for (std::size_t i = 0; i < rows.size(); ++i) m(i, j) = rows[i].dot(space.basis[j]);
    return m;
  }

 private:
  mutable std::map<int, std::vector<SparseVec>> row_cache_;
  mutable std::mutex mtx_;
};

struct UnisolvencyReport {
  bool counts_match = false;
  bool nonsingular = false;
  std::size_t dof_count = 0;
  std::size_t space_dim = 0;
  long matrix_rank = -1;  // filled on the exact path
  std::string note;
};

/// Nonsingularity check: a nonzero determinant mod a seeded large prime is a
/// rigorous certificate; the exact elimination confirms on demand or on a
/// modular miss.
inline UnisolvencyReport check_unisolvent(const DofSet& dofs, const FESpace& space,
                                          bool exact_confirm = false, uint64_t seed = 12345) {
  UnisolvencyReport rep;
  rep.dof_count = dofs.size();
  rep.space_dim = space.dim();
  rep.counts_match = rep.dof_count == rep.space_dim;
  if (!rep.counts_match) {
    rep.note = "dof count != space dimension";
    // a redundant family can still span; record the rank
    ExactMatrix m = dofs.unisolvency_matrix(space);
    rep.matrix_rank = static_cast<long>(rank(m));
    rep.nonsingular = rep.matrix_rank == static_cast<long>(space.dim());
    return rep;
  }
  ExactMatrix m = dofs.unisolvency_matrix(space);
  if (exact_confirm) {
    rep.matrix_rank = static_cast<long>(rank(m));
    rep.nonsingular = rep.matrix_rank == static_cast<long>(m.rows());
  } else {
    rep.nonsingular = certify_nonsingular(m, seed);
  }
  return rep;
}

/// Canonical interpolation: the unique member of `space` with the same dof
/// values as `input`. For redundant families the overdetermined system must
/// be consistent; inconsistency throws (it would falsify the dof design).
inline BrokenField interpolate(const DofSet& dofs, const FESpace& space,
                               const BrokenField& input) {
  std::vector<Rational> b(dofs.size());
  {
    const auto& rows = dofs.rows_at(input.degree());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      Rational acc(0);
      for (const auto& [j, v] : rows[i].terms) acc += v * input.coeffs()[j];
      b[i] = std::move(acc);
    }
  }
  ExactMatrix m = dofs.unisolvency_matrix(space);
  std::vector<Rational> c;
  if (m.rows() == m.cols()) {
    c = solve_exact(m, b);
  } else {
    // consistent least-index solve via RREF of the augmented system
    RowReducer red(static_cast<int32_t>(m.cols() + 1));
    for (std::size_t i = 0; i < m.rows(); ++i) {
      SparseVec r;
      for (std::size_t j = 0; j < m.cols(); ++j)
        if (!is_zero(m(i, j))) r.add_term(static_cast<int32_t>(j), m(i, j));
      r.add_term(static_cast<int32_t>(m.cols()), b[i]);
      red.add_row(std::move(r));
    }
    auto frees = red.free_cols();
    for (int32_t f : frees)
      if (f == static_cast<int32_t>(m.cols()))
        throw std::runtime_error("interpolate: inconsistent redundant dof system");
    if (frees.size() != 1)
      throw std::runtime_error("interpolate: redundant dof system is rank deficient");
    // reduced equations read (c, -1) . row = 0, so c[pivot] = row's b-entry
    c.assign(m.cols(), Rational(0));
    for (const SparseVec& row : red.rref_rows()) {
      int32_t pc = row.leading_index();
      c[pc] = row.at(static_cast<int32_t>(m.cols()));
    }
  }
  return space.field_from_coords(c);
}

// (dof family construction follows in dof_families.hpp)

}  // namespace alfeld

#include "alfeld/dof_families.hpp"

#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "alfeld/broken.hpp"
#include "alfeld/fields.hpp"
#include "alfeld/geometry.hpp"
#include "alfeld/linalg.hpp"
#include "alfeld/poly.hpp"
#include "alfeld/sparse.hpp"

namespace alfeld {

// ---------------------------------------------------------------------------
// label catalog
// ---------------------------------------------------------------------------

enum class Family { W, L, S, V, Z, Zhat, Ztilde, U };

struct SpaceLabel {
  Family family;
  int k = 0;      // form degree 0..3
  bool ring = false;

  bool operator<(const SpaceLabel& o) const {
    if (family != o.family) return family < o.family;
    if (k != o.k) return k < o.k;
    return ring < o.ring;
  }
  bool operator==(const SpaceLabel& o) const {
    return family == o.family && k == o.k && ring == o.ring;
  }
};

inline std::string label_name(const SpaceLabel& l) {
  std::string base;
  switch (l.family) {
    case Family::W: base = "W"; break;
    case Family::L: base = "L"; break;
    case Family::S: base = "S"; break;
    case Family::V: base = "V"; break;
    case Family::Z: base = "Z"; break;
    case Family::Zhat: base = "Zhat"; break;
    case Family::Ztilde: base = "Ztilde"; break;
    case Family::U: base = "U"; break;
  }
  return (l.ring ? "o" : "") + base + std::to_string(l.k);
}

inline SpaceLabel parse_label(std::string s) {
  SpaceLabel l;
  if (!s.empty() && s[0] == 'o') {
    l.ring = true;
    s = s.substr(1);
  }
  if (s.size() < 2) throw std::invalid_argument("unknown space label");
  l.k = s.back() - '0';
  std::string base = s.substr(0, s.size() - 1);
  if (base == "W") l.family = Family::W;
  else if (base == "L") l.family = Family::L;
  else if (base == "S") l.family = Family::S;
  else if (base == "V") l.family = Family::V;
  else if (base == "Z") l.family = Family::Z;
  else if (base == "Zhat") l.family = Family::Zhat;
  else if (base == "Ztilde") l.family = Family::Ztilde;
  else if (base == "U") l.family = Family::U;
  else throw std::invalid_argument("unknown space label '" + s + "'");
  if (l.k < 0 || l.k > 3) throw std::invalid_argument("space label form degree out of range");
  return l;
}

inline Shape label_shape(const SpaceLabel& l) {
  if (l.family == Family::U) {
    switch (l.k) {
      case 0: return Shape::Vector3;
      case 1: return Shape::Sym3;
      case 2: return Shape::Sym3;
      case 3: return Shape::Vector3;
    }
  }
  if (l.family == Family::Zhat || l.family == Family::Ztilde) return Shape::Scalar;
  return (l.k == 0 || l.k == 3) ? Shape::Scalar : Shape::Vector3;
}

// ---------------------------------------------------------------------------
// closed-form dimension table
// ---------------------------------------------------------------------------

inline long dim_S0(long r) { return (r + 1) * (r + 2) * (r + 3) / 6 + (r - 3) * (r - 2) * (r - 1) / 2; }
inline long dim_oS0(long r) { return std::max(2 * (r - 4) * (r - 3) * (r - 2) / 3, 0l); }
inline long dim_L0(long r) { return 5 + 10 * (r - 1) + 5 * (r - 2) * (r - 1) + 2 * (r - 3) * (r - 2) * (r - 1) / 3; }
inline long dim_oL0(long r) { return 1 + 4 * (r - 1) + 3 * (r - 2) * (r - 1) + 2 * (r - 3) * (r - 2) * (r - 1) / 3; }
inline long dim_W1(long r) { return 10 * (r + 1) + 10 * (r - 1) * (r + 1) + 2 * (r - 2) * (r - 1) * (r + 1); }
inline long dim_oW1(long r) { return 4 * (r + 1) + 6 * (r - 1) * (r + 1) + 2 * (r - 2) * (r - 1) * (r + 1); }
inline long dim_W2(long r) { return 5 * (r + 1) * (r + 2) + 2 * (r - 1) * (r + 1) * (r + 2); }
inline long dim_oW2(long r) { return 3 * (r + 1) * (r + 2) + 2 * (r - 1) * (r + 1) * (r + 2); }
inline long dim_W3(long r) { return 2 * (r + 1) * (r + 2) * (r + 3) / 3; }

/// Closed-form dimension with the paper's validity window; throws
/// std::out_of_range for (label, degree) outside the table's domain.
inline long expected_dimension(const SpaceLabel& l, int r) {
  auto require = [&](bool ok) {
    if (!ok)
      throw std::out_of_range("expected_dimension: (" + label_name(l) + ", " +
                              std::to_string(r) + ") outside table domain");
  };
  switch (l.family) {
    case Family::W:
      require(r >= 1);
      switch (l.k) {
        case 0: return l.ring ? dim_oL0(r) : dim_L0(r);
        case 1: return l.ring ? dim_oW1(r) : dim_W1(r);
        case 2: return l.ring ? dim_oW2(r) : dim_W2(r);
        case 3: return dim_W3(r) - (l.ring ? 1 : 0);
      }
      break;
    case Family::L:
      require(r >= 1);
      switch (l.k) {
        case 0: return l.ring ? dim_oL0(r) : dim_L0(r);
        case 1:
        case 2: return 3 * (l.ring ? dim_oL0(r) : dim_L0(r));
        case 3: return dim_L0(r) - (l.ring ? 1 : 0);
      }
      break;
    case Family::S:
      if (l.k == 0) {
        require(r >= 1);
        return l.ring ? dim_oS0(r) : dim_S0(r);
      }
      if (l.k == 3) {
        require(r >= 1);
        return dim_L0(r) - (l.ring ? 1 : 0);
      }
      require(false);  // S1, S2 have no closed form in the catalog
      break;
    case Family::V:
      require(r >= 1);
      switch (l.k) {
        case 0: return l.ring ? dim_oS0(r) : dim_S0(r);
        case 1: {
          long ring = std::max(2l * r * r * r - 3 * r * r + 7 * r - 15, 0l);
          return l.ring ? ring : 6 * (r * r + 1) + ring;
        }
        case 2:
          return l.ring ? 2l * r * r * r + 7 * r * r + 7 * r - 10
                        : 2l * r * r * r + 9 * r * r + 13 * r - 6;
        case 3: return dim_W3(r) - (l.ring ? 1 : 0);
      }
      break;
    case Family::Z:
      switch (l.k) {
        case 0:
          require(r >= 1);
          return l.ring ? dim_oS0(r) : dim_S0(r);
        case 1:
          require(r >= 4);
          return l.ring ? (2l * r - 3) * (r - 3) * (r - 2)
                        : 2l * r * r * r - 3 * r * r + 13 * r - 4;
        case 2:
          require(r >= 2);
          return l.ring ? 2l * r * r * r - 3 * r * r + 7 * r - 15
                        : 2l * r * r * r + 3 * r * r + 7 * r - 9;
        case 3:
          require(l.ring ? r >= 2 : r >= 1);
          return dim_W3(r) - (l.ring ? 13 : 8);
      }
      break;
    case Family::Zhat:
      require(l.k == 3 && r >= 1 && !l.ring);
      return dim_W3(r) - 12;
    case Family::Ztilde:
      require(l.k == 3 && r >= 1 && !l.ring);
      return dim_W3(r) - 9;
    case Family::U: {
      // Lemma 5.5 is stated in the family parameter f >= 4; spaces live at
      // degrees f+1, f, f-2, f-3.
      long f;
      switch (l.k) {
        case 0: f = r - 1; break;
        case 1: f = r; break;
        case 2: f = r + 2; break;
        case 3: f = r + 3; break;
        default: f = 0;
      }
      require(f >= 4);
      switch (l.k) {
        case 0: return l.ring ? 2 * (f - 3) * (f - 2) * (f - 1) : 2 * f * f * f + 16 * f + 12;
        case 1: return l.ring ? 4 * f * f * f - 21 * f * f + 29 * f - 6
                              : 4 * f * f * f - 3 * f * f + 17 * f - 6;
        case 2: return l.ring ? f * (f - 1) * (4 * f - 11) : 4 * f * f * f - 9 * f * f + 5 * f - 12;
        case 3: return l.ring ? 2 * f * f * f - 6 * f * f + 4 * f - 6 : 2 * f * (f - 1) * (f - 2);
      }
      break;
    }
  }
  throw std::out_of_range("expected_dimension: unhandled label");
}

// ---------------------------------------------------------------------------
// constraint row assembly
// ---------------------------------------------------------------------------

/// Weighted combination of components: sum_c w_c * (component c).
using CompCombo = std::vector<std::pair<int, Rational>>;

namespace rows {

/// Mono index maps for traces. For each face monomial (3 vars, degree r),
/// the matching subtet monomial index.
inline std::vector<int32_t> facet_trace_map(const AlfeldSplit& sp, int r, int facet, int side) {
  const InteriorFacet& g = sp.interior_facets()[facet];
  int k = g.adjacent[side];
  const MonoTable& t3 = mono_table(3, r);
  const MonoTable& t4 = mono_table(4, r);
  std::array<int, 3> loc = {sp.local_index(k, 4), sp.local_index(k, g.xs[0]),
                            sp.local_index(k, g.xs[1])};
  std::vector<int32_t> map(t3.size());
  for (std::size_t m = 0; m < t3.size(); ++m) {
    Exps e{0, 0, 0, 0};
    for (int v = 0; v < 3; ++v) e[loc[v]] = t3.list[m][v];
    map[m] = t4.index(e);
  }
  return map;
}

/// Same for a parent (boundary) face; owner subtet is faces()[face].opposite.
inline std::vector<int32_t> face_trace_map(const AlfeldSplit& sp, int r, int face) {
  const ParentFace& f = sp.faces()[face];
  int k = f.opposite;
  const MonoTable& t3 = mono_table(3, r);
  const MonoTable& t4 = mono_table(4, r);
  std::array<int, 3> loc = {sp.local_index(k, f.verts[0]), sp.local_index(k, f.verts[1]),
                            sp.local_index(k, f.verts[2])};
  std::vector<int32_t> map(t3.size());
  for (std::size_t m = 0; m < t3.size(); ++m) {
    Exps e{0, 0, 0, 0};
    for (int v = 0; v < 3; ++v) e[loc[v]] = t3.list[m][v];
    map[m] = t4.index(e);
  }
  return map;
}

/// Continuity of a component combination across every interior facet.
inline void interior_continuity(const AlfeldSplit& sp, int r, Shape shape,
                                const std::vector<CompCombo>& combos,
                                std::vector<SparseVec>& out, int32_t offset = 0) {
  const MonoTable& t3 = mono_table(3, r);
  for (int g = 0; g < 6; ++g) {
    auto m0 = facet_trace_map(sp, r, g, 0);
    auto m1 = facet_trace_map(sp, r, g, 1);
    int k0 = sp.interior_facets()[g].adjacent[0];
    int k1 = sp.interior_facets()[g].adjacent[1];
    for (const CompCombo& combo : combos)
      for (std::size_t m = 0; m < t3.size(); ++m) {
        SparseVec row;
        for (const auto& [c, w] : combo) {
          row.add_term(offset + coeff_index(r, shape, k0, c, m0[m]), w);
          row.add_term(offset + coeff_index(r, shape, k1, c, m1[m]), -w);
        }
        row.compress();
        out.push_back(std::move(row));
      }
  }
}

/// Zero trace of a component combination on every parent (boundary) face.
inline void boundary_zero(const AlfeldSplit& sp, int r, Shape shape,
                          const std::vector<std::vector<CompCombo>>& combos_per_face,
                          std::vector<SparseVec>& out, int32_t offset = 0) {
  const MonoTable& t3 = mono_table(3, r);
  for (int f = 0; f < 4; ++f) {
    auto mp = face_trace_map(sp, r, f);
    int k = sp.faces()[f].opposite;
    for (const CompCombo& combo : combos_per_face[f])
      for (std::size_t m = 0; m < t3.size(); ++m) {
        SparseVec row;
        for (const auto& [c, w] : combo)
          row.add_term(offset + coeff_index(r, shape, k, c, mp[m]), w);
        row.compress();
        out.push_back(std::move(row));
      }
  }
}

/// Functional row: D^alpha of component `comp` at parent vertex, evaluated
/// from subtet k. Entries only at monomials with enough mass at the vertex.
inline SparseVec vertex_deriv_row(const AlfeldSplit& sp, int r, Shape shape, int k, int comp,
                                  int parent_vertex, const std::array<int, 3>& alpha,
                                  int32_t offset = 0) {
  const MonoTable& t4 = mono_table(4, r);
  const SubTet& s = sp.subtet(k);
  int loc = sp.local_index(k, parent_vertex);
  int total = alpha[0] + alpha[1] + alpha[2];
  SparseVec row;
  for (std::size_t m = 0; m < t4.size(); ++m) {
    const Exps& e = t4.list[m];
    int off_vertex = 0;
    for (int v = 0; v < 4; ++v)
      if (v != loc) off_vertex += e[v];
    if (off_vertex > total) continue;
    Poly p(4);
    p.terms[e] = Rational(1);
    for (int j = 0; j < 3; ++j)
      for (int q = 0; q < alpha[j]; ++q) p = cartesian_partial(p, s, j);
    std::array<Rational, 4> at{};
    at[loc] = 1;
    Rational v = p.eval(std::span<const Rational>(at.data(), 4));
    if (!is_zero(v)) row.add_term(offset + coeff_index(r, shape, k, comp, static_cast<int32_t>(m)), v);
  }
  row.compress();
  return row;
}

inline std::vector<std::array<int, 3>> derivative_orders(int order_exactly) {
  std::vector<std::array<int, 3>> alphas;
  for (int a = order_exactly; a >= 0; --a)
    for (int b = order_exactly - a; b >= 0; --b) alphas.push_back({a, b, order_exactly - a - b});
  return alphas;
}

/// Jump rows between the subtets meeting each parent vertex, for all
/// derivatives of exact order `order` and the given components.
inline void vertex_jump(const AlfeldSplit& sp, int r, Shape shape, int order,
                        const std::vector<int>& comps, std::vector<SparseVec>& out,
                        int32_t offset = 0) {
  auto alphas = derivative_orders(order);
  for (int i = 0; i < 4; ++i) {
    auto ks = sp.subtets_at_vertex(i);
    for (int c : comps)
      for (const auto& al : alphas)
        for (int p = 0; p < 2; ++p) {
          SparseVec a = vertex_deriv_row(sp, r, shape, ks[p], c, i, al, offset);
          SparseVec b = vertex_deriv_row(sp, r, shape, ks[p + 1], c, i, al, offset);
          a.axpy(Rational(-1), b);
          out.push_back(std::move(a));
        }
  }
}

/// Zero rows: derivative of exact order `order` vanishes at each parent
/// vertex, limit taken from every subtet meeting it.
inline void vertex_zero(const AlfeldSplit& sp, int r, Shape shape, int order,
                        const std::vector<int>& comps, std::vector<SparseVec>& out,
                        int32_t offset = 0) {
  auto alphas = derivative_orders(order);
  for (int i = 0; i < 4; ++i)
    for (int k : sp.subtets_at_vertex(i))
      for (int c : comps)
        for (const auto& al : alphas)
          out.push_back(vertex_deriv_row(sp, r, shape, k, c, i, al, offset));
}

/// Integration-against-multiplier row: f -> integral over T of f . m
/// (Frobenius weights on Sym3).
inline SparseVec pairing_row(const BrokenField& m, int degree_of_argument, int32_t offset = 0) {
  const AlfeldSplit& sp = m.split();
  Shape shape = m.shape();
  const MonoTable& t4 = mono_table(4, degree_of_argument);
  SparseVec row;
  for (int k = 0; k < 4; ++k) {
    const Rational& vol = sp.subtet(k).abs_volume;
    for (int c = 0; c < ncomp(shape); ++c) {
      Poly mp = m.component_poly(k, c);
      if (mp.is_zero_poly()) continue;
      Rational w = (shape == Shape::Sym3) ? Rational(sym_weight(c)) : Rational(1);
      for (std::size_t mono = 0; mono < t4.size(); ++mono) {
        Poly prod(4);
        prod.terms[t4.list[mono]] = Rational(1);
        prod = prod * mp;
        Rational v = w * simplex_integral(prod, vol);
        if (!is_zero(v))
          row.add_term(offset + coeff_index(degree_of_argument, shape, k, c, static_cast<int32_t>(mono)), v);
      }
    }
  }
  row.compress();
  return row;
}

/// Mean-zero row for scalar fields.
inline SparseVec mean_row(const AlfeldSplit& sp, int r, int32_t offset = 0) {
  const MonoTable& t4 = mono_table(4, r);
  SparseVec row;
  for (int k = 0; k < 4; ++k)
    for (std::size_t m = 0; m < t4.size(); ++m) {
      Rational v = simplex_mono_integral(t4.list[m], 4, sp.subtet(k).abs_volume);
      row.add_term(offset + coeff_index(r, Shape::Scalar, k, 0, static_cast<int32_t>(m)), v);
    }
  row.compress();
  return row;
}

/// Rewrites rows over the outputs of `op` into rows over its inputs,
/// i.e. imposes conditions on a derived field (curl, grad, div, inc ...).
inline void compose_with_op(const LinearOp& op, std::vector<SparseVec>& rows_on_output,
                            std::vector<SparseVec>& out) {
  for (SparseVec& r : rows_on_output) out.push_back(op.compose_row(r));
}

}  // namespace rows

// ---------------------------------------------------------------------------
// FESpace
// ---------------------------------------------------------------------------

/// A finite element space realized as an exact basis over the broken space.
/// Basis columns are canonical: column j carries a single 1 among the
/// indicator coordinates, so coordinates of members can be read off.
struct FESpace {
  SpaceLabel label;
  int degree = 0;
  Shape shape = Shape::Scalar;
  const AlfeldSplit* split = nullptr;
  std::vector<SparseVec> basis;       // columns over broken coefficients
  std::vector<int32_t> indicators;    // one coordinate per column
  std::string provenance;             // how the constraints were assembled

  std::size_t dim() const { return basis.size(); }
  std::size_t ambient_dim() const { return broken_dim(degree, shape); }

  /// Coordinates of v in this basis, or nullopt if v is not a member.
  std::optional<std::vector<Rational>> coords_of(const std::vector<Rational>& v) const {
    std::vector<Rational> c(basis.size());
    for (std::size_t j = 0; j < basis.size(); ++j) c[j] = v[indicators[j]];
    std::vector<Rational> rec(v.size(), Rational(0));
    for (std::size_t j = 0; j < basis.size(); ++j)
      for (const auto& [i, bv] : basis[j].terms) rec[i] += c[j] * bv;
    if (rec != v) return std::nullopt;
    return c;
  }

  BrokenField field_from_coords(const std::vector<Rational>& c) const {
    BrokenField f(split, degree, shape);
    for (std::size_t j = 0; j < basis.size(); ++j) {
      if (is_zero(c[j])) continue;
      for (const auto& [i, bv] : basis[j].terms) f.coeffs()[i] += c[j] * bv;
    }
    return f;
  }

  BrokenField basis_field(std::size_t j) const {
    BrokenField f(split, degree, shape);
    for (const auto& [i, bv] : basis[j].terms) f.coeffs()[i] = bv;
    return f;
  }

  bool contains(const std::vector<Rational>& v) const { return coords_of(v).has_value(); }
};

/// Kernel-of-constraints construction (canonical RREF nullspace).
inline FESpace space_from_constraints(const SpaceLabel& label, int degree, Shape shape,
                                      const AlfeldSplit& split, std::vector<SparseVec> rows,
                                      std::string provenance) {
  RowReducer red(static_cast<int32_t>(broken_dim(degree, shape)));
  for (SparseVec& r : rows) red.add_row(std::move(r));
  FESpace sp;
  sp.label = label;
  sp.degree = degree;
  sp.shape = shape;
  sp.split = &split;
  sp.basis = red.nullspace();
  sp.indicators = red.free_cols();
  sp.provenance = std::move(provenance);
  return sp;
}

/// Span-of-vectors construction (canonical RREF row space); used for image
/// spaces such as U1 = sym(Z1 x V).
inline FESpace space_from_span(const SpaceLabel& label, int degree, Shape shape,
                               const AlfeldSplit& split, const std::vector<SparseVec>& vectors,
                               std::string provenance) {
  RowReducer red(static_cast<int32_t>(broken_dim(degree, shape)));
  for (const SparseVec& v : vectors) red.add_row(v);
  FESpace sp;
  sp.label = label;
  sp.degree = degree;
  sp.shape = shape;
  sp.split = &split;
  sp.basis = red.rref_rows();
  sp.indicators = red.pivot_cols();
  sp.provenance = std::move(provenance);
  return sp;
}

// ---------------------------------------------------------------------------
// per-label constraint sets
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<CompCombo> raw_combos(Shape s) {
  std::vector<CompCombo> out;
  for (int c = 0; c < ncomp(s); ++c) out.push_back({{c, Rational(1)}});
  return out;
}

/// Tangential combos on each interior facet: two in-plane directions.
inline std::vector<std::vector<CompCombo>> facet_tangential_combos(const AlfeldSplit& sp) {
  std::vector<std::vector<CompCombo>> per_facet(6);
  for (int g = 0; g < 6; ++g) {
    const InteriorFacet& f = sp.interior_facets()[g];
    Vec3 d1 = sp.parent().v[f.xs[0]] - sp.z();
    Vec3 d2 = sp.parent().v[f.xs[1]] - sp.z();
    for (const Vec3& d : {d1, d2}) {
      CompCombo combo;
      for (int c = 0; c < 3; ++c)
        if (!is_zero(d[c])) combo.emplace_back(c, d[c]);
      per_facet[g].push_back(combo);
    }
  }
  return per_facet;
}

inline void interior_continuity_per_facet(const AlfeldSplit& sp, int r, Shape shape,
                                          const std::vector<std::vector<CompCombo>>& per_facet,
                                          std::vector<SparseVec>& out) {
  const MonoTable& t3 = mono_table(3, r);
  for (int g = 0; g < 6; ++g) {
    auto m0 = rows::facet_trace_map(sp, r, g, 0);
    auto m1 = rows::facet_trace_map(sp, r, g, 1);
    int k0 = sp.interior_facets()[g].adjacent[0];
    int k1 = sp.interior_facets()[g].adjacent[1];
    for (const CompCombo& combo : per_facet[g])
      for (std::size_t m = 0; m < t3.size(); ++m) {
        SparseVec row;
        for (const auto& [c, w] : combo) {
          row.add_term(coeff_index(r, shape, k0, c, m0[m]), w);
          row.add_term(coeff_index(r, shape, k1, c, m1[m]), -w);
        }
        row.compress();
        out.push_back(std::move(row));
      }
  }
}

/// Normal-component combos per interior facet (vector fields).
inline std::vector<std::vector<CompCombo>> facet_normal_combos(const AlfeldSplit& sp) {
  std::vector<std::vector<CompCombo>> per_facet(6);
  for (int g = 0; g < 6; ++g) {
    const Vec3& n = sp.interior_facets()[g].normal_dir;
    CompCombo combo;
    for (int c = 0; c < 3; ++c)
      if (!is_zero(n[c])) combo.emplace_back(c, n[c]);
    per_facet[g].push_back(combo);
  }
  return per_facet;
}

inline std::vector<std::vector<CompCombo>> boundary_normal_combos(const AlfeldSplit& sp) {
  std::vector<std::vector<CompCombo>> per_face(4);
  for (int f = 0; f < 4; ++f) {
    const Vec3& n = sp.faces()[f].normal_dir;
    CompCombo combo;
    for (int c = 0; c < 3; ++c)
      if (!is_zero(n[c])) combo.emplace_back(c, n[c]);
    per_face[f].push_back(combo);
  }
  return per_face;
}

inline std::vector<std::vector<CompCombo>> boundary_tangential_combos(const AlfeldSplit& sp) {
  std::vector<std::vector<CompCombo>> per_face(4);
  for (int f = 0; f < 4; ++f) {
    const ParentFace& pf = sp.faces()[f];
    Vec3 d1 = sp.parent().v[pf.verts[1]] - sp.parent().v[pf.verts[0]];
    Vec3 d2 = sp.parent().v[pf.verts[2]] - sp.parent().v[pf.verts[0]];
    for (const Vec3& d : {d1, d2}) {
      CompCombo combo;
      for (int c = 0; c < 3; ++c)
        if (!is_zero(d[c])) combo.emplace_back(c, d[c]);
      per_face[f].push_back(combo);
    }
  }
  return per_face;
}

inline std::vector<std::vector<CompCombo>> all_faces(const std::vector<CompCombo>& combos) {
  return {combos, combos, combos, combos};
}

/// Row-wise normal combos for Sym3 fields across interior facets:
/// (sigma n)_i continuity.
inline std::vector<std::vector<CompCombo>> facet_sym_normal_combos(const AlfeldSplit& sp) {
  std::vector<std::vector<CompCombo>> per_facet(6);
  for (int g = 0; g < 6; ++g) {
    const Vec3& n = sp.interior_facets()[g].normal_dir;
    for (int i = 0; i < 3; ++i) {
      CompCombo combo;
      for (int j = 0; j < 3; ++j)
        if (!is_zero(n[j])) combo.emplace_back(sym_comp(i, j), n[j]);
      per_facet[g].push_back(combo);
    }
  }
  return per_facet;
}

inline std::vector<std::vector<CompCombo>> boundary_sym_normal_combos(const AlfeldSplit& sp) {
  std::vector<std::vector<CompCombo>> per_face(4);
  for (int f = 0; f < 4; ++f) {
    const Vec3& n = sp.faces()[f].normal_dir;
    for (int i = 0; i < 3; ++i) {
      CompCombo combo;
      for (int j = 0; j < 3; ++j)
        if (!is_zero(n[j])) combo.emplace_back(sym_comp(i, j), n[j]);
      per_face[f].push_back(combo);
    }
  }
  return per_face;
}

inline std::vector<int> all_comps(Shape s) {
  std::vector<int> v(ncomp(s));
  for (int i = 0; i < ncomp(s); ++i) v[i] = i;
  return v;
}

}  // namespace detail

/// Assembles the defining constraint rows of a catalog space.
inline std::vector<SparseVec> space_constraints(const SpaceLabel& l, int r,
                                                const AlfeldSplit& sp) {
  using namespace detail;
  std::vector<SparseVec> rws;
  Shape shape = label_shape(l);
  auto c0_interior = [&](Shape s) { rows::interior_continuity(sp, r, s, raw_combos(s), rws); };
  auto zero_boundary_all = [&](Shape s) {
    rows::boundary_zero(sp, r, s, all_faces(raw_combos(s)), rws);
  };

  const Family fam = l.family;
  const int k = l.k;

  // scalar-valued labels
  if (shape == Shape::Scalar) {
    bool is_W0_like = (fam == Family::W && k == 0) || (fam == Family::L && (k == 0 || k == 3)) ||
                      (fam == Family::S && k == 3);
    if (is_W0_like) {
      c0_interior(Shape::Scalar);
      if (l.ring) {
        if (fam == Family::L && k == 3)
          rws.push_back(rows::mean_row(sp, r));  // continuous, mean-zero
        else if (fam == Family::S && k == 3)
          rws.push_back(rows::mean_row(sp, r));
        else
          zero_boundary_all(Shape::Scalar);
      }
      return rws;
    }
    if ((fam == Family::W || fam == Family::V) && k == 3) {
      if (l.ring) rws.push_back(rows::mean_row(sp, r));
      return rws;
    }
    if ((fam == Family::S || fam == Family::V || fam == Family::Z) && k == 0) {
      // S0: continuous with continuous gradient
      c0_interior(Shape::Scalar);
      LinearOp g = op_grad(sp, r, Shape::Scalar);
      std::vector<SparseVec> grad_rows;
      rows::interior_continuity(sp, g.degree_out, Shape::Vector3, raw_combos(Shape::Vector3),
                                grad_rows);
      if (l.ring) {
        zero_boundary_all(Shape::Scalar);
        rows::boundary_zero(sp, g.degree_out, Shape::Vector3, all_faces(raw_combos(Shape::Vector3)),
                            grad_rows);
      }
      rows::compose_with_op(g, grad_rows, rws);
      return rws;
    }
    if (fam == Family::Z && k == 3) {
      if (l.ring) {
        rws.push_back(rows::mean_row(sp, r));
        rows::vertex_zero(sp, r, Shape::Scalar, 0, {0}, rws);
      } else {
        rows::vertex_jump(sp, r, Shape::Scalar, 0, {0}, rws);
      }
      return rws;
    }
    if (fam == Family::Zhat) {
      rows::vertex_zero(sp, r, Shape::Scalar, 0, {0}, rws);
      return rws;
    }
    if (fam == Family::Ztilde) {
      rows::vertex_jump(sp, r, Shape::Scalar, 0, {0}, rws);
      rws.push_back(rows::mean_row(sp, r));
      return rws;
    }
  }

  // vector-valued labels
  if (shape == Shape::Vector3) {
    if (fam == Family::W && k == 1) {
      interior_continuity_per_facet(sp, r, shape, facet_tangential_combos(sp), rws);
      if (l.ring) rows::boundary_zero(sp, r, shape, boundary_tangential_combos(sp), rws);
      return rws;
    }
    if (fam == Family::W && k == 2) {
      interior_continuity_per_facet(sp, r, shape, facet_normal_combos(sp), rws);
      if (l.ring) rows::boundary_zero(sp, r, shape, boundary_normal_combos(sp), rws);
      return rws;
    }
    if (fam == Family::L && (k == 1 || k == 2)) {
      c0_interior(shape);
      if (l.ring) zero_boundary_all(shape);
      return rws;
    }
    if (fam == Family::S && k == 1) {
      c0_interior(shape);
      LinearOp curl = op_curl(sp, r, Shape::Vector3);
      std::vector<SparseVec> crows;
      rows::interior_continuity(sp, curl.degree_out, Shape::Vector3, raw_combos(Shape::Vector3),
                                crows);
      if (l.ring) {
        zero_boundary_all(shape);
        rows::boundary_zero(sp, curl.degree_out, Shape::Vector3,
                            all_faces(raw_combos(Shape::Vector3)), crows);
      }
      rows::compose_with_op(curl, crows, rws);
      return rws;
    }
    if (fam == Family::S && k == 2) {
      c0_interior(shape);
      LinearOp dv = op_div(sp, r, Shape::Vector3);
      std::vector<SparseVec> drows;
      rows::interior_continuity(sp, dv.degree_out, Shape::Scalar, raw_combos(Shape::Scalar), drows);
      if (l.ring) {
        zero_boundary_all(shape);
        // div of a zero-trace field is automatically mean-free; the membership
        // of div in the ringed L3 space adds no further trace condition.
      }
      rows::compose_with_op(dv, drows, rws);
      return rws;
    }
    if ((fam == Family::V && k == 1) || (fam == Family::Z && k == 2)) {
      c0_interior(shape);
      if (l.ring) {
        zero_boundary_all(shape);
        rows::vertex_zero(sp, r, shape, 1, all_comps(shape), rws);
      } else {
        rows::vertex_jump(sp, r, shape, 1, all_comps(shape), rws);
      }
      return rws;
    }
    if (fam == Family::V && k == 2) {
      interior_continuity_per_facet(sp, r, shape, facet_normal_combos(sp), rws);
      if (l.ring) {
        rows::boundary_zero(sp, r, shape, boundary_normal_combos(sp), rws);
        rows::vertex_zero(sp, r, shape, 0, all_comps(shape), rws);
      } else {
        rows::vertex_jump(sp, r, shape, 0, all_comps(shape), rws);
      }
      return rws;
    }
    if (fam == Family::Z && k == 1) {
      c0_interior(shape);
      LinearOp curl = op_curl(sp, r, Shape::Vector3);
      std::vector<SparseVec> crows;
      rows::interior_continuity(sp, curl.degree_out, Shape::Vector3, raw_combos(Shape::Vector3),
                                crows);
      if (l.ring) {
        zero_boundary_all(shape);
        rows::boundary_zero(sp, curl.degree_out, Shape::Vector3,
                            all_faces(raw_combos(Shape::Vector3)), crows);
        rows::vertex_zero(sp, curl.degree_out, Shape::Vector3, 1, all_comps(Shape::Vector3), crows);
      } else {
        rows::vertex_jump(sp, curl.degree_out, Shape::Vector3, 1, all_comps(Shape::Vector3), crows);
      }
      rows::compose_with_op(curl, crows, rws);
      return rws;
    }
    if (fam == Family::U && k == 0) {
      // three copies of Z0 = S0: continuous with continuous Jacobian
      c0_interior(shape);
      LinearOp g = op_grad(sp, r, Shape::Vector3);
      std::vector<SparseVec> grows;
      rows::interior_continuity(sp, g.degree_out, Shape::Matrix3, raw_combos(Shape::Matrix3),
                                grows);
      if (l.ring) {
        zero_boundary_all(shape);
        rows::boundary_zero(sp, g.degree_out, Shape::Matrix3, all_faces(raw_combos(Shape::Matrix3)),
                            grows);
      }
      rows::compose_with_op(g, grows, rws);
      return rws;
    }
    if (fam == Family::U && k == 3) {
      if (l.ring) {
        // orthogonality to rigid motions under the exact L2 pairing
        auto lamx = Poly::variable(3, 0);
        auto lamy = Poly::variable(3, 1);
        auto lamz = Poly::variable(3, 2);
        Poly zero = Poly(3);
        std::vector<std::vector<Poly>> rigid = {
            {Poly::constant(3, rat(1)), zero, zero},
            {zero, Poly::constant(3, rat(1)), zero},
            {zero, zero, Poly::constant(3, rat(1))},
            {zero, lamz * Rational(-1), lamy},   // e1 x x
            {lamz, zero, lamx * Rational(-1)},   // e2 x x
            {lamy * Rational(-1), lamx, zero}};  // e3 x x
        for (auto& comps : rigid) {
          BrokenField m = embed_global(sp, comps, std::max(r, 1), Shape::Vector3);
          rws.push_back(rows::pairing_row(m, r));
        }
      }
      return rws;
    }
  }

  // symmetric-matrix labels
  if (shape == Shape::Sym3 && fam == Family::U && k == 2) {
    interior_continuity_per_facet(sp, r, shape, facet_sym_normal_combos(sp), rws);
    if (l.ring) {
      rows::boundary_zero(sp, r, shape, boundary_sym_normal_combos(sp), rws);
      rows::vertex_zero(sp, r, shape, 0, detail::all_comps(shape), rws);
    } else {
      rows::vertex_jump(sp, r, shape, 0, detail::all_comps(shape), rws);
    }
    return rws;
  }

  throw std::invalid_argument("space_constraints: label " + label_name(l) +
                              " is not constraint-defined");
}

/// The alternative characterization of oV2: w in oW2 with vanishing normal
/// components at each vertex on the three interior facets meeting it.
inline std::vector<SparseVec> vo2_alternative_constraints(const AlfeldSplit& sp, int r) {
  auto rws = space_constraints(SpaceLabel{Family::W, 2, true}, r, sp);
  for (int i = 0; i < 4; ++i)
    for (int f : sp.interior_facets_at(i)) {
      const InteriorFacet& g = sp.interior_facets()[f];
      // w . n at x_i; the facet-normal trace of an oW2 member is single-valued,
      // so either adjacent subtet gives the same constraint modulo the
      // continuity rows already present.
      int k = g.adjacent[0];
      SparseVec row;
      for (int c = 0; c < 3; ++c) {
        if (is_zero(g.normal_dir[c])) continue;
        SparseVec part = rows::vertex_deriv_row(sp, r, Shape::Vector3, k, c, i, {0, 0, 0});
        row.axpy(g.normal_dir[c], part);
      }
      rws.push_back(std::move(row));
    }
  return rws;
}

// ---------------------------------------------------------------------------
// build_space (with cache)
// ---------------------------------------------------------------------------

class SpaceCache;

/// Builds the Z1 (or ringed) space, tensors with V row-wise, applies sym,
/// and returns the canonical span: U1 = sym(Z1 x V).
FESpace build_U1(const SpaceLabel& l, int r, const AlfeldSplit& split, SpaceCache& cache);

/// Thread-compatible per-split memoization of built spaces.
class SpaceCache {
 public:
  explicit SpaceCache(const AlfeldSplit& split) : split_(&split) {}

  const AlfeldSplit& split() const { return *split_; }

  const FESpace& get(const SpaceLabel& l, int r) {
    std::unique_lock<std::mutex> lock(mtx_);
    auto key = std::make_pair(l, r);
    auto it = cache_.find(key);
    if (it != cache_.end()) return *it->second;
    lock.unlock();
    std::unique_ptr<FESpace> built;
    if (l.family == Family::U && l.k == 1) {
      built = std::make_unique<FESpace>(build_U1(l, r, *split_, *this));
    } else {
      built = std::make_unique<FESpace>(space_from_constraints(
          l, r, label_shape(l), *split_, space_constraints(l, r, *split_),
          "nullspace of defining constraints"));
    }
    lock.lock();
    auto [pos, fresh] = cache_.emplace(key, std::move(built));
    return *pos->second;
  }

  const FESpace& get(const std::string& name, int r) { return get(parse_label(name), r); }

 private:
  const AlfeldSplit* split_;
  std::map<std::pair<SpaceLabel, int>, std::unique_ptr<FESpace>> cache_;
  std::mutex mtx_;
};

inline FESpace build_U1(const SpaceLabel& l, int r, const AlfeldSplit& split, SpaceCache& cache) {
  SpaceLabel z1{Family::Z, 1, l.ring};
  const FESpace& z = cache.get(z1, r);
  LinearOp sym = op_algebraic(AlgebraicMap::FullToSym, r);
  std::vector<SparseVec> images;
  for (std::size_t j = 0; j < z.dim(); ++j) {
    // e_i tensor w: matrix field with row i = w, then symmetrized
    for (int i = 0; i < 3; ++i) {
      SparseVec matvec;
      for (const auto& [idx, v] : z.basis[j].terms) {
        // idx encodes (subtet, comp c, mono) in the Vector3 layout
        std::size_t block = broken_block(r);
        int sub = static_cast<int>(idx / (3 * block));
        int comp = static_cast<int>((idx / block) % 3);
        int32_t mono = static_cast<int32_t>(idx % block);
        matvec.add_term(coeff_index(r, Shape::Matrix3, sub, mat_comp(i, comp), mono), v);
      }
      matvec.compress();
      images.push_back(sym.apply_sparse(matvec));
    }
  }
  return space_from_span(l, r, Shape::Sym3, split, images,
                         "span of sym(e_i tensor Z1 basis)");
}

/// One-off build without a cache (U1 labels need the cache-backed variant).
inline FESpace build_space(const SpaceLabel& l, int r, const AlfeldSplit& split) {
  if (l.family == Family::U && l.k == 1) {
    SpaceCache cache(split);
    return cache.get(l, r);
  }
  return space_from_constraints(l, r, label_shape(l), split, space_constraints(l, r, split),
                                "nullspace of defining constraints");
}

// ---------------------------------------------------------------------------
// image spaces and global polynomial subspaces
// ---------------------------------------------------------------------------

/// Canonical basis of op(space): the multiplier spaces curl(Z1o), div(Z2o),
/// inc(U1o), grad(V0o) and friends.
inline FESpace image_space(const LinearOp& op, const FESpace& domain, const std::string& tag) {
  std::vector<SparseVec> images;
  for (const SparseVec& b : domain.basis) images.push_back(op.apply_sparse(b));
  SpaceLabel lbl = domain.label;  // label retained for reporting only
  return space_from_span(lbl, op.degree_out, op.shape_out, *domain.split, images, tag);
}

/// X tensor V: scalar spaces become vector fields with components in X,
/// vector spaces become matrix fields with rows in X.
inline FESpace tensor_with_V(const FESpace& x) {
  Shape out_shape;
  if (x.shape == Shape::Scalar)
    out_shape = Shape::Vector3;
  else if (x.shape == Shape::Vector3)
    out_shape = Shape::Matrix3;
  else
    throw std::invalid_argument("tensor_with_V: shape");
  std::size_t block = broken_block(x.degree);
  int nin = ncomp(x.shape);
  std::vector<SparseVec> vectors;
  for (const SparseVec& b : x.basis)
    for (int i = 0; i < 3; ++i) {
      SparseVec v;
      for (const auto& [idx, val] : b.terms) {
        int sub = static_cast<int>(idx / (nin * block));
        int comp = static_cast<int>((idx / block) % nin);
        int32_t mono = static_cast<int32_t>(idx % block);
        int out_comp = (x.shape == Shape::Scalar) ? i : mat_comp(i, comp);
        v.add_term(coeff_index(x.degree, out_shape, sub, out_comp, mono), val);
      }
      v.compress();
      vectors.push_back(std::move(v));
    }
  FESpace out = space_from_span(x.label, x.degree, out_shape, *x.split, vectors,
                                label_name(x.label) + " tensor V");
  return out;
}

/// The global polynomial space [P_r(T)]^(ncomp) embedded as broken fields.
inline std::vector<SparseVec> global_poly_span(const AlfeldSplit& split, int r, Shape shape) {
  std::vector<SparseVec> out;
  for (int c = 0; c < ncomp(shape); ++c)
    for (const Exps& e : monomials_upto(3, r)) {
      std::vector<Poly> comps(ncomp(shape), Poly(3));
      Poly mono(3);
      mono.terms[e] = Rational(1);
      comps[c] = mono;
      BrokenField f = embed_global(split, comps, r, shape);
      out.push_back(SparseVec::from_dense(f.coeffs()));
    }
  return out;
}

/// Rigid motions a + b x x as global polynomial component lists.
inline std::vector<std::vector<Poly>> rigid_motion_polys() {
  Poly x = Poly::variable(3, 0), y = Poly::variable(3, 1), z = Poly::variable(3, 2);
  Poly zero(3);
  Poly one = Poly::constant(3, rat(1));
  return {{one, zero, zero}, {zero, one, zero}, {zero, zero, one},
          {zero, z * Rational(-1), y}, {z, zero, x * Rational(-1)},
          {y * Rational(-1), x, zero}};
}

}  // namespace alfeld

#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <vector>

#include "alfeld/rational.hpp"

namespace alfeld {

using Vec3 = std::array<Rational, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(const Rational& c, const Vec3& a) { return {c * a[0], c * a[1], c * a[2]}; }
inline Rational dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline Rational norm2(const Vec3& a) { return dot(a, a); }
inline bool vec_is_zero(const Vec3& a) { return is_zero(a[0]) && is_zero(a[1]) && is_zero(a[2]); }

/// Exact square root when the rational is a perfect square.
inline std::optional<Rational> rational_sqrt(const Rational& q) {
  if (sgn(q) < 0) return std::nullopt;
  const BigInt& num = q.get_num();
  const BigInt& den = q.get_den();
  if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t()))
    return std::nullopt;
  BigInt sn, sd;
  mpz_sqrt(sn.get_mpz_t(), num.get_mpz_t());
  mpz_sqrt(sd.get_mpz_t(), den.get_mpz_t());
  Rational r(sn, sd);
  r.canonicalize();
  return r;
}

struct Tetrahedron {
  std::array<Vec3, 4> v;

  Rational signed_volume() const {
    return dot(v[1] - v[0], cross(v[2] - v[0], v[3] - v[0])) / 6;
  }
  Rational volume() const {
    Rational s = signed_volume();
    return sgn(s) < 0 ? Rational(-s) : s;
  }
};

/// The frame-exact tetrahedron: every face has a rational unit normal (the
/// oblique face via the Pythagorean quadruple 6^2+3^2+2^2=7^2).
inline Tetrahedron canonical_tet() {
  return Tetrahedron{{Vec3{rat(0), rat(0), rat(0)}, Vec3{rat(1), rat(0), rat(0)},
                      Vec3{rat(0), rat(2), rat(0)}, Vec3{rat(0), rat(0), rat(3)}}};
}

inline Tetrahedron reference_tet() {
  return Tetrahedron{{Vec3{rat(0), rat(0), rat(0)}, Vec3{rat(1), rat(0), rat(0)},
                      Vec3{rat(0), rat(1), rat(0)}, Vec3{rat(0), rat(0), rat(1)}}};
}

struct InvalidSplitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FrameUnavailableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One of the four subtetrahedra T_i = [z, x_j : j != i]. Local vertex 0 is
/// always z, so the local barycentric coordinate 0 equals the bubble mu.
struct SubTet {
  int omitted;                   // parent vertex x_i not in this subtet
  std::array<int, 4> verts;      // global ids: 4 = z, 0..3 = parent vertices
  std::array<Vec3, 4> coords;
  Rational abs_volume;
  std::array<Vec3, 4> grad_lambda;   // gradients of the barycentric coords
  std::array<Rational, 4> lambda_at_origin;  // lambda_m(0), so lambda(x) = c + g.x

  std::array<Rational, 4> barycentric(const Vec3& p) const {
    std::array<Rational, 4> l;
    for (int m = 0; m < 4; ++m) l[m] = lambda_at_origin[m] + dot(grad_lambda[m], p);
    return l;
  }
};

struct ParentFace {
  int opposite;                // face opposite parent vertex x_i
  std::array<int, 3> verts;    // sorted parent vertex ids
  std::array<int, 3> ccw;      // same ids ordered ccw w.r.t. the outward normal
  Vec3 normal_dir;             // outward, not normalized, rational
  Rational area;               // true area when rational, else 0 marker
  bool area_rational;
};

struct ParentEdge {
  std::array<int, 2> verts;    // sorted parent vertex ids, tangent a->b
};

struct InteriorFacet {
  std::array<int, 2> xs;       // facet [z, x_i, x_j], i<j
  std::array<int, 2> adjacent; // the two subtets containing it
  Vec3 normal_dir;             // fixed orientation: from adjacent[0] outward
};

class AlfeldSplit {
 public:
  explicit AlfeldSplit(const Tetrahedron& tet, std::optional<Vec3> z_opt = std::nullopt)
      : parent_(tet) {
    if (is_zero(tet.signed_volume())) throw InvalidSplitError("degenerate tetrahedron");
    z_ = z_opt.value_or(Rational(1, 4) * (tet.v[0] + tet.v[1] + tet.v[2] + tet.v[3]));
    auto lz = barycentric_in_parent(z_);
    for (int m = 0; m < 4; ++m)
      if (sgn(lz[m]) <= 0) throw InvalidSplitError("split point not strictly interior");
    build_subtets();
    build_tables();
  }

  const Tetrahedron& parent() const { return parent_; }
  const Vec3& z() const { return z_; }
  const Vec3& vertex(int i) const { return i == 4 ? z_ : parent_.v[i]; }
  const std::array<SubTet, 4>& subtets() const { return subs_; }
  const SubTet& subtet(int k) const { return subs_[k]; }
  const std::vector<ParentEdge>& edges() const { return edges_; }
  const std::array<ParentFace, 4>& faces() const { return faces_; }
  const std::array<InteriorFacet, 6>& interior_facets() const { return inner_; }

  /// The three interior facets having x_i as a vertex (F^z_i).
  std::vector<int> interior_facets_at(int i) const {
    std::vector<int> out;
    for (int f = 0; f < 6; ++f)
      if (inner_[f].xs[0] == i || inner_[f].xs[1] == i) out.push_back(f);
    return out;
  }

  /// Subtets containing parent vertex x_i (all but T_i).
  std::array<int, 3> subtets_at_vertex(int i) const {
    std::array<int, 3> out{};
    int n = 0;
    for (int k = 0; k < 4; ++k)
      if (k != i) out[n++] = k;
    return out;
  }

  /// Subtets containing parent edge [a,b]: the two subtets T_k, k not in {a,b}.
  std::array<int, 2> subtets_at_edge(int a, int b) const {
    std::array<int, 2> out{};
    int n = 0;
    for (int k = 0; k < 4; ++k)
      if (k != a && k != b) out[n++] = k;
    return out;
  }

  std::array<Rational, 4> barycentric_in_parent(const Vec3& p) const {
    Tetrahedron t = parent_;
    Rational v = t.signed_volume();
    std::array<Rational, 4> l;
    for (int m = 0; m < 4; ++m) {
      Tetrahedron s = t;
      s.v[m] = p;
      l[m] = s.signed_volume() / v;
    }
    return l;
  }

  int edge_index(int a, int b) const {
    if (a > b) std::swap(a, b);
    for (std::size_t e = 0; e < edges_.size(); ++e)
      if (edges_[e].verts[0] == a && edges_[e].verts[1] == b) return static_cast<int>(e);
    throw std::invalid_argument("edge_index: not a parent edge");
  }

  /// Local index of global vertex id g within subtet k.
  int local_index(int k, int g) const {
    for (int m = 0; m < 4; ++m)
      if (subs_[k].verts[m] == g) return m;
    return -1;
  }

 private:
  void build_subtets() {
    for (int i = 0; i < 4; ++i) {
      SubTet& s = subs_[i];
      s.omitted = i;
      s.verts[0] = 4;
      s.coords[0] = z_;
      int n = 1;
      for (int j = 0; j < 4; ++j) {
        if (j == i) continue;
        s.verts[n] = j;
        s.coords[n] = parent_.v[j];
        ++n;
      }
      Tetrahedron t{{s.coords[0], s.coords[1], s.coords[2], s.coords[3]}};
      s.abs_volume = t.volume();
      // grad(lambda_m): rows of the inverse of the edge matrix.
      Vec3 e1 = s.coords[1] - s.coords[0];
      Vec3 e2 = s.coords[2] - s.coords[0];
      Vec3 e3 = s.coords[3] - s.coords[0];
      Rational det = dot(e1, cross(e2, e3));
      Vec3 g1 = (1 / det) * cross(e2, e3);
      Vec3 g2 = (1 / det) * cross(e3, e1);
      Vec3 g3 = (1 / det) * cross(e1, e2);
      s.grad_lambda[1] = g1;
      s.grad_lambda[2] = g2;
      s.grad_lambda[3] = g3;
      s.grad_lambda[0] = Vec3{-g1[0] - g2[0] - g3[0], -g1[1] - g2[1] - g3[1], -g1[2] - g2[2] - g3[2]};
      for (int m = 0; m < 4; ++m)
        s.lambda_at_origin[m] = (m == 0 ? Rational(1) : Rational(0)) - dot(s.grad_lambda[m], s.coords[0]);
    }
  }

  void build_tables() {
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b) edges_.push_back(ParentEdge{{a, b}});

    for (int i = 0; i < 4; ++i) {
      ParentFace& f = faces_[i];
      f.opposite = i;
      int n = 0;
      for (int j = 0; j < 4; ++j)
        if (j != i) f.verts[n++] = j;
      Vec3 a = parent_.v[f.verts[0]], b = parent_.v[f.verts[1]], c = parent_.v[f.verts[2]];
      Vec3 nd = cross(b - a, c - a);
      // orient outward: away from the opposite vertex
      if (sgn(dot(nd, parent_.v[i] - a)) > 0) nd = Rational(-1) * nd;
      f.normal_dir = nd;
      auto len = rational_sqrt(norm2(nd));
      f.area_rational = len.has_value();
      f.area = len ? *len / 2 : Rational(0);
      f.ccw = f.verts;
      Vec3 t1 = parent_.v[f.ccw[1]] - parent_.v[f.ccw[0]];
      Vec3 t2 = parent_.v[f.ccw[2]] - parent_.v[f.ccw[0]];
      if (sgn(dot(cross(t1, t2), nd)) < 0) std::swap(f.ccw[1], f.ccw[2]);
    }

    int n = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) {
        InteriorFacet& g = inner_[n++];
        g.xs = {i, j};
        int m = 0;
        for (int k = 0; k < 4; ++k)
          if (k != i && k != j) g.adjacent[m++] = k;
        Vec3 a = z_, b = parent_.v[i], c = parent_.v[j];
        Vec3 nd = cross(b - a, c - a);
        // fixed orientation: out of adjacent[0], i.e. away from the vertex
        // x_{adjacent[1]} which lies inside T_{adjacent[0]}.
        if (sgn(dot(nd, parent_.v[g.adjacent[1]] - a)) > 0) nd = Rational(-1) * nd;
        g.normal_dir = nd;
      }
  }

  Tetrahedron parent_;
  Vec3 z_;
  std::array<SubTet, 4> subs_;
  std::vector<ParentEdge> edges_;
  std::array<ParentFace, 4> faces_;
  std::array<InteriorFacet, 6> inner_;
};

/// Searches small integer vectors t with t . dir = 0 and |t| a perfect
/// square; used to complete rational orthonormal frames.
inline std::optional<Vec3> rational_unit_orthogonal(const Vec3& dir, int search_limit = 48) {
  for (int L = 1; L <= search_limit; ++L) {
    for (int x = -L; x <= L; ++x)
      for (int y = -L; y <= L; ++y)
        for (int z = -L; z <= L; ++z) {
          if (std::max({x < 0 ? -x : x, y < 0 ? -y : y, z < 0 ? -z : z}) != L) continue;
          if (x < 0 || (x == 0 && y < 0) || (x == 0 && y == 0 && z <= 0)) continue;
          Vec3 t{rat(x), rat(y), rat(z)};
          if (!is_zero(dot(t, dir))) continue;
          auto len = rational_sqrt(norm2(t));
          if (!len) continue;
          return (1 / *len) * t;
        }
  }
  return std::nullopt;
}

struct FaceFrame {
  int face;          // index into split.faces()
  Vec3 n, t1, t2;    // unit + orthonormal on the frame-exact path
  bool unit;         // true: (t1,t2,n) orthonormal right-handed
  Vec3 origin;       // first ccw vertex; in-plane coordinates are relative to it
  std::array<std::array<Rational, 3>, 3> P, Q;  // nn'/|n|^2 and I - P, exact
};

struct EdgeFrame {
  int edge;
  Vec3 t, np, nm;    // tangent and the two cross-plane directions
  bool unit;
};

inline FaceFrame face_frame(const AlfeldSplit& split, int face, bool require_unit) {
  const ParentFace& f = split.faces()[face];
  FaceFrame fr;
  fr.face = face;
  fr.origin = split.parent().v[f.ccw[0]];
  Vec3 nd = f.normal_dir;
  auto len = rational_sqrt(norm2(nd));
  if (require_unit) {
    if (!len) throw FrameUnavailableError("face has no rational unit normal");
    fr.n = (1 / *len) * nd;
    auto t1 = rational_unit_orthogonal(nd);
    if (!t1) throw FrameUnavailableError("no rational unit tangent found for face");
    fr.t1 = *t1;
    fr.t2 = cross(fr.n, fr.t1);  // (t1, t2, n) is then right-handed
    fr.unit = true;
  } else {
    fr.n = nd;
    fr.t1 = split.parent().v[f.ccw[1]] - fr.origin;
    // orthogonalize t2 against t1 to keep the pair orthogonal (still rational)
    Vec3 raw = split.parent().v[f.ccw[2]] - fr.origin;
    fr.t2 = raw - (dot(raw, fr.t1) / norm2(fr.t1)) * fr.t1;
    fr.unit = false;
  }
  Rational nn = norm2(fr.n);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      fr.P[i][j] = fr.n[i] * fr.n[j] / nn;
      fr.Q[i][j] = (i == j ? Rational(1) : Rational(0)) - fr.P[i][j];
    }
  return fr;
}

inline EdgeFrame edge_frame(const AlfeldSplit& split, int edge, bool require_unit) {
  const ParentEdge& e = split.edges()[edge];
  Vec3 d = split.parent().v[e.verts[1]] - split.parent().v[e.verts[0]];
  EdgeFrame fr;
  fr.edge = edge;
  if (require_unit) {
    auto len = rational_sqrt(norm2(d));
    if (!len) throw FrameUnavailableError("edge has no rational unit tangent");
    fr.t = (1 / *len) * d;
    auto np = rational_unit_orthogonal(d);
    if (!np) throw FrameUnavailableError("no rational unit edge normal found");
    fr.np = *np;
    fr.nm = cross(fr.t, fr.np);
    fr.unit = true;
  } else {
    fr.t = d;
    // any rational orthogonal pair spanning the cross-plane
    Vec3 cand{rat(1), rat(0), rat(0)};
    if (vec_is_zero(cross(d, cand))) cand = Vec3{rat(0), rat(1), rat(0)};
    fr.np = cand - (dot(cand, d) / norm2(d)) * d;
    fr.nm = cross(d, fr.np);
    fr.unit = false;
  }
  return fr;
}

}  // namespace alfeld

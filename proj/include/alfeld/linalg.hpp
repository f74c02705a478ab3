#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "alfeld/matrix.hpp"
#include "alfeld/modular.hpp"
#include "alfeld/rational.hpp"
#include "alfeld/sparse.hpp"

namespace alfeld {

struct SingularMatrixError : std::runtime_error {
  SingularMatrixError() : std::runtime_error("exactly singular matrix") {}
};

/// Exact rank over Q by fraction-free (Bareiss) elimination on the
/// denominator-cleared integer matrix. Pivoting is deterministic: columns
/// left to right, first row with a nonzero entry.
inline std::size_t rank(const ExactMatrix& m) {
  const std::size_t nr = m.rows(), nc = m.cols();
  if (nr == 0 || nc == 0) return 0;
  std::vector<std::vector<BigInt>> a(nr, std::vector<BigInt>(nc));
  for (std::size_t i = 0; i < nr; ++i) {
    BigInt lcm = 1;
    for (std::size_t j = 0; j < nc; ++j) {
      const BigInt& d = m(i, j).get_den();
      lcm = lcm / gcd(lcm, d) * d;
    }
    for (std::size_t j = 0; j < nc; ++j)
      a[i][j] = m(i, j).get_num() * (lcm / m(i, j).get_den());
  }
  BigInt prev = 1;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < nc && rank < nr; ++col) {
    std::size_t piv = rank;
    while (piv < nr && a[piv][col] == 0) ++piv;
    if (piv == nr) continue;
    if (piv != rank) std::swap(a[piv], a[rank]);
    const BigInt pivot = a[rank][col];
    for (std::size_t i = rank + 1; i < nr; ++i) {
      for (std::size_t j = col + 1; j < nc; ++j)
        a[i][j] = (a[i][j] * pivot - a[i][col] * a[rank][j]) / prev;
      a[i][col] = 0;
    }
    prev = pivot;
    ++rank;
  }
  return rank;
}

/// Exact kernel basis; columns of the result satisfy M*N = 0 and there are
/// cols(M) - rank(M) of them, in the canonical RREF-induced form.
inline ExactMatrix nullspace_basis(const ExactMatrix& m) {
  RowReducer red(static_cast<int32_t>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    SparseVec r;
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (!is_zero(m(i, j))) r.add_term(static_cast<int32_t>(j), m(i, j));
    red.add_row(std::move(r));
  }
  auto kernel = red.nullspace();
  ExactMatrix out(m.cols(), kernel.size());
  for (std::size_t k = 0; k < kernel.size(); ++k)
    for (const auto& t : kernel[k].terms) out(static_cast<std::size_t>(t.first), k) = t.second;
  return out;
}

/// LU-style factorization of a square nonsingular rational matrix with
/// deterministic pivoting, reusable across right-hand sides.
class ExactLU {
 public:
  explicit ExactLU(const ExactMatrix& m) : n_(m.rows()) {
    if (m.rows() != m.cols()) throw std::invalid_argument("ExactLU: matrix not square");
    a_ = m;
    perm_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) perm_[i] = i;
    for (std::size_t col = 0; col < n_; ++col) {
      std::size_t piv = col;
      while (piv < n_ && is_zero(a_(piv, col))) ++piv;
      if (piv == n_) throw SingularMatrixError();
      if (piv != col) {
        a_.swap_rows(piv, col);
        std::swap(perm_[piv], perm_[col]);
      }
      Rational inv = 1 / a_(col, col);
      for (std::size_t i = col + 1; i < n_; ++i) {
        if (is_zero(a_(i, col))) continue;
        Rational f = a_(i, col) * inv;
        a_(i, col) = f;
        for (std::size_t j = col + 1; j < n_; ++j)
          if (!is_zero(a_(col, j))) a_(i, j) -= f * a_(col, j);
      }
    }
  }

  std::vector<Rational> solve(const std::vector<Rational>& b) const {
    if (b.size() != n_) throw std::invalid_argument("ExactLU: rhs size mismatch");
    std::vector<Rational> y(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      Rational acc = b[perm_[i]];
      for (std::size_t j = 0; j < i; ++j)
        if (!is_zero(a_(i, j))) acc -= a_(i, j) * y[j];
      y[i] = std::move(acc);
    }
    std::vector<Rational> x(n_);
    for (std::size_t ii = n_; ii-- > 0;) {
      Rational acc = y[ii];
      for (std::size_t j = ii + 1; j < n_; ++j)
        if (!is_zero(a_(ii, j))) acc -= a_(ii, j) * x[j];
      x[ii] = acc / a_(ii, ii);
    }
    return x;
  }

 private:
  std::size_t n_;
  ExactMatrix a_;
  std::vector<std::size_t> perm_;
};

/// Unique exact solution of M x = b for square nonsingular M; throws
/// SingularMatrixError otherwise (a failed unisolvency hypothesis upstream).
inline std::vector<Rational> solve_exact(const ExactMatrix& m, const std::vector<Rational>& b) {
  return ExactLU(m).solve(b);
}

/// Rank of M reduced mod `prime`. Always <= the exact rank; equality fails
/// only when the prime divides a leading minor. Entries whose denominator
/// vanishes mod prime raise BadPrimeError (retry with a fresh prime).
inline std::size_t modular_rank(const ExactMatrix& m, uint64_t prime) {
  if (prime <= (1ull << 60))
    throw std::invalid_argument("modular_rank: prime must exceed 2^60");
  ModMatrix mm = ModMatrix::from_exact(m, prime);
  return mm.rank_destructive();
}

/// Nonsingularity certificate: det != 0 mod p implies det != 0 over Q.
inline bool certify_nonsingular(const ExactMatrix& m, uint64_t seed = 12345, int max_tries = 3) {
  if (m.rows() != m.cols()) return false;
  auto primes = seeded_primes(seed, max_tries);
  for (uint64_t p : primes) {
    try {
      ModMatrix mm = ModMatrix::from_exact(m, p);
      if (mm.nonsingular_destructive()) return true;
      // Singular mod p: fall through to the exact check.
      return rank(m) == m.rows();
    } catch (const BadPrimeError&) {
      continue;
    }
  }
  return rank(m) == m.rows();
}

}  // namespace alfeld

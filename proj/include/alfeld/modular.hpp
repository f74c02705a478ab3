#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "alfeld/matrix.hpp"
#include "alfeld/rational.hpp"

namespace alfeld {

/// Raised when a matrix entry has a denominator divisible by the working
/// prime; callers retry with the next seeded prime.
struct BadPrimeError : std::runtime_error {
  explicit BadPrimeError(uint64_t p)
      : std::runtime_error("denominator divisible by prime " + std::to_string(p)), prime(p) {}
  uint64_t prime;
};

inline uint64_t mulmod(uint64_t a, uint64_t b, uint64_t p) {
  return static_cast<uint64_t>((static_cast<__uint128_t>(a) * b) % p);
}

inline uint64_t powmod(uint64_t a, uint64_t e, uint64_t p) {
  uint64_t r = 1;
  a %= p;
  while (e) {
    if (e & 1u) r = mulmod(r, a, p);
    a = mulmod(a, a, p);
    e >>= 1u;
  }
  return r;
}

inline uint64_t invmod(uint64_t a, uint64_t p) { return powmod(a % p, p - 2, p); }

/// Deterministic Miller-Rabin, valid for all 64-bit inputs.
inline bool is_prime_u64(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % q == 0) return n == q;
  }
  uint64_t d = n - 1;
  int s = 0;
  while ((d & 1u) == 0) {
    d >>= 1u;
    ++s;
  }
  for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Deterministic primes above 2^60 derived from a seed; the k-th call with
/// the same seed always yields the same prime.
inline std::vector<uint64_t> seeded_primes(uint64_t seed, int count) {
  std::vector<uint64_t> primes;
  uint64_t state = seed ^ 0xa5a5a5a5deadbeefull;
  while (static_cast<int>(primes.size()) < count) {
    uint64_t c = (splitmix64(state) >> 3) | (1ull << 61) | 1ull;
    while (!is_prime_u64(c)) c += 2;
    bool dup = false;
    for (uint64_t q : primes) dup |= (q == c);
    if (!dup) primes.push_back(c);
  }
  return primes;
}

inline uint64_t mod_of_bigint(const BigInt& z, uint64_t p) {
  // unsigned long is 64-bit on this platform, so fdiv_ui takes p directly.
  static_assert(sizeof(unsigned long) == 8);
  unsigned long m = mpz_fdiv_ui(z.get_mpz_t(), static_cast<unsigned long>(p));
  return static_cast<uint64_t>(m);
}

/// Image of a rational in Z/p. Throws BadPrimeError if the denominator
/// vanishes mod p.
inline uint64_t mod_of_rational(const Rational& q, uint64_t p) {
  uint64_t num = mod_of_bigint(q.get_num(), p);
  uint64_t den = mod_of_bigint(q.get_den(), p);
  if (den == 0) throw BadPrimeError(p);
  return mulmod(num, invmod(den, p), p);
}

/// Dense matrix over Z/p, row-major.
class ModMatrix {
 public:
  ModMatrix(std::size_t rows, std::size_t cols, uint64_t p)
      : rows_(rows), cols_(cols), p_(p), a_(rows * cols, 0) {}

  static ModMatrix from_exact(const ExactMatrix& m, uint64_t p) {
    ModMatrix out(m.rows(), m.cols(), p);
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = mod_of_rational(m(i, j), p);
    return out;
  }

  uint64_t& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  uint64_t operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  uint64_t prime() const { return p_; }

  /// Gaussian elimination rank; destroys the matrix.
  std::size_t rank_destructive() {
    std::size_t rank = 0;
    for (std::size_t col = 0; col < cols_ && rank < rows_; ++col) {
      std::size_t piv = rank;
      while (piv < rows_ && (*this)(piv, col) == 0) ++piv;
      if (piv == rows_) continue;
      if (piv != rank)
        for (std::size_t j = col; j < cols_; ++j) std::swap((*this)(piv, j), (*this)(rank, j));
      uint64_t inv = invmod((*this)(rank, col), p_);
      for (std::size_t j = col; j < cols_; ++j) (*this)(rank, j) = mulmod((*this)(rank, j), inv, p_);
      for (std::size_t i = 0; i < rows_; ++i) {
        if (i == rank) continue;
        uint64_t f = (*this)(i, col);
        if (f == 0) continue;
        for (std::size_t j = col; j < cols_; ++j) {
          uint64_t sub = mulmod(f, (*this)(rank, j), p_);
          uint64_t& t = (*this)(i, j);
          t = (t >= sub) ? t - sub : t + p_ - sub;
        }
      }
      ++rank;
    }
    return rank;
  }

  /// Determinant nonzero test (square matrices); destroys the matrix.
  bool nonsingular_destructive() {
    if (rows_ != cols_) throw std::invalid_argument("nonsingular: matrix not square");
    return rank_destructive() == rows_;
  }

 private:
  std::size_t rows_, cols_;
  uint64_t p_;
  std::vector<uint64_t> a_;
};

}  // namespace alfeld

#pragma once

#include <cstdint>
#include <random>

#include "alfeld/poly.hpp"
#include "alfeld/rational.hpp"

namespace alfeld {

/// Deterministic small-rational polynomial generator used by the seeded
/// identity and commuting checks.
class FieldRng {
 public:
  explicit FieldRng(uint64_t seed) : rng_(seed) {}

  Rational small_rational() {
    long num = static_cast<long>(rng_() % 19) - 9;
    long den = 1 + static_cast<long>(rng_() % 3);
    return rat(num, den);
  }

  Poly poly(int nvars, int degree) {
    Poly p(nvars);
    for (const Exps& e : monomials_upto(nvars, degree)) p.add_term(e, small_rational());
    return p;
  }

  std::vector<Poly> poly_vec(int nvars, int degree, int count) {
    std::vector<Poly> out;
    for (int i = 0; i < count; ++i) out.push_back(poly(nvars, degree));
    return out;
  }

  uint64_t raw() { return rng_(); }

 private:
  std::mt19937_64 rng_;
};

}  // namespace alfeld

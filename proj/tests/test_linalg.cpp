#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "alfeld/linalg.hpp"

using namespace alfeld;

namespace {

ExactMatrix from_ints(std::initializer_list<std::initializer_list<long>> rows) {
  std::size_t nr = rows.size(), nc = rows.begin()->size();
  ExactMatrix m(nr, nc);
  std::size_t i = 0;
  for (const auto& r : rows) {
    std::size_t j = 0;
    for (long v : r) m(i, j++) = rat(v);
    ++i;
  }
  return m;
}

ExactMatrix random_matrix(std::mt19937_64& rng, std::size_t nr, std::size_t nc) {
  std::uniform_int_distribution<long> num(-9, 9);
  std::uniform_int_distribution<long> den(1, 3);
  ExactMatrix m(nr, nc);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) m(i, j) = rat(num(rng), den(rng));
  return m;
}

}  // namespace

TEST_CASE("exact rank on stated examples") {
  CHECK(rank(ExactMatrix::identity(3)) == 3);
  CHECK(rank(from_ints({{1, 2}, {2, 4}})) == 1);
  CHECK(rank(ExactMatrix(4, 7)) == 0);
}

TEST_CASE("nullspace basis on stated examples") {
  ExactMatrix z(2, 3);
  ExactMatrix n = nullspace_basis(z);
  CHECK(n.cols() == 3);
  CHECK(n == ExactMatrix::identity(3));

  ExactMatrix row = from_ints({{1, 1}});
  ExactMatrix k = nullspace_basis(row);
  REQUIRE(k.cols() == 1);
  CHECK(k(0, 0) == -k(1, 0));
  CHECK(!is_zero(k(0, 0)));
}

TEST_CASE("solve_exact on stated examples") {
  ExactMatrix eye = ExactMatrix::identity(3);
  std::vector<Rational> b{rat(1), rat(2), rat(3)};
  CHECK(solve_exact(eye, b) == b);

  ExactMatrix d = from_ints({{2, 0}, {0, 4}});
  auto x = solve_exact(d, {rat(1), rat(1)});
  CHECK(x[0] == rat(1, 2));
  CHECK(x[1] == rat(1, 4));

  ExactMatrix sing = from_ints({{1, 2}, {2, 4}});
  CHECK_THROWS_AS(solve_exact(sing, {rat(1), rat(1)}), SingularMatrixError);
}

TEST_CASE("modular rank on stated examples") {
  auto primes = seeded_primes(7, 3);
  for (uint64_t p : primes) {
    CHECK(p > (1ull << 60));
    CHECK(is_prime_u64(p));
    CHECK(modular_rank(ExactMatrix::identity(5), p) == 5);
    CHECK(modular_rank(from_ints({{1, 2}, {2, 4}}), p) == 1);
  }
  CHECK_THROWS_AS(modular_rank(ExactMatrix::identity(2), 97), std::invalid_argument);
}

TEST_CASE("modular rank signals denominators divisible by the prime") {
  auto primes = seeded_primes(3, 1);
  ExactMatrix m(1, 1);
  m(0, 0) = Rational(1) / Rational(BigInt(primes[0]));
  CHECK_THROWS_AS(modular_rank(m, primes[0]), BadPrimeError);
}

TEST_CASE("rank-nullity and exact kernel invariants on random matrices") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t nr = 1 + rng() % 8, nc = 1 + rng() % 8;
    ExactMatrix m = random_matrix(rng, nr, nc);
    std::size_t rk = rank(m);
    ExactMatrix n = nullspace_basis(m);
    CHECK(rk + n.cols() == nc);
    CHECK((m * n).is_zero_matrix());

    // modular rank never exceeds the exact rank; large seeded primes agree
    int agree = 0;
    for (uint64_t p : seeded_primes(99, 3)) {
      std::size_t mr = modular_rank(m, p);
      CHECK(mr <= rk);
      agree += (mr == rk);
    }
    CHECK(agree >= 2);
  }
}

TEST_CASE("solve then multiply reproduces the right-hand side") {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 10; ++trial) {
    std::size_t n = 2 + rng() % 6;
    ExactMatrix m = random_matrix(rng, n, n);
    if (rank(m) < n) continue;
    std::vector<Rational> b(n);
    for (auto& v : b) v = rat(static_cast<long>(rng() % 19) - 9, 1 + rng() % 4);
    auto x = solve_exact(m, b);
    CHECK(m.apply(x) == b);
  }
}

TEST_CASE("sparse reducer produces the canonical RREF nullspace") {
  // identical matrices fed in different row orders give identical kernels
  std::mt19937_64 rng(7);
  ExactMatrix m = random_matrix(rng, 5, 9);
  auto kernel_of = [&](const std::vector<int>& order) {
    RowReducer red(9);
    for (int i : order) {
      SparseVec r;
      for (std::size_t j = 0; j < 9; ++j)
        if (!is_zero(m(i, j))) r.add_term(static_cast<int32_t>(j), m(i, j));
      red.add_row(std::move(r));
    }
    return red.nullspace();
  };
  auto a = kernel_of({0, 1, 2, 3, 4});
  auto b = kernel_of({4, 2, 0, 3, 1});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].terms == b[i].terms);
}

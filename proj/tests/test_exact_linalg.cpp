#include "doctest.h"

#include "maninforge/lattice.hpp"
#include "maninforge/linalg.hpp"
#include "oracles.hpp"

#include <random>
#include <sstream>

using namespace maninforge;
using namespace oracle;

namespace {

IntMatrix mat(std::size_t r, std::size_t c, std::vector<long> v) {
  IntMatrix m(r, c);
  for (std::size_t k = 0; k < v.size(); ++k) m.data()[k] = v[k];
  return m;
}

IntMatrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, long lo, long hi) {
  std::uniform_int_distribution<long> d(lo, hi);
  IntMatrix m(r, c);
  for (auto& x : m.data()) x = d(rng);
  return m;
}

std::vector<std::vector<long long>> to_ll(const IntMatrix& m) {
  std::vector<std::vector<long long>> a(m.rows(), std::vector<long long>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) a[i][j] = m(i, j).get_si();
  return a;
}

bool is_row_hnf(const IntMatrix& h) {
  std::size_t last = 0;
  bool seen_zero = false, first = true;
  for (std::size_t i = 0; i < h.rows(); ++i) {
    std::size_t pc = 0;
    while (pc < h.cols() && h(i, pc) == 0) ++pc;
    if (pc == h.cols()) {
      seen_zero = true;
      continue;
    }
    if (seen_zero) return false;
    if (!first && pc <= last) return false;
    if (h(i, pc) <= 0) return false;
    for (std::size_t k = 0; k < i; ++k)
      if (h(k, pc) < 0 || h(k, pc) >= h(i, pc)) return false;
    last = pc;
    first = false;
  }
  return true;
}

}  // namespace

TEST_CASE("hnf examples") {
  auto id = IntMatrix::identity(2);
  auto r = hnf_with_transform(id);
  CHECK(r.hnf == id);
  CHECK(r.transform == id);

  auto r2 = hnf_with_transform(mat(2, 2, {2, 4, 1, 1}));
  CHECK(r2.hnf == mat(2, 2, {1, 1, 0, 2}));
  CHECK(r2.transform * mat(2, 2, {2, 4, 1, 1}) == r2.hnf);

  IntMatrix z(2, 3);
  auto r3 = hnf_with_transform(z);
  CHECK(r3.hnf == z);
  CHECK(r3.transform == IntMatrix::identity(2));
  CHECK(r3.rank == 0);
}

TEST_CASE("hnf is idempotent and agrees with the brute-force oracle") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t r = 1 + rng() % 5, c = 1 + rng() % 5;
    IntMatrix m = random_matrix(rng, r, c, -9, 9);
    auto res = hnf_with_transform(m);
    CHECK(is_row_hnf(res.hnf));
    CHECK(res.transform * m == res.hnf);
    CHECK(abs(det(res.transform)) == 1);
    CHECK(to_ll(res.hnf) == hnf_oracle(to_ll(m)));
    auto again = hnf_with_transform(res.hnf);
    CHECK(again.hnf == res.hnf);
    CHECK(again.transform == IntMatrix::identity(r));
  }
}

TEST_CASE("snf examples") {
  CHECK(snf(mat(2, 2, {2, 0, 0, 3})) == std::vector<Integer>{1, 6});
  CHECK(snf(IntMatrix::identity(3)) == std::vector<Integer>{1, 1, 1});
  CHECK(snf(mat(2, 2, {2, 0, 0, 2})) == std::vector<Integer>{2, 2});
  CHECK(snf(IntMatrix(3, 3)).empty());
}

TEST_CASE("snf agrees with determinantal divisors on random small matrices") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t r = 1 + rng() % 5, c = 1 + rng() % 5;
    IntMatrix m = random_matrix(rng, r, c, -12, 12);
    auto got = snf(m);
    auto want = snf_by_minors(to_ll(m));
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == Integer(static_cast<long>(want[i])));
    for (std::size_t i = 1; i < got.size(); ++i) CHECK(mpz_divisible_p(got[i].get_mpz_t(), got[i - 1].get_mpz_t()));
  }
}

TEST_CASE("snf product equals |det| on random 5x5") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    IntMatrix m = random_matrix(rng, 5, 5, -20, 20);
    Integer d = det(m);
    CHECK(d == Integer(static_cast<long>(cofactor_det(to_ll(m)))));
    if (d == 0) continue;
    Integer prod = 1;
    for (auto& x : snf(m)) prod *= x;
    CHECK(prod == abs(d));
  }
}

TEST_CASE("multimodular hnf agrees with naive elimination") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 3; ++trial) {
    // rank-deficient 70 x 80: 60 random rows plus 10 dependent ones
    IntMatrix base = random_matrix(rng, 60, 80, -5, 5);
    IntMatrix mix = random_matrix(rng, 10, 60, -2, 2);
    IntMatrix dep = mix * base;
    IntMatrix m(70, 80);
    for (std::size_t i = 0; i < 60; ++i)
      for (std::size_t j = 0; j < 80; ++j) m(i, j) = base(i, j);
    for (std::size_t i = 0; i < 10; ++i)
      for (std::size_t j = 0; j < 80; ++j) m(60 + i, j) = dep(i, j);
    IntMatrix fast = hnf_basis(m);
    auto slow = hnf_with_transform(m);
    CHECK(fast.rows() == 60);
    CHECK(fast == slow.hnf.block(0, 0, slow.rank, 80));
  }
}

TEST_CASE("kernel_saturated examples") {
  CHECK(kernel_saturated(IntMatrix::identity(3)).rank() == 0);
  CHECK(kernel_saturated(IntMatrix(1, 2)) == IntLattice::full(2));
  IntLattice k = kernel_saturated(mat(1, 2, {2, 4}));
  CHECK(k.rank() == 1);
  CHECK(k.contains(std::vector<Integer>{2, -1}));
  CHECK(k == IntLattice::span(mat(1, 2, {2, -1})));
}

TEST_CASE("kernel is saturated for non-primitive relations") {
  // 6x + 10y + 15z = 0: kernel lattice has index 1 in its saturation
  IntLattice k = kernel_saturated(mat(1, 3, {6, 10, 15}));
  CHECK(k.rank() == 2);
  CHECK(saturate(k.basis()) == k.basis());
  // 2x - 2y = 0, 4y - 4z = 0 -> (1,1,1)
  IntLattice k2 = kernel_saturated(mat(2, 3, {2, -2, 0, 0, 4, -4}));
  CHECK(k2 == IntLattice::span(mat(1, 3, {1, 1, 1})));
}

TEST_CASE("lattice sum and intersection") {
  IntLattice a = IntLattice::span(mat(2, 2, {2, 0, 0, 2}));
  IntLattice b = IntLattice::span(mat(1, 2, {1, 1}));
  IntLattice s = lattice_sum(a, b);
  CHECK(s.rank() == 2);
  CHECK(sublattice_index(s, IntLattice::full(2)) == 2);
  CHECK(s.contains(std::vector<Integer>{1, 1}));
  CHECK(lattice_sum(a, IntLattice::zero(2)) == a);
  CHECK(lattice_sum(a, a) == a);

  IntLattice x = IntLattice::span(mat(1, 2, {1, 0}));
  IntLattice y = IntLattice::span(mat(1, 2, {0, 1}));
  CHECK(lattice_intersect(x, y).rank() == 0);
  CHECK(lattice_intersect(a, a) == a);
  IntLattice xeven = IntLattice::span(mat(2, 2, {2, 0, 0, 1}));
  IntLattice yeven = IntLattice::span(mat(2, 2, {1, 0, 0, 2}));
  CHECK(lattice_intersect(xeven, yeven) == a);
  CHECK_THROWS_AS(lattice_sum(a, IntLattice::zero(3)), LatticeError);
}

TEST_CASE("sublattice index and quotient invariants") {
  IntLattice z2 = IntLattice::full(2);
  IntLattice two = IntLattice::span(mat(2, 2, {2, 0, 0, 2}));
  CHECK(sublattice_index(two, z2) == 4);
  CHECK(sublattice_index(z2, z2) == 1);
  IntLattice s = IntLattice::span(mat(2, 2, {1, 2, 3, 4}));
  CHECK(sublattice_index(s, z2) == 2);
  CHECK(quotient_invariants(z2, two).torsion == std::vector<Integer>{2, 2});
  CHECK(quotient_invariants(z2, z2).torsion.empty());
  CHECK(quotient_invariants(z2, s).torsion == std::vector<Integer>{2});
  CHECK_THROWS_AS(sublattice_index(z2, two), LatticeError);
  CHECK_THROWS_AS(sublattice_index(IntLattice::span(mat(1, 2, {1, 0})), z2), LatticeError);
}

TEST_CASE("index equals product of quotient invariants on random lattices") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    IntMatrix m = random_matrix(rng, 4, 4, -6, 6);
    if (det(m) == 0) continue;
    IntLattice l = IntLattice::span(m);
    auto q = quotient_invariants(IntLattice::full(4), l);
    CHECK(q.torsion_order() == sublattice_index(l, IntLattice::full(4)));
  }
}

TEST_CASE("idempotent kernel sublattice") {
  IntLattice z2 = IntLattice::full(2);
  CHECK(idempotent_kernel_sublattice(z2, RatMatrix(2, 2)) == z2);
  CHECK(idempotent_kernel_sublattice(z2, RatMatrix::identity(2)).rank() == 0);
  RatMatrix e(2, 2);
  e(0, 0) = 1;
  CHECK(idempotent_kernel_sublattice(z2, e) == IntLattice::span(mat(1, 2, {0, 1})));
  RatMatrix bad(2, 2);
  bad(0, 0) = 2;
  CHECK_THROWS_AS(idempotent_kernel_sublattice(z2, bad), LatticeError);
}

TEST_CASE("complementary idempotents split a lattice up to finite index") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    // e = P diag(1,1,0) P^{-1} for a random nonsingular P
    IntMatrix p = random_matrix(rng, 3, 3, -4, 4);
    if (det(p) == 0) continue;
    RatMatrix pr = to_rational(p);
    // inverse by adjugate
    Integer d = det(p);
    RatMatrix pinv(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        IntMatrix minor(2, 2);
        std::size_t a = 0;
        for (std::size_t r = 0; r < 3; ++r) {
          if (r == j) continue;
          std::size_t b = 0;
          for (std::size_t c = 0; c < 3; ++c) {
            if (c == i) continue;
            minor(a, b++) = p(r, c);
          }
          ++a;
        }
        Integer cof = det(minor);
        if ((i + j) % 2) cof = -cof;
        pinv(i, j) = Rational(cof, d);
        pinv(i, j).canonicalize();
      }
    RatMatrix diag(3, 3);
    diag(0, 0) = 1;
    diag(1, 1) = 1;
    RatMatrix e = pinv * diag * pr;
    RatMatrix f = RatMatrix::identity(3) - e;
    IntLattice l = IntLattice::full(3);
    IntLattice a = idempotent_kernel_sublattice(l, e);
    IntLattice b = idempotent_kernel_sublattice(l, f);
    CHECK(a.rank() + b.rank() == 3);
    CHECK(lattice_intersect(a, b).rank() == 0);
    CHECK(sublattice_index(lattice_sum(a, b), l) >= 1);
  }
}

TEST_CASE("text serialization round trip") {
  IntMatrix m = mat(2, 3, {1, -2, 3, 0, 5, -6});
  m(0, 0) = Integer("-123456789012345678901234567890");
  CHECK(from_text(to_text(m)) == m);
  CHECK(to_text(mat(1, 2, {-1, 2})) == "1 2\n-1 2\n");
  CHECK_THROWS(from_text("2 2\n1 2 3"));
}

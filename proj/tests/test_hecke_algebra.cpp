#include "doctest.h"

#include "maninforge/hecke.hpp"

#include <numeric>

using namespace maninforge;

namespace {

bool prime(long n) {
  if (n < 2) return false;
  for (long q = 2; q * q <= n; ++q)
    if (n % q == 0) return false;
  return true;
}

bool squarefree(long n) {
  for (long q = 2; q * q <= n; ++q)
    if (n % (q * q) == 0) return false;
  return true;
}

// eta-product q-expansion coefficients a_1..a_len
std::vector<long> eta_product(const std::vector<std::pair<long, int>>& factors, std::size_t len) {
  std::vector<long> f(len + 1, 0);
  f[0] = 1;
  for (const auto& [m, e] : factors)
    for (int rep = 0; rep < e; ++rep)
      for (std::size_t k = 1; static_cast<std::size_t>(m) * k <= len; ++k) {
        const std::size_t s = static_cast<std::size_t>(m) * k;
        for (std::size_t i = len; i >= s; --i) f[i] -= f[i - s];
      }
  std::vector<long> a(len + 1, 0);
  for (std::size_t i = 1; i <= len; ++i) a[i] = f[i - 1];
  return a;
}

IntPoly P(std::vector<long> c) {
  std::vector<Integer> v;
  for (long x : c) v.emplace_back(x);
  return IntPoly(std::move(v));
}

FiniteAlgebra integers() {
  FiniteAlgebra z;
  z.mult = {IntMatrix::identity(1)};
  z.one = {1};
  return z;
}

// Z[x]/(x^2), basis 1, x
FiniteAlgebra dual_numbers() {
  FiniteAlgebra a;
  a.mult = {IntMatrix::identity(2), IntMatrix::from_rows({{0, 1}, {0, 0}})};
  a.one = {1, 0};
  return a;
}

struct Level {
  ModSymSpace space;
  HeckeAlgebra algebra;
  explicit Level(long n) : space(ModSymSpace::build(n)), algebra(build_hecke_algebra(space)) {}
};

}  // namespace

TEST_CASE("sturm bound examples") {
  CHECK(sturm_bound(11) == 2);
  CHECK(sturm_bound(431) == 72);
  CHECK(sturm_bound(1) == 1);
  CHECK(sturm_bound(2089) == 349);
}

TEST_CASE("level 11: T is Z") {
  Level l(11);
  CHECK(l.algebra.rank() == 1);
  CHECK(l.algebra.contains(IntMatrix::identity(2)));
  auto classes = decompose_new(l.space, l.algebra);
  REQUIRE(classes.size() == 1);
  CHECK(classes[0].dimension == 1);
  CHECK(classes[0].label() == "11.1");
  CHECK(classes[0].idempotent == to_rational(IntMatrix::identity(2)));
  auto a = eta_product({{1, 2}, {11, 2}}, 8);
  CHECK(classes[0].eigenvalues.at(2) == RatVector{Rational(a[2])});
  CHECK(a[2] == -2);
  OrderOf o = order_of(l.algebra, classes[0]);
  CHECK(o.rank() == 1);
  CHECK(o.discriminant() == 1);
  CHECK(u_p_unit_check(l.space, classes[0], 11) == 1);
  CHECK_THROWS_AS(u_p_unit_check(l.space, classes[0], 5), std::invalid_argument);
  CHECK(saturation_index(l.algebra) == 1);
  auto ms = maximal_ideals(l.algebra.order.structure(), 5);
  REQUIRE(ms.size() == 1);
  auto gv = is_gorenstein(l.algebra, ms[0]);
  CHECK(gv.verdict == Verdict::yes);
  CHECK(gv.fiber_dim == 2);
}

TEST_CASE("level 23: quadratic class") {
  Level l(23);
  CHECK(l.algebra.rank() == 2);
  auto classes = decompose_new(l.space, l.algebra);
  REQUIRE(classes.size() == 1);
  CHECK(classes[0].dimension == 2);
  // oracle: T_2 satisfies x^2 + x - 1 on the newform
  CHECK(classes[0].hecke_polys.at(2) == pow(P({-1, 1, 1}), 2));
  OrderOf o = order_of(l.algebra, classes[0]);
  CHECK(o.rank() == 2);
  CHECK(o.discriminant() == 5);
  auto ms = maximal_ideals(o.structure(), 2);
  REQUIRE(ms.size() == 1);
  CHECK(ms[0].residue_degree == 2);
  CHECK(is_dvr(o.structure(), ms[0]));
  auto m5 = maximal_ideals(o.structure(), 5);
  REQUIRE(m5.size() == 1);
  CHECK(m5[0].residue_degree == 1);
  CHECK(is_dvr(o.structure(), m5[0]));  // Z[(1+sqrt 5)/2] is maximal
}

TEST_CASE("level 14: U_2 sign") {
  Level l(14);
  auto classes = decompose_new(l.space, l.algebra);
  REQUIRE(classes.size() == 1);
  auto a = eta_product({{1, 1}, {2, 1}, {7, 1}, {14, 1}}, 8);
  CHECK(u_p_unit_check(l.space, classes[0], 2) == a[2]);
  CHECK(a[2] == -1);
  CHECK(u_p_unit_check(l.space, classes[0], 7) == a[7]);
}

TEST_CASE("small rings") {
  auto z = integers();
  for (long p : {2, 3, 7}) {
    auto ms = maximal_ideals(z, p);
    REQUIRE(ms.size() == 1);
    CHECK(ms[0].residue_degree == 1);
    CHECK(socle_dim(z, ms[0]) == 1);
    CHECK(is_dvr(z, ms[0]));
  }
  auto d = dual_numbers();
  for (long p : {2, 5}) {
    auto ms = maximal_ideals(d, p);
    REQUIRE(ms.size() == 1);
    CHECK(ms[0].local_dim == 2);
    CHECK(socle_dim(d, ms[0]) == 1);
    CHECK(cotangent_dim(d, ms[0]) == 2);
    CHECK_FALSE(is_dvr(d, ms[0]));
  }
  // Z x Z splits at every prime
  FiniteAlgebra zz;
  zz.mult = {IntMatrix::from_rows({{1, 0}, {0, 0}}), IntMatrix::from_rows({{0, 0}, {0, 1}})};
  zz.one = {1, 1};
  auto ms = maximal_ideals(zz, 3);
  CHECK(ms.size() == 2);
}

TEST_CASE("lifted idempotents") {
  // Z[x]/(x^2 - 5x) = Z x Z over Z[1/5]: x/5 is idempotent away from 5
  FiniteAlgebra a;
  a.mult = {IntMatrix::identity(2), IntMatrix::from_rows({{0, 1}, {0, 5}})};
  a.one = {1, 0};
  auto ms = maximal_ideals(a, 2);
  REQUIRE(ms.size() == 2);
  Integer mod = 1024;
  for (const auto& m : ms) {
    IntVector e0(m.idempotent.begin(), m.idempotent.end());
    IntVector e = lift_idempotent(a, e0, mod);
    IntVector e2 = a.multiply(e, e);
    for (std::size_t i = 0; i < 2; ++i) CHECK((e2[i] - e[i]) % mod == 0);
  }
}

TEST_CASE("maximal ideals of T: orthogonal, complete, weighted degrees") {
  for (long n : {37, 67, 389}) {
    Level l(n);
    const auto& t = l.algebra.order.structure();
    for (long p : {2, 3, 5}) {
      auto ms = maximal_ideals(t, p);
      std::vector<modp::u64> sum(t.rank(), 0);
      std::size_t dims = 0;
      for (std::size_t a = 0; a < ms.size(); ++a) {
        dims += ms[a].local_dim;
        CHECK(ms[a].local_dim % ms[a].residue_degree == 0);
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = (sum[i] + ms[a].idempotent[i]) % p;
        for (std::size_t b = a + 1; b < ms.size(); ++b) {
          IntVector x(ms[a].idempotent.begin(), ms[a].idempotent.end());
          IntVector y(ms[b].idempotent.begin(), ms[b].idempotent.end());
          for (auto& z : t.multiply(x, y)) CHECK(z % p == 0);
        }
      }
      CHECK(dims == t.rank());
      for (std::size_t i = 0; i < sum.size(); ++i) CHECK(Integer(sum[i]) == (t.one[i] % p + p) % p);
    }
  }
}

TEST_CASE("prime levels: rank g, fibers and the Gorenstein inequality") {
  for (long n = 11; n <= 100; ++n) {
    if (!prime(n)) continue;
    Level l(n);
    const std::size_t g = static_cast<std::size_t>(genus_x0(n));
    CHECK(l.algebra.rank() == g);
    if (g == 0) continue;
    const auto& t = l.algebra.order.structure();
    for (long p : {2, 3, 5, 7, 11, 13}) {
      for (const auto& m : maximal_ideals(t, p)) {
        CHECK(fiber_dim(t.mult, m) == 1);
        std::size_t soc = socle_dim(t, m);
        CHECK(soc >= 1);
        std::size_t fs = fiber_dim(l.algebra.order.basis(), m);
        CHECK_MESSAGE(fs <= soc + 1, "n=" << n << " p=" << p);
        if (n <= 50) CHECK_MESSAGE(fs == 2, "n=" << n << " p=" << p);
      }
    }
  }
}

TEST_CASE("squarefree levels: classes fill the new lattice") {
  for (long n = 11; n <= 100; ++n) {
    if (!squarefree(n)) continue;
    Level l(n);
    if (l.algebra.rank() == 0) continue;
    Decomposition dec = decompose(l.space, l.algebra);
    std::size_t total = 0;
    for (const auto& c : dec.classes) total += 2 * c.dimension;
    CHECK_MESSAGE(total == new_lattice(l.space).rank(), "n=" << n);
    // exact idempotent identities on the full matrices
    std::vector<NewformClass> all = dec.classes;
    all.insert(all.end(), dec.old_classes.begin(), dec.old_classes.end());
    for (std::size_t a = 0; a < all.size(); ++a) {
      const auto& e = all[a].idempotent;
      CHECK(e * e == e);
      CHECK((e * all[a].complement()).is_zero());
      for (std::size_t b = a + 1; b < all.size(); ++b) CHECK((e * all[b].idempotent).is_zero());
      for (const auto& g : l.algebra.generators) CHECK(e * to_rational(g.matrix) == to_rational(g.matrix) * e);
      auto ker = idempotent_kernel_sublattice(IntLattice::full(e.rows()), all[a].complement());
      CHECK(ker.rank() == 2 * all[a].dimension);
      CHECK(ker == all[a].isotypic);
    }
  }
}

TEST_CASE("saturation index is 1 for odd squarefree n <= 50") {
  for (long n = 11; n <= 50; n += 2) {
    if (!squarefree(n)) continue;
    Level l(n);
    CHECK_MESSAGE(saturation_index(l.algebra) == 1, "n=" << n);
  }
}

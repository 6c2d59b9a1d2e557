#include "doctest.h"

#include "maninforge/poly.hpp"

#include <algorithm>
#include <random>

using namespace maninforge;
using modp::u64;

namespace {

IntPoly P(std::vector<long> c) {
  std::vector<Integer> v;
  for (long x : c) v.emplace_back(x);
  return IntPoly(std::move(v));
}

// Oracle: det(x I - M) by cofactor expansion with int64 polynomial entries.
using LPoly = std::vector<long long>;

LPoly lmul(const LPoly& a, const LPoly& b) {
  LPoly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

void ladd(LPoly& a, const LPoly& b, long long sign) {
  if (a.size() < b.size()) a.resize(b.size(), 0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += sign * b[i];
}

LPoly cofactor_charpoly(const std::vector<std::vector<LPoly>>& a) {
  const std::size_t n = a.size();
  if (n == 1) return a[0][0];
  LPoly s{0};
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::vector<LPoly>> minor;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<LPoly> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != j) row.push_back(a[i][k]);
      minor.push_back(row);
    }
    ladd(s, lmul(a[0][j], cofactor_charpoly(minor)), j % 2 ? -1 : 1);
  }
  return s;
}

// Oracle: brute-force irreducibility over F_p (no monic divisor of degree <= n/2).
bool brute_irreducible(const FpPoly& f) {
  const int n = f.degree();
  if (n <= 1) return n == 1;
  for (int d = 1; 2 * d <= n; ++d) {
    std::vector<u64> c(static_cast<std::size_t>(d) + 1, 0);
    c[static_cast<std::size_t>(d)] = 1;
    while (true) {
      FpPoly g(f.p, c);
      if (divrem(f, g).second.is_zero()) return false;
      std::size_t k = 0;
      while (k < static_cast<std::size_t>(d) && ++c[k] == f.p) c[k++] = 0;
      if (k == static_cast<std::size_t>(d)) break;
    }
  }
  return true;
}

FpPoly fp_random(std::mt19937_64& rng, u64 p, int deg) {
  std::uniform_int_distribution<u64> d(0, p - 1);
  std::vector<u64> c(static_cast<std::size_t>(deg) + 1);
  for (auto& x : c) x = d(rng);
  c.back() = 1 + d(rng) % (p - 1);
  return FpPoly(p, c);
}

IntPoly int_random(std::mt19937_64& rng, int deg, long bound) {
  std::uniform_int_distribution<long> d(-bound, bound);
  std::vector<Integer> c(static_cast<std::size_t>(deg) + 1);
  for (auto& x : c) x = d(rng);
  while (c.back() == 0) c.back() = d(rng);
  return IntPoly(c);
}

// Sufficient irreducibility certificate independent of factor_q: primitive and
// irreducible mod some prime not dividing the leading coefficient.
bool certified_irreducible(const IntPoly& f) {
  if (f.content() != 1) return false;
  for (u64 p : {2, 3, 5, 7, 11, 13}) {
    if (modp::reduce(f.leading(), p) == 0) continue;
    if (brute_irreducible(FpPoly::from(f, p))) return true;
  }
  return false;
}

Integer ipow(const Integer& b, unsigned long e) {
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
  return r;
}

}  // namespace

TEST_CASE("charpoly examples") {
  IntMatrix d(2, 2);
  d(0, 0) = 1;
  d(1, 1) = 2;
  CHECK(charpoly_int(d) == P({2, -3, 1}));
  CHECK(charpoly_int(IntMatrix(2, 2)) == P({0, 0, 1}));
  CHECK(charpoly_int(IntMatrix(0, 0)) == P({1}));
  CHECK_THROWS_AS(charpoly_int(IntMatrix(2, 3)), std::invalid_argument);
}

TEST_CASE("charpoly agrees with cofactor expansion on random 4x4") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<long> d(-30, 30);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 4;
    IntMatrix m(n, n);
    std::vector<std::vector<LPoly>> xm(n, std::vector<LPoly>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        long v = d(rng);
        m(i, j) = v;
        xm[i][j] = i == j ? LPoly{-v, 1} : LPoly{-v};
      }
    LPoly expect = cofactor_charpoly(xm);
    IntPoly got = charpoly_int(m);
    REQUIRE(got.degree() == static_cast<int>(n));
    for (std::size_t k = 0; k <= n; ++k) CHECK(got.coeff(k) == Integer(static_cast<long>(expect[k])));
  }
}

TEST_CASE("charpoly with large entries") {
  IntMatrix m(3, 3);
  Integer big("123456789012345678901234567890");
  m(0, 0) = big;
  m(1, 1) = -big;
  m(2, 2) = 7;
  m(0, 1) = 1;
  IntPoly expect = IntPoly::linear(big) * IntPoly::linear(-big) * P({-7, 1});
  CHECK(charpoly_int(m) == expect);
}

TEST_CASE("factor_fp examples") {
  auto f1 = factor_fp(FpPoly(3, {2, 0, 1}));  // x^2 - 1
  REQUIRE(f1.size() == 2);
  CHECK(f1[0].factor == FpPoly(3, {1, 1}));
  CHECK(f1[1].factor == FpPoly(3, {2, 1}));
  auto f2 = factor_fp(FpPoly(2, {1, 1, 1}));
  REQUIRE(f2.size() == 1);
  CHECK(f2[0].multiplicity == 1);
  auto f3 = factor_fp(FpPoly(5, {0, 0, 1}));
  REQUIRE(f3.size() == 1);
  CHECK(f3[0].factor == FpPoly::x(5));
  CHECK(f3[0].multiplicity == 2);
  CHECK_THROWS_AS(factor_fp(FpPoly(5, {})), std::invalid_argument);
  // inseparable input: (x+1)^4 over F_2
  auto f4 = factor_fp(FpPoly(2, {1, 0, 0, 0, 1}));
  REQUIRE(f4.size() == 1);
  CHECK(f4[0].multiplicity == 4);
}

TEST_CASE("factor_fp round trip and brute-force irreducibility") {
  std::mt19937_64 rng(99);
  for (u64 p : {2, 3, 5, 7, 101}) {
    for (int trial = 0; trial < 40; ++trial) {
      // products with repeated factors exercise the squarefree split
      FpPoly a = fp_random(rng, p, 1 + trial % 4);
      FpPoly b = fp_random(rng, p, 1 + trial % 3);
      FpPoly f = a * b * b;
      if (trial % 5 == 0) f = f * FpPoly::x(p) * FpPoly::x(p);
      auto facs = factor_fp(f);
      FpPoly prod = FpPoly::constant(p, f.leading());
      for (const auto& [g, m] : facs) {
        CHECK(g == monic(g));
        if (p <= 7) CHECK(brute_irreducible(g));
        for (int i = 0; i < m; ++i) prod = prod * g;
      }
      CHECK(prod == f);
    }
  }
}

TEST_CASE("factor_fp with a word-size prime") {
  const u64 p = modp::word_prime(0);
  FpPoly f = FpPoly(p, {1, 1}) * FpPoly(p, {p - 3, 1}) * FpPoly(p, {1, 0, 1});
  auto facs = factor_fp(f);
  FpPoly prod = FpPoly::constant(p, 1);
  for (const auto& [g, m] : facs)
    for (int i = 0; i < m; ++i) prod = prod * g;
  CHECK(prod == f);
}

TEST_CASE("factor_q examples") {
  auto a = factor_q(P({-1, 0, 1}));
  REQUIRE(a.size() == 2);
  CHECK(a[0].factor == P({-1, 1}));
  CHECK(a[1].factor == P({1, 1}));
  auto b = factor_q(P({1, 0, 1}));
  REQUIRE(b.size() == 1);
  CHECK(b[0].factor == P({1, 0, 1}));
  auto c = factor_q(P({-1, 1, 1}) * P({-3, 1}));
  REQUIRE(c.size() == 2);
  CHECK(c[0].factor == P({-3, 1}));
  CHECK(c[1].factor == P({-1, 1, 1}));
  CHECK_THROWS_AS(factor_q(IntPoly()), std::invalid_argument);
  // reducible modulo every prime, irreducible over Q
  auto d = factor_q(P({1, 0, 0, 0, 1}));
  REQUIRE(d.size() == 1);
  CHECK(d[0].factor == P({1, 0, 0, 0, 1}));
  // content and multiplicity: 6 (x+2)^2 x^3
  auto e = factor_q(Integer(6) * pow(P({2, 1}), 2) * pow(IntPoly::x(), 3));
  REQUIRE(e.size() == 2);
  CHECK(e[0].factor == IntPoly::x());
  CHECK(e[0].multiplicity == 3);
  CHECK(e[1].factor == P({2, 1}));
  CHECK(e[1].multiplicity == 2);
  // non-monic factors
  auto g = factor_q(P({1, 3}) * P({-5, 0, 2}) * P({2, 1, 0, 4}));
  CHECK(g.size() == 3);
}

TEST_CASE("factor_q recovers random products of certified irreducibles") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<IntPoly> parts;
    const int k = 1 + trial % 4;
    while (static_cast<int>(parts.size()) < k) {
      IntPoly g = int_random(rng, 1 + static_cast<int>(rng() % 4), 10).primitive_part();
      if (certified_irreducible(g)) parts.push_back(g);
    }
    IntPoly f = IntPoly::constant(1);
    for (auto& g : parts) f = f * g;
    auto facs = factor_q(f);
    IntPoly prod = IntPoly::constant(1);
    std::size_t total = 0;
    for (const auto& [g, m] : facs) {
      for (int i = 0; i < m; ++i) prod = prod * g;
      total += static_cast<std::size_t>(m);
      CHECK(std::find(parts.begin(), parts.end(), g) != parts.end());
    }
    CHECK(total == parts.size());
    CHECK(prod == f.primitive_part());
  }
}

TEST_CASE("factor_q of a product of cyclotomic-like quartics needs recombination") {
  // (x^4 + 1)(x^4 - 10x^2 + 1) both split into quadratics or linears mod every prime
  IntPoly a = P({1, 0, 0, 0, 1}), b = P({1, 0, -10, 0, 1});
  auto facs = factor_q(a * b);
  REQUIRE(facs.size() == 2);
  CHECK(facs[0].factor == b);
  CHECK(facs[1].factor == a);
}

TEST_CASE("crt_split examples") {
  auto h1 = crt_split(P({-1, 1}), P({1, 1}));
  CHECK(h1.numerator == P({1, 1}));
  CHECK(h1.denominator == 2);
  auto h2 = crt_split(IntPoly::x(), P({-2, 1}));
  CHECK(h2.numerator == P({2, -1}));
  CHECK(h2.denominator == 2);
  auto h3 = crt_split(P({1, 0, 1}), IntPoly::constant(1));
  CHECK(h3.numerator == P({1}));
  CHECK(h3.denominator == 1);
  CHECK_THROWS_AS(crt_split(P({-1, 1}), P({-1, 0, 1})), std::invalid_argument);
}

TEST_CASE("crt_split is idempotent modulo g1*g2") {
  std::mt19937_64 rng(31);
  int done = 0;
  while (done < 40) {
    IntPoly g1 = int_random(rng, 1 + static_cast<int>(rng() % 3), 6);
    IntPoly g2 = int_random(rng, 1 + static_cast<int>(rng() % 3), 6);
    if (gcd(g1, g2).degree() != 0) continue;
    ++done;
    auto [num, den] = crt_split(g1, g2);
    IntPoly g = g1 * g2;
    CHECK(num.degree() < g.degree());
    // den*h - den = 0 mod g1, den*h = 0 mod g2 (over Q: test with scaled exact division)
    IntPoly m1 = num - IntPoly::constant(den);
    CHECK((m1.is_zero() || divide_exact(ipow(g1.leading(), 8) * m1, g1).has_value()));
    CHECK((num.is_zero() || divide_exact(ipow(g2.leading(), 8) * num, g2).has_value()));
    // h^2 - h = (num^2 - den*num)/den^2 vanishes mod g
    IntPoly e = num * num - den * num;
    CHECK((e.is_zero() || divide_exact(ipow(g.leading(), 16) * e, g).has_value()));
  }
}

TEST_CASE("polynomial text round trip") {
  IntPoly f = P({3, 0, -7, 1});
  CHECK(poly_from_matrix(from_text(to_text(to_matrix(f)))) == f);
  CHECK(poly_from_matrix(to_matrix(IntPoly())) == IntPoly());
  CHECK(to_string(f) == "x^3 - 7*x^2 + 3");
  CHECK(to_string(P({-1, -1})) == "-x - 1");
}

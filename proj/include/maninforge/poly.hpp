#pragma once

#include "maninforge/matrix.hpp"
#include "maninforge/modular.hpp"

#include <optional>
#include <string>
#include <vector>

namespace maninforge {

// Integer polynomial, ascending coefficients, never a trailing zero.
class IntPoly {
 public:
  IntPoly() = default;
  explicit IntPoly(std::vector<Integer> coeffs);
  static IntPoly constant(const Integer& c) { return IntPoly(std::vector<Integer>{c}); }
  static IntPoly x() { return IntPoly(std::vector<Integer>{0, 1}); }
  // x - a
  static IntPoly linear(const Integer& a) { return IntPoly(std::vector<Integer>{-a, 1}); }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<Integer>& coeffs() const { return c_; }
  Integer coeff(std::size_t i) const { return i < c_.size() ? c_[i] : Integer(0); }
  const Integer& leading() const { return c_.back(); }
  bool is_monic() const { return !c_.empty() && c_.back() == 1; }

  Integer content() const;
  // Divided by its content, sign fixed so the leading coefficient is positive.
  IntPoly primitive_part() const;
  IntPoly derivative() const;
  Integer eval(const Integer& a) const;

  friend IntPoly operator+(const IntPoly& a, const IntPoly& b);
  friend IntPoly operator-(const IntPoly& a, const IntPoly& b);
  friend IntPoly operator*(const IntPoly& a, const IntPoly& b);
  friend IntPoly operator*(const Integer& s, const IntPoly& a);
  IntPoly operator-() const;
  friend bool operator==(const IntPoly&, const IntPoly&) = default;

 private:
  void trim();
  std::vector<Integer> c_;
};

std::optional<IntPoly> divide_exact(const IntPoly& a, const IntPoly& b);
// Primitive gcd with positive leading coefficient; gcd(0, 0) = 0.
IntPoly gcd(const IntPoly& a, const IntPoly& b);
IntPoly pow(const IntPoly& a, unsigned e);

std::string to_string(const IntPoly& f, const std::string& var = "x");

// 1 x (deg+1) matrix of ascending coefficients (0 x 0 for the zero polynomial).
IntMatrix to_matrix(const IntPoly& f);
IntPoly poly_from_matrix(const IntMatrix& m);

// det(x - M), exact.
IntPoly charpoly_int(const IntMatrix& m);

// Polynomial over F_p, p < 2^63.
struct FpPoly {
  modp::u64 p = 0;
  std::vector<modp::u64> c;

  FpPoly() = default;
  FpPoly(modp::u64 prime, std::vector<modp::u64> coeffs);
  static FpPoly from(const IntPoly& f, modp::u64 prime);
  static FpPoly constant(modp::u64 prime, modp::u64 v) { return FpPoly(prime, {v}); }
  static FpPoly x(modp::u64 prime) { return FpPoly(prime, {0, 1}); }

  int degree() const { return static_cast<int>(c.size()) - 1; }
  bool is_zero() const { return c.empty(); }
  modp::u64 leading() const { return c.back(); }
  void trim();

  friend bool operator==(const FpPoly&, const FpPoly&) = default;
};

FpPoly operator+(const FpPoly& a, const FpPoly& b);
FpPoly operator-(const FpPoly& a, const FpPoly& b);
FpPoly operator*(const FpPoly& a, const FpPoly& b);
FpPoly monic(const FpPoly& a);
std::pair<FpPoly, FpPoly> divrem(const FpPoly& a, const FpPoly& b);
FpPoly gcd(const FpPoly& a, const FpPoly& b);  // monic
FpPoly powmod(const FpPoly& base, const Integer& e, const FpPoly& mod);
FpPoly derivative(const FpPoly& a);

struct FpFactor {
  FpPoly factor;  // monic irreducible
  int multiplicity = 0;
};
// Sorted by (degree, coefficients). Throws std::invalid_argument on zero.
std::vector<FpFactor> factor_fp(const FpPoly& f);

struct IntFactor {
  IntPoly factor;  // primitive irreducible, positive leading coefficient
  int multiplicity = 0;
};
// Sorted by (degree, coefficients); the content is dropped.
std::vector<IntFactor> factor_q(const IntPoly& f);

// h = numerator / denominator with h = 1 mod g1, h = 0 mod g2, deg h < deg g1 + deg g2.
struct ScaledPoly {
  IntPoly numerator;
  Integer denominator;
};
ScaledPoly crt_split(const IntPoly& g1, const IntPoly& g2);

}  // namespace maninforge

#pragma once

#include "maninforge/matrix.hpp"

#include <cstdint>
#include <vector>

namespace maninforge::modp {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline u64 add(u64 a, u64 b, u64 p) {
  u64 s = a + b;
  return s >= p ? s - p : s;
}
inline u64 sub(u64 a, u64 b, u64 p) { return a >= b ? a - b : a + p - b; }
inline u64 mul(u64 a, u64 b, u64 p) { return static_cast<u64>((static_cast<u128>(a) * b) % p); }
u64 pow(u64 a, u64 e, u64 p);
u64 inv(u64 a, u64 p);

bool is_prime(u64 n);

// Primes just below 2^62, descending; index k is deterministic.
u64 word_prime(std::size_t k);

u64 reduce(const Integer& x, u64 p);

// Dense matrix over F_p, row-major.
struct ModMatrix {
  std::size_t rows = 0, cols = 0;
  u64 p = 0;
  std::vector<u64> a;

  ModMatrix() = default;
  ModMatrix(std::size_t r, std::size_t c, u64 prime) : rows(r), cols(c), p(prime), a(r * c, 0) {}
  u64& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  u64 operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  static ModMatrix identity(std::size_t n, u64 prime);
  static ModMatrix from(const IntMatrix& m, u64 prime);
};

ModMatrix multiply(const ModMatrix& x, const ModMatrix& y);

struct Echelon {
  std::size_t rank = 0;
  std::vector<std::size_t> pivot_cols;
  ModMatrix reduced;  // reduced row echelon form
};

Echelon rref(ModMatrix m);

// Basis (rows) of {v : v * m = 0}.
ModMatrix left_kernel(const ModMatrix& m);

u64 det(ModMatrix m);

// Characteristic polynomial det(x - m), ascending coefficients, via Hessenberg reduction.
std::vector<u64> charpoly(ModMatrix m);

// Incremental CRT accumulator over word primes, reconstructing symmetric residues.
class CrtAccumulator {
 public:
  explicit CrtAccumulator(std::size_t n) : values_(n, 0), modulus_(1) {}
  void add(const std::vector<u64>& residues, u64 p);
  const Integer& modulus() const { return modulus_; }
  // Symmetric representatives in (-M/2, M/2].
  std::vector<Integer> symmetric() const;

 private:
  std::vector<Integer> values_;
  Integer modulus_;
};

// Hadamard bound on |det| of a square integer matrix (rounded up).
Integer hadamard_bound(const IntMatrix& m);

}  // namespace maninforge::modp

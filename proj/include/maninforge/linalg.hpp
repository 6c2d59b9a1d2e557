#pragma once

#include "maninforge/matrix.hpp"

#include <optional>
#include <span>
#include <vector>

namespace maninforge {

// Row Hermite normal form with transform: U * M = H, U unimodular, pivots
// positive, entries above each pivot reduced into [0, pivot), zero rows last.
struct HnfResult {
  IntMatrix hnf;
  IntMatrix transform;
  std::size_t rank = 0;
};

HnfResult hnf_with_transform(const IntMatrix& m);

// Nonzero rows of the HNF of M (a canonical basis of its row lattice).
// Dispatches to multimodular elimination for large inputs.
IntMatrix hnf_basis(const IntMatrix& m);

// HNF of the full-rank lattice spanned by the rows of `gens` together with
// modulus * Z^cols. Returns a square upper-triangular basis.
IntMatrix hnf_modulo(const IntMatrix& gens, const Integer& modulus);

// Invariant factors d1 | d2 | ... | dr of M (r = rank), all positive.
std::vector<Integer> snf(const IntMatrix& m);

std::size_t rank(const IntMatrix& m);

// Exact determinant via CRT over word primes with a Hadamard bound.
Integer det(const IntMatrix& m);

// For square nonsingular A: returns (d, Y) with d = det(A) and A * Y = d * B.
struct ScaledSolution {
  Integer det;
  IntMatrix scaled;
};
ScaledSolution solve_scaled(const IntMatrix& a, const IntMatrix& b);

// Saturated right kernel {v in Z^cols : M v = 0}, as HNF rows.
IntMatrix kernel_basis(const IntMatrix& m);

// Saturated left kernel {v in Z^rows : v M = 0}, as HNF rows.
inline IntMatrix left_kernel_basis(const IntMatrix& m) { return kernel_basis(m.transpose()); }

// (L tensor Q) intersect Z^n for the row lattice L of `rows`, as HNF rows.
IntMatrix saturate(const IntMatrix& rows);

// Coordinates of v in an echelon basis (e.g. HNF rows), if v lies in its Z-span.
std::optional<IntVector> echelon_coordinates(const IntMatrix& echelon, std::span<const Integer> v);

// Pivot rows/columns of a maximal nonsingular minor, detected modulo a word prime.
struct MinorPivots {
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;
};
MinorPivots pivots_mod_prime(const IntMatrix& m, std::size_t prime_index);

Integer content(std::span<const Integer> v);

}  // namespace maninforge

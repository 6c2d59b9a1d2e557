#pragma once

#include "maninforge/linalg.hpp"

#include <stdexcept>

namespace maninforge {

class LatticeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Finite-rank sublattice of Z^d held as its canonical HNF basis, so equal
// lattices compare bit-identically.
class IntLattice {
 public:
  IntLattice() = default;
  explicit IntLattice(std::size_t ambient_dim) : basis_(0, ambient_dim) {}

  // Lattice spanned by the rows of `generators` (any rank, any dependencies).
  static IntLattice span(const IntMatrix& generators);
  static IntLattice full(std::size_t ambient_dim);
  static IntLattice zero(std::size_t ambient_dim) { return IntLattice(ambient_dim); }

  std::size_t ambient_dim() const { return basis_.cols(); }
  std::size_t rank() const { return basis_.rows(); }
  const IntMatrix& basis() const { return basis_; }

  bool contains(std::span<const Integer> v) const { return coordinates(v).has_value(); }
  bool contains(const IntLattice& other) const;
  std::optional<IntVector> coordinates(std::span<const Integer> v) const {
    return echelon_coordinates(basis_, v);
  }
  // Coordinates of every basis row of `sub` in this basis (throws if not contained).
  IntMatrix coordinates_of(const IntLattice& sub) const;

  friend bool operator==(const IntLattice&, const IntLattice&) = default;

 private:
  IntMatrix basis_;
};

IntLattice kernel_saturated(const IntMatrix& m);
IntLattice lattice_sum(const IntLattice& a, const IntLattice& b);
IntLattice lattice_intersect(const IntLattice& a, const IntLattice& b);
Integer sublattice_index(const IntLattice& sub, const IntLattice& lat);

struct QuotientStructure {
  std::vector<Integer> torsion;  // invariant factors > 1, ascending
  std::size_t free_rank = 0;
  Integer torsion_order() const;
};
QuotientStructure quotient_invariants(const IntLattice& lat, const IntLattice& sub);

// L[e] = L intersect Ker(e), e acting on row vectors of the ambient space.
IntLattice idempotent_kernel_sublattice(const IntLattice& lat, const RatMatrix& e);

// Image of L under the row action v -> v * m (m integral), as a lattice.
IntLattice image(const IntLattice& lat, const IntMatrix& m);

}  // namespace maninforge

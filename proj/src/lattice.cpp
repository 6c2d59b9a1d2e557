#include "maninforge/lattice.hpp"

namespace maninforge {
namespace {

void require_same_ambient(const IntLattice& a, const IntLattice& b) {
  if (a.ambient_dim() != b.ambient_dim()) throw LatticeError("lattice ambient dimension mismatch");
}

IntMatrix stack(const IntMatrix& a, const IntMatrix& b) {
  IntMatrix s(a.rows() + b.rows(), a.cols());
  std::copy(a.data().begin(), a.data().end(), s.data().begin());
  std::copy(b.data().begin(), b.data().end(), s.data().begin() + static_cast<std::ptrdiff_t>(a.data().size()));
  return s;
}

}  // namespace

IntLattice IntLattice::span(const IntMatrix& generators) {
  IntLattice l;
  l.basis_ = hnf_basis(generators);
  return l;
}

IntLattice IntLattice::full(std::size_t ambient_dim) {
  IntLattice l;
  l.basis_ = IntMatrix::identity(ambient_dim);
  return l;
}

bool IntLattice::contains(const IntLattice& other) const {
  if (other.ambient_dim() != ambient_dim()) return false;
  for (std::size_t i = 0; i < other.rank(); ++i)
    if (!contains(other.basis().row(i))) return false;
  return true;
}

IntMatrix IntLattice::coordinates_of(const IntLattice& sub) const {
  require_same_ambient(*this, sub);
  IntMatrix c(sub.rank(), rank());
  for (std::size_t i = 0; i < sub.rank(); ++i) {
    auto x = coordinates(sub.basis().row(i));
    if (!x) throw LatticeError("not a sublattice");
    for (std::size_t j = 0; j < rank(); ++j) c(i, j) = (*x)[j];
  }
  return c;
}

IntLattice kernel_saturated(const IntMatrix& m) { return IntLattice::span(kernel_basis(m)); }

IntLattice lattice_sum(const IntLattice& a, const IntLattice& b) {
  require_same_ambient(a, b);
  if (a.rank() == 0) return b;
  if (b.rank() == 0) return a;
  return IntLattice::span(stack(a.basis(), b.basis()));
}

IntLattice lattice_intersect(const IntLattice& a, const IntLattice& b) {
  require_same_ambient(a, b);
  if (a.rank() == 0 || b.rank() == 0) return IntLattice::zero(a.ambient_dim());
  IntMatrix stacked = stack(a.basis(), -b.basis());
  IntMatrix rel = left_kernel_basis(stacked);
  if (rel.rows() == 0) return IntLattice::zero(a.ambient_dim());
  IntMatrix coeffs = rel.block(0, 0, rel.rows(), a.rank());
  return IntLattice::span(coeffs * a.basis());
}

Integer sublattice_index(const IntLattice& sub, const IntLattice& lat) {
  require_same_ambient(sub, lat);
  if (sub.rank() != lat.rank()) throw LatticeError("infinite index: rank drop");
  if (lat.rank() == 0) return 1;
  IntMatrix c = lat.coordinates_of(sub);
  return abs(det(c));
}

Integer QuotientStructure::torsion_order() const {
  Integer o = 1;
  for (const auto& d : torsion) o *= d;
  return o;
}

QuotientStructure quotient_invariants(const IntLattice& lat, const IntLattice& sub) {
  require_same_ambient(sub, lat);
  QuotientStructure q;
  q.free_rank = lat.rank() - sub.rank();
  if (sub.rank() == 0) return q;
  IntMatrix c = lat.coordinates_of(sub);
  for (auto& d : snf(c))
    if (d != 1) q.torsion.push_back(d);
  return q;
}

IntLattice idempotent_kernel_sublattice(const IntLattice& lat, const RatMatrix& e) {
  if (!e.is_square() || e.rows() != lat.ambient_dim()) throw LatticeError("idempotent has wrong shape");
  if (!(e * e == e)) throw LatticeError("matrix is not idempotent");
  if (lat.rank() == 0) return lat;
  auto [den, num] = clear_denominators(e);
  (void)den;
  IntMatrix be = lat.basis() * num;
  IntMatrix coeffs = left_kernel_basis(be);
  if (coeffs.rows() == 0) return IntLattice::zero(lat.ambient_dim());
  return IntLattice::span(coeffs * lat.basis());
}

IntLattice image(const IntLattice& lat, const IntMatrix& m) {
  if (lat.rank() == 0) return IntLattice::zero(m.cols());
  return IntLattice::span(lat.basis() * m);
}

}  // namespace maninforge

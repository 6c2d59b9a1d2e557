#pragma once

#include "maninforge/modsym.hpp"
#include "maninforge/poly.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace maninforge {

long sturm_bound(long n);

// Commutative Z-algebra, free of finite rank, given by structure constants.
// mult[i] is the matrix of x -> x * b_i on coordinate row vectors.
struct FiniteAlgebra {
  std::vector<IntMatrix> mult;
  IntVector one;

  std::size_t rank() const { return one.size(); }
  // Matrix of x -> x * y.
  IntMatrix mul_matrix(std::span<const Integer> y) const;
  IntVector multiply(std::span<const Integer> x, std::span<const Integer> y) const;
  // det of the trace form.
  Integer discriminant() const;
};

// Commutative ring of integer matrices (acting on row vectors), held through a
// Z-basis. Membership and products are decided on a few probe rows; the probe
// set is chosen so that the projection is injective on the Q-span.
class MatrixOrder {
 public:
  MatrixOrder() = default;
  // Z-span of `spanning`, whose Q-span must have dimension expected_rank.
  static MatrixOrder span(const std::vector<IntMatrix>& spanning, std::size_t expected_rank);

  std::size_t rank() const { return basis_.size(); }
  std::size_t size() const { return size_; }
  const std::vector<IntMatrix>& basis() const { return basis_; }
  const std::vector<std::size_t>& probes() const { return probes_; }
  // Lattice of projected basis elements (probe rows, concatenated).
  const IntLattice& projected() const { return projected_; }

  IntVector project(const IntMatrix& x) const;
  // probe rows of (x * y), without forming the product.
  IntVector project_product(const IntMatrix& x, const IntMatrix& y) const;
  std::optional<IntVector> coordinates(const IntMatrix& x) const;  // checks the full matrix
  RatVector rational_coordinates(const IntMatrix& x) const;         // x assumed in the Q-span
  IntMatrix element(std::span<const Integer> coords) const;
  RatMatrix element(std::span<const Rational> coords) const;
  // Matrix (in basis coordinates) of multiplication by y, which must preserve the lattice.
  IntMatrix multiplication(const IntMatrix& y) const;
  // Adds basis-element * g products until stable under right multiplication by each g.
  void close_under(const std::vector<IntMatrix>& gens);

  const FiniteAlgebra& structure() const;

 private:
  std::size_t size_ = 0;
  std::vector<IntMatrix> basis_;
  std::vector<std::size_t> probes_;
  IntLattice projected_;
  mutable std::optional<FiniteAlgebra> structure_;

  void rebuild(const std::vector<IntMatrix>& spanning, const IntMatrix& projections);
};

struct HeckeAlgebra {
  long level = 0;
  std::vector<OperatorMatrix> generators;  // T_l / U_l for primes l <= Sturm bound
  MatrixOrder order;                       // Z-basis of T as matrices on S

  std::size_t rank() const { return order.rank(); }
  bool contains(const IntMatrix& x) const { return order.coordinates(x).has_value(); }
};

HeckeAlgebra build_hecke_algebra(const ModSymSpace& space);

struct NewformClass {
  long level = 0;
  std::size_t index = 0;  // 1-based, ordered by dimension then Hecke polynomials
  std::size_t dimension = 0;
  IntPoly defining;             // irreducible factor g_f of the separating element
  IntMatrix separating;         // t on S
  IntLattice isotypic;          // S_f = S[e_f_perp], in S coordinates
  RatVector idempotent_coords;  // e_f in the basis of T
  RatMatrix idempotent;         // e_f on S
  // a_l as coordinates in the power basis 1, a, a^2, ... of a root a of g_f.
  std::map<long, RatVector> eigenvalues;
  // charpoly of T_l restricted to S_f (the square of the minimal polynomial of a_l).
  std::map<long, IntPoly> hecke_polys;

  std::string label() const { return std::to_string(level) + "." + std::to_string(index); }
  RatMatrix complement() const;  // 1 - e_f
};

struct Decomposition {
  IntMatrix separating;        // t on S
  IntPoly radical;             // squarefree charpoly of t
  std::vector<NewformClass> classes;     // new classes, labelled
  std::vector<NewformClass> old_classes; // other factors of T_Q (unlabelled, index 0)
};

class SeparationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Decomposition decompose(const ModSymSpace& space, const HeckeAlgebra& algebra);
std::vector<NewformClass> decompose_new(const ModSymSpace& space, const HeckeAlgebra& algebra);

// O_f, realized as the restriction of T to S_f (isomorphic to T / T[e_f]).
struct OrderOf {
  MatrixOrder order;

  std::size_t rank() const { return order.rank(); }
  const FiniteAlgebra& structure() const { return order.structure(); }
  Integer discriminant() const { return structure().discriminant(); }
};

OrderOf order_of(const HeckeAlgebra& algebra, const NewformClass& cls);
// Restriction of an operator preserving `sub` to sub's basis coordinates.
IntMatrix restrict_to(const IntLattice& sub, const IntMatrix& op);

// A local factor of ring / p ring.
struct MaxIdeal {
  long p = 0;
  std::vector<modp::u64> idempotent;   // local idempotent, coordinates mod p
  std::size_t residue_degree = 0;
  std::size_t local_dim = 0;           // F_p-dimension of the local factor
  // F_p-basis (rows) of the image of m in ring / p ring.
  modp::ModMatrix ideal;
};

std::vector<MaxIdeal> maximal_ideals(const FiniteAlgebra& ring, long p);

// dim over the residue field of M / m M; `action` holds the matrices of the
// ring basis acting on M.
std::size_t fiber_dim(const std::vector<IntMatrix>& action, const MaxIdeal& m);
// dim over the residue field of the m-torsion of ring / p ring.
std::size_t socle_dim(const FiniteAlgebra& ring, const MaxIdeal& m);

enum class Verdict { yes, no, not_certified };
std::string to_string(Verdict v);

struct GorensteinVerdict {
  Verdict verdict = Verdict::not_certified;
  std::size_t fiber_dim = 0;
  std::string guard;  // which applicability case held, empty when none
};

GorensteinVerdict is_gorenstein(const HeckeAlgebra& algebra, const MaxIdeal& m);
bool is_dvr(const FiniteAlgebra& order, const MaxIdeal& m);
// dim over the residue field of m / m^2.
std::size_t cotangent_dim(const FiniteAlgebra& order, const MaxIdeal& m);

// [T' : T] with T' = T_Q intersected with End(S).
Integer saturation_index(const HeckeAlgebra& algebra);

// Sign of U_p on S_f (p exactly dividing the level); 0 if U_p is not +-1 there.
int u_p_unit_check(const ModSymSpace& space, const NewformClass& cls, long p);

// x <- 3x^2 - 2x^3 modulo `modulus` until fixed.
IntVector lift_idempotent(const FiniteAlgebra& ring, std::span<const Integer> e, const Integer& modulus);

}  // namespace maninforge

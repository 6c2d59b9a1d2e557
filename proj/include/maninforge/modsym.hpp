#pragma once

#include "maninforge/lattice.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace maninforge {

// (c : d) in P^1(Z/n), stored as canonical residues in [0, n).
struct P1Point {
  long c = 0;
  long d = 0;
  auto operator<=>(const P1Point&) const = default;
};

// Canonical representative of (c : d): lexicographically least (u c, u d) over units u.
P1Point p1_normalize(long n, long c, long d);

class P1List {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  explicit P1List(long n);
  long level() const { return n_; }
  std::size_t size() const { return points_.size(); }
  const P1Point& operator[](std::size_t i) const { return points_[i]; }
  const std::vector<P1Point>& points() const { return points_; }
  // Index of the class of (c : d) for arbitrary integers, npos if gcd(c, d, n) != 1.
  std::size_t index(long long c, long long d) const;

 private:
  long n_;
  std::vector<P1Point> points_;
  std::vector<std::uint32_t> table_;  // c * n + d -> index + 1, 0 when invalid
};

std::vector<P1Point> p1_list(long n);

long genus_x0(long n);
long cusp_count_x0(long n);
bool is_squarefree(long n);
std::vector<long> prime_divisors(long n);

using SparseVec = std::vector<std::pair<std::uint32_t, Integer>>;

// A cusp a/b of Gamma_0(n) in lowest terms with b >= 0; infinity is 1/0.
struct Cusp {
  long long a = 1;
  long long b = 0;
};

// 2x2 integer matrix [[a, b], [c, d]].
using Mat2 = std::array<long long, 4>;

// Weight-2 modular symbols for Gamma_0(n) from the Manin presentation.
// M is the relation quotient modulo torsion, identified with Z^rank(); S is the
// cuspidal sublattice of M. Operators act on row vectors.
class ModSymSpace {
 public:
  static ModSymSpace build(long n);

  long level() const { return p1_.level(); }
  const P1List& p1() const { return p1_; }
  std::size_t rank() const { return rank_; }

  // Three-term relations over the generators left by the two-term relations.
  const IntMatrix& presentation() const { return presentation_; }
  const IntMatrix& boundary() const { return boundary_; }
  const std::vector<Cusp>& cusps() const { return cusps_; }
  std::size_t cusp_count() const { return cusps_.size(); }
  const IntLattice& cuspidal() const { return cuspidal_; }
  std::size_t cuspidal_rank() const { return cuspidal_.rank(); }

  // M-coordinates of Manin symbol number i.
  const SparseVec& symbol(std::size_t i) const { return symbols_[i]; }
  // Manin symbols (with coefficients) whose sum maps to basis vector k of M.
  const std::vector<std::pair<std::size_t, Integer>>& lift(std::size_t k) const { return lifts_[k]; }

  // acc += coeff * [Manin symbol (c : d)], ignored when (c : d) is not in P^1.
  void add_symbol(std::vector<Integer>& acc, long long c, long long d, const Integer& coeff) const;
  // acc += coeff * {0, p/q} (q == 0 means infinity).
  void add_zero_to(std::vector<Integer>& acc, long long p, long long q, const Integer& coeff) const;
  // acc += coeff * {g(0), g(infinity)} for any integral g with det(g) != 0.
  void add_image(std::vector<Integer>& acc, const Mat2& g, const Integer& coeff) const;

  // SL_2(Z) lift [[a, b], [c, d]] of the Manin symbol number i.
  Mat2 lift_to_sl2(std::size_t i) const;

 private:
  P1List p1_{1};
  std::size_t rank_ = 0;
  IntMatrix presentation_;
  IntMatrix boundary_;
  std::vector<Cusp> cusps_;
  IntLattice cuspidal_;
  std::vector<SparseVec> symbols_;
  std::vector<std::vector<std::pair<std::size_t, Integer>>> lifts_;

  std::size_t cusp_class(long long a, long long b);
};

// Operator on S (rows are images of S basis vectors in S coordinates), or a map
// from S to the cuspidal lattice of another level.
struct OperatorMatrix {
  std::string name;
  IntMatrix matrix;
};

// Hecke operators on M (rank x rank).
IntMatrix heilbronn_on_m(const ModSymSpace& space, const std::vector<Mat2>& heilbronn);
// Left action {a, b} -> sum {g a, g b} on M.
IntMatrix left_action_on_m(const ModSymSpace& space, const std::vector<Mat2>& gammas);

// Restrict an M-endomorphism to S; throws if S is not preserved integrally.
IntMatrix restrict_to_cuspidal(const ModSymSpace& space, const IntMatrix& on_m);

std::vector<Mat2> heilbronn_cremona(long p);
std::vector<Mat2> heilbronn_merel(long n);
// Coset representatives of the double coset of diag(1, l) for Gamma_0(n).
std::vector<Mat2> hecke_cosets(long n, long l);

// T_l (l prime, l not dividing n) or U_l (l | n).
OperatorMatrix hecke(const ModSymSpace& space, long l);
// T_m for any m >= 1 via Merel's Heilbronn matrices.
OperatorMatrix hecke_merel(const ModSymSpace& space, long m);

OperatorMatrix atkin_lehner(const ModSymSpace& space, long q);
OperatorMatrix star_involution(const ModSymSpace& space);

enum class DegeneracyKind { forget, quotient };

// Push-forward S(n) -> S(n/l).
OperatorMatrix degeneracy(const ModSymSpace& space, const ModSymSpace& target, long l, DegeneracyKind kind);
// Pull-back S(n/l) -> S(n), where space is level n/l and target level n.
OperatorMatrix degeneracy_pullback(const ModSymSpace& space, const ModSymSpace& target, long l,
                                   DegeneracyKind kind);

// Intersection over l | n of the kernels of both push-forwards, in S coordinates.
IntLattice new_lattice(const ModSymSpace& space);

}  // namespace maninforge

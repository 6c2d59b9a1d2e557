#pragma once

#include "maninforge/hecke.hpp"

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace maninforge {

// A hard invariant forced by theory failed; always an implementation bug.
class TheoremViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Prime factorization (trial division, then Pollard-Brent), ascending.
std::vector<std::pair<Integer, int>> factor_integer(Integer n);
int valuation(Integer n, const Integer& p);

// Lattice with a T-action: action[i] is basis element i of T acting on ambient row vectors.
struct TModule {
  std::string carrier;  // "T", "S" or "other"
  IntLattice lattice;
  std::vector<IntMatrix> action;
};

struct LocalOrder {
  long p = 0;
  std::size_t ideal = 0;  // index into maximal_ideals(T, p)
  std::size_t residue_degree = 0;
  Integer order = 1;
};

struct CongModuleReport {
  std::string carrier;
  std::string label;
  std::vector<Integer> invariant_factors;
  Integer order = 1;
  std::map<long, Integer> prime_parts;
  std::vector<LocalOrder> local;  // empty unless a ring was supplied

  Integer local_order(long p, std::size_t ideal) const;
};

// M / (M[e] + M[1 - e]); with `ring` given, also its m-primary orders via lifted idempotents.
CongModuleReport congruence_module(const TModule& m, const RatMatrix& e, const FiniteAlgebra* ring = nullptr,
                                   const std::string& label = "");

// Everything computed once per level.
struct LevelData {
  ModSymSpace space;
  HeckeAlgebra algebra;
  Decomposition decomposition;

  static LevelData compute(long n);
  long level() const { return space.level(); }
  const std::vector<NewformClass>& classes() const { return decomposition.classes; }
  TModule s_module() const;
  TModule t_module() const;
  RatMatrix idempotent_on_t(const NewformClass& cls) const;
};

Integer cong_number(const LevelData& data, const NewformClass& cls);
Integer modular_degree(const LevelData& data, const NewformClass& cls);

struct IdealDiagnostic {
  long p = 0;
  std::size_t ideal = 0;
  std::size_t residue_degree = 0;
  Integer deg_part = 1;   // deg_{f,m}
  Integer cong_part = 1;  // cong_{f,m}
  GorensteinVerdict gorenstein;
  bool dvr = false;
  std::size_t cotangent = 0;
  std::optional<int> u_p_sign;  // for p | n
};

struct PrimeOrders {
  long p = 0;
  int ord_deg = 0;
  int ord_cong = 0;
  int inferred_coker = 0;  // ord_deg - ord_cong; inferred, not computed
};

struct DegCongReport {
  std::string label;
  std::size_t dimension = 0;
  Integer deg = 1;
  Integer cong = 1;
  std::vector<PrimeOrders> primes;
  std::vector<IdealDiagnostic> ideals;  // m in the support of O_f over the primes of interest
};

// `primes` restricts the per-ideal diagnostics; empty means every prime dividing deg * cong.
DegCongReport class_report(const LevelData& data, const NewformClass& cls, const std::vector<long>& primes = {});
std::vector<DegCongReport> deg_cong_report(const LevelData& data, const std::vector<long>& primes = {});

struct ManinCheck {
  long p = 0;
  int ord_deg = 0;
  int ord_cong = 0;
  bool pass = false;
};

struct ManinCertificate {
  std::string label;
  std::vector<ManinCheck> checks;
  bool pass = true;
};

std::vector<ManinCertificate> manin_certify(const LevelData& data);

struct Anomaly {
  DegCongReport report;
  std::vector<IdealDiagnostic> bad_ideals;  // m | 2 with dvr false and gorenstein false
};

std::vector<Anomaly> anomaly_scan(const LevelData& data);

enum class Applicability { applies, not_applicable };
struct DivisibilityVerdict {
  Applicability applicability = Applicability::not_applicable;
  bool holds = false;
};
// deg_{f,m} | cong_{f,m}, meaningful when O_f is a DVR at m.
DivisibilityVerdict divisibility_check(const IdealDiagnostic& d);

}  // namespace maninforge

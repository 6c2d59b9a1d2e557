#include "maninforge/invariants.hpp"

#include <algorithm>
#include <sstream>

namespace maninforge {
namespace {

using modp::u64;

Integer pollard_brent(const Integer& n) {
  if (n % 2 == 0) return 2;
  for (unsigned long c = 1;; ++c) {
    Integer y = 2, x, g = 1, q = 1, ys;
    std::size_t r = 1;
    const std::size_t m = 128;
    auto f = [&](const Integer& v) { return Integer((v * v + c) % n); };
    while (g == 1) {
      x = y;
      for (std::size_t i = 0; i < r; ++i) y = f(y);
      for (std::size_t k = 0; k < r && g == 1; k += m) {
        ys = y;
        for (std::size_t i = 0; i < std::min(m, r - k); ++i) {
          y = f(y);
          q = (q * abs(x - y)) % n;
        }
        g = gcd(q, n);
      }
      r *= 2;
    }
    if (g == n) {
      do {
        ys = f(ys);
        g = gcd(Integer(abs(x - ys)), n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void factor_into(Integer n, std::map<Integer, int>& out) {
  if (n == 1) return;
  if (mpz_probab_prime_p(n.get_mpz_t(), 30) != 0) {
    ++out[n];
    return;
  }
  Integer d = pollard_brent(n);
  factor_into(d, out);
  factor_into(Integer(n / d), out);
}

std::vector<u64> reduce_vec(std::span<const Integer> v, u64 p) {
  std::vector<u64> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = modp::reduce(v[i], p);
  return out;
}

IntMatrix act(const TModule& m, std::span<const Integer> x) {
  const std::size_t dim = m.lattice.ambient_dim();
  IntMatrix out(dim, dim);
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] != 0) out += x[i] * m.action[i];
  return out;
}

Integer p_part(Integer n, const Integer& p) {
  Integer out = 1;
  while (n % p == 0) {
    n /= p;
    out *= p;
  }
  return out;
}

Integer exact_sqrt(const Integer& n, const std::string& context) {
  if (mpz_perfect_square_p(n.get_mpz_t()) == 0) {
    std::ostringstream msg;
    msg << "congruence module order of S is not a perfect square: " << n.get_str() << " (" << context << ")";
    throw TheoremViolation(msg.str());
  }
  Integer r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

std::vector<long> primes_of(const Integer& n) {
  std::vector<long> out;
  for (const auto& [p, e] : factor_integer(n)) out.push_back(p.get_si());
  return out;
}

struct ClassCore {
  CongModuleReport s;
  CongModuleReport t;
  Integer deg, cong;
};

ClassCore class_core(const LevelData& data, const NewformClass& cls, bool local) {
  const FiniteAlgebra& ring = data.algebra.order.structure();
  ClassCore c;
  c.s = congruence_module(data.s_module(), cls.idempotent, local ? &ring : nullptr, cls.label());
  c.t = congruence_module(data.t_module(), data.idempotent_on_t(cls), local ? &ring : nullptr, cls.label());
  c.deg = exact_sqrt(c.s.order, cls.label());
  c.cong = c.t.order;
  return c;
}

}  // namespace

std::vector<std::pair<Integer, int>> factor_integer(Integer n) {
  if (n <= 0) throw std::invalid_argument("factor_integer: n must be positive");
  std::map<Integer, int> f;
  for (unsigned long p = 2; p < 65536 && p * p <= n; p += (p == 2 ? 1 : 2)) {
    while (n % p == 0) {
      n /= p;
      ++f[Integer(p)];
    }
  }
  factor_into(n, f);
  return {f.begin(), f.end()};
}

int valuation(Integer n, const Integer& p) {
  if (n == 0) throw std::invalid_argument("valuation of zero");
  int e = 0;
  while (n % p == 0) {
    n /= p;
    ++e;
  }
  return e;
}

Integer CongModuleReport::local_order(long p, std::size_t ideal) const {
  for (const auto& l : local)
    if (l.p == p && l.ideal == ideal) return l.order;
  return 1;
}

CongModuleReport congruence_module(const TModule& m, const RatMatrix& e, const FiniteAlgebra* ring,
                                   const std::string& label) {
  if (!(e * e == e)) throw std::invalid_argument("congruence_module: input is not idempotent");
  CongModuleReport rep;
  rep.carrier = m.carrier;
  rep.label = label;
  RatMatrix ec = -e;
  for (std::size_t i = 0; i < ec.rows(); ++i) ec(i, i) += 1;
  IntLattice sub = lattice_sum(idempotent_kernel_sublattice(m.lattice, e), idempotent_kernel_sublattice(m.lattice, ec));
  QuotientStructure q = quotient_invariants(m.lattice, sub);
  if (q.free_rank != 0) throw std::logic_error("congruence_module: kernels do not span");
  rep.invariant_factors = q.torsion;
  rep.order = q.torsion_order();
  for (const auto& [p, k] : factor_integer(rep.order)) rep.prime_parts[p.get_si()] = p_part(rep.order, p);
  if (!ring) return rep;

  // order * L lies in sub, so everything below is done modulo the order, in L coordinates
  const IntMatrix sub_c = m.lattice.coordinates_of(sub);
  const std::size_t dim = m.lattice.rank();
  for (const auto& [p, part] : rep.prime_parts) {
    Integer pk = p;
    while (pk <= rep.order) pk *= p;
    auto ms = maximal_ideals(*ring, p);
    Integer product = 1;
    for (std::size_t j = 0; j < ms.size(); ++j) {
      IntVector e0(ms[j].idempotent.begin(), ms[j].idempotent.end());
      IntVector lifted = lift_idempotent(*ring, e0, pk);
      IntMatrix moved = m.lattice.basis() * act(m, lifted);
      IntMatrix gens(0, dim);
      for (std::size_t i = 0; i < sub_c.rows(); ++i) gens.append_row(sub_c.row(i));
      for (std::size_t i = 0; i < moved.rows(); ++i) {
        auto c = m.lattice.coordinates(moved.row(i));
        if (!c) throw std::invalid_argument("congruence_module: lattice is not stable under T");
        for (auto& x : *c) x %= rep.order;
        gens.append_row(*c);
      }
      IntMatrix h = hnf_modulo(gens, rep.order);
      Integer covol = 1;
      for (std::size_t i = 0; i < dim; ++i) covol *= h(i, i);
      Integer ord = p_part(Integer(rep.order / abs(covol)), p);
      product *= ord;
      if (ord != 1) rep.local.push_back({p, j, ms[j].residue_degree, ord});
    }
    if (product != part) throw std::logic_error("congruence_module: local orders do not multiply to the p-part");
  }
  return rep;
}

// ---------------------------------------------------------------- LevelData

LevelData LevelData::compute(long n) {
  if (!is_squarefree(n)) throw std::invalid_argument("level " + std::to_string(n) + " is not squarefree");
  ModSymSpace space = ModSymSpace::build(n);
  HeckeAlgebra algebra = build_hecke_algebra(space);
  Decomposition dec = decompose(space, algebra);
  return {std::move(space), std::move(algebra), std::move(dec)};
}

TModule LevelData::s_module() const {
  return {"S", IntLattice::full(algebra.order.size()), algebra.order.basis()};
}

TModule LevelData::t_module() const {
  const FiniteAlgebra& ring = algebra.order.structure();
  return {"T", IntLattice::full(ring.rank()), ring.mult};
}

RatMatrix LevelData::idempotent_on_t(const NewformClass& cls) const {
  const FiniteAlgebra& ring = algebra.order.structure();
  const std::size_t r = ring.rank();
  RatMatrix out(r, r);
  for (std::size_t i = 0; i < r; ++i) {
    if (cls.idempotent_coords[i] == 0) continue;
    for (std::size_t k = 0; k < r * r; ++k)
      if (ring.mult[i].data()[k] != 0) out.data()[k] += cls.idempotent_coords[i] * ring.mult[i].data()[k];
  }
  return out;
}

Integer cong_number(const LevelData& data, const NewformClass& cls) {
  return congruence_module(data.t_module(), data.idempotent_on_t(cls), nullptr, cls.label()).order;
}

Integer modular_degree(const LevelData& data, const NewformClass& cls) {
  auto rep = congruence_module(data.s_module(), cls.idempotent, nullptr, cls.label());
  return exact_sqrt(rep.order, cls.label());
}

// ---------------------------------------------------------------- reports

DegCongReport class_report(const LevelData& data, const NewformClass& cls, const std::vector<long>& primes) {
  ClassCore core = class_core(data, cls, true);
  DegCongReport rep;
  rep.label = cls.label();
  rep.dimension = cls.dimension;
  rep.deg = core.deg;
  rep.cong = core.cong;
  const long n = data.level();

  for (long p : primes_of(Integer(rep.deg * rep.cong))) {
    PrimeOrders po{p, valuation(rep.deg, p), valuation(rep.cong, p), 0};
    po.inferred_coker = po.ord_deg - po.ord_cong;
    if (p != 2 && po.ord_deg != po.ord_cong)
      throw TheoremViolation(rep.label + ": ord_" + std::to_string(p) + " of deg and cong differ at an odd prime");
    rep.primes.push_back(po);
  }

  std::vector<long> wanted = primes;
  if (wanted.empty())
    for (const auto& po : rep.primes) wanted.push_back(po.p);

  const FiniteAlgebra& ring = data.algebra.order.structure();
  OrderOf of = order_of(data.algebra, cls);
  const FiniteAlgebra& ofs = of.structure();
  // T -> O_f in coordinates
  IntMatrix phi(ring.rank(), of.rank());
  for (std::size_t i = 0; i < ring.rank(); ++i) {
    auto c = of.order.coordinates(restrict_to(cls.isotypic, data.algebra.order.basis()[i]));
    if (!c) throw std::logic_error("class_report: T does not map onto O_f");
    for (std::size_t j = 0; j < of.rank(); ++j) phi(i, j) = (*c)[j];
  }

  for (long p : wanted) {
    const u64 q = static_cast<u64>(p);
    auto ms = maximal_ideals(ring, p);
    modp::ModMatrix phim = modp::ModMatrix::from(phi, q);
    for (std::size_t j = 0; j < ms.size(); ++j) {
      modp::ModMatrix img = modp::multiply(ms[j].ideal, phim);
      auto ech = modp::rref(img);
      if (ech.rank == of.rank()) continue;  // not in the support of O_f
      MaxIdeal mo;
      mo.p = p;
      mo.residue_degree = ms[j].residue_degree;
      mo.ideal = modp::ModMatrix(ech.rank, of.rank(), q);
      std::copy(ech.reduced.a.begin(), ech.reduced.a.begin() + ech.rank * of.rank(), mo.ideal.a.begin());
      mo.idempotent = reduce_vec(std::span<const Integer>(ofs.one), q);

      IdealDiagnostic d;
      d.p = p;
      d.ideal = j;
      d.residue_degree = ms[j].residue_degree;
      d.deg_part = exact_sqrt(core.s.local_order(p, j), rep.label + " at an ideal over " + std::to_string(p));
      d.cong_part = core.t.local_order(p, j);
      d.gorenstein = is_gorenstein(data.algebra, ms[j]);
      d.cotangent = cotangent_dim(ofs, mo);
      d.dvr = d.cotangent == 1;
      if (n % p == 0) d.u_p_sign = u_p_unit_check(data.space, cls, p);

      if (d.deg_part % d.cong_part != 0)
        throw TheoremViolation(rep.label + ": cong_m does not divide deg_m over " + std::to_string(p));
      if ((d.dvr || d.gorenstein.verdict == Verdict::yes) && d.deg_part != d.cong_part)
        throw TheoremViolation(rep.label + ": deg_m != cong_m at a DVR or Gorenstein ideal over " +
                               std::to_string(p));
      rep.ideals.push_back(std::move(d));
    }
  }
  return rep;
}

std::vector<DegCongReport> deg_cong_report(const LevelData& data, const std::vector<long>& primes) {
  std::vector<DegCongReport> out;
  for (const auto& cls : data.classes()) out.push_back(class_report(data, cls, primes));
  return out;
}

std::vector<ManinCertificate> manin_certify(const LevelData& data) {
  std::vector<ManinCertificate> out;
  for (const auto& cls : data.classes()) {
    if (cls.dimension != 1) continue;
    ManinCertificate cert;
    cert.label = cls.label();
    Integer deg = modular_degree(data, cls), cong = cong_number(data, cls);
    for (long p : primes_of(Integer(deg * cong))) {
      ManinCheck c{p, valuation(deg, p), valuation(cong, p), false};
      c.pass = c.ord_deg == c.ord_cong;
      cert.pass = cert.pass && c.pass;
      cert.checks.push_back(c);
    }
    out.push_back(std::move(cert));
  }
  return out;
}

std::vector<Anomaly> anomaly_scan(const LevelData& data) {
  std::vector<Anomaly> out;
  for (const auto& cls : data.classes()) {
    ClassCore core = class_core(data, cls, false);
    if (valuation(core.deg, 2) == valuation(core.cong, 2)) continue;
    Anomaly a;
    a.report = class_report(data, cls, {2});
    for (const auto& d : a.report.ideals) {
      if (d.deg_part != d.cong_part && (d.dvr || d.gorenstein.verdict == Verdict::yes))
        throw TheoremViolation(a.report.label + ": deg/cong mismatch at a DVR or Gorenstein ideal over 2");
      if (!d.dvr && d.gorenstein.verdict == Verdict::no) a.bad_ideals.push_back(d);
    }
    out.push_back(std::move(a));
  }
  return out;
}

DivisibilityVerdict divisibility_check(const IdealDiagnostic& d) {
  DivisibilityVerdict v;
  if (d.cong_part == 1 && d.deg_part == 1) {
    v.applicability = Applicability::applies;
    v.holds = true;
    return v;
  }
  if (!d.dvr) return v;
  v.applicability = Applicability::applies;
  v.holds = d.cong_part % d.deg_part == 0;
  return v;
}

}  // namespace maninforge

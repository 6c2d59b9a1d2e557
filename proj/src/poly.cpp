#include "maninforge/poly.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <stdexcept>

namespace maninforge {

using modp::u64;

void IntPoly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

IntPoly::IntPoly(std::vector<Integer> coeffs) : c_(std::move(coeffs)) { trim(); }

Integer IntPoly::content() const {
  Integer g = 0;
  for (const auto& x : c_) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  return g;
}

IntPoly IntPoly::primitive_part() const {
  if (is_zero()) return *this;
  Integer g = content();
  if (leading() < 0) g = -g;
  IntPoly r = *this;
  for (auto& x : r.c_) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
  return r;
}

IntPoly IntPoly::derivative() const {
  std::vector<Integer> d;
  for (std::size_t i = 1; i < c_.size(); ++i) d.push_back(c_[i] * static_cast<unsigned long>(i));
  return IntPoly(std::move(d));
}

Integer IntPoly::eval(const Integer& a) const {
  Integer v = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * a + *it;
  return v;
}

IntPoly operator+(const IntPoly& a, const IntPoly& b) {
  std::vector<Integer> r(std::max(a.c_.size(), b.c_.size()));
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = a.coeff(i) + b.coeff(i);
  return IntPoly(std::move(r));
}

IntPoly operator-(const IntPoly& a, const IntPoly& b) {
  std::vector<Integer> r(std::max(a.c_.size(), b.c_.size()));
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = a.coeff(i) - b.coeff(i);
  return IntPoly(std::move(r));
}

IntPoly operator*(const IntPoly& a, const IntPoly& b) {
  if (a.is_zero() || b.is_zero()) return IntPoly();
  std::vector<Integer> r(a.c_.size() + b.c_.size() - 1);
  for (std::size_t i = 0; i < a.c_.size(); ++i) {
    if (a.c_[i] == 0) continue;
    for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
  }
  return IntPoly(std::move(r));
}

IntPoly operator*(const Integer& s, const IntPoly& a) {
  std::vector<Integer> r = a.c_;
  for (auto& x : r) x *= s;
  return IntPoly(std::move(r));
}

IntPoly IntPoly::operator-() const { return Integer(-1) * *this; }

std::optional<IntPoly> divide_exact(const IntPoly& a, const IntPoly& b) {
  if (b.is_zero()) throw std::invalid_argument("division by the zero polynomial");
  if (a.is_zero()) return IntPoly();
  if (a.degree() < b.degree()) return std::nullopt;
  std::vector<Integer> rem = a.coeffs();
  const auto& bc = b.coeffs();
  const std::size_t db = bc.size() - 1;
  std::vector<Integer> q(rem.size() - db);
  for (std::size_t k = q.size(); k-- > 0;) {
    Integer& top = rem[k + db];
    if (top == 0) continue;
    if (!mpz_divisible_p(top.get_mpz_t(), b.leading().get_mpz_t())) return std::nullopt;
    mpz_divexact(q[k].get_mpz_t(), top.get_mpz_t(), b.leading().get_mpz_t());
    for (std::size_t j = 0; j <= db; ++j)
      if (bc[j] != 0) rem[k + j] -= q[k] * bc[j];
  }
  for (std::size_t i = 0; i < db; ++i)
    if (rem[i] != 0) return std::nullopt;
  return IntPoly(std::move(q));
}

namespace {

// Pseudo-remainder of a by b, reduced to its primitive part.
IntPoly primitive_prem(IntPoly a, const IntPoly& b) {
  std::vector<Integer> r = a.coeffs();
  const auto& bc = b.coeffs();
  const std::size_t db = bc.size() - 1;
  const Integer& lb = b.leading();
  while (r.size() > db && !r.empty()) {
    Integer lr = r.back();
    Integer g = gcd(lr, lb);
    Integer sa = lb / g, sb = lr / g;
    const std::size_t shift = r.size() - 1 - db;
    for (auto& x : r) x *= sa;
    for (std::size_t j = 0; j <= db; ++j) r[shift + j] -= sb * bc[j];
    while (!r.empty() && r.back() == 0) r.pop_back();
  }
  return IntPoly(std::move(r)).primitive_part();
}

}  // namespace

IntPoly gcd(const IntPoly& a, const IntPoly& b) {
  if (a.is_zero()) return b.primitive_part();
  if (b.is_zero()) return a.primitive_part();
  IntPoly x = a.primitive_part(), y = b.primitive_part();
  if (x.degree() < y.degree()) std::swap(x, y);
  while (!y.is_zero()) {
    IntPoly r = primitive_prem(x, y);
    x = std::move(y);
    y = std::move(r);
  }
  return x;
}

IntPoly pow(const IntPoly& a, unsigned e) {
  IntPoly r = IntPoly::constant(1);
  for (unsigned i = 0; i < e; ++i) r = r * a;
  return r;
}

std::string to_string(const IntPoly& f, const std::string& var) {
  if (f.is_zero()) return "0";
  std::ostringstream out;
  bool first = true;
  for (std::size_t k = f.coeffs().size(); k-- > 0;) {
    Integer c = f.coeffs()[k];
    if (c == 0) continue;
    if (first) {
      if (c < 0) out << "-";
    } else {
      out << (c < 0 ? " - " : " + ");
    }
    c = abs(c);
    if (k == 0 || c != 1) {
      out << c;
      if (k > 0) out << "*";
    }
    if (k >= 1) out << var;
    if (k >= 2) out << "^" << k;
    first = false;
  }
  return out.str();
}

IntMatrix to_matrix(const IntPoly& f) {
  IntMatrix m(f.is_zero() ? 0 : 1, f.coeffs().size());
  for (std::size_t i = 0; i < f.coeffs().size(); ++i) m(0, i) = f.coeffs()[i];
  return m;
}

IntPoly poly_from_matrix(const IntMatrix& m) {
  if (m.rows() == 0) return IntPoly();
  if (m.rows() != 1) throw std::invalid_argument("polynomial matrix must have one row");
  return IntPoly(m.row_vector(0));
}

IntPoly charpoly_int(const IntMatrix& m) {
  if (!m.is_square()) throw std::invalid_argument("charpoly of a non-square matrix");
  const std::size_t n = m.rows();
  // Each coefficient is a sum of at most C(n,k) principal minors, each bounded
  // by the product of the k largest row norms.
  Integer bound = 1;
  bound <<= static_cast<mp_bitcnt_t>(n);
  for (std::size_t i = 0; i < n; ++i) {
    Integer s = 0;
    for (const auto& x : m.row(i)) s += x * x;
    Integer r = sqrt(s) + 1;
    bound *= r;
  }
  Integer need = 2 * bound + 1;
  modp::CrtAccumulator acc(n + 1);
  for (std::size_t k = 0; acc.modulus() < need; ++k) {
    u64 p = modp::word_prime(k);
    acc.add(modp::charpoly(modp::ModMatrix::from(m, p)), p);
  }
  return IntPoly(acc.symmetric());
}

// ---- F_p[x] ----

void FpPoly::trim() {
  while (!c.empty() && c.back() == 0) c.pop_back();
}

FpPoly::FpPoly(u64 prime, std::vector<u64> coeffs) : p(prime), c(std::move(coeffs)) {
  for (auto& x : c) x %= p;
  trim();
}

FpPoly FpPoly::from(const IntPoly& f, u64 prime) {
  std::vector<u64> c;
  c.reserve(f.coeffs().size());
  for (const auto& x : f.coeffs()) c.push_back(modp::reduce(x, prime));
  return FpPoly(prime, std::move(c));
}

FpPoly operator+(const FpPoly& a, const FpPoly& b) {
  FpPoly r;
  r.p = a.p;
  r.c.assign(std::max(a.c.size(), b.c.size()), 0);
  for (std::size_t i = 0; i < r.c.size(); ++i)
    r.c[i] = modp::add(i < a.c.size() ? a.c[i] : 0, i < b.c.size() ? b.c[i] : 0, a.p);
  r.trim();
  return r;
}

FpPoly operator-(const FpPoly& a, const FpPoly& b) {
  FpPoly r;
  r.p = a.p;
  r.c.assign(std::max(a.c.size(), b.c.size()), 0);
  for (std::size_t i = 0; i < r.c.size(); ++i)
    r.c[i] = modp::sub(i < a.c.size() ? a.c[i] : 0, i < b.c.size() ? b.c[i] : 0, a.p);
  r.trim();
  return r;
}

FpPoly operator*(const FpPoly& a, const FpPoly& b) {
  FpPoly r;
  r.p = a.p;
  if (a.is_zero() || b.is_zero()) return r;
  r.c.assign(a.c.size() + b.c.size() - 1, 0);
  for (std::size_t i = 0; i < a.c.size(); ++i) {
    if (a.c[i] == 0) continue;
    for (std::size_t j = 0; j < b.c.size(); ++j)
      r.c[i + j] = modp::add(r.c[i + j], modp::mul(a.c[i], b.c[j], a.p), a.p);
  }
  r.trim();
  return r;
}

FpPoly monic(const FpPoly& a) {
  if (a.is_zero()) return a;
  u64 li = modp::inv(a.leading(), a.p);
  FpPoly r = a;
  for (auto& x : r.c) x = modp::mul(x, li, a.p);
  return r;
}

std::pair<FpPoly, FpPoly> divrem(const FpPoly& a, const FpPoly& b) {
  if (b.is_zero()) throw std::invalid_argument("division by the zero polynomial");
  const u64 p = a.p;
  FpPoly q(p, {}), r = a;
  if (a.degree() < b.degree()) return {q, r};
  const std::size_t db = b.c.size() - 1;
  u64 li = modp::inv(b.leading(), p);
  q.c.assign(a.c.size() - db, 0);
  for (std::size_t k = q.c.size(); k-- > 0;) {
    u64 t = modp::mul(r.c[k + db], li, p);
    q.c[k] = t;
    if (t == 0) continue;
    for (std::size_t j = 0; j <= db; ++j) r.c[k + j] = modp::sub(r.c[k + j], modp::mul(t, b.c[j], p), p);
  }
  q.trim();
  r.trim();
  return {q, r};
}

FpPoly gcd(const FpPoly& a, const FpPoly& b) {
  FpPoly x = a, y = b;
  while (!y.is_zero()) {
    FpPoly r = divrem(x, y).second;
    x = std::move(y);
    y = std::move(r);
  }
  return monic(x);
}

FpPoly powmod(const FpPoly& base, const Integer& e, const FpPoly& mod) {
  FpPoly result = divrem(FpPoly::constant(mod.p, 1), mod).second;
  FpPoly b = divrem(base, mod).second;
  const std::size_t bits = e == 0 ? 0 : mpz_sizeinbase(e.get_mpz_t(), 2);
  for (std::size_t i = bits; i-- > 0;) {
    result = divrem(result * result, mod).second;
    if (mpz_tstbit(e.get_mpz_t(), i)) result = divrem(result * b, mod).second;
  }
  return result;
}

FpPoly derivative(const FpPoly& a) {
  std::vector<u64> d;
  for (std::size_t i = 1; i < a.c.size(); ++i) d.push_back(modp::mul(a.c[i], i % a.p, a.p));
  return FpPoly(a.p, std::move(d));
}

namespace {

bool fp_less(const FpPoly& a, const FpPoly& b) {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  return std::lexicographical_compare(a.c.rbegin(), a.c.rend(), b.c.rbegin(), b.c.rend());
}

// f = prod g_i^i with g_i squarefree, f monic.
std::vector<std::pair<FpPoly, int>> squarefree_fp(const FpPoly& f) {
  std::vector<std::pair<FpPoly, int>> out;
  const u64 p = f.p;
  FpPoly one = FpPoly::constant(p, 1);
  FpPoly c = gcd(f, derivative(f));
  FpPoly w = divrem(f, c).first;
  int i = 1;
  while (w.degree() > 0) {
    FpPoly y = gcd(w, c);
    FpPoly fac = divrem(w, y).first;
    if (fac.degree() > 0) out.emplace_back(monic(fac), i);
    w = y;
    c = divrem(c, y).first;
    ++i;
  }
  if (c.degree() > 0) {
    // c is a p-th power; over F_p its root just drops exponents.
    std::vector<u64> root;
    for (std::size_t k = 0; k < c.c.size(); k += p) root.push_back(c.c[k]);
    for (auto& [g, m] : squarefree_fp(monic(FpPoly(p, root)))) out.emplace_back(g, m * static_cast<int>(p));
  }
  return out;
}

// (product of all irreducible factors of degree d, d) for squarefree monic f.
std::vector<std::pair<FpPoly, int>> distinct_degree(FpPoly f) {
  std::vector<std::pair<FpPoly, int>> out;
  const u64 p = f.p;
  const FpPoly x = FpPoly::x(p);
  FpPoly h = divrem(x, f).second;
  for (int d = 1; 2 * d <= f.degree(); ++d) {
    h = powmod(h, Integer(static_cast<unsigned long>(p)), f);
    FpPoly g = gcd(h - x, f);
    if (g.degree() > 0) {
      out.emplace_back(g, d);
      f = divrem(f, g).first;
      h = divrem(h, f).second;
    }
  }
  if (f.degree() > 0) out.emplace_back(f, f.degree());
  return out;
}

std::uint64_t seed_of(const FpPoly& f) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 1099511628211ULL;
    }
  };
  mix(f.p);
  for (auto v : f.c) mix(v);
  return h;
}

void equal_degree(const FpPoly& f, int d, std::mt19937_64& rng, std::vector<FpPoly>& out) {
  const int n = f.degree();
  if (n == d) {
    out.push_back(f);
    return;
  }
  const u64 p = f.p;
  Integer e;
  if (p != 2) {
    Integer q;
    mpz_ui_pow_ui(q.get_mpz_t(), p, static_cast<unsigned long>(d));
    e = (q - 1) / 2;
  }
  std::uniform_int_distribution<u64> coef(0, p - 1);
  while (true) {
    std::vector<u64> a(static_cast<std::size_t>(n));
    for (auto& v : a) v = coef(rng);
    FpPoly r(p, a);
    if (r.degree() < 1) continue;
    FpPoly b;
    if (p == 2) {
      // absolute trace to F_2
      FpPoly t = r;
      b = r;
      for (int i = 1; i < d; ++i) {
        t = divrem(t * t, f).second;
        b = b + t;
      }
    } else {
      b = powmod(r, e, f) - FpPoly::constant(p, 1);
    }
    FpPoly g = gcd(b, f);
    if (g.degree() > 0 && g.degree() < n) {
      equal_degree(g, d, rng, out);
      equal_degree(divrem(f, g).first, d, rng, out);
      return;
    }
  }
}

}  // namespace

std::vector<FpFactor> factor_fp(const FpPoly& f) {
  if (f.is_zero()) throw std::invalid_argument("factor_fp: zero polynomial");
  std::vector<FpFactor> out;
  if (f.degree() == 0) return out;
  std::mt19937_64 rng(seed_of(f));
  for (auto& [sq, mult] : squarefree_fp(monic(f))) {
    for (auto& [part, d] : distinct_degree(sq)) {
      std::vector<FpPoly> irr;
      equal_degree(part, d, rng, irr);
      for (auto& g : irr) out.push_back({g, mult});
    }
  }
  std::sort(out.begin(), out.end(), [](const FpFactor& a, const FpFactor& b) {
    if (a.factor == b.factor) return a.multiplicity < b.multiplicity;
    return fp_less(a.factor, b.factor);
  });
  return out;
}

// ---- factorization over Q ----

namespace {

void reduce_sym(IntPoly& f, const Integer& m) {
  std::vector<Integer> c = f.coeffs();
  Integer half = m / 2;
  for (auto& x : c) {
    mpz_fdiv_r(x.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
    if (x > half) x -= m;
  }
  f = IntPoly(std::move(c));
}

// Division by a monic polynomial, coefficients reduced mod m.
std::pair<IntPoly, IntPoly> divrem_monic(const IntPoly& a, const IntPoly& b, const Integer& m) {
  if (a.degree() < b.degree()) return {IntPoly(), a};
  std::vector<Integer> r = a.coeffs();
  const auto& bc = b.coeffs();
  const std::size_t db = bc.size() - 1;
  std::vector<Integer> q(r.size() - db);
  for (std::size_t k = q.size(); k-- > 0;) {
    Integer t = r[k + db];
    mpz_fdiv_r(t.get_mpz_t(), t.get_mpz_t(), m.get_mpz_t());
    q[k] = t;
    if (t == 0) continue;
    for (std::size_t j = 0; j <= db; ++j) r[k + j] -= t * bc[j];
  }
  r.resize(db);
  IntPoly qq(std::move(q)), rr(std::move(r));
  reduce_sym(qq, m);
  reduce_sym(rr, m);
  return {qq, rr};
}

IntPoly to_int(const FpPoly& f) {
  std::vector<Integer> c;
  for (auto v : f.c) c.emplace_back(static_cast<unsigned long>(v));
  return IntPoly(std::move(c));
}

// s*a + t*b = 1 over F_p.
std::pair<FpPoly, FpPoly> bezout(const FpPoly& a, const FpPoly& b) {
  const u64 p = a.p;
  FpPoly r0 = a, r1 = b;
  FpPoly s0 = FpPoly::constant(p, 1), s1(p, {});
  FpPoly t0(p, {}), t1 = FpPoly::constant(p, 1);
  while (!r1.is_zero()) {
    auto [q, r] = divrem(r0, r1);
    FpPoly s2 = s0 - q * s1, t2 = t0 - q * t1;
    r0 = std::move(r1);
    r1 = std::move(r);
    s0 = std::move(s1);
    s1 = std::move(s2);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (r0.degree() != 0) throw std::logic_error("bezout: factors not coprime mod p");
  u64 li = modp::inv(r0.leading(), p);
  FpPoly k = FpPoly::constant(p, li);
  return {s0 * k, t0 * k};
}

// Lift f = g*h (h monic) from mod p to mod p^(2^j) >= target; returns (g, h, modulus).
struct Lifted {
  IntPoly g, h;
  Integer modulus;
};

Lifted hensel_pair(const IntPoly& f, const FpPoly& gp, const FpPoly& hp, const Integer& target) {
  auto [sp, tp] = bezout(gp, hp);
  IntPoly g = to_int(gp), h = to_int(hp), s = to_int(sp), t = to_int(tp);
  Integer m = static_cast<unsigned long>(gp.p);
  while (m < target) {
    Integer m2 = m * m;
    IntPoly e = f - g * h;
    reduce_sym(e, m2);
    auto [q, r] = divrem_monic(s * e, h, m2);
    IntPoly g2 = g + t * e + q * g;
    IntPoly h2 = h + r;
    reduce_sym(g2, m2);
    reduce_sym(h2, m2);
    IntPoly b = s * g2 + t * h2 - IntPoly::constant(1);
    reduce_sym(b, m2);
    auto [c, d] = divrem_monic(s * b, h2, m2);
    IntPoly s2 = s - d;
    IntPoly t2 = t - t * b - c * g2;
    reduce_sym(s2, m2);
    reduce_sym(t2, m2);
    g = std::move(g2);
    h = std::move(h2);
    s = std::move(s2);
    t = std::move(t2);
    m = m2;
  }
  return {g, h, m};
}

// Monic factors u_i (at least two) of f mod p lifted to a modulus >= target.
std::pair<std::vector<IntPoly>, Integer> hensel_lift(const IntPoly& f, const std::vector<FpPoly>& u,
                                                     const Integer& target) {
  const u64 p = u.front().p;
  std::vector<IntPoly> lifted;
  IntPoly rest = f;
  Integer modulus;
  FpPoly lc = FpPoly::constant(p, modp::reduce(f.leading(), p));
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    FpPoly others = lc;
    for (std::size_t j = i + 1; j < u.size(); ++j) others = others * u[j];
    Lifted l = hensel_pair(rest, others, u[i], target);
    lifted.push_back(l.h);
    rest = l.g;
    modulus = l.modulus;
  }
  // last factor: rest / lc mod modulus
  Integer li;
  mpz_invert(li.get_mpz_t(), f.leading().get_mpz_t(), modulus.get_mpz_t());
  IntPoly last = li * rest;
  reduce_sym(last, modulus);
  lifted.push_back(last);
  return {lifted, modulus};
}

// f primitive, squarefree, deg >= 2, f(0) != 0.
std::vector<IntPoly> factor_squarefree(const IntPoly& f) {
  const Integer lc = f.leading();
  // Among the first few primes where f stays squarefree, use the one with the
  // fewest modular factors to keep recombination small.
  std::vector<FpFactor> best;
  u64 best_p = 0;
  int good_seen = 0;
  for (u64 p = 3; good_seen < 5; p += 2) {
    if (!modp::is_prime(p)) continue;
    if (modp::reduce(lc, p) == 0) continue;
    FpPoly fp = FpPoly::from(f, p);
    if (gcd(fp, derivative(fp)).degree() != 0) continue;
    ++good_seen;
    auto facs = factor_fp(fp);
    if (best_p == 0 || facs.size() < best.size()) {
      best = std::move(facs);
      best_p = p;
    }
    if (best.size() == 1) break;
  }
  if (best.size() == 1) return {f};

  Integer norm2 = 0;
  for (const auto& x : f.coeffs()) norm2 += x * x;
  Integer bound = abs(lc) * (sqrt(norm2) + 1);
  bound <<= static_cast<mp_bitcnt_t>(f.degree());
  std::vector<FpPoly> u;
  for (auto& fac : best) u.push_back(fac.factor);
  auto [lifted, modulus] = hensel_lift(f, u, 2 * bound + 1);

  std::vector<IntPoly> found;
  IntPoly rest = f;
  std::vector<IntPoly> pool = lifted;
  std::size_t s = 1;
  while (2 * s <= pool.size()) {
    bool hit = false;
    std::vector<std::size_t> idx(s);
    for (std::size_t i = 0; i < s; ++i) idx[i] = i;
    const Integer l = rest.leading();
    const Integer target_const = l * rest.coeff(0);
    while (true) {
      Integer c0 = l;
      for (auto i : idx) c0 = c0 * pool[i].coeff(0) % modulus;
      mpz_fdiv_r(c0.get_mpz_t(), c0.get_mpz_t(), modulus.get_mpz_t());
      if (c0 > modulus / 2) c0 -= modulus;
      if (c0 != 0 && mpz_divisible_p(target_const.get_mpz_t(), c0.get_mpz_t())) {
        IntPoly g = IntPoly::constant(l);
        for (auto i : idx) {
          g = g * pool[i];
          reduce_sym(g, modulus);
        }
        IntPoly cand = g.primitive_part();
        if (auto q = divide_exact(rest, cand)) {
          found.push_back(cand);
          rest = *q;
          std::vector<IntPoly> keep;
          for (std::size_t i = 0, k = 0; i < pool.size(); ++i) {
            if (k < s && idx[k] == i) {
              ++k;
              continue;
            }
            keep.push_back(pool[i]);
          }
          pool = std::move(keep);
          hit = true;
          break;
        }
      }
      // next combination
      std::size_t k = s;
      while (k > 0 && idx[k - 1] == pool.size() - s + k - 1) --k;
      if (k == 0) break;
      ++idx[k - 1];
      for (std::size_t j = k; j < s; ++j) idx[j] = idx[j - 1] + 1;
    }
    if (!hit) ++s;
  }
  if (rest.degree() > 0) found.push_back(rest.primitive_part());
  return found;
}

bool int_less(const IntPoly& a, const IntPoly& b) {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  return std::lexicographical_compare(a.coeffs().rbegin(), a.coeffs().rend(), b.coeffs().rbegin(),
                                      b.coeffs().rend());
}

}  // namespace

std::vector<IntFactor> factor_q(const IntPoly& f) {
  if (f.is_zero()) throw std::invalid_argument("factor_q: zero polynomial");
  std::vector<IntFactor> out;
  IntPoly g = f.primitive_part();
  // powers of x
  int xs = 0;
  while (g.degree() > 0 && g.coeff(0) == 0) {
    g = *divide_exact(g, IntPoly::x());
    ++xs;
  }
  if (xs > 0) out.push_back({IntPoly::x(), xs});
  if (g.degree() > 0) {
    // g = prod s_i^i
    IntPoly c = gcd(g, g.derivative());
    IntPoly w = *divide_exact(g, c);
    int i = 1;
    while (w.degree() > 0) {
      IntPoly y = gcd(w, c);
      IntPoly s = *divide_exact(w, y);
      if (s.degree() > 0) {
        if (s.degree() == 1) {
          out.push_back({s, i});
        } else {
          for (auto& h : factor_squarefree(s)) out.push_back({h, i});
        }
      }
      c = *divide_exact(c, y);
      w = y;
      ++i;
    }
  }
  std::sort(out.begin(), out.end(), [](const IntFactor& a, const IntFactor& b) {
    if (a.factor == b.factor) return a.multiplicity < b.multiplicity;
    return int_less(a.factor, b.factor);
  });
  return out;
}

// ---- CRT idempotents ----

namespace {

using RatPoly = std::vector<Rational>;

void trim(RatPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

RatPoly to_rat(const IntPoly& f) {
  RatPoly r;
  for (const auto& x : f.coeffs()) r.emplace_back(x);
  return r;
}

RatPoly mul(const RatPoly& a, const RatPoly& b) {
  if (a.empty() || b.empty()) return {};
  RatPoly r(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  }
  trim(r);
  return r;
}

RatPoly sub(const RatPoly& a, const RatPoly& b) {
  RatPoly r(std::max(a.size(), b.size()));
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] = (i < a.size() ? a[i] : Rational(0)) - (i < b.size() ? b[i] : Rational(0));
  trim(r);
  return r;
}

std::pair<RatPoly, RatPoly> divrem(RatPoly a, const RatPoly& b) {
  if (a.size() < b.size()) return {{}, a};
  const std::size_t db = b.size() - 1;
  RatPoly q(a.size() - db);
  for (std::size_t k = q.size(); k-- > 0;) {
    q[k] = a[k + db] / b.back();
    if (q[k] == 0) continue;
    for (std::size_t j = 0; j <= db; ++j) a[k + j] -= q[k] * b[j];
  }
  a.resize(db);
  trim(a);
  trim(q);
  return {q, a};
}

}  // namespace

ScaledPoly crt_split(const IntPoly& g1, const IntPoly& g2) {
  if (g1.is_zero() || g2.is_zero()) throw std::invalid_argument("crt_split: zero modulus");
  if (g1.degree() == 0) return {IntPoly(), 1};
  // t with t*g2 = 1 mod g1, by the extended Euclidean algorithm over Q.
  RatPoly r0 = to_rat(g1), r1 = divrem(to_rat(g2), to_rat(g1)).second;
  RatPoly t0, t1{Rational(1)};
  while (!r1.empty()) {
    auto [q, r] = divrem(r0, r1);
    RatPoly t2 = sub(t0, mul(q, t1));
    r0 = std::move(r1);
    r1 = std::move(r);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (r0.size() != 1) throw std::invalid_argument("crt_split: moduli are not coprime");
  for (auto& x : t0) x /= r0[0];
  RatPoly h = mul(t0, to_rat(g2));
  Integer den = 1;
  for (const auto& x : h) den = lcm(den, x.get_den());
  std::vector<Integer> num;
  for (const auto& x : h) num.push_back(x.get_num() * (den / x.get_den()));
  return {IntPoly(std::move(num)), den};
}

}  // namespace maninforge

#include "maninforge/modsym.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace maninforge {
namespace {

long long mod(long long a, long long n) {
  long long r = a % n;
  return r < 0 ? r + n : r;
}

// x*a + y*b = g = gcd(a, b) >= 0
long long egcd(long long a, long long b, long long& x, long long& y) {
  long long x0 = 1, y0 = 0, x1 = 0, y1 = 1;
  while (b != 0) {
    long long q = a / b;
    std::tie(a, b) = std::make_pair(b, a - q * b);
    std::tie(x0, x1) = std::make_pair(x1, x0 - q * x1);
    std::tie(y0, y1) = std::make_pair(y1, y0 - q * y1);
  }
  if (a < 0) {
    a = -a;
    x0 = -x0;
    y0 = -y0;
  }
  x = x0;
  y = y0;
  return a;
}

long long inverse_mod(long long a, long long n) {
  long long x, y;
  if (egcd(mod(a, n), n, x, y) != 1) throw std::domain_error("not invertible");
  return mod(x, n);
}

std::vector<long> units_mod(long n) {
  std::vector<long> u;
  for (long x = 1; x <= n; ++x)
    if (std::gcd(x, n) == 1) u.push_back(x % n);
  return u;
}

long totient(long n) {
  long r = n;
  for (long p : prime_divisors(n)) r = r / p * (p - 1);
  return r;
}

// y += a * x on sorted sparse vectors
SparseVec axpy(const SparseVec& y, const Integer& a, const SparseVec& x) {
  SparseVec out;
  out.reserve(y.size() + x.size());
  std::size_t i = 0, j = 0;
  while (i < y.size() || j < x.size()) {
    if (j == x.size() || (i < y.size() && y[i].first < x[j].first)) {
      out.push_back(y[i++]);
    } else if (i == y.size() || x[j].first < y[i].first) {
      out.emplace_back(x[j].first, a * x[j].second);
      ++j;
    } else {
      Integer v = y[i].second + a * x[j].second;
      if (v != 0) out.emplace_back(y[i].first, std::move(v));
      ++i;
      ++j;
    }
  }
  return out;
}

const Integer* find_coeff(const SparseVec& v, std::uint32_t col) {
  auto it = std::lower_bound(v.begin(), v.end(), col, [](const auto& e, std::uint32_t c) { return e.first < c; });
  return it != v.end() && it->first == col ? &it->second : nullptr;
}

// Eliminates unit pivots from sparse relations; each eliminated generator is
// kept as an expression in the generators that remain free.
class UnitEliminator {
 public:
  explicit UnitEliminator(std::size_t ngens) : expr_(ngens), eliminated_(ngens, false), users_(ngens) {}

  SparseVec substitute(const SparseVec& r) const {
    SparseVec out;
    for (const auto& [c, a] : r) {
      if (eliminated_[c]) {
        out = axpy(out, a, expr_[c]);
      } else {
        out = axpy(out, a, SparseVec{{c, Integer(1)}});
      }
    }
    return out;
  }

  void add_relation(const SparseVec& rel) {
    SparseVec r = substitute(rel);
    if (r.empty()) return;
    std::size_t best = r.size();
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (abs(r[k].second) != 1) continue;
      if (best == r.size() || users_[r[k].first].size() < users_[r[best].first].size()) best = k;
    }
    if (best == r.size()) {
      residual_.push_back(std::move(r));
      return;
    }
    const std::uint32_t c = r[best].first;
    Integer s = -r[best].second;  // x_c = s * (rest), since coefficient is +-1
    SparseVec e;
    for (const auto& [col, a] : r)
      if (col != c) e.emplace_back(col, s * a);
    for (auto u : users_[c]) {
      const Integer* a = find_coeff(expr_[u], c);
      if (!a) continue;
      Integer coef = *a;
      expr_[u] = axpy(axpy(expr_[u], -coef, SparseVec{{c, Integer(1)}}), coef, e);
      for (const auto& [col, v] : e) users_[col].push_back(u);
    }
    users_[c].clear();
    for (const auto& [col, v] : e) users_[col].push_back(c);
    expr_[c] = std::move(e);
    eliminated_[c] = true;
  }

  bool eliminated(std::size_t c) const { return eliminated_[c]; }
  std::vector<SparseVec> residual() const {
    std::vector<SparseVec> out;
    for (const auto& r : residual_) {
      SparseVec s = substitute(r);
      if (!s.empty()) out.push_back(std::move(s));
    }
    return out;
  }

 private:
  std::vector<SparseVec> expr_;
  std::vector<bool> eliminated_;
  std::vector<std::vector<std::uint32_t>> users_;
  std::vector<SparseVec> residual_;
};

bool cusps_equivalent(const Cusp& x, const Cusp& y, long n) {
  auto s_of = [](const Cusp& z) -> long long {
    if (z.b == 0) return z.a;
    if (z.b == 1) return 0;
    return inverse_mod(z.a, z.b);
  };
  long long s1 = s_of(x), s2 = s_of(y);
  long long g = std::gcd(static_cast<long long>(static_cast<__int128>(x.b) * y.b % n), static_cast<long long>(n));
  if (g == 0) g = n;
  __int128 diff = static_cast<__int128>(s1) * y.b - static_cast<__int128>(s2) * x.b;
  return diff % g == 0;
}

}  // namespace

std::vector<long> prime_divisors(long n) {
  std::vector<long> ps;
  for (long p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    ps.push_back(p);
    while (n % p == 0) n /= p;
  }
  if (n > 1) ps.push_back(n);
  return ps;
}

bool is_squarefree(long n) {
  for (long p : prime_divisors(n))
    if (n % (p * p) == 0) return false;
  return true;
}

long cusp_count_x0(long n) {
  long c = 0;
  for (long d = 1; d <= n; ++d)
    if (n % d == 0) c += totient(std::gcd(d, n / d));
  return c;
}

long genus_x0(long n) {
  long mu = n;
  for (long p : prime_divisors(n)) mu = mu / p * (p + 1);
  long nu2 = 0, nu3 = 0;
  if (n % 4 != 0) {
    nu2 = 1;
    for (long p : prime_divisors(n)) nu2 *= p == 2 ? 1 : (p % 4 == 1 ? 2 : 0);
  }
  if (n % 9 != 0) {
    nu3 = 1;
    for (long p : prime_divisors(n)) nu3 *= p == 3 ? 1 : (p % 3 == 1 ? 2 : 0);
  }
  long twelve_g = 12 + mu - 3 * nu2 - 4 * nu3 - 6 * cusp_count_x0(n);
  return twelve_g / 12;
}

P1Point p1_normalize(long n, long c, long d) {
  c = static_cast<long>(mod(c, n));
  d = static_cast<long>(mod(d, n));
  if (std::gcd(std::gcd(c, d), n) != 1 && n != 1) throw std::invalid_argument("not a point of P^1(Z/n)");
  P1Point best{c, d};
  for (long u : units_mod(n)) {
    P1Point q{static_cast<long>(mod(static_cast<long long>(u) * c, n)),
              static_cast<long>(mod(static_cast<long long>(u) * d, n))};
    if (q < best) best = q;
  }
  return best;
}

P1List::P1List(long n) : n_(n) {
  if (n < 1) throw std::invalid_argument("level must be positive");
  const std::size_t nn = static_cast<std::size_t>(n);
  std::vector<std::uint32_t> canon(nn * nn, 0);  // canonical code + 1
  const auto units = units_mod(n);
  std::vector<std::uint32_t> reps;
  for (long c = 0; c < n; ++c) {
    for (long d = 0; d < n; ++d) {
      const std::size_t code = static_cast<std::size_t>(c) * nn + static_cast<std::size_t>(d);
      if (canon[code] != 0) continue;
      if (n > 1 && std::gcd(std::gcd(c, d), n) != 1) continue;
      std::size_t best = code;
      std::vector<std::size_t> orbit;
      for (long u : units) {
        std::size_t oc = static_cast<std::size_t>(u * c % n), od = static_cast<std::size_t>(u * d % n);
        std::size_t ocode = oc * nn + od;
        orbit.push_back(ocode);
        best = std::min(best, ocode);
      }
      for (auto o : orbit) canon[o] = static_cast<std::uint32_t>(best + 1);
      reps.push_back(static_cast<std::uint32_t>(best));
    }
  }
  std::sort(reps.begin(), reps.end());
  std::vector<std::uint32_t> pos(nn * nn, 0);
  for (std::size_t i = 0; i < reps.size(); ++i) {
    points_.push_back({static_cast<long>(reps[i] / nn), static_cast<long>(reps[i] % nn)});
    pos[reps[i]] = static_cast<std::uint32_t>(i + 1);
  }
  table_.assign(nn * nn, 0);
  for (std::size_t code = 0; code < nn * nn; ++code)
    if (canon[code] != 0) table_[code] = pos[canon[code] - 1];
}

std::size_t P1List::index(long long c, long long d) const {
  const std::size_t nn = static_cast<std::size_t>(n_);
  std::size_t code = static_cast<std::size_t>(mod(c, n_)) * nn + static_cast<std::size_t>(mod(d, n_));
  std::uint32_t v = table_[code];
  return v == 0 ? npos : v - 1;
}

std::vector<P1Point> p1_list(long n) { return P1List(n).points(); }

Mat2 ModSymSpace::lift_to_sl2(std::size_t i) const {
  const long n = level();
  long long c = p1_[i].c, d = p1_[i].d;
  if (c == 0) return {1, 0, 0, 1};
  while (std::gcd(c, d) != 1) d += n;
  long long x, y;
  egcd(d, c, x, y);  // x d + y c = 1
  return {x, -y, c, d};
}

void ModSymSpace::add_symbol(std::vector<Integer>& acc, long long c, long long d, const Integer& coeff) const {
  std::size_t i = p1_.index(c, d);
  if (i == P1List::npos) return;
  for (const auto& [k, a] : symbols_[i]) acc[k] += coeff * a;
}

void ModSymSpace::add_zero_to(std::vector<Integer>& acc, long long p, long long q, const Integer& coeff) const {
  if (q == 0) {
    add_symbol(acc, 0, 1, coeff);
    return;
  }
  long long g = std::gcd(p, q);
  p /= g;
  q /= g;
  if (q < 0) {
    p = -p;
    q = -q;
  }
  // {0, p/q} = {0, oo} + sum_j {p_{j-1}/q_{j-1}, p_j/q_j} over the convergents
  add_symbol(acc, 0, 1, coeff);
  long long pm2 = 0, qm2 = 1, pm1 = 1, qm1 = 0;
  long long a = p, b = q;
  long long sign = -1;  // det of [[p_j, p_{j-1}], [q_j, q_{j-1}]] = (-1)^(j-1)
  while (b != 0) {
    long long t = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --t;  // floor
    long long r = a - t * b;
    long long pj = t * pm1 + pm2, qj = t * qm1 + qm2;
    add_symbol(acc, sign * qj, qm1, coeff);
    pm2 = pm1;
    qm2 = qm1;
    pm1 = pj;
    qm1 = qj;
    a = b;
    b = r;
    sign = -sign;
  }
}

void ModSymSpace::add_image(std::vector<Integer>& acc, const Mat2& g, const Integer& coeff) const {
  // {g(0), g(oo)} = {b/d, a/c} = {0, a/c} - {0, b/d}
  add_zero_to(acc, g[0], g[2], coeff);
  add_zero_to(acc, g[1], g[3], -coeff);
}

std::size_t ModSymSpace::cusp_class(long long a, long long b) {
  Cusp z;
  if (b == 0) {
    z = {1, 0};
  } else {
    long long g = std::gcd(a, b);
    a /= g;
    b /= g;
    if (b < 0) {
      a = -a;
      b = -b;
    }
    z = {a, b};
  }
  for (std::size_t k = 0; k < cusps_.size(); ++k)
    if (cusps_equivalent(cusps_[k], z, level())) return k;
  cusps_.push_back(z);
  return cusps_.size() - 1;
}

ModSymSpace ModSymSpace::build(long n) {
  ModSymSpace s;
  s.p1_ = P1List(n);
  const P1List& p1 = s.p1_;
  const std::size_t N = p1.size();

  // Two-term relations x + x sigma = 0, sigma: (c:d) -> (d:-c).
  constexpr std::uint32_t none = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> gen(N, none);
  std::vector<int> sign(N, 0);
  std::vector<std::size_t> rep;  // generator -> P1 index
  for (std::size_t i = 0; i < N; ++i) {
    if (sign[i] != 0 || gen[i] != none) continue;
    std::size_t j = p1.index(p1[i].d, -p1[i].c);
    if (j == i) {
      sign[i] = 2;  // 2x = 0: torsion, killed
      continue;
    }
    gen[i] = gen[j] = static_cast<std::uint32_t>(rep.size());
    sign[i] = 1;
    sign[j] = -1;
    rep.push_back(i);
  }
  auto as_gen = [&](std::size_t i) -> SparseVec {
    if (gen[i] == none) return {};
    return {{gen[i], Integer(sign[i])}};
  };

  // Three-term relations x + x tau + x tau^2 = 0, tau: (c:d) -> (d:-c-d).
  std::vector<bool> seen(N, false);
  std::vector<SparseVec> rels;
  for (std::size_t i = 0; i < N; ++i) {
    if (seen[i]) continue;
    std::size_t j = p1.index(p1[i].d, -p1[i].c - p1[i].d);
    std::size_t k = p1.index(p1[j].d, -p1[j].c - p1[j].d);
    seen[i] = seen[j] = seen[k] = true;
    SparseVec r = axpy(axpy(as_gen(i), 1, as_gen(j)), 1, as_gen(k));
    if (!r.empty()) rels.push_back(std::move(r));
  }
  const std::size_t ngens = rep.size();
  s.presentation_ = IntMatrix(rels.size(), ngens);
  for (std::size_t r = 0; r < rels.size(); ++r)
    for (const auto& [c, a] : rels[r]) s.presentation_(r, c) = a;

  UnitEliminator elim(ngens);
  for (const auto& r : rels) elim.add_relation(r);
  std::vector<std::uint32_t> free_pos(ngens, none);
  std::vector<std::size_t> free_gens;
  for (std::size_t g = 0; g < ngens; ++g) {
    if (elim.eliminated(g)) continue;
    free_pos[g] = static_cast<std::uint32_t>(free_gens.size());
    free_gens.push_back(g);
  }
  const std::size_t b = free_gens.size();

  // Remaining relations among free generators: quotient modulo torsion.
  auto residual = elim.residual();
  IntMatrix phi, psi;  // Z^b -> Z^r and a section Z^r -> Z^b
  if (residual.empty()) {
    phi = psi = IntMatrix::identity(b);
  } else {
    IntMatrix rr(residual.size(), b);
    for (std::size_t r = 0; r < residual.size(); ++r)
      for (const auto& [c, a] : residual[r]) rr(r, free_pos[c]) = a;
    IntMatrix v = kernel_basis(rr);
    phi = v.transpose();
    HnfResult h = hnf_with_transform(phi);
    for (std::size_t i = 0; i < v.rows(); ++i)
      for (std::size_t j = 0; j < v.rows(); ++j)
        if (h.hnf(i, j) != (i == j ? 1 : 0)) throw std::logic_error("relation kernel is not saturated");
    psi = h.transform.block(0, 0, v.rows(), b);
  }
  s.rank_ = phi.cols();

  s.symbols_.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    SparseVec over_free = elim.substitute(as_gen(i));
    std::vector<Integer> dense(s.rank_);
    for (const auto& [g, a] : over_free) {
      const std::size_t pcol = free_pos[g];
      for (std::size_t k = 0; k < s.rank_; ++k)
        if (phi(pcol, k) != 0) dense[k] += a * phi(pcol, k);
    }
    for (std::size_t k = 0; k < s.rank_; ++k)
      if (dense[k] != 0) s.symbols_[i].emplace_back(static_cast<std::uint32_t>(k), dense[k]);
  }
  s.lifts_.resize(s.rank_);
  for (std::size_t k = 0; k < s.rank_; ++k)
    for (std::size_t j = 0; j < b; ++j)
      if (psi(k, j) != 0) s.lifts_[k].emplace_back(rep[free_gens[j]], psi(k, j));

  // Boundary {b/d, a/c} -> [a/c] - [b/d].
  std::vector<std::pair<std::size_t, std::size_t>> ends(N);
  for (std::size_t i = 0; i < N; ++i) {
    Mat2 g = s.lift_to_sl2(i);
    ends[i] = {s.cusp_class(g[0], g[2]), s.cusp_class(g[1], g[3])};
  }
  s.boundary_ = IntMatrix(s.rank_, s.cusps_.size());
  for (std::size_t k = 0; k < s.rank_; ++k)
    for (const auto& [i, a] : s.lifts_[k]) {
      s.boundary_(k, ends[i].first) += a;
      s.boundary_(k, ends[i].second) -= a;
    }
  s.cuspidal_ = IntLattice::span(left_kernel_basis(s.boundary_));

  if (static_cast<long>(s.cusps_.size()) != cusp_count_x0(n))
    throw std::logic_error("cusp count disagrees with the cusp formula");
  if (static_cast<long>(s.cuspidal_.rank()) != 2 * genus_x0(n))
    throw std::logic_error("cuspidal rank disagrees with the genus formula");
  if (s.rank_ - s.cuspidal_.rank() != s.cusps_.size() - 1)
    throw std::logic_error("boundary image has unexpected rank");
  return s;
}

}  // namespace maninforge

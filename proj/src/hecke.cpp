#include "maninforge/hecke.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace maninforge {
namespace {

using modp::ModMatrix;
using modp::u64;

bool is_prime_long(long p) {
  if (p < 2) return false;
  for (long q = 2; q * q <= p; ++q)
    if (p % q == 0) return false;
  return true;
}

int ord(long n, long p) {
  int e = 0;
  while (n % p == 0) {
    n /= p;
    ++e;
  }
  return e;
}

std::size_t rank_mod(const IntMatrix& m) {
  if (m.rows() == 0) return 0;
  return modp::rref(ModMatrix::from(m, modp::word_prime(0))).rank;
}

// x * K = w over Q, K of full row rank.
std::optional<RatVector> solve_left(const RatMatrix& k, const RatVector& w) {
  const std::size_t d = k.rows(), m = k.cols();
  // augmented system K^T x^T = w^T
  RatMatrix a(m, d + 1);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < d; ++j) a(i, j) = k(j, i);
    a(i, d) = w[i];
  }
  std::vector<std::size_t> piv;
  std::size_t row = 0;
  for (std::size_t c = 0; c < d && row < m; ++c) {
    std::size_t r = row;
    while (r < m && a(r, c) == 0) ++r;
    if (r == m) continue;
    a.swap_rows(r, row);
    Rational inv = 1 / a(row, c);
    for (std::size_t j = c; j <= d; ++j) a(row, j) *= inv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == row || a(i, c) == 0) continue;
      Rational f = a(i, c);
      for (std::size_t j = c; j <= d; ++j) a(i, j) -= f * a(row, j);
    }
    piv.push_back(c);
    ++row;
  }
  for (std::size_t i = row; i < m; ++i)
    if (a(i, d) != 0) return std::nullopt;
  if (piv.size() != d) return std::nullopt;
  RatVector x(d);
  for (std::size_t i = 0; i < d; ++i) x[piv[i]] = a(i, d);
  return x;
}

RatVector rat_row_times(std::span<const Rational> v, const IntMatrix& m) {
  RatVector out(m.cols());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0) continue;
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0) out[j] += v[i] * m(i, j);
  }
  return out;
}

// Horner evaluation of f at the element with multiplication matrix mt.
IntVector eval_in_coords(const IntPoly& f, const IntMatrix& mt, const IntVector& one) {
  IntVector acc(one.size());
  for (int k = f.degree(); k >= 0; --k) {
    acc = row_times(acc, mt);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += f.coeffs()[k] * one[i];
  }
  return acc;
}

// Reversed-coefficient comparison, used only to order classes.
bool poly_less(const IntPoly& a, const IntPoly& b) {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  for (int k = a.degree(); k >= 0; --k)
    if (a.coeffs()[k] != b.coeffs()[k]) return a.coeffs()[k] < b.coeffs()[k];
  return false;
}

std::vector<u64> reduce_vec(std::span<const Integer> v, u64 p) {
  std::vector<u64> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = modp::reduce(v[i], p);
  return out;
}

// Arithmetic in ring / p ring.
struct ModRing {
  u64 p;
  std::vector<ModMatrix> mult;
  std::vector<u64> one;

  ModRing(const FiniteAlgebra& ring, u64 prime) : p(prime), one(reduce_vec(ring.one, prime)) {
    for (const auto& m : ring.mult) mult.push_back(ModMatrix::from(m, prime));
  }
  std::size_t rank() const { return one.size(); }

  ModMatrix mul_matrix(const std::vector<u64>& y) const {
    const std::size_t r = rank();
    ModMatrix out(r, r, p);
    for (std::size_t i = 0; i < r; ++i) {
      if (y[i] == 0) continue;
      for (std::size_t k = 0; k < r * r; ++k) out.a[k] = modp::add(out.a[k], modp::mul(y[i], mult[i].a[k], p), p);
    }
    return out;
  }
  std::vector<u64> multiply(const std::vector<u64>& x, const std::vector<u64>& y) const {
    const std::size_t r = rank();
    std::vector<u64> out(r, 0);
    for (std::size_t i = 0; i < r; ++i) {
      if (y[i] == 0) continue;
      for (std::size_t j = 0; j < r; ++j) {
        if (x[j] == 0) continue;
        u64 s = modp::mul(x[j], y[i], p);
        for (std::size_t k = 0; k < r; ++k)
          if (mult[i](j, k) != 0) out[k] = modp::add(out[k], modp::mul(s, mult[i](j, k), p), p);
      }
    }
    return out;
  }
  std::vector<u64> power(std::vector<u64> x, u64 e) const {
    std::vector<u64> acc = one;
    while (e > 0) {
      if (e & 1) acc = multiply(acc, x);
      e >>= 1;
      if (e > 0) x = multiply(x, x);
    }
    return acc;
  }
  std::vector<u64> combine(const std::vector<u64>& x, u64 a, const std::vector<u64>& y, u64 b) const {
    std::vector<u64> out(rank());
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = modp::add(modp::mul(a, x[i], p), modp::mul(b, y[i], p), p);
    return out;
  }
};

bool is_zero(const std::vector<u64>& v) {
  return std::all_of(v.begin(), v.end(), [](u64 x) { return x == 0; });
}

ModMatrix stack_rows(const std::vector<std::vector<u64>>& rows, std::size_t cols, u64 p) {
  ModMatrix m(rows.size(), cols, p);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  return m;
}

std::size_t rank_of(const std::vector<std::vector<u64>>& rows, std::size_t cols, u64 p) {
  if (rows.empty()) return 0;
  return modp::rref(stack_rows(rows, cols, p)).rank;
}

IntLattice ideal_lattice(const MaxIdeal& m, std::size_t r) {
  IntMatrix gens(r + m.ideal.rows, r);
  for (std::size_t i = 0; i < r; ++i) gens(i, i) = m.p;
  for (std::size_t i = 0; i < m.ideal.rows; ++i)
    for (std::size_t j = 0; j < r; ++j) gens(r + i, j) = static_cast<unsigned long>(m.ideal(i, j));
  return IntLattice::span(gens);
}

// b_i = sum_j C_ij parts_j where C * a = hc, for integral b_i. C itself has
// denominators of the size of det(a), so the sums are formed mod word primes
// and lifted by CRT once the reconstruction predicts two further primes.
std::vector<IntMatrix> combine_multimodular(const std::vector<const IntMatrix*>& parts, const IntMatrix& a,
                                            const IntMatrix& hc) {
  const std::size_t r = a.rows(), rows = parts.front()->rows(), cols = parts.front()->cols();
  const std::size_t len = rows * cols;
  std::vector<Integer> vals(r * len);
  Integer modulus = 1;
  int stable = 0;
  std::vector<u64> pm(r * len), cm(r * r);
  for (std::size_t idx = 0; stable < 2; ++idx) {
    if (idx > 400) throw std::logic_error("combine_multimodular: no stable reconstruction");
    const u64 p = modp::word_prime(idx);
    ModMatrix aug(r, 2 * r, p);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j) {
        aug(i, j) = modp::reduce(a(j, i), p);
        aug(i, r + j) = modp::reduce(hc(j, i), p);
      }
    auto e = modp::rref(std::move(aug));
    if (e.rank != r) continue;
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j) cm[i * r + j] = e.reduced(j, r + i);  // C_ij
    for (std::size_t j = 0; j < r; ++j) {
      const auto& d = parts[j]->data();
      for (std::size_t k = 0; k < len; ++k) pm[j * len + k] = modp::reduce(d[k], p);
    }
    std::vector<unsigned __int128> acc(len);
    std::vector<u64> res(len);
    bool predicted = modulus != 1;
    u64 minv = modulus == 1 ? 0 : modp::inv(modp::reduce(modulus, p), p);
    for (std::size_t i = 0; i < r; ++i) {
      std::fill(acc.begin(), acc.end(), 0);
      for (std::size_t j = 0; j < r; ++j) {
        const u64 c = cm[i * r + j];
        if (c == 0) continue;
        const u64* row = &pm[j * len];
        for (std::size_t k = 0; k < len; ++k) acc[k] += static_cast<unsigned __int128>(c) * row[k];
        if (j % 8 == 7)
          for (auto& x : acc) x %= p;
      }
      for (std::size_t k = 0; k < len; ++k) res[k] = static_cast<u64>(acc[k] % p);
      Integer* v = &vals[i * len];
      if (modulus == 1) {
        for (std::size_t k = 0; k < len; ++k) {
          v[k] = static_cast<unsigned long>(res[k]);
          if (res[k] > p / 2) v[k] -= static_cast<unsigned long>(p);
        }
        continue;
      }
      for (std::size_t k = 0; k < len; ++k) {
        const u64 cur = modp::reduce(v[k], p);
        if (cur == res[k]) continue;
        predicted = false;
        v[k] += modulus * static_cast<unsigned long>(modp::mul(modp::sub(res[k], cur, p), minv, p));
      }
    }
    const Integer old = modulus;
    modulus *= static_cast<unsigned long>(p);
    if (!predicted && old != 1) {
      // back to the symmetric range
      const Integer half = modulus / 2;
      for (auto& x : vals) {
        if (x > half) x -= modulus;
        else if (x < -half) x += modulus;
      }
    }
    stable = predicted ? stable + 1 : 0;
  }
  std::vector<IntMatrix> out;
  for (std::size_t i = 0; i < r; ++i) {
    IntMatrix b(rows, cols);
    std::move(vals.begin() + static_cast<std::ptrdiff_t>(i * len),
              vals.begin() + static_cast<std::ptrdiff_t>((i + 1) * len), b.data().begin());
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace

long sturm_bound(long n) {
  if (n < 1) throw std::invalid_argument("sturm_bound: n must be positive");
  long mu = n;
  for (long p : prime_divisors(n)) mu = mu / p * (p + 1);
  return (mu + 5) / 6;
}

// ---------------------------------------------------------------- FiniteAlgebra

IntMatrix FiniteAlgebra::mul_matrix(std::span<const Integer> y) const {
  const std::size_t r = rank();
  IntMatrix out(r, r);
  for (std::size_t i = 0; i < r; ++i)
    if (y[i] != 0) out += y[i] * mult[i];
  return out;
}

IntVector FiniteAlgebra::multiply(std::span<const Integer> x, std::span<const Integer> y) const {
  IntVector out(rank());
  for (std::size_t i = 0; i < rank(); ++i) {
    if (y[i] == 0) continue;
    IntVector xi = row_times(x, mult[i]);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += y[i] * xi[k];
  }
  return out;
}

Integer FiniteAlgebra::discriminant() const {
  const std::size_t r = rank();
  IntVector tr(r);
  for (std::size_t k = 0; k < r; ++k)
    for (std::size_t i = 0; i < r; ++i) tr[k] += mult[k](i, i);
  IntMatrix form(r, r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j)
      for (std::size_t k = 0; k < r; ++k) form(i, j) += mult[j](i, k) * tr[k];
  return det(form);
}

// ---------------------------------------------------------------- MatrixOrder

MatrixOrder MatrixOrder::span(const std::vector<IntMatrix>& spanning, std::size_t expected_rank) {
  MatrixOrder o;
  o.size_ = spanning.empty() ? 0 : spanning.front().rows();
  for (const auto& m : spanning)
    if (m.rows() != o.size_ || m.cols() != o.size_) throw std::invalid_argument("MatrixOrder: shape mismatch");
  if (expected_rank == 0) {
    o.projected_ = IntLattice::zero(0);
    return o;
  }
  // grow the probe set until the projection has the expected rank
  std::size_t have = 0;
  for (std::size_t i = 0; i < o.size_ && have < expected_rank; ++i) {
    std::vector<std::size_t> trial = o.probes_;
    trial.push_back(i);
    IntMatrix proj(spanning.size(), trial.size() * o.size_);
    for (std::size_t s = 0; s < spanning.size(); ++s)
      for (std::size_t a = 0; a < trial.size(); ++a)
        for (std::size_t j = 0; j < o.size_; ++j) proj(s, a * o.size_ + j) = spanning[s](trial[a], j);
    std::size_t rk = rank_mod(proj);
    if (rk > have) {
      o.probes_ = trial;
      have = rk;
    }
  }
  if (have != expected_rank)
    throw std::logic_error("MatrixOrder: spanning set has rank " + std::to_string(have) + ", expected " +
                           std::to_string(expected_rank));
  IntMatrix proj(spanning.size(), o.probes_.size() * o.size_);
  for (std::size_t s = 0; s < spanning.size(); ++s) {
    IntVector v = o.project(spanning[s]);
    for (std::size_t j = 0; j < v.size(); ++j) proj(s, j) = v[j];
  }
  o.rebuild(spanning, proj);
  return o;
}

void MatrixOrder::rebuild(const std::vector<IntMatrix>& spanning, const IntMatrix& projections) {
  projected_ = IntLattice::span(projections);
  const std::size_t r = projected_.rank();
  const IntMatrix& h = projected_.basis();
  for (std::size_t attempt = 0; attempt < 8; ++attempt) {
    MinorPivots piv = pivots_mod_prime(projections, attempt);
    if (piv.rows.size() != r) continue;
    IntMatrix a = projections.select_rows(piv.rows).select_cols(piv.cols);
    IntMatrix hc = h.select_cols(piv.cols);
    std::vector<const IntMatrix*> parts;
    for (auto j : piv.rows) parts.push_back(&spanning[j]);
    std::vector<IntMatrix> basis = combine_multimodular(parts, a, hc);
    bool ok = true;
    for (std::size_t i = 0; i < r && ok; ++i) {
      IntVector pb = project(basis[i]);
      ok = std::equal(pb.begin(), pb.end(), h.row(i).begin());
    }
    if (!ok) continue;
    basis_ = std::move(basis);
    structure_.reset();
    return;
  }
  throw std::logic_error("MatrixOrder: could not express the lattice basis through the spanning set");
}

IntVector MatrixOrder::project(const IntMatrix& x) const {
  IntVector out;
  out.reserve(probes_.size() * size_);
  for (auto i : probes_) out.insert(out.end(), x.row(i).begin(), x.row(i).end());
  return out;
}

IntVector MatrixOrder::project_product(const IntMatrix& x, const IntMatrix& y) const {
  IntVector out;
  out.reserve(probes_.size() * size_);
  for (auto i : probes_) {
    IntVector v = row_times(x.row(i), y);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

std::optional<IntVector> MatrixOrder::coordinates(const IntMatrix& x) const {
  if (x.rows() != size_ || x.cols() != size_) return std::nullopt;
  if (rank() == 0) {
    if (x.is_zero()) return IntVector{};
    return std::nullopt;
  }
  auto c = projected_.coordinates(project(x));
  if (!c) return std::nullopt;
  if (!(element(*c) == x)) return std::nullopt;
  return c;
}

RatVector MatrixOrder::rational_coordinates(const IntMatrix& x) const {
  IntVector v = project(x);
  const IntMatrix& h = projected_.basis();
  RatVector w(v.begin(), v.end());
  RatVector c(rank());
  std::size_t pc = 0;
  for (std::size_t i = 0; i < rank(); ++i) {
    while (h(i, pc) == 0) ++pc;
    c[i] = w[pc] / Rational(h(i, pc));
    for (std::size_t j = pc; j < w.size(); ++j)
      if (h(i, j) != 0) w[j] -= c[i] * h(i, j);
  }
  for (const auto& z : w)
    if (z != 0) throw std::logic_error("rational_coordinates: element outside the Q-span");
  return c;
}

IntMatrix MatrixOrder::element(std::span<const Integer> coords) const {
  IntMatrix out(size_, size_);
  for (std::size_t i = 0; i < rank(); ++i)
    if (coords[i] != 0) out += coords[i] * basis_[i];
  return out;
}

RatMatrix MatrixOrder::element(std::span<const Rational> coords) const {
  Integer den = 1;
  for (const auto& c : coords) den = lcm(den, Integer(c.get_den()));
  IntVector num(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) num[i] = coords[i].get_num() * (den / coords[i].get_den());
  IntMatrix n = element(num);
  RatMatrix out(size_, size_);
  for (std::size_t k = 0; k < out.data().size(); ++k) {
    out.data()[k] = Rational(n.data()[k], den);
    out.data()[k].canonicalize();
  }
  return out;
}

IntMatrix MatrixOrder::multiplication(const IntMatrix& y) const {
  const std::size_t r = rank();
  IntMatrix out(r, r);
  for (std::size_t j = 0; j < r; ++j) {
    auto c = projected_.coordinates(project_product(basis_[j], y));
    if (!c) throw std::logic_error("multiplication: product leaves the order");
    for (std::size_t k = 0; k < r; ++k) out(j, k) = (*c)[k];
  }
  return out;
}

void MatrixOrder::close_under(const std::vector<IntMatrix>& gens) {
  if (rank() == 0) return;
  const std::size_t expected = rank();
  for (int round = 0; round < 64; ++round) {
    std::vector<IntMatrix> extra;
    for (const auto& b : basis_)
      for (const auto& g : gens)
        if (!projected_.contains(project_product(b, g))) extra.push_back(b * g);
    for (const auto& g : gens)
      if (!projected_.contains(project(g))) extra.push_back(g);
    if (extra.empty()) return;
    std::vector<IntMatrix> spanning = basis_;
    spanning.insert(spanning.end(), extra.begin(), extra.end());
    IntMatrix proj(spanning.size(), probes_.size() * size_);
    for (std::size_t s = 0; s < spanning.size(); ++s) {
      IntVector v = project(spanning[s]);
      for (std::size_t j = 0; j < v.size(); ++j) proj(s, j) = v[j];
    }
    rebuild(spanning, proj);
    if (rank() != expected) throw std::logic_error("close_under: products left the Q-span");
  }
  throw std::logic_error("close_under: no closure after 64 rounds");
}

const FiniteAlgebra& MatrixOrder::structure() const {
  if (!structure_) {
    FiniteAlgebra a;
    for (const auto& b : basis_) a.mult.push_back(multiplication(b));
    auto one = coordinates(IntMatrix::identity(size_));
    if (!one) throw std::logic_error("structure: identity is not in the order");
    a.one = *one;
    structure_ = std::move(a);
  }
  return *structure_;
}

// ---------------------------------------------------------------- Hecke algebra

HeckeAlgebra build_hecke_algebra(const ModSymSpace& space) {
  HeckeAlgebra t;
  t.level = space.level();
  const std::size_t g2 = space.cuspidal_rank();
  const long bound = sturm_bound(t.level);
  for (long l = 2; l <= bound; ++l)
    if (is_prime_long(l)) t.generators.push_back(hecke(space, l));
  if (g2 == 0) {
    t.order = MatrixOrder::span({}, 0);
    return t;
  }
  std::vector<IntMatrix> spanning;
  for (long m = 1; m <= bound; ++m) spanning.push_back(hecke_merel(space, m).matrix);
  t.order = MatrixOrder::span(spanning, g2 / 2);
  std::vector<IntMatrix>().swap(spanning);  // large at big levels
  std::vector<IntMatrix> gens;
  for (const auto& g : t.generators) gens.push_back(g.matrix);
  t.order.close_under(gens);
  if (!t.contains(IntMatrix::identity(g2))) throw std::logic_error("build_hecke_algebra: identity missing");
  for (const auto& g : gens)
    if (!t.contains(g)) throw std::logic_error("build_hecke_algebra: generator missing");
  return t;
}

IntMatrix restrict_to(const IntLattice& sub, const IntMatrix& op) {
  const IntMatrix& b = sub.basis();
  IntMatrix out(b.rows(), b.rows());
  for (std::size_t i = 0; i < b.rows(); ++i) {
    auto c = sub.coordinates(row_times(b.row(i), op));
    if (!c) throw std::logic_error("restrict_to: operator does not preserve the sublattice");
    for (std::size_t j = 0; j < b.rows(); ++j) out(i, j) = (*c)[j];
  }
  return out;
}

RatMatrix NewformClass::complement() const {
  RatMatrix out = -idempotent;
  for (std::size_t i = 0; i < out.rows(); ++i) out(i, i) += 1;
  return out;
}

namespace {

// Candidate separating elements as coefficient vectors over `order` (U_l first):
// single generators, then G_0 + sum c_i G_i over growing shells on the first few
// generators, then the moment curve sum s^i G_i over all of them.
std::vector<std::vector<long>> separating_candidates(std::size_t gens, std::size_t combine, std::size_t limit) {
  std::vector<std::vector<long>> out;
  for (std::size_t i = 0; i < gens && out.size() < limit; ++i) {
    std::vector<long> c(gens, 0);
    c[i] = 1;
    out.push_back(c);
  }
  const std::size_t k = std::min(gens, combine);
  const std::size_t spiral_limit = std::max(out.size(), limit * 3 / 4);
  if (k >= 2) {
    for (long s = 1; out.size() < spiral_limit; ++s) {
      std::vector<long> c(k - 1, -s);
      while (out.size() < spiral_limit) {
        long mx = 0;
        for (long x : c) mx = std::max(mx, std::labs(x));
        if (mx == s) {
          std::vector<long> full(gens, 0);
          full[0] = 1;
          for (std::size_t i = 1; i < k; ++i) full[i] = c[i - 1];
          out.push_back(full);
        }
        std::size_t i = 0;
        while (i < c.size() && c[i] == s) c[i++] = -s;
        if (i == c.size()) break;
        ++c[i];
      }
    }
  }
  for (long s = 2; out.size() < limit && gens >= 2; s = s > 0 ? -s : 1 - s) {
    std::vector<long> c(gens);
    long v = 1;
    for (std::size_t i = 0; i < gens; ++i, v *= s) c[i] = v;
    out.push_back(c);
    if (std::labs(s) > 40) break;
  }
  return out;
}

// rows `probes` of x * y for rational x, integral y
RatMatrix probe_product(const MatrixOrder& o, const RatMatrix& x, const RatMatrix& y) {
  RatMatrix out(o.probes().size(), x.cols());
  for (std::size_t a = 0; a < o.probes().size(); ++a) {
    RatVector v = row_times(x.row(o.probes()[a]), y);
    for (std::size_t j = 0; j < v.size(); ++j) out(a, j) = v[j];
  }
  return out;
}

RatMatrix probe_rows(const MatrixOrder& o, const RatMatrix& x) {
  return x.select_rows(o.probes());
}

}  // namespace

Decomposition decompose(const ModSymSpace& space, const HeckeAlgebra& algebra) {
  const long n = space.level();
  if (!is_squarefree(n)) throw std::invalid_argument("decompose: level must be squarefree");
  Decomposition dec;
  const std::size_t g = algebra.rank();
  if (g == 0) return dec;
  const MatrixOrder& o = algebra.order;
  const std::size_t g2 = o.size();

  std::vector<IntMatrix> gens;
  for (const auto& x : algebra.generators) gens.push_back(x.matrix);
  // U_l first: at composite level only they tell old copies apart
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < gens.size(); ++i)
    if (algebra.generators[i].name[0] == 'U') pool.push_back(i);
  const std::size_t combine = pool.size() + 3;
  for (std::size_t i = 0; i < gens.size(); ++i)
    if (algebra.generators[i].name[0] != 'U') pool.push_back(i);
  bool found = false;
  for (const auto& c : separating_candidates(gens.size(), combine, 1000)) {
    IntMatrix t(g2, g2);
    for (std::size_t i = 0; i < c.size(); ++i)
      if (c[i] != 0) t += Integer(c[i]) * gens[pool[i]];
    IntPoly f = charpoly_int(t);
    IntPoly rad = *divide_exact(f, gcd(f, f.derivative()));
    if (rad.leading() < 0) rad = -rad;
    if (static_cast<std::size_t>(rad.degree()) == g) {
      dec.separating = t;
      dec.radical = rad;
      found = true;
      break;
    }
  }
  if (!found) throw SeparationError("decompose: no separating element among 1000 candidates");

  const IntMatrix mt = o.multiplication(dec.separating);
  const IntVector one = *o.coordinates(IntMatrix::identity(g2));
  const IntLattice newl = new_lattice(space);

  // a_l for every prime l <= 30, reusing generator matrices where there are any
  std::vector<std::pair<long, IntMatrix>> eig_ops;
  for (long l = 2; l <= 30; ++l) {
    bool is_prime = true;
    for (long q = 2; q * q <= l; ++q) is_prime = is_prime && l % q != 0;
    if (!is_prime) continue;
    auto it = std::find_if(algebra.generators.begin(), algebra.generators.end(),
                           [&](const OperatorMatrix& x) { return std::stol(x.name.substr(2)) == l; });
    eig_ops.emplace_back(l, it != algebra.generators.end() ? it->matrix : hecke(space, l).matrix);
  }

  std::vector<NewformClass> all;
  for (const auto& fac : factor_q(dec.radical)) {
    NewformClass cls;
    cls.level = n;
    cls.defining = fac.factor;
    cls.dimension = fac.factor.degree();
    cls.separating = dec.separating;
    IntPoly rest = *divide_exact(dec.radical, fac.factor);

    IntMatrix gt = o.element(eval_in_coords(fac.factor, mt, one));
    cls.isotypic = IntLattice::span(left_kernel_basis(gt));
    if (cls.isotypic.rank() != 2 * cls.dimension)
      throw std::logic_error("decompose: isotypic lattice of " + to_string(fac.factor) + " has rank " +
                             std::to_string(cls.isotypic.rank()));

    ScaledPoly h = crt_split(fac.factor, rest);
    IntVector hn = eval_in_coords(h.numerator, mt, one);
    cls.idempotent_coords.resize(g);
    for (std::size_t i = 0; i < g; ++i) {
      cls.idempotent_coords[i] = Rational(hn[i], h.denominator);
      cls.idempotent_coords[i].canonicalize();
    }
    cls.idempotent = o.element(std::span<const Rational>(cls.idempotent_coords));

    // Hecke data on S_f
    IntMatrix tf = restrict_to(cls.isotypic, dec.separating);
    const std::size_t d = cls.dimension;
    RatMatrix powers(d, 2 * d);
    RatVector v(2 * d);
    v[0] = 1;
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < 2 * d; ++j) powers(i, j) = v[j];
      v = rat_row_times(v, tf);
    }
    for (const auto& [l, op] : eig_ops) {
      IntMatrix tl = restrict_to(cls.isotypic, op);
      RatVector w(tl.row(0).begin(), tl.row(0).end());
      auto coords = solve_left(powers, w);
      if (!coords) throw std::logic_error("decompose: T_" + std::to_string(l) + " is not a polynomial in t on S_f");
      cls.eigenvalues[l] = *coords;
      if (cls.hecke_polys.size() < 4) cls.hecke_polys[l] = charpoly_int(tl);
    }
    all.push_back(std::move(cls));
  }

  // invariants, checked on probe rows (the projection is injective on T_Q)
  std::vector<RatMatrix> es;
  for (const auto& cls : all) es.push_back(cls.idempotent);
  std::vector<RatMatrix> rgens;
  for (const auto& x : gens) rgens.push_back(to_rational(x));
  for (std::size_t a = 0; a < all.size(); ++a) {
    if (!(probe_product(o, es[a], es[a]) == probe_rows(o, es[a])))
      throw std::logic_error("decompose: e_f is not idempotent for " + to_string(all[a].defining));
    for (std::size_t k = 0; k < gens.size(); ++k)
      if (!(probe_product(o, es[a], rgens[k]) == probe_product(o, rgens[k], es[a])))
        throw std::logic_error("decompose: e_f does not commute with " + algebra.generators[k].name);
    for (std::size_t b = a + 1; b < all.size(); ++b)
      if (!probe_product(o, es[a], es[b]).is_zero()) throw std::logic_error("decompose: idempotents not orthogonal");
  }
  {
    RatMatrix total(g2, g2);
    for (const auto& e : es) total += e;
    if (!(total == to_rational(IntMatrix::identity(g2))))
      throw std::logic_error("decompose: idempotents do not sum to 1");
  }

  std::size_t new_total = 0;
  for (auto& cls : all) {
    if (newl.contains(cls.isotypic)) {
      new_total += 2 * cls.dimension;
      dec.classes.push_back(std::move(cls));
    } else {
      dec.old_classes.push_back(std::move(cls));
    }
  }
  if (new_total != newl.rank()) throw std::logic_error("decompose: new classes do not fill the new lattice");
  std::stable_sort(dec.classes.begin(), dec.classes.end(), [](const NewformClass& a, const NewformClass& b) {
    if (a.dimension != b.dimension) return a.dimension < b.dimension;
    for (const auto& [l, pa] : a.hecke_polys) {
      const IntPoly& pb = b.hecke_polys.at(l);
      if (poly_less(pa, pb)) return true;
      if (poly_less(pb, pa)) return false;
    }
    return false;
  });
  for (std::size_t i = 0; i < dec.classes.size(); ++i) dec.classes[i].index = i + 1;
  return dec;
}

std::vector<NewformClass> decompose_new(const ModSymSpace& space, const HeckeAlgebra& algebra) {
  return decompose(space, algebra).classes;
}

OrderOf order_of(const HeckeAlgebra& algebra, const NewformClass& cls) {
  std::vector<IntMatrix> spanning;
  for (const auto& b : algebra.order.basis()) spanning.push_back(restrict_to(cls.isotypic, b));
  OrderOf of;
  of.order = MatrixOrder::span(spanning, cls.dimension);
  return of;
}

// ---------------------------------------------------------------- local algebra

std::vector<MaxIdeal> maximal_ideals(const FiniteAlgebra& ring, long p) {
  if (!is_prime_long(p)) throw std::invalid_argument("maximal_ideals: p must be prime");
  const u64 q = static_cast<u64>(p);
  ModRing a(ring, q);
  const std::size_t r = a.rank();
  if (r == 0) return {};

  ModMatrix frob(r, r, q);
  for (std::size_t i = 0; i < r; ++i) {
    std::vector<u64> b(r, 0);
    b[i] = 1;
    auto bp = a.power(b, q);
    for (std::size_t j = 0; j < r; ++j) frob(i, j) = bp[j];
  }
  ModMatrix fk = frob;
  for (u64 pk = q; pk < r; pk *= q) fk = modp::multiply(fk, frob);
  ModMatrix nil = modp::left_kernel(fk);
  ModMatrix fixed_eq = frob;
  for (std::size_t i = 0; i < r; ++i) fixed_eq(i, i) = modp::sub(fixed_eq(i, i), 1, q);
  ModMatrix fixed = modp::left_kernel(fixed_eq);
  const std::size_t s = fixed.rows;

  std::vector<std::vector<u64>> idems{a.one};
  for (std::size_t bi = 0; bi < s && idems.size() < s; ++bi) {
    std::vector<u64> b(fixed.a.begin() + bi * r, fixed.a.begin() + (bi + 1) * r);
    std::vector<std::vector<u64>> next;
    for (const auto& e : idems) {
      auto x = a.multiply(b, e);
      auto cp = modp::charpoly(a.mul_matrix(x));
      std::vector<u64> roots;
      for (const auto& f : factor_fp(FpPoly(q, cp))) {
        if (f.factor.degree() != 1) throw std::logic_error("maximal_ideals: Frobenius-fixed element not split");
        roots.push_back(modp::sub(0, f.factor.c[0], q));
      }
      for (u64 c : roots) {
        std::vector<u64> ec = e;
        for (u64 c2 : roots) {
          if (c2 == c) continue;
          auto lin = a.combine(x, 1, e, modp::sub(0, c2, q));
          ec = a.multiply(ec, lin);
          u64 inv = modp::inv(modp::sub(c, c2, q), q);
          for (auto& z : ec) z = modp::mul(z, inv, q);
        }
        if (!is_zero(ec)) next.push_back(ec);
      }
    }
    idems = std::move(next);
  }
  if (idems.size() != s) throw std::logic_error("maximal_ideals: idempotent splitting incomplete");

  std::vector<MaxIdeal> out;
  for (const auto& e : idems) {
    MaxIdeal m;
    m.p = p;
    m.idempotent = e;
    std::vector<std::vector<u64>> local, radical, ideal;
    auto one_minus_e = a.combine(a.one, 1, e, q - 1);
    for (std::size_t i = 0; i < r; ++i) {
      std::vector<u64> b(r, 0);
      b[i] = 1;
      local.push_back(a.multiply(b, e));
      ideal.push_back(a.multiply(b, one_minus_e));
    }
    for (std::size_t i = 0; i < nil.rows; ++i) {
      std::vector<u64> nv(nil.a.begin() + i * r, nil.a.begin() + (i + 1) * r);
      auto en = a.multiply(nv, e);
      radical.push_back(en);
      ideal.push_back(en);
    }
    m.local_dim = rank_of(local, r, q);
    m.residue_degree = m.local_dim - rank_of(radical, r, q);
    auto ech = modp::rref(stack_rows(ideal, r, q));
    m.ideal = ModMatrix(ech.rank, r, q);
    std::copy(ech.reduced.a.begin(), ech.reduced.a.begin() + ech.rank * r, m.ideal.a.begin());
    out.push_back(std::move(m));
  }
  std::sort(out.begin(), out.end(), [](const MaxIdeal& x, const MaxIdeal& y) {
    if (x.residue_degree != y.residue_degree) return x.residue_degree < y.residue_degree;
    return x.idempotent > y.idempotent;
  });
  return out;
}

std::size_t fiber_dim(const std::vector<IntMatrix>& action, const MaxIdeal& m) {
  const u64 q = static_cast<u64>(m.p);
  if (action.empty()) return 0;
  const std::size_t dim = action.front().rows();
  std::vector<ModMatrix> act;
  for (const auto& x : action) act.push_back(ModMatrix::from(x, q));
  ModMatrix all(m.ideal.rows * dim, dim, q);
  for (std::size_t k = 0; k < m.ideal.rows; ++k) {
    for (std::size_t i = 0; i < act.size(); ++i) {
      u64 c = m.ideal(k, i);
      if (c == 0) continue;
      for (std::size_t a = 0; a < dim; ++a)
        for (std::size_t b = 0; b < dim; ++b) {
          u64& z = all(k * dim + a, b);
          z = modp::add(z, modp::mul(c, act[i](a, b), q), q);
        }
    }
  }
  std::size_t rk = all.rows == 0 ? 0 : modp::rref(all).rank;
  std::size_t quot = dim - rk;
  if (quot % m.residue_degree != 0) throw std::logic_error("fiber_dim: dimension not divisible by residue degree");
  return quot / m.residue_degree;
}

std::size_t socle_dim(const FiniteAlgebra& ring, const MaxIdeal& m) {
  const u64 q = static_cast<u64>(m.p);
  ModRing a(ring, q);
  const std::size_t r = a.rank();
  ModMatrix big(r, r * m.ideal.rows, q);
  for (std::size_t k = 0; k < m.ideal.rows; ++k) {
    std::vector<u64> y(m.ideal.a.begin() + k * r, m.ideal.a.begin() + (k + 1) * r);
    ModMatrix l = a.mul_matrix(y);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j) big(i, k * r + j) = l(i, j);
  }
  std::size_t dim = m.ideal.rows == 0 ? r : modp::left_kernel(big).rows;
  if (dim % m.residue_degree != 0) throw std::logic_error("socle_dim: dimension not divisible by residue degree");
  return dim / m.residue_degree;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::yes: return "true";
    case Verdict::no: return "false";
    default: return "not_certified";
  }
}

GorensteinVerdict is_gorenstein(const HeckeAlgebra& algebra, const MaxIdeal& m) {
  GorensteinVerdict out;
  out.fiber_dim = fiber_dim(algebra.order.basis(), m);
  const long n = algebra.level, p = m.p;
  const int e = ord(n, p);
  if (e == 0) {
    out.guard = "p does not divide n";
  } else if (e == 1 && p % 2 == 1) {
    out.guard = "odd p exactly dividing n";
  } else if (e == 1) {
    const std::string name = "U_" + std::to_string(p);
    for (const auto& g : algebra.generators) {
      if (g.name != name) continue;
      const u64 q = static_cast<u64>(p);
      auto u = reduce_vec(*algebra.order.coordinates(g.matrix), q);
      auto one = reduce_vec(algebra.order.structure().one, q);
      const std::size_t base = m.ideal.rows;
      for (u64 c = 1; c < q && out.guard.empty(); ++c) {
        std::vector<std::vector<u64>> rows;
        for (std::size_t i = 0; i < base; ++i)
          rows.emplace_back(m.ideal.a.begin() + i * m.ideal.cols, m.ideal.a.begin() + (i + 1) * m.ideal.cols);
        std::vector<u64> diff(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) diff[i] = modp::sub(u[i], modp::mul(c, one[i], q), q);
        rows.push_back(diff);
        if (rank_of(rows, u.size(), q) == base) out.guard = "U_p is a unit scalar mod m";
      }
    }
  }
  if (out.guard.empty()) return out;
  out.verdict = out.fiber_dim == 2 ? Verdict::yes : Verdict::no;
  return out;
}

std::size_t cotangent_dim(const FiniteAlgebra& order, const MaxIdeal& m) {
  const std::size_t r = order.rank();
  IntLattice mz = ideal_lattice(m, r);
  const IntMatrix& b = mz.basis();
  IntMatrix gens(0, r);
  for (std::size_t i = 0; i < r; ++i) {
    IntVector pb(b.row(i).begin(), b.row(i).end());
    for (auto& x : pb) x *= m.p;
    gens.append_row(pb);
    for (std::size_t j = i; j < r; ++j) gens.append_row(order.multiply(b.row(i), b.row(j)));
  }
  IntLattice m2 = IntLattice::span(gens);
  Integer idx = sublattice_index(m2, mz);
  std::size_t e = 0;
  while (idx % m.p == 0) {
    idx /= m.p;
    ++e;
  }
  if (idx != 1 || e % m.residue_degree != 0) throw std::logic_error("cotangent_dim: index is not a residue-field power");
  return e / m.residue_degree;
}

bool is_dvr(const FiniteAlgebra& order, const MaxIdeal& m) { return cotangent_dim(order, m) == 1; }

Integer saturation_index(const HeckeAlgebra& algebra) {
  const auto& basis = algebra.order.basis();
  if (basis.empty()) return 1;
  const std::size_t s = algebra.order.size();
  IntMatrix v(basis.size(), s * s);
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t k = 0; k < s * s; ++k) v(i, k) = basis[i].data()[k];
  IntLattice lat = IntLattice::span(v);
  IntLattice sat = IntLattice::span(saturate(v));
  return sublattice_index(lat, sat);
}

int u_p_unit_check(const ModSymSpace& space, const NewformClass& cls, long p) {
  const long n = space.level();
  if (!is_prime_long(p) || n % p != 0 || (n / p) % p == 0)
    throw std::invalid_argument("u_p_unit_check: not applicable (p must divide the level exactly once)");
  IntMatrix u = restrict_to(cls.isotypic, hecke(space, p).matrix);
  IntMatrix id = IntMatrix::identity(u.rows());
  if (u == id) return 1;
  if (u == -id) return -1;
  return 0;
}

IntVector lift_idempotent(const FiniteAlgebra& ring, std::span<const Integer> e, const Integer& modulus) {
  auto reduce = [&](IntVector v) {
    for (auto& x : v) {
      x %= modulus;
      if (x < 0) x += modulus;
    }
    return v;
  };
  IntVector x = reduce(IntVector(e.begin(), e.end()));
  for (int it = 0; it < 4096; ++it) {
    IntVector x2 = reduce(ring.multiply(x, x));
    IntVector x3 = reduce(ring.multiply(x2, x));
    IntVector y(x.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = 3 * x2[i] - 2 * x3[i];
    y = reduce(std::move(y));
    if (y == x) return x;
    x = std::move(y);
  }
  throw std::logic_error("lift_idempotent: no convergence");
}

}  // namespace maninforge

#include "maninforge/modsym.hpp"

#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace maninforge {
namespace {

bool is_prime_long(long p) {
  if (p < 2) return false;
  for (long q = 2; q * q <= p; ++q)
    if (p % q == 0) return false;
  return true;
}

Mat2 mul(const Mat2& x, const Mat2& y) {
  return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2],
          x[2] * y[1] + x[3] * y[3]};
}

long long inverse_mod(long long a, long long n) {
  long long r0 = n, r1 = ((a % n) + n) % n, t0 = 0, t1 = 1;
  while (r1 != 0) {
    long long q = r0 / r1;
    std::tie(r0, r1) = std::make_pair(r1, r0 - q * r1);
    std::tie(t0, t1) = std::make_pair(t1, t0 - q * t1);
  }
  if (r0 != 1) throw std::domain_error("not invertible");
  return ((t0 % n) + n) % n;
}

IntMatrix to_cuspidal_coordinates(const ModSymSpace& target, const IntMatrix& images, const char* what) {
  const IntLattice& s = target.cuspidal();
  IntMatrix out(images.rows(), s.rank());
  for (std::size_t i = 0; i < images.rows(); ++i) {
    auto x = s.coordinates(images.row(i));
    if (!x) throw std::logic_error(std::string(what) + ": image leaves the cuspidal lattice");
    for (std::size_t j = 0; j < s.rank(); ++j) out(i, j) = (*x)[j];
  }
  return out;
}

void require_squarefree_divisor(const ModSymSpace& space, long l, const char* what) {
  const long n = space.level();
  if (!is_prime_long(l) || n % l != 0) throw std::invalid_argument(std::string(what) + ": prime must divide the level");
  if (!is_squarefree(n)) throw std::invalid_argument(std::string(what) + ": level must be squarefree");
}

Mat2 atkin_lehner_matrix(long n, long q) {
  const long m = n / q;
  long long w = m == 1 ? 0 : inverse_mod(q, m);
  long long y = (static_cast<long long>(q) * w - 1) / m;
  return {q, y, n, static_cast<long long>(q) * w};
}

}  // namespace

IntMatrix heilbronn_on_m(const ModSymSpace& space, const std::vector<Mat2>& heilbronn) {
  const std::size_t r = space.rank();
  IntMatrix out(r, r);
  std::vector<Integer> acc(r);
  for (std::size_t k = 0; k < r; ++k) {
    std::fill(acc.begin(), acc.end(), Integer(0));
    for (const auto& [i, a] : space.lift(k)) {
      const long long c = space.p1()[i].c, d = space.p1()[i].d;
      for (const auto& h : heilbronn) space.add_symbol(acc, c * h[0] + d * h[2], c * h[1] + d * h[3], a);
    }
    for (std::size_t j = 0; j < r; ++j) out(k, j) = acc[j];
  }
  return out;
}

IntMatrix left_action_on_m(const ModSymSpace& space, const std::vector<Mat2>& gammas) {
  const std::size_t r = space.rank();
  IntMatrix out(r, r);
  std::vector<Integer> acc(r);
  for (std::size_t k = 0; k < r; ++k) {
    std::fill(acc.begin(), acc.end(), Integer(0));
    for (const auto& [i, a] : space.lift(k)) {
      Mat2 g = space.lift_to_sl2(i);
      for (const auto& gamma : gammas) space.add_image(acc, mul(gamma, g), a);
    }
    for (std::size_t j = 0; j < r; ++j) out(k, j) = acc[j];
  }
  return out;
}

IntMatrix restrict_to_cuspidal(const ModSymSpace& space, const IntMatrix& on_m) {
  return to_cuspidal_coordinates(space, space.cuspidal().basis() * on_m, "restriction");
}

std::vector<Mat2> heilbronn_cremona(long p) {
  if (!is_prime_long(p)) throw std::invalid_argument("Cremona's Heilbronn matrices need a prime");
  if (p == 2) return {{1, 0, 0, 2}, {2, 0, 0, 1}, {2, 1, 0, 1}, {1, 0, 1, 2}};
  std::vector<Mat2> out{{1, 0, 0, p}};
  for (long r = -(p / 2); r <= p / 2; ++r) {
    long long x1 = p, x2 = -r, y1 = 0, y2 = 1, a = -p, b = r;
    out.push_back({x1, x2, y1, y2});
    while (b != 0) {
      // nearest integer to a/b, halves away from zero
      long long q = (2 * std::llabs(a) + std::llabs(b)) / (2 * std::llabs(b));
      if ((a < 0) != (b < 0)) q = -q;
      long long c = a - b * q;
      a = -b;
      b = c;
      long long x3 = q * x2 - x1;
      x1 = x2;
      x2 = x3;
      long long y3 = q * y2 - y1;
      y1 = y2;
      y2 = y3;
      out.push_back({x1, x2, y1, y2});
    }
  }
  return out;
}

std::vector<Mat2> heilbronn_merel(long n) {
  std::vector<Mat2> out;
  for (long long a = 1; a <= n; ++a) {
    for (long long d = 1; a + d <= n + 1; ++d) {
      const long long t = a * d - n;
      if (t < 0) continue;
      if (t == 0) {
        for (long long c = 0; c < d; ++c) out.push_back({a, 0, c, d});
        for (long long b = 1; b < a; ++b) out.push_back({a, b, 0, d});
        continue;
      }
      for (long long b = 1; b < a; ++b)
        if (t % b == 0 && t / b < d) out.push_back({a, b, t / b, d});
    }
  }
  return out;
}

std::vector<Mat2> hecke_cosets(long n, long l) {
  std::vector<Mat2> out;
  for (long a = 0; a < l; ++a) out.push_back({1, a, 0, l});
  if (n % l != 0) out.push_back({l, 0, 0, 1});
  return out;
}

OperatorMatrix hecke(const ModSymSpace& space, long l) {
  if (!is_prime_long(l)) throw std::invalid_argument("hecke: index must be prime");
  const long n = space.level();
  IntMatrix on_m = n % l != 0 ? heilbronn_on_m(space, heilbronn_cremona(l))
                              : left_action_on_m(space, hecke_cosets(n, l));
  return {(n % l != 0 ? "T_" : "U_") + std::to_string(l), restrict_to_cuspidal(space, on_m)};
}

OperatorMatrix hecke_merel(const ModSymSpace& space, long m) {
  if (m < 1) throw std::invalid_argument("hecke_merel: index must be positive");
  return {"T_" + std::to_string(m), restrict_to_cuspidal(space, heilbronn_on_m(space, heilbronn_merel(m)))};
}

OperatorMatrix atkin_lehner(const ModSymSpace& space, long q) {
  const long n = space.level();
  if (!is_prime_long(q) || n % q != 0) throw std::invalid_argument("atkin_lehner: q must be a prime dividing the level");
  if ((n / q) % q == 0) throw std::invalid_argument("atkin_lehner: q must divide the level exactly once");
  IntMatrix on_m = left_action_on_m(space, {atkin_lehner_matrix(n, q)});
  return {"w_" + std::to_string(q), restrict_to_cuspidal(space, on_m)};
}

OperatorMatrix star_involution(const ModSymSpace& space) {
  return {"star", restrict_to_cuspidal(space, heilbronn_on_m(space, {{-1, 0, 0, 1}}))};
}

OperatorMatrix degeneracy(const ModSymSpace& space, const ModSymSpace& target, long l, DegeneracyKind kind) {
  require_squarefree_divisor(space, l, "degeneracy");
  const long n = space.level();
  if (n == l) throw std::invalid_argument("degeneracy: no proper divisor level");
  if (target.level() != n / l) throw std::invalid_argument("degeneracy: target has the wrong level");
  const std::size_t r = space.rank();
  IntMatrix on_m(r, target.rank());
  std::vector<Integer> acc(target.rank());
  for (std::size_t k = 0; k < r; ++k) {
    std::fill(acc.begin(), acc.end(), Integer(0));
    for (const auto& [i, a] : space.lift(k)) {
      if (kind == DegeneracyKind::forget) {
        target.add_symbol(acc, space.p1()[i].c, space.p1()[i].d, a);
      } else {
        target.add_image(acc, mul({l, 0, 0, 1}, space.lift_to_sl2(i)), a);
      }
    }
    for (std::size_t j = 0; j < acc.size(); ++j) on_m(k, j) = acc[j];
  }
  std::string name = (kind == DegeneracyKind::forget ? "deg_forg_" : "deg_quot_") + std::to_string(l);
  return {name, to_cuspidal_coordinates(target, space.cuspidal().basis() * on_m, "degeneracy")};
}

OperatorMatrix degeneracy_pullback(const ModSymSpace& space, const ModSymSpace& target, long l,
                                   DegeneracyKind kind) {
  require_squarefree_divisor(target, l, "degeneracy pull-back");
  const long n = target.level();
  if (space.level() != n / l) throw std::invalid_argument("degeneracy pull-back: source has the wrong level");
  // fibres of P^1(Z/n) -> P^1(Z/(n/l))
  std::vector<std::vector<std::size_t>> fibre(space.p1().size());
  for (std::size_t j = 0; j < target.p1().size(); ++j)
    fibre[space.p1().index(target.p1()[j].c, target.p1()[j].d)].push_back(j);
  IntMatrix on_m(space.rank(), target.rank());
  std::vector<Integer> acc(target.rank());
  for (std::size_t k = 0; k < space.rank(); ++k) {
    std::fill(acc.begin(), acc.end(), Integer(0));
    for (const auto& [i, a] : space.lift(k))
      for (auto j : fibre[i]) target.add_symbol(acc, target.p1()[j].c, target.p1()[j].d, a);
    for (std::size_t j = 0; j < acc.size(); ++j) on_m(k, j) = acc[j];
  }
  // pi_quot = pi_forg o w_l, so its pull-back is the forgetful one followed by w_l
  if (kind == DegeneracyKind::quotient) on_m = on_m * left_action_on_m(target, {atkin_lehner_matrix(n, l)});
  std::string name = (kind == DegeneracyKind::forget ? "pull_forg_" : "pull_quot_") + std::to_string(l);
  return {name, to_cuspidal_coordinates(target, space.cuspidal().basis() * on_m, "degeneracy pull-back")};
}

IntLattice new_lattice(const ModSymSpace& space) {
  const long n = space.level();
  if (!is_squarefree(n)) throw std::invalid_argument("new_lattice: level must be squarefree");
  const std::size_t g2 = space.cuspidal_rank();
  std::vector<IntMatrix> maps;
  for (long l : prime_divisors(n)) {
    if (l == n) continue;
    ModSymSpace lower = ModSymSpace::build(n / l);
    if (lower.cuspidal_rank() == 0) continue;
    maps.push_back(degeneracy(space, lower, l, DegeneracyKind::forget).matrix);
    maps.push_back(degeneracy(space, lower, l, DegeneracyKind::quotient).matrix);
  }
  std::size_t cols = 0;
  for (const auto& m : maps) cols += m.cols();
  if (cols == 0) return IntLattice::full(g2);
  IntMatrix joint(g2, cols);
  std::size_t off = 0;
  for (const auto& m : maps) {
    for (std::size_t i = 0; i < g2; ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) joint(i, off + j) = m(i, j);
    off += m.cols();
  }
  return IntLattice::span(left_kernel_basis(joint));
}

}  // namespace maninforge

#include "maninforge/linalg.hpp"

#include "maninforge/modular.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace maninforge {
namespace {

constexpr std::size_t kNaiveDimension = 64;

int cmpabs(const Integer& a, const Integer& b) { return mpz_cmpabs(a.get_mpz_t(), b.get_mpz_t()); }

// row_a -= q * row_b over columns [from, cols)
void row_submul(IntMatrix& m, std::size_t a, std::size_t b, const Integer& q, std::size_t from) {
  if (q == 0) return;
  auto ra = m.row(a);
  auto rb = m.row(b);
  for (std::size_t j = from; j < m.cols(); ++j)
    if (rb[j] != 0) ra[j] -= q * rb[j];
}

void negate_row(IntMatrix& m, std::size_t a) {
  for (auto& x : m.row(a)) x = -x;
}

// Nearest-integer quotient, keeps remainders in the symmetric range.
Integer round_div(const Integer& a, const Integer& b) {
  Integer q, r;
  mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  Integer twice = 2 * r;
  if (abs(twice) > abs(b)) q += 1;
  return q;
}

Integer floor_div(const Integer& a, const Integer& b) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

void reduce_mod(Integer& x, const Integer& m) {
  mpz_fdiv_r(x.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
}

// Naive HNF; when `transform` is non-null it accumulates the row operations.
std::size_t hnf_in_place(IntMatrix& h, IntMatrix* transform) {
  const std::size_t rows = h.rows(), cols = h.cols();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    bool have_pivot = false;
    while (true) {
      std::size_t best = rows;
      for (std::size_t i = r; i < rows; ++i) {
        if (h(i, c) == 0) continue;
        if (best == rows || cmpabs(h(i, c), h(best, c)) < 0) best = i;
      }
      if (best == rows) break;
      have_pivot = true;
      h.swap_rows(r, best);
      if (transform) transform->swap_rows(r, best);
      bool cleared = true;
      for (std::size_t i = r + 1; i < rows; ++i) {
        if (h(i, c) == 0) continue;
        Integer q = round_div(h(i, c), h(r, c));
        row_submul(h, i, r, q, c);
        if (transform) row_submul(*transform, i, r, q, 0);
        if (h(i, c) != 0) cleared = false;
      }
      if (cleared) break;
    }
    if (!have_pivot) continue;
    if (h(r, c) < 0) {
      negate_row(h, r);
      if (transform) negate_row(*transform, r);
    }
    for (std::size_t i = 0; i < r; ++i) {
      if (h(i, c) == 0) continue;
      Integer q = floor_div(h(i, c), h(r, c));
      row_submul(h, i, r, q, c);
      if (transform) row_submul(*transform, i, r, q, 0);
    }
    ++r;
  }
  return r;
}

IntMatrix first_rows(const IntMatrix& m, std::size_t n) { return m.block(0, 0, n, m.cols()); }

std::vector<std::size_t> complement(const std::vector<std::size_t>& idx, std::size_t n) {
  std::vector<bool> used(n, false);
  for (auto i : idx) used[i] = true;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i)
    if (!used[i]) out.push_back(i);
  return out;
}

bool is_echelon(const IntMatrix& m) {
  std::size_t last = 0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    std::size_t pc = 0;
    while (pc < m.cols() && m(i, pc) == 0) ++pc;
    if (pc == m.cols()) return false;
    if (i > 0 && pc <= last) return false;
    last = pc;
  }
  return true;
}

IntMatrix hnf_basis_modular(const IntMatrix& m) {
  for (std::size_t attempt = 0; attempt < 8; ++attempt) {
    MinorPivots piv = pivots_mod_prime(m, attempt);
    const std::size_t r = piv.cols.size();
    if (r == 0) {
      if (m.is_zero()) return IntMatrix(0, m.cols());
      continue;
    }
    IntMatrix a = m.select_rows(piv.rows).select_cols(piv.cols);
    IntMatrix rows_r = m.select_rows(piv.rows);
    ScaledSolution sol = solve_scaled(a, rows_r);
    if (sol.det == 0) continue;
    Integer d = abs(sol.det);
    IntMatrix hj = hnf_modulo(m.select_cols(piv.cols), d);
    // lift: full rows = hj * A^{-1} * rows_r = hj * scaled / det
    IntMatrix full = hj * sol.scaled;
    bool ok = true;
    for (auto& x : full.data()) {
      if (!mpz_divisible_p(x.get_mpz_t(), sol.det.get_mpz_t())) {
        ok = false;
        break;
      }
      mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), sol.det.get_mpz_t());
    }
    if (!ok || !is_echelon(full)) continue;
    for (std::size_t i = 0; i < m.rows() && ok; ++i)
      if (!echelon_coordinates(full, m.row(i))) ok = false;
    if (!ok) continue;
    // reduce above pivots over the full width
    std::size_t rr = hnf_in_place(full, nullptr);
    (void)rr;
    return full;
  }
  throw std::runtime_error("hnf_basis: multimodular path failed to certify");
}

}  // namespace

Integer content(std::span<const Integer> v) {
  Integer g = 0;
  for (const auto& x : v) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
    if (g == 1) break;
  }
  return g;
}

HnfResult hnf_with_transform(const IntMatrix& m) {
  HnfResult res;
  res.hnf = m;
  res.transform = IntMatrix::identity(m.rows());
  res.rank = hnf_in_place(res.hnf, &res.transform);
  return res;
}

IntMatrix hnf_basis(const IntMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return IntMatrix(0, m.cols());
  if (std::max(m.rows(), m.cols()) < kNaiveDimension) {
    IntMatrix h = m;
    std::size_t r = hnf_in_place(h, nullptr);
    return first_rows(h, r);
  }
  return hnf_basis_modular(m);
}

IntMatrix hnf_modulo(const IntMatrix& gens, const Integer& modulus) {
  if (modulus <= 0) throw std::invalid_argument("hnf_modulo: modulus must be positive");
  const std::size_t n = gens.cols();
  const Integer& dm = modulus;
  std::vector<IntVector> active;
  active.reserve(gens.rows() + n);
  for (std::size_t i = 0; i < gens.rows(); ++i) {
    IntVector v(gens.row(i).begin(), gens.row(i).end());
    bool nz = false;
    for (auto& x : v) {
      reduce_mod(x, dm);
      if (x != 0) nz = true;
    }
    if (nz) active.push_back(std::move(v));
  }
  IntMatrix piv_rows(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    IntVector de(n);
    de[c] = dm;
    active.push_back(std::move(de));
    // gather rows with nonzero in column c
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < active.size(); ++i)
      if (active[i][c] != 0) idx.push_back(i);
    while (true) {
      std::size_t best = idx.front();
      for (auto i : idx)
        if (cmpabs(active[i][c], active[best][c]) < 0) best = i;
      std::vector<std::size_t> next;
      next.push_back(best);
      bool cleared = true;
      for (auto i : idx) {
        if (i == best) continue;
        Integer q = round_div(active[i][c], active[best][c]);
        for (std::size_t j = c; j < n; ++j) {
          if (active[best][j] != 0) active[i][j] -= q * active[best][j];
          if (j > c) reduce_mod(active[i][j], dm);
        }
        if (active[i][c] != 0) {
          cleared = false;
          next.push_back(i);
        }
      }
      idx = std::move(next);
      if (cleared) break;
    }
    std::size_t p = idx.front();
    IntVector prow = std::move(active[p]);
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(p));
    if (prow[c] < 0)
      for (auto& x : prow) x = -x;
    for (std::size_t j = c + 1; j < n; ++j) reduce_mod(prow[j], dm);
    // D e_c - (D / g) * prow is a lattice vector supported beyond column c
    Integer factor = dm / prow[c];
    IntVector tail(n);
    bool nz = false;
    for (std::size_t j = c + 1; j < n; ++j) {
      tail[j] = -factor * prow[j];
      reduce_mod(tail[j], dm);
      if (tail[j] != 0) nz = true;
    }
    if (nz) active.push_back(std::move(tail));
    // drop rows that became zero
    std::erase_if(active, [&](const IntVector& v) {
      for (std::size_t j = c + 1; j < n; ++j)
        if (v[j] != 0) return false;
      return true;
    });
    for (std::size_t j = 0; j < n; ++j) piv_rows(c, j) = prow[j];
  }
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t i = 0; i < c; ++i) {
      if (piv_rows(i, c) == 0) continue;
      Integer q = floor_div(piv_rows(i, c), piv_rows(c, c));
      row_submul(piv_rows, i, c, q, c);
    }
  }
  return piv_rows;
}

std::vector<Integer> snf(const IntMatrix& m) {
  IntMatrix b = hnf_basis(m);
  const std::size_t r = b.rows();
  if (r == 0) return {};
  IntMatrix a = hnf_basis(b.transpose());  // r x r, same invariants
  Integer modulus = 1;
  for (std::size_t i = 0; i < r; ++i) modulus *= a(i, i);
  modulus = abs(modulus);
  std::vector<Integer> factors;
  Integer R = modulus;
  for (std::size_t k = 0; k < r; ++k) {
    for (auto& x : a.data()) reduce_mod(x, R);
    Integer d;
    while (true) {
      // pivot: smallest magnitude nonzero entry of the trailing block, row-major scan
      std::size_t bi = r, bj = r;
      for (std::size_t i = k; i < r; ++i)
        for (std::size_t j = k; j < r; ++j) {
          if (a(i, j) == 0) continue;
          if (bi == r || cmpabs(a(i, j), a(bi, bj)) < 0) {
            bi = i;
            bj = j;
          }
        }
      if (bi == r) {
        d = R;
        break;
      }
      a.swap_rows(k, bi);
      for (std::size_t i = 0; i < r; ++i) std::swap(a(i, k), a(i, bj));
      bool clean = true;
      for (std::size_t i = k + 1; i < r; ++i) {
        if (a(i, k) == 0) continue;
        Integer q = round_div(a(i, k), a(k, k));
        for (std::size_t j = k; j < r; ++j) {
          if (a(k, j) != 0) a(i, j) -= q * a(k, j);
          if (j > k) reduce_mod(a(i, j), R);
        }
        if (a(i, k) != 0) clean = false;
      }
      for (std::size_t j = k + 1; j < r; ++j) {
        if (a(k, j) == 0) continue;
        Integer q = round_div(a(k, j), a(k, k));
        for (std::size_t i = k; i < r; ++i) {
          if (a(i, k) != 0) a(i, j) -= q * a(i, k);
          if (i > k) reduce_mod(a(i, j), R);
        }
        if (a(k, j) != 0) clean = false;
      }
      if (!clean) continue;
      mpz_gcd(d.get_mpz_t(), a(k, k).get_mpz_t(), R.get_mpz_t());
      std::size_t bad = r;
      for (std::size_t i = k + 1; i < r && bad == r; ++i)
        for (std::size_t j = k + 1; j < r; ++j)
          if (!mpz_divisible_p(a(i, j).get_mpz_t(), d.get_mpz_t())) {
            bad = i;
            break;
          }
      if (bad == r) break;
      for (std::size_t j = k; j < r; ++j) a(k, j) += a(bad, j);
    }
    factors.push_back(d);
    R /= d;
  }
  std::sort(factors.begin(), factors.end());
  return factors;
}

std::size_t rank(const IntMatrix& m) {
  if (m.empty()) return 0;
  std::size_t best = 0;
  for (std::size_t k = 0; k < 2; ++k) {
    auto e = modp::rref(modp::ModMatrix::from(m, modp::word_prime(k)));
    best = std::max(best, e.rank);
  }
  return best;
}

Integer det(const IntMatrix& m) {
  if (!m.is_square()) throw std::invalid_argument("det: non-square matrix");
  if (m.rows() == 0) return 1;
  Integer bound = modp::hadamard_bound(m);
  if (bound == 0) return 0;
  modp::CrtAccumulator acc(1);
  for (std::size_t k = 0; acc.modulus() <= 2 * bound; ++k) {
    modp::u64 p = modp::word_prime(k);
    acc.add({modp::det(modp::ModMatrix::from(m, p))}, p);
  }
  return acc.symmetric()[0];
}

ScaledSolution solve_scaled(const IntMatrix& a, const IntMatrix& b) {
  if (!a.is_square() || a.rows() != b.rows()) throw std::invalid_argument("solve_scaled: shape mismatch");
  const std::size_t n = a.rows(), k = b.cols();
  ScaledSolution out;
  out.det = det(a);
  if (out.det == 0) throw std::domain_error("solve_scaled: singular matrix");
  // Cramer bound on |entries of adj(A) B|
  Integer maxb = 0;
  for (const auto& x : b.data())
    if (cmpabs(x, maxb) > 0) maxb = abs(x);
  Integer prod = 1;
  for (std::size_t i = 0; i < n; ++i) {
    Integer s = maxb * maxb;
    for (const auto& x : a.row(i)) s += x * x;
    prod *= s;
  }
  Integer bound;
  mpz_sqrt(bound.get_mpz_t(), prod.get_mpz_t());
  bound += 1;
  modp::CrtAccumulator acc(n * k);
  for (std::size_t idx = 0; acc.modulus() <= 2 * bound; ++idx) {
    modp::u64 p = modp::word_prime(idx);
    modp::u64 dp = modp::reduce(out.det, p);
    if (dp == 0) continue;
    modp::ModMatrix aug(n, n + k, p);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) aug(i, j) = modp::reduce(a(i, j), p);
      for (std::size_t j = 0; j < k; ++j) aug(i, n + j) = modp::reduce(b(i, j), p);
    }
    auto e = modp::rref(std::move(aug));
    std::vector<modp::u64> res(n * k);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < k; ++j) res[i * k + j] = modp::mul(e.reduced(i, n + j), dp, p);
    acc.add(res, p);
  }
  out.scaled = IntMatrix(n, k, acc.symmetric());
  return out;
}

MinorPivots pivots_mod_prime(const IntMatrix& m, std::size_t prime_index) {
  modp::u64 p = modp::word_prime(prime_index);
  MinorPivots piv;
  auto e = modp::rref(modp::ModMatrix::from(m, p));
  piv.cols = e.pivot_cols;
  if (piv.cols.empty()) return piv;
  IntMatrix sub = m.select_cols(piv.cols).transpose();
  auto et = modp::rref(modp::ModMatrix::from(sub, p));
  piv.rows = et.pivot_cols;
  return piv;
}

IntMatrix kernel_basis(const IntMatrix& m) {
  const std::size_t n = m.cols();
  if (m.rows() == 0) return IntMatrix::identity(n);
  for (std::size_t attempt = 0; attempt < 8; ++attempt) {
    MinorPivots piv = pivots_mod_prime(m, attempt);
    const std::size_t r = piv.cols.size();
    IntMatrix kern;
    if (r == 0) {
      kern = IntMatrix::identity(n);
    } else if (r == n) {
      if (det(m.select_rows(piv.rows)) != 0) return IntMatrix(0, n);
      continue;
    } else {
      std::vector<std::size_t> free_cols = complement(piv.cols, n);
      const std::size_t k = free_cols.size();
      IntMatrix a = m.select_rows(piv.rows).select_cols(piv.cols);
      IntMatrix b = m.select_rows(piv.rows).select_cols(free_cols);
      ScaledSolution sol;
      try {
        sol = solve_scaled(a, b);
      } catch (const std::domain_error&) {
        continue;
      }
      Integer d = sol.det;
      IntMatrix y = std::move(sol.scaled);
      if (d < 0) {
        d = -d;
        y = -y;
      }
      Integer g = d;
      for (const auto& x : y.data()) {
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
        if (g == 1) break;
      }
      if (g != 1) {
        d /= g;
        for (auto& x : y.data()) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
      }
      // Lambda = { t in Z^k : y t = 0 mod d }
      IntMatrix lambda;
      if (d == 1) {
        lambda = IntMatrix::identity(k);
      } else {
        IntMatrix gens(k, r + k);
        for (std::size_t i = 0; i < k; ++i) {
          for (std::size_t j = 0; j < r; ++j) gens(i, j) = y(j, i);
          gens(i, r + i) = 1;
        }
        IntMatrix h = hnf_modulo(gens, d);
        lambda = h.block(r, r, k, k);
      }
      kern = IntMatrix(k, n);
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) kern(i, free_cols[j]) = lambda(i, j);
        for (std::size_t pj = 0; pj < r; ++pj) {
          Integer s = 0;
          for (std::size_t j = 0; j < k; ++j)
            if (lambda(i, j) != 0 && y(pj, j) != 0) s += y(pj, j) * lambda(i, j);
          if (!mpz_divisible_p(s.get_mpz_t(), d.get_mpz_t()))
            throw std::logic_error("kernel_basis: saturation lattice inconsistent");
          mpz_divexact(s.get_mpz_t(), s.get_mpz_t(), d.get_mpz_t());
          kern(i, piv.cols[pj]) = -s;
        }
      }
    }
    // certify M * kern^T = 0
    bool ok = true;
    for (std::size_t i = 0; i < kern.rows() && ok; ++i) {
      for (std::size_t row = 0; row < m.rows() && ok; ++row) {
        Integer s = 0;
        auto mr = m.row(row);
        for (std::size_t j = 0; j < n; ++j)
          if (mr[j] != 0 && kern(i, j) != 0) s += mr[j] * kern(i, j);
        if (s != 0) ok = false;
      }
    }
    if (!ok) continue;
    return hnf_basis(kern);
  }
  throw std::runtime_error("kernel_basis: failed to certify kernel");
}

IntMatrix saturate(const IntMatrix& rows) {
  if (rows.rows() == 0) return IntMatrix(0, rows.cols());
  IntMatrix orth = kernel_basis(rows);
  if (orth.rows() == 0) return IntMatrix::identity(rows.cols());
  return kernel_basis(orth);
}

std::optional<IntVector> echelon_coordinates(const IntMatrix& echelon, std::span<const Integer> v) {
  if (v.size() != echelon.cols()) throw std::invalid_argument("echelon_coordinates: width mismatch");
  IntVector w(v.begin(), v.end());
  IntVector x(echelon.rows());
  std::size_t pc = 0;
  for (std::size_t i = 0; i < echelon.rows(); ++i) {
    while (pc < echelon.cols() && echelon(i, pc) == 0) ++pc;
    if (pc == echelon.cols()) break;
    for (std::size_t j = 0; j < pc; ++j)
      if (w[j] != 0) return std::nullopt;
    if (w[pc] != 0) {
      if (!mpz_divisible_p(w[pc].get_mpz_t(), echelon(i, pc).get_mpz_t())) return std::nullopt;
      mpz_divexact(x[i].get_mpz_t(), w[pc].get_mpz_t(), echelon(i, pc).get_mpz_t());
      auto er = echelon.row(i);
      for (std::size_t j = pc; j < w.size(); ++j)
        if (er[j] != 0) w[j] -= x[i] * er[j];
    }
  }
  for (const auto& z : w)
    if (z != 0) return std::nullopt;
  return x;
}

}  // namespace maninforge

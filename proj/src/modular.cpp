#include "maninforge/modular.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace maninforge::modp {

u64 pow(u64 a, u64 e, u64 p) {
  u64 r = 1 % p;
  a %= p;
  while (e) {
    if (e & 1) r = mul(r, a, p);
    a = mul(a, a, p);
    e >>= 1;
  }
  return r;
}

u64 inv(u64 a, u64 p) {
  // extended Euclid on signed 128-bit to support non-prime moduli when invertible
  __int128 t = 0, nt = 1, r = p, nr = a % p;
  while (nr != 0) {
    __int128 q = r / nr;
    __int128 tmp = t - q * nt;
    t = nt;
    nt = tmp;
    tmp = r - q * nr;
    r = nr;
    nr = tmp;
  }
  if (r != 1) throw std::domain_error("modp::inv: not invertible");
  if (t < 0) t += p;
  return static_cast<u64>(t);
}

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % q == 0) return n == q;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    u64 x = pow(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mul(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

u64 word_prime(std::size_t k) {
  static std::mutex mu;
  static std::vector<u64> cache;
  std::lock_guard<std::mutex> lock(mu);
  u64 candidate = cache.empty() ? (1ULL << 62) - 1 : cache.back() - 2;
  if (candidate % 2 == 0) --candidate;
  while (cache.size() <= k) {
    while (!is_prime(candidate)) candidate -= 2;
    cache.push_back(candidate);
    candidate -= 2;
  }
  return cache[k];
}

u64 reduce(const Integer& x, u64 p) {
  // p < 2^62 fits in unsigned long on LP64
  unsigned long r = mpz_fdiv_ui(x.get_mpz_t(), static_cast<unsigned long>(p));
  return static_cast<u64>(r);
}

ModMatrix ModMatrix::identity(std::size_t n, u64 prime) {
  ModMatrix m(n, n, prime);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1 % prime;
  return m;
}

ModMatrix ModMatrix::from(const IntMatrix& m, u64 prime) {
  ModMatrix r(m.rows(), m.cols(), prime);
  for (std::size_t k = 0; k < m.data().size(); ++k) r.a[k] = reduce(m.data()[k], prime);
  return r;
}

ModMatrix multiply(const ModMatrix& x, const ModMatrix& y) {
  if (x.cols != y.rows) throw std::invalid_argument("modp::multiply: shape mismatch");
  const u64 p = x.p;
  ModMatrix z(x.rows, y.cols, p);
  std::vector<u128> acc(y.cols);
  for (std::size_t i = 0; i < x.rows; ++i) {
    std::fill(acc.begin(), acc.end(), 0);
    int pending = 0;
    for (std::size_t k = 0; k < x.cols; ++k) {
      u64 xik = x(i, k);
      if (!xik) continue;
      const u64* yk = &y.a[k * y.cols];
      for (std::size_t j = 0; j < y.cols; ++j) acc[j] += static_cast<u128>(xik) * yk[j];
      // each term < 2^124; reduce every 8 accumulations to stay below 2^128
      if (++pending == 8) {
        for (auto& v : acc) v %= p;
        pending = 0;
      }
    }
    for (std::size_t j = 0; j < y.cols; ++j) z(i, j) = static_cast<u64>(acc[j] % p);
  }
  return z;
}

Echelon rref(ModMatrix m) {
  Echelon e;
  const u64 p = m.p;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols && r < m.rows; ++c) {
    std::size_t piv = r;
    while (piv < m.rows && m(piv, c) == 0) ++piv;
    if (piv == m.rows) continue;
    if (piv != r)
      for (std::size_t j = 0; j < m.cols; ++j) std::swap(m(r, j), m(piv, j));
    u64 iv = inv(m(r, c), p);
    for (std::size_t j = c; j < m.cols; ++j) m(r, j) = mul(m(r, j), iv, p);
    for (std::size_t i = 0; i < m.rows; ++i) {
      if (i == r || m(i, c) == 0) continue;
      u64 f = m(i, c);
      for (std::size_t j = c; j < m.cols; ++j)
        if (m(r, j)) m(i, j) = sub(m(i, j), mul(f, m(r, j), p), p);
    }
    e.pivot_cols.push_back(c);
    ++r;
  }
  e.rank = r;
  e.reduced = std::move(m);
  return e;
}

ModMatrix left_kernel(const ModMatrix& m) {
  // v m = 0  <=>  m^T v^T = 0
  ModMatrix t(m.cols, m.rows, m.p);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) t(j, i) = m(i, j);
  Echelon e = rref(std::move(t));
  std::vector<bool> is_pivot(m.rows, false);
  for (auto c : e.pivot_cols) is_pivot[c] = true;
  ModMatrix k(m.rows - e.rank, m.rows, m.p);
  std::size_t out = 0;
  for (std::size_t f = 0; f < m.rows; ++f) {
    if (is_pivot[f]) continue;
    k(out, f) = 1;
    for (std::size_t pr = 0; pr < e.rank; ++pr) {
      u64 v = e.reduced(pr, f);
      if (v) k(out, e.pivot_cols[pr]) = sub(0, v, m.p);
    }
    ++out;
  }
  return k;
}

u64 det(ModMatrix m) {
  if (m.rows != m.cols) throw std::invalid_argument("modp::det: non-square");
  const u64 p = m.p;
  const std::size_t n = m.rows;
  u64 d = 1 % p;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && m(piv, c) == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(c, j), m(piv, j));
      d = sub(0, d, p);
    }
    d = mul(d, m(c, c), p);
    u64 iv = inv(m(c, c), p);
    for (std::size_t i = c + 1; i < n; ++i) {
      if (!m(i, c)) continue;
      u64 f = mul(m(i, c), iv, p);
      for (std::size_t j = c; j < n; ++j) m(i, j) = sub(m(i, j), mul(f, m(c, j), p), p);
    }
  }
  return d;
}

std::vector<u64> charpoly(ModMatrix m) {
  if (m.rows != m.cols) throw std::invalid_argument("modp::charpoly: non-square");
  const u64 p = m.p;
  const std::size_t n = m.rows;
  // reduce to upper Hessenberg form by similarity
  for (std::size_t c = 0; c + 2 <= n; ++c) {
    std::size_t piv = c + 1;
    while (piv < n && m(piv, c) == 0) ++piv;
    if (piv == n) continue;
    if (piv != c + 1) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(piv, j), m(c + 1, j));
      for (std::size_t i = 0; i < n; ++i) std::swap(m(i, piv), m(i, c + 1));
    }
    u64 iv = inv(m(c + 1, c), p);
    for (std::size_t i = c + 2; i < n; ++i) {
      if (!m(i, c)) continue;
      u64 f = mul(m(i, c), iv, p);
      for (std::size_t j = 0; j < n; ++j) m(i, j) = sub(m(i, j), mul(f, m(c + 1, j), p), p);
      for (std::size_t k = 0; k < n; ++k) m(k, c + 1) = add(m(k, c + 1), mul(f, m(k, i), p), p);
    }
  }
  // Hessenberg recurrence
  std::vector<std::vector<u64>> polys(n + 1);
  polys[0] = {1 % p};
  for (std::size_t k = 1; k <= n; ++k) {
    std::vector<u64> next(k + 1, 0);
    const auto& prev = polys[k - 1];
    // (x - h_kk) * p_{k-1}
    for (std::size_t i = 0; i < prev.size(); ++i) {
      next[i + 1] = add(next[i + 1], prev[i], p);
      next[i] = sub(next[i], mul(m(k - 1, k - 1), prev[i], p), p);
    }
    u64 prod = 1 % p;
    for (std::size_t i = 1; i < k; ++i) {
      prod = mul(prod, m(k - i, k - i - 1), p);
      if (!prod) break;
      u64 coeff = mul(prod, m(k - i - 1, k - 1), p);
      if (!coeff) continue;
      const auto& q = polys[k - i - 1];
      for (std::size_t j = 0; j < q.size(); ++j) next[j] = sub(next[j], mul(coeff, q[j], p), p);
    }
    polys[k] = std::move(next);
  }
  return polys[n];
}

void CrtAccumulator::add(const std::vector<u64>& residues, u64 p) {
  if (residues.size() != values_.size()) throw std::invalid_argument("CrtAccumulator: size mismatch");
  Integer pz = static_cast<unsigned long>(p);
  if (modulus_ == 1) {
    for (std::size_t i = 0; i < residues.size(); ++i) values_[i] = static_cast<unsigned long>(residues[i]);
    modulus_ = pz;
    return;
  }
  u64 minv = inv(reduce(modulus_, p), p);
  Integer t;
  for (std::size_t i = 0; i < residues.size(); ++i) {
    u64 cur = reduce(values_[i], p);
    u64 delta = mul(sub(residues[i], cur, p), minv, p);
    if (delta) {
      t = modulus_ * static_cast<unsigned long>(delta);
      values_[i] += t;
    }
  }
  modulus_ *= pz;
}

std::vector<Integer> CrtAccumulator::symmetric() const {
  std::vector<Integer> out = values_;
  Integer half = modulus_ / 2;
  for (auto& v : out)
    if (v > half) v -= modulus_;
  return out;
}

Integer hadamard_bound(const IntMatrix& m) {
  // prod of row norms, computed as ceil(sqrt(prod of squared norms))
  Integer prod = 1;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Integer s = 0;
    for (const auto& x : m.row(i)) s += x * x;
    if (s == 0) return 0;
    prod *= s;
  }
  Integer r;
  mpz_sqrt(r.get_mpz_t(), prod.get_mpz_t());
  return r + 1;
}

}  // namespace maninforge::modp

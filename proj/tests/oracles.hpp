#pragma once

// Independent oracles: plain int64 / cofactor code, no library calls.

#include <algorithm>
#include <cstdlib>
#include <utility>
#include <vector>

namespace oracle {


inline long long cofactor_det(std::vector<std::vector<long long>> a) {
  const std::size_t n = a.size();
  if (n == 0) return 1;
  if (n == 1) return a[0][0];
  long long s = 0;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::vector<long long>> minor;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<long long> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != j) row.push_back(a[i][k]);
      minor.push_back(row);
    }
    long long term = a[0][j] * cofactor_det(minor);
    s += (j % 2 == 0) ? term : -term;
  }
  return s;
}

inline long long gcd_ll(long long a, long long b) {
  a = a < 0 ? -a : a;
  b = b < 0 ? -b : b;
  while (b) {
    long long t = a % b;
    a = b;
    b = t;
  }
  return a;
}

inline void subsets(std::size_t n, std::size_t k, std::size_t start, std::vector<std::size_t>& cur,
             std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = start; i < n; ++i) {
    cur.push_back(i);
    subsets(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

// Invariant factors from determinantal divisors d_k = gcd of k x k minors.
inline std::vector<long long> snf_by_minors(const std::vector<std::vector<long long>>& a) {
  const std::size_t r = a.size(), c = a.empty() ? 0 : a[0].size();
  std::vector<long long> out;
  long long prev = 1;
  for (std::size_t k = 1; k <= std::min(r, c); ++k) {
    std::vector<std::vector<std::size_t>> rs, cs;
    std::vector<std::size_t> cur;
    subsets(r, k, 0, cur, rs);
    subsets(c, k, 0, cur, cs);
    long long g = 0;
    for (auto& ri : rs)
      for (auto& ci : cs) {
        std::vector<std::vector<long long>> m(k, std::vector<long long>(k));
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t j = 0; j < k; ++j) m[i][j] = a[ri[i]][ci[j]];
        g = gcd_ll(g, cofactor_det(m));
      }
    if (g == 0) break;
    out.push_back(g / prev);
    prev = g;
  }
  return out;
}

// Brute-force unimodular row reduction (Euclid on int64, textbook order).
inline std::vector<std::vector<long long>> hnf_oracle(std::vector<std::vector<long long>> a) {
  const std::size_t rows = a.size(), cols = a.empty() ? 0 : a[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    while (true) {
      std::size_t nz = 0, piv = rows;
      for (std::size_t i = r; i < rows; ++i)
        if (a[i][c] != 0) {
          ++nz;
          if (piv == rows || std::llabs(a[i][c]) < std::llabs(a[piv][c])) piv = i;
        }
      if (nz == 0) break;
      std::swap(a[r], a[piv]);
      if (nz == 1) break;
      for (std::size_t i = r + 1; i < rows; ++i) {
        long long q = a[i][c] / a[r][c];
        for (std::size_t j = 0; j < cols; ++j) a[i][j] -= q * a[r][j];
      }
    }
    if (a[r][c] == 0) continue;
    if (a[r][c] < 0)
      for (auto& x : a[r]) x = -x;
    for (std::size_t i = 0; i < r; ++i) {
      long long q = a[i][c] / a[r][c];
      if (a[i][c] - q * a[r][c] < 0) --q;
      for (std::size_t j = 0; j < cols; ++j) a[i][j] -= q * a[r][j];
    }
    ++r;
  }
  return a;
}

// q-expansion a_1..a_len of prod eta(m z)^e, by repeated multiplication with (1 - q^m)
inline std::vector<long> eta_product(const std::vector<std::pair<long, int>>& factors, std::size_t len) {
  std::vector<long> f(len + 1, 0);
  f[0] = 1;
  for (const auto& [m, e] : factors)
    for (int rep = 0; rep < e; ++rep)
      for (std::size_t k = 1; static_cast<std::size_t>(m) * k <= len; ++k) {
        const std::size_t s = static_cast<std::size_t>(m) * k;
        for (std::size_t i = len; i >= s; --i) f[i] -= f[i - s];
      }
  std::vector<long> a(len + 1, 0);
  for (std::size_t i = 1; i <= len; ++i) a[i] = f[i - 1];
  return a;
}

}  // namespace oracle

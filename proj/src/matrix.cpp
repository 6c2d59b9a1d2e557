#include "maninforge/matrix.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace maninforge {

RatMatrix to_rational(const IntMatrix& m) {
  RatMatrix r(m.rows(), m.cols());
  for (std::size_t k = 0; k < m.data().size(); ++k) r.data()[k] = m.data()[k];
  return r;
}

std::pair<Integer, IntMatrix> clear_denominators(const RatMatrix& m) {
  Integer d = 1;
  for (const auto& x : m.data()) mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), x.get_den_mpz_t());
  IntMatrix n(m.rows(), m.cols());
  for (std::size_t k = 0; k < m.data().size(); ++k) {
    const auto& x = m.data()[k];
    n.data()[k] = x.get_num() * (d / x.get_den());
  }
  return {d, n};
}

IntVector row_times(std::span<const Integer> v, const IntMatrix& m) {
  if (v.size() != m.rows()) throw std::invalid_argument("row_times: dimension mismatch");
  IntVector out(m.cols());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0) continue;
    auto r = m.row(i);
    for (std::size_t j = 0; j < out.size(); ++j)
      if (r[j] != 0) out[j] += v[i] * r[j];
  }
  return out;
}

RatVector row_times(std::span<const Rational> v, const RatMatrix& m) {
  if (v.size() != m.rows()) throw std::invalid_argument("row_times: dimension mismatch");
  RatVector out(m.cols());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0) continue;
    auto r = m.row(i);
    for (std::size_t j = 0; j < out.size(); ++j)
      if (r[j] != 0) out[j] += v[i] * r[j];
  }
  return out;
}

void write_matrix(std::ostream& out, const IntMatrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << m(i, j).get_str();
    }
    out << '\n';
  }
}

IntMatrix read_matrix(std::istream& in) {
  std::size_t r = 0, c = 0;
  if (!(in >> r >> c)) throw std::runtime_error("read_matrix: missing header");
  IntMatrix m(r, c);
  std::string tok;
  for (std::size_t k = 0; k < r * c; ++k) {
    if (!(in >> tok)) throw std::runtime_error("read_matrix: truncated body");
    if (m.data()[k].set_str(tok, 10) != 0) throw std::runtime_error("read_matrix: bad integer '" + tok + "'");
  }
  return m;
}

std::string to_text(const IntMatrix& m) {
  std::ostringstream os;
  write_matrix(os, m);
  return os.str();
}

IntMatrix from_text(const std::string& s) {
  std::istringstream is(s);
  return read_matrix(is);
}

}  // namespace maninforge

#pragma once

// Exact arithmetic in the cyclotomic field Q(ζ_N): elements are rational
// polynomials in ζ_N of degree < φ(N), reduced modulo the N-th cyclotomic
// polynomial, so equality is a coefficient comparison.

#include <gmpxx.h>

#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "newform/errors.hpp"

namespace newform {

using Rational = mpq_class;

namespace detail {

/// Coefficients (lowest degree first) of the n-th cyclotomic polynomial.
inline std::vector<mpz_class> cyclotomic_polynomial(int n) {
  // Φ_n = (x^n − 1) / Π_{d | n, d < n} Φ_d, divided out one factor at a time.
  std::vector<mpz_class> num(static_cast<std::size_t>(n) + 1, 0);
  num[0] = -1;
  num[static_cast<std::size_t>(n)] = 1;
  for (int d = 1; d < n; ++d) {
    if (n % d != 0) continue;
    const std::vector<mpz_class> den = cyclotomic_polynomial(d);
    const std::size_t dd = den.size() - 1;
    std::vector<mpz_class> quot(num.size() - dd, 0);
    for (std::size_t k = num.size(); k-- > dd;) {
      const mpz_class c = num[k];  // den is monic
      quot[k - dd] = c;
      for (std::size_t j = 0; j <= dd; ++j) num[k - dd + j] -= c * den[j];
    }
    num = std::move(quot);
  }
  return num;
}

}  // namespace detail

/// Q(ζ_N) for a fixed N. Interned; compare fields by address.
class CycField {
 public:
  static const CycField& get(int n) {
    static std::mutex mu;
    static std::deque<std::unique_ptr<CycField>> registry;
    if (n < 1) throw std::invalid_argument("CycField: order must be positive");
    std::lock_guard<std::mutex> lock(mu);
    for (const auto& f : registry) {
      if (f->order_ == n) return *f;
    }
    registry.push_back(std::unique_ptr<CycField>(new CycField(n)));
    return *registry.back();
  }

  int order() const { return order_; }
  int degree() const { return degree_; }

  /// Coefficients of ζ_N^k, k taken modulo N.
  const std::vector<mpz_class>& power(std::int64_t k) const {
    std::int64_t r = k % order_;
    if (r < 0) r += order_;
    return powers_[static_cast<std::size_t>(r)];
  }

 private:
  explicit CycField(int n) : order_(n) {
    const std::vector<mpz_class> phi = detail::cyclotomic_polynomial(n);
    degree_ = static_cast<int>(phi.size()) - 1;
    std::vector<mpz_class> cur(static_cast<std::size_t>(degree_), 0);
    cur[0] = 1;
    for (int k = 0; k < n; ++k) {
      powers_.push_back(cur);
      // cur ← ζ · cur, reduced with the monic relation Φ_N(ζ) = 0.
      mpz_class top = cur.back();
      for (int j = degree_ - 1; j > 0; --j) cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)];
      cur[0] = 0;
      for (int j = 0; j < degree_; ++j) cur[static_cast<std::size_t>(j)] -= top * phi[static_cast<std::size_t>(j)];
    }
  }

  int order_;
  int degree_ = 0;
  std::vector<std::vector<mpz_class>> powers_;
};

/// Element of Q(ζ_N).
class CycScalar {
 public:
  CycScalar() = default;

  explicit CycScalar(const CycField& f, const Rational& r = 0) : f_(&f), c_(static_cast<std::size_t>(f.degree()), 0) {
    c_[0] = r;
  }

  static CycScalar root_of_unity(const CycField& f, std::int64_t k) {
    CycScalar x(f);
    const auto& pw = f.power(k);
    for (std::size_t j = 0; j < pw.size(); ++j) x.c_[j] = pw[j];
    return x;
  }

  const CycField& field() const { return *f_; }
  const std::vector<Rational>& coefficients() const { return c_; }

  bool is_zero() const {
    for (const auto& c : c_) {
      if (c != 0) return false;
    }
    return true;
  }

  bool is_rational() const {
    for (std::size_t j = 1; j < c_.size(); ++j) {
      if (c_[j] != 0) return false;
    }
    return true;
  }

  CycScalar operator-() const {
    CycScalar r = *this;
    for (auto& c : r.c_) c = -c;
    return r;
  }

  CycScalar& operator+=(const CycScalar& y) {
    check_same(y);
    for (std::size_t j = 0; j < c_.size(); ++j) c_[j] += y.c_[j];
    return *this;
  }
  CycScalar& operator-=(const CycScalar& y) {
    check_same(y);
    for (std::size_t j = 0; j < c_.size(); ++j) c_[j] -= y.c_[j];
    return *this;
  }
  friend CycScalar operator+(CycScalar x, const CycScalar& y) { return x += y; }
  friend CycScalar operator-(CycScalar x, const CycScalar& y) { return x -= y; }

  friend CycScalar operator*(const CycScalar& x, const CycScalar& y) {
    x.check_same(y);
    const std::size_t d = x.c_.size();
    std::vector<Rational> prod(2 * d - 1, 0);
    for (std::size_t i = 0; i < d; ++i) {
      if (x.c_[i] == 0) continue;
      for (std::size_t j = 0; j < d; ++j) {
        if (y.c_[j] != 0) prod[i + j] += x.c_[i] * y.c_[j];
      }
    }
    CycScalar r(*x.f_);
    for (std::size_t k = 0; k < prod.size(); ++k) {
      if (prod[k] == 0) continue;
      if (k < d) {
        r.c_[k] += prod[k];
        continue;
      }
      const auto& pw = x.f_->power(static_cast<std::int64_t>(k));
      for (std::size_t j = 0; j < d; ++j) {
        if (pw[j] != 0) r.c_[j] += prod[k] * pw[j];
      }
    }
    return r;
  }

  friend CycScalar operator*(CycScalar x, const Rational& s) {
    for (auto& c : x.c_) c *= s;
    return x;
  }

  CycScalar inverse() const;

  friend CycScalar operator/(const CycScalar& x, const CycScalar& y) { return x * y.inverse(); }

  friend bool operator==(const CycScalar& x, const CycScalar& y) {
    x.check_same(y);
    return x.c_ == y.c_;
  }
  friend bool operator!=(const CycScalar& x, const CycScalar& y) { return !(x == y); }

  /// Human-readable form in z = ζ_N, e.g. "1/9", "-3", "2 + z^3".
  std::string to_string() const {
    std::ostringstream os;
    bool first = true;
    for (std::size_t j = 0; j < c_.size(); ++j) {
      if (c_[j] == 0) continue;
      Rational c = c_[j];
      if (!first) {
        os << (c < 0 ? " - " : " + ");
        if (c < 0) c = -c;
      }
      const bool unit_coeff = (c == 1 || c == -1) && j > 0;
      if (unit_coeff) {
        if (c < 0) os << "-";
      } else {
        os << c.get_str();
        if (j > 0) os << "*";
      }
      if (j == 1) os << "z";
      if (j > 1) os << "z^" << j;
      first = false;
    }
    return first ? "0" : os.str();
  }

 private:
  void check_same(const CycScalar& y) const {
    if (f_ == nullptr || y.f_ == nullptr) throw std::logic_error("CycScalar: uninitialized operand");
    if (f_ != y.f_) throw std::invalid_argument("CycScalar: operands from different cyclotomic fields");
  }

  const CycField* f_ = nullptr;
  std::vector<Rational> c_;
};

/// Dense matrix over Q(ζ_N), row-major.
using CycMatrix = std::vector<std::vector<CycScalar>>;

namespace detail {

/// Row-reduces `m` in place over a field given by callables; returns the rank.
template <typename T, typename IsZero, typename Inv>
int row_reduce(std::vector<std::vector<T>>& m, IsZero is_zero, Inv inv) {
  const std::size_t rows = m.size();
  if (rows == 0) return 0;
  const std::size_t cols = m[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && is_zero(m[piv][c])) ++piv;
    if (piv == rows) continue;
    std::swap(m[piv], m[r]);
    const T scale = inv(m[r][c]);
    for (std::size_t j = c; j < cols; ++j) m[r][j] = m[r][j] * scale;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || is_zero(m[i][c])) continue;
      const T f = m[i][c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] = m[i][j] - f * m[r][j];
    }
    ++r;
  }
  return static_cast<int>(r);
}

}  // namespace detail

inline CycScalar CycScalar::inverse() const {
  if (is_zero()) throw DivisionByIndistinguishableZero("CycScalar::inverse of zero");
  if (is_rational()) {
    CycScalar r(*f_);
    r.c_[0] = 1 / c_[0];
    return r;
  }
  // Solve M·y = e_0 where column j of M holds the coefficients of ζ^j · x.
  const std::size_t d = c_.size();
  std::vector<std::vector<Rational>> aug(d, std::vector<Rational>(d + 1, 0));
  for (std::size_t j = 0; j < d; ++j) {
    const CycScalar col = *this * root_of_unity(*f_, static_cast<std::int64_t>(j));
    for (std::size_t i = 0; i < d; ++i) aug[i][j] = col.c_[i];
  }
  aug[0][d] = 1;
  const int rank = detail::row_reduce(
      aug, [](const Rational& v) { return v == 0; }, [](const Rational& v) { return Rational(1 / v); });
  if (rank != static_cast<int>(d)) throw std::logic_error("CycScalar::inverse: singular multiplication matrix");
  CycScalar y(*f_);
  // Full rank, so the reduced form is the identity on the first d columns.
  for (std::size_t j = 0; j < d; ++j) y.c_[j] = aug[j][d];
  return y;
}

/// Exact rank over Q(ζ_N).
inline int rank(CycMatrix m) {
  return detail::row_reduce(
      m, [](const CycScalar& v) { return v.is_zero(); }, [](const CycScalar& v) { return v.inverse(); });
}

/// (positive rational) · ζ_N^k: the shape of every character value here.
struct Monomial {
  Rational magnitude = 1;
  std::int64_t root = 0;  // exponent of ζ_N, kept in [0, N)

  CycScalar to_scalar(const CycField& f) const { return CycScalar::root_of_unity(f, root) * magnitude; }

  Monomial times(const Monomial& o, int n) const {
    return {magnitude * o.magnitude, ((root + o.root) % n + n) % n};
  }
  Monomial pow(std::int64_t e, int n) const {
    Rational m = 1;
    Rational base = e >= 0 ? magnitude : Rational(1 / magnitude);
    for (std::int64_t k = 0; k < (e >= 0 ? e : -e); ++k) m *= base;
    std::int64_t r = (root * (e % n)) % n;
    if (r < 0) r += n;
    return {m, r};
  }
  friend bool operator==(const Monomial& a, const Monomial& b) {
    return a.magnitude == b.magnitude && a.root == b.root;
  }
};

inline Rational rational_pow(const Rational& base, int e) {
  Rational r = 1;
  const Rational b = e >= 0 ? base : Rational(1 / base);
  for (int k = 0; k < (e >= 0 ? e : -e); ++k) r *= b;
  return r;
}

}  // namespace newform

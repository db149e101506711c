#pragma once

// Finite-precision arithmetic in F = Q_p (p odd) and in its unramified
// quadratic extension E = F[√ε].
//
// Elements are "p-adic floats": ϖ^v · u with u a unit known modulo p^r, where
// r (the effective precision) never exceeds the field's relative precision.
// A sum that cancels every known digit becomes a zero flagged with the
// absolute precision at which it is known to vanish.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <deque>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "newform/errors.hpp"

namespace newform {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using u128 = unsigned __int128;
using i128 = __int128;

/// Absolute precision of an exact zero; also the valuation reported for zero.
inline constexpr int kInfinity = std::numeric_limits<int>::max() / 4;

inline bool is_prime(i64 n) {
  if (n < 2) return false;
  for (i64 d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

/// Smallest positive integer that is a quadratic non-residue modulo p.
inline int choose_eps(int p) {
  if (p % 2 == 0 || !is_prime(p)) {
    throw std::invalid_argument("choose_eps: p must be an odd prime, got " + std::to_string(p));
  }
  std::vector<bool> square(p, false);
  for (i64 x = 0; x < p; ++x) square[(x * x) % p] = true;
  for (int e = 1; e < p; ++e) {
    if (!square[e]) return e;
  }
  throw std::logic_error("choose_eps: no non-residue found");
}

namespace detail {

inline u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>((static_cast<u128>(a) * b) % m); }

inline u64 powmod(u64 a, u64 e, u64 m) {
  u64 r = 1 % m;
  a %= m;
  while (e > 0) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

/// Inverse of a modulo m; a must be coprime to m.
inline u64 invmod(u64 a, u64 m) {
  i128 t = 0, new_t = 1;
  i128 r = m, new_r = a % m;
  while (new_r != 0) {
    i128 q = r / new_r;
    std::tie(t, new_t) = std::make_pair(new_t, t - q * new_t);
    std::tie(r, new_r) = std::make_pair(new_r, r - q * new_r);
  }
  if (r != 1) throw DivisionByIndistinguishableZero("invmod: residue is not a unit");
  if (t < 0) t += m;
  return static_cast<u64>(t);
}

inline u64 reduce_signed(i64 x, u64 m) {
  i64 r = x % static_cast<i64>(m);
  if (r < 0) r += static_cast<i64>(m);
  return static_cast<u64>(r);
}

}  // namespace detail

/// Session parameters: the prime, the relative precision, the guard band and ε.
/// Instances are interned, so a `const FieldParams&` stays valid for the life
/// of the process and can be compared by address.
class FieldParams {
 public:
  static const FieldParams& get(int p, int rel_prec = 24, int guard = 4, int eps = 0) {
    static std::mutex mu;
    static std::deque<std::unique_ptr<FieldParams>> registry;
    if (p % 2 == 0 || !is_prime(p)) {
      throw std::invalid_argument("FieldParams: p must be an odd prime, got " + std::to_string(p));
    }
    if (eps == 0) eps = choose_eps(p);
    std::lock_guard<std::mutex> lock(mu);
    for (const auto& fp : registry) {
      if (fp->p == p && fp->rel_prec == rel_prec && fp->guard == guard && fp->eps == eps) return *fp;
    }
    registry.push_back(std::unique_ptr<FieldParams>(new FieldParams(p, rel_prec, guard, eps)));
    return *registry.back();
  }

  int p;
  int rel_prec;
  int guard;
  int eps;

  /// p^k for 0 ≤ k ≤ rel_prec.
  u64 pow(int k) const { return pows_.at(static_cast<std::size_t>(k)); }
  int q() const { return p; }

 private:
  FieldParams(int p_, int rel_prec_, int guard_, int eps_) : p(p_), rel_prec(rel_prec_), guard(guard_), eps(eps_) {
    if (guard < 1 || rel_prec <= guard) {
      throw std::invalid_argument("FieldParams: need 1 <= guard < rel_prec");
    }
    if (eps <= 0 || eps >= p) throw std::invalid_argument("FieldParams: eps must lie in [1, p)");
    for (i64 x = 0; x < p; ++x) {
      if ((x * x) % p == eps) {
        throw std::invalid_argument("FieldParams: eps = " + std::to_string(eps) + " is a square mod " +
                                    std::to_string(p));
      }
    }
    constexpr u64 kLimit = u64{1} << 62;
    pows_.push_back(1);
    for (int k = 1; k <= rel_prec; ++k) {
      if (pows_.back() > kLimit / static_cast<u64>(p)) {
        throw std::invalid_argument("FieldParams: p^rel_prec exceeds 2^62; lower rel_prec");
      }
      pows_.push_back(pows_.back() * static_cast<u64>(p));
    }
  }

  std::vector<u64> pows_;
};

/// Element of F = Q_p at finite relative precision.
class FElem {
 public:
  FElem() = default;

  static FElem zero(const FieldParams& fp, int abs_prec = kInfinity) {
    FElem z;
    z.fp_ = &fp;
    z.zero_ = true;
    z.val_ = abs_prec;
    return z;
  }

  static FElem from_int(const FieldParams& fp, i64 n) {
    if (n == 0) return zero(fp);
    int v = 0;
    while (n % fp.p == 0) {
      n /= fp.p;
      ++v;
    }
    return from_unit(fp, v, detail::reduce_signed(n, fp.pow(fp.rel_prec)), fp.rel_prec);
  }

  static FElem from_rational(const FieldParams& fp, i64 num, i64 den) {
    if (den == 0) throw DivisionByIndistinguishableZero("from_rational: zero denominator");
    return from_int(fp, num) * from_int(fp, den).inverse();
  }

  /// ϖ^val · unit with `unit` known modulo p^prec.
  static FElem from_unit(const FieldParams& fp, int val, u64 unit, int prec) {
    FElem x;
    x.fp_ = &fp;
    x.zero_ = false;
    x.val_ = val;
    x.prec_ = std::min(prec, fp.rel_prec);
    if (x.prec_ < 1) throw PrecisionLoss("from_unit: no significant digits");
    x.unit_ = unit % fp.pow(x.prec_);
    if (x.unit_ % fp.p == 0) throw std::invalid_argument("from_unit: residue is not a unit");
    return x;
  }

  static FElem uniformizer_power(const FieldParams& fp, int k) { return from_unit(fp, k, 1, fp.rel_prec); }

  const FieldParams& params() const { return *fp_; }
  bool is_zero() const { return zero_; }
  bool is_exact_zero() const { return zero_ && val_ >= kInfinity; }
  int val() const { return zero_ ? kInfinity : val_; }
  int abs_prec() const { return zero_ ? val_ : val_ + prec_; }
  int eff_prec() const { return zero_ ? 0 : prec_; }
  u64 unit() const { return unit_; }

  FElem operator-() const {
    if (zero_) return *this;
    FElem r = *this;
    if (unit_ != 0) r.unit_ = fp_->pow(prec_) - unit_;
    return r;
  }

  friend FElem operator+(const FElem& x, const FElem& y) {
    check_same(x, y);
    const FieldParams& fp = *x.fp_;
    if (x.zero_ && y.zero_) return zero(fp, std::min(x.val_, y.val_));
    if (x.zero_) return y.truncated(x.val_);
    if (y.zero_) return x.truncated(y.val_);
    const int v = std::min(x.val_, y.val_);
    const int a = std::min(x.abs_prec(), y.abs_prec());
    const int m = a - v;
    if (m <= 0) return zero(fp, a);
    const u64 mod = fp.pow(m);
    auto scaled = [&](const FElem& z) -> u64 {
      const int shift = z.val_ - v;
      if (shift >= m) return 0;
      return detail::mulmod(z.unit_ % mod, fp.pow(shift), mod);
    };
    u64 s = (scaled(x) + scaled(y)) % mod;
    if (s == 0) return zero(fp, a);
    int k = 0;
    while (s % static_cast<u64>(fp.p) == 0) {
      s /= static_cast<u64>(fp.p);
      ++k;
    }
    return from_unit(fp, v + k, s, m - k);
  }

  friend FElem operator-(const FElem& x, const FElem& y) { return x + (-y); }

  friend FElem operator*(const FElem& x, const FElem& y) {
    check_same(x, y);
    const FieldParams& fp = *x.fp_;
    if (x.zero_ || y.zero_) {
      if (x.is_exact_zero() || y.is_exact_zero()) return zero(fp);
      const int bound = x.val_ + y.val_;  // valuation or absolute precision
      return zero(fp, std::min(bound, kInfinity));
    }
    x.require_guard();
    y.require_guard();
    const int prec = std::min(x.prec_, y.prec_);
    const u64 mod = fp.pow(prec);
    return from_unit(fp, x.val_ + y.val_, detail::mulmod(x.unit_ % mod, y.unit_ % mod, mod), prec);
  }

  FElem inverse() const {
    if (zero_) throw DivisionByIndistinguishableZero("FElem::inverse of a value indistinguishable from zero");
    require_guard();
    return from_unit(*fp_, -val_, detail::invmod(unit_, fp_->pow(prec_)), prec_);
  }

  friend FElem operator/(const FElem& x, const FElem& y) { return x * y.inverse(); }

  /// Multiplication by ϖ^k.
  FElem shift(int k) const {
    FElem r = *this;
    if (zero_) {
      if (!is_exact_zero()) r.val_ += k;
    } else {
      r.val_ += k;
    }
    return r;
  }

  /// Equality at effective precision: the difference vanishes to its known digits.
  friend bool operator==(const FElem& x, const FElem& y) { return (x - y).is_zero(); }
  friend bool operator!=(const FElem& x, const FElem& y) { return !(x == y); }

  /// x ∈ 𝔭^k. Raises AmbiguousValuation for a zero not known to absolute precision k.
  bool in_ideal(int k) const {
    if (!zero_) return val_ >= k;
    if (val_ >= k) return true;
    throw AmbiguousValuation("value known only modulo p^" + std::to_string(val_) + ", cannot decide membership in p^" +
                             std::to_string(k));
  }

  /// Residue of an integral element modulo p^m.
  u64 residue(int m) const {
    if (m <= 0) return 0;
    if (m > fp_->rel_prec) throw std::invalid_argument("residue: modulus exceeds relative precision");
    const u64 mod = fp_->pow(m);
    if (zero_) {
      if (val_ < m) throw PrecisionLoss("residue: zero known only modulo p^" + std::to_string(val_));
      return 0;
    }
    if (val_ < 0) throw std::invalid_argument("residue: element is not integral");
    if (val_ >= m) return 0;
    if (abs_prec() < m) throw PrecisionLoss("residue: precision below requested modulus p^" + std::to_string(m));
    return detail::mulmod(fp_->pow(val_), unit_ % fp_->pow(m - val_), mod);
  }

  /// Equal in the first `digits` significant digits.
  friend bool eq_to_prec(const FElem& x, const FElem& y, int digits) {
    const FElem d = x - y;
    if (d.is_zero()) return true;
    const int ref = std::min(x.val_, y.val_);
    return d.val_ >= ref + digits;
  }

  /// Signed integer representative of the unit part in (-p^r/2, p^r/2].
  i64 signed_unit(int digits) const {
    const u64 mod = fp_->pow(digits);
    const u64 u = unit_ % mod;
    return u > mod / 2 ? static_cast<i64>(u) - static_cast<i64>(mod) : static_cast<i64>(u);
  }

 private:
  static void check_same(const FElem& x, const FElem& y) {
    if (x.fp_ == nullptr || y.fp_ == nullptr) throw std::logic_error("FElem: uninitialized operand");
    if (x.fp_ != y.fp_) throw std::invalid_argument("FElem: operands from different fields");
  }

  /// Cancellation may leave fewer digits than the guard band; such a value can
  /// still be compared and tested for ideal membership, but multiplying or
  /// inverting it raises PrecisionLoss.
  void require_guard() const {
    if (!zero_ && prec_ < fp_->guard) {
      throw PrecisionLoss("operand carries " + std::to_string(prec_) + " significant digits (guard band " +
                          std::to_string(fp_->guard) + ")");
    }
  }

  FElem truncated(int abs) const {
    if (zero_) return zero(*fp_, std::min(val_, abs));
    if (abs >= abs_prec()) return *this;
    if (abs <= val_) return zero(*fp_, abs);
    return from_unit(*fp_, val_, unit_, abs - val_);
  }

  const FieldParams* fp_ = nullptr;
  bool zero_ = true;
  int val_ = kInfinity;  // valuation, or absolute precision when zero_
  u64 unit_ = 0;
  int prec_ = 0;
};

/// Element a + b√ε of the unramified quadratic extension E.
class EElem {
 public:
  EElem() = default;
  EElem(FElem a, FElem b) : a_(std::move(a)), b_(std::move(b)) {}
  explicit EElem(const FElem& a) : a_(a), b_(FElem::zero(a.params())) {}

  static EElem zero(const FieldParams& fp) { return {FElem::zero(fp), FElem::zero(fp)}; }
  static EElem one(const FieldParams& fp) { return from_int(fp, 1); }
  static EElem from_int(const FieldParams& fp, i64 n) { return EElem(FElem::from_int(fp, n)); }
  static EElem from_rational(const FieldParams& fp, i64 num, i64 den) {
    return EElem(FElem::from_rational(fp, num, den));
  }
  static EElem sqrt_eps(const FieldParams& fp) { return {FElem::zero(fp), FElem::from_int(fp, 1)}; }
  static EElem uniformizer_power(const FieldParams& fp, int k) { return EElem(FElem::uniformizer_power(fp, k)); }

  const FieldParams& params() const { return a_.params(); }
  const FElem& re() const { return a_; }
  const FElem& im() const { return b_; }

  bool is_zero() const { return a_.is_zero() && b_.is_zero(); }
  int abs_prec() const { return std::min(a_.abs_prec(), b_.abs_prec()); }

  /// ν_E(x) = min(ν(a), ν(b)); kInfinity for zero.
  int val() const {
    if (is_zero()) return kInfinity;
    if (a_.is_zero()) {
      if (a_.abs_prec() < b_.val()) throw AmbiguousValuation("EElem::val: real part too imprecise");
      return b_.val();
    }
    if (b_.is_zero()) {
      if (b_.abs_prec() < a_.val()) throw AmbiguousValuation("EElem::val: √ε part too imprecise");
      return a_.val();
    }
    return std::min(a_.val(), b_.val());
  }

  bool in_ideal(int k) const { return a_.in_ideal(k) && b_.in_ideal(k); }

  EElem conj() const { return {a_, -b_}; }
  FElem norm() const { return a_ * a_ - eps() * b_ * b_; }
  FElem trace() const { return a_ + a_; }

  EElem operator-() const { return {-a_, -b_}; }
  friend EElem operator+(const EElem& x, const EElem& y) { return {x.a_ + y.a_, x.b_ + y.b_}; }
  friend EElem operator-(const EElem& x, const EElem& y) { return {x.a_ - y.a_, x.b_ - y.b_}; }
  friend EElem operator*(const EElem& x, const EElem& y) {
    return {x.a_ * y.a_ + x.eps() * x.b_ * y.b_, x.a_ * y.b_ + x.b_ * y.a_};
  }
  friend EElem operator*(const EElem& x, const FElem& s) { return {x.a_ * s, x.b_ * s}; }

  EElem inverse() const {
    if (is_zero()) throw DivisionByIndistinguishableZero("EElem::inverse of a value indistinguishable from zero");
    const FElem n_inv = norm().inverse();
    return {a_ * n_inv, -(b_ * n_inv)};
  }
  friend EElem operator/(const EElem& x, const EElem& y) { return x * y.inverse(); }

  EElem shift(int k) const { return {a_.shift(k), b_.shift(k)}; }

  /// x / ϖ^{ν(x)}, a unit of 𝔬_E.
  EElem unit_part() const { return shift(-val()); }

  /// Residues (a mod p^m, b mod p^m) of an integral element.
  std::pair<u64, u64> residue(int m) const { return {a_.residue(m), b_.residue(m)}; }

  friend bool operator==(const EElem& x, const EElem& y) { return x.a_ == y.a_ && x.b_ == y.b_; }
  friend bool operator!=(const EElem& x, const EElem& y) { return !(x == y); }
  friend bool eq_to_prec(const EElem& x, const EElem& y, int digits) {
    return eq_to_prec(x.a_, y.a_, digits) && eq_to_prec(x.b_, y.b_, digits);
  }

  /// Canonical literal "vE^k*(u0+u1*s)"; "0" for zero.
  std::string to_string() const;

 private:
  FElem eps() const { return FElem::from_int(params(), params().eps); }

  FElem a_;
  FElem b_;
};

namespace detail {

/// Integer representative of z / ϖ^k modulo p^digits (z integral after the shift).
inline u64 scaled_residue(const FElem& z, int k, int digits) {
  if (z.is_zero() || digits <= 0) return 0;
  const FElem s = z.shift(-k);
  const u64 mod = z.params().pow(digits);
  if (s.val() >= digits) return 0;
  return detail::mulmod(z.params().pow(s.val()), s.unit() % z.params().pow(digits - s.val()), mod);
}

}  // namespace detail

inline std::string EElem::to_string() const {
  if (is_zero()) return "0";
  const int k = val();
  const int digits = std::min(abs_prec() - k, params().rel_prec);
  std::ostringstream os;
  os << "vE^" << k << "*(" << detail::scaled_residue(a_, k, digits) << "+" << detail::scaled_residue(b_, k, digits)
     << "*s)";
  return os.str();
}

inline std::string to_string(const FElem& x) { return EElem(x).to_string(); }

namespace detail {

/// Recursive-descent parser for element literals. Accepted forms include the
/// canonical "vE^k*(u0+u1*s)" as well as "-3", "s", "2*s", "1/2", "(1-s)",
/// "vE^-2", "-vE^1*(1+2*s)". Integer literals carry absolute precision rel_prec.
class ElementParser {
 public:
  ElementParser(const FieldParams& fp, std::string_view text) : fp_(fp), s_(text) {}

  EElem parse() {
    skip_ws();
    EElem x = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing characters");
    return x;
  }

 private:
  EElem expr() {
    EElem acc = EElem::zero(fp_);
    bool first = true;
    while (true) {
      skip_ws();
      int sign = 1;
      if (peek() == '+' || peek() == '-') {
        sign = peek() == '-' ? -1 : 1;
        ++pos_;
      } else if (!first) {
        break;
      }
      EElem t = term();
      acc = sign > 0 ? acc + t : acc - t;
      first = false;
      skip_ws();
      if (peek() != '+' && peek() != '-') break;
    }
    return acc;
  }

  EElem term() {
    EElem acc = factor();
    while (true) {
      skip_ws();
      if (peek() == '*') {
        ++pos_;
        acc = acc * factor();
      } else if (peek() == '/') {
        ++pos_;
        acc = acc / factor();
      } else {
        return acc;
      }
    }
  }

  EElem factor() {
    skip_ws();
    if (peek() == '(') {
      ++pos_;
      EElem x = expr();
      skip_ws();
      expect(')');
      return x;
    }
    if (peek() == 's') {
      ++pos_;
      return EElem::sqrt_eps(fp_);
    }
    if (s_.substr(pos_, 3) == "vE^") {
      pos_ += 3;
      const i64 k = integer();
      return EElem::uniformizer_power(fp_, static_cast<int>(k));
    }
    // An integer literal is a residue modulo p^rel_prec.
    if (std::isdigit(static_cast<unsigned char>(peek()))) {
      return EElem(FElem::from_int(fp_, integer()) + FElem::zero(fp_, fp_.rel_prec));
    }
    fail("unexpected character");
  }

  i64 integer() {
    skip_ws();
    bool neg = false;
    if (peek() == '-' || peek() == '+') {
      neg = peek() == '-';
      ++pos_;
    }
    if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected integer");
    i64 v = 0;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      if (v > (std::numeric_limits<i64>::max() - 9) / 10) fail("integer literal too large");
      v = v * 10 + (s_[pos_] - '0');
      ++pos_;
    }
    return neg ? -v : v;
  }

  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("element literal \"" + std::string(s_) + "\": " + what + " at offset " + std::to_string(pos_));
  }

  const FieldParams& fp_;
  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline EElem parse_element(const FieldParams& fp, std::string_view text) {
  return detail::ElementParser(fp, text).parse();
}

}  // namespace newform

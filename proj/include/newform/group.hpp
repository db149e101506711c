#pragma once

// The unramified unitary group G = { g ∈ GL_3(E) | g·σ(g) = 1 },
// σ(X) = J·ᵗX̄·J, together with its standard elements and subgroups.

#include <array>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "newform/errors.hpp"
#include "newform/localfield.hpp"

namespace newform {

/// 3×3 matrix over E. `certified()` records that g·σ(g) = 1 was verified.
class GMat {
 public:
  GMat() = default;

  static GMat from_entries(const std::array<EElem, 9>& entries) {
    GMat g;
    g.e_ = entries;
    return g;
  }

  static GMat identity(const FieldParams& fp) {
    std::array<EElem, 9> e;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) e[idx(r, c)] = r == c ? EElem::one(fp) : EElem::zero(fp);
    }
    GMat g = from_entries(e);
    g.certified_ = true;
    return g;
  }

  static GMat diagonal(const EElem& a, const EElem& b, const EElem& c) {
    const FieldParams& fp = a.params();
    std::array<EElem, 9> e;
    e.fill(EElem::zero(fp));
    e[0] = a;
    e[4] = b;
    e[8] = c;
    return from_entries(e);
  }

  /// Entry in row r, column c, both 0-based.
  const EElem& operator()(int r, int c) const { return e_[idx(r, c)]; }
  const FieldParams& params() const { return e_[0].params(); }
  bool certified() const { return certified_; }

  friend GMat operator*(const GMat& x, const GMat& y) {
    std::array<EElem, 9> e;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        EElem s = x(r, 0) * y(0, c);
        s = s + x(r, 1) * y(1, c);
        s = s + x(r, 2) * y(2, c);
        e[idx(r, c)] = std::move(s);
      }
    }
    GMat g = from_entries(e);
    g.certified_ = x.certified_ && y.certified_;
    return g;
  }

  /// σ(X) = J·ᵗX̄·J, i.e. σ(X)_{rc} = conj(X_{2−c, 2−r}).
  GMat sigma() const {
    std::array<EElem, 9> e;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) e[idx(r, c)] = (*this)(2 - c, 2 - r).conj();
    }
    GMat g = from_entries(e);
    g.certified_ = certified_;
    return g;
  }

  /// g^{-1} = σ(g); only defined for certified elements.
  GMat inverse() const {
    if (!certified_) throw NotUnitary("GMat::inverse requires a certified element of G");
    return sigma();
  }

  /// Entrywise equality at effective precision.
  bool equals(const GMat& o) const {
    for (std::size_t k = 0; k < 9; ++k) {
      if (e_[k] != o.e_[k]) return false;
    }
    return true;
  }

  bool is_unitary() const {
    const GMat prod = raw_product(*this, sigma());
    return prod.equals(identity(params()));
  }

  /// Returns a certified copy, or throws NotUnitary.
  GMat certify() const {
    if (!is_unitary()) throw NotUnitary("matrix does not satisfy g·σ(g) = 1 at working precision: " + to_string());
    GMat g = *this;
    g.certified_ = true;
    return g;
  }

  bool is_upper_triangular() const { return (*this)(1, 0).is_zero() && (*this)(2, 0).is_zero() && (*this)(2, 1).is_zero(); }
  bool is_lower_triangular() const { return (*this)(0, 1).is_zero() && (*this)(0, 2).is_zero() && (*this)(1, 2).is_zero(); }
  bool is_diagonal() const { return is_upper_triangular() && is_lower_triangular(); }

  /// Matrix literal: rows separated by ';', entries by ','.
  std::string to_string() const {
    std::ostringstream os;
    for (int r = 0; r < 3; ++r) {
      if (r > 0) os << ";";
      for (int c = 0; c < 3; ++c) {
        if (c > 0) os << ",";
        os << (*this)(r, c).to_string();
      }
    }
    return os.str();
  }

 private:
  static constexpr std::size_t idx(int r, int c) { return static_cast<std::size_t>(3 * r + c); }

  static GMat raw_product(const GMat& x, const GMat& y) {
    GMat g = x * y;
    g.certified_ = false;
    return g;
  }

  std::array<EElem, 9> e_;
  bool certified_ = false;
};

inline GMat parse_matrix(const FieldParams& fp, std::string_view text) {
  std::array<EElem, 9> e;
  std::size_t pos = 0;
  for (int r = 0; r < 3; ++r) {
    const std::size_t row_end = r < 2 ? text.find(';', pos) : text.size();
    if (row_end == std::string_view::npos) throw ParseError("matrix literal: expected 3 rows separated by ';'");
    const std::string_view row = text.substr(pos, row_end - pos);
    std::size_t cpos = 0;
    for (int c = 0; c < 3; ++c) {
      const std::size_t cell_end = c < 2 ? row.find(',', cpos) : row.size();
      if (cell_end == std::string_view::npos) throw ParseError("matrix literal: expected 3 entries per row");
      e[static_cast<std::size_t>(3 * r + c)] = parse_element(fp, row.substr(cpos, cell_end - cpos));
      cpos = cell_end + 1;
    }
    pos = row_end + 1;
  }
  return GMat::from_entries(e);
}

// ---------------------------------------------------------------------------
// Named elements.

/// u(x, y) = [[1, x, y], [0, 1, −x̄], [0, 0, 1]], requires y + ȳ + x·x̄ = 0.
inline GMat u_elem(const EElem& x, const EElem& y) {
  const FieldParams& fp = x.params();
  if (!(y + y.conj() + x * x.conj()).is_zero()) {
    throw IsotropyViolation("u(x, y): y + conj(y) + x·conj(x) != 0 for x = " + x.to_string() + ", y = " + y.to_string());
  }
  const EElem one = EElem::one(fp), zero = EElem::zero(fp);
  GMat g = GMat::from_entries({one, x, y, zero, one, -x.conj(), zero, zero, one});
  return g.certify();
}

/// û(x, y) = [[1, 0, 0], [x, 1, 0], [y, −x̄, 1]], requires y + ȳ + x·x̄ = 0.
inline GMat uhat_elem(const EElem& x, const EElem& y) {
  const FieldParams& fp = x.params();
  if (!(y + y.conj() + x * x.conj()).is_zero()) {
    throw IsotropyViolation("û(x, y): y + conj(y) + x·conj(x) != 0 for x = " + x.to_string() +
                            ", y = " + y.to_string());
  }
  const EElem one = EElem::one(fp), zero = EElem::zero(fp);
  GMat g = GMat::from_entries({one, zero, zero, x, one, zero, y, -x.conj(), one});
  return g.certify();
}

/// diag(a, β, ā^{-1}) with N(β) = 1.
inline GMat torus_elem(const EElem& a, const EElem& beta) {
  const FieldParams& fp = a.params();
  if (beta.norm() != FElem::from_int(fp, 1)) throw NotNormOne("torus(a, β): N(β) != 1 for β = " + beta.to_string());
  return GMat::diagonal(a, beta, a.conj().inverse()).certify();
}

/// t(a) = diag(a, 1, ā^{-1}) ∈ T_H.
inline GMat t_elem(const EElem& a) { return torus_elem(a, EElem::one(a.params())); }

/// ι(λ) = λ·1 for λ ∈ E¹.
inline GMat iota_elem(const EElem& lambda) {
  if (lambda.norm() != FElem::from_int(lambda.params(), 1)) throw NotNormOne("ι(λ): N(λ) != 1");
  return GMat::diagonal(lambda, lambda, lambda).certify();
}

/// t_n: antidiagonal (ϖ^{-n}, 1, ϖ^n).
inline GMat t_n_elem(const FieldParams& fp, int n) {
  const EElem zero = EElem::zero(fp), one = EElem::one(fp);
  return GMat::from_entries({zero, zero, EElem::uniformizer_power(fp, -n), zero, one, zero,
                             EElem::uniformizer_power(fp, n), zero, zero})
      .certify();
}

/// ζ = diag(ϖ, 1, ϖ^{-1}).
inline GMat zeta_elem(const FieldParams& fp) {
  return GMat::diagonal(EElem::uniformizer_power(fp, 1), EElem::one(fp), EElem::uniformizer_power(fp, -1)).certify();
}

/// γ_i = û(ϖ^i, −ϖ^{2i}/2).
inline GMat gamma_elem(const FieldParams& fp, int i) {
  const EElem x = EElem::uniformizer_power(fp, i);
  const EElem y = EElem::uniformizer_power(fp, 2 * i) * EElem::from_rational(fp, -1, 2);
  return uhat_elem(x, y);
}

// ---------------------------------------------------------------------------
// Subgroups and membership.

struct SubgroupSpec {
  enum class Tag { G, B, T, U, Uhat, T_H, Z, K, BcapConj };
  Tag tag = Tag::G;
  int n = 0;  // level for K and BcapConj
  int i = 0;  // coset index for BcapConj

  static SubgroupSpec G() { return {Tag::G}; }
  static SubgroupSpec B() { return {Tag::B}; }
  static SubgroupSpec T() { return {Tag::T}; }
  static SubgroupSpec U() { return {Tag::U}; }
  static SubgroupSpec Uhat() { return {Tag::Uhat}; }
  static SubgroupSpec T_H() { return {Tag::T_H}; }
  static SubgroupSpec Z() { return {Tag::Z}; }
  static SubgroupSpec K(int n) { return {Tag::K, n}; }
  /// B ∩ γ_i K_n γ_i^{-1}.
  static SubgroupSpec BcapConj(int i, int n) { return {Tag::BcapConj, n, i}; }
};

namespace detail {

/// Ideal exponents of the K_n pattern; the (1,1) slot is checked as 1 + 𝔭^n.
inline std::array<int, 9> k_pattern(int n) { return {0, 0, -n, n, n, 0, n, n, 0}; }

inline bool in_k(const GMat& g, int n) {
  const auto pat = k_pattern(n);
  const FieldParams& fp = g.params();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      EElem x = g(r, c);
      if (r == 1 && c == 1) x = x - EElem::one(fp);
      if (!x.in_ideal(pat[static_cast<std::size_t>(3 * r + c)])) return false;
    }
  }
  return true;
}

}  // namespace detail

inline bool membership(const GMat& g, const SubgroupSpec& spec) {
  using Tag = SubgroupSpec::Tag;
  const FieldParams& fp = g.params();
  if (!g.is_unitary()) return false;
  const EElem one = EElem::one(fp);
  switch (spec.tag) {
    case Tag::G:
      return true;
    case Tag::B:
      return g.is_upper_triangular();
    case Tag::T:
      return g.is_diagonal();
    case Tag::U:
      return g.is_upper_triangular() && g(0, 0) == one && g(1, 1) == one && g(2, 2) == one;
    case Tag::Uhat:
      return g.is_lower_triangular() && g(0, 0) == one && g(1, 1) == one && g(2, 2) == one;
    case Tag::T_H:
      return g.is_diagonal() && g(1, 1) == one;
    case Tag::Z:
      return g.is_diagonal() && g(0, 0) == g(1, 1) && g(1, 1) == g(2, 2);
    case Tag::K:
      return detail::in_k(g, spec.n);
    case Tag::BcapConj: {
      if (!g.is_upper_triangular()) return false;
      const GMat gi = gamma_elem(fp, spec.i);
      return detail::in_k(gi.sigma() * g * gi, spec.n);
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Iwasawa decomposition G = B·K_0.

struct Iwasawa {
  GMat b;
  GMat k;
};

/// Factor g = b·k with b ∈ B and k ∈ K_0, pivoting on the isotropic bottom row.
inline Iwasawa iwasawa(const GMat& g) {
  if (!g.certified()) throw NotUnitary("iwasawa: input must be certified");
  const FieldParams& fp = g.params();
  GMat h = g;
  GMat flip = GMat::identity(fp);
  // If w3 is not of minimal valuation in the primitive bottom row, isotropy
  // forces w1 to be; t_0 swaps the two.
  {
    const EElem& w1 = h(2, 0);
    const EElem& w3 = h(2, 2);
    if (w3.is_zero() || (!w1.is_zero() && w1.val() < w3.val()) ||
        (!h(2, 1).is_zero() && h(2, 1).val() < w3.val())) {
      flip = t_n_elem(fp, 0);
      h = h * flip;
    }
  }
  const EElem& w3 = h(2, 2);
  if (w3.is_zero()) throw PrecisionLoss("iwasawa: cannot certify a unit pivot in the bottom row");
  const EElem w3inv = w3.inverse();
  const EElem d = h(2, 0) * w3inv;
  const EElem c = -(h(2, 1) * w3inv).conj();
  if (d.val() < 0 || c.val() < 0) throw PrecisionLoss("iwasawa: pivot is not of minimal valuation");
  const GMat k0 = uhat_elem(c, d);
  GMat b = h * k0.inverse();
  if (!b.is_upper_triangular()) throw PrecisionLoss("iwasawa: residual is not upper triangular: " + b.to_string());
  GMat k = k0 * flip;
  return {b, k};
}

// ---------------------------------------------------------------------------
// Random sampling.

namespace detail {

inline FElem random_f_unit(const FieldParams& fp, std::mt19937_64& rng, int val = 0) {
  std::uniform_int_distribution<u64> dist(1, fp.pow(fp.rel_prec) - 1);
  u64 u;
  do {
    u = dist(rng);
  } while (u % static_cast<u64>(fp.p) == 0);
  return FElem::from_unit(fp, val, u, fp.rel_prec);
}

/// Uniform element of 𝔭^lo (mod 𝔭^{lo+rel_prec}), including zero.
inline FElem random_f_in_ideal(const FieldParams& fp, std::mt19937_64& rng, int lo) {
  std::uniform_int_distribution<u64> dist(0, fp.pow(fp.rel_prec) - 1);
  u64 u = dist(rng);
  if (u == 0) return FElem::zero(fp);
  int v = lo;
  while (u % static_cast<u64>(fp.p) == 0) {
    u /= static_cast<u64>(fp.p);
    ++v;
  }
  return FElem::from_unit(fp, v, u, fp.rel_prec);
}

inline EElem random_e_in_ideal(const FieldParams& fp, std::mt19937_64& rng, int lo) {
  return {random_f_in_ideal(fp, rng, lo), random_f_in_ideal(fp, rng, lo)};
}

inline EElem random_e_unit(const FieldParams& fp, std::mt19937_64& rng, int val = 0) {
  while (true) {
    EElem x = random_e_in_ideal(fp, rng, 0);
    if (!x.is_zero() && x.val() == 0) return x.shift(val);
  }
}

/// Cayley element (1 − a√ε)(1 + a√ε)^{-1}.
inline EElem cayley_raw(const FElem& a) {
  const FieldParams& fp = a.params();
  const EElem as = EElem(FElem::zero(fp), a);
  const EElem one = EElem::one(fp);
  return (one - as) / (one + as);
}

/// y with y + ȳ + x·x̄ = 0 and imaginary part s: y = −N(x)/2 + s√ε.
inline EElem isotropic_partner(const EElem& x, const FElem& s) {
  const FieldParams& fp = x.params();
  return {-(x.norm() * FElem::from_rational(fp, 1, 2)), s};
}

inline GMat random_k_generator(const FieldParams& fp, int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, 5);
  switch (pick(rng)) {
    case 0: {
      const EElem c = random_e_in_ideal(fp, rng, n);
      return uhat_elem(c, isotropic_partner(c, random_f_in_ideal(fp, rng, n)));
    }
    case 1: {
      const EElem c = random_e_in_ideal(fp, rng, 0);
      return u_elem(c, isotropic_partner(c, random_f_in_ideal(fp, rng, -n)));
    }
    case 2:
      return t_elem(random_e_unit(fp, rng));
    case 3:
      return iota_elem(cayley_raw(random_f_in_ideal(fp, rng, n)));
    case 4:
      return torus_elem(random_e_unit(fp, rng), cayley_raw(random_f_in_ideal(fp, rng, n)));
    default:
      return t_n_elem(fp, n);
  }
}

}  // namespace detail

/// Random element of B with small valuations: t(a)·diag(1, β, 1)·u(x, y).
inline GMat sample_borel(const FieldParams& fp, std::mt19937_64& rng, int max_val = 2) {
  std::uniform_int_distribution<int> vdist(-max_val, max_val);
  std::uniform_int_distribution<int> coin(0, 1);
  const EElem a = detail::random_e_unit(fp, rng, vdist(rng));
  EElem beta = detail::cayley_raw(detail::random_f_in_ideal(fp, rng, vdist(rng)));
  if (coin(rng) == 1) beta = -beta;
  const EElem x = coin(rng) == 1 ? detail::random_e_in_ideal(fp, rng, vdist(rng)) : EElem::zero(fp);
  const FElem s = detail::random_f_in_ideal(fp, rng, vdist(rng));
  return torus_elem(a, beta) * u_elem(x, detail::isotropic_partner(x, s));
}

/// Random certified element of the named subgroup.
///
/// K(n) is sampled as a random word in {û(c, d) : c, d ∈ 𝔭^n}, {u(c, d) : c ∈ 𝔬,
/// d ∈ 𝔭^{-n}}, t(𝔬_E^×), ι(E¹_n), diag(𝔬_E^×, E¹_n) and t_n. Whether these
/// generate all of K_n is not claimed; callers check membership independently.
inline GMat sample(const SubgroupSpec& spec, const FieldParams& fp, std::mt19937_64& rng, int word_length = 4) {
  using Tag = SubgroupSpec::Tag;
  switch (spec.tag) {
    case Tag::B:
      return sample_borel(fp, rng);
    case Tag::K: {
      GMat g = GMat::identity(fp);
      for (int k = 0; k < word_length; ++k) g = g * detail::random_k_generator(fp, spec.n, rng);
      return g;
    }
    case Tag::G: {
      GMat g = GMat::identity(fp);
      std::uniform_int_distribution<int> coin(0, 1);
      for (int k = 0; k < word_length; ++k) {
        g = g * sample_borel(fp, rng, 1);
        if (coin(rng) == 1) g = g * t_n_elem(fp, 0);
      }
      return g;
    }
    case Tag::T:
      return torus_elem(detail::random_e_unit(fp, rng, 0),
                        detail::cayley_raw(detail::random_f_in_ideal(fp, rng, 0)));
    case Tag::T_H:
      return t_elem(detail::random_e_unit(fp, rng, 0));
    case Tag::U: {
      const EElem x = detail::random_e_in_ideal(fp, rng, 0);
      return u_elem(x, detail::isotropic_partner(x, detail::random_f_in_ideal(fp, rng, 0)));
    }
    case Tag::Uhat: {
      const EElem x = detail::random_e_in_ideal(fp, rng, 0);
      return uhat_elem(x, detail::isotropic_partner(x, detail::random_f_in_ideal(fp, rng, 0)));
    }
    case Tag::Z:
      return iota_elem(detail::cayley_raw(detail::random_f_in_ideal(fp, rng, 0)));
    case Tag::BcapConj:
      break;
  }
  throw std::invalid_argument("sample: use sample_stabilizer for B ∩ γ_i K_n γ_i^{-1}");
}

// ---------------------------------------------------------------------------

namespace detail {

/// Inverse of an upper-triangular 3×3 matrix by back substitution.
inline GMat upper_inverse(const GMat& m) {
  const FieldParams& fp = m.params();
  const EElem d1 = m(0, 0).inverse(), d2 = m(1, 1).inverse(), d3 = m(2, 2).inverse();
  const EElem zero = EElem::zero(fp);
  const EElem i12 = -(m(0, 1) * d1 * d2);
  const EElem i23 = -(m(1, 2) * d2 * d3);
  const EElem i13 = (m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1)) * d1 * d2 * d3;
  return GMat::from_entries({d1, i12, i13, zero, d2, i23, zero, zero, d3});
}

}  // namespace detail

/// (1 − X)(1 + X)^{-1} for the nilpotent-plus-diagonal X built from a ∈ 𝔭_F^{2i−n}:
/// an element of B ∩ γ_i K_n γ_i^{-1} whose (2,2)-entry is the Cayley element of a.
inline GMat intertwine_element(const FieldParams& fp, int i, int n, const FElem& a) {
  if (i < (n + 1) / 2 || i > n) {
    throw std::invalid_argument("intertwine_element: need ceil(n/2) <= i <= n");
  }
  if (!a.is_zero() && a.val() < 2 * i - n) throw std::invalid_argument("intertwine_element: a must lie in p^{2i-n}");
  const EElem as = EElem(FElem::zero(fp), a);
  const EElem zero = EElem::zero(fp), one = EElem::one(fp);
  const EElem x12 = as.shift(-i), x13 = as.shift(-2 * i), x22 = as, x23 = as.shift(-i);
  const GMat minus = GMat::from_entries({one, -x12, -x13, zero, one - x22, -x23, zero, zero, one});
  const GMat plus = GMat::from_entries({one, x12, x13, zero, one + x22, x23, zero, zero, one});
  return (minus * detail::upper_inverse(plus)).certify();
}

}  // namespace newform

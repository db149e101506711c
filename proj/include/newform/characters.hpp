#pragma once

// Characters of 𝔬_E^×, E^× and E¹ with exact conductors. Finite quotients are
// modeled by enumeration: every residue class is mapped to its exponent vector
// in a fixed generating set, so discrete logarithms are table lookups.

#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "newform/cyclotomic.hpp"
#include "newform/errors.hpp"
#include "newform/localfield.hpp"

namespace newform {

/// Residue class a + b√ε of 𝔬_E modulo p^m, with modular arithmetic.
struct ERes {
  u64 a = 0;
  u64 b = 0;

  static ERes mul(const ERes& x, const ERes& y, u64 mod, u64 eps) {
    const u64 bd = detail::mulmod(x.b, y.b, mod);
    return {(detail::mulmod(x.a, y.a, mod) + detail::mulmod(eps % mod, bd, mod)) % mod,
            (detail::mulmod(x.a, y.b, mod) + detail::mulmod(x.b, y.a, mod)) % mod};
  }

  static ERes pow(ERes x, u64 e, u64 mod, u64 eps) {
    ERes r{1 % mod, 0};
    while (e > 0) {
      if (e & 1) r = mul(r, x, mod, eps);
      x = mul(x, x, mod, eps);
      e >>= 1;
    }
    return r;
  }

  /// Inverse via x^{-1} = x̄ / N(x).
  static ERes inverse(const ERes& x, u64 mod, u64 eps) {
    const u64 n = (detail::mulmod(x.a, x.a, mod) + mod - detail::mulmod(eps % mod, detail::mulmod(x.b, x.b, mod), mod)) % mod;
    const u64 ni = detail::invmod(n, mod);
    return {detail::mulmod(x.a, ni, mod), detail::mulmod((mod - x.b) % mod, ni, mod)};
  }

  EElem lift(const FieldParams& fp) const {
    return {FElem::from_int(fp, static_cast<i64>(a)), FElem::from_int(fp, static_cast<i64>(b))};
  }

  friend bool operator==(const ERes& x, const ERes& y) { return x.a == y.a && x.b == y.b; }
};

namespace detail {

/// A generator of the cyclic group (𝔬_E/𝔭)^× = 𝔽_{q²}^×.
inline ERes primitive_residue(const FieldParams& fp) {
  const u64 p = static_cast<u64>(fp.p);
  const u64 order = p * p - 1;
  std::vector<u64> prime_factors;
  u64 m = order;
  for (u64 d = 2; d * d <= m; ++d) {
    if (m % d != 0) continue;
    prime_factors.push_back(d);
    while (m % d == 0) m /= d;
  }
  if (m > 1) prime_factors.push_back(m);
  for (u64 a = 0; a < p; ++a) {
    for (u64 b = 0; b < p; ++b) {
      if (a == 0 && b == 0) continue;
      const ERes x{a, b};
      bool generator = true;
      for (u64 f : prime_factors) {
        if (ERes::pow(x, order / f, p, static_cast<u64>(fp.eps)) == ERes{1, 0}) {
          generator = false;
          break;
        }
      }
      if (generator) return x;
    }
  }
  throw std::logic_error("primitive_residue: no generator found");
}

/// A primitive root modulo p.
inline u64 primitive_root_mod_p(int p) {
  for (u64 g = 2; g < static_cast<u64>(p); ++g) {
    bool ok = true;
    for (u64 d = 1; d < static_cast<u64>(p - 1); ++d) {
      if ((p - 1) % d == 0 && powmod(g, d, static_cast<u64>(p)) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) return g;
  }
  return 1;  // p = 3 is handled by g = 2; p = 2 never occurs
}

inline ERes cayley_residue(u64 a, u64 mod, u64 eps) {
  const ERes minus{1 % mod, (mod - a % mod) % mod};
  const ERes plus{1 % mod, a % mod};
  return ERes::mul(minus, ERes::inverse(plus, mod, eps), mod, eps);
}

}  // namespace detail

/// Finite abelian group (𝔬_E/𝔭^L)^× or E¹/E¹_L given as a product of cyclic
/// groups on explicit generators, with discrete logarithm by table lookup.
class UnitGroupModel {
 public:
  enum class Kind { Units, E1 };

  static const UnitGroupModel& get(const FieldParams& fp, Kind kind, int level) {
    static std::mutex mu;
    static std::deque<std::unique_ptr<UnitGroupModel>> registry;
    if (level < 1) throw std::invalid_argument("UnitGroupModel: level must be >= 1");
    if (level + fp.guard > fp.rel_prec) throw PrecisionLoss("UnitGroupModel: relative precision too low for level");
    std::lock_guard<std::mutex> lock(mu);
    for (const auto& m : registry) {
      if (m->fp_ == &fp && m->kind_ == kind && m->level_ == level) return *m;
    }
    registry.push_back(std::unique_ptr<UnitGroupModel>(new UnitGroupModel(fp, kind, level)));
    return *registry.back();
  }

  const FieldParams& params() const { return *fp_; }
  Kind kind() const { return kind_; }
  int level() const { return level_; }
  u64 modulus() const { return mod_; }
  const std::vector<ERes>& generators() const { return gens_; }
  const std::vector<i64>& orders() const { return orders_; }
  std::size_t rank() const { return gens_.size(); }

  i64 order() const {
    i64 r = 1;
    for (i64 o : orders_) r *= o;
    return r;
  }

  /// Exponent of the group (lcm of the cyclic orders).
  i64 exponent() const {
    i64 r = 1;
    for (i64 o : orders_) r = std::lcm(r, o);
    return r;
  }

  /// Theoretical order: (q²−1)q^{2(L−1)} for units, (q+1)q^{L−1} for E¹.
  i64 expected_order() const {
    const i64 q = fp_->p;
    i64 r = kind_ == Kind::Units ? q * q - 1 : q + 1;
    for (int k = 1; k < level_; ++k) r *= kind_ == Kind::Units ? q * q : q;
    return r;
  }

  bool contains(const ERes& x) const { return table_.count(key(x)) > 0; }

  std::vector<i64> dlog(const ERes& x) const {
    const auto it = table_.find(key({x.a % mod_, x.b % mod_}));
    if (it == table_.end()) {
      if (kind_ == Kind::E1) throw NotNormOne("dlog: residue is not the class of a norm-one element");
      throw std::invalid_argument("dlog: residue is not a unit");
    }
    return it->second;
  }

  /// Discrete log of a unit of 𝔬_E (of norm one for E¹), read modulo p^L.
  std::vector<i64> dlog(const EElem& x) const {
    const auto [a, b] = x.residue(level_);
    return dlog(ERes{a, b});
  }

  ERes element(const std::vector<i64>& exps) const {
    ERes r{1, 0};
    for (std::size_t k = 0; k < gens_.size(); ++k) {
      const i64 e = ((exps[k] % orders_[k]) + orders_[k]) % orders_[k];
      r = ERes::mul(r, ERes::pow(gens_[k], static_cast<u64>(e), mod_, eps_), mod_, eps_);
    }
    return r;
  }

  /// Exponent vectors generating the level-m subgroup: the whole group for
  /// m = 0, (1 + 𝔭^m) resp. E¹_m for 1 ≤ m < L, and nothing for m ≥ L.
  std::vector<std::vector<i64>> filtration_generators(int m) const {
    std::vector<std::vector<i64>> out;
    if (m >= level_) return out;
    if (m <= 0) {
      for (std::size_t k = 0; k < gens_.size(); ++k) {
        std::vector<i64> e(gens_.size(), 0);
        e[k] = 1;
        out.push_back(e);
      }
      return out;
    }
    const u64 pm = fp_->pow(m);
    if (kind_ == Kind::Units) {
      out.push_back(dlog(ERes{(1 + pm) % mod_, 0}));
      out.push_back(dlog(ERes{1, pm % mod_}));
    } else {
      out.push_back(dlog(detail::cayley_residue(pm, mod_, eps_)));
    }
    return out;
  }

  /// All residue classes, in exponent-vector order.
  std::vector<ERes> elements() const {
    std::vector<ERes> out;
    out.reserve(table_.size());
    for_each_exponent([&](const std::vector<i64>& e) { out.push_back(element(e)); });
    return out;
  }

  template <typename Fn>
  void for_each_exponent(Fn fn) const {
    std::vector<i64> e(gens_.size(), 0);
    while (true) {
      fn(e);
      std::size_t k = gens_.size();
      while (k > 0) {
        --k;
        if (++e[k] < orders_[k]) break;
        e[k] = 0;
        if (k == 0) return;
      }
      if (gens_.empty()) return;
    }
  }

 private:
  UnitGroupModel(const FieldParams& fp, Kind kind, int level)
      : fp_(&fp), kind_(kind), level_(level), mod_(fp.pow(level)), eps_(static_cast<u64>(fp.eps)) {
    const u64 p = static_cast<u64>(fp.p);
    const i64 pl1 = static_cast<i64>(fp.pow(level - 1));
    // Teichmüller lift of a generator of 𝔽_{q²}^×.
    const ERes g0 = detail::primitive_residue(fp);
    const ERes teich = ERes::pow(g0, fp.pow(2 * (level - 1)), mod_, eps_);
    if (kind == Kind::Units) {
      gens_ = {teich, ERes{(1 + p) % mod_, 0}, ERes{1 % mod_, p % mod_}};
      orders_ = {static_cast<i64>(p * p - 1), pl1, pl1};
    } else {
      gens_ = {ERes::pow(teich, p - 1, mod_, eps_), detail::cayley_residue(p, mod_, eps_)};
      orders_ = {static_cast<i64>(p + 1), pl1};
    }
    for_each_exponent([&](const std::vector<i64>& e) {
      const auto [it, inserted] = table_.emplace(key(element(e)), e);
      if (!inserted) throw std::logic_error("UnitGroupModel: generators are not independent");
    });
    if (static_cast<i64>(table_.size()) != expected_order()) {
      throw std::logic_error("UnitGroupModel: enumerated order " + std::to_string(table_.size()) +
                             " differs from the theoretical order " + std::to_string(expected_order()));
    }
  }

  u64 key(const ERes& x) const { return x.a * mod_ + x.b; }

  const FieldParams* fp_;
  Kind kind_;
  int level_;
  u64 mod_;
  u64 eps_;
  std::vector<ERes> gens_;
  std::vector<i64> orders_;
  std::unordered_map<u64, std::vector<i64>> table_;
};

/// Session data shared by every character: the prime, the model level L and
/// the cyclotomic order N = lcm(q²−1, q^{L−1}) of the value field.
class CharacterSession {
 public:
  static const CharacterSession& get(const FieldParams& fp, int level) {
    static std::mutex mu;
    static std::deque<std::unique_ptr<CharacterSession>> registry;
    if (level < 1) level = 1;
    std::lock_guard<std::mutex> lock(mu);
    for (const auto& s : registry) {
      if (s->fp_ == &fp && s->level_ == level) return *s;
    }
    registry.push_back(std::unique_ptr<CharacterSession>(new CharacterSession(fp, level)));
    return *registry.back();
  }

  const FieldParams& params() const { return *fp_; }
  int level() const { return level_; }
  int cyclotomic_order() const { return n_; }
  const CycField& field() const { return CycField::get(n_); }
  const UnitGroupModel& units() const { return *units_; }
  const UnitGroupModel& e1() const { return *e1_; }
  int q() const { return fp_->p; }

  /// Generators of (𝔬_F/𝔭^L)^×: a Teichmüller lift of a primitive root and 1 + p.
  std::vector<EElem> f_unit_generators() const {
    const u64 mod = fp_->pow(level_);
    const u64 r = detail::powmod(detail::primitive_root_mod_p(fp_->p), fp_->pow(level_ - 1), mod);
    return {EElem::from_int(*fp_, static_cast<i64>(r)), EElem::from_int(*fp_, 1 + fp_->p)};
  }

 private:
  CharacterSession(const FieldParams& fp, int level)
      : fp_(&fp),
        level_(level),
        units_(&UnitGroupModel::get(fp, UnitGroupModel::Kind::Units, level)),
        e1_(&UnitGroupModel::get(fp, UnitGroupModel::Kind::E1, level)) {
    n_ = static_cast<int>(std::lcm(units_->exponent(), e1_->exponent()));
  }

  const FieldParams* fp_;
  int level_;
  const UnitGroupModel* units_;
  const UnitGroupModel* e1_;
  int n_ = 1;
};

/// Character of a UnitGroupModel: generator k ↦ ζ_N^{j_k·N/ord_k}.
class FiniteChar {
 public:
  FiniteChar() = default;
  FiniteChar(const CharacterSession& s, const UnitGroupModel& g, std::vector<i64> j)
      : s_(&s), g_(&g), j_(std::move(j)) {
    for (std::size_t k = 0; k < j_.size(); ++k) j_[k] = ((j_[k] % g_->orders()[k]) + g_->orders()[k]) % g_->orders()[k];
  }

  static FiniteChar trivial(const CharacterSession& s, const UnitGroupModel& g) {
    return {s, g, std::vector<i64>(g.rank(), 0)};
  }

  const CharacterSession& session() const { return *s_; }
  const UnitGroupModel& group() const { return *g_; }
  const std::vector<i64>& j() const { return j_; }

  /// Root index r with χ(element(exps)) = ζ_N^r.
  i64 root(const std::vector<i64>& exps) const {
    const i64 n = s_->cyclotomic_order();
    i128 r = 0;
    for (std::size_t k = 0; k < j_.size(); ++k) {
      r += static_cast<i128>(j_[k]) * exps[k] * (n / g_->orders()[k]);
    }
    i64 out = static_cast<i64>(r % n);
    return out < 0 ? out + n : out;
  }

  i64 root(const ERes& x) const { return root(g_->dlog(x)); }
  i64 root(const EElem& x) const { return root(g_->dlog(x)); }

  bool is_trivial() const {
    for (i64 v : j_) {
      if (v != 0) return false;
    }
    return true;
  }

  /// Smallest m with χ trivial on the level-m subgroup.
  int conductor() const {
    for (int m = 0; m <= g_->level(); ++m) {
      bool trivial = true;
      for (const auto& e : g_->filtration_generators(m)) {
        if (root(e) != 0) {
          trivial = false;
          break;
        }
      }
      if (trivial) return m;
    }
    return g_->level();
  }

  friend FiniteChar operator*(const FiniteChar& x, const FiniteChar& y) {
    std::vector<i64> j(x.j_.size());
    for (std::size_t k = 0; k < j.size(); ++k) j[k] = x.j_[k] + y.j_[k];
    return {*x.s_, *x.g_, j};
  }

  /// Character with the given root indices on the generators (each must be a
  /// multiple of N/ord_k).
  static FiniteChar from_generator_roots(const CharacterSession& s, const UnitGroupModel& g,
                                         const std::vector<i64>& roots) {
    const i64 n = s.cyclotomic_order();
    std::vector<i64> j(g.rank());
    for (std::size_t k = 0; k < j.size(); ++k) {
      const i64 w = n / g.orders()[k];
      const i64 r = ((roots[k] % n) + n) % n;
      if (r % w != 0) throw std::logic_error("from_generator_roots: value is not of the generator's order");
      j[k] = r / w;
    }
    return {s, g, j};
  }

  friend bool operator==(const FiniteChar& x, const FiniteChar& y) { return x.g_ == y.g_ && x.j_ == y.j_; }

 private:
  const CharacterSession* s_ = nullptr;
  const UnitGroupModel* g_ = nullptr;
  std::vector<i64> j_;
};

/// All characters of exact conductor c, in lexicographic order of j-vectors.
inline std::vector<FiniteChar> enumerate_characters(const CharacterSession& s, const UnitGroupModel& g,
                                                    int conductor) {
  std::vector<FiniteChar> out;
  if (conductor > g.level()) throw std::invalid_argument("enumerate_characters: conductor exceeds the model level");
  g.for_each_exponent([&](const std::vector<i64>& j) {
    FiniteChar chi(s, g, j);
    if (chi.conductor() == conductor) out.push_back(chi);
  });
  return out;
}

// ---------------------------------------------------------------------------

/// Quasi-character μ1 of E^×: unit character plus the value at ϖ.
class QuasiCharE {
 public:
  QuasiCharE() = default;
  QuasiCharE(FiniteChar unit_char, Monomial pi_value) : chi_(std::move(unit_char)), pi_(std::move(pi_value)) {
    if (pi_.magnitude <= 0) throw std::invalid_argument("QuasiCharE: μ1(ϖ) must have positive magnitude");
  }

  static QuasiCharE unramified(const CharacterSession& s, const Monomial& pi_value) {
    return {FiniteChar::trivial(s, s.units()), pi_value};
  }
  /// |·|_E^e, so that |ϖ|_E = q^{-2}.
  static QuasiCharE abs_power(const CharacterSession& s, int e) {
    return unramified(s, {rational_pow(Rational(s.q()), -2 * e), 0});
  }

  const CharacterSession& session() const { return chi_.session(); }
  const FiniteChar& unit_char() const { return chi_; }
  const Monomial& pi_value() const { return pi_; }
  int conductor() const { return chi_.conductor(); }

  Monomial operator()(const EElem& x) const {
    const int k = x.val();
    const int n = session().cyclotomic_order();
    const Monomial pk = pi_.pow(k, n);
    return pk.times({1, chi_.root(x.shift(-k))}, n);
  }

  bool is_trivial() const { return chi_.is_trivial() && pi_ == Monomial{1, 0}; }

  friend bool operator==(const QuasiCharE& x, const QuasiCharE& y) { return x.chi_ == y.chi_ && x.pi_ == y.pi_; }

 private:
  FiniteChar chi_;
  Monomial pi_;
};

/// Character μ2 of E¹.
class CharE1 {
 public:
  CharE1() = default;
  explicit CharE1(FiniteChar chi) : chi_(std::move(chi)) {}

  static CharE1 trivial(const CharacterSession& s) { return CharE1(FiniteChar::trivial(s, s.e1())); }

  const CharacterSession& session() const { return chi_.session(); }
  const FiniteChar& character() const { return chi_; }
  int conductor() const { return chi_.conductor(); }
  bool is_trivial() const { return chi_.is_trivial(); }

  Monomial operator()(const EElem& lambda) const { return {1, chi_.root(lambda)}; }

  friend bool operator==(const CharE1& x, const CharE1& y) { return x.chi_ == y.chi_; }

 private:
  FiniteChar chi_;
};

/// μ = μ1 ⊗ μ2 on T: μ(diag(a, β, ā^{-1})) = μ1(a)μ2(β).
struct TorusChar {
  QuasiCharE mu1;
  CharE1 mu2;

  const CharacterSession& session() const { return mu1.session(); }
  int c1() const { return mu1.conductor(); }
  int c2() const { return mu2.conductor(); }

  Monomial operator()(const EElem& a, const EElem& beta) const {
    return mu1(a).times(mu2(beta), session().cyclotomic_order());
  }
};

/// Norm-one Cayley element (1 − a√ε)(1 + a√ε)^{-1}, a ∈ 𝔬_F.
inline EElem cayley(const FElem& a) {
  if (!a.in_ideal(0)) throw std::invalid_argument("cayley: argument must be integral");
  const FieldParams& fp = a.params();
  const EElem as(FElem::zero(fp), a);
  const EElem one = EElem::one(fp);
  return (one - as) / (one + as);
}

/// ω_{E/F}(ϖ^k u) = (−1)^k on F^×.
inline Monomial omega_ef(const CharacterSession& s, const FElem& x) {
  const int n = s.cyclotomic_order();
  return {1, (x.val() % 2 == 0) ? 0 : n / 2};
}

/// μ̃1(a) = μ1(a)μ2(ā/a).
inline QuasiCharE twisted_char(const QuasiCharE& mu1, const CharE1& mu2) {
  const CharacterSession& s = mu1.session();
  const FieldParams& fp = s.params();
  std::vector<i64> roots;
  for (const ERes& g : s.units().generators()) {
    const EElem x = g.lift(fp);
    const Monomial v = mu1(x).times(mu2(x.conj() / x), s.cyclotomic_order());
    roots.push_back(v.root);
  }
  return {FiniteChar::from_generator_roots(s, s.units(), roots), mu1.pi_value()};
}

enum class ReducibilityClass { Irreducible, R1, R2, R3 };
enum class UnramifiedCase { None, RU1, RU2, RU3 };

inline std::string to_string(ReducibilityClass c) {
  switch (c) {
    case ReducibilityClass::Irreducible:
      return "IRRED";
    case ReducibilityClass::R1:
      return "R1";
    case ReducibilityClass::R2:
      return "R2";
    case ReducibilityClass::R3:
      return "R3";
  }
  return "?";
}

inline std::string to_string(UnramifiedCase c) {
  switch (c) {
    case UnramifiedCase::None:
      return "none";
    case UnramifiedCase::RU1:
      return "RU1";
    case UnramifiedCase::RU2:
      return "RU2";
    case UnramifiedCase::RU3:
      return "RU3";
  }
  return "?";
}

struct Classification {
  ReducibilityClass cls = ReducibilityClass::Irreducible;
  UnramifiedCase ru = UnramifiedCase::None;
  bool unramified = false;  // c(μ1) = 0
  int sign = 0;             // exponent sign ± in R1/R2 (and RU1/RU2), 0 otherwise

  bool reducible() const { return cls != ReducibilityClass::Irreducible; }

  /// "IRRED", "R3 (ramified)", "RU2-" and so on.
  std::string tag() const {
    if (!reducible()) return "IRRED";
    const std::string s = sign > 0 ? "+" : sign < 0 ? "-" : "";
    if (unramified) return to_string(ru) + s;
    return to_string(cls) + s + " (ramified)";
  }
};

namespace detail {

inline bool trivial_on_f_units(const QuasiCharE& chi) {
  for (const EElem& g : chi.session().f_unit_generators()) {
    if (chi(g).root != 0) return false;
  }
  return true;
}

}  // namespace detail

inline Classification classify_reducibility(const QuasiCharE& mu1, const CharE1& mu2) {
  const CharacterSession& s = mu1.session();
  const Rational q = s.q();
  const int n = s.cyclotomic_order();
  const QuasiCharE tilde = twisted_char(mu1, mu2);
  const Monomial pi = tilde.pi_value();
  Classification out;
  out.unramified = mu1.conductor() == 0;
  if (tilde.conductor() == 0 && pi.root == 0 && (pi.magnitude == 1 / (q * q) || pi.magnitude == q * q)) {
    out.cls = ReducibilityClass::R1;
    out.sign = pi.magnitude < 1 ? 1 : -1;
  } else if (detail::trivial_on_f_units(tilde) && pi.root == n / 2 && (pi.magnitude == 1 / q || pi.magnitude == q)) {
    out.cls = ReducibilityClass::R2;
    out.sign = pi.magnitude < 1 ? 1 : -1;
  } else if (detail::trivial_on_f_units(tilde) && pi == Monomial{1, 0} && !tilde.is_trivial()) {
    out.cls = ReducibilityClass::R3;
  }
  if (out.unramified) {
    const Monomial m = mu1.pi_value();
    if (mu2.is_trivial() && m.root == 0 && (m.magnitude == 1 / (q * q) || m.magnitude == q * q)) {
      out.ru = UnramifiedCase::RU1;
    } else if (m.root == n / 2 && (m.magnitude == 1 / q || m.magnitude == q)) {
      out.ru = UnramifiedCase::RU2;
    } else if (mu1.is_trivial() && !mu2.is_trivial()) {
      out.ru = UnramifiedCase::RU3;
    }
  }
  return out;
}

/// Central character b ↦ μ1(b)μ2(b) on E¹ ≅ Z, with its conductor n_π.
struct CentralCharacter {
  CharE1 omega;
  int conductor = 0;
};

inline CentralCharacter central_character(const QuasiCharE& mu1, const CharE1& mu2) {
  const CharacterSession& s = mu1.session();
  std::vector<i64> roots;
  for (const ERes& g : s.e1().generators()) {
    const EElem b = g.lift(s.params());
    roots.push_back(mu1(b).times(mu2(b), s.cyclotomic_order()).root);
  }
  CharE1 omega(FiniteChar::from_generator_roots(s, s.e1(), roots));
  return {omega, omega.conductor()};
}

/// Subgroup of E¹/E¹_m generated by the Cayley classes of a ∈ 𝔬_F/𝔭^m,
/// returned as its size (closure computed by breadth-first multiplication).
inline i64 cayley_generated_order(const FieldParams& fp, int m) {
  const u64 mod = fp.pow(m);
  const u64 eps = static_cast<u64>(fp.eps);
  std::vector<ERes> gens;
  for (u64 a = 0; a < mod; ++a) gens.push_back(detail::cayley_residue(a, mod, eps));
  std::unordered_map<u64, bool> seen;
  std::vector<ERes> frontier{ERes{1 % mod, 0}};
  seen[1 % mod * mod] = true;
  while (!frontier.empty()) {
    std::vector<ERes> next;
    for (const ERes& x : frontier) {
      for (const ERes& g : gens) {
        const ERes y = ERes::mul(x, g, mod, eps);
        if (seen.emplace(y.a * mod + y.b, true).second) next.push_back(y);
      }
    }
    frontier = std::move(next);
  }
  return static_cast<i64>(seen.size());
}

// ---------------------------------------------------------------------------
// Character specs.

namespace detail {

inline std::map<std::string, std::string> parse_kv(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ParseError("character spec: expected key=value in \"" + item + "\"");
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return kv;
}

inline i64 parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw ParseError(what + ": trailing characters in \"" + s + "\"");
    return v;
  } catch (const std::logic_error&) {
    throw ParseError(what + ": not an integer: \"" + s + "\"");
  }
}

/// "<rational>" or "<rational>*z^<int>"; a negative rational contributes z^{N/2}.
inline Monomial parse_pi_value(const std::string& text, int n) {
  std::string mag = text;
  i64 root = 0;
  const auto star = text.find("*z^");
  if (star != std::string::npos) {
    mag = text.substr(0, star);
    root = parse_int(text.substr(star + 3), "pi root exponent");
  } else if (text == "z") {
    mag = "1";
    root = 1;
  }
  Rational r;
  if (r.set_str(mag, 10) != 0) throw ParseError("pi value: not a rational: \"" + mag + "\"");
  r.canonicalize();
  if (r == 0) throw ParseError("pi value must be nonzero");
  if (r < 0) {
    r = -r;
    root += n / 2;
  }
  root %= n;
  if (root < 0) root += n;
  return {r, root};
}

}  // namespace detail

/// Largest conductor named by a spec (0 for symbolic names); used to size the session.
inline int spec_conductor(const std::string& text) {
  if (text.find('=') == std::string::npos) return 0;
  const auto kv = detail::parse_kv(text);
  int c = 0;
  for (const char* key : {"c1", "c2"}) {
    const auto it = kv.find(key);
    if (it != kv.end()) c = std::max(c, static_cast<int>(detail::parse_int(it->second, key)));
  }
  return c;
}

/// μ1 from "|.|_E", "|.|_E^-1", "triv", "omega*|.|", "omega*|.|^-1" or
/// "c1=<int>,idx=<int>,pi=<rational>*z^<int>".
inline QuasiCharE parse_mu1(const CharacterSession& s, const std::string& text) {
  const Rational q = s.q();
  const int n = s.cyclotomic_order();
  if (text == "|.|_E") return QuasiCharE::abs_power(s, 1);
  if (text == "|.|_E^-1") return QuasiCharE::abs_power(s, -1);
  if (text == "triv" || text == "1") return QuasiCharE::unramified(s, {1, 0});
  if (text == "omega*|.|") return QuasiCharE::unramified(s, {1 / q, n / 2});
  if (text == "omega*|.|^-1") return QuasiCharE::unramified(s, {q, n / 2});
  const auto kv = detail::parse_kv(text);
  for (const auto& [k, v] : kv) {
    if (k != "c1" && k != "idx" && k != "pi") throw ParseError("μ1 spec: unknown key \"" + k + "\"");
  }
  const int c1 = kv.count("c1") ? static_cast<int>(detail::parse_int(kv.at("c1"), "c1")) : 0;
  const i64 idx = kv.count("idx") ? detail::parse_int(kv.at("idx"), "idx") : 0;
  const Monomial pi = kv.count("pi") ? detail::parse_pi_value(kv.at("pi"), n) : Monomial{1, 0};
  if (c1 < 0 || c1 > s.level()) throw ParseError("μ1 spec: c1 out of range for this session");
  const auto chars = enumerate_characters(s, s.units(), c1);
  if (idx < 0 || idx >= static_cast<i64>(chars.size())) {
    throw ParseError("μ1 spec: idx out of range (" + std::to_string(chars.size()) + " characters of conductor " +
                     std::to_string(c1) + ")");
  }
  return {chars[static_cast<std::size_t>(idx)], pi};
}

/// μ2 from "triv" or "c2=<int>,idx=<int>".
inline CharE1 parse_mu2(const CharacterSession& s, const std::string& text) {
  if (text == "triv" || text == "1") return CharE1::trivial(s);
  const auto kv = detail::parse_kv(text);
  for (const auto& [k, v] : kv) {
    if (k != "c2" && k != "idx") throw ParseError("μ2 spec: unknown key \"" + k + "\"");
  }
  const int c2 = kv.count("c2") ? static_cast<int>(detail::parse_int(kv.at("c2"), "c2")) : 0;
  const i64 idx = kv.count("idx") ? detail::parse_int(kv.at("idx"), "idx") : 0;
  if (c2 < 0 || c2 > s.level()) throw ParseError("μ2 spec: c2 out of range for this session");
  const auto chars = enumerate_characters(s, s.e1(), c2);
  if (idx < 0 || idx >= static_cast<i64>(chars.size())) {
    throw ParseError("μ2 spec: idx out of range (" + std::to_string(chars.size()) + " characters of conductor " +
                     std::to_string(c2) + ")");
  }
  return CharE1(chars[static_cast<std::size_t>(idx)]);
}

}  // namespace newform

#pragma once

// The level-n model of Ind_B^G(μ1 ⊗ μ2): functions are stored by their values
// at the coset representatives γ_i and evaluated elsewhere through reduce().

#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "newform/characters.hpp"
#include "newform/cosets.hpp"
#include "newform/cyclotomic.hpp"
#include "newform/group.hpp"

namespace newform {

inline int conductor_ind(const TorusChar& mu) { return 2 * mu.c1() + mu.c2(); }

/// Valid indices i of f_{n,i}: ⌈n/2⌉ ≤ i ≤ n, c(μ2) ≤ 2i − n, c(μ1) ≤ n − i.
inline std::vector<int> basis_indices(const TorusChar& mu, int n) {
  std::vector<int> out;
  if (n < 0) return out;
  const int c1 = mu.c1(), c2 = mu.c2();
  for (int i = (n + 1) / 2; i <= n; ++i) {
    if (c2 <= 2 * i - n && c1 <= n - i) out.push_back(i);
  }
  return out;
}

/// Element of V(n): coefficient of f_{n,i} (= value at γ_i) for each valid i.
struct InducedFn {
  TorusChar mu;
  int n = 0;
  std::map<int, CycScalar> coeffs;

  const CycField& field() const { return mu.session().field(); }

  static InducedFn zero(const TorusChar& mu, int n) {
    InducedFn f{mu, n, {}};
    for (int i : basis_indices(mu, n)) f.coeffs.emplace(i, CycScalar(mu.session().field()));
    return f;
  }

  /// f_{n,i}.
  static InducedFn basis(const TorusChar& mu, int n, int i) {
    InducedFn f = zero(mu, n);
    const auto it = f.coeffs.find(i);
    if (it == f.coeffs.end()) throw std::invalid_argument("f_{n,i}: index " + std::to_string(i) + " is not valid at level " + std::to_string(n));
    it->second = CycScalar(mu.session().field(), 1);
    return f;
  }

  CycScalar coeff(int i) const {
    const auto it = coeffs.find(i);
    return it == coeffs.end() ? CycScalar(field()) : it->second;
  }

  bool is_zero() const {
    for (const auto& [i, c] : coeffs) {
      if (!c.is_zero()) return false;
    }
    return true;
  }

  std::vector<CycScalar> vector() const {
    std::vector<CycScalar> v;
    for (const auto& [i, c] : coeffs) v.push_back(c);
    return v;
  }

  friend InducedFn operator+(InducedFn x, const InducedFn& y) {
    if (x.n != y.n) throw std::invalid_argument("InducedFn: level mismatch");
    for (auto& [i, c] : x.coeffs) c += y.coeff(i);
    return x;
  }
  friend InducedFn operator*(const CycScalar& s, InducedFn x) {
    for (auto& [i, c] : x.coeffs) c = s * c;
    return x;
  }
  friend bool operator==(const InducedFn& x, const InducedFn& y) {
    if (x.n != y.n) return false;
    for (const auto& [i, c] : x.coeffs) {
      if (c != y.coeff(i)) return false;
    }
    return true;
  }

  /// "a*f_{n,i} + b*f_{n,j}", omitting zero terms.
  std::string to_string() const {
    std::string out;
    for (const auto& [i, c] : coeffs) {
      if (c.is_zero()) continue;
      std::string cs = c.to_string();
      const bool plain = cs.find(' ') == std::string::npos;
      const bool negative = plain && cs[0] == '-';
      if (negative) cs.erase(0, 1);
      if (!out.empty()) out += negative ? " - " : " + ";
      else if (negative) out += "-";
      if (cs != "1") out += (plain ? cs : "(" + cs + ")") + "*";
      out += "f_{" + std::to_string(n) + "," + std::to_string(i) + "}";
    }
    return out.empty() ? "0" : out;
  }
};

inline CycScalar to_scalar(const Monomial& m, const CycField& f) { return m.to_scalar(f); }

/// f(g) = δ_B(b)^{1/2}·μ(b)·f(γ_i) for g = b·γ_i·k; zero off the support.
inline CycScalar evaluate_fn(const InducedFn& f, const GMat& g, std::mt19937_64* rng = nullptr) {
  const ReductionCertificate cert = reduce(g, f.n, rng);
  const auto it = f.coeffs.find(cert.i);
  if (it == f.coeffs.end() || it->second.is_zero()) return CycScalar(f.field());
  const CharacterSession& s = f.mu.session();
  const EElem& a = cert.b(0, 0);
  const Monomial modulus{rational_pow(Rational(s.q()), -2 * a.val()), 0};
  const Monomial m = modulus.times(f.mu(a, cert.b(1, 1)), s.cyclotomic_order());
  return to_scalar(m, f.field()) * it->second;
}

/// Values at every γ_j, ⌈n/2⌉ ≤ j ≤ n, of a function given by a point evaluator.
inline std::map<int, CycScalar> values_at_reps(const FieldParams& fp, int n,
                                               const std::function<CycScalar(const GMat&)>& eval) {
  std::map<int, CycScalar> out;
  for (int j = (n + 1) / 2; j <= n; ++j) out.emplace(j, eval(gamma_elem(fp, j)));
  return out;
}

namespace detail {

/// Builds the level-m function with the given values at the valid γ_j; values at
/// invalid indices must vanish.
inline InducedFn from_values(const TorusChar& mu, int m, const std::map<int, CycScalar>& values) {
  InducedFn out = InducedFn::zero(mu, m);
  for (const auto& [j, v] : values) {
    auto it = out.coeffs.find(j);
    if (it != out.coeffs.end()) {
      it->second = v;
    } else if (!v.is_zero()) {
      throw std::logic_error("operator output is nonzero at the non-support coset γ_" + std::to_string(j));
    }
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Level operators.

/// (ηf)(g) = f(gζ^{-1}), V(n) → V(n+2), by direct evaluation.
inline InducedFn op_eta(const InducedFn& f, std::mt19937_64* rng = nullptr) {
  const FieldParams& fp = f.mu.session().params();
  const GMat zinv = zeta_elem(fp).sigma();
  const int m = f.n + 2;
  return detail::from_values(f.mu, m, values_at_reps(fp, m, [&](const GMat& g) { return evaluate_fn(f, g * zinv, rng); }));
}

/// Basis form of η: f_{n,i} ↦ q²μ1(ϖ^{-1})·f_{n+2,i+1} for i < n, and
/// f_{n,n} ↦ q²μ1(ϖ^{-1})·(f_{n+2,n+1} + f_{n+2,n+2}), since γ_{n+1} ∈ K_n.
inline InducedFn op_eta_closed_form(const InducedFn& f) {
  const CharacterSession& s = f.mu.session();
  const Monomial scale = Monomial{Rational(s.q() * s.q()), 0}.times(f.mu.mu1.pi_value().pow(-1, s.cyclotomic_order()),
                                                                    s.cyclotomic_order());
  const CycScalar c = to_scalar(scale, f.field());
  InducedFn out = InducedFn::zero(f.mu, f.n + 2);
  for (const auto& [i, v] : f.coeffs) {
    out.coeffs.at(i + 1) += c * v;
    if (i == f.n) out.coeffs.at(i + 2) += c * v;
  }
  return out;
}

/// θ′f = ηf + Σ_{x ∈ 𝔭_F^{-1-n}/𝔭_F^{-n}} π(u(0, x√ε))f, V(n) → V(n+1).
inline InducedFn op_theta_prime(const InducedFn& f, std::mt19937_64* rng = nullptr) {
  const FieldParams& fp = f.mu.session().params();
  const GMat zinv = zeta_elem(fp).sigma();
  std::vector<GMat> shifts;
  for (int r = 0; r < fp.q(); ++r) {
    const FElem x = r == 0 ? FElem::zero(fp) : FElem::from_int(fp, r).shift(-1 - f.n);
    shifts.push_back(u_elem(EElem::zero(fp), EElem(FElem::zero(fp), x)));
  }
  const int m = f.n + 1;
  return detail::from_values(f.mu, m, values_at_reps(fp, m, [&](const GMat& g) {
                               CycScalar v = evaluate_fn(f, g * zinv, rng);
                               for (const GMat& u : shifts) v += evaluate_fn(f, g * u, rng);
                               return v;
                             }));
}

/// The terms h of δ: (δf)(g) = Σ_h f(g·h).
inline std::vector<GMat> delta_terms(const FieldParams& fp) {
  std::vector<GMat> out;
  const int q = fp.q();
  const EElem half = EElem::from_rational(fp, 1, 2);
  auto ey = [&](int a, int b, int shift) {
    return EElem(a == 0 ? FElem::zero(fp) : FElem::from_int(fp, a).shift(shift),
                 b == 0 ? FElem::zero(fp) : FElem::from_int(fp, b).shift(shift));
  };
  // y ∈ 𝔭_E/𝔭_E², z ∈ 𝔭_F/𝔭_F²: û(y, z√ε − yȳ/2).
  for (int a = 0; a < q; ++a) {
    for (int b = 0; b < q; ++b) {
      const EElem y = ey(a, b, 1);
      for (int c = 0; c < q; ++c) {
        const FElem z = c == 0 ? FElem::zero(fp) : FElem::from_int(fp, c).shift(1);
        out.push_back(uhat_elem(y, EElem(FElem::zero(fp), z) - EElem(y.norm()) * half));
      }
    }
  }
  // y ∈ 𝔭_E^{-1}/𝔬_E: ζ·u(y, −yȳ/2).
  const GMat zeta = zeta_elem(fp);
  for (int a = 0; a < q; ++a) {
    for (int b = 0; b < q; ++b) {
      const EElem y = ey(a, b, -1);
      out.push_back(zeta * u_elem(y, -(EElem(y.norm()) * half)));
    }
  }
  return out;
}

/// δ: V(2) → V(1), the level-lowering operator of the Steinberg setting.
inline InducedFn op_delta_st(const InducedFn& f, std::mt19937_64* rng = nullptr) {
  if (f.n != 2) throw std::invalid_argument("op_delta_st: input must lie in V(2)");
  const FieldParams& fp = f.mu.session().params();
  const std::vector<GMat> terms = delta_terms(fp);
  return detail::from_values(f.mu, 1, values_at_reps(fp, 1, [&](const GMat& g) {
                               CycScalar v(f.field());
                               for (const GMat& h : terms) v += evaluate_fn(f, g * h, rng);
                               return v;
                             }));
}

using LinearOp = std::function<InducedFn(const InducedFn&)>;

/// Matrix of op: V(n) → V(m) in the bases {f_{·,i}}; column k is the image of the k-th basis vector.
inline CycMatrix operator_matrix(const TorusChar& mu, int n, int m, const LinearOp& op) {
  const std::vector<int> src = basis_indices(mu, n);
  const std::vector<int> dst = basis_indices(mu, m);
  const CycField& field = mu.session().field();
  CycMatrix out(dst.size(), std::vector<CycScalar>(src.size(), CycScalar(field)));
  for (std::size_t k = 0; k < src.size(); ++k) {
    const InducedFn img = op(InducedFn::basis(mu, n, src[k]));
    if (img.n != m) throw std::logic_error("operator_matrix: operator changed level unexpectedly");
    for (std::size_t r = 0; r < dst.size(); ++r) out[r][k] = img.coeff(dst[r]);
  }
  return out;
}

inline CycMatrix matmul(const CycMatrix& a, const CycMatrix& b) {
  if (a.empty() || b.empty()) return CycMatrix(a.size());
  const CycField& field = b[0].empty() ? a[0][0].field() : b[0][0].field();
  CycMatrix out(a.size(), std::vector<CycScalar>(b[0].size(), CycScalar(field)));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (a[i][k].is_zero()) continue;
      for (std::size_t j = 0; j < b[0].size(); ++j) out[i][j] += a[i][k] * b[k][j];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Newforms and the subquotient tables.

/// conj(μ1)^{-1} ⊗ μ2, the companion character whose induced representation
/// has the same constituents as that of μ1 ⊗ μ2.
inline TorusChar companion(const TorusChar& mu) {
  const CharacterSession& s = mu.session();
  const int n = s.cyclotomic_order();
  std::vector<i64> roots;
  for (const ERes& g : s.units().generators()) roots.push_back(-mu.mu1(g.lift(s.params()).conj()).root);
  const Monomial pi = mu.mu1.pi_value().pow(-1, n);
  return {QuasiCharE(FiniteChar::from_generator_roots(s, s.units(), roots), pi), mu.mu2};
}

struct Newform {
  TorusChar space;      // the induced representation the vector lives in
  InducedFn vector;
  int conductor = 0;    // conductor of the generic constituent
  bool companion_space = false;
  std::string description;
};

inline Newform newform_of(const QuasiCharE& mu1, const CharE1& mu2) {
  const CharacterSession& s = mu1.session();
  const CycField& field = s.field();
  const TorusChar mu{mu1, mu2};
  const Classification cls = classify_reducibility(mu1, mu2);
  const int npi = conductor_ind(mu);
  const Rational q = s.q();
  Newform out;
  out.space = mu;
  if (cls.reducible() && cls.unramified && cls.ru == UnramifiedCase::RU1) {
    // Steinberg: a sub of Ind(|·|_E ⊗ 1).
    TorusChar space = mu;
    if (cls.sign < 0) {
      space = companion(mu);
      out.companion_space = true;
    }
    out.space = space;
    out.conductor = 2;
    const CycScalar c(field, q * (q - 1));
    out.vector = c * InducedFn::basis(space, 2, 2) + CycScalar(field, -1) * InducedFn::basis(space, 2, 1);
    out.description = "q(q-1)f_{2,2} - f_{2,1}";
    return out;
  }
  if (cls.reducible() && cls.unramified && cls.ru == UnramifiedCase::RU2) {
    // The generic constituent is the sub of the induced space with μ1(ϖ) = −q^{-1}.
    TorusChar space = mu;
    if (cls.sign < 0) {
      space = companion(mu);
      out.companion_space = true;
    }
    out.space = space;
    out.conductor = npi + 1;
    out.vector = InducedFn::basis(space, npi + 1, npi + 1);
    out.description = "f_{N+1,N+1}";
    return out;
  }
  out.conductor = npi;
  out.vector = InducedFn::basis(mu, npi, npi - mu.c1());
  out.description = "f_{N,N-c1}";
  return out;
}

inline int profile_dim(int n, int conductor) { return n < conductor ? 0 : (n - conductor) / 2 + 1; }

struct Constituent {
  std::string name;             // "pi", "pi1", "pi2"
  bool generic = true;
  std::optional<int> conductor; // none when no K_n-fixed vectors exist
  std::vector<int> dims;        // dim V_i(n), n = 0..n_max
};

struct SubquotientReport {
  Classification cls;
  int full_conductor = 0;
  std::vector<int> full_dims;   // dim V(n) from basis_indices
  std::vector<Constituent> constituents;
  bool additivity = true;       // Σ dims = full dims for every n
  bool profile = true;          // generic dims follow ⌊(n−N)/2⌋+1
  std::map<std::string, bool> evidence;  // computed operator facts backing the table
};

inline SubquotientReport subquotient_table(const QuasiCharE& mu1, const CharE1& mu2, int n_max,
                                           std::mt19937_64* rng = nullptr) {
  const TorusChar mu{mu1, mu2};
  SubquotientReport rep;
  rep.cls = classify_reducibility(mu1, mu2);
  rep.full_conductor = conductor_ind(mu);
  const int npi = rep.full_conductor;
  for (int n = 0; n <= n_max; ++n) rep.full_dims.push_back(static_cast<int>(basis_indices(mu, n).size()));

  auto constant = [&](auto fn) {
    std::vector<int> d;
    for (int n = 0; n <= n_max; ++n) d.push_back(fn(n));
    return d;
  };
  const std::vector<int> zeros = constant([](int) { return 0; });

  if (!rep.cls.reducible()) {
    rep.constituents.push_back({"pi", true, npi, rep.full_dims});
  } else if (!rep.cls.unramified || rep.cls.ru == UnramifiedCase::RU3) {
    rep.constituents.push_back({"pi1", true, npi, rep.full_dims});
    rep.constituents.push_back({"pi2", false, std::nullopt, zeros});
  } else if (rep.cls.ru == UnramifiedCase::RU1) {
    rep.constituents.push_back({"pi1", true, 2, constant([](int n) { return profile_dim(n, 2); })});
    rep.constituents.push_back({"pi2", false, 0, constant([](int) { return 1; })});
  } else if (rep.cls.ru == UnramifiedCase::RU2) {
    rep.constituents.push_back({"pi1", true, npi + 1, constant([&](int n) { return profile_dim(n, npi + 1); })});
    rep.constituents.push_back(
        {"pi2", false, npi, constant([&](int n) { return n < npi ? 0 : ((n - npi) % 2 == 0 ? 1 : 0); })});
  } else {
    throw std::logic_error("subquotient_table: reducible unramified pair without an RU case");
  }

  for (int n = 0; n <= n_max; ++n) {
    int sum = 0;
    for (const auto& c : rep.constituents) sum += c.dims[static_cast<std::size_t>(n)];
    if (sum != rep.full_dims[static_cast<std::size_t>(n)]) rep.additivity = false;
    for (const auto& c : rep.constituents) {
      if (!c.generic) continue;
      if (c.dims[static_cast<std::size_t>(n)] != profile_dim(n, c.conductor.value_or(0))) rep.profile = false;
    }
  }

  // Operator facts behind the table, computed rather than quoted.
  if (rep.cls.reducible() && rep.cls.unramified) {
    const CycScalar zero(mu.session().field());
    const InducedFn bottom = InducedFn::basis(mu, npi, npi);
    const InducedFn raised = op_theta_prime(bottom, rng);
    const bool theta_zero = raised.is_zero();
    if (rep.cls.ru == UnramifiedCase::RU2) {
      // θ′ vanishes on V(N_π) exactly for the space with μ1(ϖ) = −q.
      rep.evidence["theta_prime_zero_on_V(N)"] = theta_zero == (rep.cls.sign < 0);
      const TorusChar w = companion(mu);
      const bool w_zero = op_theta_prime(InducedFn::basis(w, npi, npi), rng).is_zero();
      rep.evidence["companion_theta_prime_zero_on_V(N)"] = w_zero == (rep.cls.sign > 0);
    } else {
      rep.evidence["theta_prime_injective_on_V(N)"] = !theta_zero;
    }
    if (rep.cls.ru == UnramifiedCase::RU1) {
      const Newform nf = newform_of(mu1, mu2);
      rep.evidence["steinberg_newform_in_ker_delta"] = op_delta_st(nf.vector, rng).is_zero();
      const CycMatrix d = operator_matrix(nf.space, 2, 1, [&](const InducedFn& f) { return op_delta_st(f, rng); });
      rep.evidence["ker_delta_dim_1"] = 2 - rank(d) == 1;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Oldform tower.

struct TowerRow {
  int n = 0;
  int vectors = 0;
  int rank = 0;
  int expected = 0;
  int dim_full = 0;  // dim V(n) of the ambient induced space
};

/// θ′^a η^b applied to the newform for a + 2b = n − N, N ≤ n ≤ n_max.
inline std::vector<TowerRow> theta_tower(const QuasiCharE& mu1, const CharE1& mu2, int n_max,
                                         std::mt19937_64* rng = nullptr) {
  const Newform nf = newform_of(mu1, mu2);
  std::vector<TowerRow> rows;
  // powers[b] = η^b(newform); each step then applies θ′ as many times as needed.
  std::map<std::pair<int, int>, InducedFn> cache;  // (a, b) -> θ′^a η^b v
  cache.emplace(std::make_pair(0, 0), nf.vector);
  auto get = [&](auto&& self, int a, int b) -> const InducedFn& {
    const auto key = std::make_pair(a, b);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    InducedFn v = a > 0 ? op_theta_prime(self(self, a - 1, b), rng) : op_eta(self(self, 0, b - 1), rng);
    return cache.emplace(key, std::move(v)).first->second;
  };
  for (int n = nf.conductor; n <= n_max; ++n) {
    TowerRow row;
    row.n = n;
    row.expected = profile_dim(n, nf.conductor);
    row.dim_full = static_cast<int>(basis_indices(nf.space, n).size());
    CycMatrix m;
    for (int b = 0; 2 * b <= n - nf.conductor; ++b) {
      const int a = n - nf.conductor - 2 * b;
      m.push_back(get(get, a, b).vector());
      ++row.vectors;
    }
    row.rank = rank(m);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace newform

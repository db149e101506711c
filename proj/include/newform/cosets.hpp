#pragma once

// Double cosets B\G/K_n: representatives γ_i, certified reduction
// g = b·γ_i·k, and the stabilizer test for μ on B ∩ γ_i K_n γ_i^{-1}.

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "newform/characters.hpp"
#include "newform/errors.hpp"
#include "newform/group.hpp"

namespace newform {

/// γ_i for ⌈n/2⌉ ≤ i ≤ n, in increasing i.
inline std::vector<GMat> reps(const FieldParams& fp, int n) {
  if (n < 0) throw std::invalid_argument("reps: n must be >= 0");
  std::vector<GMat> out;
  for (int i = (n + 1) / 2; i <= n; ++i) out.push_back(gamma_elem(fp, i));
  return out;
}

/// Witness g = b·γ_i·k with b ∈ B and k ∈ K_n.
struct ReductionCertificate {
  int n = 0;
  int i = 0;
  GMat b;
  GMat k;
};

inline bool verify_certificate(const ReductionCertificate& cert, const GMat& g, int n) {
  try {
    if (cert.n != n || cert.i < (n + 1) / 2 || cert.i > n) return false;
    const FieldParams& fp = g.params();
    if (!membership(cert.b, SubgroupSpec::B())) return false;
    if (!membership(cert.k, SubgroupSpec::K(n))) return false;
    return (cert.b * gamma_elem(fp, cert.i) * cert.k).equals(g);
  } catch (const Error&) {
    return false;
  }
}

namespace detail {

/// Deterministic reduction of a certified g.
inline ReductionCertificate reduce_closed_form(const GMat& g_in, int n) {
  const FieldParams& fp = g_in.params();
  GMat g = g_in;
  GMat tail = GMat::identity(fp);  // right factor already split off: g_in = g·tail
  // Bring the bottom row to the shape (y0, −x̄0, 1)·w3 with ν(y0) ≥ n.
  {
    const EElem& w1 = g(2, 0);
    const EElem& w3 = g(2, 2);
    bool flip = w3.is_zero();
    if (!flip) flip = !(w1 * w3.inverse()).in_ideal(n);
    if (flip) {
      const GMat tn = t_n_elem(fp, n);
      g = g * tn;
      tail = tn;
    }
  }
  const EElem& w3 = g(2, 2);
  if (w3.is_zero()) throw ReductionIncomplete("reduce: bottom row has no certifiable pivot: " + g.to_string());
  const EElem w3inv = w3.inverse();
  const EElem y0 = g(2, 0) * w3inv;
  const EElem x0 = -(g(2, 1) * w3inv).conj();
  if (!y0.in_ideal(n)) throw ReductionIncomplete("reduce: normalized row is not in the Û(𝔭^n)-chart");
  const GMat uh = uhat_elem(x0, y0);
  const GMat b0 = g * uh.sigma();  // bottom row (0, 0, w3), hence in B

  int i = n;
  if (!x0.in_ideal(n)) i = x0.val();
  if (i < (n + 1) / 2) throw ReductionIncomplete("reduce: ν(x0) below ⌈n/2⌉ contradicts isotropy");

  ReductionCertificate cert;
  cert.n = n;
  cert.i = i;
  if (i == n) {
    cert.b = b0;
    cert.k = gamma_elem(fp, n).sigma() * uh * tail;
    return cert;
  }
  // û(x0, y0) = t(α)^{-1}·γ_i·t(α)·û(0, s√ε) with α = x0/ϖ^i and
  // s√ε = y0 + N(x0)/2.
  const EElem alpha = x0.shift(-i);
  const EElem rest = y0 + EElem(x0.norm() * FElem::from_rational(fp, 1, 2));
  const EElem s_sqrt = EElem(FElem::zero(fp), rest.im());
  const GMat ta = t_elem(alpha);
  cert.b = b0 * ta.sigma();
  cert.k = ta * uhat_elem(EElem::zero(fp), s_sqrt) * tail;
  return cert;
}

}  // namespace detail

/// Reduces g modulo B on the left and K_n on the right. With an rng, g is first
/// translated by a random k0 ∈ K_n; b and k then vary between runs while i does not.
inline ReductionCertificate reduce(const GMat& g, int n, std::mt19937_64* rng = nullptr) {
  if (!g.certified()) throw NotUnitary("reduce: input must be a certified element of G");
  if (n < 0) throw std::invalid_argument("reduce: n must be >= 0");
  ReductionCertificate cert;
  if (rng != nullptr) {
    const GMat k0 = sample(SubgroupSpec::K(n), g.params(), *rng, 3);
    cert = detail::reduce_closed_form(g * k0, n);
    cert.k = cert.k * k0.sigma();
  } else {
    cert = detail::reduce_closed_form(g, n);
  }
  if (!verify_certificate(cert, g, n)) {
    throw ReductionIncomplete("reduce: certificate failed verification for g = " + g.to_string() +
                              " at level " + std::to_string(n) + " (i = " + std::to_string(cert.i) + ")");
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Stabilizer test.

enum class StabilizerMode { Formula, Sampled };

struct StabilizerReport {
  bool trivial = true;
  int samples = 0;  // accepted elements of B ∩ γ_i K_n γ_i^{-1}
  int rejected = 0;
};

namespace detail {

inline Monomial torus_value(const TorusChar& mu, const GMat& b) { return mu(b(0, 0), b(1, 1)); }

}  // namespace detail

/// Evaluates μ on elements of B ∩ γ_i K_n γ_i^{-1}: the intertwining elements
/// for a swept over 𝔭^{2i−n} modulo 𝔭^L, tori t(a) with a ∈ 1 + 𝔭^{n−i}, and
/// rejection-sampled elements of B. Every element is membership-checked.
inline StabilizerReport sample_stabilizer(const TorusChar& mu, int i, int n, std::mt19937_64& rng,
                                          int min_samples = 50) {
  const CharacterSession& s = mu.session();
  const FieldParams& fp = s.params();
  const SubgroupSpec stab = SubgroupSpec::BcapConj(i, n);
  StabilizerReport rep;
  auto consider = [&](const GMat& b) {
    if (!membership(b, stab)) {
      ++rep.rejected;
      return;
    }
    ++rep.samples;
    if (detail::torus_value(mu, b).root != 0) rep.trivial = false;
  };

  const int lo = 2 * i - n;
  const int top = std::max(s.level(), lo + 1);
  const u64 count = fp.pow(top - lo);
  for (u64 r = 0; r < count; ++r) {
    const FElem a = r == 0 ? FElem::zero(fp) : FElem::from_int(fp, static_cast<i64>(r)).shift(lo);
    consider(intertwine_element(fp, i, n, a));
  }
  while (rep.samples < min_samples + static_cast<int>(count)) {
    // t(a) and diag(a, β, ā^{-1}) with a ∈ 1 + 𝔭^{n−i} (any unit when i = n), β ∈ E¹_{2i−n}.
    EElem a = n - i == 0 ? detail::random_e_unit(fp, rng)
                         : EElem::one(fp) + detail::random_e_in_ideal(fp, rng, n - i);
    consider(t_elem(a));
    const EElem beta = cayley(detail::random_f_in_ideal(fp, rng, lo));
    consider(torus_elem(a, beta) * intertwine_element(fp, i, n, detail::random_f_in_ideal(fp, rng, lo)));
    consider(sample_borel(fp, rng, 1));
  }
  return rep;
}

/// Whether μ is trivial on B ∩ γ_i K_n γ_i^{-1}.
inline bool mu_trivial_on_stabilizer(const TorusChar& mu, int i, int n, StabilizerMode mode,
                                     std::mt19937_64* rng = nullptr, int min_samples = 50) {
  if (i < (n + 1) / 2 || i > n) throw std::invalid_argument("mu_trivial_on_stabilizer: need ceil(n/2) <= i <= n");
  if (mode == StabilizerMode::Formula) return mu.c2() <= 2 * i - n && mu.c1() <= n - i;
  std::mt19937_64 local(0x5eed);
  return sample_stabilizer(mu, i, n, rng != nullptr ? *rng : local, min_samples).trivial;
}

}  // namespace newform

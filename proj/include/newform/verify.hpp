#pragma once

// Randomized and exhaustive property suites over the library, returning
// tabular results that the command-line tool renders.

#include <random>
#include <string>
#include <vector>

#include "newform/characters.hpp"
#include "newform/cosets.hpp"
#include "newform/group.hpp"
#include "newform/indrep.hpp"

namespace newform {

struct Check {
  std::string property;
  bool passed = true;
  std::string detail;
};

struct SuiteResult {
  std::string suite;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<Check> checks;

  bool passed() const {
    for (const auto& c : checks) {
      if (!c.passed) return false;
    }
    return true;
  }
};

namespace detail {

inline std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? " " : "") + std::to_string(v[k]);
  return s;
}

/// μ1 of exact conductor c (first in enumeration order, μ1(ϖ) = 1) and μ2 of conductor c2.
inline TorusChar grid_character(const CharacterSession& s, int c1, int c2) {
  return {QuasiCharE(enumerate_characters(s, s.units(), c1).at(0), {1, 0}),
          CharE1(enumerate_characters(s, s.e1(), c2).at(0))};
}

}  // namespace detail

/// Conductor and dim V(n) over a grid of (c1, c2), cross-checked against
/// N_π = 2c1 + c2 and ⌊(n − N_π)/2⌋ + 1.
inline SuiteResult grid_table(const FieldParams& fp, int c1_lo, int c1_hi, int c2_lo, int c2_hi, int n_max) {
  const CharacterSession& s = CharacterSession::get(fp, std::max({c1_hi, c2_hi, 1}));
  SuiteResult r;
  r.suite = "tables";
  r.columns = {"c1", "c2", "N_formula", "N_basis", "dims", "check"};
  Check cond{"conductor formula N = 2c1 + c2", true, ""};
  Check dims{"dim V(n) = floor((n-N)/2)+1 for N <= n <= n_max", true, ""};
  for (int c1 = c1_lo; c1 <= c1_hi; ++c1) {
    for (int c2 = c2_lo; c2 <= c2_hi; ++c2) {
      const TorusChar mu = detail::grid_character(s, c1, c2);
      const int nf = 2 * c1 + c2;
      int nb = -1;
      std::vector<int> d;
      bool ok = mu.c1() == c1 && mu.c2() == c2;
      for (int n = 0; n <= n_max; ++n) {
        const int dim = static_cast<int>(basis_indices(mu, n).size());
        d.push_back(dim);
        if (dim > 0 && nb < 0) nb = n;
        if (dim != profile_dim(n, nf)) ok = false;
      }
      if (nb >= 0 && nb != nf) cond.passed = false;
      if (nb < 0 && nf <= n_max) cond.passed = false;
      if (!ok) dims.passed = false;
      r.rows.push_back({std::to_string(c1), std::to_string(c2), std::to_string(nf),
                        nb < 0 ? "-" : std::to_string(nb), detail::join_ints(d), ok ? "pass" : "FAIL"});
    }
  }
  r.checks = {cond, dims};
  return r;
}

/// Synthesized g = b·γ_i·k: reduce must recover i and produce verifying
/// certificates, with i stable over randomized runs; random G elements must reduce.
inline SuiteResult verify_cosets(const FieldParams& fp, int n, int samples, std::mt19937_64& rng) {
  SuiteResult r;
  r.suite = "cosets";
  r.columns = {"n", "i", "samples", "recovered_i", "certificates_verified", "stable_over_3_runs"};
  Check rec{"reduce recovers i on synthesized b*gamma_i*k", true, ""};
  Check ver{"every certificate verifies (b*gamma_i*k = g, b in B, k in K_n)", true, ""};
  Check uniq{"i is identical across randomized runs", true, ""};
  for (int i = (n + 1) / 2; i <= n; ++i) {
    int recovered = 0, verified = 0, stable = 0;
    for (int t = 0; t < samples; ++t) {
      const GMat g = sample_borel(fp, rng) * gamma_elem(fp, i) * sample(SubgroupSpec::K(n), fp, rng);
      try {
        const ReductionCertificate c = reduce(g, n, &rng);
        if (c.i == i) ++recovered;
        if (verify_certificate(c, g, n)) ++verified;
        const int i2 = reduce(g, n, &rng).i, i3 = reduce(g, n, &rng).i;
        if (i2 == c.i && i3 == c.i) ++stable;
      } catch (const Error& e) {
        ver.detail = e.what();
      }
    }
    if (recovered != samples) rec.passed = false;
    if (verified != samples) ver.passed = false;
    if (stable != samples) uniq.passed = false;
    r.rows.push_back({std::to_string(n), std::to_string(i), std::to_string(samples), std::to_string(recovered),
                      std::to_string(verified), std::to_string(stable)});
  }
  Check gen{"random generator words in G reduce with verifying certificates", true, ""};
  int ok = 0;
  for (int t = 0; t < samples; ++t) {
    const GMat g = sample(SubgroupSpec::G(), fp, rng);
    try {
      const ReductionCertificate c = reduce(g, n, &rng);
      if (verify_certificate(c, g, n)) ++ok;
    } catch (const Error& e) {
      gen.detail = e.what();
    }
  }
  gen.passed = ok == samples;
  if (gen.detail.empty()) gen.detail = std::to_string(ok) + "/" + std::to_string(samples);
  r.checks = {rec, ver, uniq, gen};
  return r;
}

/// Formula and sampled stabilizer modes over a character grid, plus the
/// intertwining elements' shape.
inline SuiteResult verify_intertwine(const FieldParams& fp, int c_max, int n_max, int samples, std::mt19937_64& rng) {
  const CharacterSession& s = CharacterSession::get(fp, std::max(c_max, 1));
  SuiteResult r;
  r.suite = "intertwine";
  r.columns = {"c1", "c2", "n", "formula_indices", "sampled_indices", "min_samples"};
  Check agree{"formula mode == sampled mode", true, ""};
  Check enough{"at least " + std::to_string(samples) + " accepted stabilizer samples per cell", true, ""};
  for (int c1 = 0; c1 <= c_max; ++c1) {
    for (int c2 = 0; c2 <= c_max; ++c2) {
      const TorusChar mu = detail::grid_character(s, c1, c2);
      for (int n = 0; n <= n_max; ++n) {
        std::vector<int> fi, si;
        int min_samples = -1;
        for (int i = (n + 1) / 2; i <= n; ++i) {
          if (mu_trivial_on_stabilizer(mu, i, n, StabilizerMode::Formula)) fi.push_back(i);
          const StabilizerReport rep = sample_stabilizer(mu, i, n, rng, samples);
          if (rep.trivial) si.push_back(i);
          min_samples = min_samples < 0 ? rep.samples : std::min(min_samples, rep.samples);
        }
        if (fi != si) agree.passed = false;
        if (min_samples < samples) enough.passed = false;
        r.rows.push_back({std::to_string(c1), std::to_string(c2), std::to_string(n), detail::join_ints(fi),
                          detail::join_ints(si), std::to_string(min_samples)});
      }
    }
  }
  Check shape{"intertwining element lies in B and in gamma_i K_n gamma_i^-1 with (2,2)-entry cayley(a)", true, ""};
  for (int t = 0; t < samples; ++t) {
    std::uniform_int_distribution<int> nd(0, n_max);
    const int n = nd(rng);
    std::uniform_int_distribution<int> id((n + 1) / 2, n);
    const int i = id(rng);
    const FElem a = detail::random_f_in_ideal(fp, rng, 2 * i - n);
    const GMat g = intertwine_element(fp, i, n, a);
    if (!membership(g, SubgroupSpec::BcapConj(i, n)) || g(1, 1) != cayley(a)) shape.passed = false;
  }
  r.checks = {agree, enough, shape};
  return r;
}

/// (θ′f)(1)/f(1) against q(qμ1(ϖ)^{-1} + 1) for unramified μ1.
inline SuiteResult verify_theta(const FieldParams& fp, std::mt19937_64& rng) {
  const CharacterSession& s = CharacterSession::get(fp, 1);
  const int n = s.cyclotomic_order();
  const Rational q = s.q();
  const std::vector<Monomial> values = {{1 / (q * q), 0}, {1, 0},     {1 / q, n / 2}, {q, n / 2}, {q * q, 0},
                                        {1 / q, 0},       {q, 0},     {1, n / 2},     {1, 1},     {2, 3}};
  SuiteResult r;
  r.suite = "theta";
  r.columns = {"mu1(varpi)", "mu2", "N", "computed", "formula", "vanishes"};
  Check eq{"(theta' f)(1) = q(q mu1(varpi^-1) + 1) f(1) exactly", true, ""};
  Check zero{"theta' vanishes on V(N) exactly when mu1(varpi) = -q", true, ""};
  const GMat one = GMat::identity(fp);
  for (const char* m2 : {"triv", "c2=1,idx=0"}) {
    const CharE1 mu2 = parse_mu2(s, m2);
    for (const Monomial& v : values) {
      const TorusChar mu{QuasiCharE::unramified(s, v), mu2};
      const int npi = conductor_ind(mu);
      const InducedFn f = InducedFn::basis(mu, npi, npi);
      const CycScalar got = evaluate_fn(op_theta_prime(f, &rng), one, &rng) / evaluate_fn(f, one, &rng);
      const CycScalar want = (v.pow(-1, n).to_scalar(s.field()) * q + CycScalar(s.field(), 1)) * q;
      const bool is_minus_q = v == Monomial{q, n / 2};
      if (got != want) eq.passed = false;
      if (got.is_zero() != is_minus_q) zero.passed = false;
      r.rows.push_back({v.to_scalar(s.field()).to_string(), m2, std::to_string(npi), got.to_string(), want.to_string(),
                        got.is_zero() ? "yes" : "no"});
    }
  }
  r.checks = {eq, zero};
  return r;
}

/// Ranks of θ′^a η^b applied to newforms, and θ′η = ηθ′.
inline SuiteResult verify_oldforms(const FieldParams& fp, int extra, std::mt19937_64& rng) {
  const CharacterSession& s = CharacterSession::get(fp, 1);
  SuiteResult r;
  r.suite = "oldforms";
  r.columns = {"pair", "n", "vectors", "rank", "expected", "dim_V(n)"};
  Check ranks{"rank of the tower at level n is floor((n-N)/2)+1", true, ""};
  Check span{"for irreducible induced representations the tower spans V(n)", true, ""};
  Check comm{"theta' eta = eta theta' as exact matrices", true, ""};
  Check eta{"eta closed form agrees with direct evaluation", true, ""};
  const std::vector<std::pair<std::string, std::pair<std::string, std::string>>> pairs = {
      {"trivial", {"triv", "triv"}}, {"c1=1,c2=0", {"c1=1,idx=0,pi=1", "triv"}}, {"steinberg", {"|.|_E", "triv"}}};
  for (const auto& [name, spec] : pairs) {
    const QuasiCharE mu1 = parse_mu1(s, spec.first);
    const CharE1 mu2 = parse_mu2(s, spec.second);
    const Newform nf = newform_of(mu1, mu2);
    const bool irreducible = !classify_reducibility(mu1, mu2).reducible();
    for (const TowerRow& row : theta_tower(mu1, mu2, nf.conductor + extra, &rng)) {
      if (row.rank != row.expected) ranks.passed = false;
      if (irreducible && row.rank != row.dim_full) span.passed = false;
      r.rows.push_back({name, std::to_string(row.n), std::to_string(row.vectors), std::to_string(row.rank),
                        std::to_string(row.expected), std::to_string(row.dim_full)});
    }
    const TorusChar& mu = nf.space;
    for (int n = nf.conductor; n <= nf.conductor + 2; ++n) {
      const auto th = [&](const InducedFn& f) { return op_theta_prime(f, &rng); };
      const auto et = [&](const InducedFn& f) { return op_eta(f, &rng); };
      const CycMatrix a = matmul(operator_matrix(mu, n + 2, n + 3, th), operator_matrix(mu, n, n + 2, et));
      const CycMatrix b = matmul(operator_matrix(mu, n + 1, n + 3, et), operator_matrix(mu, n, n + 1, th));
      if (a != b) comm.passed = false;
      if (operator_matrix(mu, n, n + 2, et) != operator_matrix(mu, n, n + 2, op_eta_closed_form)) eta.passed = false;
    }
  }
  r.checks = {ranks, span, comm, eta};
  return r;
}

/// Cayley generation of E¹/E¹_m and its order.
inline SuiteResult verify_e1(const FieldParams& fp, int m_max) {
  SuiteResult r;
  r.suite = "e1";
  r.columns = {"m", "order_expected", "order_model", "cayley_generated"};
  Check gen{"Cayley elements generate E^1/E^1_m", true, ""};
  Check ord{"|E^1/E^1_m| = (q+1)q^(m-1)", true, ""};
  for (int m = 1; m <= m_max; ++m) {
    const UnitGroupModel& g = UnitGroupModel::get(fp, UnitGroupModel::Kind::E1, m);
    const i64 gen_order = cayley_generated_order(fp, m);
    if (gen_order != g.expected_order()) gen.passed = false;
    if (g.order() != g.expected_order()) ord.passed = false;
    r.rows.push_back({std::to_string(m), std::to_string(g.expected_order()), std::to_string(g.order()),
                      std::to_string(gen_order)});
  }
  r.checks = {gen, ord};
  return r;
}

}  // namespace newform

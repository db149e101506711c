// Acceptance suite: one PASS/FAIL line per criterion, each with a wall-clock limit.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "newform/newform.hpp"

using namespace newform;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double limit_s;
  std::function<Outcome()> run;
};

Outcome fail_if(bool bad, Outcome o, const std::string& why) {
  if (bad) {
    o.ok = false;
    o.detail += (o.detail.empty() ? "" : "; ") + why;
  }
  return o;
}

i64 brute_norm_one(int p, int m, int eps) {
  i64 mod = 1;
  for (int k = 0; k < m; ++k) mod *= p;
  i64 count = 0;
  for (i64 a = 0; a < mod; ++a) {
    for (i64 b = 0; b < mod; ++b) {
      if (((a * a - eps * b * b) % mod + mod) % mod == 1 % mod) ++count;
    }
  }
  return count;
}

// 1. Smallest level with a nonzero K_n-fixed vector, found with the sampled
// stabilizer test, equals 2c1 + c2.
Outcome conductor_formula() {
  const FieldParams& fp = FieldParams::get(3);
  const CharacterSession& s = CharacterSession::get(fp, 2);
  std::mt19937_64 rng(101);
  Outcome o;
  int cells = 0;
  for (int c1 = 0; c1 <= 2; ++c1) {
    for (int c2 = 0; c2 <= 2; ++c2) {
      const auto u = enumerate_characters(s, s.units(), c1);
      const auto e = enumerate_characters(s, s.e1(), c2);
      for (const auto& [a, b] : {std::pair{u.front(), e.front()}, std::pair{u.back(), e.back()}}) {
        const TorusChar mu{QuasiCharE(a, {Rational(1), 0}), CharE1(b)};
        int first = -1;
        for (int n = 0; n <= 8 && first < 0; ++n) {
          for (int i = (n + 1) / 2; i <= n; ++i) {
            if (sample_stabilizer(mu, i, n, rng, 50).trivial) {
              first = n;
              break;
            }
          }
        }
        ++cells;
        o = fail_if(first != 2 * c1 + c2, o,
                    "c1=" + std::to_string(c1) + " c2=" + std::to_string(c2) + " got " + std::to_string(first));
      }
    }
  }
  if (o.ok) o.detail = std::to_string(cells) + " characters, min level = 2c1+c2";
  return o;
}

// 2. Dimension formula, and formula mode against sampled mode.
Outcome dimension_formula() {
  const FieldParams& fp = FieldParams::get(3);
  std::mt19937_64 rng(102);
  const SuiteResult grid = grid_table(fp, 0, 2, 0, 2, 8);
  const SuiteResult modes = verify_intertwine(fp, 2, 8, 50, rng);
  Outcome o;
  for (const auto& c : grid.checks) o = fail_if(!c.passed, o, c.property);
  for (const auto& c : modes.checks) o = fail_if(!c.passed, o, c.property);
  if (o.ok) o.detail = std::to_string(modes.rows.size()) + " (c1, c2, n) cells agree, >= 50 samples each";
  return o;
}

// 3. Coset reduction on synthesized elements.
Outcome coset_reduction() {
  const FieldParams& fp = FieldParams::get(3);
  std::mt19937_64 rng(103);
  Outcome o;
  int total = 0;
  for (int n = 0; n <= 6; ++n) {
    const SuiteResult r = verify_cosets(fp, n, 200, rng);
    for (const auto& c : r.checks) o = fail_if(!c.passed, o, "n=" + std::to_string(n) + ": " + c.property);
    for (const auto& row : r.rows) total += std::stoi(row[2]);
  }
  if (o.ok) o.detail = std::to_string(total) + " reductions recovered i with verifying certificates";
  return o;
}

// 4. θ′ scalar for unramified μ1.
Outcome theta_scalar() {
  const FieldParams& fp = FieldParams::get(3);
  std::mt19937_64 rng(104);
  const SuiteResult r = verify_theta(fp, rng);
  Outcome o;
  for (const auto& c : r.checks) o = fail_if(!c.passed, o, c.property);
  if (o.ok) o.detail = std::to_string(r.rows.size()) + " (mu1, mu2) pairs exact, vanishing only at -q";
  return o;
}

// 5. Steinberg level-lowering functional.
Outcome steinberg() {
  Outcome o;
  for (int p : {3, 5}) {
    const FieldParams& fp = FieldParams::get(p);
    const CharacterSession& s = CharacterSession::get(fp, 1);
    std::mt19937_64 rng(105);
    const Rational q = p;
    const TorusChar mu{QuasiCharE::abs_power(s, 1), CharE1::trivial(s)};
    const CycMatrix d = operator_matrix(mu, 2, 1, [&](const InducedFn& f) { return op_delta_st(f, &rng); });
    const std::string tag = "p=" + std::to_string(p) + ": ";
    o = fail_if(d[0][0] != CycScalar(s.field(), q * q - 1), o, tag + "coefficient of f_{2,1}");
    o = fail_if(d[0][1] != CycScalar(s.field(), Rational(1 / q + 1)), o, tag + "coefficient of f_{2,2}");
    o = fail_if(2 - rank(d) != 1, o, tag + "kernel dimension");
    // Spanning vector q(q−1)f_{2,2} − f_{2,1}.
    const InducedFn v = CycScalar(s.field(), q * (q - 1)) * InducedFn::basis(mu, 2, 2) +
                        CycScalar(s.field(), -1) * InducedFn::basis(mu, 2, 1);
    o = fail_if(!op_delta_st(v, &rng).is_zero(), o, tag + "q(q-1)f22 - f21 not in kernel");
    o = fail_if(!(newform_of(mu.mu1, mu.mu2).vector == v), o, tag + "newform differs");
    // Kernel condition f(1) = −q(q−1)f(γ_1) on a general element a·f_{2,1} + b·f_{2,2}.
    const std::vector<std::pair<Rational, Rational>> coords = {{1, 0}, {0, 1}, {-1, q * (q - 1)}, {2, 5}};
    for (const auto& [a, b] : coords) {
      const InducedFn f = CycScalar(s.field(), a) * InducedFn::basis(mu, 2, 1) +
                          CycScalar(s.field(), b) * InducedFn::basis(mu, 2, 2);
      const CycScalar f1 = evaluate_fn(f, GMat::identity(fp), &rng);
      const CycScalar fg = evaluate_fn(f, gamma_elem(fp, 1), &rng);
      const bool condition = f1 == CycScalar(s.field(), -q * (q - 1)) * fg;
      o = fail_if(condition != op_delta_st(f, &rng).is_zero(), o, tag + "kernel condition mismatch");
    }
  }
  if (o.ok) o.detail = "delta = (q^-1+1)f(1) + (q^2-1)f(gamma_1), kernel spanned by q(q-1)f22 - f21, p = 3, 5";
  return o;
}

// 6. Subquotient tables.
Outcome subquotients() {
  const FieldParams& fp = FieldParams::get(3);
  const CharacterSession& s = CharacterSession::get(fp, 1);
  std::mt19937_64 rng(106);
  Outcome o;
  std::string seen;
  for (const auto& [m1, m2] : {std::pair{"c1=1,idx=1,pi=1", "c2=1,idx=1"}, std::pair{"|.|_E", "triv"},
                               std::pair{"omega*|.|", "triv"}, std::pair{"triv", "c2=1,idx=0"}}) {
    const SubquotientReport r = subquotient_table(parse_mu1(s, m1), parse_mu2(s, m2), 8, &rng);
    const std::string tag = r.cls.tag();
    o = fail_if(!r.cls.reducible(), o, std::string(m1) + " is not reducible");
    o = fail_if(!r.additivity, o, tag + ": additivity");
    o = fail_if(!r.profile, o, tag + ": generic profile");
    for (const auto& [k, v] : r.evidence) o = fail_if(!v, o, tag + ": " + k);
    seen += (seen.empty() ? "" : ", ") + tag;
  }
  if (o.ok) o.detail = "additive for n <= 8: " + seen;
  return o;
}

// 7. Oldform tower.
Outcome oldforms() {
  const FieldParams& fp = FieldParams::get(3);
  std::mt19937_64 rng(107);
  const SuiteResult r = verify_oldforms(fp, 4, rng);
  Outcome o;
  for (const auto& c : r.checks) o = fail_if(!c.passed, o, c.property);
  if (o.ok) o.detail = std::to_string(r.rows.size()) + " tower levels with expected rank, theta' eta = eta theta'";
  return o;
}

// 8. Cayley generation of E¹/E¹_m.
Outcome e1_generation() {
  Outcome o;
  for (int p : {3, 5}) {
    const FieldParams& fp = FieldParams::get(p);
    const SuiteResult r = verify_e1(fp, 3);
    for (const auto& c : r.checks) o = fail_if(!c.passed, o, "p=" + std::to_string(p) + ": " + c.property);
    for (int m = 1; m <= 3; ++m) {
      o = fail_if(cayley_generated_order(fp, m) != brute_norm_one(p, m, fp.eps), o,
                  "p=" + std::to_string(p) + " m=" + std::to_string(m) + ": brute-force count differs");
    }
    o = fail_if(brute_norm_one(p, 1, fp.eps) != p + 1, o, "|E^1/E^1_1| != q+1");
  }
  if (o.ok) o.detail = "p = 3, 5; m = 1..3; |E^1/E^1_1| = q+1";
  return o;
}

// 9. Randomized arithmetic and group laws.
Outcome randomized() {
  Outcome o;
  const FieldParams& fp = FieldParams::get(3);
  std::mt19937_64 rng(109);
  std::uniform_int_distribution<int> vd(-3, 3);
  int ultra = 0, mult = 0, anti = 0, closure = 0, iw = 0;
  for (int t = 0; t < 1000; ++t) {
    const EElem x = detail::random_e_unit(fp, rng, vd(rng));
    const EElem y = detail::random_e_unit(fp, rng, vd(rng));
    const EElem sum = x + y;
    if (sum.is_zero() || sum.val() >= std::min(x.val(), y.val())) ++ultra;
    if ((x * y).val() == x.val() + y.val()) ++mult;
    const GMat g = sample(SubgroupSpec::G(), fp, rng, 3);
    const GMat h = sample(SubgroupSpec::G(), fp, rng, 3);
    if ((g * h).sigma().equals(h.sigma() * g.sigma())) ++anti;
    if ((g * h * (g * h).sigma()).equals(GMat::identity(fp))) ++closure;
    try {
      const Iwasawa f = iwasawa(g);
      if ((f.b * f.k).equals(g) && membership(f.b, SubgroupSpec::B()) && membership(f.k, SubgroupSpec::K(0))) ++iw;
    } catch (const Error&) {
    }
  }
  o = fail_if(ultra != 1000, o, "ultrametric " + std::to_string(ultra));
  o = fail_if(mult != 1000, o, "val multiplicativity " + std::to_string(mult));
  o = fail_if(anti != 1000, o, "sigma anti-automorphism " + std::to_string(anti));
  o = fail_if(closure != 1000, o, "g*sigma(g) = 1 closure " + std::to_string(closure));
  o = fail_if(iw != 1000, o, "iwasawa roundtrip " + std::to_string(iw));
  if (o.ok) o.detail = "1000 cases each: ultrametric, val(xy), sigma, closure, iwasawa";
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "conductor formula", 10, conductor_formula},
      {2, "dimension formula and stabilizer modes", 60, dimension_formula},
      {3, "coset reduction", 60, coset_reduction},
      {4, "theta' scalar", 10, theta_scalar},
      {5, "Steinberg level lowering", 30, steinberg},
      {6, "subquotient tables", 30, subquotients},
      {7, "oldform tower", 60, oldforms},
      {8, "Cayley generation of E^1", 10, e1_generation},
      {9, "randomized laws", 30, randomized},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.limit_s;
    const bool pass = o.ok && in_time;
    if (!pass) ++failed;
    std::printf("criterion %d %s: %s (%.2f s, limit %.0f s) %s%s\n", c.id, c.title.c_str(), pass ? "PASS" : "FAIL",
                secs, c.limit_s, o.detail.c_str(), in_time ? "" : " [over time limit]");
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

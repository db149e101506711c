#include <gtest/gtest.h>

#include <random>

#include "newform/characters.hpp"
#include "newform/group.hpp"

using namespace newform;

namespace {

/// Brute-force counts of residue classes modulo p^m: units of 𝔬_E and norm-one classes.
struct ResidueCounts {
  i64 units = 0;
  i64 norm_one = 0;
};

ResidueCounts count_residues(int p, int m, int eps) {
  i64 mod = 1;
  for (int k = 0; k < m; ++k) mod *= p;
  ResidueCounts c;
  for (i64 a = 0; a < mod; ++a) {
    for (i64 b = 0; b < mod; ++b) {
      if (a % p != 0 || b % p != 0) ++c.units;
      const i64 n = ((a * a - eps * b * b) % mod + mod) % mod;
      if (n == 1 % mod) ++c.norm_one;
    }
  }
  return c;
}

EElem random_norm_one(const FieldParams& fp, std::mt19937_64& rng) {
  EElem b = cayley(detail::random_f_in_ideal(fp, rng, 0));
  if (rng() % 2 == 1) b = -b;
  return b;
}

}  // namespace

TEST(Characters, UnitGroupOrdersMatchBruteForce) {
  for (int p : {3, 5}) {
    const FieldParams& fp = FieldParams::get(p);
    for (int m = 1; m <= (p == 3 ? 3 : 2); ++m) {
      const ResidueCounts c = count_residues(p, m, fp.eps);
      const auto& units = UnitGroupModel::get(fp, UnitGroupModel::Kind::Units, m);
      const auto& e1 = UnitGroupModel::get(fp, UnitGroupModel::Kind::E1, m);
      EXPECT_EQ(units.order(), c.units) << p << " " << m;
      EXPECT_EQ(e1.order(), c.norm_one) << p << " " << m;
      EXPECT_EQ(units.order(), units.expected_order());
      EXPECT_EQ(e1.order(), e1.expected_order());
    }
  }
}

TEST(Characters, DiscreteLogInvertsElement) {
  const FieldParams& fp = FieldParams::get(3);
  const auto& g = UnitGroupModel::get(fp, UnitGroupModel::Kind::Units, 2);
  for (const ERes& x : g.elements()) {
    const ERes y = g.element(g.dlog(x));
    EXPECT_EQ(x.a, y.a);
    EXPECT_EQ(x.b, y.b);
  }
}

TEST(Characters, CyclotomicOrderOfTheSession) {
  EXPECT_EQ(CharacterSession::get(FieldParams::get(3), 1).cyclotomic_order(), 8);
  EXPECT_EQ(CharacterSession::get(FieldParams::get(3), 2).cyclotomic_order(), 24);
}

TEST(Characters, CountsByExactConductor) {
  // #characters of exact conductor c = |A/A_c| − |A/A_{c−1}|.
  for (int p : {3, 5}) {
    const FieldParams& fp = FieldParams::get(p);
    const CharacterSession& s = CharacterSession::get(fp, 2);
    const i64 q = p;
    EXPECT_EQ(enumerate_characters(s, s.e1(), 0).size(), 1u);
    EXPECT_EQ(static_cast<i64>(enumerate_characters(s, s.e1(), 1).size()), q);
    EXPECT_EQ(static_cast<i64>(enumerate_characters(s, s.e1(), 2).size()), (q + 1) * q - (q + 1));
    EXPECT_EQ(static_cast<i64>(enumerate_characters(s, s.units(), 1).size()), q * q - 2);
    EXPECT_EQ(static_cast<i64>(enumerate_characters(s, s.units(), 2).size()), (q * q - 1) * q * q - (q * q - 1));
  }
}

TEST(Characters, CharactersAreHomomorphismsWithTheirConductor) {
  const FieldParams& fp = FieldParams::get(3);
  const CharacterSession& s = CharacterSession::get(fp, 2);
  const i64 n = s.cyclotomic_order();
  std::mt19937_64 rng(3);
  for (int c = 0; c <= 2; ++c) {
    for (const FiniteChar& chi : enumerate_characters(s, s.units(), c)) {
      for (int k = 0; k < 10; ++k) {
        const EElem x = detail::random_e_unit(fp, rng), y = detail::random_e_unit(fp, rng);
        EXPECT_EQ((chi.root(x) + chi.root(y)) % n, chi.root(x * y));
      }
      // Trivial on 1 + 𝔭^c, and nontrivial on 1 + 𝔭^{c−1} when c ≥ 1.
      if (c >= 1) {
        for (int k = 0; k < 10; ++k) {
          EXPECT_EQ(chi.root(EElem::one(fp) + detail::random_e_in_ideal(fp, rng, c)), 0);
        }
        bool nontrivial = false;
        for (int a = 0; a < 3; ++a) {
          for (int b = 0; b < 3; ++b) {
            const EElem x = EElem::one(fp) + (EElem::from_int(fp, a) + EElem::from_int(fp, b) * EElem::sqrt_eps(fp))
                                                 .shift(c - 1);
            if (x.val() == 0) nontrivial = nontrivial || chi.root(x) != 0;
          }
        }
        EXPECT_TRUE(nontrivial);
      }
    }
  }
}

TEST(Characters, CayleyElements) {
  const FieldParams& fp = FieldParams::get(3);
  const EElem c = cayley(FElem::from_int(fp, 1));
  EXPECT_EQ(c.norm(), FElem::from_int(fp, 1));
  const auto [a, b] = c.residue(1);
  EXPECT_EQ(a, 0u);
  EXPECT_EQ(b, 2u);  // cayley(1) ≡ 2√ε mod p
  std::mt19937_64 rng(4);
  for (int k = 0; k < 100; ++k) {
    EXPECT_EQ(cayley(detail::random_f_in_ideal(fp, rng, 0)).norm(), FElem::from_int(fp, 1));
  }
  EXPECT_THROW(cayley(FElem::uniformizer_power(fp, -1)), std::invalid_argument);
}

TEST(Characters, CayleyElementsGenerateE1Quotients) {
  for (int p : {3, 5}) {
    const FieldParams& fp = FieldParams::get(p);
    for (int m = 1; m <= 3; ++m) EXPECT_EQ(cayley_generated_order(fp, m), count_residues(p, m, fp.eps).norm_one);
  }
}

TEST(Characters, QuasiCharacterValues) {
  const FieldParams& fp = FieldParams::get(3);
  const CharacterSession& s = CharacterSession::get(fp, 1);
  const QuasiCharE abs = QuasiCharE::abs_power(s, 1);
  EXPECT_EQ(abs(EElem::uniformizer_power(fp, 1)), (Monomial{Rational(1, 9), 0}));
  EXPECT_EQ(abs(EElem::uniformizer_power(fp, -2)), (Monomial{Rational(81), 0}));
  EXPECT_EQ(abs(EElem::from_int(fp, 2)), (Monomial{Rational(1), 0}));
}

TEST(Characters, ClassificationExamples) {
  const FieldParams& fp = FieldParams::get(3);
  const CharacterSession& s = CharacterSession::get(fp, 2);
  auto tag = [&](const std::string& m1, const std::string& m2) {
    return classify_reducibility(parse_mu1(s, m1), parse_mu2(s, m2)).tag();
  };
  EXPECT_EQ(tag("|.|_E", "triv"), "RU1+");
  EXPECT_EQ(tag("|.|_E^-1", "triv"), "RU1-");
  EXPECT_EQ(tag("omega*|.|", "triv"), "RU2+");
  EXPECT_EQ(tag("omega*|.|^-1", "triv"), "RU2-");
  EXPECT_EQ(tag("triv", "c2=1,idx=0"), "RU3");
  EXPECT_EQ(tag("triv", "triv"), "IRRED");
  EXPECT_EQ(tag("pi=1/3", "triv"), "IRRED");
  EXPECT_EQ(tag("c1=1,idx=0,pi=1", "triv"), "IRRED");
  EXPECT_EQ(tag("c1=1,idx=1,pi=1", "c2=1,idx=1"), "R3 (ramified)");
}

TEST(Characters, TwistedCharacterMatchesDirectEvaluation) {
  const FieldParams& fp = FieldParams::get(3);
  const CharacterSession& s = CharacterSession::get(fp, 2);
  const i64 n = s.cyclotomic_order();
  std::mt19937_64 rng(5);
  for (const FiniteChar& c1 : enumerate_characters(s, s.units(), 1)) {
    for (const FiniteChar& c2 : enumerate_characters(s, s.e1(), 1)) {
      const QuasiCharE mu1(c1, {Rational(1), 0});
      const CharE1 mu2(c2);
      const QuasiCharE tilde = twisted_char(mu1, mu2);
      for (int k = 0; k < 5; ++k) {
        const EElem x = detail::random_e_unit(fp, rng);
        EXPECT_EQ(tilde(x).root, (mu1(x).root + mu2(x.conj() / x).root) % n);
      }
    }
  }
}

TEST(Characters, CentralCharacterMatchesDirectEvaluation) {
  const FieldParams& fp = FieldParams::get(3);
  const CharacterSession& s = CharacterSession::get(fp, 2);
  const i64 n = s.cyclotomic_order();
  std::mt19937_64 rng(6);
  const CentralCharacter triv = central_character(QuasiCharE::abs_power(s, 1), CharE1::trivial(s));
  EXPECT_EQ(triv.conductor, 0);
  for (int c1 = 0; c1 <= 2; ++c1) {
    for (int c2 = 0; c2 <= 2; ++c2) {
      const QuasiCharE mu1(enumerate_characters(s, s.units(), c1).front(), {Rational(1, 3), 0});
      const CharE1 mu2(enumerate_characters(s, s.e1(), c2).back());
      const CentralCharacter cc = central_character(mu1, mu2);
      EXPECT_LE(cc.conductor, std::max(c1, c2));
      for (int k = 0; k < 10; ++k) {
        const EElem b = random_norm_one(fp, rng);
        EXPECT_EQ(cc.omega(b).root, (mu1(b).root + mu2(b).root) % n);
      }
    }
  }
}

TEST(Characters, SpecParsing) {
  const FieldParams& fp = FieldParams::get(3);
  const CharacterSession& s = CharacterSession::get(fp, 2);
  const QuasiCharE m = parse_mu1(s, "c1=2,idx=3,pi=-1/3*z^2");
  EXPECT_EQ(m.conductor(), 2);
  EXPECT_EQ(m.pi_value(), (Monomial{Rational(1, 3), 14}));
  EXPECT_EQ(parse_mu2(s, "c2=1,idx=2").conductor(), 1);
  EXPECT_EQ(spec_conductor("c1=1,idx=0,c2=2"), 2);
  EXPECT_EQ(spec_conductor("|.|_E"), 0);
  EXPECT_THROW(parse_mu1(s, "c1=1,idx=99"), ParseError);
  EXPECT_THROW(parse_mu1(s, "c1=3"), ParseError);
  EXPECT_THROW(parse_mu1(s, "pi=0"), ParseError);
  EXPECT_THROW(parse_mu2(s, "c2=x"), ParseError);
  EXPECT_THROW(parse_mu2(s, "bogus"), ParseError);
}

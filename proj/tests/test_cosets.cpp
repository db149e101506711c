#include <gtest/gtest.h>

#include <random>

#include "newform/cosets.hpp"

using namespace newform;

namespace {

GMat synthesize(const FieldParams& fp, int i, int n, std::mt19937_64& rng) {
  return sample_borel(fp, rng) * gamma_elem(fp, i) * sample(SubgroupSpec::K(n), fp, rng);
}

}  // namespace

TEST(Cosets, RepresentativesRunFromHalfToN) {
  const FieldParams& fp = FieldParams::get(3);
  EXPECT_EQ(reps(fp, 0).size(), 1u);
  EXPECT_EQ(reps(fp, 5).size(), 3u);
  EXPECT_EQ(reps(fp, 6).size(), 4u);
  EXPECT_TRUE(reps(fp, 4).front().equals(gamma_elem(fp, 2)));
}

TEST(Cosets, ReduceRecoversTheSynthesizedIndex) {
  for (int p : {3, 5}) {
    const FieldParams& fp = FieldParams::get(p);
    std::mt19937_64 rng(10);
    for (int n = 0; n <= 5; ++n) {
      for (int i = (n + 1) / 2; i <= n; ++i) {
        for (int k = 0; k < 20; ++k) {
          const GMat g = synthesize(fp, i, n, rng);
          const ReductionCertificate c = reduce(g, n);
          EXPECT_EQ(c.i, i);
          EXPECT_TRUE(verify_certificate(c, g, n));
          EXPECT_EQ(reduce(g, n, &rng).i, i);
        }
      }
    }
  }
}

TEST(Cosets, DiagonalElementsReduceToTheTopRepresentative) {
  // diag(a, β, ā^{-1}) = b·γ_n·k with b diagonal and k = γ_n^{-1}.
  const FieldParams& fp = FieldParams::get(3);
  std::mt19937_64 rng(11);
  for (int n = 0; n <= 4; ++n) {
    const GMat d = sample(SubgroupSpec::T(), fp, rng) * zeta_elem(fp);
    const ReductionCertificate c = reduce(d, n);
    EXPECT_EQ(c.i, n);
    EXPECT_TRUE(c.b.is_diagonal());
    EXPECT_TRUE(c.b.equals(d));
  }
}

TEST(Cosets, IndexIsInvariantUnderRightKTranslation) {
  const FieldParams& fp = FieldParams::get(3);
  std::mt19937_64 rng(12);
  for (int n = 1; n <= 5; ++n) {
    for (int k = 0; k < 30; ++k) {
      const GMat g = sample(SubgroupSpec::G(), fp, rng);
      const int i = reduce(g, n).i;
      EXPECT_EQ(reduce(g * sample(SubgroupSpec::K(n), fp, rng), n).i, i);
      EXPECT_EQ(reduce(sample_borel(fp, rng) * g, n).i, i);
    }
  }
}

TEST(Cosets, TamperedCertificatesAreRejected) {
  const FieldParams& fp = FieldParams::get(3);
  std::mt19937_64 rng(13);
  const GMat g = synthesize(fp, 2, 3, rng);
  const ReductionCertificate good = reduce(g, 3);
  ASSERT_TRUE(verify_certificate(good, g, 3));

  ReductionCertificate wrong_i = good;
  wrong_i.i = 3;
  EXPECT_FALSE(verify_certificate(wrong_i, g, 3));

  ReductionCertificate out_of_k = good;
  out_of_k.k = out_of_k.k * zeta_elem(fp);
  out_of_k.b = out_of_k.b * gamma_elem(fp, 2) * zeta_elem(fp).inverse() * gamma_elem(fp, 2).inverse();
  EXPECT_FALSE(verify_certificate(out_of_k, g, 3));

  ReductionCertificate not_borel = good;
  not_borel.b = not_borel.b * t_n_elem(fp, 0);
  EXPECT_FALSE(verify_certificate(not_borel, g, 3));

  EXPECT_FALSE(verify_certificate(good, g, 4));
}

TEST(Cosets, ReduceRejectsUncertifiedInput) {
  const FieldParams& fp = FieldParams::get(3);
  const GMat m = GMat::diagonal(EElem::from_int(fp, 2), EElem::one(fp), EElem::one(fp));
  EXPECT_THROW(reduce(m, 2), NotUnitary);
}

TEST(Cosets, StabilizerFormulaAgreesWithSampling) {
  const FieldParams& fp = FieldParams::get(3);
  const CharacterSession& s = CharacterSession::get(fp, 2);
  std::mt19937_64 rng(14);
  for (int c1 = 0; c1 <= 2; ++c1) {
    for (int c2 = 0; c2 <= 2; ++c2) {
      const TorusChar mu{QuasiCharE(enumerate_characters(s, s.units(), c1).front(), {Rational(1), 0}),
                         CharE1(enumerate_characters(s, s.e1(), c2).front())};
      for (int n = 0; n <= 5; ++n) {
        for (int i = (n + 1) / 2; i <= n; ++i) {
          const StabilizerReport rep = sample_stabilizer(mu, i, n, rng, 50);
          EXPECT_GE(rep.samples, 50);
          EXPECT_EQ(rep.trivial, mu_trivial_on_stabilizer(mu, i, n, StabilizerMode::Formula))
              << "c1=" << c1 << " c2=" << c2 << " n=" << n << " i=" << i;
        }
      }
    }
  }
}

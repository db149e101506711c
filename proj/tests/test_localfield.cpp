#include <gtest/gtest.h>

#include <random>
#include <set>

#include "newform/group.hpp"
#include "newform/localfield.hpp"

using namespace newform;

namespace {

int smallest_nonsquare(int p) {
  for (int e = 2; e < p; ++e) {
    bool square = false;
    for (int x = 1; x < p; ++x) square = square || (x * x) % p == e;
    if (!square) return e;
  }
  return -1;
}

}  // namespace

TEST(LocalField, ChooseEpsIsSmallestNonSquare) {
  EXPECT_EQ(choose_eps(3), 2);
  EXPECT_EQ(choose_eps(5), 2);
  EXPECT_EQ(choose_eps(7), 3);
  for (int p : {11, 13, 17, 19, 23}) EXPECT_EQ(choose_eps(p), smallest_nonsquare(p)) << p;
}

TEST(LocalField, RejectsBadParameters) {
  EXPECT_THROW(FieldParams::get(4), std::invalid_argument);
  EXPECT_THROW(FieldParams::get(2), std::invalid_argument);
  EXPECT_THROW(FieldParams::get(5, 24, 4, 4), std::invalid_argument);  // 4 = 2^2
  EXPECT_THROW(FieldParams::get(7, 24), std::invalid_argument);         // 7^24 > 2^62
}

TEST(LocalField, InverseOfOnePlusSqrtEps) {
  // (1 + √ε)^{-1} = (1 − √ε)/(1 − ε), and 1 − ε = −1 when p = 3.
  const FieldParams& fp = FieldParams::get(3);
  const EElem x = EElem::one(fp) + EElem::sqrt_eps(fp);
  const EElem inv = x.inverse();
  EXPECT_EQ(inv, EElem::from_int(fp, -1) + EElem::sqrt_eps(fp));
  EXPECT_EQ(x * inv, EElem::one(fp));
}

TEST(LocalField, ResidueFieldHasQSquaredElements) {
  const FieldParams& fp = FieldParams::get(5);
  std::set<std::string> seen;
  int units = 0;
  for (int a = 0; a < 5; ++a) {
    for (int b = 0; b < 5; ++b) {
      const EElem x = EElem::from_int(fp, a) + EElem::from_int(fp, b) * EElem::sqrt_eps(fp);
      seen.insert(x.to_string());
      if (!x.is_zero()) {
        ++units;
        EXPECT_EQ(x.val(), 0);
      }
    }
  }
  EXPECT_EQ(seen.size(), 25u);
  EXPECT_EQ(units, 24);
}

TEST(LocalField, ParsePrintRoundTrip) {
  for (int p : {3, 5}) {
    const FieldParams& fp = FieldParams::get(p);
    std::mt19937_64 rng(7);
    for (int k = 0; k < 200; ++k) {
      const int v = static_cast<int>(rng() % 7) - 3;
      const EElem x = detail::random_e_unit(fp, rng).shift(v);
      EXPECT_EQ(parse_element(fp, x.to_string()), x) << x.to_string();
    }
  }
}

TEST(LocalField, ParsesSimpleLiterals) {
  const FieldParams& fp = FieldParams::get(3);
  EXPECT_EQ(parse_element(fp, "-3"), EElem::from_int(fp, -3));
  EXPECT_EQ(parse_element(fp, "s"), EElem::sqrt_eps(fp));
  EXPECT_EQ(parse_element(fp, "1/2") * EElem::from_int(fp, 2), EElem::one(fp));
  EXPECT_EQ(parse_element(fp, "vE^-2").val(), -2);
  EXPECT_EQ(parse_element(fp, "(1-s)*(1+s)"), EElem::from_int(fp, 1 - fp.eps));
  EXPECT_THROW(parse_element(fp, "1+"), ParseError);
  EXPECT_THROW(parse_element(fp, "x"), ParseError);
}

TEST(LocalField, ValuationAxiomsOnRandomPairs) {
  const FieldParams& fp = FieldParams::get(3);
  std::mt19937_64 rng(11);
  for (int k = 0; k < 1000; ++k) {
    const EElem x = detail::random_e_unit(fp, rng).shift(static_cast<int>(rng() % 5) - 2);
    const EElem y = detail::random_e_unit(fp, rng).shift(static_cast<int>(rng() % 5) - 2);
    EXPECT_EQ((x * y).val(), x.val() + y.val());
    const EElem s = x + y;
    if (!s.is_zero()) {
      EXPECT_GE(s.val(), std::min(x.val(), y.val()));
      if (x.val() != y.val()) {
        EXPECT_EQ(s.val(), std::min(x.val(), y.val()));
      }
    }
    EXPECT_EQ(x.norm().val(), 2 * x.val());
  }
}

TEST(LocalField, ConjugationIsAFieldAutomorphism) {
  const FieldParams& fp = FieldParams::get(5);
  std::mt19937_64 rng(12);
  for (int k = 0; k < 200; ++k) {
    const EElem x = detail::random_e_unit(fp, rng);
    const EElem y = detail::random_e_unit(fp, rng);
    EXPECT_EQ((x * y).conj(), x.conj() * y.conj());
    EXPECT_EQ((x + y).conj(), x.conj() + y.conj());
    EXPECT_EQ(EElem(x.norm()), x * x.conj());
  }
}

TEST(LocalField, CancellationKeepsAbsolutePrecision) {
  const FieldParams& fp = FieldParams::get(3);
  const FElem a = FElem::from_int(fp, 1);
  const FElem b = a + FElem::uniformizer_power(fp, 20);
  const FElem d = b - a;
  EXPECT_EQ(d.val(), 20);
  EXPECT_EQ(d.abs_prec(), 24);
  EXPECT_EQ(d.eff_prec(), 4);
}

TEST(LocalField, GuardBandFailuresAreTyped) {
  const FieldParams& fp = FieldParams::get(3);
  const FElem low = FElem::from_unit(fp, 0, 1, 2);  // two digits, below the guard band
  EXPECT_THROW(low * FElem::from_int(fp, 2), PrecisionLoss);
  EXPECT_THROW(low.inverse(), PrecisionLoss);
  EXPECT_THROW(FElem::zero(fp, 10).inverse(), DivisionByIndistinguishableZero);
  EXPECT_NO_THROW(low + FElem::from_int(fp, 2));
}

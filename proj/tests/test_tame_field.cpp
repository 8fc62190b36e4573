#include <gtest/gtest.h>

#include <random>

#include "hypsol/tame_field.hpp"
#include "test_support.hpp"

using namespace hypsol;
using hypsol::testing::random_element;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InternalError;
}

}  // namespace

TEST(TowerCreate, BaseField) {
  auto t = Tower::create(7, 1, 1, 20);
  EXPECT_EQ(t->q(), 7);
  EXPECT_EQ(TowerElement::pi_power(t, 1).valuation(), Rational(1));
}

TEST(TowerCreate, RamifiedUnramified) {
  auto t = Tower::create(7, 2, 3, 20);
  EXPECT_EQ(t->q(), 49);
  EXPECT_EQ(TowerElement::pi_power(t, 1).valuation(), Rational(1, 3));
}

TEST(TowerCreate, Errors) {
  EXPECT_EQ(kind_of([] { Tower::create(7, 1, 7, 20); }), ErrorKind::WildRamification);
  EXPECT_EQ(kind_of([] { Tower::create(9, 1, 1, 20); }), ErrorKind::NonOddPrime);
  EXPECT_EQ(kind_of([] { Tower::create(2, 1, 1, 20); }), ErrorKind::NonOddPrime);
}

TEST(TowerArith, PiToTheE) {
  auto t = Tower::create(7, 2, 3, 20);
  auto x = TowerElement::pi_power(t, 1) * TowerElement::pi_power(t, 2);
  EXPECT_TRUE(x.equals(TowerElement::from_integer(t, 7)));
  EXPECT_EQ(x.valuation(), Rational(1));
  EXPECT_EQ(TowerElement::pi_power(t, 1).inverse().valuation(), Rational(-1, 3));
}

TEST(TowerArith, CancellationTracksPrecision) {
  // Exact integer arithmetic: (1 + 7^10) - 1 = 7^10.
  auto t = Tower::create(7, 1, 1, 20);
  mpz_class big;
  mpz_ui_pow_ui(big.get_mpz_t(), 7, 10);
  auto x = TowerElement::from_integer(t, big + 1) - TowerElement::from_integer(t, 1);
  EXPECT_EQ(x.valuation(), Rational(10));
  EXPECT_EQ(x.relative_precision(), 10);
  EXPECT_TRUE(x.equals(TowerElement::from_integer(t, big)));
}

TEST(TowerArith, CancellationToZeroIsInexact) {
  auto t = Tower::create(7, 1, 1, 20);
  auto one = TowerElement::from_integer(t, 1);
  auto z = one - one;
  EXPECT_TRUE(z.is_zero());
  EXPECT_FALSE(z.is_exact_zero());
  EXPECT_EQ(kind_of([&] { (void)z.valuation(); }), ErrorKind::PrecisionExhausted);
  EXPECT_EQ(kind_of([&] { (void)z.inverse(); }), ErrorKind::DivisionByZero);
  EXPECT_FALSE(TowerElement::zero(t).valuation().has_value());
}

TEST(TowerArith, CubeRootDifferences) {
  // zeta_3^i p^{2/3} - zeta_3^j p^{2/3} = (zeta^i - zeta^j) pi^2 with a unit first factor.
  auto t = Tower::create(7, 1, 3, 30);
  auto z = TowerElement::from_unramified(t, t->root_of_unity(3));
  auto r0 = TowerElement::pi_power(t, 2);
  auto r1 = z * r0, r2 = z * z * r0;
  EXPECT_EQ((r0 - r1).valuation(), Rational(2, 3));
  EXPECT_EQ((r1 - r2).valuation(), Rational(2, 3));
  EXPECT_TRUE((r0.pow(3)).equals(TowerElement::from_integer(t, 49)));
}

TEST(TowerArith, Residue) {
  auto t = Tower::create(7, 1, 1, 20);
  EXPECT_EQ(TowerElement::from_integer(t, 3 + 7 * 5).residue(), 3u);
  EXPECT_EQ(TowerElement::from_integer(t, 7).residue(), 1u);
  auto t3 = Tower::create(7, 2, 3, 20);
  EXPECT_EQ(TowerElement::from_integer(t3, 7).residue(), 1u);
  EXPECT_EQ(kind_of([&] { (void)TowerElement::zero(t).residue(); }), ErrorKind::ZeroElement);
}

TEST(TowerSqrt, Basics) {
  auto t = Tower::create(7, 2, 3, 24);
  auto one = TowerElement::from_integer(t, 1);
  EXPECT_TRUE(one.sqrt().equals(one));
  auto pi = TowerElement::pi_power(t, 1);
  auto r = (pi * pi).sqrt();
  EXPECT_TRUE((r * r).equals(pi * pi));
  EXPECT_EQ(kind_of([&] { (void)pi.sqrt(); }), ErrorKind::NoSquareRoot);
  EXPECT_EQ(pi.sqrt_obstruction(), SqrtFailure::OddValuation);
  // omega is a non-square: omega^{(q-1)/2} = -1.
  const auto& f = t->residue_field();
  auto w = f.generator();
  ASSERT_EQ(f.pow(w, (t->q() - 1) / 2), f.neg(f.one()));
  auto omega = TowerElement::from_residue(t, w);
  EXPECT_EQ(omega.sqrt_obstruction(), SqrtFailure::NonResidue);
  EXPECT_EQ(kind_of([&] { (void)omega.sqrt(); }), ErrorKind::NoSquareRoot);
}

TEST(TowerGalois, GeneratorActions) {
  auto t = Tower::create(7, 2, 3, 24);
  auto pi = TowerElement::pi_power(t, 1);
  auto zeta = TowerElement::from_unramified(t, t->zeta_e());
  EXPECT_TRUE(pi.apply(GaloisWord::tau()).equals(zeta * pi));
  const auto& f = t->residue_field();
  auto omega = TowerElement::from_residue(t, f.generator());
  EXPECT_EQ(omega.apply(GaloisWord::frob()).residue(), f.pow(f.generator(), 7));
  EXPECT_EQ(chi(*t, GaloisWord::tau()), t->zeta_e_residue());
  EXPECT_EQ(chi(*t, GaloisWord::frob()), f.one());
  EXPECT_EQ(chi(*t, GaloisWord::tau(2)), f.pow(t->zeta_e_residue(), 2));
  EXPECT_TRUE(pi.apply(GaloisWord::frob()).equals(pi));
}

class TowerProperties : public ::testing::TestWithParam<std::tuple<long, int, int>> {};

TEST_P(TowerProperties, FieldAxiomsValuationGaloisAndSqrt) {
  auto [p, d, e] = GetParam();
  auto t = Tower::create(p, d, e, 40);
  std::mt19937_64 rng(1234 + p * 100 + d * 10 + e);
  const GaloisWord tau = GaloisWord::tau(), phi = GaloisWord::frob();
  const int cases = 1000;
  for (int i = 0; i < cases; ++i) {
    auto x = random_element(t, rng), y = random_element(t, rng), z = random_element(t, rng);
    ASSERT_TRUE(((x + y) + z).equals(x + (y + z)));
    ASSERT_TRUE((x * (y + z)).equals(x * y + x * z));
    ASSERT_TRUE((x * x.inverse()).equals(TowerElement::from_integer(t, 1)));
    ASSERT_EQ(*(x * y).valuation(), *x.valuation() + *y.valuation());
    auto s = x + y;
    if (!s.is_zero()) {
      ASSERT_GE(*s.valuation(), std::min(*x.valuation(), *y.valuation()));
      if (*x.valuation() != *y.valuation())
        ASSERT_EQ(*s.valuation(), std::min(*x.valuation(), *y.valuation()));
    }
    ASSERT_EQ((x * y).residue(), t->residue_field().mul(x.residue(), y.residue()));
    // Galois: ring homomorphism, phi tau = tau^p phi.
    ASSERT_TRUE((x * y).apply(tau).equals(x.apply(tau) * y.apply(tau)));
    ASSERT_TRUE((x + y).apply(phi).equals(x.apply(phi) + y.apply(phi)));
    ASSERT_TRUE(x.apply(tau).apply(phi).equals(x.apply(phi).apply(GaloisWord::tau(p))));
    // sqrt soundness and exact failure conditions.
    auto sq = x * x;
    ASSERT_TRUE(sq.is_square());
    auto r = sq.sqrt();
    ASSERT_TRUE((r * r).equals(sq));
    bool expect_square = x.valuation_units() % 2 == 0 && t->residue_field().is_square(x.residue());
    ASSERT_EQ(x.is_square(), expect_square);
    if (expect_square) ASSERT_TRUE((x.sqrt() * x.sqrt()).equals(x));
  }
  // Q_p elements are fixed by both generators.
  auto n = TowerElement::from_integer(t, 123456789);
  EXPECT_TRUE(n.apply(tau).equals(n));
  EXPECT_TRUE(n.apply(phi).equals(n));
  // tau has exact order e, phi has order d on the unramified part.
  auto pi = TowerElement::pi_power(t, 1);
  for (int k = 1; k < e; ++k) EXPECT_FALSE(pi.apply(GaloisWord::tau(k)).equals(pi));
  EXPECT_TRUE(pi.apply(GaloisWord::tau(e)).equals(pi));
  auto omega = TowerElement::from_residue(t, t->residue_field().generator());
  for (int k = 1; k < d; ++k) EXPECT_FALSE(omega.apply(GaloisWord::frob(k)).equals(omega));
  EXPECT_TRUE(omega.apply(GaloisWord::frob(d)).equals(omega));
}

INSTANTIATE_TEST_SUITE_P(Towers, TowerProperties,
                         ::testing::Values(std::make_tuple(7L, 1, 1), std::make_tuple(7L, 2, 3),
                                           std::make_tuple(11L, 2, 4), std::make_tuple(13L, 1, 6),
                                           std::make_tuple(5L, 2, 12)));

TEST(TowerDigits, TeichmullerExpansion) {
  auto t = Tower::create(7, 2, 3, 30);
  const auto& f = t->residue_field();
  auto a = f.exp(5), b = f.exp(17);
  auto x = TowerElement::from_unramified(t, t->teichmuller(a)) +
           TowerElement::from_unramified(t, t->teichmuller(b)) * TowerElement::pi_power(t, 2);
  auto dg = x.digits(4);
  ASSERT_EQ(dg.size(), 4u);
  EXPECT_EQ(dg[0], a);
  EXPECT_EQ(dg[1], 0u);
  EXPECT_EQ(dg[2], b);
  EXPECT_EQ(dg[3], 0u);
}

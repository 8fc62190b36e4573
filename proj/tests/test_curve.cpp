#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <functional>

#include "hypsol/curve.hpp"

using namespace hypsol;

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

const char* kEx1 = "(x^4-p^17)*(x^3-p^2)";
const char* kEx2 = "p*((x-1)^2+p^2)*((x-zeta(3))^2+p^2)*((x-zeta(3)^2)^2+p^2)";
const char* kEx3 = "p*(x^3-p^2)*((x-1)^3-p^2)";

CurveExpr with_p(const char* s, long p) { return normalize(parse_expr(s), p); }

TowerElement horner(const ZPoly& f, const TowerElement& x) {
  auto t = x.tower();
  TowerElement acc = TowerElement::zero(t);
  for (std::size_t i = f.size(); i-- > 0;) acc = acc * x + TowerElement::from_integer(t, f[i]);
  return acc;
}

int perm_order(const std::vector<int>& p) {
  std::vector<int> cur = p;
  for (int k = 1; k < 1000; ++k) {
    bool id = true;
    for (std::size_t i = 0; i < cur.size(); ++i) id = id && cur[i] == static_cast<int>(i);
    if (id) return k;
    for (auto& c : cur) c = p[c];
  }
  return -1;
}

}  // namespace

TEST(ParseExpr, ThreeSizeThreeClusters) {
  auto c = parse_expr(kEx3);
  EXPECT_EQ(c.cf_pow, 1);
  EXPECT_EQ(c.cf_unit, 1);
  ASSERT_EQ(c.factors.size(), 2u);
  for (const auto& f : c.factors) {
    EXPECT_FALSE(f.linear);
    EXPECT_EQ(f.n, 3);
    EXPECT_EQ(f.m, 2);
    EXPECT_EQ(f.rhs_unit, 1);
  }
  EXPECT_TRUE(c.factors[0].center == CycloExpr::integer(0));
  EXPECT_TRUE(c.factors[1].center == CycloExpr::integer(1));
  EXPECT_EQ(c.degree(), 6);
}

TEST(ParseExpr, TwoBinomials) {
  auto c = parse_expr(kEx1);
  EXPECT_EQ(c.cf_pow, 0);
  ASSERT_EQ(c.factors.size(), 2u);
  EXPECT_EQ(c.factors[0].n, 4);
  EXPECT_EQ(c.factors[0].m, 17);
  EXPECT_EQ(c.factors[1].n, 3);
  EXPECT_EQ(c.factors[1].m, 2);
}

TEST(ParseExpr, CyclotomicCentersAndSignedRhs) {
  auto c = parse_expr(kEx2);
  ASSERT_EQ(c.factors.size(), 3u);
  EXPECT_EQ(c.factors[1].rhs_unit, -1);
  EXPECT_EQ(c.factors[1].m, 2);
  EXPECT_TRUE(c.factors[1].center == CycloExpr::zeta(3));
  EXPECT_TRUE(c.factors[2].center == CycloExpr::zeta(3, 2));
  // zeta^2 = -1 - zeta
  EXPECT_TRUE(c.factors[2].center == CycloExpr::integer(-1) - CycloExpr::zeta(3));
}

TEST(ParseExpr, LinearFactorsAndJuxtaposition) {
  auto c = parse_expr("-3 p (x)(x-1)(x+2)(x-3)(x-4)");
  EXPECT_EQ(c.cf_unit, -3);
  EXPECT_EQ(c.cf_pow, 1);
  ASSERT_EQ(c.factors.size(), 5u);
  EXPECT_TRUE(c.factors[2].linear);
  EXPECT_TRUE(c.factors[2].center == CycloExpr::integer(-2));
}

TEST(ParseExpr, Errors) {
  EXPECT_EQ(kind_of([] { parse_expr("(x^2-zeta(3))"); }), ErrorKind::UnsupportedFactor);
  EXPECT_EQ(kind_of([] { parse_expr("(x^2+x+1)*(x^3-p)"); }), ErrorKind::UnsupportedFactor);
  EXPECT_EQ(kind_of([] { parse_expr("((x-1)^2)*(x^3-p)"); }), ErrorKind::UnsupportedFactor);
  EXPECT_EQ(kind_of([] { parse_expr("(x^3-p-p^2)*(x^2-p)"); }), ErrorKind::UnsupportedFactor);
  EXPECT_EQ(kind_of([] { parse_expr("(x^3-p"); }), ErrorKind::SyntaxError);
  EXPECT_EQ(kind_of([] { parse_expr("(y-1)"); }), ErrorKind::UnsupportedFactor);
  EXPECT_EQ(kind_of([] { parse_expr("(x^3-p) $ (x^2-p)"); }), ErrorKind::SyntaxError);
  EXPECT_EQ(kind_of([] { parse_expr("(x^3-p)*(x-1)"); }), ErrorKind::DegreeTooSmall);
}

TEST(ParseExpr, PrintedFormReparses) {
  for (const char* s : {kEx1, kEx2, kEx3, "-2*p^3*(x+1+zeta(5)^2)*(x-3)*((x-zeta(4))^3+5*p^4)"}) {
    auto c = parse_expr(s);
    auto back = parse_expr(c.to_string());
    ASSERT_EQ(back.to_string(), c.to_string()) << s;
    ASSERT_EQ(back.factors.size(), c.factors.size());
    for (std::size_t i = 0; i < c.factors.size(); ++i) {
      EXPECT_TRUE(back.factors[i].center == c.factors[i].center);
      EXPECT_TRUE(back.factors[i].same_shape(c.factors[i]));
    }
  }
}

TEST(CurveFile, HeaderAndLines) {
  auto f = parse_curve_file("# sample\np = 7\n\np*(x^3-p^2)*((x-1)^3-p^2)  # two clusters\n(x)(x-1)(x-2)(x-3)(x-4)\n");
  EXPECT_EQ(f.p, 7);
  ASSERT_EQ(f.curves.size(), 2u);
  EXPECT_EQ(*f.curves[0].p, 7);
  EXPECT_EQ(kind_of([] { parse_curve_file("(x)(x-1)(x-2)(x-3)(x-4)\n"); }), ErrorKind::SyntaxError);
  EXPECT_EQ(kind_of([] { parse_curve_file("p = seven\n"); }), ErrorKind::SyntaxError);
}

TEST(Normalize, MovesPowersOfPAndChecksTameness) {
  auto c = with_p("14*(x^3-7*p)*(x)(x-1)", 7);
  EXPECT_EQ(c.cf_unit, 2);
  EXPECT_EQ(c.cf_pow, 1);
  EXPECT_EQ(c.factors[0].m, 2);
  EXPECT_EQ(c.factors[0].rhs_unit, 1);
  EXPECT_EQ(kind_of([] { with_p("(x^7-p)*(x-1)", 7); }), ErrorKind::WildInput);
  EXPECT_EQ(kind_of([] { with_p("(x-zeta(7))*(x^4-p)", 7); }), ErrorKind::WildInput);
  EXPECT_EQ(kind_of([] { with_p("(x^4-p)*(x-1)", 9); }), ErrorKind::NonOddPrime);
}

TEST(GaloisClosure, Cases) {
  EXPECT_NO_THROW(galois_closure_check(with_p(kEx2, 11)));
  EXPECT_NO_THROW(galois_closure_check(with_p(kEx2, 23)));
  auto lonely = "(x-zeta(3))*(x^4-p)";
  EXPECT_EQ(kind_of([&] { galois_closure_check(with_p(lonely, 11)); }), ErrorKind::NotGaloisClosed);
  EXPECT_NO_THROW(galois_closure_check(with_p(lonely, 7)));
  EXPECT_NO_THROW(galois_closure_check(with_p(kEx3, 11)));
}

TEST(RequiredTower, Examples) {
  auto s3 = required_tower(with_p(kEx3, 7));
  EXPECT_EQ(s3.d, 1);
  EXPECT_EQ(s3.e, 3);
  auto s1 = required_tower(with_p(kEx1, 17));
  EXPECT_EQ(s1.d, 2);
  EXPECT_EQ(s1.e, 12);
  auto s0 = required_tower(with_p("(x)(x-1)(x-2)(x-3)(x-4)", 7));
  EXPECT_EQ(s0.d, 1);
  EXPECT_EQ(s0.e, 1);
  // sqrt(-1) needs F_{p^2} when p = 3 mod 4; the p^2 cancels the ramification.
  auto s2 = required_tower(with_p(kEx2, 11));
  EXPECT_EQ(s2.d, 2);
  EXPECT_EQ(s2.e, 1);
  // 3 is not a square mod 7, so the unit forces d = 2.
  auto su = required_tower(with_p("(x^2-3*p^2)*(x)(x-1)(x-2)", 7));
  EXPECT_EQ(su.d, 2);
}

TEST(ExtractRoots, SizeThreeClusters) {
  auto ec = embed_curve(parse_expr(kEx3), 7);
  const auto& rs = ec.roots;
  ASSERT_EQ(rs.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = i + 1; j < 6; ++j) {
      auto v = *(rs.roots[i] - rs.roots[j]).valuation();
      bool same = rs.tags[i].factor == rs.tags[j].factor;
      EXPECT_EQ(v, same ? Rational(2, 3) : Rational(0));
    }
  // tau cycles each triple, phi is trivial (zeta_3 lies in Q_7).
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_NE(rs.tau_perm[i], static_cast<int>(i));
    EXPECT_EQ(rs.tags[rs.tau_perm[i]].factor, rs.tags[i].factor);
    EXPECT_EQ(rs.frob_perm[i], static_cast<int>(i));
  }
  EXPECT_EQ(perm_order(rs.tau_perm), 3);
}

TEST(ExtractRoots, ThreeTwinsPermutedByFrobenius) {
  for (long p : {11L, 23L}) {
    auto ec = embed_curve(parse_expr(kEx2), p);
    const auto& rs = ec.roots;
    ASSERT_EQ(rs.size(), 6u);
    // roots a +- i p: twins at distance 1, valuation 0 across twins.
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = i + 1; j < 6; ++j) {
        auto v = *(rs.roots[i] - rs.roots[j]).valuation();
        EXPECT_EQ(v, rs.tags[i].factor == rs.tags[j].factor ? Rational(1) : Rational(0));
      }
    for (std::size_t i = 0; i < 6; ++i) {
      EXPECT_EQ(rs.tau_perm[i], static_cast<int>(i));
      int j = rs.frob_perm[i];
      EXPECT_NE(j, static_cast<int>(i));
      // phi(i) = -i swaps within the twin at 1; zeta_3 <-> zeta_3^2 swaps the other two.
      if (rs.tags[i].factor == 0)
        EXPECT_EQ(rs.tags[j].factor, 0);
      else
        EXPECT_EQ(rs.tags[j].factor, 3 - rs.tags[i].factor);
    }
    EXPECT_EQ(perm_order(rs.frob_perm), 2);
  }
}

TEST(ExtractRoots, LinearAndCollisions) {
  auto ec = embed_curve(parse_expr("(x-2)*(x)(x-1)(x-3)(x-4)"), 7);
  EXPECT_TRUE(ec.roots.roots[0].equals(TowerElement::from_integer(ec.roots.tower, 2)));
  // 117650 = 1 + 7^6: distinct roots that agree to the working precision.
  EXPECT_EQ(kind_of([] { embed_curve(parse_expr("(x-1)*(x-117650)(x-2)(x-3)(x-4)"), 7, 6); }),
            ErrorKind::PrecisionExhausted);
  EXPECT_NO_THROW(embed_curve(parse_expr("(x-1)*(x-117650)(x-2)(x-3)(x-4)"), 7, 9));
  EXPECT_EQ(kind_of([] { embed_curve(parse_expr("(x-1)*(x-117650)(x-2)(x-3)(x-4)"), 7, 7); }), ErrorKind::AmbiguousMatch);
  EXPECT_EQ(kind_of([] { embed_curve(parse_expr("(x-1)*(x-1)(x-2)(x-3)(x-4)"), 7); }), ErrorKind::RootCollision);
}

TEST(ExpandPoly, MatchesDirectProducts) {
  // p(x^3 - 49)((x-1)^3 - 49) written out by hand.
  auto f = expand_to_integer_poly(with_p(kEx3, 7));
  ZPoly a{-49, 0, 0, 1}, b{-1 - 49, 3, -3, 1};
  ZPoly expect = zpoly_mul(zpoly_mul(a, b), ZPoly{7});
  EXPECT_EQ(f, expect);
  auto g = expand_to_integer_poly(with_p("(x-1)(x-2)(x-3)(x-4)(x-5)", 7));
  EXPECT_EQ(g, (ZPoly{-120, 274, -225, 85, -15, 1}));
}

TEST(ExpandPoly, CyclotomicPartsCancel) {
  // Complex floating-point product with zeta_3 = exp(2 pi i / 3).
  const long p = 11;
  auto f = expand_to_integer_poly(with_p(kEx2, p));
  ASSERT_EQ(f.size(), 7u);
  using C = std::complex<long double>;
  const long double pi = std::acos(-1.0L);
  std::vector<C> prod{C(1)};
  for (int k = 0; k < 3; ++k) {
    C a = std::polar(1.0L, 2 * pi * k / 3);
    std::vector<C> fac{a * a + C(p * p), -2.0L * a, C(1)};
    std::vector<C> r(prod.size() + 2, C(0));
    for (std::size_t i = 0; i < prod.size(); ++i)
      for (std::size_t j = 0; j < 3; ++j) r[i + j] += prod[i] * fac[j];
    prod = r;
  }
  for (std::size_t i = 0; i < 7; ++i) {
    EXPECT_NEAR(static_cast<double>(prod[i].imag()), 0.0, 1e-6);
    EXPECT_EQ(f[i], mpz_class(static_cast<long>(std::llround(prod[i].real() * p))));
  }
  EXPECT_EQ(kind_of([] { expand_to_integer_poly(with_p("(x-zeta(3))*(x^4-p)", 7)); }),
            ErrorKind::NonRationalCoefficient);
}

class CurveProperties : public ::testing::TestWithParam<std::pair<const char*, long>> {};

TEST_P(CurveProperties, RootsPermutationsExpansion) {
  auto [s, p] = GetParam();
  auto ec = embed_curve(parse_expr(s), p);
  const auto& rs = ec.roots;
  ASSERT_EQ(static_cast<int>(rs.size()), ec.expr.degree());
  auto f = expand_to_integer_poly(ec.expr);
  for (const auto& r : rs.roots) EXPECT_TRUE(horner(f, r).is_zero()) << r.to_string();
  // c_f prod (x - r_i) against the integer coefficients.
  auto t = rs.tower;
  std::vector<TowerElement> coef{rs.leading};
  for (const auto& r : rs.roots) {
    std::vector<TowerElement> nxt(coef.size() + 1, TowerElement::zero(t));
    for (std::size_t i = 0; i < coef.size(); ++i) {
      nxt[i + 1] = nxt[i + 1] + coef[i];
      nxt[i] = nxt[i] - coef[i] * r;
    }
    coef = nxt;
  }
  ASSERT_EQ(coef.size(), f.size());
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_TRUE(coef[i].equals(TowerElement::from_integer(t, f[i]))) << i;
  // tau^e = 1, phi tau phi^{-1} = tau^p.
  int e = t->e();
  std::vector<int> te(rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    int j = static_cast<int>(i);
    for (int k = 0; k < e; ++k) j = rs.tau_perm[j];
    EXPECT_EQ(j, static_cast<int>(i));
  }
  // permutations stable under doubled precision
  auto ec2 = embed_curve(parse_expr(s), p, 2 * t->prec());
  EXPECT_EQ(ec2.roots.tau_perm, rs.tau_perm);
  EXPECT_EQ(ec2.roots.frob_perm, rs.frob_perm);
}

INSTANTIATE_TEST_SUITE_P(
    Curves, CurveProperties,
    ::testing::Values(std::make_pair(kEx1, 17L), std::make_pair(kEx2, 11L), std::make_pair(kEx2, 23L),
                      std::make_pair(kEx3, 7L), std::make_pair(kEx3, 13L),
                      std::make_pair("3*(x^2-2*p^3)*((x-zeta(3))^4-p^2)*((x-zeta(3)^2)^4-p^2)", 5L),
                      std::make_pair("(x-p)*(x^2-p^3)*((x-1)^2-5*p)(x+1)", 7L)));

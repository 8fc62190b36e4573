#include <gtest/gtest.h>

#include "hypsol/residue_field.hpp"

using hypsol::ResidueField;

TEST(ResidueField, PrimeFieldGeneratorIsPrimitive) {
  ResidueField f(7, 1);
  EXPECT_EQ(f.size(), 7);
  // Least monic x + c0 with -c0 primitive: c0 = 2, omega = 5.
  EXPECT_EQ(f.modulus()[0], 2);
  EXPECT_EQ(f.generator(), 5u);
  std::set<ResidueField::Elt> seen;
  for (long k = 0; k < 6; ++k) seen.insert(f.exp(k));
  EXPECT_EQ(seen.size(), 6u);
}

TEST(ResidueField, ExtensionFieldArithmetic) {
  ResidueField f(7, 2);
  EXPECT_EQ(f.size(), 49);
  auto w = f.generator();
  EXPECT_EQ(f.pow(w, 48), f.one());
  for (long k = 1; k < 48; ++k) EXPECT_NE(f.pow(w, k), f.one());
  // modulus(w) == 0
  auto c = f.modulus();
  auto val = f.add(f.add(f.mul(w, w), f.mul(f.from_int(c[1]), w)), f.from_int(c[0]));
  EXPECT_EQ(val, f.zero());
  // Frobenius is additive and has order 2.
  auto a = f.exp(11), b = f.exp(30);
  EXPECT_EQ(f.frobenius(f.add(a, b)), f.add(f.frobenius(a), f.frobenius(b)));
  EXPECT_EQ(f.frobenius(f.frobenius(a)), a);
  EXPECT_NE(f.frobenius(w), w);
}

TEST(ResidueField, CanonicalSquareRootIsTheSmaller) {
  ResidueField f(11, 1);
  for (long a = 1; a < 11; ++a) {
    auto r = f.sqrt(static_cast<ResidueField::Elt>(a));
    bool qr = false;
    for (long x = 1; x < 11; ++x) qr = qr || (x * x % 11 == a);
    ASSERT_EQ(r.has_value(), qr) << a;
    if (r) {
      EXPECT_EQ(f.mul(*r, *r), a);
      EXPECT_LE(*r, f.neg(*r));
    }
  }
}

TEST(ResidueField, NthRoots) {
  ResidueField f(13, 1);
  // cubes in F_13: x^3
  for (long a = 1; a < 13; ++a) {
    auto r = f.nth_root(static_cast<ResidueField::Elt>(a), 3);
    if (r) EXPECT_EQ(f.pow(*r, 3), a);
    bool is_cube = f.pow(static_cast<ResidueField::Elt>(a), 4) == 1;
    EXPECT_EQ(r.has_value(), is_cube);
  }
  EXPECT_EQ(f.pow(f.root_of_unity(4), 4), f.one());
  EXPECT_NE(f.pow(f.root_of_unity(4), 2), f.one());
}

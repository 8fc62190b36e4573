#include <gtest/gtest.h>

#include <random>

#include "hypsol/corpus.hpp"
#include "hypsol/decision.hpp"

using namespace hypsol;

namespace {

const char* kEx1 = "(x^4-p^17)*(x^3-p^2)";
const char* kEx2 = "p*((x-1)^2+p^2)*((x-zeta(3))^2+p^2)*((x-zeta(3)^2)^2+p^2)";
const char* kEx3 = "p*(x^3-p^2)*((x-1)^3-p^2)";

Analysis decide(const char* s, long p, DecisionOptions opt = {}) {
  return solubility_decide(parse_expr(s), p, std::nullopt, opt);
}

const ConditionReport& cond(const SolubilityVerdict& v, const std::string& id) {
  for (const auto& r : v.theorem.conditions)
    if (r.id == id) return r;
  throw std::runtime_error("no condition " + id);
}

}  // namespace

TEST(Gate, HasseWeilBound) {
  EXPECT_TRUE(corollary_gate(17, 17, 3, true).applicable());
  EXPECT_TRUE(corollary_gate(7, 7, 2, true).applicable());
  EXPECT_FALSE(corollary_gate(5, 5, 2, true).applicable());
  EXPECT_FALSE(corollary_gate(5, 5, 2, true).hasse_weil);
  EXPECT_FALSE(corollary_gate(13, 13, 3, true).applicable());  // 2(9-1) = 16
  EXPECT_FALSE(corollary_gate(17, 17, 2, false).applicable());
  EXPECT_FALSE(corollary_gate(2, 2, 2, true).p_odd);
}

TEST(Theorem, OddPrincipalTopWithRamification) {
  auto a = decide(kEx1, 17);
  const auto& v = a.verdict;
  EXPECT_EQ(v.status, Status::Soluble);
  EXPECT_EQ(v.component, ComponentVerdict::Yes);
  EXPECT_TRUE(cond(v, "ii.a").satisfied);
  EXPECT_FALSE(cond(v, "i").satisfied);
  ASSERT_TRUE(v.theorem.fired);
  EXPECT_EQ(*v.theorem.fired, "ii.a");
  EXPECT_TRUE(v.odd_degree);
  EXPECT_TRUE(v.odd_degree_consistent);
  EXPECT_TRUE(v.rechecked);
}

TEST(Theorem, ThreeTwinsPermutedByFrobenius) {
  for (long p : {11L, 23L}) {
    auto a = decide(kEx2, p);
    const auto& v = a.verdict;
    EXPECT_EQ(v.status, Status::Insoluble) << p;
    EXPECT_EQ(v.theorem.conditions.size(), condition_ids().size());
    for (const auto& r : v.theorem.conditions) EXPECT_FALSE(r.satisfied) << p << " " << r.id;
    // the top is principal, so (v) and (vi) are not evaluated
    EXPECT_FALSE(cond(v, "v.a").evaluated);
    EXPECT_FALSE(cond(v, "vi.f").evaluated);
    EXPECT_FALSE(a.clusters.eps[0].trivial);
    EXPECT_FALSE(a.verdict.odd_degree);
  }
}

TEST(Theorem, TwoOddChildrenOfNonPrincipalTop) {
  auto a = decide(kEx3, 7);
  const auto& v = a.verdict;
  EXPECT_EQ(v.status, Status::Insoluble);
  const auto& r = cond(v, "vi.a");
  EXPECT_TRUE(r.evaluated);
  EXPECT_FALSE(r.satisfied);
  ASSERT_FALSE(r.quantities.empty());
  EXPECT_NE(r.quantities[0].find("[-5/6, -1/2]"), std::string::npos) << r.quantities[0];
  EXPECT_TRUE(v.gate.applicable());
}

TEST(Theorem, RecheckAtDoublePrecisionAgrees) {
  auto a = decide(kEx3, 7);
  auto b = analyse_at(parse_expr(kEx3), 7, 2 * a.verdict.prec, {});
  EXPECT_TRUE(same_decision(a.verdict, b.verdict));
}

TEST(Theorem, ConditionIdsInStatementOrder) {
  auto a = decide(kEx1, 17);
  std::vector<std::string> ids;
  for (const auto& r : a.verdict.theorem.conditions) ids.push_back(r.id);
  EXPECT_EQ(ids, condition_ids());
}

TEST(Theorem, GaloisTrivialPictureFiresI) {
  auto a = decide("(x)*(x-1)*(x-2)*(x+1)*(x-3)", 7);
  const auto& v = a.verdict;
  EXPECT_TRUE(cond(v, "i").satisfied);
  EXPECT_EQ(*v.theorem.fired, "i");
  EXPECT_TRUE(v.theorem.convention_markers.empty());
  EXPECT_EQ(v.status, Status::Soluble);
}

TEST(Theorem, ReportsArePure) {
  auto a = decide(kEx2, 11);
  auto b = theorem_decide(a.clusters);
  ASSERT_EQ(a.verdict.theorem.conditions.size(), b.conditions.size());
  for (std::size_t i = 0; i < b.conditions.size(); ++i) {
    EXPECT_EQ(a.verdict.theorem.conditions[i].satisfied, b.conditions[i].satisfied);
    EXPECT_EQ(a.verdict.theorem.conditions[i].quantities, b.conditions[i].quantities);
  }
}

TEST(Conventions, InsolubleVerdictCarriesConsumedValues) {
  // the crossed-tail test of (iv)(c) reads v_K(c_t)
  auto a = decide("p*((x-2)^2-2*p^4)*((x-1)^4+p^8)", 7);
  EXPECT_EQ(a.verdict.status, Status::Insoluble);
  EXPECT_TRUE(cond(a.verdict, "iv.c").convention);
  ASSERT_FALSE(a.verdict.theorem.convention_markers.empty());
  // the three-twin curve rests on (iv)(c) for the twin fixed by G_K
  auto m = decide(kEx2, 11).verdict.theorem.convention_markers;
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].rfind("iv.c:", 0), 0u) << m[0];
}

TEST(Conventions, FiredConditionMarksOnlyItsOwnValues) {
  auto v = decide(kEx1, 17).verdict;
  EXPECT_TRUE(v.theorem.convention_markers.empty());
  auto w = decide("3*((x-1)^4-6*p^6)*(x^2-2*p^7)", 7).verdict;
  ASSERT_TRUE(w.theorem.fired);
  EXPECT_EQ(*w.theorem.fired, "ii.c");
  ASSERT_EQ(w.theorem.convention_markers.size(), 1u);
  EXPECT_NE(w.theorem.convention_markers[0].find("v_K(c_s)"), std::string::npos);
}

// Odd degree: literal conditions leave crossed tails of cotwins and twins undecided.
TEST(OddDegree, LiteralReadingMissesCrossedCotwinTail) {
  const char* s = "2*p*(x-1)*((x-2)^4-p^2)";
  auto v = decide(s, 11).verdict;
  EXPECT_EQ(v.status, Status::Soluble);
  EXPECT_EQ(v.component, ComponentVerdict::No);
  EXPECT_FALSE(v.odd_degree_consistent);
  EXPECT_TRUE(cond(v, "v.c").evaluated);
  EXPECT_TRUE(cond(v, "v.c").convention);
  // at p = 7 the fixed lift gives epsilon_t(Frob) = +1
  EXPECT_TRUE(cond(decide(s, 7).verdict, "v.c").satisfied);
  DecisionOptions amended;
  amended.amended = true;
  EXPECT_TRUE(cond(decide(s, 11, amended).verdict, "v.c").satisfied);
}

TEST(OddDegree, AmendedReadingAlwaysHasComponent) {
  DecisionOptions amended;
  amended.amended = true;
  std::mt19937_64 rng(7);
  int odd = 0;
  for (long p : {7L, 11L, 13L}) {
    for (int i = 0; i < 25; ++i) {
      CurveExpr c = random_curve(rng, p);
      if (c.degree() % 2 == 0) continue;
      ++odd;
      auto a = solubility_decide(c, p, std::nullopt, amended);
      EXPECT_EQ(a.verdict.status == Status::Inapplicable, !a.verdict.gate.applicable());
      if (a.verdict.gate.applicable()) {
        EXPECT_EQ(a.verdict.status, Status::Soluble) << c.to_string();
        EXPECT_TRUE(a.verdict.odd_degree_consistent) << c.to_string();
      }
    }
  }
  EXPECT_GT(odd, 5);
}

TEST(Amended, ParityInVIb) {
  const char* s = "p*((x-zeta(3))^2+p^2)*((x-zeta(3)^2)^2+p^2)*(x-zeta(3))*(x-zeta(3)^2)";
  auto literal = decide(s, 11).verdict;
  EXPECT_TRUE(cond(literal, "vi.b").satisfied);
  EXPECT_EQ(literal.status, Status::Soluble);
  DecisionOptions amended;
  amended.amended = true;
  auto fixed = decide(s, 11, amended).verdict;
  EXPECT_FALSE(cond(fixed, "vi.b").satisfied);
  EXPECT_EQ(fixed.status, Status::Insoluble);
}

TEST(Amended, ResidueInIIc) {
  DecisionOptions amended;
  amended.amended = true;
  auto v = decide("3*((x-1)^4-6*p^6)*(x^2-2*p^7)", 7, amended).verdict;
  EXPECT_FALSE(cond(v, "ii.c").satisfied);
  EXPECT_EQ(v.status, Status::Insoluble);
}

#pragma once

// Seeded random curves from the binomial-product family.

#include <random>
#include <vector>

#include "hypsol/curve.hpp"

namespace hypsol {

struct CorpusShape {
  int genus_min = 2;
  int genus_max = 4;
  int max_factors = 4;
  int max_exponent = 4;
  int max_valuation = 8;
  long max_residue_field = 1L << 14;
};

namespace detail {

inline Factor random_factor(std::mt19937_64& rng, long p, const CorpusShape& sh, const CycloExpr& centre) {
  std::uniform_int_distribution<int> coin(0, 3);
  Factor f;
  f.center = centre;
  if (coin(rng) == 0) return f;  // linear
  f.linear = false;
  std::uniform_int_distribution<int> nd(1, sh.max_exponent), md(1, sh.max_valuation);
  do f.n = nd(rng);
  while (f.n % p == 0);
  f.m = md(rng);
  static const long units[] = {1, -1, 2, -2, 3, -3, 5, 6};
  std::uniform_int_distribution<int> ud(0, 7);
  long u;
  do u = units[ud(rng)];
  while (u % p == 0);
  f.rhs_unit = u;
  return f;
}

}  // namespace detail

/// A random curve over Q_p of genus in range, with factors closed under Frobenius.
/// Rejects inputs whose splitting field is too large or whose roots collide.
inline CurveExpr random_curve(std::mt19937_64& rng, long p, const CorpusShape& sh = {}) {
  std::uniform_int_distribution<int> kd(2, sh.max_factors), cd(0, 5), lead(0, 3);
  long nonres = 2;
  while (true) {
    bool ok = true;
    for (long x = 1; x < p; ++x) ok = ok && (x * x) % p != nonres;
    if (ok) break;
    ++nonres;
  }
  for (int attempt = 0; attempt < 100000; ++attempt) {
    CurveExpr c;
    c.p = p;
    int k = kd(rng);
    for (int i = 0; i < k; ++i) {
      int which = cd(rng);
      if (which < 4) {
        static const long centres[] = {0, 1, 2, -1};
        c.factors.push_back(detail::random_factor(rng, p, sh, CycloExpr::integer(centres[which])));
      } else {
        // zeta_3-conjugate pair with the same shape
        Factor f = detail::random_factor(rng, p, sh, CycloExpr::zeta(3, 1));
        Factor g = f;
        g.center = CycloExpr::zeta(3, 2);
        c.factors.push_back(f);
        c.factors.push_back(g);
      }
    }
    switch (lead(rng)) {
      case 0: break;
      case 1: c.cf_pow = 1; break;
      case 2: c.cf_unit = nonres; break;
      default: c.cf_unit = nonres; c.cf_pow = 1; break;
    }
    int deg = c.degree();
    int g = curve_genus_of_degree(deg);
    if (deg < 5 || g < sh.genus_min || g > sh.genus_max) continue;
    try {
      CurveExpr n = normalize(c, p);
      galois_closure_check(n);
      TowerShape ts = required_tower(n);
      long q = 1;
      for (int i = 0; i < ts.d; ++i) q *= p;
      if (q > sh.max_residue_field) continue;
      if (!is_squarefree(expand_to_integer_poly(n))) continue;
      return n;
    } catch (const Error&) {
      continue;
    }
  }
  throw Error(ErrorKind::InternalError, "corpus", "could not generate a curve with the requested shape");
}

}  // namespace hypsol

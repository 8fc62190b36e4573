#pragma once

// Integer polynomials for the point-search oracle: evaluation, derivatives,
// squarefreeness and discriminant valuations. Exact, GMP-backed.

#include <gmpxx.h>

#include <string>
#include <vector>

#include "hypsol/cyclotomic.hpp"

namespace hypsol {

using QPoly = std::vector<mpq_class>;

inline int degree(const ZPoly& f) { return static_cast<int>(f.size()) - 1; }

inline ZPoly derivative(const ZPoly& f) {
  if (f.size() <= 1) return {};
  ZPoly r(f.size() - 1);
  for (std::size_t i = 1; i < f.size(); ++i) r[i - 1] = f[i] * static_cast<unsigned long>(i);
  trim(r);
  return r;
}

inline mpz_class evaluate(const ZPoly& f, const mpz_class& x) {
  mpz_class acc = 0;
  for (std::size_t i = f.size(); i-- > 0;) acc = acc * x + f[i];
  return acc;
}

/// p-adic valuation; `cap` for zero.
inline long valuation_p(const mpz_class& n, long p, long cap = 1L << 30) {
  if (n == 0) return cap;
  mpz_class t;
  mpz_class pz(p);
  return static_cast<long>(mpz_remove(t.get_mpz_t(), n.get_mpz_t(), pz.get_mpz_t()));
}

namespace detail {

inline void qtrim(QPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline QPoly to_q(const ZPoly& f) {
  QPoly r(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) r[i] = f[i];
  qtrim(r);
  return r;
}

inline QPoly qrem(QPoly a, const QPoly& b) {
  qtrim(a);
  while (a.size() >= b.size() && !a.empty()) {
    mpq_class c = a.back() / b.back();
    std::size_t shift = a.size() - b.size();
    for (std::size_t j = 0; j < b.size(); ++j) a[shift + j] -= c * b[j];
    a.pop_back();
    qtrim(a);
  }
  return a;
}

}  // namespace detail

/// deg gcd(f, g) over Q.
inline int gcd_degree(const ZPoly& f, const ZPoly& g) {
  QPoly a = detail::to_q(f), b = detail::to_q(g);
  while (!b.empty()) {
    QPoly r = detail::qrem(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return static_cast<int>(a.size()) - 1;
}

inline bool is_squarefree(const ZPoly& f) { return gcd_degree(f, derivative(f)) == 0; }

/// Resultant over Q by the Euclidean recursion.
inline mpq_class resultant(const ZPoly& f, const ZPoly& g) {
  QPoly a = detail::to_q(f), b = detail::to_q(g);
  mpq_class acc = 1;
  while (true) {
    if (a.empty() || b.empty()) return 0;
    long da = static_cast<long>(a.size()) - 1, db = static_cast<long>(b.size()) - 1;
    if (db == 0) {
      mpq_class r = 1;
      for (long i = 0; i < da; ++i) r *= b[0];
      return acc * r;
    }
    QPoly r = detail::qrem(a, b);
    if (r.empty()) return 0;
    long dr = static_cast<long>(r.size()) - 1;
    if ((da * db) % 2 == 1) acc = -acc;
    for (long i = 0; i < da - dr; ++i) acc *= b.back();
    a = std::move(b);
    b = std::move(r);
  }
}

inline mpq_class discriminant(const ZPoly& f) {
  long n = degree(f);
  mpq_class r = resultant(f, derivative(f)) / mpq_class(f.back());
  if ((n * (n - 1) / 2) % 2 == 1) r = -r;
  return r;
}

inline long discriminant_valuation(const ZPoly& f, long p) {
  mpq_class d = discriminant(f);
  if (d == 0) return -1;
  return valuation_p(d.get_num(), p) - valuation_p(d.get_den(), p);
}

inline std::string zpoly_to_string(const ZPoly& f) {
  std::string s;
  for (std::size_t i = f.size(); i-- > 0;) {
    if (f[i] == 0) continue;
    mpz_class c = f[i];
    bool neg = c < 0;
    if (neg) c = -c;
    std::string mono = i == 0 ? "" : (i == 1 ? "x" : "x^" + std::to_string(i));
    std::string coef = (c == 1 && i != 0) ? "" : c.get_str() + (i ? "*" : "");
    if (s.empty())
      s = (neg ? "-" : "") + coef + mono;
    else
      s += (neg ? " - " : " + ") + coef + mono;
  }
  return s.empty() ? "0" : s;
}

}  // namespace hypsol

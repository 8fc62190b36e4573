#pragma once

// Brute-force Q_p-solubility of y^2 = f(x) for integer f: residue-class search
// on the affine chart and at infinity, with Hensel acceptance.

#include <gmpxx.h>

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hypsol/error.hpp"
#include "hypsol/intpoly.hpp"

namespace hypsol {

enum class Chart { Affine, Infinity };

inline const char* to_string(Chart c) { return c == Chart::Affine ? "x" : "u=1/x"; }

struct SearchNode {
  Chart chart = Chart::Affine;
  mpz_class a;  // class centre mod p^level
  long level = 1;
};

/// A point (x, y) on the given chart, or the point at infinity of an odd model.
struct Witness {
  bool at_infinity = false;
  Chart chart = Chart::Affine;
  mpz_class x, y;  // known modulo p^digits beyond what is needed
  bool hensel_root = false;  // y = 0 at a Hensel-liftable root of the chart polynomial
  long digits = 0;
  std::string to_string() const;
};

enum class OracleStatus { Soluble, Insoluble, MaxLevelExceeded };

inline const char* to_string(OracleStatus s) {
  switch (s) {
    case OracleStatus::Soluble: return "soluble";
    case OracleStatus::Insoluble: return "insoluble";
    case OracleStatus::MaxLevelExceeded: return "inconclusive (max level exceeded)";
  }
  return "?";
}

struct OracleResult {
  OracleStatus status = OracleStatus::Insoluble;
  std::optional<Witness> witness;
  long nodes_explored = 0;
  long max_level_reached = 0;
  long max_level = 0;
  bool soluble() const { return status == OracleStatus::Soluble; }
};

struct OracleOptions {
  std::optional<long> max_level;  // default 2 v_p(disc f) + 4
  long witness_digits = 6;
};

inline std::string Witness::to_string() const {
  if (at_infinity) return "point at infinity";
  std::string s = std::string("(") + hypsol::to_string(chart) + " = " + x.get_str() + ", y = " + y.get_str() + ")";
  if (hensel_root) s += " root of f";
  return s;
}

enum class ClassOutcome { Accept, Reject, Split };

struct ClassResult {
  ClassOutcome outcome = ClassOutcome::Reject;
  std::optional<Witness> witness;
};

namespace detail {

inline mpz_class mpz_pow(long p, long k) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(k));
  return r;
}

inline mpz_class mod_floor(const mpz_class& a, const mpz_class& m) {
  mpz_class r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

inline bool is_qr_mod_p(const mpz_class& unit, long p) {
  mpz_class pz(p);
  return mpz_legendre(unit.get_mpz_t(), pz.get_mpz_t()) == 1;
}

/// Square root of a unit quadratic residue c modulo p^digits.
inline mpz_class sqrt_mod_prime_power(const mpz_class& c, long p, long digits) {
  mpz_class pz(p), r0 = -1;
  mpz_class cm = mod_floor(c, pz);
  for (long y = 1; y < p; ++y)
    if ((y * y) % p == cm) {
      r0 = y;
      break;
    }
  if (r0 < 0) throw Error(ErrorKind::InternalError, "oracle", "square root requested for a non-residue");
  mpz_class y = r0, mod = pz;
  for (long k = 1; k < digits; k *= 2) {
    mod = mod * mod;
    mpz_class inv, two_y = 2 * y;
    mpz_invert(inv.get_mpz_t(), two_y.get_mpz_t(), mod.get_mpz_t());
    y = mod_floor(y - (y * y - c) * inv, mod);
  }
  return mod_floor(y, mpz_pow(p, digits));
}

}  // namespace detail

/// u^{2g+2} f(1/u) for even degree 2g+2 (reversed coefficients).
inline ZPoly infinity_chart(const ZPoly& f) {
  int deg = degree(f);
  int n = deg % 2 == 0 ? deg : deg + 1;
  ZPoly g(n + 1, 0);
  for (int i = 0; i <= deg; ++i) g[n - i] = f[i];
  trim(g);
  return g;
}

/// Coefficients of g(a + t).
inline ZPoly taylor_shift(const ZPoly& g, const mpz_class& a) {
  ZPoly c = g;
  const std::size_t n = c.size();
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = n - 1; j > i; --j) c[j - 1] += a * c[j];
  return c;
}

/// Accept / Reject / Split for the class {x = a mod p^k} of the chart polynomial g.
/// v(g) is constant on the class when v(g(a)) < min_i v(c_i) + i k, where c_i are the
/// Taylor coefficients at a; this bound is never below k.
inline ClassResult class_test(const SearchNode& node, const ZPoly& g, long p, long witness_digits = 6) {
  ClassResult res;
  ZPoly c = taylor_shift(g, node.a);
  if (c[0] == 0) {
    res.outcome = ClassOutcome::Accept;
    res.witness = Witness{false, node.chart, node.a, 0, true, 0};
    return res;
  }
  long v = valuation_p(c[0], p);
  long bound = std::numeric_limits<long>::max();
  for (std::size_t i = 1; i < c.size(); ++i)
    if (c[i] != 0) bound = std::min(bound, valuation_p(c[i], p) + static_cast<long>(i) * node.level);
  if (v < bound) {
    mpz_class unit = c[0] / detail::mpz_pow(p, v);
    if (v % 2 == 0 && detail::is_qr_mod_p(unit, p)) {
      res.outcome = ClassOutcome::Accept;
      mpz_class y = detail::sqrt_mod_prime_power(unit, p, witness_digits) * detail::mpz_pow(p, v / 2);
      res.witness = Witness{false, node.chart, node.a, y, false, witness_digits};
    } else {
      res.outcome = ClassOutcome::Reject;
    }
    return res;
  }
  if (c.size() > 1 && c[1] != 0 && v > 2 * valuation_p(c[1], p)) {
    res.outcome = ClassOutcome::Accept;
    res.witness = Witness{false, node.chart, node.a, 0, true, 0};
    return res;
  }
  res.outcome = ClassOutcome::Split;
  return res;
}

/// Explicit check of the Hensel certificate for a witness on f.
inline bool certify_witness(const ZPoly& f, long p, const Witness& w) {
  if (w.at_infinity) return degree(f) % 2 == 1;
  const ZPoly g = w.chart == Chart::Affine ? f : infinity_chart(f);
  if (w.chart == Chart::Infinity && valuation_p(w.x, p) < 1) return false;
  mpz_class gx = evaluate(g, w.x);
  if (w.hensel_root) {
    if (gx == 0) return true;
    return valuation_p(gx, p) > 2 * valuation_p(evaluate(derivative(g), w.x), p);
  }
  if (w.y == 0) return false;
  return valuation_p(w.y * w.y - gx, p) > 2 * valuation_p(w.y, p) + 1;
}

inline long default_max_level(const ZPoly& f, long p) {
  long dv = discriminant_valuation(f, p);
  if (dv < 0) throw Error(ErrorKind::NotSquarefree, "oracle", "f is not squarefree");
  long dvi = discriminant_valuation(infinity_chart(f), p);
  return 2 * std::max(dv, std::max(dvi, 0L)) + 4;
}

namespace detail {

inline OracleResult search(const ZPoly& f, long p, long max_level, long witness_digits) {
  OracleResult res;
  res.max_level = max_level;
  bool exceeded = false;
  const ZPoly charts[2] = {f, infinity_chart(f)};
  std::vector<SearchNode> stack;
  for (long a = p - 1; a >= 0; --a) stack.push_back({Chart::Affine, a, 1});
  stack.push_back({Chart::Infinity, 0, 1});
  while (!stack.empty()) {
    SearchNode n = stack.back();
    stack.pop_back();
    ++res.nodes_explored;
    res.max_level_reached = std::max(res.max_level_reached, n.level);
    const ZPoly& g = charts[n.chart == Chart::Affine ? 0 : 1];
    ClassResult cr = class_test(n, g, p, witness_digits);
    if (cr.outcome == ClassOutcome::Accept) {
      res.status = OracleStatus::Soluble;
      res.witness = cr.witness;
      return res;
    }
    if (cr.outcome == ClassOutcome::Reject) continue;
    if (n.level >= max_level) {
      exceeded = true;
      continue;
    }
    mpz_class step = mpz_pow(p, n.level);
    for (long j = p - 1; j >= 0; --j) stack.push_back({n.chart, n.a + step * j, n.level + 1});
  }
  res.status = exceeded ? OracleStatus::MaxLevelExceeded : OracleStatus::Insoluble;
  return res;
}

}  // namespace detail

/// Decide whether y^2 = f(x) has a Q_p-point. f must be squarefree, p odd.
inline OracleResult is_locally_soluble(const ZPoly& f_in, long p, const OracleOptions& opt = {}) {
  ZPoly f = f_in;
  trim(f);
  if (p < 3 || !is_prime(p)) throw Error(ErrorKind::NonOddPrime, "oracle", std::to_string(p) + " is not an odd prime");
  if (f.empty() || degree(f) < 1 || !is_squarefree(f))
    throw Error(ErrorKind::NotSquarefree, "oracle", "f is not squarefree");
  if (degree(f) % 2 == 1) {
    OracleResult r;
    r.status = OracleStatus::Soluble;
    r.witness = Witness{true, Chart::Infinity, 0, 0, false, 0};
    return r;
  }
  long level = opt.max_level ? *opt.max_level : default_max_level(f, p);
  OracleResult r = detail::search(f, p, level, opt.witness_digits);
  if (r.status == OracleStatus::MaxLevelExceeded && !opt.max_level) {
    r = detail::search(f, p, 2 * level, opt.witness_digits);
  }
  if (r.witness && !certify_witness(f, p, *r.witness))
    throw Error(ErrorKind::InternalError, "oracle", "witness failed its certificate: " + r.witness->to_string());
  return r;
}

/// Enumerates every x mod p^k on both charts (u = 1/x with p | u), deciding each
/// class by valuation parity or Hensel's lemma, deepening undecided classes up
/// to `max_k`. Independent of the search order above; for tiny p only.
inline std::optional<bool> exhaustive_soluble(const ZPoly& f, long p, long k = 6, long max_k = 12) {
  if (degree(f) % 2 == 1) return true;
  const ZPoly charts[2] = {f, infinity_chart(f)};
  bool undecided_any = false;
  for (int c = 0; c < 2; ++c) {
    const ZPoly& g = charts[c];
    const ZPoly dg = derivative(g);
    std::vector<mpz_class> pending;
    mpz_class mod = detail::mpz_pow(p, k);
    mpz_class stride = c == 0 ? mpz_class(1) : mpz_class(p);
    for (mpz_class x = 0; x < mod; x += stride) pending.push_back(x);
    for (long level = k; !pending.empty(); level += 2) {
      std::vector<mpz_class> next;
      for (const auto& x : pending) {
        mpz_class gx = evaluate(g, x);
        if (gx == 0) return true;
        long v = valuation_p(gx, p);
        if (v < level) {
          if (v % 2 == 0 && detail::is_qr_mod_p(gx / detail::mpz_pow(p, v), p)) return true;
          continue;
        }
        if (v > 2 * valuation_p(evaluate(dg, x), p)) return true;
        if (level + 2 > max_k) {
          undecided_any = true;
          continue;
        }
        mpz_class m = detail::mpz_pow(p, level);
        for (long j = 0; j < p * p; ++j) next.push_back(x + m * j);
      }
      pending = std::move(next);
    }
  }
  if (undecided_any) return std::nullopt;
  return false;
}

}  // namespace hypsol

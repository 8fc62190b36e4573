#pragma once

// Exact arithmetic in Z[zeta_N] = Z[x]/(Phi_N(x)), power basis 1, zeta, ..., zeta^{phi(N)-1}.

#include <gmpxx.h>

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "hypsol/error.hpp"
#include "hypsol/residue_field.hpp"
#include "hypsol/tame_field.hpp"

namespace hypsol {

using ZPoly = std::vector<mpz_class>;  // ascending coefficients

inline void trim(ZPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline ZPoly zpoly_mul(const ZPoly& a, const ZPoly& b) {
  if (a.empty() || b.empty()) return {};
  ZPoly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != 0)
      for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  trim(r);
  return r;
}

/// Remainder of a modulo a monic polynomial m.
inline ZPoly zpoly_rem_monic(ZPoly a, const ZPoly& m) {
  const std::size_t dm = m.size() - 1;
  for (std::size_t k = a.size(); k-- > dm;) {
    if (a[k] == 0) continue;
    mpz_class c = a[k];
    for (std::size_t j = 0; j <= dm; ++j) a[k - dm + j] -= c * m[j];
  }
  a.resize(std::min(a.size(), dm));
  return a;
}

/// Quotient of a by a monic divisor m (exact division assumed).
inline ZPoly zpoly_div_monic(ZPoly a, const ZPoly& m) {
  const std::size_t dm = m.size() - 1;
  if (a.size() <= dm) return {};
  ZPoly q(a.size() - dm, 0);
  for (std::size_t k = a.size(); k-- > dm;) {
    mpz_class c = a[k];
    q[k - dm] = c;
    for (std::size_t j = 0; j <= dm; ++j) a[k - dm + j] -= c * m[j];
  }
  return q;
}

inline const ZPoly& cyclotomic_polynomial(long n) {
  static std::mutex mu;
  static std::map<long, ZPoly> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  ZPoly num(static_cast<std::size_t>(n) + 1, 0);
  num[0] = -1;
  num[n] = 1;
  for (long d = 1; d < n; ++d) {
    if (n % d != 0) continue;
    // recursion through the cache without re-locking
    ZPoly phid;
    auto jt = cache.find(d);
    if (jt != cache.end()) {
      phid = jt->second;
    } else {
      // compute small divisors bottom-up
      ZPoly numd(static_cast<std::size_t>(d) + 1, 0);
      numd[0] = -1;
      numd[d] = 1;
      for (long dd = 1; dd < d; ++dd)
        if (d % dd == 0) numd = zpoly_div_monic(numd, cache.at(dd));
      cache[d] = numd;
      phid = numd;
    }
    num = zpoly_div_monic(num, phid);
  }
  return cache[n] = num;
}

inline long euler_phi(long n) { return static_cast<long>(cyclotomic_polynomial(n).size()) - 1; }

/// An element of Z[zeta_N] reduced modulo Phi_N.
class CycloExpr {
 public:
  CycloExpr() : n_(1), c_(1, 0) {}

  static CycloExpr integer(const mpz_class& v, long n = 1) {
    CycloExpr r;
    r.n_ = n;
    r.c_.assign(static_cast<std::size_t>(euler_phi(n)), 0);
    r.c_[0] = v;
    return r;
  }

  /// zeta_n^k.
  static CycloExpr zeta(long n, long k = 1) {
    ZPoly x(static_cast<std::size_t>(mod_floor(k, n)) + 1, 0);
    x.back() = 1;
    return from_poly(n, x);
  }

  static CycloExpr from_poly(long n, const ZPoly& a) {
    CycloExpr r;
    r.n_ = n;
    r.c_ = zpoly_rem_monic(a, cyclotomic_polynomial(n));
    r.c_.resize(static_cast<std::size_t>(euler_phi(n)), 0);
    return r;
  }

  long conductor() const { return n_; }
  const std::vector<mpz_class>& coeffs() const { return c_; }

  /// Same element written over Z[zeta_m], n | m.
  CycloExpr lift(long m) const {
    if (m == n_) return *this;
    if (m % n_ != 0) throw Error(ErrorKind::InternalError, "curve_input", "bad conductor lift");
    long s = m / n_;
    ZPoly a(c_.size() * static_cast<std::size_t>(s) + 1, 0);
    for (std::size_t i = 0; i < c_.size(); ++i) a[i * s] = c_[i];
    return from_poly(m, a);
  }

  /// Galois automorphism zeta -> zeta^a, gcd(a, N) = 1.
  CycloExpr galois(long a) const {
    long k = mod_floor(a, n_);
    ZPoly x;
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (c_[i] == 0) continue;
      std::size_t pos = static_cast<std::size_t>((static_cast<long>(i) * k) % n_);
      if (x.size() <= pos) x.resize(pos + 1, 0);
      x[pos] += c_[i];
    }
    return from_poly(n_, x);
  }

  bool is_rational() const {
    for (std::size_t i = 1; i < c_.size(); ++i)
      if (c_[i] != 0) return false;
    return true;
  }

  bool is_zero() const {
    for (const auto& c : c_)
      if (c != 0) return false;
    return true;
  }

  friend CycloExpr operator+(const CycloExpr& a, const CycloExpr& b) {
    long n = lcm_long(a.n_, b.n_);
    CycloExpr x = a.lift(n), y = b.lift(n);
    for (std::size_t i = 0; i < x.c_.size(); ++i) x.c_[i] += y.c_[i];
    return x;
  }

  friend CycloExpr operator-(const CycloExpr& a) {
    CycloExpr r = a;
    for (auto& c : r.c_) c = -c;
    return r;
  }

  friend CycloExpr operator-(const CycloExpr& a, const CycloExpr& b) { return a + (-b); }

  friend CycloExpr operator*(const CycloExpr& a, const CycloExpr& b) {
    long n = lcm_long(a.n_, b.n_);
    CycloExpr x = a.lift(n), y = b.lift(n);
    return from_poly(n, zpoly_mul(x.c_, y.c_));
  }

  friend bool operator==(const CycloExpr& a, const CycloExpr& b) {
    long n = lcm_long(a.n_, b.n_);
    return a.lift(n).c_ == b.lift(n).c_;
  }

  /// Image in the unramified ring of the tower, zeta_N -> Teichmueller root of unity.
  Unram embed(const Tower& t) const {
    Unram z = n_ > 2 ? t.root_of_unity(n_) : t.w_int(n_ == 2 ? -1 : 1);
    Unram acc = t.w_zero(), pw = t.w_one();
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (c_[i] != 0) acc = t.w_add(acc, t.w_scale(pw, c_[i]));
      pw = t.w_mul(pw, z);
    }
    return acc;
  }

  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (c_[i] == 0) continue;
      mpz_class c = c_[i];
      bool neg = c < 0;
      if (neg) c = -c;
      std::string term;
      if (i == 0)
        term = c.get_str();
      else {
        term = (c == 1 ? "" : c.get_str() + "*") + "zeta(" + std::to_string(n_) + ")";
        if (i > 1) term += "^" + std::to_string(i);
      }
      if (s.empty())
        s = (neg ? "-" : "") + term;
      else
        s += (neg ? "-" : "+") + term;
    }
    return s.empty() ? "0" : s;
  }

 private:
  long n_;
  std::vector<mpz_class> c_;
};

}  // namespace hypsol

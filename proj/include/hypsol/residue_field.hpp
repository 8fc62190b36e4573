#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hypsol/error.hpp"

namespace hypsol {

inline bool is_prime(long n) {
  if (n < 2) return false;
  for (long k = 2; k * k <= n; ++k)
    if (n % k == 0) return false;
  return true;
}

inline long mod_floor(long a, long m) {
  long r = a % m;
  return r < 0 ? r + m : r;
}

inline long gcd_long(long a, long b) {
  a = a < 0 ? -a : a;
  b = b < 0 ? -b : b;
  while (b) {
    long t = a % b;
    a = b;
    b = t;
  }
  return a;
}

inline long lcm_long(long a, long b) { return a / gcd_long(a, b) * b; }

/// Multiplicative order of a modulo m (gcd(a, m) = 1).
inline long multiplicative_order(long a, long m) {
  if (m == 1) return 1;
  long x = mod_floor(a, m), k = 1;
  while (x != 1) {
    x = x * mod_floor(a, m) % m;
    ++k;
  }
  return k;
}

/// The finite field F_q, q = p^d, built as F_p[t]/(P) with P the least
/// primitive monic polynomial of degree d, where polynomials are ordered
/// lexicographically from the x^{d-1} coefficient down to the constant term.
/// Elements are encoded as integers sum c_i p^i in [0, q); the integer order
/// is the canonical total order used wherever a root must be chosen.
class ResidueField {
 public:
  using Elt = std::uint32_t;

  static constexpr long kMaxSize = 1L << 22;

  ResidueField(long p, int d) : p_(p), d_(d) {
    q_ = 1;
    for (int i = 0; i < d; ++i) {
      q_ *= p;
      if (q_ > kMaxSize)
        throw Error(ErrorKind::InvalidTower, "tame_field",
                    "residue field too large: " + std::to_string(p) + "^" + std::to_string(d));
    }
    find_primitive_polynomial();
  }

  long characteristic() const { return p_; }
  int degree() const { return d_; }
  long size() const { return q_; }

  /// Coefficients c_0..c_{d-1} of the monic modulus polynomial.
  const std::vector<long>& modulus() const { return modulus_; }

  Elt zero() const { return 0; }
  Elt one() const { return 1; }
  Elt generator() const { return exp_[1]; }

  std::vector<long> coeffs(Elt a) const {
    std::vector<long> c(d_);
    for (int i = 0; i < d_; ++i) {
      c[i] = a % p_;
      a /= p_;
    }
    return c;
  }

  Elt from_coeffs(const std::vector<long>& c) const {
    long v = 0;
    for (int i = d_ - 1; i >= 0; --i) v = v * p_ + mod_floor(i < static_cast<int>(c.size()) ? c[i] : 0, p_);
    return static_cast<Elt>(v);
  }

  Elt from_int(long n) const { return static_cast<Elt>(mod_floor(n, p_)); }

  Elt add(Elt a, Elt b) const {
    long r = 0, mul = 1;
    for (int i = 0; i < d_; ++i) {
      r += ((a % p_ + b % p_) % p_) * mul;
      a /= p_;
      b /= p_;
      mul *= p_;
    }
    return static_cast<Elt>(r);
  }

  Elt neg(Elt a) const {
    long r = 0, mul = 1;
    for (int i = 0; i < d_; ++i) {
      r += ((p_ - a % p_) % p_) * mul;
      a /= p_;
      mul *= p_;
    }
    return static_cast<Elt>(r);
  }

  Elt sub(Elt a, Elt b) const { return add(a, neg(b)); }

  Elt mul(Elt a, Elt b) const {
    if (a == 0 || b == 0) return 0;
    return exp_[(log_[a] + log_[b]) % (q_ - 1)];
  }

  Elt inv(Elt a) const {
    if (a == 0) throw Error(ErrorKind::DivisionByZero, "tame_field", "inverse of 0 in residue field");
    return exp_[mod_floor(-log_[a], q_ - 1)];
  }

  /// a^k for any integer k (negative allowed for a != 0).
  Elt pow(Elt a, long long k) const {
    if (a == 0) {
      if (k == 0) return 1;
      if (k < 0) throw Error(ErrorKind::DivisionByZero, "tame_field", "0 to a negative power");
      return 0;
    }
    long long e = (static_cast<long long>(log_[a]) * mod_floor(static_cast<long>(k % (q_ - 1)), q_ - 1)) % (q_ - 1);
    return exp_[e];
  }

  /// Discrete logarithm to base the generator; a != 0.
  long log(Elt a) const {
    if (a == 0) throw Error(ErrorKind::ZeroElement, "tame_field", "log of 0");
    return log_[a];
  }

  Elt exp(long k) const { return exp_[mod_floor(k, q_ - 1)]; }

  /// x -> x^{p^times}.
  Elt frobenius(Elt a, long times = 1) const {
    if (a == 0) return 0;
    long long k = 1;
    for (long i = 0; i < mod_floor(times, d_); ++i) k = k * p_ % (q_ - 1);
    return exp_[(static_cast<long long>(log_[a]) * k) % (q_ - 1)];
  }

  bool is_square(Elt a) const { return a == 0 || log_[a] % 2 == 0; }

  /// The smaller (in the canonical order) of the two square roots.
  std::optional<Elt> sqrt(Elt a) const { return nth_root(a, 2); }

  /// Smallest n-th root in the canonical order, if any.
  std::optional<Elt> nth_root(Elt a, long n) const {
    if (a == 0) return Elt{0};
    long m = q_ - 1;
    long g = gcd_long(n, m);
    long la = log_[a];
    if (la % g != 0) return std::nullopt;
    // Solutions k of n*k = la (mod m) form a coset of (m/g)Z.
    long n1 = n / g, m1 = m / g, l1 = la / g;
    long k0 = 0;
    if (m1 > 1) {
      long inv_n1 = modular_inverse(mod_floor(n1, m1), m1);
      k0 = static_cast<long>((static_cast<long long>(l1) * inv_n1) % m1);
    }
    std::optional<Elt> best;
    for (long j = 0; j < g; ++j) {
      Elt cand = exp_[(k0 + j * m1) % m];
      if (!best || cand < *best) best = cand;
    }
    return best;
  }

  /// Primitive n-th root of unity omega^{(q-1)/n}; requires n | q-1.
  Elt root_of_unity(long n) const {
    if ((q_ - 1) % n != 0)
      throw Error(ErrorKind::InvalidTower, "tame_field",
                  "no primitive " + std::to_string(n) + "-th root of unity in F_" + std::to_string(q_));
    return exp_[((q_ - 1) / n) % (q_ - 1)];
  }

  std::string to_string(Elt a) const {
    if (d_ == 1) return std::to_string(a);
    auto c = coeffs(a);
    std::string s = "[";
    for (int i = 0; i < d_; ++i) s += (i ? "," : "") + std::to_string(c[i]);
    return s + "]";
  }

 private:
  static long modular_inverse(long a, long m) {
    long t = 0, nt = 1, r = m, nr = a;
    while (nr) {
      long qq = r / nr;
      long tmp = t - qq * nt;
      t = nt;
      nt = tmp;
      tmp = r - qq * nr;
      r = nr;
      nr = tmp;
    }
    return mod_floor(t, m);
  }

  // Multiply the coefficient vector by t modulo the candidate polynomial.
  void times_t(std::vector<long>& c, const std::vector<long>& poly) const {
    long top = c[d_ - 1];
    for (int i = d_ - 1; i > 0; --i) c[i] = c[i - 1];
    c[0] = 0;
    for (int i = 0; i < d_; ++i) c[i] = mod_floor(c[i] - top * poly[i], p_);
  }

  void find_primitive_polynomial() {
    std::vector<long> poly(d_);
    for (long idx = 0; idx < q_; ++idx) {
      // idx enumerates (c_{d-1}, ..., c_0) lexicographically.
      long v = idx;
      for (int i = 0; i < d_; ++i) {
        poly[i] = v % p_;
        v /= p_;
      }
      if (poly[0] == 0) continue;
      if (try_generator(poly)) {
        modulus_ = poly;
        return;
      }
    }
    throw Error(ErrorKind::InternalError, "tame_field", "no primitive polynomial found");
  }

  bool try_generator(const std::vector<long>& poly) {
    std::vector<Elt> ex(q_ - 1);
    std::vector<long> lg(q_, -1);
    std::vector<long> cur(d_, 0);
    cur[0] = 1;
    for (long k = 0; k < q_ - 1; ++k) {
      Elt code = from_coeffs(cur);
      if (code == 0 || lg[code] != -1) return false;
      ex[k] = code;
      lg[code] = k;
      times_t(cur, poly);
    }
    if (from_coeffs(cur) != 1) return false;
    exp_ = std::move(ex);
    log_ = std::move(lg);
    return true;
  }

  long p_;
  int d_;
  long q_;
  std::vector<long> modulus_;
  std::vector<Elt> exp_;
  std::vector<long> log_;
};

}  // namespace hypsol

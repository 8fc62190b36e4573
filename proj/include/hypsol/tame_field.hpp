#pragma once

// Arithmetic in a tamely ramified extension L = Q_q(pi) of Q_p, where Q_q is
// unramified of degree d and pi^e = p.
//
// An element of O_L is stored as sum_{i<e} a_i pi^i with a_i in the
// unramified ring W = Z_p[t]/(P~(t)) truncated modulo p^M, P~ the integral lift
// of the residue field modulus. Nonzero elements are kept as pi^v * u with u a
// unit known to a relative precision of N pi-adic digits (floating-point
// style); zeros carry the absolute precision they are known to.

#include <gmpxx.h>

#include <climits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hypsol/error.hpp"
#include "hypsol/rational.hpp"
#include "hypsol/residue_field.hpp"

namespace hypsol {

struct TowerParams {
  long p = 0;
  int d = 1;
  int e = 1;
  long prec = 0;  // relative precision in pi-adic digits
  long q = 0;
};

/// Element tau^tau_exp * phi^frob_exp of the tame Galois group (phi applied first).
///
/// tau is the inertia generator, pi -> zeta_e pi, trivial on Q_q; phi fixes pi
/// and acts as the arithmetic Frobenius on Q_q. Composition follows the
/// presentation phi tau phi^-1 = tau^p.
struct GaloisWord {
  long tau_exp = 0;
  long frob_exp = 0;

  static GaloisWord identity() { return {0, 0}; }
  static GaloisWord tau(long k = 1) { return {k, 0}; }
  static GaloisWord frob(long k = 1) { return {0, k}; }

  /// (this) o (rhs), with the tau exponent reduced modulo tau_modulus.
  GaloisWord compose(const GaloisWord& rhs, long p, long tau_modulus) const {
    mpz_class pb, m(tau_modulus);
    mpz_class base(p), ex(frob_exp);
    mpz_powm(pb.get_mpz_t(), base.get_mpz_t(), ex.get_mpz_t(), m.get_mpz_t());
    mpz_class t = mpz_class(tau_exp) + mpz_class(rhs.tau_exp) * pb;
    mpz_fdiv_r(t.get_mpz_t(), t.get_mpz_t(), m.get_mpz_t());
    return {t.get_si(), frob_exp + rhs.frob_exp};
  }

  std::string to_string() const {
    std::string s;
    if (tau_exp) s += "tau^" + std::to_string(tau_exp);
    if (frob_exp) s += std::string(s.empty() ? "" : "*") + "phi^" + std::to_string(frob_exp);
    return s.empty() ? "id" : s;
  }

  bool operator==(const GaloisWord&) const = default;
};

class Tower;
using TowerPtr = std::shared_ptr<const Tower>;
using Unram = std::vector<mpz_class>;  // d coefficients in t
using Mant = std::vector<mpz_class>;   // e*d coefficients, block i is the pi^i coefficient

class Tower {
 public:
  /// Validates the parameters and fixes omega, pi, zeta_e and the Frobenius lift.
  static TowerPtr create(long p, int d, int e, long prec) {
    if (p < 3 || !is_prime(p))
      throw Error(ErrorKind::NonOddPrime, "tame_field", std::to_string(p) + " is not an odd prime");
    if (d < 1 || e < 1 || prec < 1)
      throw Error(ErrorKind::InvalidTower, "tame_field", "d, e and prec must be positive");
    if (gcd_long(e, p) != 1)
      throw Error(ErrorKind::WildRamification, "tame_field",
                  "ramification index " + std::to_string(e) + " is divisible by p = " + std::to_string(p));
    return TowerPtr(new Tower(p, d, e, prec));
  }

  const TowerParams& params() const { return params_; }
  long p() const { return params_.p; }
  int d() const { return params_.d; }
  int e() const { return params_.e; }
  long prec() const { return params_.prec; }
  long q() const { return params_.q; }
  const ResidueField& residue_field() const { return field_; }
  long modulus_digits() const { return digits_; }

  // ---- unramified ring W mod p^M ----

  void reduce(mpz_class& x) const {
    mpz_fdiv_r(x.get_mpz_t(), x.get_mpz_t(), pM_.get_mpz_t());
  }

  Unram w_zero() const { return Unram(params_.d, 0); }
  Unram w_one() const {
    Unram r = w_zero();
    r[0] = 1;
    return r;
  }
  Unram w_int(const mpz_class& n) const {
    Unram r = w_zero();
    r[0] = n;
    reduce(r[0]);
    return r;
  }

  Unram w_from_residue(ResidueField::Elt a) const {
    auto c = field_.coeffs(a);
    Unram r = w_zero();
    for (int i = 0; i < params_.d; ++i) r[i] = c[i];
    return r;
  }

  ResidueField::Elt w_residue(const Unram& a) const {
    std::vector<long> c(params_.d);
    for (int i = 0; i < params_.d; ++i) {
      mpz_class r;
      mpz_fdiv_r_ui(r.get_mpz_t(), a[i].get_mpz_t(), static_cast<unsigned long>(params_.p));
      c[i] = r.get_si();
    }
    return field_.from_coeffs(c);
  }

  Unram w_add(const Unram& a, const Unram& b) const {
    Unram r(params_.d);
    for (int i = 0; i < params_.d; ++i) {
      r[i] = a[i] + b[i];
      reduce(r[i]);
    }
    return r;
  }

  Unram w_sub(const Unram& a, const Unram& b) const {
    Unram r(params_.d);
    for (int i = 0; i < params_.d; ++i) {
      r[i] = a[i] - b[i];
      reduce(r[i]);
    }
    return r;
  }

  Unram w_scale(const Unram& a, const mpz_class& s) const {
    Unram r(params_.d);
    for (int i = 0; i < params_.d; ++i) {
      r[i] = a[i] * s;
      reduce(r[i]);
    }
    return r;
  }

  Unram w_mul(const Unram& a, const Unram& b) const {
    const int d = params_.d;
    if (d == 1) {
      Unram r{a[0] * b[0]};
      reduce(r[0]);
      return r;
    }
    std::vector<mpz_class> raw(2 * d - 1, 0);
    for (int i = 0; i < d; ++i) {
      if (a[i] == 0) continue;
      for (int j = 0; j < d; ++j) raw[i + j] += a[i] * b[j];
    }
    return fold_modulus(raw);
  }

  Unram w_pow(Unram base, mpz_class k) const {
    Unram r = w_one();
    while (k > 0) {
      if (mpz_odd_p(k.get_mpz_t())) r = w_mul(r, base);
      base = w_mul(base, base);
      k >>= 1;
    }
    return r;
  }

  bool w_is_zero(const Unram& a) const {
    for (const auto& c : a)
      if (c != 0) return false;
    return true;
  }

  /// Minimum p-adic valuation of the coefficients (M if zero mod p^M).
  long w_valp(const Unram& a) const {
    long best = digits_;
    for (const auto& c : a) {
      if (c == 0) continue;
      long v = static_cast<long>(mpz_remove(scratch_.get_mpz_t(), c.get_mpz_t(), pz_.get_mpz_t()));
      if (v < best) best = v;
    }
    return best;
  }

  Unram w_inv(const Unram& a) const {
    auto r = w_residue(a);
    if (r == 0) throw Error(ErrorKind::DivisionByZero, "tame_field", "inverse of a non-unit in W");
    Unram x = w_from_residue(field_.inv(r));
    Unram two = w_int(2);
    for (int it = 0; it < 80; ++it) {
      Unram ax = w_mul(a, x);
      if (ax == w_one()) return x;
      x = w_mul(x, w_sub(two, ax));
    }
    throw Error(ErrorKind::InternalError, "tame_field", "Newton inversion did not converge");
  }

  /// Root of X^n = c lifted from the residue root `start` (p does not divide n).
  Unram w_nth_root(const Unram& c, long n, ResidueField::Elt start) const {
    Unram y = w_from_residue(start);
    mpz_class nn(n);
    for (int it = 0; it < 80; ++it) {
      Unram yn1 = w_pow(y, n - 1);
      Unram g = w_sub(w_mul(yn1, y), c);
      if (w_is_zero(g)) return y;
      Unram dg = w_scale(yn1, nn);
      y = w_sub(y, w_mul(g, w_inv(dg)));
    }
    throw Error(ErrorKind::InternalError, "tame_field", "Newton root extraction did not converge");
  }

  /// Teichmueller representative of a residue.
  Unram teichmuller(ResidueField::Elt a) const {
    if (a == 0) return w_zero();
    return w_nth_root(w_one(), params_.q - 1, a);
  }

  /// Primitive n-th root of unity: the Teichmueller lift of omega^{(q-1)/n}.
  Unram root_of_unity(long n) const { return teichmuller(field_.root_of_unity(n)); }

  /// Frobenius automorphism of W (lifts x -> x^p).
  Unram w_frob(const Unram& a, long times = 1) const {
    Unram r = a;
    long t = mod_floor(times, params_.d);
    for (long k = 0; k < t; ++k) {
      Unram out = w_zero();
      for (int j = 0; j < params_.d; ++j) {
        if (r[j] == 0) continue;
        out = w_add(out, w_scale(frob_powers_[j], r[j]));
      }
      r = std::move(out);
    }
    return r;
  }

  // ---- mantissas: elements of O_L mod p^M ----

  Mant m_zero() const { return Mant(static_cast<std::size_t>(params_.e) * params_.d, 0); }

  Unram m_block(const Mant& m, int i) const {
    const int d = params_.d;
    return Unram(m.begin() + static_cast<long>(i) * d, m.begin() + static_cast<long>(i + 1) * d);
  }

  void m_set_block(Mant& m, int i, const Unram& w) const {
    for (int j = 0; j < params_.d; ++j) m[static_cast<std::size_t>(i) * params_.d + j] = w[j];
  }

  Mant m_from_unram(const Unram& w) const {
    Mant m = m_zero();
    m_set_block(m, 0, w);
    return m;
  }

  Mant m_add(const Mant& a, const Mant& b) const {
    Mant r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      r[i] = a[i] + b[i];
      reduce(r[i]);
    }
    return r;
  }

  Mant m_neg(const Mant& a) const {
    Mant r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      r[i] = -a[i];
      reduce(r[i]);
    }
    return r;
  }

  Mant m_mul(const Mant& a, const Mant& b) const {
    const int d = params_.d, e = params_.e;
    std::vector<std::vector<mpz_class>> acc(e, std::vector<mpz_class>(2 * d - 1, 0));
    for (int i = 0; i < e; ++i) {
      bool nz = false;
      for (int k = 0; k < d; ++k) nz = nz || a[i * d + k] != 0;
      if (!nz) continue;
      for (int j = 0; j < e; ++j) {
        int blk = i + j;
        bool wrap = blk >= e;
        if (wrap) blk -= e;
        for (int k = 0; k < d; ++k) {
          const mpz_class& ak = a[i * d + k];
          if (ak == 0) continue;
          for (int l = 0; l < d; ++l) {
            const mpz_class& bl = b[j * d + l];
            if (bl == 0) continue;
            if (wrap)
              acc[blk][k + l] += ak * bl * pz_;
            else
              acc[blk][k + l] += ak * bl;
          }
        }
      }
    }
    Mant r = m_zero();
    for (int i = 0; i < e; ++i) m_set_block(r, i, fold_modulus(acc[i]));
    return r;
  }

  /// Valuation in pi-units (e*M if zero mod p^M).
  long m_val(const Mant& a) const {
    const int d = params_.d, e = params_.e;
    long best = static_cast<long>(e) * digits_;
    for (int i = 0; i < e; ++i) {
      for (int k = 0; k < d; ++k) {
        const mpz_class& c = a[i * d + k];
        if (c == 0) continue;
        long v = static_cast<long>(mpz_remove(scratch_.get_mpz_t(), c.get_mpz_t(), pz_.get_mpz_t()));
        long cand = v * e + i;
        if (cand < best) best = cand;
      }
    }
    return best;
  }

  /// Multiply by pi^k, k >= 0.
  Mant m_shift_up(const Mant& a, long k) const {
    const int d = params_.d, e = params_.e;
    long whole = k / e, part = k % e;
    mpz_class scale;
    mpz_pow_ui(scale.get_mpz_t(), pz_.get_mpz_t(), static_cast<unsigned long>(whole));
    Mant r = m_zero();
    for (int i = 0; i < e; ++i) {
      int tgt = static_cast<int>(i + part);
      bool wrap = tgt >= e;
      if (wrap) tgt -= e;
      for (int j = 0; j < d; ++j) {
        mpz_class v = a[i * d + j] * scale;
        if (wrap) v *= pz_;
        reduce(v);
        r[tgt * d + j] = v;
      }
    }
    return r;
  }

  /// Divide by pi^k; the caller guarantees m_val(a) >= k.
  Mant m_shift_down(const Mant& a, long k) const {
    const int d = params_.d, e = params_.e;
    long whole = k / e, part = k % e;
    mpz_class scale;
    mpz_pow_ui(scale.get_mpz_t(), pz_.get_mpz_t(), static_cast<unsigned long>(whole));
    Mant r = m_zero();
    for (int i = 0; i < e; ++i) {
      int tgt = static_cast<int>(i - part);
      bool wrap = tgt < 0;
      if (wrap) tgt += e;
      for (int j = 0; j < d; ++j) {
        mpz_class v;
        mpz_divexact(v.get_mpz_t(), a[i * d + j].get_mpz_t(), scale.get_mpz_t());
        if (wrap) mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), pz_.get_mpz_t());
        r[tgt * d + j] = v;
      }
    }
    return r;
  }

  Mant m_inv_unit(const Mant& u) const {
    Unram u0 = m_block(u, 0);
    if (w_residue(u0) == 0)
      throw Error(ErrorKind::InternalError, "tame_field", "m_inv_unit on a non-unit");
    Mant x = m_from_unram(w_from_residue(field_.inv(w_residue(u0))));
    Mant one = m_from_unram(w_one());
    Mant two = m_from_unram(w_int(2));
    for (int it = 0; it < 80; ++it) {
      Mant ux = m_mul(u, x);
      if (ux == one) return x;
      x = m_mul(x, m_add(two, m_neg(ux)));
    }
    throw Error(ErrorKind::InternalError, "tame_field", "Newton inversion did not converge");
  }

  Mant m_apply(const Mant& a, const GaloisWord& g) const {
    const int e = params_.e;
    long fb = mod_floor(g.frob_exp, params_.d);
    long ta = mod_floor(g.tau_exp, e);
    Mant r = m_zero();
    for (int i = 0; i < e; ++i) {
      Unram blk = m_block(a, i);
      if (fb) blk = w_frob(blk, fb);
      if (ta) blk = w_mul(blk, zeta_e_powers_[(ta * i) % e]);
      m_set_block(r, i, blk);
    }
    return r;
  }

  /// zeta_e as an element of W.
  const Unram& zeta_e() const { return zeta_e_; }

  /// Residue of zeta_e.
  ResidueField::Elt zeta_e_residue() const { return w_residue(zeta_e_); }

 private:
  Tower(long p, int d, int e, long prec) : field_(p, d) {
    params_ = {p, d, e, prec, field_.size()};
    if ((field_.size() - 1) % e != 0)
      throw Error(ErrorKind::InvalidTower, "tame_field",
                  "e = " + std::to_string(e) + " does not divide q - 1 = " + std::to_string(field_.size() - 1));
    digits_ = (prec + e - 1) / e + 2;
    pz_ = p;
    mpz_pow_ui(pM_.get_mpz_t(), pz_.get_mpz_t(), static_cast<unsigned long>(digits_));
    poly_.resize(d);
    for (int i = 0; i < d; ++i) poly_[i] = field_.modulus()[i];
    init_frobenius();
    zeta_e_ = root_of_unity(e);
    zeta_e_powers_.push_back(w_one());
    for (int i = 1; i < e; ++i) zeta_e_powers_.push_back(w_mul(zeta_e_powers_.back(), zeta_e_));
  }

  // raw has length 2d-1; reduce by the monic lifted modulus and mod p^M.
  Unram fold_modulus(std::vector<mpz_class>& raw) const {
    const int d = params_.d;
    for (int k = 2 * d - 2; k >= d; --k) {
      if (raw[k] == 0) continue;
      reduce(raw[k]);
      for (int j = 0; j < d; ++j) raw[k - d + j] -= raw[k] * poly_[j];
      raw[k] = 0;
    }
    Unram r(d);
    for (int i = 0; i < d; ++i) {
      r[i] = raw[i];
      reduce(r[i]);
    }
    return r;
  }

  void init_frobenius() {
    const int d = params_.d;
    if (d == 1) {
      frob_powers_ = {w_one()};
      return;
    }
    // phi(t) is the root of P~ congruent to t^p; Newton from t^p.
    Unram t = w_zero();
    t[1] = 1;
    Unram y = w_pow(t, params_.p);
    for (int it = 0; it < 80; ++it) {
      Unram val = w_zero(), der = w_zero();
      // Horner for P~(y) and P~'(y); P~ = y^d + sum poly_[j] y^j.
      val = w_one();
      der = w_int(d);
      for (int j = d - 1; j >= 0; --j) {
        val = w_add(w_mul(val, y), w_int(poly_[j]));
      }
      for (int j = d - 1; j >= 1; --j) {
        der = w_add(w_mul(der, y), w_int(poly_[j] * j));
      }
      if (w_is_zero(val)) break;
      y = w_sub(y, w_mul(val, w_inv(der)));
    }
    frob_powers_.push_back(w_one());
    for (int j = 1; j < d; ++j) frob_powers_.push_back(w_mul(frob_powers_.back(), y));
  }

  TowerParams params_;
  ResidueField field_;
  long digits_ = 0;
  mpz_class pz_, pM_;
  mutable mpz_class scratch_;
  std::vector<mpz_class> poly_;
  std::vector<Unram> frob_powers_;
  Unram zeta_e_;
  std::vector<Unram> zeta_e_powers_;
};

enum class SqrtFailure { None, OddValuation, NonResidue };

/// An element of L at finite precision. See the file comment for the model.
class TowerElement {
 public:
  static constexpr long kExact = LONG_MAX / 4;

  TowerElement() = default;

  static TowerElement zero(TowerPtr t) {
    TowerElement x;
    x.tower_ = std::move(t);
    x.zero_ = true;
    x.prec_ = kExact;
    return x;
  }

  /// O(pi^abs_units).
  static TowerElement inexact_zero(TowerPtr t, long abs_units) {
    TowerElement x = zero(std::move(t));
    x.prec_ = abs_units;
    return x;
  }

  static TowerElement from_integer(TowerPtr t, const mpz_class& n) {
    if (n == 0) return zero(std::move(t));
    mpz_class u = n;
    mpz_class pz(t->p());
    long v = static_cast<long>(mpz_remove(u.get_mpz_t(), u.get_mpz_t(), pz.get_mpz_t()));
    TowerElement x;
    x.zero_ = false;
    x.val_ = v * t->e();
    x.prec_ = t->prec();
    x.unit_ = t->m_from_unram(t->w_int(u));
    x.tower_ = std::move(t);
    return x;
  }

  static TowerElement from_integer(TowerPtr t, long n) { return from_integer(std::move(t), mpz_class(n)); }

  /// Element of W, given exactly modulo p^M.
  static TowerElement from_unramified(TowerPtr t, const Unram& w) {
    long v = t->w_valp(w);
    if (v >= t->modulus_digits()) return inexact_zero(t, v * t->e());
    Unram u(w.size());
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), static_cast<unsigned long>(t->p()), static_cast<unsigned long>(v));
    for (std::size_t i = 0; i < w.size(); ++i) mpz_divexact(u[i].get_mpz_t(), w[i].get_mpz_t(), scale.get_mpz_t());
    TowerElement x;
    x.zero_ = false;
    x.val_ = v * t->e();
    x.prec_ = std::min<long>(t->prec(), (t->modulus_digits() - v - 1) * t->e());
    if (x.prec_ <= 0) return inexact_zero(t, v * t->e());
    x.unit_ = t->m_from_unram(u);
    x.tower_ = std::move(t);
    return x;
  }

  static TowerElement from_residue(TowerPtr t, ResidueField::Elt a) {
    if (a == 0) return zero(std::move(t));
    auto w = t->w_from_residue(a);
    return from_unramified(std::move(t), w);
  }

  /// pi^k for any integer k.
  static TowerElement pi_power(TowerPtr t, long k) {
    TowerElement x;
    x.zero_ = false;
    x.val_ = k;
    x.prec_ = t->prec();
    x.unit_ = t->m_from_unram(t->w_one());
    x.tower_ = std::move(t);
    return x;
  }

  const TowerPtr& tower() const { return tower_; }

  bool is_zero() const { return zero_; }
  bool is_exact_zero() const { return zero_ && prec_ >= kExact; }

  /// v(x) normalised so v(p) = 1; nullopt means +infinity (exact zero).
  std::optional<Rational> valuation() const {
    if (zero_) {
      if (is_exact_zero()) return std::nullopt;
      throw Error(ErrorKind::PrecisionExhausted, "tame_field",
                  "value is zero to the available precision O(pi^" + std::to_string(prec_) + ")");
    }
    return Rational(val_, tower_->e());
  }

  /// Valuation in units of v(pi) = 1/e.
  long valuation_units() const {
    if (zero_) (void)valuation();
    if (zero_) throw Error(ErrorKind::ZeroElement, "tame_field", "valuation of exact zero");
    return val_;
  }

  /// Valuation in pi-units when nonzero, else the absolute precision of the zero.
  long valuation_bound_units() const { return zero_ ? prec_ : val_; }

  long relative_precision() const { return zero_ ? 0 : prec_; }
  long absolute_precision_units() const { return zero_ ? prec_ : val_ + prec_; }

  /// Leading digit of x / pi^{e v(x)}.
  ResidueField::Elt residue() const {
    if (zero_) throw Error(ErrorKind::ZeroElement, "tame_field", "residue of zero");
    return tower_->w_residue(tower_->m_block(unit_, 0));
  }

  /// The unit part x / pi^{e v(x)} as a mantissa.
  const Mant& unit_part() const { return unit_; }

  TowerElement operator-() const {
    if (zero_) return *this;
    TowerElement r = *this;
    r.unit_ = tower_->m_neg(unit_);
    return r;
  }

  friend TowerElement operator+(const TowerElement& x, const TowerElement& y) {
    const Tower& t = *x.tower_;
    if (x.zero_ || y.zero_) {
      if (x.zero_ && y.zero_) return inexact_or_exact(x.tower_, std::min(x.prec_, y.prec_));
      const TowerElement& nz = x.zero_ ? y : x;
      const TowerElement& z = x.zero_ ? x : y;
      if (z.is_exact_zero()) return nz;
      long abs_p = std::min(nz.val_ + nz.prec_, z.prec_);
      if (abs_p <= nz.val_) return inexact_zero(x.tower_, abs_p);
      TowerElement r = nz;
      r.prec_ = abs_p - nz.val_;
      return r;
    }
    long v = std::min(x.val_, y.val_);
    long abs_rel = std::min(x.val_ + x.prec_, y.val_ + y.prec_) - v;
    Mant a = x.val_ > v ? t.m_shift_up(x.unit_, x.val_ - v) : x.unit_;
    Mant b = y.val_ > v ? t.m_shift_up(y.unit_, y.val_ - v) : y.unit_;
    Mant s = t.m_add(a, b);
    long w = t.m_val(s);
    if (w >= abs_rel) return inexact_zero(x.tower_, v + abs_rel);
    TowerElement r;
    r.tower_ = x.tower_;
    r.zero_ = false;
    r.val_ = v + w;
    r.prec_ = abs_rel - w;
    r.unit_ = w ? t.m_shift_down(s, w) : std::move(s);
    return r;
  }

  friend TowerElement operator-(const TowerElement& x, const TowerElement& y) { return x + (-y); }

  friend TowerElement operator*(const TowerElement& x, const TowerElement& y) {
    if (x.zero_ || y.zero_) {
      if (x.is_exact_zero() || y.is_exact_zero()) return zero(x.tower_);
      if (x.zero_ && y.zero_) return inexact_zero(x.tower_, x.prec_ + y.prec_);
      const TowerElement& nz = x.zero_ ? y : x;
      const TowerElement& z = x.zero_ ? x : y;
      return inexact_zero(x.tower_, z.prec_ + nz.val_);
    }
    TowerElement r;
    r.tower_ = x.tower_;
    r.zero_ = false;
    r.val_ = x.val_ + y.val_;
    r.prec_ = std::min(x.prec_, y.prec_);
    r.unit_ = x.tower_->m_mul(x.unit_, y.unit_);
    return r;
  }

  TowerElement inverse() const {
    if (zero_) throw Error(ErrorKind::DivisionByZero, "tame_field", "inverse of zero");
    TowerElement r = *this;
    r.val_ = -val_;
    r.unit_ = tower_->m_inv_unit(unit_);
    return r;
  }

  friend TowerElement operator/(const TowerElement& x, const TowerElement& y) { return x * y.inverse(); }

  TowerElement pow(long k) const {
    if (k < 0) return inverse().pow(-k);
    TowerElement r = from_integer(tower_, 1), b = *this;
    while (k) {
      if (k & 1) r = r * b;
      b = b * b;
      k >>= 1;
    }
    return r;
  }

  SqrtFailure sqrt_obstruction() const {
    if (zero_) return SqrtFailure::None;
    if (val_ % 2 != 0) return SqrtFailure::OddValuation;
    if (!tower_->residue_field().is_square(residue())) return SqrtFailure::NonResidue;
    return SqrtFailure::None;
  }

  bool is_square() const { return sqrt_obstruction() == SqrtFailure::None; }

  /// Canonical square root: the one whose leading residue digit is the
  /// smaller of the pair in the residue field's canonical order.
  TowerElement sqrt() const {
    if (zero_) {
      if (is_exact_zero()) return *this;
      return inexact_zero(tower_, prec_ / 2);
    }
    switch (sqrt_obstruction()) {
      case SqrtFailure::OddValuation:
        throw Error(ErrorKind::NoSquareRoot, "tame_field", "odd valuation");
      case SqrtFailure::NonResidue:
        throw Error(ErrorKind::NoSquareRoot, "tame_field", "non-residue");
      case SqrtFailure::None:
        break;
    }
    const Tower& t = *tower_;
    auto r0 = *t.residue_field().sqrt(residue());
    Mant y = t.m_from_unram(t.w_from_residue(r0));
    Mant half_m = t.m_from_unram(t.w_inv(t.w_int(2)));
    for (int it = 0; it < 80; ++it) {
      Mant yy = t.m_mul(y, y);
      if (yy == unit_) break;
      y = t.m_mul(half_m, t.m_add(y, t.m_mul(unit_, t.m_inv_unit(y))));
    }
    TowerElement r;
    r.tower_ = tower_;
    r.zero_ = false;
    r.val_ = val_ / 2;
    r.prec_ = prec_;
    r.unit_ = std::move(y);
    return r;
  }

  TowerElement apply(const GaloisWord& g) const {
    if (zero_) return *this;
    TowerElement r = *this;
    r.unit_ = tower_->m_apply(unit_, g);
    // sigma(pi^v) = chi(sigma)^v pi^v.
    long ta = mod_floor(g.tau_exp, tower_->e());
    if (ta != 0 && val_ != 0) {
      long k = mod_floor(ta * mod_floor(val_, tower_->e()), tower_->e());
      if (k) {
        Unram z = tower_->w_pow(tower_->zeta_e(), k);
        r.unit_ = tower_->m_mul(r.unit_, tower_->m_from_unram(z));
      }
    }
    return r;
  }

  /// Teichmueller digits of x / pi^{e v(x)}, at most min(n, relative precision).
  std::vector<ResidueField::Elt> digits(std::size_t n) const {
    std::vector<ResidueField::Elt> out;
    if (zero_) return out;
    const Tower& t = *tower_;
    Mant cur = unit_;
    long remaining = prec_;
    while (out.size() < n && remaining > 0) {
      auto r = t.w_residue(t.m_block(cur, 0));
      out.push_back(r);
      Unram b0 = t.w_sub(t.m_block(cur, 0), t.teichmuller(r));
      t.m_set_block(cur, 0, b0);
      cur = t.m_shift_down(cur, 1);
      --remaining;
    }
    return out;
  }

  /// Difference vanishes at the available precision.
  bool equals(const TowerElement& other) const { return (*this - other).is_zero(); }

  std::string to_string() const {
    if (zero_) return is_exact_zero() ? "0" : "O(pi^" + std::to_string(prec_) + ")";
    auto dg = digits(4);
    std::string s = "pi^" + std::to_string(val_) + "*(";
    for (std::size_t i = 0; i < dg.size(); ++i)
      s += (i ? " + " : "") + tower_->residue_field().to_string(dg[i]) + (i ? "*pi^" + std::to_string(i) : "");
    return s + " + ...)";
  }

 private:
  static TowerElement inexact_or_exact(TowerPtr t, long prec) {
    return prec >= kExact ? zero(std::move(t)) : inexact_zero(std::move(t), prec);
  }

  TowerPtr tower_;
  bool zero_ = true;
  long val_ = 0;
  long prec_ = kExact;
  Mant unit_;
};

/// chi(sigma) = sigma(pi)/pi mod m.
inline ResidueField::Elt chi(const Tower& t, const GaloisWord& g) {
  return t.residue_field().pow(t.zeta_e_residue(), g.tau_exp);
}

}  // namespace hypsol

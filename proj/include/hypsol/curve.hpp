#pragma once

// Curves y^2 = c_f * prod(factor) with linear factors (x - c) and shifted
// binomials (x - c)^n - u*p^m, c in Z[zeta_N]. Parsing, tower sizing,
// root embedding, Galois permutations of the roots, integer expansion.

#include <gmpxx.h>

#include <algorithm>
#include <cctype>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hypsol/cyclotomic.hpp"
#include "hypsol/error.hpp"
#include "hypsol/intpoly.hpp"
#include "hypsol/residue_field.hpp"
#include "hypsol/tame_field.hpp"

namespace hypsol {

struct Factor {
  bool linear = true;
  CycloExpr center;
  int n = 1;
  mpz_class rhs_unit = 0;  // binomial: (x - center)^n - rhs_unit * p^m
  int m = 0;

  int degree() const { return linear ? 1 : n; }

  bool same_shape(const Factor& o) const {
    return linear == o.linear && n == o.n && rhs_unit == o.rhs_unit && m == o.m;
  }

  std::string to_string() const {
    std::string mc = (-center).to_string();
    std::string base = mc == "0" ? "x" : (mc[0] == '-' ? "x" + mc : "x+" + mc);
    if (linear) return "(" + base + ")";
    std::string head = mc == "0" ? "x" : "(" + base + ")";
    if (n != 1) head += "^" + std::to_string(n);
    mpz_class u = rhs_unit;
    std::string sign = u < 0 ? "+" : "-";
    if (u < 0) u = -u;
    std::string pw = m == 1 ? "p" : "p^" + std::to_string(m);
    return "(" + head + sign + (u == 1 ? "" : u.get_str() + "*") + pw + ")";
  }
};

struct CurveExpr {
  std::optional<long> p;
  mpz_class cf_unit = 1;  // sign times integer; factors of p are moved into cf_pow by normalize()
  int cf_pow = 0;
  std::vector<Factor> factors;

  int degree() const {
    int s = 0;
    for (const auto& f : factors) s += f.degree();
    return s;
  }

  long conductor() const {
    long n = 1;
    for (const auto& f : factors) n = lcm_long(n, f.center.conductor());
    return n;
  }

  int max_valuation() const {
    int v = cf_pow;
    for (const auto& f : factors) v = std::max(v, f.m);
    return v;
  }

  std::string to_string() const {
    std::string s;
    if (cf_unit != 1) s = cf_unit == -1 ? "-" : cf_unit.get_str() + "*";
    if (cf_pow > 0) s += (cf_pow == 1 ? "p" : "p^" + std::to_string(cf_pow)) + "*";
    for (std::size_t i = 0; i < factors.size(); ++i) s += (i ? "*" : "") + factors[i].to_string();
    return s;
  }
};

namespace detail {

class ExprParser {
 public:
  explicit ExprParser(std::string_view s) : s_(s) {}

  CurveExpr parse() {
    CurveExpr c;
    skip();
    if (peek() == '-') {
      ++i_;
      c.cf_unit = -1;
    } else if (peek() == '+') {
      ++i_;
    }
    term(c);
    while (true) {
      skip();
      if (at_end()) break;
      if (peek() == '*') {
        ++i_;
        term(c);
      } else if (peek() == '(' || peek() == 'p' || std::isdigit(static_cast<unsigned char>(peek()))) {
        term(c);  // juxtaposition
      } else {
        fail("unexpected character");
      }
    }
    if (c.degree() < 5)
      throw Error(ErrorKind::DegreeTooSmall, "curve_input",
                  "degree " + std::to_string(c.degree()) + " < 5 (genus must be at least 2)");
    return c;
  }

 private:
  struct Atom {
    mpz_class coeff = 1;
    int ppow = 0;          // > 0 for p-terms
    CycloExpr cyclo = CycloExpr::integer(1);
    bool has_x = false;
  };

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::SyntaxError, "curve_input",
                msg + " at position " + std::to_string(i_) + " in \"" + std::string(s_) + "\"");
  }

  [[noreturn]] void unsupported(std::size_t start, const std::string& why) const {
    std::string text(s_.substr(start, std::min(i_, s_.size()) - start));
    throw Error(ErrorKind::UnsupportedFactor, "curve_input", "factor \"" + text + "\": " + why);
  }

  bool at_end() const { return i_ >= s_.size(); }
  char peek() const { return at_end() ? '\0' : s_[i_]; }
  void skip() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool eat(char ch) {
    skip();
    if (peek() == ch) {
      ++i_;
      return true;
    }
    return false;
  }
  void expect(char ch) {
    if (!eat(ch)) fail(std::string("expected '") + ch + "'");
  }
  bool eat_word(std::string_view w) {
    skip();
    if (s_.substr(i_, w.size()) == w) {
      std::size_t after = i_ + w.size();
      if (after < s_.size() && std::isalnum(static_cast<unsigned char>(s_[after]))) return false;
      i_ = after;
      return true;
    }
    return false;
  }

  mpz_class integer() {
    skip();
    std::size_t start = i_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
    if (start == i_) fail("expected integer");
    return mpz_class(std::string(s_.substr(start, i_ - start)));
  }

  long small_integer() {
    mpz_class v = integer();
    if (v > 1000000) fail("integer too large");
    return v.get_si();
  }

  long optional_exponent() {
    if (eat('^')) return small_integer();
    return 1;
  }

  void term(CurveExpr& c) {
    skip();
    if (eat_word("p")) {
      c.cf_pow += static_cast<int>(optional_exponent());
    } else if (std::isdigit(static_cast<unsigned char>(peek()))) {
      c.cf_unit *= integer();
    } else if (peek() == '(') {
      std::size_t start = i_;
      ++i_;
      c.factors.push_back(poly(start));
      expect(')');
    } else {
      fail("expected 'p', an integer or '('");
    }
  }

  // One signed summand after the head: [int "*"] (p-power | zeta-power) | int | x-term.
  Atom atom(std::size_t start) {
    Atom a;
    skip();
    if (std::isdigit(static_cast<unsigned char>(peek()))) {
      a.coeff = integer();
      if (!eat('*')) return a;
    }
    if (eat_word("p")) {
      a.ppow = static_cast<int>(optional_exponent());
      if (eat('*')) a.coeff *= integer();
      return a;
    }
    if (eat_word("zeta")) {
      expect('(');
      long n = small_integer();
      expect(')');
      if (n < 1) fail("zeta conductor must be positive");
      long k = optional_exponent();
      a.cyclo = CycloExpr::zeta(n, k);
      return a;
    }
    if (eat_word("x")) {
      a.has_x = true;
      optional_exponent();
      return a;
    }
    fail("expected a term");
  }

  Factor poly(std::size_t start) {
    Factor f;
    CycloExpr center = CycloExpr::integer(0);
    bool shifted = false;
    skip();
    if (eat('(')) {
      if (!eat_word("x")) unsupported(start, "inner parentheses must start with x");
      shifted = true;
      while (true) {
        skip();
        if (peek() == ')') break;
        int sign = sign_or_fail();
        Atom a = atom(start);
        if (a.has_x || a.ppow > 0) unsupported(start, "the shift must be a combination of integers and zeta powers");
        center = center - (a.cyclo * CycloExpr::integer(a.coeff * sign));
      }
      expect(')');
    } else if (!eat_word("x")) {
      unsupported(start, "factor must start with x or (x - c)");
    }
    long n = optional_exponent();
    if (n < 1) unsupported(start, "exponent must be positive");
    std::vector<std::pair<int, Atom>> tail;
    while (true) {
      skip();
      if (peek() == ')' || at_end()) break;
      int sign = sign_or_fail();
      Atom a = atom(start);
      if (a.has_x) unsupported(start, "more than one power of x");
      tail.emplace_back(sign, a);
    }
    std::vector<std::pair<int, Atom>> pterms, cterms;
    for (auto& t : tail) (t.second.ppow > 0 ? pterms : cterms).push_back(t);
    if (!shifted && n == 1) {
      // x + constants [- u*p^m]
      for (auto& [sg, a] : cterms) center = center - (a.cyclo * CycloExpr::integer(a.coeff * sg));
      if (pterms.empty()) {
        f.linear = true;
        f.center = center;
        return f;
      }
    } else if (!cterms.empty()) {
      unsupported(start, "the right-hand side must be a unit times a positive power of p");
    }
    if (pterms.size() != 1) {
      if (pterms.empty() && shifted && n == 1) {
        f.linear = true;
        f.center = center;
        return f;
      }
      unsupported(start, "expected exactly one term of the form u*p^m");
    }
    auto [sg, a] = pterms.front();
    if (a.coeff == 0) unsupported(start, "zero right-hand side");
    f.linear = false;
    f.center = center;
    f.n = static_cast<int>(n);
    f.rhs_unit = -a.coeff * sg;
    f.m = a.ppow;
    return f;
  }

  int sign_or_fail() {
    if (eat('+')) return 1;
    if (eat('-')) return -1;
    fail("expected '+' or '-'");
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

}  // namespace detail

/// Parse one curve expression such as "p*(x^3-p^2)*((x-1)^3-p^2)".
inline CurveExpr parse_expr(std::string_view text) { return detail::ExprParser(text).parse(); }

struct CurveFile {
  long p = 0;
  std::vector<CurveExpr> curves;
};

/// Header "p = <int>", then one expression per line; blank lines and '#' comments ignored.
inline CurveFile parse_curve_file(std::string_view text) {
  CurveFile out;
  bool have_p = false;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    line = line.substr(b, line.find_last_not_of(" \t\r") - b + 1);
    if (!have_p) {
      auto eq = line.find('=');
      std::string lhs = line.substr(0, eq == std::string::npos ? 0 : eq);
      lhs.erase(std::remove_if(lhs.begin(), lhs.end(), ::isspace), lhs.end());
      if (eq == std::string::npos || lhs != "p")
        throw Error(ErrorKind::SyntaxError, "curve_input", "missing header line \"p = <int>\"");
      try {
        std::size_t used = 0;
        std::string rhs = line.substr(eq + 1);
        out.p = std::stol(rhs, &used);
        if (rhs.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw Error(ErrorKind::SyntaxError, "curve_input", "bad header \"" + line + "\"");
      }
      have_p = true;
      continue;
    }
    CurveExpr c = parse_expr(line);
    c.p = out.p;
    out.curves.push_back(std::move(c));
  }
  if (!have_p) throw Error(ErrorKind::SyntaxError, "curve_input", "missing header line \"p = <int>\"");
  return out;
}

/// Move p-factors out of units and check tameness of the input against p.
inline CurveExpr normalize(CurveExpr c, long p) {
  if (p < 3 || !is_prime(p))
    throw Error(ErrorKind::NonOddPrime, "curve_input", std::to_string(p) + " is not an odd prime");
  c.p = p;
  mpz_class pz(p);
  if (c.cf_unit == 0) throw Error(ErrorKind::UnsupportedFactor, "curve_input", "zero leading coefficient");
  c.cf_pow += static_cast<int>(mpz_remove(c.cf_unit.get_mpz_t(), c.cf_unit.get_mpz_t(), pz.get_mpz_t()));
  long nn = c.conductor();
  if (nn % p == 0)
    throw Error(ErrorKind::WildInput, "curve_input", "p divides the cyclotomic conductor " + std::to_string(nn));
  for (auto& f : c.factors) {
    if (f.linear) continue;
    if (f.n % p == 0)
      throw Error(ErrorKind::WildInput, "curve_input", "p divides the exponent of " + f.to_string());
    f.m += static_cast<int>(mpz_remove(f.rhs_unit.get_mpz_t(), f.rhs_unit.get_mpz_t(), pz.get_mpz_t()));
  }
  return c;
}

inline long curve_prime(const CurveExpr& c) {
  if (!c.p) throw Error(ErrorKind::SyntaxError, "curve_input", "no prime given for " + c.to_string());
  return *c.p;
}

/// Factor multiset stable under zeta_N -> zeta_N^p.
inline void galois_closure_check(const CurveExpr& c) {
  long p = curve_prime(c);
  long n = c.conductor();
  std::vector<bool> used(c.factors.size(), false);
  for (std::size_t i = 0; i < c.factors.size(); ++i) {
    const auto& f = c.factors[i];
    CycloExpr img = f.center.lift(n).galois(p);
    bool found = false;
    for (std::size_t j = 0; j < c.factors.size() && !found; ++j) {
      if (used[j] || !c.factors[j].same_shape(f)) continue;
      if (c.factors[j].center == img) {
        used[j] = true;
        found = true;
      }
    }
    if (!found)
      throw Error(ErrorKind::NotGaloisClosed, "curve_input",
                  "factor " + std::to_string(i + 1) + " " + f.to_string() + " has no Frobenius conjugate in the product");
  }
}

inline int curve_genus_of_degree(int deg) { return (deg + 1) / 2 - 1; }

struct TowerShape {
  int d = 1;
  int e = 1;
};

/// Smallest (d, e) over which f splits. e reduces each n by gcd(n, m).
inline TowerShape required_tower(const CurveExpr& c) {
  long p = curve_prime(c);
  TowerShape s;
  long ncyc = c.conductor();
  long e = 1;
  for (const auto& f : c.factors) {
    if (f.linear) continue;
    if (f.n % p == 0) throw Error(ErrorKind::WildInput, "curve_input", "p divides n in " + f.to_string());
    e = lcm_long(e, f.n / gcd_long(f.n, f.m));
    ncyc = lcm_long(ncyc, f.n);
  }
  if (ncyc % p == 0) throw Error(ErrorKind::WildInput, "curve_input", "p divides the conductor");
  s.e = static_cast<int>(e);
  long d0 = multiplicative_order(mod_floor(p, ncyc), ncyc);
  for (long d = d0;; d += d0) {
    mpz_class q;
    mpz_ui_pow_ui(q.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(d));
    if (q > ResidueField::kMaxSize)
      throw Error(ErrorKind::InvalidTower, "curve_input", "residue field needed to split f is too large");
    bool ok = true;
    for (const auto& f : c.factors) {
      if (f.linear) continue;
      mpz_class g = gcd(mpz_class(f.n), q - 1), ex = (q - 1) / g, u = f.rhs_unit, pz(p), r;
      mpz_mod(u.get_mpz_t(), u.get_mpz_t(), pz.get_mpz_t());
      mpz_powm(r.get_mpz_t(), u.get_mpz_t(), ex.get_mpz_t(), pz.get_mpz_t());
      ok = ok && r == 1;
    }
    if (ok) {
      s.d = static_cast<int>(d);
      return s;
    }
  }
}

/// prec = 8 e (1 + largest p-power in the input), in pi-adic digits.
inline long default_precision(const CurveExpr& c, int e) { return 8L * e * (1 + c.max_valuation()); }

/// Integer coefficients (ascending) of c_f * prod(factor), expanded over Z[zeta_N].
inline ZPoly expand_to_integer_poly(const CurveExpr& c) {
  long p = curve_prime(c);
  long nn = c.conductor();
  std::vector<CycloExpr> acc{CycloExpr::integer(1, nn)};
  auto mul = [&](const std::vector<CycloExpr>& a, const std::vector<CycloExpr>& b) {
    std::vector<CycloExpr> r(a.size() + b.size() - 1, CycloExpr::integer(0, nn));
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = r[i + j] + a[i] * b[j];
    return r;
  };
  mpz_class pz(p);
  for (const auto& f : c.factors) {
    CycloExpr mc = -f.center.lift(nn);
    std::vector<CycloExpr> lin{mc, CycloExpr::integer(1, nn)};
    std::vector<CycloExpr> fac{CycloExpr::integer(1, nn)};
    for (int k = 0; k < f.degree(); ++k) fac = mul(fac, lin);
    if (!f.linear) {
      mpz_class pm;
      mpz_pow_ui(pm.get_mpz_t(), pz.get_mpz_t(), static_cast<unsigned long>(f.m));
      fac[0] = fac[0] - CycloExpr::integer(f.rhs_unit * pm, nn);
    }
    acc = mul(acc, fac);
  }
  mpz_class lead;
  mpz_pow_ui(lead.get_mpz_t(), pz.get_mpz_t(), static_cast<unsigned long>(c.cf_pow));
  lead *= c.cf_unit;
  ZPoly out(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) {
    if (!acc[i].is_rational())
      throw Error(ErrorKind::NonRationalCoefficient, "curve_input",
                  "coefficient of x^" + std::to_string(i) + " is " + acc[i].to_string() + ", not an integer");
    out[i] = acc[i].coeffs()[0] * lead;
  }
  return out;
}

struct RootTag {
  int factor = 0;
  int branch = 0;
};

struct RootSet {
  TowerPtr tower;
  std::vector<TowerElement> roots;
  std::vector<RootTag> tags;
  std::vector<int> tau_perm;
  std::vector<int> frob_perm;
  TowerElement leading;  // c_f in L

  std::size_t size() const { return roots.size(); }
};

/// Roots c + zeta_n^j * u^{1/n} * pi^{m e / n}; u^{1/n} lifts the canonical residue root.
inline RootSet extract_roots(const CurveExpr& c, const TowerPtr& t) {
  long p = curve_prime(c);
  if (t->p() != p) throw Error(ErrorKind::InternalError, "curve_input", "tower prime mismatch");
  const auto& F = t->residue_field();
  RootSet rs;
  rs.tower = t;
  mpz_class pk;
  mpz_ui_pow_ui(pk.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(c.cf_pow));
  rs.leading = TowerElement::from_integer(t, c.cf_unit * pk);
  for (std::size_t fi = 0; fi < c.factors.size(); ++fi) {
    const auto& f = c.factors[fi];
    TowerElement center = TowerElement::from_unramified(t, f.center.embed(*t));
    if (f.linear) {
      rs.roots.push_back(center);
      rs.tags.push_back({static_cast<int>(fi), 0});
      continue;
    }
    long shift = static_cast<long>(f.m) * t->e();
    if (shift % f.n != 0 || (t->q() - 1) % f.n != 0)
      throw Error(ErrorKind::InternalError, "curve_input", "tower does not split " + f.to_string());
    shift /= f.n;
    Unram u = t->w_int(f.rhs_unit);
    auto ubar = t->w_residue(u);
    auto r0 = F.nth_root(ubar, f.n);
    if (!r0) throw Error(ErrorKind::InternalError, "curve_input", "no residue root for " + f.to_string());
    Unram w = t->w_nth_root(u, f.n, *r0);
    Unram zn = t->root_of_unity(f.n);
    Unram zj = t->w_one();
    for (int j = 0; j < f.n; ++j) {
      TowerElement r = center + TowerElement::from_unramified(t, t->w_mul(zj, w)) * TowerElement::pi_power(t, shift);
      rs.roots.push_back(r);
      rs.tags.push_back({static_cast<int>(fi), j});
      zj = t->w_mul(zj, zn);
    }
  }
  for (std::size_t i = 0; i < rs.roots.size(); ++i)
    for (std::size_t j = i + 1; j < rs.roots.size(); ++j)
      if ((rs.roots[i] - rs.roots[j]).is_zero()) {
        const Factor& a = c.factors[rs.tags[i].factor];
        const Factor& b = c.factors[rs.tags[j].factor];
        bool exact = rs.tags[i].factor == rs.tags[j].factor || (a.same_shape(b) && a.center == b.center);
        if (!exact) {
          try {
            exact = !is_squarefree(expand_to_integer_poly(c));
          } catch (const Error&) {
          }
        }
        if (exact)
          throw Error(ErrorKind::RootCollision, "curve_input",
                      "roots " + std::to_string(i) + " and " + std::to_string(j) + " coincide (f is not squarefree)");
        throw Error(ErrorKind::PrecisionExhausted, "curve_input",
                    "roots " + std::to_string(i) + " and " + std::to_string(j) + " agree to the working precision");
      }
  return rs;
}

namespace detail {

inline std::vector<int> match_images(const RootSet& rs, const GaloisWord& g, long threshold_units) {
  std::size_t n = rs.size();
  std::vector<int> perm(n, -1);
  std::vector<bool> hit(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    TowerElement img = rs.roots[i].apply(g);
    int found = -1;
    for (std::size_t j = 0; j < n; ++j) {
      TowerElement diff = img - rs.roots[j];
      if (diff.valuation_bound_units() > threshold_units) {
        if (found >= 0)
          throw Error(ErrorKind::AmbiguousMatch, "curve_input",
                      "image of root " + std::to_string(i) + " under " + g.to_string() + " matches several roots");
        found = static_cast<int>(j);
      }
    }
    if (found < 0 || hit[found])
      throw Error(ErrorKind::AmbiguousMatch, "curve_input",
                  "image of root " + std::to_string(i) + " under " + g.to_string() + " is not separated from the roots");
    hit[found] = true;
    perm[i] = found;
  }
  return perm;
}

}  // namespace detail

inline long max_pairwise_valuation_units(const RootSet& rs) {
  long best = LONG_MIN;
  for (std::size_t i = 0; i < rs.size(); ++i)
    for (std::size_t j = i + 1; j < rs.size(); ++j) {
      TowerElement diff = rs.roots[i] - rs.roots[j];
      if (diff.is_zero())
        throw Error(ErrorKind::PrecisionExhausted, "curve_input", "roots not separated at working precision");
      best = std::max(best, diff.valuation_units());
    }
  return best == LONG_MIN ? 0 : best;
}

/// Fills tau_perm and frob_perm and checks phi tau = tau^p phi on the roots.
inline RootSet galois_perms(RootSet rs) {
  long thr = max_pairwise_valuation_units(rs) + 1;
  rs.tau_perm = detail::match_images(rs, GaloisWord::tau(), thr);
  rs.frob_perm = detail::match_images(rs, GaloisWord::frob(), thr);
  const long p = rs.tower->p();
  std::size_t n = rs.size();
  for (std::size_t i = 0; i < n; ++i) {
    int lhs = rs.frob_perm[rs.tau_perm[i]];
    int rhs = rs.frob_perm[i];
    for (long k = 0; k < p % rs.tower->e(); ++k) rhs = rs.tau_perm[rhs];
    if (lhs != rhs)
      throw Error(ErrorKind::InternalError, "curve_input", "root permutations violate the tame relation");
  }
  return rs;
}

/// Everything downstream needs for one curve at one precision.
struct EmbeddedCurve {
  CurveExpr expr;
  TowerShape shape;
  RootSet roots;
};

/// `shape` may enlarge the tower; it must be a multiple of the required one.
inline EmbeddedCurve embed_curve(const CurveExpr& parsed, long p, std::optional<long> prec = std::nullopt,
                                 std::optional<TowerShape> shape = std::nullopt) {
  EmbeddedCurve ec;
  ec.expr = normalize(parsed, p);
  galois_closure_check(ec.expr);
  ec.shape = required_tower(ec.expr);
  if (shape) {
    if (shape->d % ec.shape.d != 0 || shape->e % ec.shape.e != 0)
      throw Error(ErrorKind::InvalidTower, "curve_input", "requested tower does not contain the splitting field");
    ec.shape = *shape;
  }
  long pr = prec.value_or(default_precision(ec.expr, ec.shape.e));
  auto t = Tower::create(p, ec.shape.d, ec.shape.e, pr);
  ec.roots = galois_perms(extract_roots(ec.expr, t));
  return ec;
}

}  // namespace hypsol

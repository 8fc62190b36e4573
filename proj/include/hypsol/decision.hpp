#pragma once

// Conditions (i)-(vi) on the cluster data, the applicability gate and the
// final local solubility verdict.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "hypsol/cluster.hpp"
#include "hypsol/curve.hpp"
#include "hypsol/rational.hpp"

namespace hypsol {

enum class ComponentVerdict { Yes, No };
enum class Status { Soluble, Insoluble, Inapplicable };

inline const char* to_string(ComponentVerdict v) { return v == ComponentVerdict::Yes ? "Yes" : "No"; }
inline const char* to_string(Status s) {
  switch (s) {
    case Status::Soluble: return "Soluble";
    case Status::Insoluble: return "Insoluble";
    case Status::Inapplicable: return "Inapplicable";
  }
  return "?";
}

inline const std::vector<std::string>& condition_ids() {
  static const std::vector<std::string> ids{"i",    "ii.a", "ii.b", "ii.c", "ii.d", "iii",  "iv.a", "iv.b", "iv.c",
                                            "v.a",  "v.b",  "v.c",  "vi.a", "vi.b", "vi.c", "vi.d", "vi.e", "vi.f"};
  return ids;
}

struct ConditionReport {
  std::string id;
  bool evaluated = true;  // false for (v), (vi) when the top cluster is principal
  bool satisfied = false;
  std::vector<int> witnesses;            // cluster nodes of the first satisfying instance
  std::vector<std::string> quantities;   // one line per instance examined
  bool convention = false;               // the outcome depended on a convention value
  std::vector<std::string> conventions;  // of the satisfying instance, else of every instance
};

/// Convention switches for the undefined or ambiguous ingredients.
struct DecisionOptions {
  ClusterOptions clusters;
  bool require_singleton_for_iid = true;  // (ii)(d) needs at least one child of size 1
  // Derived reading: (ii)(c), (iv)(c), (v)(c) test whether the tail points they
  // describe are K-rational, and (vi)(b) also requires nu_R even.
  bool amended = false;
};

struct GateReport {
  bool p_odd = true;
  bool tame = true;
  bool hasse_weil = true;
  long q = 0;
  int genus = 0;
  std::vector<std::string> reasons;
  bool applicable() const { return p_odd && tame && hasse_weil; }
};

struct TheoremResult {
  ComponentVerdict component = ComponentVerdict::No;
  std::vector<ConditionReport> conditions;
  std::optional<std::string> fired;  // first satisfied condition in statement order
  std::vector<std::string> convention_markers;
};

struct SolubilityVerdict {
  Status status = Status::Inapplicable;
  ComponentVerdict component = ComponentVerdict::No;
  GateReport gate;
  TheoremResult theorem;
  bool odd_degree = false;
  bool odd_degree_consistent = true;
  long prec = 0;
  bool rechecked = false;
};

inline GateReport corollary_gate(long p, long q, int genus, bool tame) {
  GateReport g;
  g.q = q;
  g.genus = genus;
  g.p_odd = p > 2 && is_prime(p);
  g.tame = tame;
  long bound = 2L * (static_cast<long>(genus) * genus - 1);
  g.hasse_weil = q > bound;
  if (!g.p_odd) g.reasons.push_back("p = " + std::to_string(p) + " is not an odd prime");
  if (!g.tame) g.reasons.push_back("p divides e_s for some proper cluster");
  if (!g.hasse_weil) g.reasons.push_back("q = " + std::to_string(q) + " <= 2(g^2 - 1) = " + std::to_string(bound));
  return g;
}

/// p does not divide e_s for any proper cluster.
inline bool clusters_tame(const ClusterAnalysis& ca) {
  long p = ca.roots.tower->p();
  for (int id : ca.picture.proper_nodes())
    if (ca.at(id).e_s % p == 0) return false;
  return true;
}

namespace detail {

inline std::string show_interval(const Rational& a, const Rational& b) {
  return "[" + to_string(a) + ", " + to_string(b) + "]";
}

// Convention names carried in reports.
inline constexpr const char* kConvVc = "v_K(c_s) = nu_s - |s| d_s";
inline constexpr const char* kConvStar = "s* = child of size 2g";
inline constexpr const char* kConvFrob = "Frobenius lift phi(pi) = pi";
inline constexpr const char* kConvLambdaTop = "lambda of a non-principal top cluster";
inline constexpr const char* kConvCotwin = "cotwin reading of (v)";
inline constexpr const char* kConvAmended = "amended reading";
inline constexpr const char* kConvStabiliser = "epsilon of a cluster not fixed by G_K, on its stabiliser";

class TheoremEvaluator {
 public:
  TheoremEvaluator(const ClusterAnalysis& ca, const DecisionOptions& opt) : ca_(ca), opt_(opt), pic_(ca.picture) {}

  TheoremResult run() {
    TheoremResult res;
    const bool top_principal = ca_.at(0).principal;
    res.conditions.push_back(cond_i());
    for (char c : {'a', 'b', 'c', 'd'}) res.conditions.push_back(cond_ii(c));
    res.conditions.push_back(cond_iii());
    for (char c : {'a', 'b', 'c'}) res.conditions.push_back(cond_iv(c));
    for (char c : {'a', 'b', 'c'}) res.conditions.push_back(top_principal ? skipped("v." + std::string(1, c)) : cond_v(c));
    for (char c : {'a', 'b', 'c', 'd', 'e', 'f'})
      res.conditions.push_back(top_principal ? skipped("vi." + std::string(1, c)) : cond_vi(c));
    for (const auto& r : res.conditions)
      if (r.satisfied && !res.fired) res.fired = r.id;
    res.component = res.fired ? ComponentVerdict::Yes : ComponentVerdict::No;
    for (const auto& r : res.conditions) {
      if (!r.evaluated || (res.fired && r.id != *res.fired)) continue;
      for (const auto& c : r.conventions) res.convention_markers.push_back(r.id + ": " + c);
    }
    return res;
  }

 private:
  struct Instance {
    bool ok = false;
    std::vector<int> witnesses;
    std::string text;
    std::vector<std::string> conv;
    void use(const char* c) {
      if (std::find(conv.begin(), conv.end(), c) == conv.end()) conv.emplace_back(c);
    }
  };

  static ConditionReport skipped(const std::string& id) {
    ConditionReport r;
    r.id = id;
    r.evaluated = false;
    r.quantities.push_back("top cluster is principal");
    return r;
  }

  static void note(ConditionReport& r, const Instance& in) {
    std::string q = in.text;
    if (!in.conv.empty()) {
      q += " [convention:";
      for (const auto& c : in.conv) q += " " + c + ";";
      q.back() = ']';
    }
    r.quantities.push_back(q);
    if (in.ok && !r.satisfied) {
      r.satisfied = true;
      r.witnesses = in.witnesses;
      r.conventions = in.conv;
    } else if (!r.satisfied) {
      for (const auto& c : in.conv)
        if (std::find(r.conventions.begin(), r.conventions.end(), c) == r.conventions.end()) r.conventions.push_back(c);
    }
    r.convention = !r.conventions.empty();
  }

  const ClusterInfo& in(int id) const { return ca_.at(id); }
  bool fixed(int id) const { return ca_.fixed(id); }
  const EpsilonData& eps(int id) const { return ca_.eps[id]; }
  std::string name(int id) const { return "node" + std::to_string(id); }

  std::string eps_text(int id) const {
    const auto& e = eps(id);
    std::string s = "eps_" + name(id) + ": trivial=" + (e.trivial ? "1" : "0") +
                    " inertia=" + std::to_string(e.on_inertia);
    if (e.on_frob) s += " frob=" + std::to_string(*e.on_frob);
    return s;
  }

  // epsilon_s is read through theta_{s*}
  void used_eps(Instance& x, int id) const {
    if (eps(id).defined && in(id).star != id) x.use(kConvStar);
  }

  // epsilon(Frob) only depends on the lift when epsilon is nontrivial on inertia
  std::optional<int> eps_frob(Instance& x, int id) const {
    used_eps(x, id);
    if (eps(id).on_inertia == -1) x.use(kConvFrob);
    return eps(id).on_frob;
  }

  TowerElement centre(int id) const {
    const auto& rs = ca_.roots;
    const auto& nd = pic_.nodes[id];
    TowerElement z = TowerElement::zero(rs.tower);
    for (int r : nd.roots) z = z + rs.roots[r];
    return z / TowerElement::from_integer(rs.tower, static_cast<long>(nd.roots.size()));
  }

  TowerElement f_at(const TowerElement& z) const {
    TowerElement v = ca_.roots.leading;
    for (const auto& r : ca_.roots.roots) v = v * (z - r);
    return v;
  }

  // a in K^x is a square in K
  bool k_square(const TowerElement& a) const {
    const Tower& t = *ca_.roots.tower;
    if (a.is_zero()) return false;
    long k = a.valuation_units();
    if (k % (2L * t.e()) != 0) return false;
    const auto& F = t.residue_field();
    return F.pow(a.residue(), (t.p() - 1) / 2) == F.one();
  }

  // The two points of P^1 exchanged by inertia on a crossed tail, given by two
  // K-conjugate or K-rational points a, b at depth d from each other.
  bool crosses_rational(int a_leaf, int b_leaf, const std::optional<TowerElement>& mid, const Rational& d) const {
    if (is_integer(d)) return b_leaf < 0 ? fixed(a_leaf) : fixed(a_leaf) && fixed(b_leaf);
    return mid && k_square(f_at(*mid));
  }

  std::vector<int> principal_fixed() const {
    std::vector<int> out;
    for (int id : pic_.proper_nodes())
      if (in(id).principal && fixed(id)) out.push_back(id);
    return out;
  }

  // (i)
  ConditionReport cond_i() const {
    ConditionReport r;
    r.id = "i";
    for (int s : principal_fixed()) {
      const auto& c = in(s);
      Instance x;
      x.witnesses = {s};
      x.text = name(s) + " e=" + std::to_string(c.e_s);
      if (c.ubereven) {
        x.text += " uebereven " + eps_text(s);
        used_eps(x, s);
      }
      x.ok = c.e_s == 1 && (!c.ubereven || eps(s).trivial);
      note(r, x);
    }
    return r;
  }

  // (ii)(x)
  ConditionReport cond_ii(char sub) const {
    ConditionReport r;
    r.id = std::string("ii.") + sub;
    for (int s : principal_fixed()) {
      const auto& c = in(s);
      if (c.e_s <= 1) continue;
      Instance x;
      x.witnesses = {s};
      x.text = name(s) + " e=" + std::to_string(c.e_s);
      if (c.ubereven) {
        used_eps(x, s);
        x.text += " uebereven " + eps_text(s);
        if (!eps(s).trivial) {
          note(r, x);
          continue;
        }
      }
      const auto& nd = pic_.nodes[s];
      const auto& stable = ca_.galois[s].stable_children;
      switch (sub) {
        case 'a': {
          if (s != 0) continue;
          if (c.even) used_eps(x, s);
          x.ok = !c.even || eps(s).trivial;
          x.text += c.even ? " even " + eps_text(s) : " odd";
          break;
        }
        case 'b': {
          bool stable_singleton = false, stable_proper_odd = false;
          for (int ch : stable) {
            if (pic_.nodes[ch].size() == 1) stable_singleton = true;
            if (pic_.nodes[ch].proper() && pic_.nodes[ch].size() % 2 == 1) stable_proper_odd = true;
          }
          x.ok = stable_singleton || (c.genus == 0 && !c.ubereven && !stable_proper_odd);
          x.text += " stable_singleton=" + std::to_string(stable_singleton) + " g=" + std::to_string(c.genus) +
                    " stable_proper_odd=" + std::to_string(stable_proper_odd);
          break;
        }
        case 'c': {
          bool stable_proper = false;
          for (int ch : stable) stable_proper = stable_proper || pic_.nodes[ch].proper();
          x.text += " stable_proper_child=" + std::to_string(stable_proper) + " lambda=" + to_string(c.lambda) +
                    " g=" + std::to_string(c.genus);
          if (!stable_proper && is_integer(c.lambda) && (c.genus > 0 || c.ubereven)) {
            if (opt_.amended) {
              x.use(kConvAmended);
              x.ok = k_square(f_at(centre(s)));
              x.text += " f(z_s) square=" + std::to_string(x.ok);
            } else {
              x.use(kConvVc);
              x.text += " v(c_s)=" + to_string(c.vc);
              x.ok = is_even_integer(c.vc);
            }
          }
          break;
        }
        case 'd': {
          int singles = 0;
          bool all_fixed = true;
          for (int ch : nd.children)
            if (pic_.nodes[ch].size() == 1) {
              ++singles;
              all_fixed = all_fixed && fixed(ch);
            }
          x.ok = all_fixed && (singles > 0 || !opt_.require_singleton_for_iid);
          x.text += " singletons=" + std::to_string(singles) + " all_fixed=" + std::to_string(all_fixed);
          break;
        }
      }
      note(r, x);
    }
    return r;
  }

  // (iii)
  ConditionReport cond_iii() const {
    ConditionReport r;
    r.id = "iii";
    for (int s : principal_fixed())
      for (int sp : pic_.nodes[s].children) {
        if (!pic_.nodes[sp].proper() || !in(sp).principal || !fixed(sp)) continue;
        const auto& cs = in(s);
        const auto& cp = in(sp);
        Instance x;
        x.witnesses = {sp, s};
        x.text = name(sp) + " < " + name(s);
        if (!cp.even) {
          Rational lo = -cs.lambda - cp.delta / 2, hi = -cs.lambda;
          x.ok = interval_has_integer(lo, hi);
          x.text += " odd interval " + show_interval(lo, hi);
        } else {
          Rational lo = -cp.depth, hi = -cs.depth;
          used_eps(x, sp);
          x.ok = eps(sp).trivial && interval_has_integer(lo, hi);
          x.text += " even " + eps_text(sp) + " interval " + show_interval(lo, hi);
        }
        note(r, x);
      }
    return r;
  }

  // (iv)(x)
  ConditionReport cond_iv(char sub) const {
    ConditionReport r;
    r.id = std::string("iv.") + sub;
    for (int t : pic_.proper_nodes()) {
      const auto& c = in(t);
      if (!c.twin || !fixed(t)) continue;
      const auto& e = eps(t);
      Instance x;
      x.witnesses = {t};
      x.text = name(t) + " " + eps_text(t);
      used_eps(x, t);
      switch (sub) {
        case 'a': {
          Rational lo = -c.depth, hi = -*pic_.nodes[pic_.nodes[t].parent].depth;
          x.ok = e.trivial && interval_has_integer(lo, hi);
          x.text += " interval " + show_interval(lo, hi);
          break;
        }
        case 'b':
          x.ok = e.on_inertia == 1 && e.on_frob == -1 && is_integer(c.depth) && is_even_integer(c.nu);
          x.text += " d=" + to_string(c.depth) + " nu=" + to_string(c.nu);
          break;
        case 'c':
          if (e.on_inertia == -1 && opt_.amended) {
            x.use(kConvAmended);
            const auto& ch = pic_.nodes[t].children;
            x.ok = crosses_rational(ch[0], ch[1], centre(t), c.depth);
            x.text += " crosses rational=" + std::to_string(x.ok);
          } else if (e.on_inertia == -1) {
            x.use(kConvVc);
            x.ok = is_even_integer(c.vc);
            x.text += " v(c_t)=" + to_string(c.vc);
          }
          break;
      }
      note(r, x);
    }
    return r;
  }

  // (v)(x): the cotwin t with its child s of size 2g.
  ConditionReport cond_v(char sub) const {
    ConditionReport r;
    r.id = std::string("v.") + sub;
    for (int t : pic_.proper_nodes()) {
      const auto& c = in(t);
      if (!c.cotwin || !fixed(t)) continue;
      int s = -1;
      for (int ch : pic_.nodes[t].children)
        if (static_cast<int>(pic_.nodes[ch].size()) == 2 * ca_.curve_genus) s = ch;
      if (s < 0) continue;
      const auto& e = eps(t);
      Instance x;
      x.witnesses = {t, s};
      x.text = name(t) + " cotwin, child " + name(s) + " " + eps_text(t);
      x.use(kConvCotwin);
      used_eps(x, t);
      switch (sub) {
        case 'a': {
          Rational lo = -in(s).depth, hi = -c.depth;
          x.ok = e.trivial && interval_has_integer(lo, hi);
          x.text += " interval " + show_interval(lo, hi);
          break;
        }
        case 'b':
          x.ok = e.on_inertia == 1 && e.on_frob == -1 && is_integer(c.depth) && is_even_integer(c.nu);
          x.text += " d=" + to_string(c.depth) + " nu=" + to_string(c.nu);
          break;
        case 'c':
          if (e.on_inertia == -1 && opt_.amended) {
            x.use(kConvAmended);
            x.ok = cotwin_crosses_rational(t, s);
            x.text += " crosses rational=" + std::to_string(x.ok);
          } else {
            x.ok = e.on_inertia == -1 && eps_frob(x, t) == 1;
          }
          break;
      }
      note(r, x);
    }
    return r;
  }

  // The points outside s act as a twin after inverting about z_s.
  bool cotwin_crosses_rational(int t, int s) const {
    std::vector<int> out;
    for (int ch : pic_.nodes[t].children)
      if (ch != s) out.push_back(ch);
    const auto& rs = ca_.roots;
    TowerElement z = centre(s);
    TowerElement w = TowerElement::zero(rs.tower);
    for (int ch : out) w = w + (rs.roots[pic_.nodes[ch].roots.front()] - z).inverse();
    std::optional<TowerElement> mid;
    if (!w.is_zero()) mid = z + TowerElement::from_integer(rs.tower, 2L) / w;
    return crosses_rational(out[0], out.size() > 1 ? out[1] : -1, mid, in(t).depth);
  }

  // (vi)(x), s1 ranging over both children of the top cluster.
  ConditionReport cond_vi(char sub) const {
    ConditionReport r;
    r.id = std::string("vi.") + sub;
    const auto& top = pic_.nodes[0];
    if (top.children.size() != 2) {
      r.quantities = {"top cluster does not have exactly two children"};
      return r;
    }
    const auto& R = in(0);
    for (int k = 0; k < 2; ++k) {
      int s1 = top.children[k], s2 = top.children[1 - k];
      const auto& g1 = ca_.galois[s1];
      const bool odd = pic_.nodes[s1].size() % 2 == 1;
      const bool proper = pic_.nodes[s1].proper();
      const bool gk_fixed = fixed(s1);
      const bool inertia_not_frob = g1.fixed_by_inertia && g1.frob_image == s2;
      const bool inertia_swaps = g1.tau_image == s2;
      Instance x;
      x.witnesses = {s1, s2};
      x.text = "s1=" + name(s1);
      auto top_frob = [&]() -> std::optional<int> {
        if (!eps(0).defined) return std::nullopt;
        return eps_frob(x, 0);
      };
      auto show = [](std::optional<int> v) { return v ? std::to_string(*v) : std::string("undefined"); };
      auto s1_trivial = [&]() {
        if (!proper || !eps(s1).defined) return false;
        used_eps(x, s1);
        if (!gk_fixed) x.use(kConvStabiliser);
        return eps(s1).trivial;
      };
      switch (sub) {
        case 'a': {
          if (!odd || !gk_fixed) continue;
          if (!proper) {
            x.text += " singleton";
            break;
          }
          Rational lo = -R.lambda - in(s1).delta / 2, hi = -R.lambda;
          x.ok = interval_has_integer(lo, hi);
          x.text += " interval " + show_interval(lo, hi);
          x.use(kConvLambdaTop);
          break;
        }
        case 'b':
          if (!odd || !inertia_not_frob) continue;
          x.ok = is_integer(R.depth);
          x.text += " d_R=" + to_string(R.depth);
          if (opt_.amended) {
            x.use(kConvAmended);
            x.ok = x.ok && is_even_integer(R.nu);
            x.text += " nu_R=" + to_string(R.nu);
          }
          break;
        case 'c': {
          if (!odd || !inertia_swaps) continue;
          auto f = top_frob();
          x.ok = f == 1;
          x.text += " eps_R(frob)=" + show(f);
          break;
        }
        case 'd': {
          if (odd || !gk_fixed) continue;
          Rational lo = -in(s1).depth, hi = -R.depth;
          x.ok = s1_trivial() && interval_has_integer(lo, hi);
          x.text += " " + eps_text(s1) + " interval " + show_interval(lo, hi);
          break;
        }
        case 'e':
          if (odd || !inertia_not_frob) continue;
          x.ok = s1_trivial() && is_integer(R.depth);
          x.text += " " + eps_text(s1) + " d_R=" + to_string(R.depth);
          break;
        case 'f': {
          if (odd || !inertia_swaps) continue;
          x.ok = s1_trivial();
          std::optional<int> f;
          if (x.ok) {
            f = top_frob();
            x.ok = f == 1;
          }
          x.text += " " + eps_text(s1) + " eps_R(frob)=" + show(f);
          break;
        }
      }
      note(r, x);
    }
    return r;
  }

  const ClusterAnalysis& ca_;
  const DecisionOptions& opt_;
  const ClusterPicture& pic_;
};

}  // namespace detail

inline TheoremResult theorem_decide(const ClusterAnalysis& ca, const DecisionOptions& opt = {}) {
  return detail::TheoremEvaluator(ca, opt).run();
}

/// Everything computed for one curve at one precision.
struct Analysis {
  EmbeddedCurve curve;
  ClusterAnalysis clusters;
  SolubilityVerdict verdict;
};

inline Analysis analyse_at(const CurveExpr& parsed, long p, std::optional<long> prec, const DecisionOptions& opt) {
  Analysis a;
  a.curve = embed_curve(parsed, p, prec);
  a.clusters = analyse_clusters(a.curve, opt.clusters);
  auto& v = a.verdict;
  v.prec = a.curve.roots.tower->prec();
  v.theorem = theorem_decide(a.clusters, opt);
  v.component = v.theorem.component;
  v.gate = corollary_gate(p, p, a.clusters.curve_genus, clusters_tame(a.clusters));
  v.odd_degree = a.curve.expr.degree() % 2 == 1;
  v.odd_degree_consistent = !v.odd_degree || !v.gate.applicable() || v.component == ComponentVerdict::Yes;
  if (!v.gate.applicable())
    v.status = Status::Inapplicable;
  else if (v.component == ComponentVerdict::Yes || v.odd_degree)
    v.status = Status::Soluble;
  else
    v.status = Status::Insoluble;
  return a;
}

inline bool same_decision(const SolubilityVerdict& a, const SolubilityVerdict& b) {
  if (a.status != b.status || a.component != b.component) return false;
  if (a.theorem.conditions.size() != b.theorem.conditions.size()) return false;
  for (std::size_t i = 0; i < a.theorem.conditions.size(); ++i)
    if (a.theorem.conditions[i].satisfied != b.theorem.conditions[i].satisfied) return false;
  return true;
}

/// Gate plus theorem; recomputed at twice the precision, which must agree.
inline Analysis solubility_decide(const CurveExpr& parsed, long p, std::optional<long> prec = std::nullopt,
                                  const DecisionOptions& opt = {}) {
  Analysis first = analyse_at(parsed, p, prec, opt);
  Analysis second = analyse_at(parsed, p, 2 * first.verdict.prec, opt);
  if (!same_decision(first.verdict, second.verdict))
    throw Error(ErrorKind::PrecisionExhausted, "decision",
                "verdict changed between precision " + std::to_string(first.verdict.prec) + " and " +
                    std::to_string(second.verdict.prec));
  first.verdict.rechecked = true;
  return first;
}

}  // namespace hypsol

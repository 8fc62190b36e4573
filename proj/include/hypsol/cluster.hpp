#pragma once

// Cluster picture of the roots, cluster invariants, the Galois action on
// clusters and the characters epsilon_s.

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "hypsol/curve.hpp"
#include "hypsol/error.hpp"
#include "hypsol/rational.hpp"
#include "hypsol/tame_field.hpp"

namespace hypsol {

struct ClusterNode {
  std::vector<int> roots;          // sorted root indices
  std::optional<Rational> depth;   // nullopt for singletons
  int parent = -1;
  std::vector<int> children;       // ordered by smallest root

  std::size_t size() const { return roots.size(); }
  bool proper() const { return roots.size() > 1; }
};

struct ClusterPicture {
  std::vector<ClusterNode> nodes;  // preorder, node 0 is the top cluster
  std::vector<int> leaf;           // singleton node of each root
  std::vector<std::vector<Rational>> val;  // pairwise valuations, diagonal unused

  const ClusterNode& top() const { return nodes.front(); }
  std::size_t root_count() const { return leaf.size(); }

  int find(const std::vector<int>& sorted_roots) const {
    auto it = index_.find(sorted_roots);
    return it == index_.end() ? -1 : it->second;
  }

  void reindex() {
    index_.clear();
    for (std::size_t i = 0; i < nodes.size(); ++i) index_[nodes[i].roots] = static_cast<int>(i);
  }

  std::vector<int> proper_nodes() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i].proper()) out.push_back(static_cast<int>(i));
    return out;
  }

 private:
  std::map<std::vector<int>, int> index_;
};

namespace detail {

inline int add_subtree(ClusterPicture& pic, std::vector<int> roots, int parent) {
  int id = static_cast<int>(pic.nodes.size());
  pic.nodes.push_back({});
  pic.nodes[id].roots = roots;
  pic.nodes[id].parent = parent;
  if (roots.size() == 1) {
    pic.leaf[roots[0]] = id;
    return id;
  }
  Rational d = pic.val[roots[0]][roots[1]];
  for (std::size_t i = 0; i < roots.size(); ++i)
    for (std::size_t j = i + 1; j < roots.size(); ++j) d = std::min(d, pic.val[roots[i]][roots[j]]);
  pic.nodes[id].depth = d;
  // children: classes of the relation v(r - r') > d
  std::vector<bool> used(roots.size(), false);
  std::vector<std::vector<int>> classes;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    std::vector<int> cls{roots[i]};
    used[i] = true;
    for (std::size_t j = i + 1; j < roots.size(); ++j)
      if (!used[j] && pic.val[roots[i]][roots[j]] > d) {
        cls.push_back(roots[j]);
        used[j] = true;
      }
    for (std::size_t a = 0; a < cls.size(); ++a)
      for (std::size_t b = a + 1; b < cls.size(); ++b)
        if (!(pic.val[cls[a]][cls[b]] > d))
          throw Error(ErrorKind::InternalError, "cluster_core", "pairwise valuations are not ultrametric");
    classes.push_back(std::move(cls));
  }
  for (auto& cls : classes) {
    int child = add_subtree(pic, cls, id);
    pic.nodes[id].children.push_back(child);
  }
  return id;
}

}  // namespace detail

/// Tree of clusters from the pairwise valuations of the roots.
inline ClusterPicture build_picture(const RootSet& rs) {
  std::size_t n = rs.size();
  if (n < 2) throw Error(ErrorKind::InternalError, "cluster_core", "too few roots");
  ClusterPicture pic;
  pic.leaf.assign(n, -1);
  pic.val.assign(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      TowerElement diff = rs.roots[i] - rs.roots[j];
      if (diff.is_zero())
        throw Error(ErrorKind::PrecisionExhausted, "cluster_core",
                    "roots " + std::to_string(i) + " and " + std::to_string(j) + " not separated at working precision");
      pic.val[i][j] = pic.val[j][i] = *diff.valuation();
    }
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  detail::add_subtree(pic, all, -1);
  pic.reindex();
  return pic;
}

/// Nested text form {d=<depth> child ...} with leaves r1, r2, ...
inline std::string serialize(const ClusterPicture& pic, int node = 0) {
  const auto& nd = pic.nodes[node];
  if (!nd.proper()) return "r" + std::to_string(nd.roots[0] + 1);
  std::string s = "{d=" + to_string(*nd.depth);
  for (int c : nd.children) s += " " + serialize(pic, c);
  return s + "}";
}

enum class StarConvention {
  ChildOfSize2g,       // s* = s, or the child of size 2g when s is a cotwin
  NonUberevenParent,   // smallest s* containing s whose parent is not uebereven
};

inline const char* to_string(StarConvention c) {
  return c == StarConvention::ChildOfSize2g ? "star=child-of-size-2g" : "star=non-uebereven-parent";
}

struct ClusterOptions {
  StarConvention star = StarConvention::ChildOfSize2g;
};

struct ClusterInfo {
  int node = -1;
  int size = 0;
  Rational depth, delta, nu, lambda, vc;
  int e_s = 1;
  int genus = 0;
  int odd_children = 0;
  bool even = false, ubereven = false, twin = false, cotwin = false, principal = false;
  int star = -1;  // node used for theta when the character is defined
};

/// epsilon_s on the stabiliser of s. Values are +1 / -1.
struct EpsilonData {
  bool defined = false;
  long radicand_val_units = 0;   // k with D = pi^k u
  ResidueField::Elt radicand_residue = 0;
  int inertia_step = 0;          // smallest a > 0 with tau^a s = s
  int on_inertia = 1;            // epsilon(tau^inertia_step)
  std::optional<int> on_frob;    // epsilon(phi) when phi fixes s
  bool trivial = true;           // trivial on the whole stabiliser
  std::vector<std::pair<GaloisWord, int>> generator_values;
};

struct ClusterGalois {
  int tau_image = -1, frob_image = -1;
  bool fixed_by_inertia = false, fixed_by_frob = false;
  int orbit = -1;
  std::vector<GaloisWord> stabiliser;  // finite words tau^a phi^b, a < e, b < d
  std::vector<int> stable_children;
};

struct ClusterAnalysis {
  RootSet roots;
  ClusterPicture picture;
  int curve_genus = 0;
  Rational v_cf;
  ClusterOptions options;
  std::vector<std::optional<ClusterInfo>> info;  // per node, set for proper clusters
  std::vector<ClusterGalois> galois;             // per node
  std::vector<EpsilonData> eps;                  // per node

  const ClusterInfo& at(int node) const { return *info[node]; }
  bool fixed(int node) const { return galois[node].fixed_by_inertia && galois[node].fixed_by_frob; }
};

/// nu_s = v(c_f) + sum_r min(d_s, v(z - r)) with z the root at position `centre` of s.
inline Rational nu_with_centre(const ClusterPicture& pic, const Rational& v_cf, int node, int centre) {
  const auto& nd = pic.nodes[node];
  Rational d = *nd.depth;
  Rational s = v_cf;
  for (std::size_t r = 0; r < pic.root_count(); ++r) {
    if (static_cast<int>(r) == centre)
      s += d;
    else
      s += std::min(d, pic.val[centre][r]);
  }
  return s;
}

inline int e_of(const Rational& d, const Rational& nu) {
  for (int e = 1;; ++e) {
    Rational a = d * e, b = nu * e;
    if (is_integer(a) && is_even_integer(b)) return e;
  }
}

namespace detail {

inline std::vector<int> compose_perm(const std::vector<int>& outer, const std::vector<int>& inner) {
  std::vector<int> r(inner.size());
  for (std::size_t i = 0; i < inner.size(); ++i) r[i] = outer[inner[i]];
  return r;
}

inline std::vector<int> perm_power(const std::vector<int>& p, long k) {
  std::vector<int> r(p.size());
  std::iota(r.begin(), r.end(), 0);
  for (long i = 0; i < k; ++i) r = compose_perm(p, r);
  return r;
}

inline int image_node(const ClusterPicture& pic, int node, const std::vector<int>& perm) {
  std::vector<int> img;
  for (int r : pic.nodes[node].roots) img.push_back(perm[r]);
  std::sort(img.begin(), img.end());
  int id = pic.find(img);
  if (id < 0) throw Error(ErrorKind::InternalError, "cluster_core", "Galois image of a cluster is not a cluster");
  return id;
}

}  // namespace detail

/// Root permutation of tau^a phi^b (phi applied first).
inline std::vector<int> word_perm(const RootSet& rs, const GaloisWord& w) {
  return detail::compose_perm(detail::perm_power(rs.tau_perm, w.tau_exp), detail::perm_power(rs.frob_perm, w.frob_exp));
}

inline int star_of(const ClusterAnalysis& ca, int node) {
  const auto& pic = ca.picture;
  const auto& in = *ca.info[node];
  if (ca.options.star == StarConvention::ChildOfSize2g) {
    if (in.cotwin)
      for (int c : pic.nodes[node].children)
        if (static_cast<int>(pic.nodes[c].size()) == 2 * ca.curve_genus) return c;
    return node;
  }
  int c = node;
  while (pic.nodes[c].parent >= 0 && ca.info[pic.nodes[c].parent]->ubereven) c = pic.nodes[c].parent;
  return c;
}

/// Primitive 2e-th root xi of unity in F_q with xi^2 = zeta_e, when one exists.
inline std::optional<ResidueField::Elt> half_zeta(const Tower& t) {
  const auto& F = t.residue_field();
  auto z = t.zeta_e_residue();
  int e = t.e();
  if (e % 2 == 1) return F.neg(F.pow(z, (e + 1) / 2));
  return F.sqrt(z);
}

/// theta radicand c_f prod_{r not in s}(z_s - r), z_s the first root of s.
inline TowerElement radicand(const ClusterAnalysis& ca, int node) {
  const auto& rs = ca.roots;
  const auto& nd = ca.picture.nodes[node];
  int z = nd.roots.front();
  TowerElement D = rs.leading;
  std::vector<bool> inside(rs.size(), false);
  for (int r : nd.roots) inside[r] = true;
  for (std::size_t r = 0; r < rs.size(); ++r)
    if (!inside[r]) D = D * (rs.roots[z] - rs.roots[r]);
  return D;
}

/// epsilon(tau^a phi^b) = xi^{a k} * ubar^{(p^b - 1)/2} for D = pi^k u.
inline int epsilon_by_residues(const Tower& t, long k, ResidueField::Elt ubar, const GaloisWord& w) {
  const auto& F = t.residue_field();
  long n = w.tau_exp * k;
  long pb = 1;
  for (long i = 0; i < w.frob_exp; ++i) pb *= t.p();
  ResidueField::Elt val = F.pow(ubar, (pb - 1) / 2);
  long ee = t.e();
  auto z = t.zeta_e_residue();
  long nm = mod_floor(n, 2 * ee);
  if (nm % 2 == 0) {
    val = F.mul(val, F.pow(z, nm / 2));
  } else {
    auto xi = half_zeta(t);
    if (!xi)
      throw Error(ErrorKind::InternalError, "cluster_core",
                  "character value needs a square root of zeta_e outside the residue field");
    val = F.mul(val, F.pow(*xi, nm));
  }
  if (val == F.one()) return 1;
  if (val == F.neg(F.one())) return -1;
  throw Error(ErrorKind::InternalError, "cluster_core",
              "character value " + F.to_string(val) + " is not +-1 for " + w.to_string());
}

/// Same value computed in L from sigma(theta)/theta when sqrt(u) lies in L; nullopt otherwise.
inline std::optional<int> epsilon_in_tower(const TowerElement& D, const GaloisWord& w, bool flip_sign = false) {
  const auto& t = *D.tower();
  const auto& F = t.residue_field();
  long k = D.valuation_units();
  TowerElement u = D * TowerElement::pi_power(D.tower(), -k);
  if (!u.is_square()) return std::nullopt;
  TowerElement theta = u.sqrt() * TowerElement::pi_power(D.tower(), k >= 0 ? k / 2 : -((-k + 1) / 2));
  if (flip_sign) theta = -theta;
  long kodd = mod_floor(k, 2);
  auto ratio = (theta.apply(w) / theta).residue();
  if (kodd) {
    long a = w.tau_exp;
    if (mod_floor(a, 2 * t.e()) % 2 == 0) {
      ratio = F.mul(ratio, F.pow(t.zeta_e_residue(), mod_floor(a, 2 * t.e()) / 2));
    } else {
      auto xi = half_zeta(t);
      if (!xi) return std::nullopt;
      ratio = F.mul(ratio, F.pow(*xi, mod_floor(a, 2 * t.e())));
    }
  }
  if (ratio == F.one()) return 1;
  if (ratio == F.neg(F.one())) return -1;
  throw Error(ErrorKind::InternalError, "cluster_core", "tower character value is not +-1 for " + w.to_string());
}

namespace detail {

inline void compute_info(ClusterAnalysis& ca) {
  const auto& pic = ca.picture;
  ca.info.assign(pic.nodes.size(), std::nullopt);
  const int g = ca.curve_genus;
  for (int id : pic.proper_nodes()) {
    const auto& nd = pic.nodes[id];
    ClusterInfo in;
    in.node = id;
    in.size = static_cast<int>(nd.size());
    in.depth = *nd.depth;
    in.delta = nd.parent >= 0 ? in.depth - *pic.nodes[nd.parent].depth : in.depth;
    in.nu = nu_with_centre(pic, ca.v_cf, id, nd.roots.front());
    long half_sizes = 0;
    bool all_even = true;
    bool child_2g = false;
    int child_2g_id = -1;
    for (int c : nd.children) {
      long sz = static_cast<long>(pic.nodes[c].size());
      half_sizes += sz / 2;
      if (sz % 2) {
        ++in.odd_children;
        all_even = false;
      }
      if (sz == 2L * g) {
        child_2g = true;
        child_2g_id = c;
      }
    }
    in.lambda = in.nu / 2 - in.depth * Rational(half_sizes);
    in.vc = in.nu - in.depth * Rational(in.size);
    in.e_s = e_of(in.depth, in.nu);
    in.genus = in.odd_children > 0 ? (in.odd_children - 1) / 2 : 0;
    in.even = in.size % 2 == 0;
    in.ubereven = all_even;
    in.twin = in.size == 2;
    bool top_two = nd.parent < 0 && in.even && nd.children.size() == 2;
    in.principal = in.size >= 3 && !top_two && !child_2g;
    if (child_2g) {
      std::vector<int> rest;
      std::set_difference(nd.roots.begin(), nd.roots.end(), pic.nodes[child_2g_id].roots.begin(),
                          pic.nodes[child_2g_id].roots.end(), std::back_inserter(rest));
      int rest_node = pic.find(rest);
      bool rest_twin = rest.size() == 2 && rest_node >= 0;
      in.cotwin = !rest_twin;
    }
    ca.info[id] = in;
  }
}

inline void compute_galois(ClusterAnalysis& ca) {
  const auto& pic = ca.picture;
  const auto& rs = ca.roots;
  const int e = rs.tower->e(), d = rs.tower->d();
  std::size_t n = pic.nodes.size();
  ca.galois.assign(n, {});
  std::vector<std::pair<GaloisWord, std::vector<int>>> words;
  for (int a = 0; a < e; ++a)
    for (int b = 0; b < d; ++b) {
      GaloisWord w{a, b};
      words.emplace_back(w, word_perm(rs, w));
    }
  for (std::size_t id = 0; id < n; ++id) {
    auto& gd = ca.galois[id];
    gd.tau_image = image_node(pic, static_cast<int>(id), rs.tau_perm);
    gd.frob_image = image_node(pic, static_cast<int>(id), rs.frob_perm);
    gd.fixed_by_inertia = gd.tau_image == static_cast<int>(id);
    gd.fixed_by_frob = gd.frob_image == static_cast<int>(id);
    for (const auto& [w, perm] : words)
      if (image_node(pic, static_cast<int>(id), perm) == static_cast<int>(id)) gd.stabiliser.push_back(w);
    for (int c : pic.nodes[id].children) {
      bool stable = true;
      for (const auto& w : gd.stabiliser) stable = stable && image_node(pic, c, word_perm(rs, w)) == c;
      if (stable) gd.stable_children.push_back(c);
    }
  }
  int next = 0;
  for (std::size_t id = 0; id < n; ++id) {
    if (ca.galois[id].orbit >= 0) continue;
    std::vector<int> stack{static_cast<int>(id)};
    ca.galois[id].orbit = next;
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      for (int y : {ca.galois[x].tau_image, ca.galois[x].frob_image})
        if (ca.galois[y].orbit < 0) {
          ca.galois[y].orbit = next;
          stack.push_back(y);
        }
    }
    ++next;
  }
}

inline void compute_epsilon(ClusterAnalysis& ca) {
  const auto& pic = ca.picture;
  const Tower& t = *ca.roots.tower;
  const int e = t.e(), d = t.d();
  ca.eps.assign(pic.nodes.size(), {});
  for (int id : pic.proper_nodes()) {
    auto& in = *ca.info[id];
    if (!in.even && !in.cotwin) continue;
    in.star = star_of(ca, id);
    auto& ed = ca.eps[id];
    ed.defined = true;
    TowerElement D = radicand(ca, in.star);
    ed.radicand_val_units = D.valuation_units();
    ed.radicand_residue = D.residue();
    // canonical on the stabiliser of s*, which contains that of s
    const auto& gd = ca.galois[in.star];
    auto value = [&](const GaloisWord& w) { return epsilon_by_residues(t, ed.radicand_val_units, ed.radicand_residue, w); };
    std::vector<GaloisWord> gens = gd.stabiliser;
    gens.push_back(GaloisWord::tau(e));
    gens.push_back(GaloisWord::frob(d));
    for (const auto& w : gens) {
      if (w.tau_exp == 0 && w.frob_exp == 0) continue;
      int v = value(w);
      ed.generator_values.emplace_back(w, v);
      if (v != 1) ed.trivial = false;
    }
    ed.inertia_step = e;
    for (const auto& w : gd.stabiliser)
      if (w.frob_exp == 0 && w.tau_exp > 0) ed.inertia_step = std::min<int>(ed.inertia_step, static_cast<int>(w.tau_exp));
    ed.on_inertia = value(GaloisWord::tau(ed.inertia_step));
    if (gd.fixed_by_frob) ed.on_frob = value(GaloisWord::frob());
  }
}

}  // namespace detail

/// Picture, invariants, Galois data and characters for an embedded curve.
inline ClusterAnalysis analyse_clusters(const EmbeddedCurve& ec, ClusterOptions opt = {}) {
  ClusterAnalysis ca;
  ca.roots = ec.roots;
  ca.options = opt;
  ca.picture = build_picture(ca.roots);
  ca.curve_genus = curve_genus_of_degree(ec.expr.degree());
  ca.v_cf = Rational(ec.expr.cf_pow);
  detail::compute_info(ca);
  detail::compute_galois(ca);
  detail::compute_epsilon(ca);
  return ca;
}

}  // namespace hypsol

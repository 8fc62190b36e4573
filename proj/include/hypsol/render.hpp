#pragma once

// Cluster pictures as ASCII and as clusterpicture LaTeX; text and JSON reports.

#include <json.hpp>

#include <cctype>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hypsol/decision.hpp"
#include "hypsol/oracle.hpp"

namespace hypsol {

/// Display names: R for the top cluster, t1, t2, ... for twins, s1, s2, ... otherwise (preorder).
inline std::vector<std::string> cluster_names(const ClusterPicture& pic) {
  std::vector<std::string> names(pic.nodes.size());
  int twins = 0, others = 0;
  for (std::size_t i = 0; i < pic.nodes.size(); ++i) {
    const auto& nd = pic.nodes[i];
    if (i == 0)
      names[i] = "R";
    else if (!nd.proper())
      names[i] = "r" + std::to_string(nd.roots[0] + 1);
    else if (nd.size() == 2)
      names[i] = "t" + std::to_string(++twins);
    else
      names[i] = "s" + std::to_string(++others);
  }
  return names;
}

// ---- ASCII ------------------------------------------------------------------

/// "(r1 r2 | d=1)", children in order of their smallest root, depths absolute.
inline std::string render_ascii(const ClusterPicture& pic, int node = 0) {
  const auto& nd = pic.nodes[node];
  if (!nd.proper()) return "r" + std::to_string(nd.roots[0] + 1);
  std::string s = "(";
  for (std::size_t i = 0; i < nd.children.size(); ++i) {
    if (i) s += ' ';
    s += render_ascii(pic, nd.children[i]);
  }
  return s + " | d=" + to_string(*nd.depth) + ")";
}

/// Laminar tree read back from the ASCII form.
struct PictureTree {
  std::optional<Rational> depth;  // nullopt for a root
  int root = -1;                  // 0-based, for leaves
  std::vector<PictureTree> children;

  std::string serialize() const {
    if (!depth) return "r" + std::to_string(root + 1);
    std::string s = "{d=" + to_string(*depth);
    for (const auto& c : children) s += " " + c.serialize();
    return s + "}";
  }
};

namespace detail {

class AsciiPictureParser {
 public:
  explicit AsciiPictureParser(std::string_view s) : s_(s) {}

  PictureTree parse() {
    PictureTree t = item();
    skip();
    if (i_ != s_.size()) fail("trailing text");
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::SyntaxError, "cli_render", what + " at offset " + std::to_string(i_) + " in ascii picture");
  }
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool eat(char c) {
    skip();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }
  std::string token(const char* allowed) {
    skip();
    std::size_t b = i_;
    while (i_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[i_])) || std::string_view(allowed).find(s_[i_]) != std::string_view::npos))
      ++i_;
    if (b == i_) fail("expected a number");
    return std::string(s_.substr(b, i_ - b));
  }

  PictureTree item() {
    PictureTree t;
    if (eat('r')) {
      t.root = std::stoi(token("")) - 1;
      if (t.root < 0) fail("root labels start at r1");
      return t;
    }
    if (!eat('(')) fail("expected '(' or a root");
    while (!eat('|')) {
      if (i_ >= s_.size()) fail("unterminated cluster");
      t.children.push_back(item());
    }
    if (t.children.size() < 2) fail("a proper cluster needs two children");
    if (!eat('d') || !eat('=')) fail("expected d=");
    try {
      t.depth = rational_from_string(token("-/"));
    } catch (const std::exception&) {
      fail("bad depth");
    }
    if (!eat(')')) fail("expected ')'");
    return t;
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

inline PictureTree tree_of(const ClusterPicture& pic, int node) {
  PictureTree t;
  const auto& nd = pic.nodes[node];
  if (!nd.proper()) {
    t.root = nd.roots[0];
    return t;
  }
  t.depth = nd.depth;
  for (int c : nd.children) t.children.push_back(tree_of(pic, c));
  return t;
}

}  // namespace detail

inline PictureTree parse_ascii_picture(std::string_view text) { return detail::AsciiPictureParser(text).parse(); }

inline PictureTree picture_tree(const ClusterPicture& pic) { return detail::tree_of(pic, 0); }

// ---- LaTeX ------------------------------------------------------------------

/// 1, \frac23, \frac{11}{6}, -\frac12.
inline std::string latex_rational(const Rational& r) {
  if (is_integer(r)) return std::to_string(r.numerator());
  std::string sign = r < 0 ? "-" : "";
  std::string n = std::to_string(r.numerator() < 0 ? -r.numerator() : r.numerator());
  std::string d = std::to_string(r.denominator());
  if (n.size() == 1 && d.size() == 1) return sign + "\\frac" + n + d;
  return sign + "\\frac{" + n + "}{" + d + "}";
}

inline std::string latex_cluster_name(const std::string& name) {
  if (name == "R") return "\\Rcal";
  if (name[0] == 't') return "\\tfrak_" + name.substr(1);
  return "\\s_" + name.substr(1);
}

namespace detail {

struct LatexWriter {
  const ClusterPicture& pic;
  std::vector<std::string> names;
  std::ostringstream out;
  std::string anchor = "first";
  int next_id = 0;

  // returns the macro name of the node
  std::string emit(int node) {
    const auto& nd = pic.nodes[node];
    if (!nd.proper()) {
      std::string r = "r" + std::to_string(nd.roots[0] + 1);
      out << "\\Root[] {} {" << anchor << "} {" << r << "};\n";
      anchor = r;
      return r;
    }
    std::vector<std::string> parts;
    for (int c : nd.children) parts.push_back(emit(c));
    std::string id = "c" + std::to_string(++next_id);
    Rational label = node == 0 ? *nd.depth : *nd.depth - *pic.nodes[nd.parent].depth;
    out << "\\ClusterLDName " << id << "[][" << latex_rational(label) << "][" << latex_cluster_name(names[node])
        << "] = ";
    for (const auto& p : parts) out << "(" << p << ")";
    out << ";\n";
    anchor = id;
    return id;
  }
};

}  // namespace detail

/// \clusterpicture ... \endclusterpicture; clusters labelled by relative depth, the top by its depth.
inline std::string render_latex(const ClusterPicture& pic) {
  detail::LatexWriter w{pic, cluster_names(pic), {}, "first", 0};
  w.out << "\\clusterpicture\n";
  w.emit(0);
  w.out << "\\endclusterpicture\n";
  return w.out.str();
}

// ---- reports ----------------------------------------------------------------

inline std::string epsilon_summary(const EpsilonData& e) {
  if (!e.defined) return "-";
  std::string s = e.trivial ? "trivial" : "nontrivial";
  s += " (tau" + (e.inertia_step == 1 ? std::string() : "^" + std::to_string(e.inertia_step)) +
       ": " + (e.on_inertia > 0 ? "+1" : "-1");
  if (e.on_frob) s += ", phi: " + std::string(*e.on_frob > 0 ? "+1" : "-1");
  return s + ")";
}

inline std::string reading_name(const DecisionOptions& opt) {
  return std::string(opt.amended ? "amended" : "literal") + ", " + to_string(opt.clusters.star);
}

/// Human-readable report of one analysis.
inline std::string render_text(const Analysis& a, const DecisionOptions& opt,
                               const std::optional<OracleResult>& oracle = std::nullopt) {
  const auto& ca = a.clusters;
  const auto& pic = ca.picture;
  const auto& v = a.verdict;
  const auto names = cluster_names(pic);
  const auto& t = *ca.roots.tower;
  std::ostringstream o;
  o << "curve    y^2 = " << a.curve.expr.to_string() << "\n";
  o << "p        " << t.p() << "   genus " << ca.curve_genus << "   tower d=" << t.d() << " e=" << t.e()
    << " prec=" << t.prec() << "\n";
  o << "reading  " << reading_name(opt) << "\n";
  o << "picture  " << render_ascii(pic) << "\n\n";
  o << "cluster  size  d       delta   nu      lambda  e   g  v(c_s)*  flags            G_K      epsilon\n";
  for (int id : pic.proper_nodes()) {
    const auto& c = ca.at(id);
    const auto& g = ca.galois[id];
    std::string flags;
    auto flag = [&](bool b, const char* f) {
      if (b) flags += (flags.empty() ? "" : ",") + std::string(f);
    };
    flag(c.even, "even");
    flag(!c.even, "odd");
    flag(c.ubereven, "ubereven");
    flag(c.twin, "twin");
    flag(c.cotwin, "cotwin");
    flag(c.principal, "principal");
    std::string fix = ca.fixed(id) ? "fixed" : g.fixed_by_inertia ? "I-fixed" : "moved";
    char line[256];
    std::snprintf(line, sizeof line, "%-8s %-5d %-7s %-7s %-7s %-7s %-3d %-2d %-8s %-16s %-8s ", names[id].c_str(), c.size,
                  to_string(c.depth).c_str(), id == 0 ? "-" : to_string(c.delta).c_str(), to_string(c.nu).c_str(),
                  to_string(c.lambda).c_str(), c.e_s, c.genus, to_string(c.vc).c_str(), flags.c_str(), fix.c_str());
    o << line << epsilon_summary(ca.eps[id]);
    if (ca.eps[id].defined && c.star != id) o << " via " << names[c.star];
    o << "\n";
  }
  o << "(* convention value)\n\nconditions\n";
  for (const auto& r : v.theorem.conditions) {
    std::string mark = !r.evaluated ? "n/a" : r.satisfied ? "YES" : "no";
    o << "  " << r.id << std::string(6 - r.id.size(), ' ') << mark << std::string(5 - mark.size(), ' ');
    if (r.satisfied) {
      o << "witness";
      for (int w : r.witnesses) o << " " << names[w];
    }
    o << "\n";
    for (const auto& q : r.quantities) o << "          " << q << "\n";
  }
  o << "\ncomponent  " << to_string(v.component);
  if (v.theorem.fired) o << " via (" << *v.theorem.fired << ")";
  o << "\nsolubility " << to_string(v.status);
  if (!v.gate.applicable())
    for (const auto& r : v.gate.reasons) o << "; " << r;
  if (v.odd_degree) o << " (odd degree: rational point at infinity" << (v.odd_degree_consistent ? "" : "; theorem returned No") << ")";
  o << "\n";
  if (!v.theorem.convention_markers.empty()) {
    o << "convention markers\n";
    for (const auto& m : v.theorem.convention_markers) o << "  " << m << "\n";
  }
  if (oracle) {
    o << "oracle     " << to_string(oracle->status);
    if (oracle->witness) o << ", witness " << oracle->witness->to_string();
    o << " (" << oracle->nodes_explored << " classes, level " << oracle->max_level_reached << ")\n";
  }
  return o.str();
}

namespace detail {

inline nlohmann::json tree_json(const ClusterPicture& pic, const std::vector<std::string>& names, int node) {
  const auto& nd = pic.nodes[node];
  nlohmann::json j;
  j["name"] = names[node];
  if (!nd.proper()) return j;
  j["depth"] = to_string(*nd.depth);
  j["children"] = nlohmann::json::array();
  for (int c : nd.children) j["children"].push_back(tree_json(pic, names, c));
  return j;
}

}  // namespace detail

inline nlohmann::json oracle_json(const OracleResult& r) {
  nlohmann::json j{{"status", to_string(r.status)},
                   {"nodes_explored", r.nodes_explored},
                   {"max_level_reached", r.max_level_reached},
                   {"max_level", r.max_level}};
  if (r.witness) {
    const auto& w = *r.witness;
    j["witness"] = w.at_infinity ? nlohmann::json{{"at_infinity", true}}
                                 : nlohmann::json{{"at_infinity", false},
                                                  {"chart", to_string(w.chart)},
                                                  {"x", w.x.get_str()},
                                                  {"y", w.y.get_str()},
                                                  {"hensel_root", w.hensel_root},
                                                  {"digits", w.digits}};
  }
  return j;
}

/// Fields: curve, p, tower, picture, invariants, conditions, component_verdict,
/// solubility, convention_markers, and oracle when given.
inline nlohmann::json analysis_json(const Analysis& a, const DecisionOptions& opt,
                                    const std::optional<OracleResult>& oracle = std::nullopt) {
  using nlohmann::json;
  const auto& ca = a.clusters;
  const auto& pic = ca.picture;
  const auto& v = a.verdict;
  const auto names = cluster_names(pic);
  const auto& t = *ca.roots.tower;
  json j;
  j["curve"] = a.curve.expr.to_string();
  j["p"] = t.p();
  j["tower"] = {{"d", t.d()}, {"e", t.e()}, {"prec", t.prec()}};
  j["picture"] = {{"ascii", render_ascii(pic)}, {"tree", detail::tree_json(pic, names, 0)}};
  j["invariants"] = json::array();
  for (int id : pic.proper_nodes()) {
    const auto& c = ca.at(id);
    const auto& g = ca.galois[id];
    const auto& e = ca.eps[id];
    json eps = {{"defined", e.defined}};
    if (e.defined) {
      eps["trivial"] = e.trivial;
      eps["inertia_step"] = e.inertia_step;
      eps["on_inertia"] = e.on_inertia;
      eps["on_frob"] = e.on_frob ? json(*e.on_frob) : json(nullptr);
      eps["star"] = names[c.star];
    }
    j["invariants"].push_back({{"cluster", names[id]},
                               {"size", c.size},
                               {"parent", pic.nodes[id].parent < 0 ? json(nullptr) : json(names[pic.nodes[id].parent])},
                               {"d", to_string(c.depth)},
                               {"delta", id == 0 ? json(nullptr) : json(to_string(c.delta))},
                               {"nu", to_string(c.nu)},
                               {"lambda", to_string(c.lambda)},
                               {"e", c.e_s},
                               {"genus", c.genus},
                               {"vK_c", {{"value", to_string(c.vc)}, {"convention", true}}},
                               {"flags",
                                {{"even", c.even},
                                 {"ubereven", c.ubereven},
                                 {"twin", c.twin},
                                 {"cotwin", c.cotwin},
                                 {"principal", c.principal}}},
                               {"fixed_by_inertia", g.fixed_by_inertia},
                               {"fixed_by_frobenius", g.fixed_by_frob},
                               {"epsilon", eps}});
  }
  j["conditions"] = json::array();
  for (const auto& r : v.theorem.conditions) {
    json w = json::array();
    for (int x : r.witnesses) w.push_back(names[x]);
    j["conditions"].push_back({{"id", r.id},
                               {"evaluated", r.evaluated},
                               {"satisfied", r.satisfied},
                               {"witnesses", w},
                               {"quantities", r.quantities},
                               {"convention_marker", r.convention},
                               {"conventions", r.conventions}});
  }
  j["component_verdict"] = to_string(v.component);
  j["solubility"] = {{"status", to_string(v.status)},
                     {"fired", v.theorem.fired ? json(*v.theorem.fired) : json(nullptr)},
                     {"gate",
                      {{"p_odd", v.gate.p_odd},
                       {"tame", v.gate.tame},
                       {"hasse_weil", v.gate.hasse_weil},
                       {"q", v.gate.q},
                       {"genus", v.gate.genus},
                       {"reasons", v.gate.reasons}}},
                     {"odd_degree_shortcut", v.odd_degree},
                     {"odd_degree_consistent", v.odd_degree_consistent},
                     {"rechecked_at_double_precision", v.rechecked},
                     {"reading", reading_name(opt)}};
  j["convention_markers"] = v.theorem.convention_markers;
  if (oracle) j["oracle"] = oracle_json(*oracle);
  return j;
}

}  // namespace hypsol

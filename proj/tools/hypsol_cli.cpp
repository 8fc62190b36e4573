// hypsol: analyze | oracle | compare | render

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "hypsol/compare.hpp"
#include "hypsol/render.hpp"

using namespace hypsol;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kInapplicable = 2, kInternal = 3 };

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::SyntaxError:
    case ErrorKind::UnsupportedFactor:
    case ErrorKind::DegreeTooSmall:
    case ErrorKind::NonOddPrime:
    case ErrorKind::NonRationalCoefficient:
    case ErrorKind::NotSquarefree:
    case ErrorKind::RootCollision:
      return kUsage;
    case ErrorKind::WildInput:
    case ErrorKind::WildRamification:
      return kInapplicable;
    default:
      return kInternal;
  }
}

struct CurveSource {
  std::string file, expr;
  std::optional<long> p;
};

struct Input {
  long p;
  CurveExpr curve;
};

std::vector<Input> load(const CurveSource& src) {
  std::vector<Input> out;
  if (!src.file.empty()) {
    std::ifstream in(src.file);
    if (!in) throw Error(ErrorKind::SyntaxError, "cli_render", "cannot read " + src.file);
    std::stringstream ss;
    ss << in.rdbuf();
    CurveFile cf = parse_curve_file(ss.str());
    long p = src.p.value_or(cf.p);
    for (auto& c : cf.curves) out.push_back({p, std::move(c)});
  } else {
    if (!src.p) throw Error(ErrorKind::SyntaxError, "cli_render", "--p is required with --expr");
    out.push_back({*src.p, parse_expr(src.expr)});
  }
  return out;
}

void add_source(CLI::App* cmd, CurveSource& src) {
  auto* f = cmd->add_option("--curve", src.file, "curve file: header \"p = <int>\", one expression per line")
                ->check(CLI::ExistingFile);
  auto* e = cmd->add_option("--expr", src.expr, "curve expression, e.g. \"p*(x^3-p^2)*((x-1)^3-p^2)\"");
  f->excludes(e);
  e->excludes(f);
  cmd->add_option("--p", src.p, "odd prime (overrides the file header)");
}

void add_reading(CLI::App* cmd, DecisionOptions& opt, std::string& star) {
  cmd->add_flag("--amended", opt.amended, "residue-aware reading of (ii)(c), (iv)(c), (v)(c) and parity in (vi)(b)");
  cmd->add_option("--star", star, "s* convention: child (default) or parent")
      ->check(CLI::IsMember({"child", "parent"}));
}

void apply_star(DecisionOptions& opt, const std::string& star) {
  opt.clusters.star = star == "parent" ? StarConvention::NonUberevenParent : StarConvention::ChildOfSize2g;
}

std::vector<long> parse_list(const std::string& s) {
  std::vector<long> out;
  std::stringstream ss(s);
  try {
    for (std::string item; std::getline(ss, item, ',');) out.push_back(std::stol(item));
  } catch (const std::logic_error&) {
    throw CLI::ValidationError("--p-list", "expected primes such as 7,11,17");
  }
  if (out.empty()) throw CLI::ValidationError("--p-list", "empty list");
  return out;
}

std::pair<int, int> parse_range(const std::string& s) {
  try {
    auto dots = s.find("..");
    if (dots == std::string::npos) return {std::stoi(s), std::stoi(s)};
    return {std::stoi(s.substr(0, dots)), std::stoi(s.substr(dots + 2))};
  } catch (const std::logic_error&) {
    throw CLI::ValidationError("--genus", "expected lo..hi");
  }
}

int run_analyze(const CurveSource& src, std::optional<long> prec, bool as_json, bool with_oracle,
                const DecisionOptions& opt) {
  int code = kOk;
  json all = json::array();
  for (const auto& in : load(src)) {
    Analysis a = solubility_decide(in.curve, in.p, prec, opt);
    std::optional<OracleResult> o;
    if (with_oracle) o = is_locally_soluble(expand_to_integer_poly(a.curve.expr), in.p);
    if (as_json)
      all.push_back(analysis_json(a, opt, o));
    else
      std::cout << render_text(a, opt, o) << "\n";
    if (a.verdict.status == Status::Inapplicable) code = std::max<int>(code, kInapplicable);
  }
  if (as_json) std::cout << (all.size() == 1 ? all[0] : all).dump(2) << "\n";
  return code;
}

int run_oracle(const CurveSource& src, std::optional<long> max_level, bool as_json) {
  OracleOptions oo;
  oo.max_level = max_level;
  for (const auto& in : load(src)) {
    ZPoly f = expand_to_integer_poly(normalize(in.curve, in.p));
    OracleResult r = is_locally_soluble(f, in.p, oo);
    if (as_json) {
      json j = oracle_json(r);
      j["curve"] = in.curve.to_string();
      j["p"] = in.p;
      std::cout << j.dump(2) << "\n";
    } else {
      std::cout << in.curve.to_string() << "  p=" << in.p << ": " << to_string(r.status);
      if (r.witness) std::cout << ", witness " << r.witness->to_string();
      std::cout << " (" << r.nodes_explored << " classes, level " << r.max_level_reached << " of " << r.max_level << ")\n";
    }
  }
  return kOk;
}

void print_compare(const CompareOptions& o, const CompareReport& r) {
  std::cout << "seed " << o.seed << "  count " << o.count << "  p";
  for (long p : o.primes) std::cout << " " << p;
  std::cout << "  genus " << o.genus_min << ".." << o.genus_max << "  reading " << reading_name(o.decision) << "\n";
  std::cout << "compared " << r.compared << "  agree " << r.agreements << "  disagree " << r.disagreements
            << "  quarantined " << r.quarantined << "  inapplicable " << r.inapplicable << "  oracle inconclusive "
            << r.oracle_inconclusive << "  errors " << r.errors << "\n";
  int m[2][2] = {{0, 0}, {0, 0}};
  for (const auto& rec : r.records)
    if (rec.compared()) ++m[*rec.status == Status::Soluble ? 0 : 1][*rec.oracle == OracleStatus::Soluble ? 0 : 1];
  std::cout << "                  oracle soluble  oracle insoluble\n";
  std::cout << "  decide Soluble   " << std::setw(14) << m[0][0] << "  " << std::setw(16) << m[0][1] << "\n";
  std::cout << "  decide Insoluble " << std::setw(14) << m[1][0] << "  " << std::setw(16) << m[1][1] << "\n";
  std::cout << "odd degree " << r.odd_degree << "  component Yes " << r.odd_degree_yes << "  oracle soluble "
            << r.odd_degree_oracle << "\n";
  std::cout << "coverage";
  for (const auto& id : condition_ids()) std::cout << " " << id << ":" << (r.coverage.count(id) ? r.coverage.at(id) : 0);
  std::cout << "\n";
  for (const auto& rec : r.records) {
    if (!rec.error.empty()) std::cout << "error #" << rec.index << " p=" << rec.p << " " << rec.curve << ": " << rec.error << "\n";
    if (rec.compared() && !rec.agree()) {
      std::cout << (rec.convention ? "quarantined" : "disagreement") << " #" << rec.index << " p=" << rec.p << " "
                << rec.curve << "\n  decide " << to_string(*rec.status) << (rec.fired ? " via " + *rec.fired : "")
                << "; oracle " << to_string(*rec.oracle) << "\n  trace " << rec.trace << "\n";
      for (const auto& mk : rec.markers) std::cout << "  marker " << mk << "\n";
    }
  }
}

json compare_json(const CompareOptions& o, const CompareReport& r) {
  json recs = json::array();
  for (const auto& rec : r.records) {
    json j{{"index", rec.index}, {"p", rec.p}, {"curve", rec.curve}, {"genus", rec.genus}, {"odd_degree", rec.odd_degree}};
    j["status"] = rec.status ? json(to_string(*rec.status)) : json(nullptr);
    j["fired"] = rec.fired ? json(*rec.fired) : json(nullptr);
    j["oracle"] = rec.oracle ? json(to_string(*rec.oracle)) : json(nullptr);
    j["agree"] = rec.agree();
    j["convention_markers"] = rec.markers;
    if (!rec.error.empty()) j["error"] = rec.error;
    recs.push_back(j);
  }
  return {{"seed", o.seed},
          {"count", o.count},
          {"primes", o.primes},
          {"reading", reading_name(o.decision)},
          {"compared", r.compared},
          {"agreements", r.agreements},
          {"disagreements", r.disagreements},
          {"quarantined", r.quarantined},
          {"inapplicable", r.inapplicable},
          {"oracle_inconclusive", r.oracle_inconclusive},
          {"errors", r.errors},
          {"odd_degree", {{"count", r.odd_degree}, {"component_yes", r.odd_degree_yes}, {"oracle_soluble", r.odd_degree_oracle}}},
          {"coverage", r.coverage},
          {"records", recs}};
}

int run_render(const CurveSource& src, const std::string& format) {
  for (const auto& in : load(src)) {
    auto pic = analyse_clusters(embed_curve(in.curve, in.p)).picture;
    std::cout << (format == "latex" ? render_latex(pic) : render_ascii(pic) + "\n");
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local solubility of y^2 = f(x) over Q_p from cluster pictures"};
  app.require_subcommand(1);

  CurveSource src;
  DecisionOptions opt;
  std::string star = "child";
  std::optional<long> prec, max_level;
  bool as_json = false, with_oracle = false;

  auto* analyze = app.add_subcommand("analyze", "cluster picture, invariants, conditions and verdict");
  add_source(analyze, src);
  analyze->add_option("--prec", prec, "working precision in digits of p");
  analyze->add_flag("--json", as_json, "JSON report");
  analyze->add_flag("--oracle", with_oracle, "also run the point-search oracle");
  add_reading(analyze, opt, star);

  auto* oracle = app.add_subcommand("oracle", "residue-class point search over Q_p");
  add_source(oracle, src);
  oracle->add_option("--max-level", max_level, "search depth cap (default 2 v_p(disc f) + 4)");
  oracle->add_flag("--json", as_json, "JSON output");

  CompareOptions co;
  std::string plist = "7,11", genus = "2..4";
  auto* compare = app.add_subcommand("compare", "decision against the oracle on a seeded random corpus");
  compare->add_option("--seed", co.seed, "corpus seed")->required();
  compare->add_option("--count", co.count, "number of curves")->required()->check(CLI::NonNegativeNumber);
  compare->add_option("--p-list", plist, "comma separated primes");
  compare->add_option("--genus", genus, "genus range lo..hi");
  compare->add_option("--threads", co.threads, "worker threads (0: all cores)");
  compare->add_flag("--json", as_json, "JSON report");
  add_reading(compare, opt, star);

  std::string format = "ascii";
  auto* render = app.add_subcommand("render", "cluster picture as ascii or LaTeX");
  add_source(render, src);
  render->add_option("--format", format, "ascii or latex")->check(CLI::IsMember({"ascii", "latex"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }
  apply_star(opt, star);

  try {
    if (*compare) {
      co.primes = parse_list(plist);
      std::tie(co.genus_min, co.genus_max) = parse_range(genus);
      co.decision = opt;
      CompareReport r = run_compare(co);
      if (as_json)
        std::cout << compare_json(co, r).dump(2) << "\n";
      else
        print_compare(co, r);
      return kOk;
    }
    if (src.file.empty() && src.expr.empty()) {
      std::cerr << "error: one of --curve or --expr is required\n";
      return kUsage;
    }
    if (*analyze) return run_analyze(src, prec, as_json, with_oracle, opt);
    if (*oracle) return run_oracle(src, max_level, as_json);
    if (*render) return run_render(src, format);
  } catch (const Error& e) {
    std::cerr << "error [" << e.module() << "/" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return exit_code(e);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}

#pragma once

// Decision engine against the point-search oracle over a seeded random corpus.

#include <atomic>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "hypsol/corpus.hpp"
#include "hypsol/decision.hpp"
#include "hypsol/oracle.hpp"

namespace hypsol {

struct CompareOptions {
  std::uint64_t seed = 1;
  int count = 10;
  std::vector<long> primes{7, 11};
  int genus_min = 2, genus_max = 4;
  DecisionOptions decision;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct CompareRecord {
  int index = 0;
  long p = 0;
  std::string curve;
  int genus = 0;
  bool odd_degree = false;
  std::optional<Status> status;
  std::optional<ComponentVerdict> component;
  std::optional<std::string> fired;
  std::vector<std::string> satisfied;
  bool convention = false;  // the verdict consumed a convention value
  std::vector<std::string> markers;
  std::optional<OracleStatus> oracle;
  std::string error;
  std::string trace;  // satisfied or evaluated conditions, for disagreement reports

  bool compared() const {
    return status && *status != Status::Inapplicable && oracle && *oracle != OracleStatus::MaxLevelExceeded;
  }
  bool agree() const { return compared() && (*status == Status::Soluble) == (*oracle == OracleStatus::Soluble); }
};

struct CompareReport {
  std::vector<CompareRecord> records;
  int compared = 0, agreements = 0, disagreements = 0, quarantined = 0;
  int inapplicable = 0, errors = 0, oracle_inconclusive = 0;
  int odd_degree = 0, odd_degree_yes = 0, odd_degree_oracle = 0;
  int soluble = 0, insoluble = 0;
  std::map<std::string, int> coverage;  // curves satisfying each condition
};

/// Largest genus with p > 2(g^2 - 1).
inline int max_gate_genus(long p) {
  int g = 1;
  while (p > 2L * ((g + 1L) * (g + 1) - 1)) ++g;
  return g;
}

inline std::string condition_trace(const TheoremResult& t) {
  std::string s;
  for (const auto& r : t.conditions) {
    if (!r.evaluated) continue;
    if (!s.empty()) s += "; ";
    s += r.id + (r.satisfied ? "+" : "-");
    if (!r.quantities.empty()) s += " " + r.quantities[0];
  }
  return s;
}

inline CompareRecord compare_one(const CurveExpr& c, long p, const DecisionOptions& opt) {
  CompareRecord rec;
  rec.p = p;
  rec.curve = c.to_string();
  rec.genus = curve_genus_of_degree(c.degree());
  rec.odd_degree = c.degree() % 2 == 1;
  try {
    Analysis a = solubility_decide(c, p, std::nullopt, opt);
    const auto& v = a.verdict;
    rec.status = v.status;
    rec.component = v.component;
    rec.fired = v.theorem.fired;
    rec.markers = v.theorem.convention_markers;
    rec.convention = !rec.markers.empty();
    for (const auto& r : v.theorem.conditions)
      if (r.satisfied) rec.satisfied.push_back(r.id);
    rec.trace = condition_trace(v.theorem);
  } catch (const Error& e) {
    rec.error = e.what();
  }
  try {
    rec.oracle = is_locally_soluble(expand_to_integer_poly(c), p).status;
  } catch (const Error& e) {
    rec.error += std::string(rec.error.empty() ? "" : "; ") + e.what();
  }
  return rec;
}

/// Curves are drawn in seed order, checked concurrently, and reported in seed order.
inline CompareReport run_compare(const CompareOptions& opt) {
  CompareReport rep;
  std::mt19937_64 rng(opt.seed);
  struct Job {
    int index;
    long p;
    CurveExpr curve;
  };
  std::vector<Job> jobs;
  for (int i = 0; i < opt.count; ++i) {
    long p = opt.primes[static_cast<std::size_t>(i) % opt.primes.size()];
    CorpusShape sh;
    sh.genus_min = opt.genus_min;
    sh.genus_max = std::min(opt.genus_max, max_gate_genus(p));
    if (sh.genus_max < sh.genus_min) continue;
    jobs.push_back({i, p, random_curve(rng, p, sh)});
  }
  std::vector<CompareRecord> out(jobs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k; (k = next++) < jobs.size();) {
      out[k] = compare_one(jobs[k].curve, jobs[k].p, opt.decision);
      out[k].index = jobs[k].index;
    }
  };
  unsigned n = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, jobs.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& rec : out) {
    if (!rec.error.empty()) ++rep.errors;
    if (rec.status == Status::Inapplicable) ++rep.inapplicable;
    if (rec.oracle == OracleStatus::MaxLevelExceeded) ++rep.oracle_inconclusive;
    if (rec.compared()) {
      ++rep.compared;
      if (rec.agree())
        ++rep.agreements;
      else if (rec.convention)
        ++rep.quarantined;
      else
        ++rep.disagreements;
      (*rec.status == Status::Soluble ? rep.soluble : rep.insoluble)++;
      if (rec.odd_degree) {
        ++rep.odd_degree;
        rep.odd_degree_yes += rec.component == ComponentVerdict::Yes;
        rep.odd_degree_oracle += rec.oracle == OracleStatus::Soluble;
      }
      for (const auto& id : rec.satisfied) ++rep.coverage[id];
    }
    rep.records.push_back(std::move(rec));
  }
  return rep;
}

}  // namespace hypsol

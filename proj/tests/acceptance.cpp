// Acceptance run: one PASS/FAIL line per criterion.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "udg/awnn.hpp"
#include "udg/bench.hpp"
#include "udg/gen.hpp"
#include "udg/locator.hpp"
#include "udg/rng.hpp"
#include "udg/sssp.hpp"
#include "udg/vdmerge.hpp"

using namespace udg;

namespace {

constexpr double kSsspRelTol = 1e-6;
constexpr double kTieGap = 1e-7;
constexpr double kMergeRatio = 2.6;
constexpr double kNnRatio = 4.0;
constexpr double kCrossingsPerSite = 40.0;
constexpr int kMergeRetries = 5;

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Worst merge instrumentation over every merge run in criteria 2 and 3.
struct SpokeWatch {
  std::size_t max_spoke_crossings = 0;
  double max_crossings_per_site = 0.0;
  std::size_t merges = 0;
  void add(const MergeStats& st, std::size_t sites) {
    max_spoke_crossings = std::max(max_spoke_crossings, st.max_spoke_crossings);
    max_crossings_per_site = std::max(
        max_crossings_per_site, static_cast<double>(st.arc_crossings + st.spoke_crossings) / static_cast<double>(sites));
    ++merges;
  }
} watch;

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome sssp_oracle() {
  struct Config {
    GenKind kind;
    double density;
  };
  const Config configs[] = {{GenKind::Uniform, 0.5}, {GenKind::Uniform, 1.0}, {GenKind::Uniform, 2.0},
                            {GenKind::Clusters, 1.0}, {GenKind::Chain, 1.0},   {GenKind::OneCell, 1.0}};
  std::size_t runs = 0, bad = 0;
  double worst = 0.0;
  for (const Config& c : configs) {
    for (std::size_t n : {100u, 500u, 2000u}) {
      for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto pts = generate_points(c.kind, n, seed, c.density);
        const int source = static_cast<int>(seed % n);
        const double dev = max_relative_deviation(sssp_wangxue(pts, source), dijkstra_baseline(pts, source));
        worst = std::max(worst, dev);
        ++runs;
        if (!(dev <= kSsspRelTol)) ++bad;
      }
    }
  }
  return {bad == 0, fmt("%zu instances, %zu mismatched, max rel dev %.3g", runs, bad, worst)};
}

// ---------------------------------------------------------------------------

HalfPlaneVD merge_with_retries(std::vector<WeightedSite> sa, std::vector<WeightedSite> sb, std::uint64_t seed,
                               int& retries, MergeStats& st) {
  for (int attempt = 0;; ++attempt) {
    try {
      st = MergeStats{};
      BuildOptions bo;
      bo.seed = seed;
      return merge_vdplus(build_vdplus(sa, bo), build_vdplus(sb, bo), {&st, nullptr});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::TraceStall || attempt >= kMergeRetries) throw;
      ++retries;
      Rng rng(seed * 977 + static_cast<std::uint64_t>(attempt));
      for (auto* set : {&sa, &sb}) {
        for (auto& s : *set) {
          s.x += 1e-7 * rng.uniform(-1.0, 1.0);
          s.w += 1e-7 * rng.uniform(-1.0, 1.0);
        }
      }
    }
  }
}

Outcome merge_correctness() {
  std::size_t compared = 0, mismatches = 0, stalls = 0;
  int retries = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto sa = generate_sites(1000, 100 + 2 * seed, 40.0);
    auto sb = generate_sites(1000, 101 + 2 * seed, 40.0);
    for (auto& s : sb) s.id += 1000;
    MergeStats st;
    HalfPlaneVD vd;
    try {
      vd = merge_with_retries(sa, sb, seed, retries, st);
    } catch (const Error&) {
      ++stalls;
      continue;
    }
    watch.add(st, 2000);
    std::vector<WeightedSite> all = sa;
    all.insert(all.end(), sb.begin(), sb.end());
    const Locator loc(vd);
    Rng rng(seed);
    for (int i = 0; i < 100000; ++i) {
      const Point q{rng.uniform(-45.0, 45.0), rng.uniform(0.0, 40.0)};
      double d1 = kInf, d2 = kInf;
      for (const auto& s : all) {
        const double d = weighted_distance(s, q);
        if (d < d1) {
          d2 = d1;
          d1 = d;
        } else if (d < d2) {
          d2 = d;
        }
      }
      if (d2 - d1 <= kTieGap) continue;
      ++compared;
      if (loc.locate(q).site_id != nearest_site_bruteforce(all, q).site_id) ++mismatches;
    }
  }
  return {mismatches == 0 && stalls == 0,
          fmt("20 instances x 1e5 queries, %zu compared, %zu mismatches, %zu stalls, %d retries", compared, mismatches,
              stalls, retries)};
}

// ---------------------------------------------------------------------------

Outcome merge_linearity() {
  BenchOptions o;
  o.suite = "merge";
  for (int e = 12; e <= 17; ++e) o.sizes.push_back(std::size_t{1} << e);
  o.seeds = {1};
  o.reps = 5;
  o.threads = 1;
  const BenchReport rep = run_bench(o);
  double worst = 0.0;
  for (const auto& t : rep.trends) worst = std::max(worst, t.ratio);
  for (const auto& r : rep.records) {
    watch.max_spoke_crossings = std::max<std::size_t>(watch.max_spoke_crossings, r.counters.at("max_spoke_crossings"));
    watch.max_crossings_per_site = std::max(watch.max_crossings_per_site, r.metrics.at("crossings_per_site"));
    ++watch.merges;
  }
  std::string ratios;
  for (const auto& t : rep.trends) ratios += fmt(" %.2f", t.ratio);
  const bool pass = rep.valid && rep.trends.size() == 5 && worst <= kMergeRatio;
  return {pass, fmt("2^12..2^17 per-doubling ratios%s (limit %.1f)", ratios.c_str(), kMergeRatio)};
}

// ---------------------------------------------------------------------------

bool same_answer(const Nearest& a, const Nearest& b) {
  if (a.site_id == b.site_id) return true;
  return std::abs(a.distance - b.distance) <= 1e-9 * (1.0 + std::abs(a.distance));
}

Outcome dynamic_nn() {
  std::size_t queries = 0, disagreements = 0, invariant_breaks = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto ops = generate_ops(10000, 500 + seed);
    DynamicNN dyn;
    LogMethodNN log;
    BruteNN brute;
    std::vector<Nearest> a_dyn, a_log, a_brute;
    for (const auto& op : ops) {
      if (const auto* ins = std::get_if<InsertOp>(&op)) {
        dyn.insert(ins->site);
        log.insert(ins->site);
        brute.insert(ins->site);
        if (dyn.size() >= 4 && !dyn.invariant_holds()) ++invariant_breaks;
      } else {
        const Point q = std::get<QueryOp>(op).q;
        a_dyn.push_back(dyn.query(q));
        a_log.push_back(log.query(q));
        a_brute.push_back(brute.query(q));
      }
    }
    const auto a_off = offline_solve(ops);
    for (std::size_t i = 0; i < a_brute.size(); ++i) {
      ++queries;
      if (!same_answer(a_dyn[i], a_brute[i]) || !same_answer(a_log[i], a_brute[i]) ||
          !same_answer(a_off[i], a_brute[i])) {
        ++disagreements;
      }
    }
  }

  BenchOptions o;
  o.suite = "nn";
  o.sizes = {std::size_t{1} << 12, std::size_t{1} << 16};
  o.seeds = {1, 2, 3};
  o.solvers = {"dyn"};
  o.threads = 1;
  const BenchReport rep = run_bench(o);
  double ratio = kInf;
  for (const auto& t : rep.trends) {
    if (t.n_lo == o.sizes[0] && t.n_hi == o.sizes[1]) ratio = t.ratio;
  }
  const bool pass = disagreements == 0 && invariant_breaks == 0 && ratio <= kNnRatio;
  return {pass, fmt("50 x 1e4 ops, %zu queries, %zu disagreements, %zu invariant breaks, per-op ratio 2^16/2^12 %.2f",
                    queries, disagreements, invariant_breaks, ratio)};
}

// ---------------------------------------------------------------------------

Outcome spoke_crossings() {
  const bool pass = watch.merges > 0 && watch.max_spoke_crossings <= 1 &&
                    watch.max_crossings_per_site <= kCrossingsPerSite;
  return {pass, fmt("%zu merges, max crossings per spoke %zu, max crossings per site %.3f (limit %.0f)",
                    watch.merges, watch.max_spoke_crossings, watch.max_crossings_per_site, kCrossingsPerSite)};
}

// ---------------------------------------------------------------------------

Outcome nonadjacent_regions() {
  const WeightedSite p1{1, 0.0, 4.0, -4.0}, p2{2, 3.0, 0.0, 0.0}, p3{3, 0.0, -4.0, -4.0}, p4{4, -3.0, 0.0, 0.0};
  std::size_t samples = 0, bad = 0;
  for (int k = -10000; k <= 10000; ++k) {
    const Point q{0.0, k * 0.01};
    ++samples;
    const double d1 = weighted_distance(p1, q), d3 = weighted_distance(p3, q);
    const double d2 = weighted_distance(p2, q), d4 = weighted_distance(p4, q);
    if (!(std::min(d1, d3) < d2) || !(std::min(d1, d3) < d4)) ++bad;
  }
  return {bad == 0, fmt("%zu samples on x = 0, %zu where p2 or p4 is nearest", samples, bad)};
}

// ---------------------------------------------------------------------------

Outcome grid_properties() {
  Rng rng(7);
  std::size_t pairs = 0, same_cell = 0, edges = 0, bad = 0;
  const double half_diag = std::sqrt(2.0) / 2.0;
  for (int i = 0; i < 1000000; ++i) {
    const Point p{rng.uniform(-50.0, 50.0), rng.uniform(-50.0, 50.0)};
    // Alternate between short offsets and pairs forced into one cell.
    Point q;
    if (i % 2 == 0) {
      const double r = rng.uniform(0.0, 1.5), a = rng.uniform(0.0, 2.0 * std::acos(-1.0));
      q = {p.x + r * std::cos(a), p.y + r * std::sin(a)};
    } else {
      const Cell c = cell_of(p);
      q = {(c.i + rng.uniform()) * 0.5, (c.j + rng.uniform()) * 0.5};
    }
    ++pairs;
    const Cell cp = cell_of(p), cq = cell_of(q);
    const double d = norm(p - q);
    if (cp == cq) {
      ++same_cell;
      if (!(d <= half_diag)) ++bad;
    }
    if (d <= 1.0) {
      ++edges;
      const auto pp = patch(cp), pq = patch(cq);
      if (std::find(pp.begin(), pp.end(), cq) == pp.end() || std::find(pq.begin(), pq.end(), cp) == pq.end()) ++bad;
    }
  }
  return {bad == 0, fmt("%zu pairs, %zu same-cell, %zu within distance 1, %zu violations", pairs, same_cell, edges, bad)};
}

// ---------------------------------------------------------------------------

Outcome bench_reproducible() {
  std::vector<BenchOptions> suites(3);
  suites[0].suite = "merge";
  suites[0].sizes = {2048, 4096};
  suites[0].seeds = {3, 4};
  suites[1].suite = "nn";
  suites[1].sizes = {1024, 4096};
  suites[1].seeds = {3, 4};
  suites[1].solvers = {"dyn", "log", "offline"};
  suites[2].suite = "sssp";
  suites[2].sizes = {500, 2000};
  suites[2].seeds = {3, 4};
  suites[2].kind = GenKind::Clusters;
  std::size_t records = 0, differing = 0;
  for (const auto& o : suites) {
    const BenchReport a = run_bench(o);
    const BenchReport b = run_bench(o);
    records += a.records.size();
    if (bench_counters_json(a) != bench_counters_json(b) || !a.valid) ++differing;
  }
  return {differing == 0, fmt("3 suites, %zu records, %zu suites with differing counters", records, differing)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  // Spoke instrumentation is collected by the two merge criteria before it.
  const Criterion criteria[] = {
      {"sssp oracle equivalence", sssp_oracle},
      {"merge correctness", merge_correctness},
      {"merge linearity", merge_linearity},
      {"dynamic nearest neighbor", dynamic_nn},
      {"spoke crossings", spoke_crossings},
      {"nonadjacent regions", nonadjacent_regions},
      {"grid properties", grid_properties},
      {"bench reproducibility", bench_reproducible},
  };
  int failed = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", index, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}

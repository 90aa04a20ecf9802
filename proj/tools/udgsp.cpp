// udgsp: shortest paths in weighted unit-disk graphs, diagrams, nearest
// neighbor solvers, generators and benchmarks.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "udg/awnn.hpp"
#include "udg/bench.hpp"
#include "udg/counters.hpp"
#include "udg/gen.hpp"
#include "udg/io.hpp"
#include "udg/locator.hpp"
#include "udg/rng.hpp"
#include "udg/sssp.hpp"
#include "udg/vdmerge.hpp"

using namespace udg;

namespace {

constexpr int kOk = 0;
constexpr int kMismatch = 1;
constexpr int kUsage = 2;

struct Globals {
  std::uint64_t seed = 1;
  double perturb = 1e-7;
};

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_file(path, text);
  }
}

std::string slurp(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  return read_file(path);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------

struct SsspArgs {
  std::string input;
  int source = 0;
  std::string out;
  std::string svg;
  bool oracle = false;
};

int cmd_sssp(const SsspArgs& a) {
  const auto pts = parse_points(slurp(a.input));
  const DistTable dt = sssp_wangxue(pts, a.source);
  emit(a.out, format_dist_csv(pts, dt));
  if (!a.svg.empty()) write_file(a.svg, svg_tree(pts, dt));
  if (a.oracle) {
    const double dev = max_relative_deviation(dt, dijkstra_baseline(pts, a.source));
    std::cerr << "oracle max deviation " << dev << '\n';
    if (!(dev <= 1e-6)) return kMismatch;
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct VdArgs {
  std::string sites_a;
  std::string sites_b;
  std::string out;
  std::string svg;
  int check = 0;
  bool merge = false;
};

// Sampled owner comparison against a linear scan, skipping near ties.
int check_diagram(const HalfPlaneVD& vd, int k, std::uint64_t seed) {
  double lo = 0.0, hi = 0.0;
  for (const auto& s : vd.sites) {
    lo = std::min(lo, s.x);
    hi = std::max(hi, s.x);
  }
  const double pad = 1.0 + 0.25 * (hi - lo);
  const Locator loc(vd);
  Rng rng(seed);
  int compared = 0, mismatches = 0;
  for (int i = 0; i < k; ++i) {
    const Point q{rng.uniform(lo - pad, hi + pad), rng.uniform(0.0, hi - lo + pad)};
    double d1 = kInf, d2 = kInf;
    for (const auto& s : vd.sites) {
      const double d = weighted_distance(s, q);
      if (d < d1) {
        d2 = d1;
        d1 = d;
      } else if (d < d2) {
        d2 = d;
      }
    }
    if (d2 - d1 <= 1e-7) continue;
    ++compared;
    if (loc.locate(q).site_id != nearest_site_bruteforce(vd.sites, q).site_id) ++mismatches;
  }
  std::cerr << "checked " << compared << " queries, " << mismatches << " mismatches\n";
  return mismatches == 0 ? kOk : kMismatch;
}

int cmd_vd(const VdArgs& a, const Globals& g) {
  BuildOptions bo;
  bo.seed = g.seed;
  bo.perturb = g.perturb;
  auto sa = parse_sites(slurp(a.sites_a));
  HalfPlaneVD vd;
  std::vector<TraceEvent> trace;
  if (!a.merge) {
    vd = build_vdplus(sa, bo);
  } else {
    auto sb = parse_sites(slurp(a.sites_b));
    for (auto& s : sb) s.id += static_cast<int>(sa.size());
    const HalfPlaneVD va = build_vdplus(sa, bo);
    const HalfPlaneVD vb = build_vdplus(sb, bo);
    MergeStats st;
    try {
      vd = merge_vdplus(va, vb, {&st, a.svg.empty() ? nullptr : &trace});
    } catch (const Error& e) {
      if (g.perturb <= 0.0 || (e.code() != ErrorCode::TraceStall && e.code() != ErrorCode::DegenerateTangency &&
                               e.code() != ErrorCode::NearTangency)) {
        throw;
      }
      std::cerr << "merge: " << e.what() << ", rebuilding with perturbation\n";
      std::vector<WeightedSite> all = sa;
      all.insert(all.end(), sb.begin(), sb.end());
      vd = build_vdplus(all, bo);
      trace.clear();
    }
    std::cerr << "merge: " << st.components << " components, " << st.trace_steps << " steps, "
              << st.arc_crossings + st.spoke_crossings << " crossings\n";
  }
  emit(a.out, serialize_vd(vd));
  if (!a.svg.empty()) write_file(a.svg, svg_diagram(vd, trace.empty() ? nullptr : &trace));
  return a.check > 0 ? check_diagram(vd, a.check, g.seed) : kOk;
}

// ---------------------------------------------------------------------------

struct NnArgs {
  std::string ops;
  std::string solver = "dyn";
  std::string out;
  bool count_ops = false;
};

template <class NN>
std::vector<Nearest> answer_online(const std::vector<NNOp>& ops, NN& nn) {
  std::vector<Nearest> out;
  for (const auto& op : ops) {
    if (const auto* ins = std::get_if<InsertOp>(&op)) {
      nn.insert(ins->site);
    } else {
      out.push_back(nn.query(std::get<QueryOp>(op).q));
    }
  }
  return out;
}

int cmd_nn(const NnArgs& a) {
  const auto ops = parse_ops(slurp(a.ops));
  reset_counters();
  std::vector<Nearest> answers;
  if (a.solver == "dyn") {
    DynamicNN nn;
    answers = answer_online(ops, nn);
  } else if (a.solver == "log") {
    LogMethodNN nn;
    answers = answer_online(ops, nn);
  } else if (a.solver == "brute") {
    BruteNN nn;
    answers = answer_online(ops, nn);
  } else {
    answers = offline_solve(ops);
  }
  std::string text;
  for (const auto& n : answers) text += std::to_string(n.site_id) + ' ' + fmt(n.distance) + '\n';
  emit(a.out, text);
  if (a.count_ops) {
    const OpCounters& c = counters();
    std::cerr << "merges " << c.merges << "\ntrace_steps " << c.trace_steps << "\nlocates " << c.locates
              << "\nrebuild_sites " << c.rebuild_sites << "\nflushes " << c.flushes << "\nretries " << c.retries
              << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct GenArgs {
  std::string kind;
  std::size_t n = 0;
  double density = 1.0;
  std::string out;
};

int cmd_gen(const GenArgs& a, const Globals& g) {
  emit(a.out, format_points(generate_points(parse_gen_kind(a.kind), a.n, g.seed, a.density)));
  return kOk;
}

// ---------------------------------------------------------------------------

struct BenchArgs {
  std::string suite;
  std::vector<std::size_t> sizes;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> solvers;
  std::string kind = "uniform";
  double density = 1.0;
  int reps = 3;
  int threads = 0;
  std::string json;
  std::string counters_json;
  bool no_check = false;
  bool strict = false;
};

int cmd_bench(const BenchArgs& a, const Globals& g) {
  BenchOptions o;
  o.suite = a.suite;
  o.sizes = a.sizes;
  if (o.sizes.empty()) {
    if (a.suite == "merge") o.sizes = {4096, 8192, 16384, 32768};
    if (a.suite == "nn") o.sizes = {4096, 16384, 65536};
    if (a.suite == "sssp") o.sizes = {1000, 2000, 4000};
  }
  o.seeds = a.seeds.empty() ? std::vector<std::uint64_t>{g.seed} : a.seeds;
  o.solvers = a.solvers;
  o.kind = parse_gen_kind(a.kind);
  o.density = a.density;
  o.reps = a.reps;
  o.threads = a.threads;
  o.check = !a.no_check;
  const BenchReport rep = run_bench(o);
  std::cout << bench_table(rep);
  if (!a.json.empty()) emit(a.json, bench_json(rep));
  if (!a.counters_json.empty()) emit(a.counters_json, bench_counters_json(rep));
  if (!rep.valid) return kMismatch;
  return a.strict && !rep.trends_ok ? kMismatch : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shortest paths in weighted unit-disk graphs"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Seed for generators, sampling and perturbation")->capture_default_str();
  app.add_option("--perturb", g.perturb, "Perturbation size for degenerate diagram builds (0 disables)")
      ->capture_default_str();

  SsspArgs sa;
  auto* sssp = app.add_subcommand("sssp", "Distances from one source; CSV id,x,y,dist,pred");
  sssp->add_option("input", sa.input, "Point file (x y per line), - for stdin")->required();
  sssp->add_option("source", sa.source, "Source index")->required();
  sssp->add_option("-o,--out", sa.out, "Output CSV (default stdout)");
  sssp->add_flag("--oracle", sa.oracle, "Compare against Dijkstra on the explicit graph");
  sssp->add_option("--svg", sa.svg, "Write the shortest-path tree as SVG");

  VdArgs va;
  auto* vd = app.add_subcommand("vd", "Half-plane weighted Voronoi diagrams");
  vd->require_subcommand(1);
  auto* vd_build = vd->add_subcommand("build", "Build the diagram of one site file");
  vd_build->add_option("sites", va.sites_a, "Site file (x y w per line)")->required();
  auto* vd_merge = vd->add_subcommand("merge", "Build two diagrams and merge them");
  vd_merge->add_option("a", va.sites_a, "First site file")->required();
  vd_merge->add_option("b", va.sites_b, "Second site file")->required();
  for (auto* sub : {vd_build, vd_merge}) {
    sub->add_option("-o,--out", va.out, "Diagram text output (default stdout)");
    sub->add_option("--svg", va.svg, "Write the diagram as SVG");
    sub->add_option("--check", va.check, "Validate with k sampled queries against a linear scan");
  }

  NnArgs na;
  auto* nn = app.add_subcommand("nn", "Answer an insert/query op file");
  nn->add_option("ops", na.ops, "Op file (I x y w / Q x y)")->required();
  nn->add_option("--solver", na.solver, "dyn, log, offline or brute")
      ->check(CLI::IsMember({"dyn", "log", "offline", "brute"}))
      ->capture_default_str();
  nn->add_option("-o,--out", na.out, "Answers, one 'id distance' line per query");
  nn->add_flag("--count-ops", na.count_ops, "Print operation counters to stderr");

  GenArgs ga;
  auto* gen = app.add_subcommand("gen", "Generate a point file");
  gen->add_option("kind", ga.kind, "uniform, clusters, onecell or chain")
      ->required()
      ->check(CLI::IsMember({"uniform", "clusters", "onecell", "chain"}));
  gen->add_option("n", ga.n, "Number of points")->required();
  gen->add_option("--density", ga.density, "Uniform and cluster squares have side sqrt(n)/density")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  gen->add_option("-o,--out", ga.out, "Output file (default stdout)");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Timed runs with op counters and trend checks");
  bench->add_option("suite", ba.suite, "merge, nn or sssp")->required()->check(CLI::IsMember({"merge", "nn", "sssp"}));
  bench->add_option("--sizes", ba.sizes, "Instance sizes")->delimiter(',');
  bench->add_option("--seeds", ba.seeds, "Seeds (default: --seed)")->delimiter(',');
  bench->add_option("--solvers", ba.solvers, "Solvers to run")->delimiter(',');
  bench->add_option("--kind", ba.kind, "Generator for the sssp suite")
      ->check(CLI::IsMember({"uniform", "clusters", "onecell", "chain"}))
      ->capture_default_str();
  bench->add_option("--density", ba.density, "Generator density for the sssp suite")->capture_default_str();
  bench->add_option("--reps", ba.reps, "Timing repetitions per merge")->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--threads", ba.threads, "Worker threads (default: cores, capped by UDG_SSSP_THREADS)");
  bench->add_option("--json", ba.json, "Write the full report as JSON");
  bench->add_option("--counters-json", ba.counters_json, "Write the report without timings as JSON");
  bench->add_flag("--no-check", ba.no_check, "Skip answer cross-checks");
  bench->add_flag("--strict", ba.strict, "Exit 1 when a trend check fails");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();
  vd_build->fallthrough();
  vd_merge->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*sssp) return cmd_sssp(sa);
    if (*vd) {
      va.merge = vd_merge->parsed();
      return cmd_vd(va, g);
    }
    if (*nn) return cmd_nn(na);
    if (*gen) return cmd_gen(ga, g);
    if (*bench) return cmd_bench(ba, g);
  } catch (const Error& e) {
    std::cerr << "udgsp: " << e.what() << '\n';
    const bool usage = e.code() == ErrorCode::ParseError || e.code() == ErrorCode::UnknownSource ||
                       e.code() == ErrorCode::SiteAboveLine || e.code() == ErrorCode::QueryBelowLine ||
                       e.code() == ErrorCode::QueryBeforeAnyInsert || e.code() == ErrorCode::EmptyInput;
    return usage ? kUsage : kMismatch;
  } catch (const std::exception& e) {
    std::cerr << "udgsp: " << e.what() << '\n';
    return kMismatch;
  }
  return kOk;
}

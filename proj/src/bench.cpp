#include "udg/bench.hpp"

#include <sys/resource.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <thread>

#include <json.hpp>

#include "udg/awnn.hpp"
#include "udg/counters.hpp"
#include "udg/sssp.hpp"
#include "udg/vdmerge.hpp"

namespace udg {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void put_counters(BenchRecord& rec, const OpCounters& c) {
  rec.counters["merges"] = c.merges;
  rec.counters["trace_steps"] = c.trace_steps;
  rec.counters["spoke_crossings"] = c.spoke_crossings;
  rec.counters["arc_crossings"] = c.arc_crossings;
  rec.counters["retries"] = c.retries;
  rec.counters["locates"] = c.locates;
  rec.counters["heap_ops"] = c.heap_ops;
  rec.counters["rebuild_sites"] = c.rebuild_sites;
  rec.counters["flushes"] = c.flushes;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

void merge_job(const BenchOptions& opts, BenchRecord& rec) {
  const std::size_t half = rec.n / 2;
  const double width = std::max(1.0, rec.n / 5.0);
  auto sa = generate_sites(half, 2 * rec.seed + 1, width);
  auto sb = generate_sites(rec.n - half, 2 * rec.seed + 2, width);
  for (auto& s : sb) s.id += static_cast<int>(half);
  const HalfPlaneVD va = build_vdplus(sa);
  const HalfPlaneVD vb = build_vdplus(sb);

  reset_counters();
  MergeStats st;
  std::vector<double> times;
  HalfPlaneVD merged;
  auto t0 = Clock::now();
  merged = merge_vdplus(va, vb, {&st, nullptr});
  times.push_back(ms_since(t0));
  put_counters(rec, counters());
  for (int r = 1; r < opts.reps; ++r) {
    t0 = Clock::now();
    merged = merge_vdplus(va, vb);
    times.push_back(ms_since(t0));
  }
  rec.wall_ms = median(times);
  rec.unit_ms = rec.wall_ms;
  rec.counters["max_spoke_crossings"] = st.max_spoke_crossings;
  rec.counters["components"] = st.components;
  rec.counters["faces"] = merged.faces.size();
  rec.counters["footprint_vertices"] = merged.vertices.size();
  rec.metrics["crossings_per_site"] =
      static_cast<double>(st.arc_crossings + st.spoke_crossings) / static_cast<double>(std::max<std::size_t>(1, rec.n));
  rec.metrics["euler"] = static_cast<double>(merged.euler_characteristic());
}

// FNV-1a over the answered site ids.
std::uint64_t answer_hash(const std::vector<Nearest>& answers) {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& a : answers) {
    h ^= static_cast<std::uint64_t>(static_cast<std::int64_t>(a.site_id));
    h *= 1099511628211ull;
  }
  return h;
}

template <class NN>
std::vector<Nearest> run_online(const std::vector<NNOp>& ops, NN& nn) {
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

void nn_job(BenchRecord& rec) {
  const auto ops = generate_ops(rec.n, rec.seed, 0.5, std::max(30.0, rec.n / 100.0));
  reset_counters();
  const auto t0 = Clock::now();
  std::vector<Nearest> answers;
  std::size_t retained = 0;
  if (rec.solver == "dyn") {
    DynamicNN nn;
    answers = run_online(ops, nn);
    retained = nn.retained_sites();
    rec.counters["levels"] = nn.levels();
  } else if (rec.solver == "log") {
    LogMethodNN nn;
    answers = run_online(ops, nn);
    retained = nn.size();
    rec.counters["rebuild_work"] = nn.rebuild_work();
  } else if (rec.solver == "brute") {
    BruteNN nn;
    answers = run_online(ops, nn);
    retained = nn.size();
  } else if (rec.solver == "offline") {
    answers = offline_solve(ops);
  } else {
    throw Error(ErrorCode::ParseError, "unknown nn solver '" + rec.solver + "'");
  }
  rec.wall_ms = ms_since(t0);
  rec.unit_ms = rec.wall_ms / static_cast<double>(std::max<std::size_t>(1, ops.size()));
  put_counters(rec, counters());
  rec.counters["queries"] = answers.size();
  rec.counters["footprint_sites"] = retained;
  rec.counters["answer_hash"] = answer_hash(answers);
}

void sssp_job(const BenchOptions& opts, BenchRecord& rec) {
  const auto pts = generate_points(opts.kind, rec.n, rec.seed, opts.density);
  if (pts.empty()) return;
  reset_counters();
  SsspStats st;
  const auto t0 = Clock::now();
  DistTable dt;
  if (rec.solver == "wangxue") {
    dt = sssp_wangxue(pts, 0, {}, &st);
  } else if (rec.solver == "dijkstra") {
    dt = dijkstra_baseline(pts, 0);
  } else {
    throw Error(ErrorCode::ParseError, "unknown sssp solver '" + rec.solver + "'");
  }
  rec.wall_ms = ms_since(t0);
  rec.unit_ms = rec.wall_ms;
  put_counters(rec, counters());
  rec.counters["iterations"] = st.iterations;
  rec.counters["pair_updates"] = st.pair_updates;
  rec.counters["same_cell_updates"] = st.same_cell_updates;
  rec.counters["patch_points"] = st.patch_points;
  rec.counters["nonadjacent"] = st.nonadjacent;
  rec.counters["reached"] = static_cast<std::uint64_t>(
      std::count_if(dt.dist.begin(), dt.dist.end(), [](double d) { return std::isfinite(d); }));
  if (opts.check && rec.solver != "dijkstra") {
    rec.metrics["max_rel_dev"] = max_relative_deviation(dt, dijkstra_baseline(pts, 0));
  }
}

std::vector<std::string> default_solvers(const std::string& suite) {
  if (suite == "merge") return {"merge"};
  if (suite == "nn") return {"dyn", "log"};
  if (suite == "sssp") return {"wangxue", "dijkstra"};
  throw Error(ErrorCode::ParseError, "unknown bench suite '" + suite + "'");
}

void add_trends(BenchReport& rep, const std::vector<std::string>& solvers) {
  for (const auto& solver : solvers) {
    std::map<std::size_t, std::vector<double>> by_n;
    for (const auto& r : rep.records) {
      if (r.solver == solver) by_n[r.n].push_back(r.unit_ms);
    }
    std::vector<std::pair<std::size_t, double>> med;
    for (const auto& [n, v] : by_n) med.emplace_back(n, median(v));
    auto add = [&](std::size_t i, std::size_t j, double limit) {
      BenchTrend t{solver, med[i].first, med[j].first, med[j].second / std::max(med[i].second, 1e-12), limit, true};
      t.ok = limit == 0.0 || t.ratio <= limit;
      rep.trends_ok = rep.trends_ok && t.ok;
      rep.trends.push_back(t);
    };
    for (std::size_t i = 0; i + 1 < med.size(); ++i) {
      const bool doubling = med[i + 1].first == 2 * med[i].first;
      add(i, i + 1, rep.options.suite == "merge" && doubling ? 2.6 : 0.0);
    }
    // Per-op growth over a factor of 16 in n.
    if (rep.options.suite == "nn") {
      for (std::size_t i = 0; i < med.size(); ++i) {
        for (std::size_t j = i + 1; j < med.size(); ++j) {
          if (med[j].first == 16 * med[i].first) add(i, j, 4.0);
        }
      }
    }
  }
}

void cross_check(BenchReport& rep) {
  const auto& opts = rep.options;
  if (!opts.check) return;
  if (opts.suite == "nn") {
    std::map<std::pair<std::size_t, std::uint64_t>, std::uint64_t> first;
    for (const auto& r : rep.records) {
      const auto key = std::make_pair(r.n, r.seed);
      const auto h = r.counters.at("answer_hash");
      const auto [it, fresh] = first.emplace(key, h);
      if (!fresh && it->second != h) rep.valid = false;
    }
  }
  for (const auto& r : rep.records) {
    if (auto it = r.metrics.find("max_rel_dev"); it != r.metrics.end() && !(it->second <= 1e-6)) rep.valid = false;
    if (auto it = r.counters.find("nonadjacent"); it != r.counters.end() && it->second != 0) rep.valid = false;
    if (auto it = r.metrics.find("euler"); it != r.metrics.end() && it->second != 1.0) rep.valid = false;
  }
}

}  // namespace

int bench_threads() {
  int t = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("UDG_SSSP_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) t = std::min(t, cap);
  }
  return t;
}

BenchReport run_bench(const BenchOptions& opts) {
  BenchReport rep;
  rep.options = opts;
  const auto solvers = opts.solvers.empty() ? default_solvers(opts.suite) : opts.solvers;
  if (!opts.solvers.empty()) default_solvers(opts.suite);  // rejects unknown suites
  for (const auto& solver : solvers) {
    for (std::size_t n : opts.sizes) {
      for (std::uint64_t seed : opts.seeds) rep.records.push_back({solver, n, seed, 0.0, 0.0, {}, {}});
    }
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(rep.records.size());
  auto worker = [&] {
    for (std::size_t i = next++; i < rep.records.size(); i = next++) {
      try {
        BenchRecord& rec = rep.records[i];
        if (opts.suite == "merge") {
          merge_job(opts, rec);
        } else if (opts.suite == "nn") {
          nn_job(rec);
        } else {
          sssp_job(opts, rec);
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, opts.threads > 0 ? opts.threads : bench_threads());
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  rusage ru{};
  getrusage(RUSAGE_SELF, &ru);
  rep.peak_rss_kb = ru.ru_maxrss;
  cross_check(rep);
  add_trends(rep, solvers);
  return rep;
}

namespace {

nlohmann::json report_json(const BenchReport& r, bool timings) {
  using nlohmann::json;
  const auto& o = r.options;
  json j;
  j["suite"] = o.suite;
  j["sizes"] = o.sizes;
  j["seeds"] = o.seeds;
  if (o.suite == "sssp") {
    j["kind"] = to_string(o.kind);
    j["density"] = o.density;
  }
  json recs = json::array();
  for (const auto& rec : r.records) {
    json x{{"solver", rec.solver}, {"n", rec.n}, {"seed", rec.seed}, {"counters", rec.counters}};
    json m = json::object();
    for (const auto& [k, v] : rec.metrics) m[k] = std::isfinite(v) ? json(v) : json("inf");
    x["metrics"] = m;
    if (timings) {
      x["wall_ms"] = rec.wall_ms;
      x["unit_ms"] = rec.unit_ms;
    }
    recs.push_back(std::move(x));
  }
  j["records"] = std::move(recs);
  j["valid"] = r.valid;
  if (timings) {
    json tr = json::array();
    for (const auto& t : r.trends) {
      tr.push_back({{"solver", t.solver}, {"n_lo", t.n_lo}, {"n_hi", t.n_hi}, {"ratio", t.ratio},
                    {"limit", t.limit}, {"ok", t.ok}});
    }
    j["trends"] = std::move(tr);
    j["trends_ok"] = r.trends_ok;
    j["peak_rss_kb"] = r.peak_rss_kb;
  }
  return j;
}

}  // namespace

std::string bench_json(const BenchReport& r) { return report_json(r, true).dump(2) + "\n"; }

std::string bench_counters_json(const BenchReport& r) { return report_json(r, false).dump(2) + "\n"; }

std::string bench_table(const BenchReport& r) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-10s %9s %8s %12s %12s %12s %12s\n", "solver", "n", "seed", "wall_ms", "unit_us",
                "merges", "trace_steps");
  out += buf;
  for (const auto& rec : r.records) {
    auto get = [&](const char* k) { return rec.counters.count(k) ? rec.counters.at(k) : 0; };
    std::snprintf(buf, sizeof buf, "%-10s %9zu %8llu %12.3f %12.3f %12llu %12llu\n", rec.solver.c_str(), rec.n,
                  static_cast<unsigned long long>(rec.seed), rec.wall_ms, rec.unit_ms * 1000.0,
                  static_cast<unsigned long long>(get("merges")), static_cast<unsigned long long>(get("trace_steps")));
    out += buf;
  }
  if (!r.trends.empty()) out += "\ntrend      n_lo -> n_hi     ratio   limit\n";
  for (const auto& t : r.trends) {
    std::snprintf(buf, sizeof buf, "%-10s %6zu -> %-7zu %7.3f %7s %s\n", t.solver.c_str(), t.n_lo, t.n_hi, t.ratio,
                  t.limit > 0 ? std::to_string(t.limit).substr(0, 4).c_str() : "-", t.ok ? "ok" : "FAIL");
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "\nvalid %s, trends %s, peak rss %ld KiB\n", r.valid ? "yes" : "NO",
                r.trends_ok ? "ok" : "FAIL", r.peak_rss_kb);
  out += buf;
  return out;
}

}  // namespace udg

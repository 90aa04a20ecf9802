// Benchmark harness: timed jobs per (solver, n, seed) with operation counters
// and scaling trend checks.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "udg/gen.hpp"

namespace udg {

struct BenchOptions {
  std::string suite = "merge";  // merge | nn | sssp
  std::vector<std::size_t> sizes;
  std::vector<std::uint64_t> seeds{1};
  // Empty picks the suite default: merge; dyn,log; wangxue,dijkstra.
  std::vector<std::string> solvers;
  int reps = 3;      // timing repetitions for merge jobs
  int threads = 0;   // 0: hardware concurrency capped by UDG_SSSP_THREADS
  GenKind kind = GenKind::Uniform;
  double density = 1.0;
  bool check = true;  // cross-check answers (sssp against Dijkstra, nn across solvers)
};

struct BenchRecord {
  std::string solver;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double wall_ms = 0.0;
  double unit_ms = 0.0;  // per merge, per op, or per run
  std::map<std::string, std::uint64_t> counters;
  std::map<std::string, double> metrics;  // deterministic non-counter results
};

struct BenchTrend {
  std::string solver;
  std::size_t n_lo = 0;
  std::size_t n_hi = 0;
  double ratio = 0.0;
  double limit = 0.0;  // 0 when unchecked
  bool ok = true;
};

struct BenchReport {
  BenchOptions options;
  std::vector<BenchRecord> records;
  std::vector<BenchTrend> trends;
  long peak_rss_kb = 0;
  bool valid = true;  // all cross-checks agreed
  bool trends_ok = true;
};

// Threads for bench jobs from hardware concurrency and UDG_SSSP_THREADS.
int bench_threads();

BenchReport run_bench(const BenchOptions& opts);

std::string bench_json(const BenchReport& r);
// The same report with every timing field removed; equal across runs with
// the same options.
std::string bench_counters_json(const BenchReport& r);
std::string bench_table(const BenchReport& r);

}  // namespace udg

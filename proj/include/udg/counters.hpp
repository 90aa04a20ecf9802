// Per-thread operation counters read by the benchmark harness.

#pragma once

#include <cstdint>

namespace udg {

struct OpCounters {
  std::uint64_t merges = 0;
  std::uint64_t trace_steps = 0;
  std::uint64_t spoke_crossings = 0;
  std::uint64_t arc_crossings = 0;
  std::uint64_t retries = 0;
  std::uint64_t locates = 0;
  std::uint64_t heap_ops = 0;
  std::uint64_t rebuild_sites = 0;  // sites fed into static rebuilds
  std::uint64_t flushes = 0;
};

inline OpCounters& counters() {
  thread_local OpCounters c;
  return c;
}

inline void reset_counters() { counters() = OpCounters{}; }

}  // namespace udg

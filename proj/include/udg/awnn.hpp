// Additively weighted nearest neighbors: sites below the axis, queries on or
// above it.
//
// DynamicNN keeps a static diagram of most of the sites plus a recursive
// buffer for recent insertions; the buffer is folded in by a linear merge
// once it outgrows |P| / log2 |P|. LogMethodNN is the binary-carry baseline
// and OfflineTreeNN answers a whole insert/query sequence from a tree of
// merged diagrams. BruteNN is the linear-scan oracle.
//
// Answers carry the exact weighted distance to the returned site. Ties go to
// the smaller id.

#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "udg/locator.hpp"
#include "udg/vdplus.hpp"

namespace udg {

// A built diagram with its locator. The diagram may hold perturbed copies of
// the sites; distances are recomputed from the originals.
class StaticNN {
 public:
  StaticNN() = default;
  explicit StaticNN(std::vector<WeightedSite> sites);
  StaticNN(std::vector<WeightedSite> sites, HalfPlaneVD vd);

  bool empty() const { return sites_.empty(); }
  std::size_t size() const { return sites_.size(); }
  const std::vector<WeightedSite>& sites() const { return sites_; }
  const HalfPlaneVD& diagram() const { return *vd_; }
  Nearest query(Point q) const;

  // Merges two structures; falls back to a fresh build if the merge stalls.
  static StaticNN merged(const StaticNN& a, const StaticNN& b);

 private:
  void index();

  std::vector<WeightedSite> sites_;
  std::unordered_map<int, std::size_t> by_id_;
  std::shared_ptr<const HalfPlaneVD> vd_;
  std::shared_ptr<const Locator> loc_;
};

// Keeps the nearer answer; equal distances go to the smaller id.
inline Nearest nearer(const Nearest& a, const Nearest& b) {
  if (a.site_id < 0) return b;
  if (b.site_id < 0) return a;
  if (b.distance < a.distance || (b.distance == a.distance && b.site_id < a.site_id)) return b;
  return a;
}

class DynamicNN {
 public:
  static constexpr std::size_t kFlatLimit = 8;

  DynamicNN() = default;

  void insert(const WeightedSite& s);
  Nearest query(Point q) const;

  std::size_t size() const { return total_; }
  std::size_t buffer_size() const { return buffer_ ? buffer_->size() : 0; }
  std::size_t static_size() const { return static_.size(); }
  // Number of nested structures including this one.
  std::size_t levels() const { return 1 + (buffer_ ? buffer_->levels() : 0); }
  // Sites held by all static parts and flat lists.
  std::size_t retained_sites() const;
  // |P'| <= |P| / log2 |P| at every level with |P| >= 4.
  bool invariant_holds() const;
  std::size_t flushes() const { return flushes_; }

  // Every site currently stored, as one diagram.
  StaticNN flatten() const;

 private:
  void flush();

  std::size_t total_ = 0;
  std::vector<WeightedSite> flat_;
  StaticNN static_;
  std::unique_ptr<DynamicNN> buffer_;
  std::size_t flushes_ = 0;
};

class LogMethodNN {
 public:
  void insert(const WeightedSite& s);
  Nearest query(Point q) const;
  std::size_t size() const { return total_; }
  std::size_t bucket_count() const;
  // Sites passed to rebuilds so far.
  std::size_t rebuild_work() const { return rebuild_work_; }

 private:
  std::vector<StaticNN> buckets_;  // bucket k is empty or holds 2^k sites
  std::size_t total_ = 0;
  std::size_t rebuild_work_ = 0;
};

class BruteNN {
 public:
  void insert(const WeightedSite& s);
  Nearest query(Point q) const;
  std::size_t size() const { return sites_.size(); }

 private:
  std::vector<WeightedSite> sites_;
};

struct InsertOp {
  WeightedSite site;
};
struct QueryOp {
  Point q;
};
using NNOp = std::variant<InsertOp, QueryOp>;

// Tree over the insertions in order; a query sees the inserts before it.
class OfflineTreeNN {
 public:
  explicit OfflineTreeNN(std::vector<WeightedSite> inserts);

  // Nearest among the first `prefix` inserted sites.
  Nearest query(std::size_t prefix, Point q) const;
  std::size_t size() const { return n_; }
  // Sum of node sizes over the tree.
  std::size_t stored_sites() const;

 private:
  Nearest query_node(std::size_t node, std::size_t lo, std::size_t hi, std::size_t prefix, Point q) const;

  std::size_t n_ = 0;
  std::vector<StaticNN> nodes_;
};

// One answer per query op, in order. Throws QueryBeforeAnyInsert.
std::vector<Nearest> offline_solve(const std::vector<NNOp>& ops);

// `I x y w` / `Q x y` lines; insert ids are 0, 1, ... in order.
std::vector<NNOp> parse_ops(const std::string& text);
std::string format_ops(const std::vector<NNOp>& ops);

}  // namespace udg

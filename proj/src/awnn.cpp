#include "udg/awnn.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "udg/counters.hpp"
#include "udg/vdmerge.hpp"

namespace udg {

StaticNN::StaticNN(std::vector<WeightedSite> sites) : sites_(std::move(sites)) {
  if (sites_.empty()) return;
  counters().rebuild_sites += sites_.size();
  vd_ = std::make_shared<const HalfPlaneVD>(build_vdplus(sites_));
  index();
}

StaticNN::StaticNN(std::vector<WeightedSite> sites, HalfPlaneVD vd) : sites_(std::move(sites)) {
  if (sites_.empty()) return;
  vd_ = std::make_shared<const HalfPlaneVD>(std::move(vd));
  index();
}

void StaticNN::index() {
  by_id_.clear();
  by_id_.reserve(sites_.size());
  for (std::size_t i = 0; i < sites_.size(); ++i) by_id_.emplace(sites_[i].id, i);
  loc_ = std::make_shared<const Locator>(*vd_);
}

Nearest StaticNN::query(Point q) const {
  if (q.y < 0.0) throw Error(ErrorCode::QueryBelowLine, "query below the axis");
  if (empty()) throw Error(ErrorCode::EmptyStructure, "empty structure");
  const Nearest hit = loc_->locate(q);
  const WeightedSite& s = sites_[by_id_.at(hit.site_id)];
  return {s.id, weighted_distance(s, q)};
}

StaticNN StaticNN::merged(const StaticNN& a, const StaticNN& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  std::vector<WeightedSite> all = a.sites_;
  all.insert(all.end(), b.sites_.begin(), b.sites_.end());
  counters().rebuild_sites += all.size();
  try {
    return StaticNN(std::move(all), merge_vdplus(*a.vd_, *b.vd_));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::TraceStall && e.code() != ErrorCode::DegenerateTangency &&
        e.code() != ErrorCode::NearTangency) {
      throw;
    }
  }
  counters().retries++;
  std::vector<WeightedSite> again = a.sites_;
  again.insert(again.end(), b.sites_.begin(), b.sites_.end());
  return StaticNN(std::move(again));
}

// ---------------------------------------------------------------------------

void DynamicNN::insert(const WeightedSite& s) {
  if (!(s.y < 0.0)) throw Error(ErrorCode::SiteAboveLine, "site " + std::to_string(s.id));
  ++total_;
  if (static_.empty() && !buffer_ && total_ <= kFlatLimit) {
    flat_.push_back(s);
    return;
  }
  if (!flat_.empty()) {
    static_ = StaticNN(std::move(flat_));
    flat_.clear();
  }
  if (!buffer_) buffer_ = std::make_unique<DynamicNN>();
  buffer_->insert(s);
  if (total_ >= 4 && static_cast<double>(buffer_->size()) > total_ / std::log2(static_cast<double>(total_))) {
    flush();
  }
}

void DynamicNN::flush() {
  static_ = StaticNN::merged(static_, buffer_->flatten());
  buffer_.reset();
  ++flushes_;
  counters().flushes++;
}

StaticNN DynamicNN::flatten() const {
  StaticNN out = flat_.empty() ? static_ : StaticNN(flat_);
  if (buffer_) out = StaticNN::merged(out, buffer_->flatten());
  return out;
}

Nearest DynamicNN::query(Point q) const {
  if (q.y < 0.0) throw Error(ErrorCode::QueryBelowLine, "query below the axis");
  if (total_ == 0) throw Error(ErrorCode::EmptyStructure, "empty structure");
  Nearest best;
  for (const auto& s : flat_) best = nearer(best, {s.id, weighted_distance(s, q)});
  if (!static_.empty()) best = nearer(best, static_.query(q));
  if (buffer_) best = nearer(best, buffer_->query(q));
  return best;
}

std::size_t DynamicNN::retained_sites() const {
  return flat_.size() + static_.size() + (buffer_ ? buffer_->retained_sites() : 0);
}

bool DynamicNN::invariant_holds() const {
  if (total_ >= 4 && static_cast<double>(buffer_size()) > total_ / std::log2(static_cast<double>(total_))) {
    return false;
  }
  return !buffer_ || buffer_->invariant_holds();
}

// ---------------------------------------------------------------------------

void LogMethodNN::insert(const WeightedSite& s) {
  if (!(s.y < 0.0)) throw Error(ErrorCode::SiteAboveLine, "site " + std::to_string(s.id));
  std::vector<WeightedSite> carry{s};
  std::size_t k = 0;
  while (k < buckets_.size() && !buckets_[k].empty()) {
    const auto& more = buckets_[k].sites();
    carry.insert(carry.end(), more.begin(), more.end());
    buckets_[k] = StaticNN();
    ++k;
  }
  if (k == buckets_.size()) buckets_.emplace_back();
  rebuild_work_ += carry.size();
  buckets_[k] = StaticNN(std::move(carry));
  ++total_;
}

Nearest LogMethodNN::query(Point q) const {
  if (q.y < 0.0) throw Error(ErrorCode::QueryBelowLine, "query below the axis");
  if (total_ == 0) throw Error(ErrorCode::EmptyStructure, "empty structure");
  Nearest best;
  for (const auto& b : buckets_) {
    if (!b.empty()) best = nearer(best, b.query(q));
  }
  return best;
}

std::size_t LogMethodNN::bucket_count() const {
  std::size_t n = 0;
  for (const auto& b : buckets_) n += b.empty() ? 0 : 1;
  return n;
}

void BruteNN::insert(const WeightedSite& s) {
  if (!(s.y < 0.0)) throw Error(ErrorCode::SiteAboveLine, "site " + std::to_string(s.id));
  sites_.push_back(s);
}

Nearest BruteNN::query(Point q) const {
  if (q.y < 0.0) throw Error(ErrorCode::QueryBelowLine, "query below the axis");
  if (sites_.empty()) throw Error(ErrorCode::EmptyStructure, "empty structure");
  return nearest_site_bruteforce(sites_, q);
}

// ---------------------------------------------------------------------------

namespace {

void build_tree(std::vector<StaticNN>& nodes, const std::vector<WeightedSite>& sites, std::size_t node,
                std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) {
    nodes[node] = StaticNN(std::vector<WeightedSite>{sites[lo]}, singleton_vd(sites[lo]));
    return;
  }
  const std::size_t mid = (lo + hi) / 2;
  build_tree(nodes, sites, 2 * node, lo, mid);
  build_tree(nodes, sites, 2 * node + 1, mid, hi);
  nodes[node] = StaticNN::merged(nodes[2 * node], nodes[2 * node + 1]);
}

}  // namespace

OfflineTreeNN::OfflineTreeNN(std::vector<WeightedSite> inserts) : n_(inserts.size()) {
  for (const auto& s : inserts) {
    if (!(s.y < 0.0)) throw Error(ErrorCode::SiteAboveLine, "site " + std::to_string(s.id));
  }
  if (n_ == 0) return;
  nodes_.resize(4 * n_);
  build_tree(nodes_, inserts, 1, 0, n_);
}

Nearest OfflineTreeNN::query(std::size_t prefix, Point q) const {
  if (q.y < 0.0) throw Error(ErrorCode::QueryBelowLine, "query below the axis");
  if (prefix == 0 || n_ == 0) throw Error(ErrorCode::QueryBeforeAnyInsert, "no site inserted yet");
  return query_node(1, 0, n_, std::min(prefix, n_), q);
}

Nearest OfflineTreeNN::query_node(std::size_t node, std::size_t lo, std::size_t hi, std::size_t prefix,
                                  Point q) const {
  if (prefix <= lo) return {};
  if (hi <= prefix) return nodes_[node].query(q);
  const std::size_t mid = (lo + hi) / 2;
  return nearer(query_node(2 * node, lo, mid, prefix, q), query_node(2 * node + 1, mid, hi, prefix, q));
}

std::size_t OfflineTreeNN::stored_sites() const {
  std::size_t n = 0;
  for (const auto& s : nodes_) n += s.size();
  return n;
}

std::vector<Nearest> offline_solve(const std::vector<NNOp>& ops) {
  std::vector<WeightedSite> inserts;
  for (const auto& op : ops) {
    if (const auto* ins = std::get_if<InsertOp>(&op)) inserts.push_back(ins->site);
  }
  const OfflineTreeNN tree(inserts);
  std::vector<Nearest> out;
  std::size_t seen = 0;
  for (const auto& op : ops) {
    if (std::holds_alternative<InsertOp>(op)) {
      ++seen;
    } else {
      out.push_back(tree.query(seen, std::get<QueryOp>(op).q));
    }
  }
  return out;
}

std::vector<NNOp> parse_ops(const std::string& text) {
  std::vector<NNOp> ops;
  std::istringstream in(text);
  std::string line;
  int next_id = 0;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    auto bad = [&] { return Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + line); };
    if (tag == "I") {
      WeightedSite s;
      if (!(ls >> s.x >> s.y >> s.w)) throw bad();
      s.id = next_id++;
      ops.push_back(InsertOp{s});
    } else if (tag == "Q") {
      Point q;
      if (!(ls >> q.x >> q.y)) throw bad();
      ops.push_back(QueryOp{q});
    } else {
      throw bad();
    }
    std::string extra;
    if (ls >> extra) throw bad();
  }
  return ops;
}

std::string format_ops(const std::vector<NNOp>& ops) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (const auto& op : ops) {
    if (const auto* ins = std::get_if<InsertOp>(&op)) {
      out << "I " << ins->site.x << ' ' << ins->site.y << ' ' << ins->site.w << '\n';
    } else {
      const Point q = std::get<QueryOp>(op).q;
      out << "Q " << q.x << ' ' << q.y << '\n';
    }
  }
  return out.str();
}

}  // namespace udg

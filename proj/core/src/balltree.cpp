#include "qtr/balltree.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>

#include "qtr/error.hpp"

namespace qtr {

SplitResult BallTree::split_fingerprints(std::span<const uint32_t> ids,
                                         std::span<const Fingerprint> fps) {
  const std::size_t n = ids.size();
  if (n < 2) throw ContractError("split_fingerprints needs at least 2 ids");

  const uint32_t fl = fps[ids[0]].length();
  std::vector<std::size_t> counts(fl, 0);
  for (uint32_t id : ids) {
    auto words = fps[id].words();
    for (std::size_t w = 0; w < words.size(); ++w) {
      uint64_t word = words[w];
      while (word) {
        counts[w * 64 + std::countr_zero(word)]++;
        word &= word - 1;
      }
    }
  }

  uint32_t best_bit = 0;
  std::size_t best_score = n;  // score for k = 0
  for (uint32_t j = 0; j < fl; ++j) {
    std::size_t score = static_cast<std::size_t>(
        std::abs(static_cast<long long>(n) - 2ll * static_cast<long long>(counts[j])));
    if (score < best_score) {
      best_score = score;
      best_bit = j;
      if (score == 0) break;  // ties break to the lowest index anyway
    }
  }

  SplitResult r;
  r.split_bit = best_bit;
  for (uint32_t id : ids) {
    if (fps[id].test(best_bit)) r.right_ids.push_back(id);
    else r.left_ids.push_back(id);
  }

  // rebalance: move the oversized side's tail, keeping its order
  const std::size_t target_left = n / 2;
  const std::size_t target_right = n - target_left;
  auto move_tail = [](std::vector<uint32_t>& from, std::vector<uint32_t>& to,
                      std::size_t excess) {
    to.insert(to.end(), from.end() - static_cast<std::ptrdiff_t>(excess), from.end());
    from.resize(from.size() - excess);
  };
  if (r.left_ids.size() > target_left)
    move_tail(r.left_ids, r.right_ids, r.left_ids.size() - target_left);
  else if (r.right_ids.size() > target_right)
    move_tail(r.right_ids, r.left_ids, r.right_ids.size() - target_right);
  return r;
}

uint32_t BallTree::default_depth(std::size_t n) {
  uint32_t d = 1;
  while ((n >> d) >= 64 && (std::size_t{1} << d) <= n) ++d;
  return d;
}

namespace {

Fingerprint or_all(std::span<const uint32_t> ids, std::span<const Fingerprint> fps,
                   uint32_t fl) {
  std::vector<uint64_t> acc(fl / 64, 0);
  for (uint32_t id : ids) {
    auto words = fps[id].words();
    for (std::size_t w = 0; w < acc.size(); ++w) acc[w] |= words[w];
  }
  return Fingerprint(std::move(acc), fl);
}

struct Builder {
  std::span<const Fingerprint> fps;
  uint32_t fl;
  uint32_t depth;
  std::vector<Fingerprint> centroids;
  std::vector<std::vector<uint32_t>> leaves;

  // fills node and its subtree; d is the remaining depth at this node
  void build_node(std::size_t node, std::vector<uint32_t> ids, uint32_t d) {
    if (ids.size() < (std::size_t{1} << (d - 1)))
      throw ContractError("too few fingerprints for depth " + std::to_string(d) +
                          " subtree: " + std::to_string(ids.size()));
    if (d == 1) {
      centroids[node] = or_all(ids, fps, fl);
      std::sort(ids.begin(), ids.end());
      leaves[node - ((std::size_t{1} << (depth - 1)) - 1)] = std::move(ids);
      return;
    }
    auto split = BallTree::split_fingerprints(ids, fps);
    build_node(2 * node + 1, std::move(split.left_ids), d - 1);
    build_node(2 * node + 2, std::move(split.right_ids), d - 1);
    centroids[node] = bit_or(centroids[2 * node + 1], centroids[2 * node + 2]);
  }
};

}  // namespace

BallTree BallTree::build(std::vector<uint32_t> ids, std::span<const Fingerprint> fps,
                         uint32_t depth) {
  if (depth < 1) throw ContractError("tree depth must be at least 1");
  if (ids.empty()) throw ContractError("cannot build a tree over no fingerprints");
  const uint32_t fl = fps[ids.front()].length();
  Builder b{fps, fl, depth, {}, {}};
  b.centroids.assign((std::size_t{1} << depth) - 1, Fingerprint(fl));
  b.leaves.assign(std::size_t{1} << (depth - 1), {});
  b.build_node(0, std::move(ids), depth);
  return BallTree(depth, std::move(b.centroids), std::move(b.leaves));
}

BallTree BallTree::from_parts(uint32_t depth, std::vector<Fingerprint> centroids,
                              std::vector<std::vector<uint32_t>> leaf_members) {
  if (depth < 1) throw ContractError("tree depth must be at least 1");
  if (centroids.size() != (std::size_t{1} << depth) - 1 ||
      leaf_members.size() != std::size_t{1} << (depth - 1))
    throw ContractError("tree parts do not form a complete tree of the given depth");
  return BallTree(depth, std::move(centroids), std::move(leaf_members));
}

void BallTree::build_scan_cache(std::span<const Fingerprint> fps) const {
  const std::size_t wpf = centroids_.front().words().size();
  std::size_t total = 0;
  for (const auto& leaf : leaf_members_) total += leaf.size();
  leaf_words_.reserve(total * wpf);
  leaf_begin_.assign(leaf_count() + 1, 0);
  std::size_t m = 0;
  for (std::size_t leaf = 0; leaf < leaf_members_.size(); ++leaf) {
    leaf_begin_[leaf] = m;
    for (uint32_t id : leaf_members_[leaf]) {
      auto words = fps[id].words();
      leaf_words_.insert(leaf_words_.end(), words.begin(), words.end());
      ++m;
    }
  }
  leaf_begin_[leaf_members_.size()] = m;
}

namespace {

struct Searcher {
  const BallTree& tree;
  const Fingerprint& f;
  std::optional<std::size_t> limit;
  Deadline deadline;
  const uint64_t* qw;           // query words
  std::size_t wpf;              // words per fingerprint
  const uint64_t* leaf_words;   // contiguous member words, leaf-major
  const std::size_t* leaf_begin;
  std::size_t first_leaf;
  SearchResult out;

  bool expired() {
    return deadline && std::chrono::steady_clock::now() >= *deadline;
  }

  // centroid of node is already known to be a superset of f;
  // returns false to stop the whole traversal
  bool descend(std::size_t node) {
    if (expired()) {
      out.aborted = true;
      return false;
    }
    if (tree.is_leaf(node)) {
      out.stats.leaves_scanned++;
      const auto& ids = tree.members(node);
      const uint64_t* mw = leaf_words + leaf_begin[node - first_leaf] * wpf;
      for (uint32_t id : ids) {
        out.stats.fingerprints_compared++;
        bool sub = true;
        for (std::size_t w = 0; w < wpf; ++w) {
          if (qw[w] & ~mw[w]) {
            sub = false;
            break;
          }
        }
        mw += wpf;
        if (sub) {
          out.ids.push_back(id);
          if (limit && out.ids.size() >= *limit) {
            out.truncated = true;
            return false;
          }
        }
      }
      return true;
    }
    for (std::size_t child : {2 * node + 1, 2 * node + 2}) {
      if (is_submask(f, tree.centroid(child))) {
        out.stats.nodes_visited++;
        if (!descend(child)) return false;
      }
    }
    return true;
  }
};

}  // namespace

SearchResult BallTree::find_supersets(const Fingerprint& f,
                                      std::span<const Fingerprint> fps,
                                      std::optional<std::size_t> limit,
                                      Deadline deadline) const {
  if (f.length() != fl())
    throw ContractError("query fingerprint length does not match the index");
  if (leaf_begin_.empty()) build_scan_cache(fps);
  Searcher s{*this,
             f,
             limit,
             deadline,
             f.words().data(),
             f.words().size(),
             leaf_words_.data(),
             leaf_begin_.data(),
             first_leaf(),
             {}};
  s.out.stats.nodes_visited = 1;  // the root
  if (is_submask(f, centroids_.front())) s.descend(0);
  return std::move(s.out);
}

}  // namespace qtr

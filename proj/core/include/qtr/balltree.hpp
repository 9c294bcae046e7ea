#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qtr/fingerprint.hpp"

namespace qtr {

struct SplitResult {
  std::vector<uint32_t> left_ids;
  std::vector<uint32_t> right_ids;
  uint32_t split_bit = 0;
};

struct SearchStats {
  std::size_t nodes_visited = 0;
  std::size_t leaves_scanned = 0;
  std::size_t fingerprints_compared = 0;
};

struct SearchResult {
  std::vector<uint32_t> ids;
  bool truncated = false;
  bool aborted = false;  // deadline expired mid-search
  SearchStats stats;
};

using Deadline = std::optional<std::chrono::steady_clock::time_point>;

/// Complete binary tree of depth d over a fingerprint array. Internal nodes
/// carry OR-centroids; leaves carry sorted fingerprint-id lists. Nodes are
/// stored heap-style: root at 0, children of i at 2i+1 / 2i+2, leaves in the
/// last level.
class BallTree {
 public:
  // Splits ids on the bit whose set-count k minimizes |n - 2k| (lowest bit
  // index on ties); zero bits go left, one bits go right, then the oversized
  // side's tail (in input order) moves across until sizes are
  // floor(n/2) / ceil(n/2).
  static SplitResult split_fingerprints(std::span<const uint32_t> ids,
                                        std::span<const Fingerprint> fps);

  // Depth targeting ~64 fingerprints per leaf, capped so no leaf is empty.
  static uint32_t default_depth(std::size_t n);

  // Requires depth >= 1 and ids.size() >= 2^(depth-1).
  static BallTree build(std::vector<uint32_t> ids, std::span<const Fingerprint> fps,
                        uint32_t depth);

  // Reassembles a tree from persisted parts. centroids has 2^depth - 1
  // entries in heap order; leaf_members has 2^(depth-1) entries in
  // left-to-right leaf order.
  static BallTree from_parts(uint32_t depth, std::vector<Fingerprint> centroids,
                             std::vector<std::vector<uint32_t>> leaf_members);

  // All ids under the root whose fingerprint is a superset of f, left
  // subtree before right, pruning nodes whose centroid is not a superset
  // of f. Stops once limit ids are collected.
  SearchResult find_supersets(const Fingerprint& f, std::span<const Fingerprint> fps,
                              std::optional<std::size_t> limit = std::nullopt,
                              Deadline deadline = std::nullopt) const;

  uint32_t depth() const { return depth_; }
  uint32_t fl() const { return centroids_.front().length(); }
  std::size_t node_count() const { return centroids_.size(); }
  std::size_t leaf_count() const { return std::size_t{1} << (depth_ - 1); }
  std::size_t first_leaf() const { return leaf_count() - 1; }
  bool is_leaf(std::size_t node) const { return node >= first_leaf(); }

  const Fingerprint& centroid(std::size_t node) const { return centroids_[node]; }
  const std::vector<uint32_t>& members(std::size_t leaf_node) const {
    return leaf_members_[leaf_node - first_leaf()];
  }

 private:
  BallTree(uint32_t depth, std::vector<Fingerprint> centroids,
           std::vector<std::vector<uint32_t>> leaf_members)
      : depth_(depth), centroids_(std::move(centroids)),
        leaf_members_(std::move(leaf_members)) {}

  // Copies member fingerprints into a contiguous leaf-major buffer so leaf
  // scans are sequential reads instead of random accesses into fps. Built on
  // the first search; a tree is only ever searched against the fingerprint
  // array its ids index into.
  void build_scan_cache(std::span<const Fingerprint> fps) const;

  uint32_t depth_;
  std::vector<Fingerprint> centroids_;                // heap order
  std::vector<std::vector<uint32_t>> leaf_members_;   // per leaf, sorted

  mutable std::vector<uint64_t> leaf_words_;      // member words, leaf-major
  mutable std::vector<std::size_t> leaf_begin_;   // first member index per leaf
};

}  // namespace qtr

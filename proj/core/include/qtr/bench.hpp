#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qtr/balltree.hpp"
#include "qtr/engine.hpp"
#include "qtr/fingerprint.hpp"
#include "qtr/store.hpp"

namespace qtr {

// Exhaustive baseline: every id whose fingerprint is a superset of f, in id
// order. stats.fingerprints_compared counts examined fingerprints.
SearchResult linear_scan(const Fingerprint& f, std::span<const Fingerprint> fps,
                         std::optional<std::size_t> limit = std::nullopt,
                         Deadline deadline = std::nullopt);

// Full filter-and-verify query with the linear-scan filter instead of the
// tree; the benchmark's second system.
QueryResult find_meta_structures_linear(const std::string& query_smiles,
                                        const FingerprintStore& store,
                                        std::size_t limit = 10000,
                                        Deadline deadline = std::nullopt);

// Nearest-rank percentile: value at index ceil(p*m/100) of the sorted input
// (1-based). times need not be pre-sorted.
double nearest_rank_percentile(std::vector<double> times, int percent);

inline constexpr int kReportPercentiles[] = {10, 20, 30, 40, 50, 60, 70, 80, 90, 95};

struct SystemSeries {
  std::string name;
  std::vector<double> times_s;  // one entry per query, capped at the budget
  std::size_t finished = 0;     // queries completed within the budget
};

// Aligned plain-text table: one row per percentile, then the completion row.
// Byte-stable for identical inputs.
std::string format_report(const std::vector<SystemSeries>& systems, double budget_s);

struct PerQueryRow {
  std::string query;
  std::string system;
  double seconds;
  std::size_t candidates;
  std::size_t answers;
  bool truncated;
  bool finished;
};

struct BenchReport {
  std::vector<SystemSeries> systems;
  std::vector<PerQueryRow> rows;
  double budget_s = 60.0;
  std::size_t skipped_queries = 0;  // unparseable, excluded up front

  std::string table() const { return format_report(systems, budget_s); }
  std::string csv() const;
};

// Runs each parseable query once per system, single-threaded, aborting a
// query at the budget and marking it unfinished. systems is a subset of
// {"tree", "linear"}.
BenchReport run_benchmark(const std::filesystem::path& queries_path,
                          const FingerprintStore& store, const BallTree& tree,
                          double budget_s, const std::vector<std::string>& systems,
                          std::size_t limit = 10000);

// Synthetic corpora for pruning experiments.
std::vector<Fingerprint> random_fingerprints(std::size_t n, uint32_t fl,
                                             double density, uint64_t seed);

// k clusters with disjoint always-set signature bit blocks of sig_bits each
// (cluster c owns bits [c*sig_bits, (c+1)*sig_bits)); remaining bits are
// random at the given density. Cluster of element i is i % k.
std::vector<Fingerprint> clustered_fingerprints(std::size_t n, uint32_t fl,
                                                uint32_t k, uint32_t sig_bits,
                                                double density, uint64_t seed);

}  // namespace qtr

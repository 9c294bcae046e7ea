#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qtr/balltree.hpp"
#include "qtr/store.hpp"

namespace qtr {

struct QueryStats {
  std::size_t candidates = 0;       // molecule ids surviving the filter
  std::size_t answers = 0;          // verified matches returned
  std::size_t false_positives = 0;  // examined candidates failing verification
  bool truncated = false;           // stopped at the answer limit
  bool aborted = false;             // deadline expired
  double fingerprint_ms = 0;
  double filter_ms = 0;
  double verify_ms = 0;
  SearchStats filter;
};

struct QueryResult {
  std::vector<uint64_t> ids;  // filter order
  QueryStats stats;
};

/// Filter-and-verify superstructure query: fingerprint the query, collect
/// candidate fingerprints through the tree, expand to molecule ids via
/// fp-inverse, then keep ids whose molecule contains the query as a
/// substructure. The limit caps verified answers; the filter itself runs
/// unlimited. threads > 1 parallelizes verification; result order stays
/// filter order either way.
QueryResult find_meta_structures(const std::string& query_smiles,
                                 const FingerprintStore& store, const BallTree& tree,
                                 std::size_t limit = 10000, unsigned threads = 1,
                                 Deadline deadline = std::nullopt);

}  // namespace qtr

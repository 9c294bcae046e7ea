#pragma once

#include <cstdint>
#include <set>
#include <string>

#include "qtr/fingerprint.hpp"
#include "qtr/molgraph.hpp"

namespace qtr {

/// Build-time fingerprint parameters; persisted in the index header so
/// queries always hash with the same configuration.
struct FpConfig {
  uint32_t fl = 2048;
  uint32_t max_path_len = 5;    // bonds per path
  uint32_t bits_per_feature = 2;
  uint64_t hash_seed = 0x9e3779b97f4a7c15ull;

  void validate() const;

  friend bool operator==(const FpConfig&, const FpConfig&) = default;
};

// Canonical feature strings of all simple paths of 0..max_path_len bonds.
// A path renders as alternating atom labels and bond characters, taken in
// whichever direction is lexicographically smaller; atom label is
// element[/a if aromatic][/charge if nonzero].
std::set<std::string> path_features(const MolGraph& m, uint32_t max_path_len);

// Hashed path fingerprint. Subgraph-monotone: every simple path of a
// substructure is a simple path of its superstructure, so the feature set
// (and hence the bit set) can only grow.
Fingerprint fingerprint(const MolGraph& m, const FpConfig& cfg);

// Hash stream s for a feature string: 64-bit FNV-1a whose offset basis is
// the standard basis XOR splitmix64(hash_seed + s). Exposed for format docs
// and golden tests.
uint64_t feature_hash(std::string_view feature, uint64_t hash_seed, uint32_t stream);

}  // namespace qtr

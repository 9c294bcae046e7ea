#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qtr/balltree.hpp"
#include "qtr/fingerprint.hpp"
#include "qtr/fingerprinter.hpp"

namespace qtr {

struct MolRecord {
  uint64_t mol_id;
  std::string smiles;
  uint32_t fp_id;  // index into the distinct-fingerprint array
};

struct IngestReport {
  std::size_t accepted = 0;
  std::size_t failed = 0;
  std::vector<std::string> messages;  // one per failed line
};

/// Molecule records plus the fp / fp-inverse mapping. Distinct fingerprints
/// are stored once; fp_inverse lists every molecule id sharing one.
class FingerprintStore {
 public:
  explicit FingerprintStore(FpConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
  }

  // Adds a record; computes or reuses the fingerprint id. Throws IngestError
  // on duplicate molecule id, ParseError on bad SMILES.
  void add(uint64_t mol_id, const std::string& smiles);

  // Internal: re-attach a record during index load (fingerprint precomputed).
  void add_raw(uint64_t mol_id, std::string smiles, uint32_t fp_id);
  uint32_t intern_fingerprint(Fingerprint f);

  const FpConfig& config() const { return cfg_; }
  const std::vector<MolRecord>& records() const { return records_; }
  const std::vector<Fingerprint>& fingerprints() const { return fingerprints_; }
  const std::vector<std::vector<uint64_t>>& fp_inverse() const { return fp_inverse_; }

  const Fingerprint& fingerprint_of(uint32_t fp_id) const {
    return fingerprints_[fp_id];
  }
  const std::vector<uint64_t>& molecules_of(uint32_t fp_id) const {
    return fp_inverse_[fp_id];
  }
  const MolRecord& record_by_mol_id(uint64_t mol_id) const;

 private:
  FpConfig cfg_;
  std::vector<Fingerprint> fingerprints_;
  std::vector<std::vector<uint64_t>> fp_inverse_;
  std::vector<MolRecord> records_;
  std::unordered_map<Fingerprint, uint32_t, FingerprintHash> dedup_;
  std::unordered_map<uint64_t, std::size_t> by_mol_id_;
};

// Reads `<id><TAB><smiles>` lines (lines starting with # ignored). Lines
// whose SMILES fails to parse are skipped and counted; a duplicate id is a
// hard error naming the line.
std::pair<FingerprintStore, IngestReport> ingest(const std::filesystem::path& path,
                                                 const FpConfig& cfg);

// Binary index persistence. Little-endian. Header: magic "QTRI", version,
// fl, depth, record count, FpConfig, CRC32 of the body. Body: distinct
// fingerprints, record table, tree in preorder.
void save_index(const FingerprintStore& store, const BallTree& tree,
                const std::filesystem::path& path);
std::pair<FingerprintStore, BallTree> load_index(const std::filesystem::path& path);

inline constexpr uint32_t kIndexFormatVersion = 1;

}  // namespace qtr

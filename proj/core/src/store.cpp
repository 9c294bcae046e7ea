#include "qtr/store.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <sstream>

#include "qtr/error.hpp"
#include "qtr/molgraph.hpp"

namespace qtr {

void FingerprintStore::add(uint64_t mol_id, const std::string& smiles) {
  Fingerprint f = fingerprint(parse_smiles(smiles), cfg_);
  uint32_t fp_id = intern_fingerprint(std::move(f));
  add_raw(mol_id, smiles, fp_id);
}

uint32_t FingerprintStore::intern_fingerprint(Fingerprint f) {
  auto it = dedup_.find(f);
  if (it != dedup_.end()) return it->second;
  uint32_t fp_id = static_cast<uint32_t>(fingerprints_.size());
  dedup_.emplace(f, fp_id);
  fingerprints_.push_back(std::move(f));
  fp_inverse_.emplace_back();
  return fp_id;
}

void FingerprintStore::add_raw(uint64_t mol_id, std::string smiles, uint32_t fp_id) {
  if (by_mol_id_.contains(mol_id))
    throw IngestError("duplicate molecule id " + std::to_string(mol_id));
  if (fp_id >= fingerprints_.size())
    throw ContractError("fingerprint id out of range");
  by_mol_id_.emplace(mol_id, records_.size());
  records_.push_back({mol_id, std::move(smiles), fp_id});
  fp_inverse_[fp_id].push_back(mol_id);
}

const MolRecord& FingerprintStore::record_by_mol_id(uint64_t mol_id) const {
  auto it = by_mol_id_.find(mol_id);
  if (it == by_mol_id_.end())
    throw ContractError("unknown molecule id " + std::to_string(mol_id));
  return records_[it->second];
}

std::pair<FingerprintStore, IngestReport> ingest(const std::filesystem::path& path,
                                                 const FpConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset file: " + path.string());

  FingerprintStore store(cfg);
  IngestReport report;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      report.failed++;
      report.messages.push_back("line " + std::to_string(line_no) + ": missing TAB");
      continue;
    }
    uint64_t mol_id;
    try {
      std::size_t used = 0;
      mol_id = std::stoull(line.substr(0, tab), &used);
      if (used != tab) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      report.failed++;
      report.messages.push_back("line " + std::to_string(line_no) + ": bad id");
      continue;
    }
    std::string smiles = line.substr(tab + 1);
    if (!smiles.empty() && smiles.back() == '\r') smiles.pop_back();
    try {
      store.add(mol_id, smiles);
      report.accepted++;
    } catch (const ParseError& e) {
      report.failed++;
      report.messages.push_back("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const IngestError& e) {
      throw IngestError(std::string(e.what()) + " at line " + std::to_string(line_no));
    }
  }
  return {std::move(store), std::move(report)};
}

namespace {

constexpr char kMagic[4] = {'Q', 'T', 'R', 'I'};

struct ByteWriter {
  std::string buf;

  void u8(uint8_t v) { buf.push_back(static_cast<char>(v)); }
  void u32(uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void u64(uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void str(const std::string& s) {
    u32(static_cast<uint32_t>(s.size()));
    buf.append(s);
  }
  void fingerprint(const Fingerprint& f) {
    for (uint64_t w : f.words()) u64(w);
  }
};

struct ByteReader {
  const std::string& buf;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (pos + n > buf.size()) throw FormatError("truncated index file");
  }
  uint8_t u8() {
    need(1);
    return static_cast<uint8_t>(buf[pos++]);
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<uint32_t>(static_cast<uint8_t>(buf[pos++])) << (8 * i);
    return v;
  }
  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<uint64_t>(static_cast<uint8_t>(buf[pos++])) << (8 * i);
    return v;
  }
  std::string str() {
    uint32_t n = u32();
    need(n);
    std::string s = buf.substr(pos, n);
    pos += n;
    return s;
  }
  Fingerprint fingerprint(uint32_t fl) {
    std::vector<uint64_t> words(fl / 64);
    for (auto& w : words) w = u64();
    return Fingerprint(std::move(words), fl);
  }
};

// preorder over the heap layout
void write_node(ByteWriter& w, const BallTree& tree, std::size_t node) {
  if (tree.is_leaf(node)) {
    w.u8(1);
    w.fingerprint(tree.centroid(node));
    const auto& members = tree.members(node);
    w.u64(members.size());
    for (uint32_t id : members) w.u32(id);
  } else {
    w.u8(0);
    w.fingerprint(tree.centroid(node));
    write_node(w, tree, 2 * node + 1);
    write_node(w, tree, 2 * node + 2);
  }
}

void read_node(ByteReader& r, uint32_t fl, uint32_t depth_left, std::size_t node,
               std::vector<Fingerprint>& centroids,
               std::vector<std::vector<uint32_t>>& leaves, std::size_t first_leaf) {
  uint8_t tag = r.u8();
  bool expect_leaf = depth_left == 1;
  if ((tag == 1) != expect_leaf) throw FormatError("tree node tag does not match depth");
  centroids[node] = r.fingerprint(fl);
  if (expect_leaf) {
    uint64_t count = r.u64();
    auto& members = leaves[node - first_leaf];
    members.resize(count);
    for (auto& id : members) id = r.u32();
  } else {
    read_node(r, fl, depth_left - 1, 2 * node + 1, centroids, leaves, first_leaf);
    read_node(r, fl, depth_left - 1, 2 * node + 2, centroids, leaves, first_leaf);
  }
}

}  // namespace

void save_index(const FingerprintStore& store, const BallTree& tree,
                const std::filesystem::path& path) {
  const FpConfig& cfg = store.config();

  ByteWriter body;
  body.u64(store.fingerprints().size());
  for (const auto& f : store.fingerprints()) body.fingerprint(f);
  for (const auto& rec : store.records()) {
    body.u64(rec.mol_id);
    body.u32(rec.fp_id);
    body.str(rec.smiles);
  }
  write_node(body, tree, 0);

  uint32_t crc = static_cast<uint32_t>(
      crc32(0, reinterpret_cast<const Bytef*>(body.buf.data()),
            static_cast<uInt>(body.buf.size())));

  ByteWriter header;
  header.buf.append(kMagic, 4);
  header.u32(kIndexFormatVersion);
  header.u32(cfg.fl);
  header.u32(tree.depth());
  header.u64(store.records().size());
  header.u32(cfg.max_path_len);
  header.u32(cfg.bits_per_feature);
  header.u64(cfg.hash_seed);
  header.u32(crc);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open index file for writing: " + path.string());
  out.write(header.buf.data(), static_cast<std::streamsize>(header.buf.size()));
  out.write(body.buf.data(), static_cast<std::streamsize>(body.buf.size()));
  if (!out) throw IoError("failed writing index file: " + path.string());
}

std::pair<FingerprintStore, BallTree> load_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open index file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string data = std::move(ss).str();

  ByteReader r{data};
  r.need(4);
  if (std::memcmp(data.data(), kMagic, 4) != 0)
    throw FormatError("bad index magic");
  r.pos = 4;
  uint32_t version = r.u32();
  if (version != kIndexFormatVersion)
    throw FormatError("unsupported index format version " + std::to_string(version));
  FpConfig cfg;
  cfg.fl = r.u32();
  uint32_t depth = r.u32();
  if (depth < 1 || depth > 40) throw FormatError("implausible tree depth in header");
  uint64_t record_count = r.u64();
  cfg.max_path_len = r.u32();
  cfg.bits_per_feature = r.u32();
  cfg.hash_seed = r.u64();
  uint32_t stored_crc = r.u32();

  std::string body = data.substr(r.pos);
  uint32_t crc = static_cast<uint32_t>(
      crc32(0, reinterpret_cast<const Bytef*>(body.data()),
            static_cast<uInt>(body.size())));
  if (crc != stored_crc) throw FormatError("index body checksum mismatch");

  ByteReader br{body};
  FingerprintStore store(cfg);
  uint64_t fp_count = br.u64();
  for (uint64_t i = 0; i < fp_count; ++i)
    store.intern_fingerprint(br.fingerprint(cfg.fl));
  for (uint64_t i = 0; i < record_count; ++i) {
    uint64_t mol_id = br.u64();
    uint32_t fp_id = br.u32();
    std::string smiles = br.str();
    store.add_raw(mol_id, std::move(smiles), fp_id);
  }

  std::vector<Fingerprint> centroids((std::size_t{1} << depth) - 1, Fingerprint(cfg.fl));
  std::vector<std::vector<uint32_t>> leaves(std::size_t{1} << (depth - 1));
  read_node(br, cfg.fl, depth, 0, centroids, leaves, (std::size_t{1} << (depth - 1)) - 1);
  if (br.pos != body.size()) throw FormatError("trailing bytes in index file");

  return {std::move(store), BallTree::from_parts(depth, std::move(centroids),
                                                 std::move(leaves))};
}

}  // namespace qtr

#include "qtr/fingerprinter.hpp"

#include <algorithm>
#include <vector>

#include "qtr/error.hpp"

namespace qtr {

void FpConfig::validate() const {
  if (fl == 0 || fl % 64 != 0)
    throw ContractError("fl must be a positive multiple of 64");
  if (bits_per_feature < 1 || bits_per_feature > 4)
    throw ContractError("bits_per_feature must be in [1,4]");
}

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::string atom_label(const Atom& a) {
  std::string label = a.element;
  if (a.aromatic) label += "/a";
  if (a.charge != 0) {
    label += '/';
    if (a.charge > 0) label += '+';
    label += std::to_string(a.charge);
  }
  return label;
}

struct PathEnumerator {
  const MolGraph& m;
  uint32_t max_len;
  std::set<std::string>& features;
  std::vector<std::string> labels;
  std::vector<uint32_t> path;      // atom indices along the current path
  std::vector<BondOrder> orders;   // bond orders along the current path
  std::vector<char> on_path;

  PathEnumerator(const MolGraph& mol, uint32_t max_path_len,
                 std::set<std::string>& out)
      : m(mol), max_len(max_path_len), features(out),
        on_path(mol.atom_count(), 0) {
    labels.reserve(m.atom_count());
    for (const auto& a : m.atoms()) labels.push_back(atom_label(a));
  }

  void emit() {
    std::string fwd, rev;
    std::size_t n = path.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (i) fwd += bond_symbol(orders[i - 1]);
      fwd += labels[path[i]];
    }
    for (std::size_t i = n; i-- > 0;) {
      if (i + 1 < n) rev += bond_symbol(orders[i]);
      rev += labels[path[i]];
    }
    features.insert(std::min(fwd, rev));
  }

  void extend() {
    emit();
    if (orders.size() >= max_len) return;
    uint32_t tip = path.back();
    for (const auto& nb : m.neighbors(tip)) {
      if (on_path[nb.atom]) continue;
      path.push_back(nb.atom);
      orders.push_back(nb.order);
      on_path[nb.atom] = 1;
      extend();
      on_path[nb.atom] = 0;
      orders.pop_back();
      path.pop_back();
    }
  }

  void run() {
    for (uint32_t a = 0; a < m.atom_count(); ++a) {
      path.assign(1, a);
      orders.clear();
      on_path.assign(m.atom_count(), 0);
      on_path[a] = 1;
      extend();
    }
  }
};

}  // namespace

std::set<std::string> path_features(const MolGraph& m, uint32_t max_path_len) {
  std::set<std::string> out;
  PathEnumerator e(m, max_path_len, out);
  e.run();
  return out;
}

uint64_t feature_hash(std::string_view feature, uint64_t hash_seed, uint32_t stream) {
  uint64_t h = 0xcbf29ce484222325ull ^ splitmix64(hash_seed + stream);
  for (char c : feature) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

Fingerprint fingerprint(const MolGraph& m, const FpConfig& cfg) {
  cfg.validate();
  std::vector<uint64_t> words(cfg.fl / 64, 0);
  for (const auto& feature : path_features(m, cfg.max_path_len)) {
    for (uint32_t s = 0; s < cfg.bits_per_feature; ++s) {
      uint64_t bit = feature_hash(feature, cfg.hash_seed, s) % cfg.fl;
      words[bit >> 6] |= uint64_t{1} << (bit & 63);
    }
  }
  return Fingerprint(std::move(words), cfg.fl);
}

}  // namespace qtr

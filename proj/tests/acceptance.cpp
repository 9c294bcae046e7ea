// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure.

#include <zlib.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qtr/balltree.hpp"
#include "qtr/bench.hpp"
#include "qtr/engine.hpp"
#include "qtr/fingerprinter.hpp"
#include "qtr/store.hpp"
#include "support/molgen.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace qtr;
using qtr::testing::brute_force_substructure;
using qtr::testing::largest_component;
using qtr::testing::random_deletion;
using qtr::testing::random_molecule;
using qtr::testing::reference_split;
using qtr::testing::scan_supersets;
using qtr::testing::with_aromatic_ring;

namespace {

std::vector<uint32_t> iota_ids(std::size_t n) {
  std::vector<uint32_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<uint32_t>(i);
  return ids;
}

Fingerprint submask_of(const Fingerprint& base, std::mt19937_64& rng) {
  std::vector<uint64_t> words(base.words().begin(), base.words().end());
  for (auto& w : words) w &= rng();
  return Fingerprint(std::move(words), base.length());
}

std::vector<std::string> build_corpus(std::size_t n, uint64_t seed) {
  static const std::vector<std::string> curated = {
      "C", "O", "N", "CC", "CCO", "OCC", "C=C", "C#C", "C#N", "C1CC1",
      "C1CCC1", "C1CCCCC1", "c1ccccc1", "c1ccncc1", "c1ccoc1", "ClCCl",
      "BrCBr", "ICI", "[NH4+]", "[O-]C(=O)C", "CC(C)(C)C", "O=C=O",
      "C(=O)O", "c1ccccc1C(=O)O", "P", "S=C=S", "[N+](C)(C)C", "FC(F)F"};
  std::vector<std::string> corpus = curated;
  std::mt19937_64 rng(seed);
  while (corpus.size() < n) {
    MolGraph m = corpus.size() % 7 == 0 ? with_aromatic_ring(rng)
                                        : random_molecule(rng);
    corpus.push_back(qtr::testing::write_smiles(m));
  }
  corpus.resize(n);
  return corpus;
}

struct Index {
  FingerprintStore store;
  BallTree tree;
};

Index build_index(const std::vector<std::string>& corpus, const FpConfig& cfg) {
  FingerprintStore store(cfg);
  for (std::size_t i = 0; i < corpus.size(); ++i) store.add(i, corpus[i]);
  std::size_t n = store.fingerprints().size();
  BallTree tree = BallTree::build(iota_ids(n), store.fingerprints(),
                                  BallTree::default_depth(n));
  return {std::move(store), std::move(tree)};
}

// ---------------------------------------------------------------- criteria

bool filter_oracle_equivalence(std::string& detail) {
  std::mt19937_64 rng(101);
  for (int ds = 0; ds < 20; ++ds) {
    std::size_t n = 1000 + rng() % 49001;  // up to 50,000
    double density = 0.02 + 0.18 * (ds / 19.0);
    auto fps = random_fingerprints(n, 512, density, rng());
    auto tree = BallTree::build(iota_ids(n), fps, BallTree::default_depth(n));
    for (int q = 0; q < 200; ++q) {
      Fingerprint query = (q % 2 == 0)
                              ? submask_of(fps[rng() % n], rng)
                              : random_fingerprints(1, 512, 0.02, rng())[0];
      auto got = tree.find_supersets(query, fps);
      std::sort(got.ids.begin(), got.ids.end());
      if (got.ids != scan_supersets(query, fps)) {
        detail = "mismatch on dataset " + std::to_string(ds) + " query " +
                 std::to_string(q);
        return false;
      }
    }
  }
  detail = "20 datasets x 200 queries, all set-equal";
  return true;
}

bool end_to_end_ground_truth(std::string& detail) {
  auto corpus = build_corpus(500, 202);
  auto index = build_index(corpus, FpConfig{});

  std::mt19937_64 rng(203);
  int ran = 0;
  for (int q = 0; ran < 100; ++q) {
    if (q > 1000) {
      detail = "could not generate 100 fragment queries";
      return false;
    }
    MolGraph parent = parse_smiles(corpus[rng() % corpus.size()]);
    auto frag = random_deletion(parent, rng, 0.25);
    if (!frag) continue;
    std::string query = qtr::testing::write_smiles(largest_component(*frag));
    auto res = find_meta_structures(query, index.store, index.tree);

    MolGraph qg = parse_smiles(query);
    std::set<uint64_t> want;
    for (const auto& rec : index.store.records())
      if (sub_structure(qg, parse_smiles(rec.smiles))) want.insert(rec.mol_id);
    if (std::set<uint64_t>(res.ids.begin(), res.ids.end()) != want) {
      detail = "mismatch on query '" + query + "'";
      return false;
    }
    ++ran;
  }
  detail = "100 fragment queries against 500 molecules, all set-equal";
  return true;
}

bool monotonicity_suite(std::string& detail) {
  std::mt19937_64 rng(303);
  FpConfig cfg;
  int checked = 0;
  while (checked < 1000) {
    MolGraph parent = checked % 6 == 0 ? with_aromatic_ring(rng)
                                       : random_molecule(rng);
    auto frag = random_deletion(parent, rng);
    if (!frag) continue;
    if (!is_submask(fingerprint(*frag, cfg), fingerprint(parent, cfg))) {
      detail = "violated at pair " + std::to_string(checked);
      return false;
    }
    ++checked;
  }
  detail = "1000 fragment/parent pairs, 100% submask";
  return true;
}

bool tree_invariants(std::string& detail) {
  std::mt19937_64 rng(404);
  for (int round = 0; round < 50; ++round) {
    std::size_t n = 2 + rng() % 3000;
    uint32_t max_depth = 1;
    while ((std::size_t{1} << max_depth) <= n && max_depth < 8) ++max_depth;
    uint32_t depth = 1 + rng() % max_depth;
    auto fps = random_fingerprints(n, 256, 0.02 + 0.16 * (rng() % 10) / 10.0, rng());
    auto tree = BallTree::build(iota_ids(n), fps, depth);

    std::set<uint32_t> seen;
    std::size_t min_size = n, max_size = 0;
    for (std::size_t leaf = tree.first_leaf(); leaf < tree.node_count(); ++leaf) {
      const auto& members = tree.members(leaf);
      min_size = std::min(min_size, members.size());
      max_size = std::max(max_size, members.size());
      for (uint32_t id : members)
        if (!seen.insert(id).second) {
          detail = "id in two leaves, build " + std::to_string(round);
          return false;
        }
    }
    if (seen.size() != n || max_size - min_size > 1) {
      detail = "partition or balance broken, build " + std::to_string(round);
      return false;
    }

    std::vector<Fingerprint> want(tree.node_count(), Fingerprint(256));
    for (std::size_t node = tree.node_count(); node-- > 0;) {
      if (tree.is_leaf(node)) {
        for (uint32_t id : tree.members(node)) want[node] = bit_or(want[node], fps[id]);
      } else {
        want[node] = bit_or(want[2 * node + 1], want[2 * node + 2]);
      }
      if (!(tree.centroid(node) == want[node])) {
        detail = "centroid mismatch at node " + std::to_string(node) + ", build " +
                 std::to_string(round);
        return false;
      }
    }
  }
  detail = "50 random builds, all invariants hold";
  return true;
}

bool split_conformance(std::string& detail) {
  std::mt19937_64 rng(505);
  for (int round = 0; round < 1000; ++round) {
    std::size_t n = 2 + rng() % 200;
    auto fps = [&] {
      if (round % 10 == 0)  // degenerate all-equal input
        return std::vector<Fingerprint>(n, random_fingerprints(1, 64, 0.5, rng())[0]);
      return random_fingerprints(n, 64, 0.02 + 0.6 * (rng() % 100) / 100.0, rng());
    }();
    auto ids = iota_ids(n);
    std::shuffle(ids.begin(), ids.end(), rng);
    auto got = BallTree::split_fingerprints(ids, fps);
    auto want = reference_split(ids, fps);
    if (got.split_bit != want.bit || got.left_ids != want.left ||
        got.right_ids != want.right) {
      detail = "divergence on input " + std::to_string(round);
      return false;
    }
  }
  detail = "1000 random inputs match the reference split";
  return true;
}

bool matcher_oracle(std::string& detail) {
  std::mt19937_64 rng(606);
  std::vector<MolGraph> pool;
  for (const char* s :
       {"C", "O", "N", "CC", "CO", "C=C", "C#C", "C#N", "CCC", "C1CC1",
        "C1CCC1", "CCO", "OCC", "C(=O)O", "[N+]", "C[N+]", "c1ccoc1",
        "c1ccccc1", "ClC", "BrC"})
    pool.push_back(parse_smiles(s));
  while (pool.size() < 40) {
    MolGraph m = random_molecule(rng, 8);
    if (m.atom_count() <= 8) pool.push_back(m);
  }
  int pairs = 0;
  for (const auto& q : pool)
    for (const auto& t : pool) {
      if (sub_structure(q, t) != brute_force_substructure(q, t)) {
        detail = "disagreement on pair " + std::to_string(pairs);
        return false;
      }
      ++pairs;
    }
  detail = std::to_string(pairs) + " ordered pairs agree with enumeration";
  return true;
}

bool pruning_effectiveness(std::string& detail) {
  const std::size_t n = 100000;
  auto fps = clustered_fingerprints(n, 512, 2, 8, 0.05, 707);
  auto tree = BallTree::build(iota_ids(n), fps, BallTree::default_depth(n));

  std::mt19937_64 rng(708);
  std::vector<Fingerprint> queries;
  for (int i = 0; i < 100; ++i) {
    // submask of a cluster member, always containing a signature bit
    uint32_t member = rng() % static_cast<uint32_t>(n);
    auto q = submask_of(fps[member], rng);
    std::vector<uint64_t> words(q.words().begin(), q.words().end());
    uint32_t sig_bit = (member % 2) * 8 + rng() % 8;
    words[0] |= uint64_t{1} << sig_bit;
    queries.emplace_back(std::move(words), 512);
  }

  // warmup
  for (int i = 0; i < 5; ++i) {
    tree.find_supersets(queries[i], fps);
    linear_scan(queries[i], fps);
  }

  // one pass per system, as in the benchmark protocol
  SystemSeries tree_series{"tree", {}, 0};
  SystemSeries lin_series{"linear", {}, 0};
  using Clock = std::chrono::steady_clock;
  std::vector<SearchResult> tree_results, lin_results;
  for (const auto& q : queries) {
    auto t0 = Clock::now();
    tree_results.push_back(tree.find_supersets(q, fps));
    tree_series.times_s.push_back(
        std::chrono::duration<double>(Clock::now() - t0).count());
    tree_series.finished++;
  }
  for (const auto& q : queries) {
    auto t0 = Clock::now();
    lin_results.push_back(linear_scan(q, fps));
    lin_series.times_s.push_back(
        std::chrono::duration<double>(Clock::now() - t0).count());
    lin_series.finished++;
  }

  for (std::size_t i = 0; i < queries.size(); ++i) {
    auto& tre = tree_results[i];
    const auto& lin = lin_results[i];
    if (tre.stats.fingerprints_compared * 10 >
        lin.stats.fingerprints_compared * 6) {
      detail = "compared ratio above 60%: " +
               std::to_string(tre.stats.fingerprints_compared) + " vs " +
               std::to_string(lin.stats.fingerprints_compared);
      return false;
    }
    std::sort(tre.ids.begin(), tre.ids.end());
    if (tre.ids != lin.ids) {
      detail = "tree and linear disagree on a clustered query";
      return false;
    }
  }

  std::string report = format_report({tree_series, lin_series}, 60.0);
  for (int p : kReportPercentiles) {
    double tp = nearest_rank_percentile(tree_series.times_s, p);
    double lp = nearest_rank_percentile(lin_series.times_s, p);
    if (tp > lp) {
      detail = "tree slower than linear at the " + std::to_string(p) +
               "% row of:\n" + report;
      return false;
    }
  }
  detail = "all 100 queries <= 60% comparisons; tree <= linear at every row";
  return true;
}

bool persistence_round_trip(std::string& detail) {
  auto corpus = build_corpus(1000, 808);
  FpConfig cfg;
  cfg.fl = 512;
  auto index = build_index(corpus, cfg);
  auto path = fs::temp_directory_path() / "qtr_acceptance.qtri";
  save_index(index.store, index.tree, path);
  auto [store2, tree2] = load_index(path);

  std::mt19937_64 rng(809);
  for (int q = 0; q < 100; ++q) {
    MolGraph parent = parse_smiles(corpus[rng() % corpus.size()]);
    auto frag = random_deletion(parent, rng, 0.3);
    if (!frag) {
      --q;
      continue;
    }
    std::string query = qtr::testing::write_smiles(largest_component(*frag));
    auto a = find_meta_structures(query, index.store, index.tree);
    auto b = find_meta_structures(query, store2, tree2);
    if (a.ids != b.ids) {
      detail = "query results differ after reload: '" + query + "'";
      return false;
    }
  }

  // header bytes against the documented layout
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string data = std::move(ss).str();

  std::string expected;
  auto u32 = [&](uint32_t v) {
    for (int i = 0; i < 4; ++i) expected.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  };
  auto u64 = [&](uint64_t v) {
    for (int i = 0; i < 8; ++i) expected.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  };
  expected += "QTRI";
  u32(kIndexFormatVersion);
  u32(cfg.fl);
  u32(index.tree.depth());
  u64(index.store.records().size());
  u32(cfg.max_path_len);
  u32(cfg.bits_per_feature);
  u64(cfg.hash_seed);
  if (data.size() < expected.size() + 4 ||
      data.substr(0, expected.size()) != expected) {
    detail = "header bytes do not match the documented layout";
    return false;
  }
  // trailing header field: CRC32 of the body
  uint32_t stored = 0;
  for (int i = 0; i < 4; ++i)
    stored |= static_cast<uint32_t>(
                  static_cast<uint8_t>(data[expected.size() + i]))
              << (8 * i);
  std::string body = data.substr(expected.size() + 4);
  uint32_t crc = static_cast<uint32_t>(crc32(
      0, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size())));
  if (crc != stored) {
    detail = "header CRC does not cover the body as documented";
    return false;
  }
  detail = "100 queries bit-exact after reload; header matches the format";
  return true;
}

bool benchmark_protocol(std::string& detail) {
  SystemSeries a{"tree", {0.1, 0.2, 0.3}, 3};
  SystemSeries b{"linear", {0.4, 0.5, 0.6}, 2};
  std::string report = format_report({a, b}, 60.0);

  std::istringstream lines(report);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(lines, line)) rows.push_back(line);
  if (rows.size() != 12) {
    detail = "report must have header + 10 percentile rows + completion row";
    return false;
  }
  const char* expected_rows[] = {"10%", "20%", "30%", "40%", "50%",
                                 "60%", "70%", "80%", "90%", "95%"};
  for (int i = 0; i < 10; ++i)
    if (rows[i + 1].substr(0, std::string(expected_rows[i]).size()) !=
        expected_rows[i]) {
      detail = std::string("missing percentile row ") + expected_rows[i];
      return false;
    }
  if (rows[11].find("<= 60 s:") != 0) {
    detail = "missing the <= 60 s completion row";
    return false;
  }

  // nearest-rank fixtures, hand computed
  struct Fixture {
    std::vector<double> values;
    int percent;
    double want;
  };
  for (const Fixture& f : std::vector<Fixture>{
           {{5.0, 1.0, 4.0, 2.0, 3.0}, 50, 3.0},   // ceil(2.5) = 3rd of sorted
           {{7.5}, 95, 7.5},                        // single sample
           {{2.0, 1.0}, 10, 1.0}}) {                // ceil(0.2) = 1st
    if (nearest_rank_percentile(f.values, f.percent) != f.want) {
      detail = "nearest-rank fixture failed at p=" + std::to_string(f.percent);
      return false;
    }
  }
  detail = "row structure and nearest-rank fixtures match";
  return true;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<bool(std::string&)> fn;
  };
  std::vector<Criterion> criteria = {
      {1, "filter oracle equivalence", filter_oracle_equivalence},
      {2, "end-to-end ground truth", end_to_end_ground_truth},
      {3, "monotonicity suite", monotonicity_suite},
      {4, "tree invariants", tree_invariants},
      {5, "split conformance", split_conformance},
      {6, "matcher oracle", matcher_oracle},
      {7, "pruning effectiveness", pruning_effectiveness},
      {8, "persistence round trip", persistence_round_trip},
      {9, "benchmark protocol conformance", benchmark_protocol},
  };

  int failed = 0;
  for (auto& c : criteria) {
    std::string detail;
    bool ok = false;
    auto start = std::chrono::steady_clock::now();
    try {
      ok = c.fn(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                start)
                      .count();
    std::printf("%s  %d  %-32s (%.1f s) %s\n", ok ? "PASS" : "FAIL", c.id, c.name,
                secs, detail.c_str());
    if (!ok) ++failed;
  }
  if (failed) std::printf("%d criterion(s) FAILED\n", failed);
  else std::printf("all criteria passed\n");
  return failed ? 1 : 0;
}

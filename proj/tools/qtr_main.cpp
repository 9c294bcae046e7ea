// qtr: filter-and-verify substructure search over a fingerprint ball tree.
//
// Exit codes: 0 success, 1 usage error, 2 I/O or format error,
// 3 query parse error.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "qtr/bench.hpp"
#include "qtr/engine.hpp"
#include "qtr/error.hpp"
#include "qtr/store.hpp"

namespace {

using Clock = std::chrono::steady_clock;

struct BuildArgs {
  std::string input;
  std::string output;
  uint32_t fl = 2048;
  std::string depth = "auto";
  uint32_t max_path_len = 5;
  uint32_t bits_per_feature = 2;
};

int run_build(const BuildArgs& args) {
  qtr::FpConfig cfg;
  cfg.fl = args.fl;
  cfg.max_path_len = args.max_path_len;
  cfg.bits_per_feature = args.bits_per_feature;
  cfg.validate();

  auto t0 = Clock::now();
  auto [store, report] = qtr::ingest(args.input, cfg);
  for (const auto& msg : report.messages) std::cerr << "skipped: " << msg << "\n";
  if (store.records().empty()) {
    std::cerr << "error: no usable records in " << args.input << "\n";
    return 2;
  }

  uint32_t depth;
  std::size_t n = store.fingerprints().size();
  if (args.depth == "auto") {
    depth = qtr::BallTree::default_depth(n);
  } else {
    depth = static_cast<uint32_t>(std::stoul(args.depth));
    if (depth < 1 || n < (std::size_t{1} << (depth - 1))) {
      std::cerr << "error: depth " << depth << " needs at least "
                << (std::size_t{1} << (depth - 1)) << " distinct fingerprints, have "
                << n << "\n";
      return 1;
    }
  }

  std::vector<uint32_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<uint32_t>(i);
  qtr::BallTree tree = qtr::BallTree::build(std::move(ids), store.fingerprints(), depth);
  qtr::save_index(store, tree, args.output);
  double secs = std::chrono::duration<double>(Clock::now() - t0).count();

  std::cout << "records: " << store.records().size() << "\n"
            << "distinct fingerprints: " << n << "\n"
            << "skipped lines: " << report.failed << "\n"
            << "depth: " << depth << "\n";
  std::fprintf(stdout, "build time: %.3f s\n", secs);
  return 0;
}

void print_stats(const qtr::QueryStats& st) {
  std::cerr << "candidates: " << st.candidates << "\n"
            << "answers: " << st.answers << "\n"
            << "false positives: " << st.false_positives << "\n"
            << "truncated: " << (st.truncated ? "yes" : "no") << "\n"
            << "nodes visited: " << st.filter.nodes_visited << "\n"
            << "leaves scanned: " << st.filter.leaves_scanned << "\n"
            << "fingerprints compared: " << st.filter.fingerprints_compared << "\n";
  std::fprintf(stderr, "fingerprint: %.3f ms, filter: %.3f ms, verify: %.3f ms\n",
               st.fingerprint_ms, st.filter_ms, st.verify_ms);
}

int run_one_query(const std::string& smiles, const qtr::FingerprintStore& store,
                  const qtr::BallTree& tree, std::size_t limit, bool stats,
                  unsigned threads) {
  qtr::QueryResult res;
  try {
    res = qtr::find_meta_structures(smiles, store, tree, limit, threads);
  } catch (const qtr::ParseError& e) {
    std::cerr << "query parse error: " << e.what() << "\n";
    return 3;
  }
  for (uint64_t id : res.ids) std::cout << id << "\n";
  if (stats) print_stats(res.stats);
  return 0;
}

int run_inspect(const std::string& index_path) {
  auto [store, tree] = qtr::load_index(index_path);
  const auto& cfg = store.config();
  std::cout << "format version: " << qtr::kIndexFormatVersion << "\n"
            << "fl: " << cfg.fl << "\n"
            << "max path length: " << cfg.max_path_len << "\n"
            << "bits per feature: " << cfg.bits_per_feature << "\n";
  std::fprintf(stdout, "hash seed: 0x%016llx\n",
               static_cast<unsigned long long>(cfg.hash_seed));
  std::cout << "records: " << store.records().size() << "\n"
            << "distinct fingerprints: " << store.fingerprints().size() << "\n"
            << "depth: " << tree.depth() << "\n";

  std::map<std::size_t, std::size_t> histogram;
  for (std::size_t leaf = tree.first_leaf(); leaf < tree.node_count(); ++leaf)
    histogram[tree.members(leaf).size()]++;
  std::cout << "leaf sizes:\n";
  for (auto [size, count] : histogram)
    std::cout << "  " << size << " members x " << count << " leaves\n";

  std::cout << "mean centroid popcount per level:\n";
  std::size_t level_start = 0, level_size = 1;
  for (uint32_t level = 0; level < tree.depth(); ++level) {
    uint64_t total = 0;
    for (std::size_t i = level_start; i < level_start + level_size; ++i)
      total += tree.centroid(i).popcount();
    std::fprintf(stdout, "  level %u: %.1f\n", level,
                 static_cast<double>(total) / static_cast<double>(level_size));
    level_start += level_size;
    level_size *= 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fingerprint ball-tree substructure search"};
  app.require_subcommand(1);

  BuildArgs build_args;
  auto* build = app.add_subcommand("build", "ingest a dataset and build an index");
  build->add_option("--input", build_args.input, "dataset TSV (<id>\\t<smiles>)")
      ->required();
  build->add_option("--output", build_args.output, "index file to write")->required();
  build->add_option("--fl", build_args.fl, "fingerprint length in bits");
  build->add_option("--depth", build_args.depth, "tree depth, or 'auto'");
  build->add_option("--max-path-len", build_args.max_path_len,
                    "max fingerprint path length in bonds");
  build->add_option("--bits-per-feature", build_args.bits_per_feature,
                    "bits set per feature");

  std::string index_path, smiles, query_file, csv_path;
  std::size_t limit = 10000;
  bool stats = false;
  unsigned threads = 1;
  bool parallel = false;
  auto* query = app.add_subcommand("query", "find superstructures of a molecule");
  query->add_option("--index", index_path, "index file")->required();
  auto* smiles_opt = query->add_option("--smiles", smiles, "query SMILES");
  auto* file_opt = query->add_option("--file", query_file, "file of query SMILES");
  smiles_opt->excludes(file_opt);
  query->add_option("--limit", limit, "max answers per query");
  query->add_flag("--stats", stats, "print query statistics to stderr");
  query->add_flag("--parallel", parallel, "parallel candidate verification");

  double budget = 60.0;
  std::string systems_csv = "tree,linear";
  auto* bench = app.add_subcommand("bench", "percentile latency benchmark");
  bench->add_option("--index", index_path, "index file")->required();
  bench->add_option("--queries", query_file, "file of query SMILES")->required();
  bench->add_option("--budget", budget, "per-query time budget in seconds");
  bench->add_option("--systems", systems_csv, "comma-separated: tree,linear");
  bench->add_option("--csv", csv_path, "write per-query CSV here");

  auto* inspect = app.add_subcommand("inspect", "print index structure");
  inspect->add_option("--index", index_path, "index file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;  // usage errors are exit code 1
  }

  try {
    if (build->parsed()) return run_build(build_args);

    if (query->parsed()) {
      if (smiles.empty() && query_file.empty()) {
        std::cerr << "error: query needs --smiles or --file\n";
        return 1;
      }
      auto [store, tree] = qtr::load_index(index_path);
      if (parallel) threads = std::max(1u, std::thread::hardware_concurrency());
      if (!smiles.empty())
        return run_one_query(smiles, store, tree, limit, stats, threads);
      std::ifstream in(query_file);
      if (!in) {
        std::cerr << "error: cannot open " << query_file << "\n";
        return 2;
      }
      std::string line;
      int worst = 0;
      bool first = true;
      while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!first) std::cout << "\n";
        first = false;
        std::cout << "# query: " << line << "\n";
        worst = std::max(worst,
                         run_one_query(line, store, tree, limit, stats, threads));
      }
      return worst;
    }

    if (bench->parsed()) {
      auto [store, tree] = qtr::load_index(index_path);
      std::vector<std::string> systems;
      std::stringstream ss(systems_csv);
      std::string item;
      while (std::getline(ss, item, ','))
        if (!item.empty()) systems.push_back(item);
      auto report = qtr::run_benchmark(query_file, store, tree, budget, systems);
      if (report.skipped_queries)
        std::cerr << "skipped " << report.skipped_queries << " unparseable queries\n";
      std::cout << report.table();
      if (!csv_path.empty()) {
        std::ofstream out(csv_path);
        if (!out) {
          std::cerr << "error: cannot write " << csv_path << "\n";
          return 2;
        }
        out << report.csv();
      }
      return 0;
    }

    if (inspect->parsed()) return run_inspect(index_path);
  } catch (const qtr::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const qtr::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const qtr::IngestError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const qtr::BenchError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

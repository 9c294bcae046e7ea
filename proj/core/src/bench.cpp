#include "qtr/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "qtr/error.hpp"
#include "qtr/fingerprinter.hpp"
#include "qtr/molgraph.hpp"

namespace qtr {

namespace {
using Clock = std::chrono::steady_clock;
}

SearchResult linear_scan(const Fingerprint& f, std::span<const Fingerprint> fps,
                         std::optional<std::size_t> limit, Deadline deadline) {
  SearchResult out;
  for (std::size_t id = 0; id < fps.size(); ++id) {
    if (deadline && (id & 1023) == 0 && Clock::now() >= *deadline) {
      out.aborted = true;
      return out;
    }
    out.stats.fingerprints_compared++;
    if (is_submask(f, fps[id])) {
      out.ids.push_back(static_cast<uint32_t>(id));
      if (limit && out.ids.size() >= *limit) {
        out.truncated = true;
        return out;
      }
    }
  }
  return out;
}

QueryResult find_meta_structures_linear(const std::string& query_smiles,
                                        const FingerprintStore& store,
                                        std::size_t limit, Deadline deadline) {
  QueryResult result;

  auto t0 = Clock::now();
  MolGraph query = parse_smiles(query_smiles);
  Fingerprint f = fingerprint(query, store.config());
  result.stats.fingerprint_ms =
      std::chrono::duration<double, std::milli>(Clock::now() - t0).count();

  auto t1 = Clock::now();
  SearchResult filtered =
      linear_scan(f, store.fingerprints(), std::nullopt, deadline);
  result.stats.filter = filtered.stats;
  result.stats.filter_ms =
      std::chrono::duration<double, std::milli>(Clock::now() - t1).count();
  if (filtered.aborted) {
    result.stats.aborted = true;
    return result;
  }

  std::vector<uint64_t> candidates;
  for (uint32_t fp_id : filtered.ids)
    for (uint64_t mol_id : store.molecules_of(fp_id)) candidates.push_back(mol_id);
  result.stats.candidates = candidates.size();

  auto t2 = Clock::now();
  for (uint64_t mol_id : candidates) {
    if (result.ids.size() >= limit) {
      result.stats.truncated = true;
      break;
    }
    if (deadline && Clock::now() >= *deadline) {
      result.stats.aborted = true;
      break;
    }
    const auto& rec = store.record_by_mol_id(mol_id);
    if (sub_structure(query, parse_smiles(rec.smiles))) result.ids.push_back(mol_id);
    else result.stats.false_positives++;
  }
  result.stats.verify_ms =
      std::chrono::duration<double, std::milli>(Clock::now() - t2).count();
  result.stats.answers = result.ids.size();
  return result;
}

double nearest_rank_percentile(std::vector<double> times, int percent) {
  if (times.empty()) throw ContractError("percentile of an empty sample");
  if (percent < 1 || percent > 100) throw ContractError("percent must be in [1,100]");
  std::sort(times.begin(), times.end());
  std::size_t m = times.size();
  std::size_t rank = static_cast<std::size_t>(
      std::ceil(static_cast<double>(percent) * static_cast<double>(m) / 100.0));
  if (rank == 0) rank = 1;
  return times[rank - 1];
}

std::string format_report(const std::vector<SystemSeries>& systems, double budget_s) {
  char buf[64];
  const int name_width = 14;
  std::string out = "%         ";
  for (const auto& s : systems) {
    std::snprintf(buf, sizeof buf, "%*s", name_width, s.name.c_str());
    out += buf;
  }
  out += '\n';
  for (int p : kReportPercentiles) {
    std::snprintf(buf, sizeof buf, "%d%%", p);
    std::string row = buf;
    row.resize(10, ' ');
    for (const auto& s : systems) {
      std::snprintf(buf, sizeof buf, "%*.6f", name_width,
                    nearest_rank_percentile(s.times_s, p));
      row += buf;
    }
    out += row;
    out += '\n';
  }
  std::snprintf(buf, sizeof buf, "<= %g s:", budget_s);
  std::string row = buf;
  row.resize(10, ' ');
  for (const auto& s : systems) {
    double frac = s.times_s.empty()
                      ? 0.0
                      : static_cast<double>(s.finished) /
                            static_cast<double>(s.times_s.size());
    std::snprintf(buf, sizeof buf, "%*.2f%%", name_width - 1, 100.0 * frac);
    row += buf;
  }
  out += row;
  out += '\n';
  return out;
}

std::string BenchReport::csv() const {
  std::string out = "query,system,time_s,candidates,answers,truncated,finished\n";
  char buf[64];
  for (const auto& r : rows) {
    out += r.query;
    out += ',';
    out += r.system;
    std::snprintf(buf, sizeof buf, ",%.6f,%zu,%zu,%d,%d\n", r.seconds, r.candidates,
                  r.answers, r.truncated ? 1 : 0, r.finished ? 1 : 0);
    out += buf;
  }
  return out;
}

BenchReport run_benchmark(const std::filesystem::path& queries_path,
                          const FingerprintStore& store, const BallTree& tree,
                          double budget_s, const std::vector<std::string>& systems,
                          std::size_t limit) {
  std::ifstream in(queries_path);
  if (!in) throw IoError("cannot open query file: " + queries_path.string());

  std::vector<std::string> queries;
  std::size_t skipped = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    try {
      parse_smiles(line);
      queries.push_back(line);
    } catch (const ParseError&) {
      skipped++;
    }
  }
  if (queries.empty()) throw BenchError("query file contains no usable queries");

  for (const auto& s : systems)
    if (s != "tree" && s != "linear")
      throw BenchError("unknown benchmark system: " + s);

  BenchReport report;
  report.budget_s = budget_s;
  report.skipped_queries = skipped;

  auto budget = std::chrono::duration_cast<Clock::duration>(
      std::chrono::duration<double>(budget_s));

  for (const auto& system : systems) {
    SystemSeries series;
    series.name = system;
    for (const auto& q : queries) {
      auto start = Clock::now();
      QueryResult res = system == "tree"
                            ? find_meta_structures(q, store, tree, limit, 1,
                                                   start + budget)
                            : find_meta_structures_linear(q, store, limit,
                                                          start + budget);
      double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
      bool finished = !res.stats.aborted;
      if (!finished) elapsed = budget_s;
      series.times_s.push_back(std::min(elapsed, budget_s));
      if (finished) series.finished++;
      report.rows.push_back({q, system, series.times_s.back(), res.stats.candidates,
                             res.stats.answers, res.stats.truncated, finished});
    }
    report.systems.push_back(std::move(series));
  }
  return report;
}

std::vector<Fingerprint> random_fingerprints(std::size_t n, uint32_t fl,
                                             double density, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution bit(density);
  std::vector<Fingerprint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<uint64_t> words(fl / 64, 0);
    for (uint32_t b = 0; b < fl; ++b)
      if (bit(rng)) words[b >> 6] |= uint64_t{1} << (b & 63);
    out.emplace_back(std::move(words), fl);
  }
  return out;
}

std::vector<Fingerprint> clustered_fingerprints(std::size_t n, uint32_t fl,
                                                uint32_t k, uint32_t sig_bits,
                                                double density, uint64_t seed) {
  if (static_cast<uint64_t>(k) * sig_bits >= fl)
    throw ContractError("cluster signatures do not fit in the fingerprint");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution bit(density);
  std::vector<Fingerprint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<uint64_t> words(fl / 64, 0);
    uint32_t cluster = static_cast<uint32_t>(i % k);
    for (uint32_t b = cluster * sig_bits; b < (cluster + 1) * sig_bits; ++b)
      words[b >> 6] |= uint64_t{1} << (b & 63);
    for (uint32_t b = k * sig_bits; b < fl; ++b)
      if (bit(rng)) words[b >> 6] |= uint64_t{1} << (b & 63);
    out.emplace_back(std::move(words), fl);
  }
  return out;
}

}  // namespace qtr

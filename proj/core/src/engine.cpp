#include "qtr/engine.hpp"

#include <chrono>
#include <thread>

#include "qtr/fingerprinter.hpp"
#include "qtr/molgraph.hpp"

namespace qtr {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::vector<char> verify_parallel(const MolGraph& query, const FingerprintStore& store,
                                  const std::vector<uint64_t>& mol_ids,
                                  unsigned threads) {
  std::vector<char> verdicts(mol_ids.size(), 0);
  std::vector<std::thread> pool;
  std::size_t chunk = (mol_ids.size() + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    std::size_t begin = t * chunk;
    std::size_t end = std::min(begin + chunk, mol_ids.size());
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      for (std::size_t i = begin; i < end; ++i) {
        const auto& rec = store.record_by_mol_id(mol_ids[i]);
        verdicts[i] = sub_structure(query, parse_smiles(rec.smiles)) ? 1 : 0;
      }
    });
  }
  for (auto& th : pool) th.join();
  return verdicts;
}

}  // namespace

QueryResult find_meta_structures(const std::string& query_smiles,
                                 const FingerprintStore& store, const BallTree& tree,
                                 std::size_t limit, unsigned threads,
                                 Deadline deadline) {
  QueryResult result;

  auto t0 = Clock::now();
  MolGraph query = parse_smiles(query_smiles);
  Fingerprint f = fingerprint(query, store.config());
  result.stats.fingerprint_ms = ms_since(t0);

  auto t1 = Clock::now();
  SearchResult filtered =
      tree.find_supersets(f, store.fingerprints(), std::nullopt, deadline);
  result.stats.filter = filtered.stats;
  result.stats.filter_ms = ms_since(t1);
  if (filtered.aborted) {
    result.stats.aborted = true;
    return result;
  }

  std::vector<uint64_t> candidates;
  for (uint32_t fp_id : filtered.ids)
    for (uint64_t mol_id : store.molecules_of(fp_id)) candidates.push_back(mol_id);
  result.stats.candidates = candidates.size();

  auto t2 = Clock::now();
  if (threads > 1) {
    auto verdicts = verify_parallel(query, store, candidates, threads);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (result.ids.size() >= limit) {
        result.stats.truncated = true;
        break;
      }
      if (verdicts[i]) result.ids.push_back(candidates[i]);
      else result.stats.false_positives++;
    }
  } else {
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
  }
  result.stats.verify_ms = ms_since(t2);
  result.stats.answers = result.ids.size();
  return result;
}

}  // namespace qtr

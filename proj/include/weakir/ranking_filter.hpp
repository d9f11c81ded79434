#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "weakir/bm25.hpp"
#include "weakir/config.hpp"
#include "weakir/corpus.hpp"
#include "weakir/parallel.hpp"
#include "weakir/util.hpp"

namespace weakir {

/// A pseudo-query that survived the ranking filter: its own content was
/// retrieved at positive_rank <= n_rank, and the top-ranked other documents
/// supply the hard negatives.
struct RankedPair {
  std::string query_doc_id;
  std::uint32_t positive_rank = 0;  // 1-based
  std::vector<std::string> negative_ids;
  bool operator==(const RankedPair&) const = default;
};

/// Runs every admitted headline as a query against the index. A document is
/// retained iff it retrieves its own content within the top n_rank hits;
/// negatives are the top n_neg hits with the positive skipped over, so the
/// retrieval depth is max(n_rank, n_neg + 1). Output is ordered by
/// query_doc_id.
inline std::vector<RankedPair> apply_ranking_filter(const Corpus& corpus, const Bm25Index& index,
                                                    const FilterConfig& cfg, unsigned workers = 1) {
  cfg.validate();
  const std::size_t depth = std::max(cfg.n_rank, cfg.n_neg + 1);
  std::vector<std::optional<RankedPair>> slots(corpus.size());
  parallel_for(corpus.size(), workers, [&](std::size_t i) {
    const Document& doc = corpus.docs()[i];
    auto hits = index.retrieve(doc.headline_tokens, depth);
    std::uint32_t own_rank = 0;
    for (const ScoredHit& hit : hits) {
      if (hit.doc_id == doc.id) {
        own_rank = hit.rank;
        break;
      }
    }
    if (own_rank == 0 || own_rank > cfg.n_rank) return;
    RankedPair pair;
    pair.query_doc_id = doc.id;
    pair.positive_rank = own_rank;
    for (const ScoredHit& hit : hits) {
      if (pair.negative_ids.size() == cfg.n_neg) break;
      if (hit.doc_id == doc.id) continue;
      pair.negative_ids.push_back(hit.doc_id);
    }
    slots[i] = std::move(pair);
  });
  std::vector<RankedPair> pairs;
  for (auto& slot : slots)
    if (slot) pairs.push_back(std::move(*slot));
  std::sort(pairs.begin(), pairs.end(),
            [](const RankedPair& a, const RankedPair& b) { return a.query_doc_id < b.query_doc_id; });
  return pairs;
}

/// Row format: query_doc_id<TAB>positive_rank<TAB>comma-joined negative_ids.
inline void write_pairs(const std::vector<RankedPair>& pairs, std::ostream& out) {
  for (const RankedPair& pair : pairs) {
    if (pair.query_doc_id.find_first_of(",\t") != std::string::npos)
      throw std::runtime_error("doc_id not representable in pairs format: " + pair.query_doc_id);
    out << pair.query_doc_id << '\t' << pair.positive_rank << '\t';
    for (std::size_t i = 0; i < pair.negative_ids.size(); ++i) {
      if (pair.negative_ids[i].find_first_of(",\t") != std::string::npos)
        throw std::runtime_error("doc_id not representable in pairs format: " + pair.negative_ids[i]);
      if (i > 0) out << ',';
      out << pair.negative_ids[i];
    }
    out << '\n';
  }
}

inline void write_pairs(const std::vector<RankedPair>& pairs, const std::string& path) {
  auto out = open_output(path);
  write_pairs(pairs, out);
}

inline std::vector<RankedPair> read_pairs_stream(std::istream& in,
                                                 const std::string& source = "<stream>") {
  std::vector<RankedPair> pairs;
  std::unordered_set<std::string> seen;
  LineReader reader(in, source);
  while (reader.next()) {
    auto fields = split(reader.line(), '\t');
    if (fields.size() != 3)
      reader.fail("expected 3 tab-separated fields, got " + std::to_string(fields.size()));
    RankedPair pair;
    pair.query_doc_id = std::string(fields[0]);
    if (pair.query_doc_id.empty()) reader.fail("empty query_doc_id");
    if (!seen.insert(pair.query_doc_id).second)
      reader.fail("duplicate query_doc_id: " + pair.query_doc_id);
    auto rank = parse_int(fields[1]);
    if (!rank || *rank < 1) reader.fail("positive_rank must be a positive integer");
    pair.positive_rank = static_cast<std::uint32_t>(*rank);
    if (!fields[2].empty()) {
      std::unordered_set<std::string_view> neg_seen;
      for (std::string_view id : split(fields[2], ',')) {
        if (id.empty()) reader.fail("empty negative id");
        if (std::string_view(pair.query_doc_id) == id)
          reader.fail("negative id equals query_doc_id: " + std::string(id));
        if (!neg_seen.insert(id).second) reader.fail("duplicate negative id: " + std::string(id));
        pair.negative_ids.emplace_back(id);
      }
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

inline std::vector<RankedPair> read_pairs(const std::string& path) {
  auto in = open_input(path);
  return read_pairs_stream(in, path);
}

}  // namespace weakir

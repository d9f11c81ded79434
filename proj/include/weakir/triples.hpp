#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "weakir/corpus.hpp"
#include "weakir/ranking_filter.hpp"
#include "weakir/util.hpp"

namespace weakir {

struct TrainingTriple {
  std::string query_text;  // raw headline, so trainers apply their own preprocessing
  std::string positive_id;
  std::string negative_id;
  bool operator==(const TrainingTriple&) const = default;
};

/// One triple per (retained pair, negative), ordered by query_doc_id then by
/// negative rank order. `selected` narrows the pairs to the interaction
/// filter's survivors; nullopt means the filter was skipped.
inline std::vector<TrainingTriple> emit_triples(
    const std::vector<RankedPair>& pairs,
    const std::optional<std::vector<std::string>>& selected, const Corpus& corpus) {
  std::optional<std::unordered_set<std::string>> keep;
  if (selected) {
    std::unordered_set<std::string> pair_ids;
    for (const RankedPair& pair : pairs) pair_ids.insert(pair.query_doc_id);
    keep.emplace();
    for (const std::string& id : *selected) {
      if (!pair_ids.contains(id))
        throw std::runtime_error("selected id is not a retained pair: " + id);
      keep->insert(id);
    }
  }

  std::vector<const RankedPair*> ordered;
  ordered.reserve(pairs.size());
  for (const RankedPair& pair : pairs) ordered.push_back(&pair);
  std::sort(ordered.begin(), ordered.end(), [](const RankedPair* a, const RankedPair* b) {
    return a->query_doc_id < b->query_doc_id;
  });

  std::vector<TrainingTriple> triples;
  for (const RankedPair* pair : ordered) {
    if (keep && !keep->contains(pair->query_doc_id)) continue;
    const Document& doc = corpus.by_id(pair->query_doc_id);
    for (const std::string& negative : pair->negative_ids) {
      if (!corpus.contains(negative))
        throw std::runtime_error("negative id not in corpus: " + negative);
      triples.push_back(TrainingTriple{doc.headline, doc.id, negative});
    }
  }
  return triples;
}

namespace detail {

/// Unbiased draw from [0, n) via rejection sampling. mt19937_64's output
/// sequence is pinned by the C++ standard, so batches are reproducible
/// across platforms for a given seed.
inline std::uint64_t uniform_index(std::mt19937_64& gen, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
  for (;;) {
    const std::uint64_t r = gen();
    if (r >= threshold) return r % n;
  }
}

}  // namespace detail

/// Draws batches of triples uniformly with replacement.
class TripleSampler {
 public:
  TripleSampler(const std::vector<TrainingTriple>& triples, std::uint64_t seed)
      : triples_(triples), gen_(seed) {
    if (triples_.empty()) throw std::invalid_argument("cannot sample from an empty triple list");
  }

  std::vector<TrainingTriple> next_batch(std::size_t batch_size) {
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    std::vector<TrainingTriple> batch;
    batch.reserve(batch_size);
    for (std::size_t i = 0; i < batch_size; ++i)
      batch.push_back(triples_[detail::uniform_index(gen_, triples_.size())]);
    return batch;
  }

 private:
  const std::vector<TrainingTriple>& triples_;
  std::mt19937_64 gen_;
};

inline std::vector<std::vector<TrainingTriple>> sample_batches(
    const std::vector<TrainingTriple>& triples, std::size_t batch_size, std::size_t iterations,
    std::uint64_t seed) {
  TripleSampler sampler(triples, seed);
  std::vector<std::vector<TrainingTriple>> batches;
  batches.reserve(iterations);
  for (std::size_t i = 0; i < iterations; ++i) batches.push_back(sampler.next_batch(batch_size));
  return batches;
}

/// Row format: query_text<TAB>positive_id<TAB>negative_id.
inline void write_triples(const std::vector<TrainingTriple>& triples, std::ostream& out) {
  for (const TrainingTriple& t : triples)
    out << t.query_text << '\t' << t.positive_id << '\t' << t.negative_id << '\n';
}

inline void write_triples(const std::vector<TrainingTriple>& triples, const std::string& path) {
  auto out = open_output(path);
  write_triples(triples, out);
}

/// Batches file: batch_index<TAB>query_text<TAB>positive_id<TAB>negative_id.
inline void write_batches(const std::vector<std::vector<TrainingTriple>>& batches,
                          std::ostream& out) {
  for (std::size_t b = 0; b < batches.size(); ++b)
    for (const TrainingTriple& t : batches[b])
      out << b << '\t' << t.query_text << '\t' << t.positive_id << '\t' << t.negative_id << '\n';
}

inline void write_batches(const std::vector<std::vector<TrainingTriple>>& batches,
                          const std::string& path) {
  auto out = open_output(path);
  write_batches(batches, out);
}

}  // namespace weakir

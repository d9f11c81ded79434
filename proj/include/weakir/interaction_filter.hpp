#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <queue>
#include <string>
#include <unordered_set>
#include <vector>

#include "weakir/config.hpp"
#include "weakir/corpus.hpp"
#include "weakir/embedding.hpp"
#include "weakir/interaction.hpp"
#include "weakir/parallel.hpp"
#include "weakir/ranking_filter.hpp"
#include "weakir/tokenize.hpp"
#include "weakir/util.hpp"

namespace weakir {

/// A real query-document pair from the target search domain; no relevance
/// label is needed, only the interaction shape.
struct TemplatePair {
  std::string id;
  Tokens query;
  Tokens doc;
};

using TemplateSet = std::vector<TemplatePair>;

struct Candidate {
  std::string id;  // query_doc_id of the retained pair
  InteractionVector ivec;
};

using CandidateSet = std::vector<Candidate>;

/// Template file shares the corpus format: template_id<TAB>query<TAB>doc.
inline TemplateSet load_templates_stream(std::istream& in, const std::string& source = "<stream>") {
  TemplateSet templates;
  std::unordered_set<std::string> seen;
  LineReader reader(in, source);
  while (reader.next()) {
    auto fields = split(reader.line(), '\t');
    if (fields.size() != 3)
      reader.fail("expected 3 tab-separated fields, got " + std::to_string(fields.size()));
    TemplatePair t;
    t.id = std::string(fields[0]);
    if (t.id.empty()) reader.fail("empty template_id");
    if (!seen.insert(t.id).second) reader.fail("duplicate template_id: " + t.id);
    t.query = tokenize(fields[1]);
    t.doc = tokenize(fields[2]);
    if (t.query.empty()) reader.fail("template " + t.id + " has no query tokens");
    if (t.doc.empty()) reader.fail("template " + t.id + " has no doc tokens");
    templates.push_back(std::move(t));
  }
  return templates;
}

inline TemplateSet load_templates(const std::string& path) {
  auto in = open_input(path);
  return load_templates_stream(in, path);
}

/// Mock embedding of each retained pair, computed from its own headline and
/// content under the shared tokenizer.
inline CandidateSet build_candidate_vectors(const std::vector<RankedPair>& pairs,
                                            const Corpus& corpus, const EmbeddingTable& emb,
                                            const FilterConfig& cfg, unsigned workers = 1) {
  CandidateSet candidates(pairs.size());
  parallel_for(pairs.size(), workers, [&](std::size_t i) {
    const Document& doc = corpus.by_id(pairs[i].query_doc_id);
    candidates[i].id = doc.id;
    candidates[i].ivec = mock_embedding(doc.headline_tokens, doc.content_tokens, emb,
                                        cfg.query_pad_length);
  });
  return candidates;
}

namespace detail {

struct NearEntry {
  double dist = 0.0;
  std::uint32_t index = 0;
};

/// Keeps the n_sim nearest candidates under (distance asc, id asc). The heap
/// top is the worst retained entry, so each push is O(log n_sim).
class BoundedNearest {
 public:
  BoundedNearest(std::size_t capacity, const CandidateSet& candidates)
      : capacity_(capacity), candidates_(candidates) {}

  void offer(double dist, std::uint32_t index) {
    NearEntry entry{dist, index};
    if (heap_.size() < capacity_) {
      heap_.push_back(entry);
      std::push_heap(heap_.begin(), heap_.end(), better());
      return;
    }
    if (better()(entry, heap_.front())) {
      std::pop_heap(heap_.begin(), heap_.end(), better());
      heap_.back() = entry;
      std::push_heap(heap_.begin(), heap_.end(), better());
    }
  }

  std::vector<NearEntry> take() && { return std::move(heap_); }

 private:
  // Strict total order: (dist, candidate id) ascending. Used both as the
  // heap comparator (top = worst) and for the final merge sort.
  auto better() const {
    return [this](const NearEntry& a, const NearEntry& b) {
      if (a.dist != b.dist) return a.dist < b.dist;
      return candidates_[a.index].id < candidates_[b.index].id;
    };
  }

  std::size_t capacity_;
  const CandidateSet& candidates_;
  std::vector<NearEntry> heap_;
};

}  // namespace detail

/// The interaction filter's selection rule: a candidate passes if it is one
/// of the n_sim nearest (by aMSE between mock embeddings) to at least one
/// template. Ties at the boundary break by ascending candidate id; the
/// result is the de-duplicated union, sorted by id.
inline std::vector<std::string> select_candidates(const CandidateSet& candidates,
                                                  const TemplateSet& templates,
                                                  const EmbeddingTable& emb,
                                                  const FilterConfig& cfg, unsigned workers = 1) {
  cfg.validate();
  if (candidates.empty()) throw std::invalid_argument("select_candidates: empty candidate set");
  if (templates.empty()) throw std::invalid_argument("select_candidates: empty template set");

  std::unordered_set<std::string> selected;
  for (const TemplatePair& t : templates) {
    const InteractionVector tvec = mock_embedding(t.query, t.doc, emb, cfg.query_pad_length);
    const unsigned chunk_count =
        static_cast<unsigned>(std::min<std::size_t>(workers, candidates.size()));
    std::vector<std::vector<detail::NearEntry>> chunk_nearest(std::max(1u, chunk_count));
    parallel_chunks(candidates.size(), workers, [&](std::size_t chunk, std::size_t begin,
                                                    std::size_t end) {
      detail::BoundedNearest nearest(cfg.n_sim, candidates);
      for (std::size_t i = begin; i < end; ++i)
        nearest.offer(amse(tvec, candidates[i].ivec), static_cast<std::uint32_t>(i));
      chunk_nearest[chunk] = std::move(nearest).take();
    });
    std::vector<detail::NearEntry> merged;
    for (auto& part : chunk_nearest)
      merged.insert(merged.end(), part.begin(), part.end());
    std::sort(merged.begin(), merged.end(), [&](const detail::NearEntry& a, const detail::NearEntry& b) {
      if (a.dist != b.dist) return a.dist < b.dist;
      return candidates[a.index].id < candidates[b.index].id;
    });
    if (merged.size() > cfg.n_sim) merged.resize(cfg.n_sim);
    for (const detail::NearEntry& entry : merged) selected.insert(candidates[entry.index].id);
  }
  std::vector<std::string> ids(selected.begin(), selected.end());
  std::sort(ids.begin(), ids.end());
  return ids;
}

inline void write_selected(const std::vector<std::string>& ids, std::ostream& out) {
  for (const std::string& id : ids) out << id << '\n';
}

inline void write_selected(const std::vector<std::string>& ids, const std::string& path) {
  auto out = open_output(path);
  write_selected(ids, out);
}

inline std::vector<std::string> read_selected_stream(std::istream& in,
                                                     const std::string& source = "<stream>") {
  std::vector<std::string> ids;
  LineReader reader(in, source);
  while (reader.next()) {
    std::string id{trim(reader.line())};
    if (!id.empty()) ids.push_back(std::move(id));
  }
  return ids;
}

inline std::vector<std::string> read_selected(const std::string& path) {
  auto in = open_input(path);
  return read_selected_stream(in, path);
}

}  // namespace weakir

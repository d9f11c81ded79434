#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "weakir/bm25.hpp"
#include "weakir/config.hpp"
#include "weakir/corpus.hpp"
#include "weakir/embedding.hpp"
#include "weakir/interaction_filter.hpp"
#include "weakir/ranking_filter.hpp"
#include "weakir/triples.hpp"

namespace weakir {

class PipelineError : public std::runtime_error {
 public:
  PipelineError(std::string stage, const std::string& message)
      : std::runtime_error("[" + stage + "] " + message), stage_(std::move(stage)) {}

  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct PipelineCounts {
  std::size_t total_records = 0;
  std::size_t admitted = 0;
  std::size_t rejected = 0;
  std::size_t pairs = 0;
  std::size_t selected = 0;
  std::size_t triples = 0;
  std::size_t batches = 0;
};

/// Runs ingest -> index -> ranking filter -> (interaction filter) -> emit,
/// writing each stage's file under cfg.output_dir. Stage files are the same
/// formats the standalone subcommands read, so any suffix of the pipeline
/// can be reproduced from saved intermediates. Output bytes are a pure
/// function of (input files, config, seed).
inline PipelineCounts run_pipeline(const PipelineConfig& cfg, unsigned workers = 1,
                                   bool skip_interaction_filter = false, std::uint64_t seed = 42,
                                   std::ostream* log = nullptr) {
  namespace fs = std::filesystem;
  auto stage = [](const char* name, auto&& fn) {
    try {
      return fn();
    } catch (const std::exception& e) {
      throw PipelineError(name, e.what());
    }
  };
  auto note = [&](const std::string& line) {
    if (log != nullptr) *log << line << '\n';
  };

  cfg.validate(!skip_interaction_filter);
  fs::create_directories(cfg.output_dir);
  const auto out_path = [&](const char* name) { return (fs::path(cfg.output_dir) / name).string(); };

  PipelineCounts counts;

  IngestResult ingest = stage("ingest", [&] {
    auto result = ingest_corpus(cfg.corpus_path, cfg.filter);
    write_corpus(result.corpus, out_path("admitted.tsv"));
    return result;
  });
  counts.total_records = ingest.total_records;
  counts.admitted = ingest.corpus.size();
  counts.rejected = ingest.rejected;
  note("[ingest] records=" + std::to_string(counts.total_records) +
       " admitted=" + std::to_string(counts.admitted) +
       " rejected=" + std::to_string(counts.rejected));

  Bm25Index index = stage("index", [&] {
    auto built = Bm25Index::build(ingest.corpus, cfg.filter.k1, cfg.filter.b);
    built.save(out_path("index.bin"));
    return built;
  });
  note("[index] documents=" + std::to_string(index.doc_count()) +
       " terms=" + std::to_string(index.vocabulary_size()));

  std::vector<RankedPair> pairs = stage("filter-rank", [&] {
    auto result = apply_ranking_filter(ingest.corpus, index, cfg.filter, workers);
    write_pairs(result, out_path("pairs.tsv"));
    return result;
  });
  counts.pairs = pairs.size();
  note("[filter-rank] retained=" + std::to_string(counts.pairs) +
       " discarded=" + std::to_string(counts.admitted - counts.pairs));

  std::optional<std::vector<std::string>> selected;
  if (!skip_interaction_filter) {
    selected = stage("filter-interaction", [&] {
      auto embeddings = load_embeddings(cfg.embeddings_path);
      auto templates = load_templates(cfg.templates_path);
      std::vector<std::string> ids;
      if (!pairs.empty()) {
        auto candidates = build_candidate_vectors(pairs, ingest.corpus, embeddings, cfg.filter,
                                                  workers);
        ids = select_candidates(candidates, templates, embeddings, cfg.filter, workers);
      }
      write_selected(ids, out_path("selected.txt"));
      return ids;
    });
    counts.selected = selected->size();
    note("[filter-interaction] selected=" + std::to_string(counts.selected) +
         " dropped=" + std::to_string(counts.pairs - counts.selected));
  } else {
    counts.selected = counts.pairs;
    note("[filter-interaction] skipped");
  }

  std::vector<TrainingTriple> triples = stage("emit", [&] {
    auto result = emit_triples(pairs, selected, ingest.corpus);
    write_triples(result, out_path("triples.tsv"));
    return result;
  });
  counts.triples = triples.size();
  note("[emit] triples=" + std::to_string(counts.triples));

  if (cfg.batches > 0 && triples.empty()) {
    note("[sample] skipped (no triples)");
  } else if (cfg.batches > 0) {
    counts.batches = stage("sample", [&] {
      auto batches = sample_batches(triples, cfg.batch_size, cfg.batches, seed);
      write_batches(batches, out_path("batches.tsv"));
      return batches.size();
    });
    note("[sample] batches=" + std::to_string(counts.batches) + " batch_size=" +
         std::to_string(cfg.batch_size) + " seed=" + std::to_string(seed));
  }
  return counts;
}

}  // namespace weakir

// Command-line entry point wiring the pipeline stages together. Every
// subcommand reads and writes the same stage-file formats the `pipeline`
// subcommand produces, so a pipeline can be re-run stage by stage from its
// saved intermediates.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "weakir/weakir.hpp"

namespace {

weakir::FilterConfig filter_config_from(const std::string& config_path) {
  if (config_path.empty()) return weakir::FilterConfig{};
  return weakir::load_pipeline_config(config_path).filter;
}

weakir::Corpus load_admitted_corpus(const std::string& corpus_path,
                                    const weakir::FilterConfig& cfg) {
  return weakir::ingest_corpus(corpus_path, cfg).corpus;
}

void check_index_matches_corpus(const weakir::Bm25Index& index, const weakir::Corpus& corpus) {
  if (index.doc_count() != corpus.size())
    throw std::runtime_error("index and corpus disagree: " + std::to_string(index.doc_count()) +
                             " indexed documents vs " + std::to_string(corpus.size()) +
                             " admitted documents");
  for (std::size_t i = 0; i < corpus.size(); ++i)
    if (index.doc_ids()[i] != corpus.docs()[i].id)
      throw std::runtime_error("index and corpus disagree at position " + std::to_string(i) +
                               ": " + index.doc_ids()[i] + " vs " + corpus.docs()[i].id);
}

struct MetricSpec {
  std::string name;  // "err" or "ndcg"
  std::size_t k = 20;
};

MetricSpec parse_metric(const std::string& text) {
  MetricSpec spec;
  auto at = text.find('@');
  spec.name = text.substr(0, at);
  if (at != std::string::npos) {
    auto k = weakir::parse_int(text.substr(at + 1));
    if (!k || *k < 1) throw std::runtime_error("invalid metric cutoff in '" + text + "'");
    spec.k = static_cast<std::size_t>(*k);
  }
  if (spec.name != "err" && spec.name != "ndcg")
    throw std::runtime_error("unknown metric '" + text + "' (expected err@K or ndcg@K)");
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weakir: turns a headline/content corpus into filtered weak-supervision "
               "training triples for neural rankers, with TREC-style evaluation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string corpus_path, index_path, pairs_path, selected_path, templates_path, embeddings_path;
  std::string run_path, qrels_path, rerank_path, out_path, batches_out, metric_text = "err@20";
  unsigned workers = weakir::default_workers();
  std::uint64_t seed = 42;
  std::size_t depth = 100;
  std::size_t batches = 0, batch_size = 1024;
  bool skip_interaction = false;

  auto* ingest = app.add_subcommand("ingest", "apply the headline-length constraint and write the admitted corpus");
  ingest->add_option("--corpus", corpus_path, "corpus TSV (doc_id<TAB>headline<TAB>content)")->required();
  ingest->add_option("--config", config_path, "config file (defaults apply if omitted)");
  ingest->add_option("--out", out_path, "admitted corpus output path")->required();
  ingest->callback([&] {
    auto cfg = filter_config_from(config_path);
    auto result = weakir::ingest_corpus(corpus_path, cfg);
    weakir::write_corpus(result.corpus, out_path);
    std::cout << "records=" << result.total_records << " admitted=" << result.corpus.size()
              << " rejected=" << result.rejected << '\n';
  });

  auto* index_cmd = app.add_subcommand("index", "inverted index operations");
  index_cmd->require_subcommand(1);
  auto* index_build = index_cmd->add_subcommand("build", "build and persist the BM25 index");
  index_build->add_option("--corpus", corpus_path, "corpus TSV")->required();
  index_build->add_option("--config", config_path, "config file");
  index_build->add_option("--out", out_path, "index output path")->required();
  index_build->callback([&] {
    auto cfg = filter_config_from(config_path);
    auto corpus = load_admitted_corpus(corpus_path, cfg);
    auto index = weakir::Bm25Index::build(corpus, cfg.k1, cfg.b);
    index.save(out_path);
    std::cout << "documents=" << index.doc_count() << " terms=" << index.vocabulary_size() << '\n';
  });

  auto* filter = app.add_subcommand("filter", "training-pair filters");
  filter->require_subcommand(1);

  auto* filter_rank = filter->add_subcommand("rank", "keep self-retrieving headlines and mine hard negatives");
  filter_rank->add_option("--corpus", corpus_path, "corpus TSV")->required();
  filter_rank->add_option("--index", index_path, "persisted BM25 index")->required();
  filter_rank->add_option("--config", config_path, "config file");
  filter_rank->add_option("--out", out_path, "pairs output path")->required();
  filter_rank->add_option("--workers", workers, "worker threads");
  filter_rank->callback([&] {
    auto cfg = filter_config_from(config_path);
    auto corpus = load_admitted_corpus(corpus_path, cfg);
    auto index = weakir::Bm25Index::load(index_path);
    check_index_matches_corpus(index, corpus);
    auto pairs = weakir::apply_ranking_filter(corpus, index, cfg, workers);
    weakir::write_pairs(pairs, out_path);
    std::cout << "retained=" << pairs.size() << " discarded=" << (corpus.size() - pairs.size())
              << '\n';
  });

  auto* filter_interaction = filter->add_subcommand(
      "interaction", "keep pairs whose mock interaction embedding is near a template pair");
  filter_interaction->add_option("--pairs", pairs_path, "pairs TSV from `filter rank`")->required();
  filter_interaction->add_option("--corpus", corpus_path, "corpus TSV")->required();
  filter_interaction->add_option("--templates", templates_path, "template TSV")->required();
  filter_interaction->add_option("--embeddings", embeddings_path, "word embedding text file")->required();
  filter_interaction->add_option("--config", config_path, "config file");
  filter_interaction->add_option("--out", out_path, "selected ids output path")->required();
  filter_interaction->add_option("--workers", workers, "worker threads");
  filter_interaction->callback([&] {
    auto cfg = filter_config_from(config_path);
    auto corpus = load_admitted_corpus(corpus_path, cfg);
    auto pairs = weakir::read_pairs(pairs_path);
    auto embeddings = weakir::load_embeddings(embeddings_path);
    auto templates = weakir::load_templates(templates_path);
    std::vector<std::string> ids;
    if (!pairs.empty()) {
      auto candidates = weakir::build_candidate_vectors(pairs, corpus, embeddings, cfg, workers);
      ids = weakir::select_candidates(candidates, templates, embeddings, cfg, workers);
    }
    weakir::write_selected(ids, out_path);
    std::cout << "selected=" << ids.size() << " dropped=" << (pairs.size() - ids.size()) << '\n';
  });

  auto* emit = app.add_subcommand("emit", "materialize filtered pairs as training triples");
  emit->add_option("--pairs", pairs_path, "pairs TSV from `filter rank`")->required();
  emit->add_option("--selected", selected_path, "selected ids from `filter interaction` (omit to keep all pairs)");
  emit->add_option("--corpus", corpus_path, "corpus TSV")->required();
  emit->add_option("--config", config_path, "config file");
  emit->add_option("--out", out_path, "triples output path")->required();
  emit->add_option("--batches", batches, "also sample this many batches of triples");
  emit->add_option("--batch-size", batch_size, "triples per sampled batch");
  emit->add_option("--seed", seed, "sampling seed");
  emit->add_option("--batches-out", batches_out, "sampled batches output path");
  emit->callback([&] {
    auto cfg = filter_config_from(config_path);
    auto corpus = load_admitted_corpus(corpus_path, cfg);
    auto pairs = weakir::read_pairs(pairs_path);
    std::optional<std::vector<std::string>> selected;
    if (!selected_path.empty()) selected = weakir::read_selected(selected_path);
    auto triples = weakir::emit_triples(pairs, selected, corpus);
    weakir::write_triples(triples, out_path);
    std::cout << "triples=" << triples.size() << '\n';
    if (batches > 0) {
      if (batches_out.empty()) throw std::runtime_error("--batches requires --batches-out");
      auto sampled = weakir::sample_batches(triples, batch_size, batches, seed);
      weakir::write_batches(sampled, batches_out);
      std::cout << "batches=" << sampled.size() << " batch_size=" << batch_size << '\n';
    }
  });

  auto* eval = app.add_subcommand("eval", "score a TREC run against qrels");
  eval->add_option("--run", run_path, "TREC run file")->required();
  eval->add_option("--qrels", qrels_path, "TREC qrels file")->required();
  eval->add_option("--metric", metric_text, "err@K or ndcg@K (default err@20)");
  eval->add_option("--rerank", rerank_path, "re-rank the run head with scores from this TSV first");
  eval->add_option("--depth", depth, "re-rank depth (default 100)");
  eval->add_option("--out", out_path, "also write the report to this path");
  eval->callback([&] {
    auto spec = parse_metric(metric_text);
    auto run = weakir::Run::parse(run_path);
    auto qrels = weakir::Qrels::parse(qrels_path);
    if (!rerank_path.empty())
      run = weakir::rerank(run, weakir::load_score_table(rerank_path), depth);
    auto report = spec.name == "err" ? weakir::err_at_k(run, qrels, spec.k)
                                     : weakir::ndcg_at_k(run, qrels, spec.k);
    weakir::write_metric_report(report, std::cout);
    if (!out_path.empty()) {
      auto out = weakir::open_output(out_path);
      weakir::write_metric_report(report, out);
    }
  });

  auto* pipeline = app.add_subcommand("pipeline", "run every stage from a config file");
  pipeline->add_option("--config", config_path, "pipeline config file")->required();
  pipeline->add_option("--workers", workers, "worker threads");
  pipeline->add_option("--seed", seed, "sampling seed (used when the config requests batches)");
  pipeline->add_flag("--skip-interaction-filter", skip_interaction,
                     "emit triples for every ranking-filter survivor");
  pipeline->callback([&] {
    auto cfg = weakir::load_pipeline_config(config_path);
    weakir::run_pipeline(cfg, workers, skip_interaction, seed, &std::cout);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const weakir::PipelineError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <stdexcept>
#include <string>

#include "weakir/util.hpp"

namespace weakir {

/// Pipeline thresholds. Defaults are the fixed operating point the toolkit
/// was designed around: n_neg=6, n_rank=30, n_sim=100, headlines of 6..16
/// tokens, BM25 with k1=1.2 and b=0.75.
struct FilterConfig {
  std::size_t n_neg = 6;
  std::size_t n_rank = 30;
  std::size_t n_sim = 100;
  std::size_t min_headline_tokens = 6;
  std::size_t max_headline_tokens = 16;
  double k1 = 1.2;
  double b = 0.75;
  std::size_t query_pad_length = 16;

  void validate() const {
    auto require = [](bool ok, const char* what) {
      if (!ok) throw std::invalid_argument(std::string("invalid config: ") + what);
    };
    require(n_neg >= 1, "n_neg must be >= 1");
    require(n_rank >= 1, "n_rank must be >= 1");
    require(n_sim >= 1, "n_sim must be >= 1");
    require(min_headline_tokens >= 1, "min_headline_tokens must be >= 1");
    require(query_pad_length >= 1, "query_pad_length must be >= 1");
    require(n_neg <= n_rank, "n_neg must be <= n_rank");
    require(min_headline_tokens <= max_headline_tokens,
            "min_headline_tokens must be <= max_headline_tokens");
    require(max_headline_tokens <= query_pad_length,
            "max_headline_tokens must be <= query_pad_length");
    require(b >= 0.0 && b <= 1.0, "b must lie in [0, 1]");
    require(k1 > 0.0, "k1 must be > 0");
  }
};

/// Everything `pipeline` needs: thresholds plus input/output paths.
struct PipelineConfig {
  FilterConfig filter;
  std::string corpus_path;
  std::string embeddings_path;
  std::string templates_path;
  std::string output_dir = "out";
  std::size_t rerank_depth = 100;
  // Optional batch sampling after emit; 0 batches disables it.
  std::size_t batches = 0;
  std::size_t batch_size = 1024;

  void validate(bool need_interaction_inputs) const {
    filter.validate();
    auto require_file = [](const std::string& path, const char* key) {
      if (path.empty())
        throw std::invalid_argument(std::string("invalid config: missing required key '") + key +
                                    "'");
      if (!std::filesystem::exists(path))
        throw std::invalid_argument(std::string("invalid config: ") + key + " path does not exist: " +
                                    path);
    };
    require_file(corpus_path, "corpus");
    if (need_interaction_inputs) {
      require_file(embeddings_path, "embeddings");
      require_file(templates_path, "templates");
    }
    if (output_dir.empty())
      throw std::invalid_argument("invalid config: output_dir must not be empty");
  }
};

/// Parses the key/value config format: one `key = value` per line, blank
/// lines and `#` comments ignored. Unknown keys are errors.
inline PipelineConfig parse_pipeline_config(std::istream& in, const std::string& source) {
  PipelineConfig cfg;
  LineReader reader(in, source);
  while (reader.next()) {
    std::string_view line = trim(reader.line());
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) reader.fail("expected 'key = value'");
    std::string key{trim(line.substr(0, eq))};
    std::string value{trim(line.substr(eq + 1))};
    if (key.empty()) reader.fail("empty key");

    auto as_count = [&](std::size_t& out) {
      auto parsed = parse_int(value);
      if (!parsed || *parsed < 0) reader.fail("key '" + key + "' expects a non-negative integer");
      out = static_cast<std::size_t>(*parsed);
    };
    auto as_real = [&](double& out) {
      auto parsed = parse_double(value);
      if (!parsed) reader.fail("key '" + key + "' expects a number");
      out = *parsed;
    };

    if (key == "corpus") cfg.corpus_path = value;
    else if (key == "embeddings") cfg.embeddings_path = value;
    else if (key == "templates") cfg.templates_path = value;
    else if (key == "output_dir") cfg.output_dir = value;
    else if (key == "n_neg") as_count(cfg.filter.n_neg);
    else if (key == "n_rank") as_count(cfg.filter.n_rank);
    else if (key == "n_sim") as_count(cfg.filter.n_sim);
    else if (key == "min_headline_tokens") as_count(cfg.filter.min_headline_tokens);
    else if (key == "max_headline_tokens") as_count(cfg.filter.max_headline_tokens);
    else if (key == "query_pad_length") as_count(cfg.filter.query_pad_length);
    else if (key == "k1") as_real(cfg.filter.k1);
    else if (key == "b") as_real(cfg.filter.b);
    else if (key == "rerank_depth") as_count(cfg.rerank_depth);
    else if (key == "batches") as_count(cfg.batches);
    else if (key == "batch_size") as_count(cfg.batch_size);
    else reader.fail("unknown key '" + key + "'");
  }
  cfg.filter.validate();
  return cfg;
}

inline PipelineConfig load_pipeline_config(const std::string& path) {
  auto in = open_input(path);
  return parse_pipeline_config(in, path);
}

}  // namespace weakir

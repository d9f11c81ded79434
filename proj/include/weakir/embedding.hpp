#pragma once

#include <cmath>
#include <cstddef>
#include <istream>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "weakir/util.hpp"

namespace weakir {

/// Cosine similarity; defined as 0.0 when either vector has zero norm.
inline double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine: dimension mismatch");
  double dot = 0.0, norm_a = 0.0, norm_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    norm_a += a[i] * a[i];
    norm_b += b[i] * b[i];
  }
  if (norm_a == 0.0 || norm_b == 0.0) return 0.0;
  return dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
}

class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(std::size_t dimension) : dimension_(dimension) {}

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return vectors_.size(); }

  void insert(std::string token, std::vector<double> vector) {
    if (vector.size() != dimension_)
      throw std::invalid_argument("embedding for '" + token + "' has wrong dimension");
    for (double v : vector)
      if (!std::isfinite(v))
        throw std::invalid_argument("embedding for '" + token + "' has a non-finite component");
    vectors_.emplace(std::move(token), std::move(vector));
  }

  const std::vector<double>* find(const std::string& token) const {
    auto it = vectors_.find(token);
    return it == vectors_.end() ? nullptr : &it->second;
  }

 private:
  std::size_t dimension_ = 0;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

/// Text vector format: first line "<vocab_size> <dimension>", then one line
/// per word with `dimension` space-separated components. The declared vocab
/// size is a hint only; dimension violations and non-numeric components are
/// errors with line numbers.
inline EmbeddingTable load_embeddings_stream(std::istream& in,
                                             const std::string& source = "<stream>") {
  LineReader reader(in, source);
  if (!reader.next()) throw std::runtime_error(source + ": empty embedding file");
  auto header = split_whitespace(reader.line());
  if (header.size() != 2) reader.fail("expected header '<vocab_size> <dimension>'");
  auto vocab_size = parse_int(header[0]);
  auto dimension = parse_int(header[1]);
  if (!vocab_size || *vocab_size < 0) reader.fail("vocab_size must be a non-negative integer");
  if (!dimension || *dimension < 1) reader.fail("dimension must be a positive integer");

  EmbeddingTable table(static_cast<std::size_t>(*dimension));
  while (reader.next()) {
    if (trim(reader.line()).empty()) continue;
    auto fields = split_whitespace(reader.line());
    if (fields.size() != static_cast<std::size_t>(*dimension) + 1)
      reader.fail("expected 1 token + " + std::to_string(*dimension) + " components, got " +
                  std::to_string(fields.size()) + " fields");
    std::vector<double> vector;
    vector.reserve(static_cast<std::size_t>(*dimension));
    for (std::size_t i = 1; i < fields.size(); ++i) {
      auto component = parse_double(fields[i]);
      if (!component) reader.fail("non-numeric component '" + std::string(fields[i]) + "'");
      vector.push_back(*component);
    }
    try {
      table.insert(std::string(fields[0]), std::move(vector));
    } catch (const std::invalid_argument& e) {
      reader.fail(e.what());
    }
  }
  return table;
}

inline EmbeddingTable load_embeddings(const std::string& path) {
  auto in = open_input(path);
  return load_embeddings_stream(in, path);
}

}  // namespace weakir

#pragma once

#include <cstddef>
#include <istream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "weakir/config.hpp"
#include "weakir/tokenize.hpp"
#include "weakir/util.hpp"

namespace weakir {

/// One news article: the headline acts as the pseudo-query, the content as
/// the pseudo-document. Fields are stored verbatim from the corpus file;
/// token lists are cached at ingest time.
struct Document {
  std::string id;
  std::string headline;
  std::string content;
  Tokens headline_tokens;
  Tokens content_tokens;
};

struct CorpusStats {
  std::size_t doc_count = 0;
  std::size_t total_content_tokens = 0;
  double avg_content_length = 0.0;
  std::unordered_map<std::string, std::size_t> doc_lengths;
};

/// Immutable after construction; safe for concurrent reads.
class Corpus {
 public:
  Corpus() = default;

  /// Takes ownership of `docs` (in file order), indexes them and computes
  /// content-length statistics. Throws on duplicate ids.
  static Corpus from_documents(std::vector<Document> docs) {
    Corpus corpus;
    corpus.docs_ = std::move(docs);
    corpus.index_.reserve(corpus.docs_.size());
    for (std::size_t i = 0; i < corpus.docs_.size(); ++i) {
      const Document& doc = corpus.docs_[i];
      if (doc.id.empty()) throw std::runtime_error("document with empty id");
      if (!corpus.index_.emplace(doc.id, i).second)
        throw std::runtime_error("duplicate doc_id: " + doc.id);
      corpus.stats_.total_content_tokens += doc.content_tokens.size();
      corpus.stats_.doc_lengths.emplace(doc.id, doc.content_tokens.size());
    }
    corpus.stats_.doc_count = corpus.docs_.size();
    if (corpus.stats_.doc_count > 0)
      corpus.stats_.avg_content_length = static_cast<double>(corpus.stats_.total_content_tokens) /
                                         static_cast<double>(corpus.stats_.doc_count);
    return corpus;
  }

  const std::vector<Document>& docs() const { return docs_; }
  const CorpusStats& stats() const { return stats_; }
  std::size_t size() const { return docs_.size(); }

  bool contains(std::string_view id) const { return index_.find(std::string(id)) != index_.end(); }

  const Document& by_id(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) throw std::out_of_range("unknown doc_id: " + std::string(id));
    return docs_[it->second];
  }

 private:
  std::vector<Document> docs_;
  std::unordered_map<std::string, std::size_t> index_;
  CorpusStats stats_;
};

struct IngestResult {
  Corpus corpus;
  std::size_t rejected = 0;       // headline length outside the configured bounds
  std::size_t total_records = 0;  // parsed records, admitted + rejected
};

/// Reads the tab-separated corpus format (doc_id<TAB>headline<TAB>content)
/// and admits documents whose tokenized headline length lies in
/// [min_headline_tokens, max_headline_tokens]. Duplicate ids and malformed
/// lines abort with the offending id / line number.
inline IngestResult ingest_corpus_stream(std::istream& in, const FilterConfig& cfg,
                                         const std::string& source = "<stream>") {
  cfg.validate();
  IngestResult result;
  std::vector<Document> admitted;
  std::unordered_set<std::string> seen_ids;
  LineReader reader(in, source);
  while (reader.next()) {
    const std::string& line = reader.line();
    auto fields = split(line, '\t');
    if (fields.size() != 3)
      reader.fail("expected 3 tab-separated fields, got " + std::to_string(fields.size()));
    std::string id{fields[0]};
    if (trim(id).empty()) reader.fail("empty doc_id");
    if (trim(fields[1]).empty()) reader.fail("empty headline for doc_id " + id);
    if (trim(fields[2]).empty()) reader.fail("empty content for doc_id " + id);
    if (!seen_ids.insert(id).second) reader.fail("duplicate doc_id: " + id);
    ++result.total_records;

    Tokens headline_tokens = tokenize(fields[1]);
    if (headline_tokens.size() < cfg.min_headline_tokens ||
        headline_tokens.size() > cfg.max_headline_tokens) {
      ++result.rejected;
      continue;
    }
    Document doc;
    doc.id = std::move(id);
    doc.headline = std::string(fields[1]);
    doc.content = std::string(fields[2]);
    doc.headline_tokens = std::move(headline_tokens);
    doc.content_tokens = tokenize(fields[2]);
    admitted.push_back(std::move(doc));
  }
  result.corpus = Corpus::from_documents(std::move(admitted));
  return result;
}

inline IngestResult ingest_corpus(const std::string& path, const FilterConfig& cfg) {
  auto in = open_input(path);
  return ingest_corpus_stream(in, cfg, path);
}

/// Writes documents back out in the corpus file format (used for the
/// admitted-corpus stage file).
inline void write_corpus(const Corpus& corpus, std::ostream& out) {
  for (const Document& doc : corpus.docs())
    out << doc.id << '\t' << doc.headline << '\t' << doc.content << '\n';
}

inline void write_corpus(const Corpus& corpus, const std::string& path) {
  auto out = open_output(path);
  write_corpus(corpus, out);
}

}  // namespace weakir

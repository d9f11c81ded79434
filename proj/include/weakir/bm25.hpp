#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "weakir/corpus.hpp"
#include "weakir/tokenize.hpp"
#include "weakir/util.hpp"

namespace weakir {

struct Posting {
  std::uint32_t doc = 0;  // position in the corpus, file order
  std::uint32_t tf = 0;
  bool operator==(const Posting&) const = default;
};

struct PostingList {
  std::string term;
  std::vector<Posting> entries;  // sorted by doc, no duplicates, tf >= 1
  bool operator==(const PostingList&) const = default;
};

struct ScoredHit {
  std::string doc_id;
  double score = 0.0;
  std::uint32_t rank = 0;  // 1-based
};

namespace detail {

inline void write_bytes(std::ostream& out, const void* p, std::size_t n) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  if (!out) throw std::runtime_error("index write failed");
}

inline void read_bytes(std::istream& in, void* p, std::size_t n) {
  in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (in.gcount() != static_cast<std::streamsize>(n)) throw std::runtime_error("truncated index file");
}

template <typename T>
void write_pod(std::ostream& out, T value) {
  write_bytes(out, &value, sizeof(value));
}

template <typename T>
T read_pod(std::istream& in) {
  T value{};
  read_bytes(in, &value, sizeof(value));
  return value;
}

inline void write_string(std::ostream& out, const std::string& s) {
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  write_bytes(out, s.data(), s.size());
}

inline std::string read_string(std::istream& in) {
  auto len = read_pod<std::uint32_t>(in);
  std::string s(len, '\0');
  if (len > 0) read_bytes(in, s.data(), len);
  return s;
}

}  // namespace detail

/// Inverted index over document contents with BM25 scoring. Headlines are
/// never indexed; they are the queries. Immutable once built, so concurrent
/// retrieval needs no synchronization.
///
/// IDF uses the +1-smoothed form ln((N - df + 0.5)/(df + 0.5) + 1), which is
/// strictly positive for every indexed term; repeated query terms count once.
class Bm25Index {
 public:
  static constexpr char kMagic[8] = {'W', 'E', 'A', 'K', 'I', 'R', 'X', '1'};

  Bm25Index() = default;

  static Bm25Index build(const Corpus& corpus, double k1 = 1.2, double b = 0.75) {
    Bm25Index index;
    index.k1_ = k1;
    index.b_ = b;
    index.doc_ids_.reserve(corpus.size());
    index.doc_lengths_.reserve(corpus.size());
    for (std::uint32_t d = 0; d < corpus.size(); ++d) {
      const Document& doc = corpus.docs()[d];
      index.doc_ids_.push_back(doc.id);
      index.doc_lengths_.push_back(static_cast<std::uint32_t>(doc.content_tokens.size()));
      // Count terms in first-occurrence order so term ids are deterministic.
      std::unordered_map<std::string_view, std::uint32_t> counts;
      std::vector<std::string_view> order;
      for (const std::string& token : doc.content_tokens) {
        auto [it, inserted] = counts.emplace(token, 0);
        if (inserted) order.push_back(token);
        ++it->second;
      }
      for (std::string_view term : order) {
        auto [it, inserted] = index.term_ids_.emplace(std::string(term),
                                                      static_cast<std::uint32_t>(index.postings_.size()));
        if (inserted) index.postings_.push_back(PostingList{std::string(term), {}});
        index.postings_[it->second].entries.push_back(Posting{d, counts[term]});
      }
    }
    index.avg_doc_length_ = corpus.stats().avg_content_length;
    index.rebuild_doc_lookup();
    return index;
  }

  std::size_t doc_count() const { return doc_ids_.size(); }
  std::size_t vocabulary_size() const { return postings_.size(); }
  double k1() const { return k1_; }
  double b() const { return b_; }
  double avg_doc_length() const { return avg_doc_length_; }
  const std::vector<std::string>& doc_ids() const { return doc_ids_; }

  const PostingList* postings(std::string_view term) const {
    auto it = term_ids_.find(std::string(term));
    return it == term_ids_.end() ? nullptr : &postings_[it->second];
  }

  /// BM25 score of one document against a query; terms absent from the
  /// document contribute 0. Throws for unknown doc ids.
  double score(const Tokens& query, std::string_view doc_id) const {
    auto it = doc_lookup_.find(std::string(doc_id));
    if (it == doc_lookup_.end()) throw std::out_of_range("unknown doc_id: " + std::string(doc_id));
    const std::uint32_t doc = it->second;
    double total = 0.0;
    std::unordered_set<std::string_view> seen;
    for (const std::string& term : query) {
      if (!seen.insert(term).second) continue;
      const PostingList* list = postings(term);
      if (list == nullptr) continue;
      auto entry = std::lower_bound(list->entries.begin(), list->entries.end(), doc,
                                    [](const Posting& p, std::uint32_t d) { return p.doc < d; });
      if (entry == list->entries.end() || entry->doc != doc) continue;
      total += term_weight(entry->tf, list->entries.size(), doc_lengths_[doc]);
    }
    return total;
  }

  /// Top-k documents with score > 0, ordered by (score desc, doc_id asc).
  std::vector<ScoredHit> retrieve(const Tokens& query, std::size_t k) const {
    if (k < 1) throw std::invalid_argument("retrieve requires k >= 1");
    std::vector<double> scores(doc_ids_.size(), 0.0);
    std::vector<std::uint32_t> touched;
    std::unordered_set<std::string_view> seen;
    for (const std::string& term : query) {
      if (!seen.insert(term).second) continue;
      const PostingList* list = postings(term);
      if (list == nullptr) continue;
      const double df = static_cast<double>(list->entries.size());
      for (const Posting& p : list->entries) {
        if (scores[p.doc] == 0.0) touched.push_back(p.doc);
        scores[p.doc] += term_weight(p.tf, df, doc_lengths_[p.doc]);
      }
    }
    auto better = [&](std::uint32_t a, std::uint32_t b) {
      if (scores[a] != scores[b]) return scores[a] > scores[b];
      return doc_ids_[a] < doc_ids_[b];
    };
    if (k < touched.size()) {
      std::partial_sort(touched.begin(), touched.begin() + static_cast<std::ptrdiff_t>(k),
                        touched.end(), better);
      touched.resize(k);
    } else {
      std::sort(touched.begin(), touched.end(), better);
    }
    std::vector<ScoredHit> hits;
    hits.reserve(touched.size());
    for (std::uint32_t doc : touched)
      hits.push_back(ScoredHit{doc_ids_[doc], scores[doc], static_cast<std::uint32_t>(hits.size() + 1)});
    return hits;
  }

  void save(std::ostream& out) const {
    detail::write_bytes(out, kMagic, sizeof(kMagic));
    detail::write_pod<std::uint64_t>(out, doc_ids_.size());
    detail::write_pod<std::uint64_t>(out, postings_.size());
    detail::write_pod<double>(out, k1_);
    detail::write_pod<double>(out, b_);
    detail::write_pod<double>(out, avg_doc_length_);
    for (std::size_t d = 0; d < doc_ids_.size(); ++d) {
      detail::write_string(out, doc_ids_[d]);
      detail::write_pod<std::uint32_t>(out, doc_lengths_[d]);
    }
    for (const PostingList& list : postings_) {
      detail::write_string(out, list.term);
      detail::write_pod<std::uint64_t>(out, list.entries.size());
      for (const Posting& p : list.entries) {
        detail::write_pod<std::uint32_t>(out, p.doc);
        detail::write_pod<std::uint32_t>(out, p.tf);
      }
    }
  }

  void save(const std::string& path) const {
    auto out = open_output(path);
    save(out);
  }

  static Bm25Index load(std::istream& in) {
    char magic[8];
    detail::read_bytes(in, magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
      throw std::runtime_error("not a weakir index file");
    Bm25Index index;
    const auto doc_count = detail::read_pod<std::uint64_t>(in);
    const auto term_count = detail::read_pod<std::uint64_t>(in);
    index.k1_ = detail::read_pod<double>(in);
    index.b_ = detail::read_pod<double>(in);
    index.avg_doc_length_ = detail::read_pod<double>(in);
    index.doc_ids_.reserve(doc_count);
    index.doc_lengths_.reserve(doc_count);
    for (std::uint64_t d = 0; d < doc_count; ++d) {
      index.doc_ids_.push_back(detail::read_string(in));
      index.doc_lengths_.push_back(detail::read_pod<std::uint32_t>(in));
    }
    index.postings_.reserve(term_count);
    for (std::uint64_t t = 0; t < term_count; ++t) {
      PostingList list;
      list.term = detail::read_string(in);
      const auto entry_count = detail::read_pod<std::uint64_t>(in);
      list.entries.reserve(entry_count);
      for (std::uint64_t e = 0; e < entry_count; ++e) {
        Posting p;
        p.doc = detail::read_pod<std::uint32_t>(in);
        p.tf = detail::read_pod<std::uint32_t>(in);
        list.entries.push_back(p);
      }
      index.term_ids_.emplace(list.term, static_cast<std::uint32_t>(index.postings_.size()));
      index.postings_.push_back(std::move(list));
    }
    index.rebuild_doc_lookup();
    return index;
  }

  static Bm25Index load(const std::string& path) {
    auto in = open_input(path);
    return load(in);
  }

  bool operator==(const Bm25Index&) const = default;

 private:
  double idf(double df) const {
    const double n = static_cast<double>(doc_ids_.size());
    return std::log((n - df + 0.5) / (df + 0.5) + 1.0);
  }

  double term_weight(double tf, double df, double doc_length) const {
    return idf(df) * (tf * (k1_ + 1.0)) /
           (tf + k1_ * (1.0 - b_ + b_ * doc_length / avg_doc_length_));
  }

  void rebuild_doc_lookup() {
    doc_lookup_.clear();
    doc_lookup_.reserve(doc_ids_.size());
    for (std::uint32_t d = 0; d < doc_ids_.size(); ++d) doc_lookup_.emplace(doc_ids_[d], d);
  }

  std::vector<std::string> doc_ids_;
  std::vector<std::uint32_t> doc_lengths_;
  std::unordered_map<std::string, std::uint32_t> term_ids_;
  std::vector<PostingList> postings_;
  std::unordered_map<std::string, std::uint32_t> doc_lookup_;
  double avg_doc_length_ = 0.0;
  double k1_ = 1.2;
  double b_ = 0.75;
};

}  // namespace weakir

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "weakir/util.hpp"

namespace weakir {

struct Judgment {
  std::string query_id;
  std::string doc_id;
  int grade = 0;
};

struct RunEntry {
  std::string query_id;
  std::string doc_id;
  std::uint32_t rank = 0;  // 1-based, consecutive within a query
  double score = 0.0;
  std::string tag;
  bool operator==(const RunEntry&) const = default;
};

/// Relevance judgments, one grade per (query, doc). Negative grades (spam
/// labels) are stored as-is and clamped to 0 by the metrics.
class Qrels {
 public:
  using DocGrades = std::unordered_map<std::string, int>;

  static Qrels parse_stream(std::istream& in, const std::string& source = "<stream>") {
    Qrels qrels;
    LineReader reader(in, source);
    while (reader.next()) {
      if (trim(reader.line()).empty()) continue;
      auto fields = split_whitespace(reader.line());
      if (fields.size() != 4)
        reader.fail("expected 'query_id 0 doc_id grade', got " + std::to_string(fields.size()) +
                    " fields");
      auto grade = parse_int(fields[3]);
      if (!grade) reader.fail("grade must be an integer, got '" + std::string(fields[3]) + "'");
      std::string query{fields[0]};
      std::string doc{fields[2]};
      auto [it, inserted] = qrels.by_query_[query].emplace(doc, static_cast<int>(*grade));
      if (!inserted) reader.fail("duplicate judgment for (" + query + ", " + doc + ")");
      ++qrels.judgment_count_;
    }
    return qrels;
  }

  static Qrels parse(const std::string& path) {
    auto in = open_input(path);
    return parse_stream(in, path);
  }

  const DocGrades* find_query(const std::string& query_id) const {
    auto it = by_query_.find(query_id);
    return it == by_query_.end() ? nullptr : &it->second;
  }

  std::size_t query_count() const { return by_query_.size(); }
  std::size_t judgment_count() const { return judgment_count_; }

 private:
  std::map<std::string, DocGrades> by_query_;
  std::size_t judgment_count_ = 0;
};

/// (query_id, doc_id) -> externally produced score, e.g. a model's output.
using ScoreTable = std::unordered_map<std::string, std::unordered_map<std::string, double>>;

/// A ranked result list per query. Rank order is authoritative; after a
/// rerank the carried scores are annotations only (score monotonicity is a
/// file-format invariant enforced when parsing).
class Run {
 public:
  using QueryEntries = std::map<std::string, std::vector<RunEntry>>;

  Run() = default;

  /// Validates rank consecutiveness and score monotonicity per query.
  static Run from_entries(std::vector<RunEntry> entries, const std::string& source = "<entries>") {
    Run run;
    for (RunEntry& entry : entries) run.by_query_[entry.query_id].push_back(std::move(entry));
    for (auto& [query, list] : run.by_query_) {
      std::sort(list.begin(), list.end(),
                [](const RunEntry& a, const RunEntry& b) { return a.rank < b.rank; });
      for (std::size_t i = 0; i < list.size(); ++i) {
        if (list[i].rank != i + 1)
          throw std::runtime_error(source + ": query " + query +
                                   ": ranks are not consecutive from 1 (expected " +
                                   std::to_string(i + 1) + ", got " +
                                   std::to_string(list[i].rank) + ")");
        if (i > 0 && list[i].score > list[i - 1].score)
          throw std::runtime_error(source + ": query " + query + ": score increases at rank " +
                                   std::to_string(list[i].rank));
      }
    }
    return run;
  }

  static Run parse_stream(std::istream& in, const std::string& source = "<stream>") {
    std::vector<RunEntry> entries;
    LineReader reader(in, source);
    while (reader.next()) {
      if (trim(reader.line()).empty()) continue;
      auto fields = split_whitespace(reader.line());
      if (fields.size() != 6)
        reader.fail("expected 'query_id Q0 doc_id rank score tag', got " +
                    std::to_string(fields.size()) + " fields");
      RunEntry entry;
      entry.query_id = std::string(fields[0]);
      entry.doc_id = std::string(fields[2]);
      auto rank = parse_int(fields[3]);
      if (!rank || *rank < 1) reader.fail("rank must be a positive integer");
      entry.rank = static_cast<std::uint32_t>(*rank);
      auto score = parse_double(fields[4]);
      if (!score) reader.fail("score must be a number, got '" + std::string(fields[4]) + "'");
      entry.score = *score;
      entry.tag = std::string(fields[5]);
      entries.push_back(std::move(entry));
    }
    return from_entries(std::move(entries), source);
  }

  static Run parse(const std::string& path) {
    auto in = open_input(path);
    return parse_stream(in, path);
  }

  const QueryEntries& by_query() const { return by_query_; }

  const std::vector<RunEntry>* find_query(const std::string& query_id) const {
    auto it = by_query_.find(query_id);
    return it == by_query_.end() ? nullptr : &it->second;
  }

  friend Run rerank(const Run& baseline, const ScoreTable& scores, std::size_t depth);

 private:
  QueryEntries by_query_;
};

/// Score file: query_id<TAB>doc_id<TAB>score.
inline ScoreTable load_score_table_stream(std::istream& in, const std::string& source = "<stream>") {
  ScoreTable table;
  LineReader reader(in, source);
  while (reader.next()) {
    if (trim(reader.line()).empty()) continue;
    auto fields = split(reader.line(), '\t');
    if (fields.size() != 3)
      reader.fail("expected query_id<TAB>doc_id<TAB>score, got " + std::to_string(fields.size()) +
                  " fields");
    auto score = parse_double(fields[2]);
    if (!score) reader.fail("score must be a number, got '" + std::string(fields[2]) + "'");
    auto [it, inserted] = table[std::string(fields[0])].emplace(std::string(fields[1]), *score);
    if (!inserted)
      reader.fail("duplicate score for (" + std::string(fields[0]) + ", " + std::string(fields[1]) +
                  ")");
  }
  return table;
}

inline ScoreTable load_score_table(const std::string& path) {
  auto in = open_input(path);
  return load_score_table_stream(in, path);
}

/// Reorders the top `depth` documents of every query by (new score desc,
/// original rank asc); documents without a new score sink to the bottom of
/// the head in original order, and everything below `depth` keeps its order.
/// Ranks are renumbered from 1; original score values ride along unchanged.
inline Run rerank(const Run& baseline, const ScoreTable& scores, std::size_t depth = 100) {
  if (depth < 1) throw std::invalid_argument("rerank depth must be >= 1");
  std::vector<RunEntry> result;
  for (const auto& [query, entries] : baseline.by_query()) {
    const auto query_scores = scores.find(query);
    auto new_score = [&](const RunEntry& entry) {
      if (query_scores == scores.end()) return -std::numeric_limits<double>::infinity();
      auto it = query_scores->second.find(entry.doc_id);
      return it == query_scores->second.end() ? -std::numeric_limits<double>::infinity()
                                              : it->second;
    };
    std::vector<RunEntry> reordered(entries);
    const std::size_t head = std::min(depth, reordered.size());
    std::sort(reordered.begin(), reordered.begin() + static_cast<std::ptrdiff_t>(head),
              [&](const RunEntry& a, const RunEntry& b) {
                const double sa = new_score(a), sb = new_score(b);
                if (sa != sb) return sa > sb;
                return a.rank < b.rank;
              });
    for (std::size_t i = 0; i < reordered.size(); ++i) {
      reordered[i].rank = static_cast<std::uint32_t>(i + 1);
      result.push_back(std::move(reordered[i]));
    }
  }
  Run run;
  for (RunEntry& entry : result) run.by_query_[entry.query_id].push_back(std::move(entry));
  return run;
}

struct MetricReport {
  std::vector<std::pair<std::string, double>> per_query;  // sorted by query_id
  double mean = 0.0;
};

namespace detail {

inline double gain(int grade) { return std::exp2(static_cast<double>(std::max(grade, 0))) - 1.0; }

template <typename PerQuery>
MetricReport per_query_metric(const Run& run, const Qrels& qrels, PerQuery&& compute) {
  MetricReport report;
  double sum = 0.0;
  for (const auto& [query, entries] : run.by_query()) {
    const Qrels::DocGrades* judged = qrels.find_query(query);
    if (judged == nullptr) continue;  // unjudged queries are excluded from the mean
    const double value = compute(entries, *judged);
    report.per_query.emplace_back(query, value);
    sum += value;
  }
  report.mean = report.per_query.empty() ? 0.0 : sum / static_cast<double>(report.per_query.size());
  return report;
}

}  // namespace detail

/// nDCG@k with gains (2^g - 1), log2(rank+1) discounts, unjudged documents
/// counting as grade 0 and negative grades clamped to 0. The ideal ranking
/// uses every judged document of the query. Queries with IDCG = 0 score 0.
inline MetricReport ndcg_at_k(const Run& run, const Qrels& qrels, std::size_t k = 20) {
  if (k < 1) throw std::invalid_argument("ndcg_at_k requires k >= 1");
  return detail::per_query_metric(
      run, qrels, [&](const std::vector<RunEntry>& entries, const Qrels::DocGrades& judged) {
        double dcg = 0.0;
        const std::size_t limit = std::min(k, entries.size());
        for (std::size_t r = 0; r < limit; ++r) {
          auto it = judged.find(entries[r].doc_id);
          const int grade = it == judged.end() ? 0 : it->second;
          dcg += detail::gain(grade) / std::log2(static_cast<double>(r) + 2.0);
        }
        std::vector<int> grades;
        grades.reserve(judged.size());
        for (const auto& [doc, grade] : judged) grades.push_back(grade);
        std::sort(grades.begin(), grades.end(), std::greater<>());
        double idcg = 0.0;
        for (std::size_t r = 0; r < std::min(k, grades.size()); ++r)
          idcg += detail::gain(grades[r]) / std::log2(static_cast<double>(r) + 2.0);
        return idcg > 0.0 ? dcg / idcg : 0.0;
      });
}

/// ERR@k (cascade model): with stop probability R(g) = (2^max(g,0) - 1) /
/// 2^g_max, ERR = sum over ranks of (1/r) * R(g_r) * prod_{i<r} (1 - R(g_i)).
inline MetricReport err_at_k(const Run& run, const Qrels& qrels, std::size_t k = 20,
                             int g_max = 4) {
  if (k < 1) throw std::invalid_argument("err_at_k requires k >= 1");
  if (g_max < 1) throw std::invalid_argument("err_at_k requires g_max >= 1");
  const double denom = std::exp2(static_cast<double>(g_max));
  return detail::per_query_metric(
      run, qrels, [&](const std::vector<RunEntry>& entries, const Qrels::DocGrades& judged) {
        double err = 0.0;
        double not_stopped = 1.0;
        const std::size_t limit = std::min(k, entries.size());
        for (std::size_t r = 0; r < limit; ++r) {
          auto it = judged.find(entries[r].doc_id);
          const int grade = it == judged.end() ? 0 : it->second;
          const double stop = detail::gain(grade) / denom;
          err += not_stopped * stop / (static_cast<double>(r) + 1.0);
          not_stopped *= 1.0 - stop;
        }
        return err;
      });
}

/// One query_id<TAB>value row per judged query plus a final mean row, all
/// with 4 decimal places.
inline void write_metric_report(const MetricReport& report, std::ostream& out) {
  for (const auto& [query, value] : report.per_query)
    out << query << '\t' << format_fixed(value, 4) << '\n';
  out << "mean\t" << format_fixed(report.mean, 4) << '\n';
}

}  // namespace weakir

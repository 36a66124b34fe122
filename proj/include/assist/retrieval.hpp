#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "assist/text.hpp"

namespace assist {

struct QAPair {
  std::string id;
  std::string question;
  std::string answer;
  std::optional<std::string> scenario;

  friend bool operator==(const QAPair&, const QAPair&) = default;
};

/// `{"id", "question", "answer", "scenario"?}` per line.
std::vector<QAPair> load_kb(const std::filesystem::path& path);

/// Lower-cased, normalized content tokens used on both the index and query
/// side.
std::vector<std::string> retrieval_tokens(const std::string& text);

struct Posting {
  std::int32_t doc = 0;
  std::int32_t tf = 0;

  friend bool operator==(const Posting&, const Posting&) = default;
};

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

struct SearchHit {
  std::string id;
  double score = 0.0;
  std::int32_t doc = 0;
};

/// BM25 index over question text. Internal doc numbers follow ascending id
/// order, so ties on score resolve to the smaller id.
class InvertedIndex {
 public:
  InvertedIndex() = default;

  const std::vector<QAPair>& docs() const { return docs_; }
  const std::vector<Posting>* postings(std::string_view term) const;
  std::int32_t doc_length(std::int32_t doc) const { return lengths_.at(static_cast<std::size_t>(doc)); }
  double avg_length() const { return avg_length_; }
  const CorpusStats& stats() const { return stats_; }
  const QAPair& doc(std::int32_t d) const { return docs_.at(static_cast<std::size_t>(d)); }
  const QAPair* find(std::string_view id) const;

  /// Lucene-style idf: ln(1 + (N - df + 0.5) / (df + 0.5)).
  double idf(std::string_view term) const;

  std::string serialize() const;
  static InvertedIndex deserialize(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static InvertedIndex load(const std::filesystem::path& path);

  friend InvertedIndex build_index(std::span<const QAPair> kb);
  friend bool operator==(const InvertedIndex& a, const InvertedIndex& b) {
    return a.docs_ == b.docs_ && a.postings_ == b.postings_ && a.lengths_ == b.lengths_;
  }

 private:
  void finish();

  std::vector<QAPair> docs_;
  std::map<std::string, std::vector<Posting>, std::less<>> postings_;
  std::vector<std::int32_t> lengths_;
  double avg_length_ = 0.0;
  CorpusStats stats_;
};

/// Throws DuplicateId or InvalidArgument on an empty question/answer.
InvertedIndex build_index(std::span<const QAPair> kb);

/// Top-k hits with score > 0, score descending then id ascending. Repeated
/// query terms count once. Throws EmptyQuery on a blank query.
std::vector<SearchHit> search(const InvertedIndex& index, const std::string& query, int k,
                              Bm25Params params = {});

}  // namespace assist

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace assist {

/// Lowercases, applies Unicode compatibility normalization (NFKC), collapses
/// whitespace runs to a single space and trims both ends.
std::string normalize(std::string_view text);

/// True for code points segmented one character per token (Han, kana, Hangul).
bool is_cjk(char32_t cp);

/// A set of multi-unit terms used for greedy longest-match segmentation.
/// Entries are normalized and split into base units on insertion.
class TermDictionary {
 public:
  TermDictionary() = default;
  explicit TermDictionary(std::span<const std::string> terms);

  void add(std::string_view term);
  bool contains(const std::vector<std::string>& units) const;
  std::size_t max_units() const { return max_units_; }
  bool empty() const { return entries_.empty(); }

 private:
  std::set<std::vector<std::string>> entries_;
  std::size_t max_units_ = 0;
};

/// Splits normalized text into tokens. Latin-like words are separated by
/// whitespace and punctuation (each punctuation mark is its own token), CJK
/// characters are single tokens, and when `dict` is given consecutive units
/// are merged by greedy longest match against it. A merged token keeps the
/// original spacing between its units ("flight ticket").
std::vector<std::string> tokenize(std::string_view text,
                                  const TermDictionary* dict = nullptr);

/// Joins tokens back into display text: single spaces between tokens except
/// around CJK characters.
std::string detokenize(std::span<const std::string> tokens);

/// True when the token holds at least one word or CJK character.
bool is_content_token(std::string_view token);

/// Surface-to-id map with PAD=0 and UNK=1 always present.
class Vocabulary {
 public:
  static constexpr std::int32_t kPad = 0;
  static constexpr std::int32_t kUnk = 1;

  Vocabulary();
  /// Extra reserved surfaces take ids 2, 3, ... in order.
  explicit Vocabulary(std::span<const std::string> extra_reserved);

  std::int32_t add(std::string_view surface);
  std::int32_t id(std::string_view surface) const;  // UNK when absent
  std::optional<std::int32_t> find(std::string_view surface) const;
  const std::string& surface(std::int32_t id) const;
  std::size_t size() const { return surfaces_.size(); }

  std::vector<std::int32_t> encode(std::span<const std::string> tokens) const;

  /// `surface<TAB>id` per line, sorted by id.
  void save(const std::filesystem::path& path) const;
  std::string serialize() const;
  static Vocabulary load(const std::filesystem::path& path);
  static Vocabulary deserialize(std::string_view text);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.surfaces_ == b.surfaces_;
  }

 private:
  std::vector<std::string> surfaces_;
  std::unordered_map<std::string, std::int32_t> ids_;
};

/// Document frequencies over a corpus of token lists.
struct CorpusStats {
  std::int64_t doc_count = 0;
  std::map<std::string, std::int64_t> doc_freq;

  void add_document(std::span<const std::string> tokens);
  std::int64_t df(std::string_view term) const;
};

/// Smoothed inverse document frequency: ln((N+1)/(df+1)) + 1.
double compute_idf(const CorpusStats& stats, std::string_view term);
double compute_idf(std::int64_t doc_count, std::int64_t df);

/// UTF-8 decoding into code points; invalid bytes decode as U+FFFD.
std::u32string utf8_decode(std::string_view text);
std::string utf8_encode(std::u32string_view text);

}  // namespace assist

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "assist/text.hpp"
#include "assist/trie.hpp"

namespace assist {

// Offline pipeline that turns knowledge items and chat logs into graph
// entities and wording patterns for the semantic parser.

enum class PosClass { kNoun, kVerb, kOther };

std::string_view pos_class_name(PosClass pos);

/// Part-of-speech stand-in: `surface<TAB>class` lines, class in
/// {noun, verb, other}. Unlisted tokens count as other.
using Lexicon = std::map<std::string, PosClass, std::less<>>;

Lexicon parse_lexicon(const std::string& text, const std::string& origin);
Lexicon load_lexicon(const std::filesystem::path& path);

struct TermCandidate {
  std::string surface;
  PosClass pos = PosClass::kOther;
  double tfidf = 0.0;
};

/// Keeps lexicon nouns and verbs whose best per-document tf-idf (tf = count /
/// document length, smoothed idf) reaches `tfidf_min`. Sorted by score
/// descending, then surface.
std::vector<TermCandidate> extract_candidate_terms(std::span<const std::string> corpus,
                                                   const Lexicon& lexicon, double tfidf_min);

struct HighOrderEntity {
  std::string first;
  std::string second;
  std::string surface;       // "first second" as it appears in text
  std::int64_t count = 0;    // sentences where both terms occur
  double pmi = 0.0;
};

/// Pointwise mutual information from sentence-level counts with add-one
/// smoothing: ln(((c_ab+1)/(N+1)) / (((c_a+1)/(N+1)) * ((c_b+1)/(N+1)))).
double smoothed_pmi(std::int64_t pair_count, std::int64_t count_a, std::int64_t count_b,
                    std::int64_t sentences);

/// Candidate pairs are terms adjacent somewhere in the corpus; counts are
/// sentence co-occurrence counts. Emits pairs with count >= count_min and
/// PMI >= pmi_min, sorted by PMI descending then surface.
std::vector<HighOrderEntity> mine_high_order(std::span<const std::string> sentences,
                                             std::span<const TermCandidate> terms, double pmi_min,
                                             std::int64_t count_min);

/// Word vectors plus idf weights; embeds a sentence as the idf-weighted mean
/// of its known token vectors, L2-normalized. Sentences with no known token
/// map to the zero vector.
class SentenceEncoder {
 public:
  SentenceEncoder(std::map<std::string, std::vector<double>> vectors, CorpusStats stats);

  Eigen::VectorXd embed(const std::string& text) const;
  int dim() const { return dim_; }

 private:
  std::map<std::string, Eigen::VectorXd, std::less<>> vectors_;
  CorpusStats stats_;
  int dim_ = 0;
};

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

struct ChatLogPair {
  std::string question;
  std::string answer;
};

/// `{"question", "answer"}` per line.
std::vector<ChatLogPair> load_chat_log(const std::filesystem::path& path);

struct ItemText {
  std::string id;
  std::string answer;
};

struct HarvestedUtterance {
  std::size_t log_index = 0;
  std::string question;
  double score = 0.0;
};

struct UtteranceCluster {
  std::string item_id;
  std::vector<HarvestedUtterance> utterances;  // chat-log order
};

/// For every item, harvests the questions of chat-log answers whose cosine
/// with the item's answer is at least `tau`.
std::vector<UtteranceCluster> normalize_utterances(std::span<const ItemText> items,
                                                   std::span<const ChatLogPair> chat_log,
                                                   const SentenceEncoder& encoder, double tau);

struct Itemset {
  std::vector<std::string> items;  // sorted
  std::int64_t count = 0;
  double support = 0.0;

  friend bool operator==(const Itemset&, const Itemset&) = default;
};

/// Level-wise Apriori over token sets. Returns every itemset with
/// support >= min_support, ordered by size then lexicographically.
std::vector<Itemset> apriori(std::span<const std::set<std::string>> transactions,
                             double min_support);

/// True when `count` out of `total` reaches `min_support`.
bool meets_support(std::int64_t count, std::size_t total, double min_support);

/// Tokenizes each utterance into a token set (punctuation dropped) and runs
/// Apriori.
std::vector<Itemset> mine_wording_patterns(std::span<const std::string> utterances,
                                           double min_support);

/// Turns itemsets of at least `min_items` tokens into pattern-file lines. The
/// pattern text is the first contiguous run in `utterances` made of exactly
/// the itemset's tokens; itemsets never seen contiguously are skipped.
std::vector<PatternSpec> itemsets_to_patterns(std::span<const Itemset> itemsets,
                                              std::span<const std::string> utterances,
                                              const std::string& kind, const std::string& value,
                                              std::size_t min_items = 2);

}  // namespace assist

#include "assist/kg_construction.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "assist/error.hpp"
#include "assist/io.hpp"
#include "assist/kernels.hpp"

namespace assist {

std::string_view pos_class_name(PosClass pos) {
  switch (pos) {
    case PosClass::kNoun: return "noun";
    case PosClass::kVerb: return "verb";
    case PosClass::kOther: break;
  }
  return "other";
}

Lexicon parse_lexicon(const std::string& text, const std::string& origin) {
  Lexicon lex;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw Error(Errc::kMalformedFile, origin + ":" + std::to_string(lineno) + ": expected surface<TAB>class");
    const std::string cls = line.substr(tab + 1);
    PosClass pos = PosClass::kOther;
    if (cls == "noun") {
      pos = PosClass::kNoun;
    } else if (cls == "verb") {
      pos = PosClass::kVerb;
    } else if (cls != "other") {
      throw Error(Errc::kMalformedFile, origin + ":" + std::to_string(lineno) + ": unknown class '" + cls + "'");
    }
    lex[normalize(line.substr(0, tab))] = pos;
  }
  return lex;
}

Lexicon load_lexicon(const std::filesystem::path& path) {
  return parse_lexicon(read_file(path), path.string());
}

namespace {

TermDictionary lexicon_dictionary(const Lexicon& lexicon) {
  TermDictionary dict;
  for (const auto& [surface, _] : lexicon) dict.add(surface);
  return dict;
}

PosClass lookup(const Lexicon& lexicon, std::string_view token) {
  auto it = lexicon.find(token);
  return it == lexicon.end() ? PosClass::kOther : it->second;
}

}  // namespace

std::vector<TermCandidate> extract_candidate_terms(std::span<const std::string> corpus,
                                                   const Lexicon& lexicon, double tfidf_min) {
  const TermDictionary dict = lexicon_dictionary(lexicon);
  std::vector<std::vector<std::string>> docs;
  CorpusStats stats;
  for (const auto& doc : corpus) {
    docs.push_back(tokenize(normalize(doc), &dict));
    stats.add_document(docs.back());
  }
  std::map<std::string, TermCandidate> best;
  for (const auto& tokens : docs) {
    if (tokens.empty()) continue;
    std::map<std::string, int> counts;
    for (const auto& t : tokens) ++counts[t];
    for (const auto& [term, c] : counts) {
      const PosClass pos = lookup(lexicon, term);
      if (pos == PosClass::kOther) continue;
      const double score = static_cast<double>(c) / static_cast<double>(tokens.size()) *
                           compute_idf(stats, term);
      auto [it, fresh] = best.try_emplace(term, TermCandidate{term, pos, score});
      if (!fresh) it->second.tfidf = std::max(it->second.tfidf, score);
    }
  }
  std::vector<TermCandidate> out;
  for (auto& [_, cand] : best)
    if (cand.tfidf >= tfidf_min) out.push_back(std::move(cand));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.tfidf != b.tfidf ? a.tfidf > b.tfidf : a.surface < b.surface;
  });
  return out;
}

double smoothed_pmi(std::int64_t pair_count, std::int64_t count_a, std::int64_t count_b,
                    std::int64_t sentences) {
  const double n = static_cast<double>(sentences + 1);
  const double p_ab = static_cast<double>(pair_count + 1) / n;
  const double p_a = static_cast<double>(count_a + 1) / n;
  const double p_b = static_cast<double>(count_b + 1) / n;
  return std::log(p_ab / (p_a * p_b));
}

std::vector<HighOrderEntity> mine_high_order(std::span<const std::string> sentences,
                                             std::span<const TermCandidate> terms, double pmi_min,
                                             std::int64_t count_min) {
  std::set<std::string, std::less<>> term_set;
  TermDictionary dict;
  for (const auto& t : terms) {
    term_set.insert(t.surface);
    dict.add(t.surface);
  }
  std::vector<std::set<std::string>> present;
  std::set<std::pair<std::string, std::string>> adjacent;
  std::map<std::pair<std::string, std::string>, std::string> surface_of;
  for (const auto& s : sentences) {
    const auto tokens = tokenize(normalize(s), &dict);
    std::set<std::string> here;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (!term_set.count(tokens[i])) continue;
      here.insert(tokens[i]);
      if (i + 1 < tokens.size() && term_set.count(tokens[i + 1]) && tokens[i] != tokens[i + 1]) {
        std::pair key{tokens[i], tokens[i + 1]};
        adjacent.insert(key);
        surface_of.try_emplace(key, tokens[i] + " " + tokens[i + 1]);
      }
    }
    present.push_back(std::move(here));
  }
  auto count_sentences = [&](auto&& pred) {
    std::int64_t c = 0;
    for (const auto& h : present) c += pred(h);
    return c;
  };
  const auto n = static_cast<std::int64_t>(sentences.size());
  std::vector<HighOrderEntity> out;
  for (const auto& [a, b] : adjacent) {
    const std::int64_t ca = count_sentences([&](const auto& h) { return h.count(a) > 0; });
    const std::int64_t cb = count_sentences([&](const auto& h) { return h.count(b) > 0; });
    const std::int64_t cab = count_sentences([&](const auto& h) { return h.count(a) && h.count(b); });
    if (cab < count_min) continue;
    const double pmi = smoothed_pmi(cab, ca, cb, n);
    if (pmi < pmi_min) continue;
    out.push_back({a, b, surface_of.at({a, b}), cab, pmi});
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    return x.pmi != y.pmi ? x.pmi > y.pmi : x.surface < y.surface;
  });
  return out;
}

SentenceEncoder::SentenceEncoder(std::map<std::string, std::vector<double>> vectors,
                                 CorpusStats stats)
    : stats_(std::move(stats)) {
  for (auto& [surface, v] : vectors) {
    if (dim_ == 0) dim_ = static_cast<int>(v.size());
    if (static_cast<int>(v.size()) != dim_)
      throw Error(Errc::kInvalidArgument, "inconsistent word vector dimensions");
    vectors_.emplace(surface, Eigen::Map<const Eigen::VectorXd>(v.data(), dim_));
  }
}

Eigen::VectorXd SentenceEncoder::embed(const std::string& text) const {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(dim_);
  for (const auto& token : tokenize(normalize(text))) {
    auto it = vectors_.find(token);
    if (it == vectors_.end()) continue;
    acc += compute_idf(stats_, token) * it->second;
  }
  const double norm = acc.norm();
  if (norm > 0.0) acc /= norm;
  return acc;
}

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

std::vector<ChatLogPair> load_chat_log(const std::filesystem::path& path) {
  std::vector<ChatLogPair> out;
  for (const auto& r : read_jsonl(path)) {
    if (!r.contains("question") || !r.contains("answer"))
      throw Error(Errc::kMalformedFile, path.string() + ": record lacks question/answer");
    out.push_back({r.at("question").get<std::string>(), r.at("answer").get<std::string>()});
  }
  return out;
}

std::vector<UtteranceCluster> normalize_utterances(std::span<const ItemText> items,
                                                   std::span<const ChatLogPair> chat_log,
                                                   const SentenceEncoder& encoder, double tau) {
  const int d = encoder.dim();
  Eigen::MatrixXd item_vecs(d, static_cast<Eigen::Index>(items.size()));
  for (std::size_t i = 0; i < items.size(); ++i)
    item_vecs.col(static_cast<Eigen::Index>(i)) = encoder.embed(items[i].answer);
  Eigen::MatrixXd log_vecs(d, static_cast<Eigen::Index>(chat_log.size()));
  for (std::size_t j = 0; j < chat_log.size(); ++j)
    log_vecs.col(static_cast<Eigen::Index>(j)) = encoder.embed(chat_log[j].answer);

  const Eigen::MatrixXd sims = kernels::cosine_matrix_omp(item_vecs, log_vecs);
  std::vector<UtteranceCluster> clusters;
  for (std::size_t i = 0; i < items.size(); ++i) {
    UtteranceCluster cluster{items[i].id, {}};
    for (std::size_t j = 0; j < chat_log.size(); ++j) {
      const double s = sims(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (s >= tau) cluster.utterances.push_back({j, chat_log[j].question, s});
    }
    clusters.push_back(std::move(cluster));
  }
  return clusters;
}

bool meets_support(std::int64_t count, std::size_t total, double min_support) {
  return total > 0 &&
         static_cast<double>(count) >= min_support * static_cast<double>(total) - 1e-9;
}

std::vector<Itemset> apriori(std::span<const std::set<std::string>> transactions,
                             double min_support) {
  if (transactions.empty()) return {};
  // Item ids follow lexicographic order, so id-sorted itemsets are also
  // lexicographically sorted.
  std::set<std::string> universe;
  for (const auto& t : transactions) universe.insert(t.begin(), t.end());
  const std::vector<std::string> items(universe.begin(), universe.end());
  std::map<std::string, std::int32_t> id_of;
  for (std::size_t i = 0; i < items.size(); ++i) id_of[items[i]] = static_cast<std::int32_t>(i);
  std::vector<std::vector<std::int32_t>> encoded;
  for (const auto& t : transactions) {
    std::vector<std::int32_t> ids;
    for (const auto& s : t) ids.push_back(id_of.at(s));
    encoded.push_back(std::move(ids));  // std::set iteration keeps ids sorted
  }

  std::vector<Itemset> out;
  auto emit = [&](const std::vector<std::int32_t>& ids, std::int64_t count) {
    Itemset s;
    for (auto id : ids) s.items.push_back(items[static_cast<std::size_t>(id)]);
    s.count = count;
    s.support = static_cast<double>(count) / static_cast<double>(transactions.size());
    out.push_back(std::move(s));
  };

  std::vector<std::vector<std::int32_t>> level;
  for (std::size_t i = 0; i < items.size(); ++i) level.push_back({static_cast<std::int32_t>(i)});
  while (!level.empty()) {
    const auto counts = kernels::itemset_support_omp(encoded, level);
    std::vector<std::vector<std::int32_t>> frequent;
    for (std::size_t c = 0; c < level.size(); ++c) {
      if (meets_support(counts[c], transactions.size(), min_support)) {
        emit(level[c], counts[c]);
        frequent.push_back(level[c]);
      }
    }
    // Join frequent k-sets sharing a (k-1)-prefix, prune by subsets.
    std::set<std::vector<std::int32_t>> known(frequent.begin(), frequent.end());
    std::vector<std::vector<std::int32_t>> next;
    for (std::size_t a = 0; a < frequent.size(); ++a) {
      for (std::size_t b = a + 1; b < frequent.size(); ++b) {
        const auto& x = frequent[a];
        const auto& y = frequent[b];
        if (!std::equal(x.begin(), x.end() - 1, y.begin())) break;  // sorted: prefix groups are contiguous
        std::vector<std::int32_t> cand = x;
        cand.push_back(y.back());
        bool ok = true;
        for (std::size_t drop = 0; drop + 2 < cand.size() && ok; ++drop) {
          std::vector<std::int32_t> sub = cand;
          sub.erase(sub.begin() + static_cast<long>(drop));
          ok = known.count(sub) > 0;
        }
        if (ok) next.push_back(std::move(cand));
      }
    }
    level = std::move(next);
  }
  std::stable_sort(out.begin(), out.end(), [](const Itemset& a, const Itemset& b) {
    return a.items.size() != b.items.size() ? a.items.size() < b.items.size() : a.items < b.items;
  });
  return out;
}

std::vector<Itemset> mine_wording_patterns(std::span<const std::string> utterances,
                                           double min_support) {
  std::vector<std::set<std::string>> transactions;
  for (const auto& u : utterances) {
    std::set<std::string> t;
    for (auto& tok : tokenize(normalize(u)))
      if (is_content_token(tok)) t.insert(std::move(tok));
    transactions.push_back(std::move(t));
  }
  return apriori(transactions, min_support);
}

std::vector<PatternSpec> itemsets_to_patterns(std::span<const Itemset> itemsets,
                                              std::span<const std::string> utterances,
                                              const std::string& kind, const std::string& value,
                                              std::size_t min_items) {
  std::vector<std::vector<std::string>> tokenized;
  for (const auto& u : utterances) tokenized.push_back(tokenize(normalize(u)));
  std::vector<PatternSpec> out;
  std::set<std::string> seen;
  for (const auto& set : itemsets) {
    const std::size_t k = set.items.size();
    if (k < min_items) continue;
    bool found = false;
    for (const auto& tokens : tokenized) {
      for (std::size_t i = 0; !found && i + k <= tokens.size(); ++i) {
        std::vector<std::string> run(tokens.begin() + static_cast<long>(i),
                                     tokens.begin() + static_cast<long>(i + k));
        std::vector<std::string> sorted = run;
        std::sort(sorted.begin(), sorted.end());
        if (sorted == set.items) {
          const std::string pattern = detokenize(run);
          if (seen.insert(pattern).second) out.push_back({pattern, kind, value, 0});
          found = true;
        }
      }
      if (found) break;
    }
  }
  return out;
}

}  // namespace assist

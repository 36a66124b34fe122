#include "assist/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "assist/error.hpp"
#include "assist/io.hpp"

namespace assist {

std::vector<QAPair> load_kb(const std::filesystem::path& path) {
  std::vector<QAPair> kb;
  for (const auto& r : read_jsonl(path)) {
    if (!r.contains("id") || !r.contains("question") || !r.contains("answer"))
      throw Error(Errc::kMalformedFile, path.string() + ": record lacks id/question/answer");
    QAPair p{r.at("id").get<std::string>(), r.at("question").get<std::string>(),
             r.at("answer").get<std::string>(), std::nullopt};
    if (r.contains("scenario") && !r.at("scenario").is_null())
      p.scenario = r.at("scenario").get<std::string>();
    kb.push_back(std::move(p));
  }
  return kb;
}

std::vector<std::string> retrieval_tokens(const std::string& text) {
  std::vector<std::string> out;
  for (auto& t : tokenize(normalize(text)))
    if (is_content_token(t)) out.push_back(std::move(t));
  return out;
}

const std::vector<Posting>* InvertedIndex::postings(std::string_view term) const {
  auto it = postings_.find(term);
  return it == postings_.end() ? nullptr : &it->second;
}

const QAPair* InvertedIndex::find(std::string_view id) const {
  auto it = std::lower_bound(docs_.begin(), docs_.end(), id,
                             [](const QAPair& p, std::string_view v) { return p.id < v; });
  return it != docs_.end() && it->id == id ? &*it : nullptr;
}

double InvertedIndex::idf(std::string_view term) const {
  const auto n = static_cast<double>(docs_.size());
  const auto* p = postings(term);
  const double df = p ? static_cast<double>(p->size()) : 0.0;
  return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

void InvertedIndex::finish() {
  stats_ = CorpusStats{};
  stats_.doc_count = static_cast<std::int64_t>(docs_.size());
  for (const auto& [term, list] : postings_) stats_.doc_freq[term] = static_cast<std::int64_t>(list.size());
  double total = 0.0;
  for (auto len : lengths_) total += len;
  avg_length_ = lengths_.empty() ? 0.0 : total / static_cast<double>(lengths_.size());
}

InvertedIndex build_index(std::span<const QAPair> kb) {
  InvertedIndex index;
  index.docs_.assign(kb.begin(), kb.end());
  std::sort(index.docs_.begin(), index.docs_.end(),
            [](const QAPair& a, const QAPair& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < index.docs_.size(); ++i) {
    const auto& d = index.docs_[i];
    if (i > 0 && index.docs_[i - 1].id == d.id) throw Error(Errc::kDuplicateId, "qa pair '" + d.id + "'");
    if (d.question.empty() || d.answer.empty())
      throw Error(Errc::kInvalidArgument, "qa pair '" + d.id + "' has empty question or answer");
    std::map<std::string, std::int32_t> tf;
    const auto tokens = retrieval_tokens(d.question);
    for (const auto& t : tokens) ++tf[t];
    // Questions made only of punctuation still get length 1.
    index.lengths_.push_back(std::max<std::int32_t>(1, static_cast<std::int32_t>(tokens.size())));
    for (const auto& [term, c] : tf)
      index.postings_[term].push_back({static_cast<std::int32_t>(i), c});
  }
  index.finish();
  return index;
}

std::vector<SearchHit> search(const InvertedIndex& index, const std::string& query, int k,
                              Bm25Params params) {
  if (normalize(query).empty()) throw Error(Errc::kEmptyQuery, "query is blank");
  if (k < 1) throw Error(Errc::kInvalidArgument, "k must be at least 1");
  const auto terms = retrieval_tokens(query);
  const std::set<std::string> unique(terms.begin(), terms.end());
  std::map<std::int32_t, double> scores;
  for (const auto& term : unique) {
    const auto* list = index.postings(term);
    if (!list) continue;
    const double idf = index.idf(term);
    for (const auto& p : *list) {
      const double tf = p.tf;
      const double norm =
          1.0 - params.b + params.b * index.doc_length(p.doc) / index.avg_length();
      scores[p.doc] += idf * (tf * (params.k1 + 1.0)) / (tf + params.k1 * norm);
    }
  }
  std::vector<SearchHit> hits;
  for (const auto& [doc, s] : scores)
    if (s > 0.0) hits.push_back({index.doc(doc).id, s, doc});
  std::stable_sort(hits.begin(), hits.end(),
                   [](const SearchHit& a, const SearchHit& b) { return a.score > b.score; });
  if (hits.size() > static_cast<std::size_t>(k)) hits.resize(static_cast<std::size_t>(k));
  return hits;
}

std::string InvertedIndex::serialize() const {
  json j;
  j["format"] = "bm25-index-v1";
  j["docs"] = json::array();
  for (std::size_t i = 0; i < docs_.size(); ++i) {
    json d{{"id", docs_[i].id}, {"question", docs_[i].question}, {"answer", docs_[i].answer},
           {"length", lengths_[i]}};
    if (docs_[i].scenario) d["scenario"] = *docs_[i].scenario;
    j["docs"].push_back(std::move(d));
  }
  json post = json::object();
  for (const auto& [term, list] : postings_) {
    json arr = json::array();
    for (const auto& p : list) arr.push_back({p.doc, p.tf});
    post[term] = std::move(arr);
  }
  j["postings"] = std::move(post);
  return j.dump() + "\n";
}

InvertedIndex InvertedIndex::deserialize(const std::string& text) {
  InvertedIndex index;
  try {
    const json j = json::parse(text);
    if (j.at("format") != "bm25-index-v1") throw Error(Errc::kMalformedFile, "unknown index format");
    for (const auto& d : j.at("docs")) {
      QAPair p{d.at("id"), d.at("question"), d.at("answer"), std::nullopt};
      if (d.contains("scenario")) p.scenario = d.at("scenario").get<std::string>();
      index.docs_.push_back(std::move(p));
      index.lengths_.push_back(d.at("length").get<std::int32_t>());
    }
    for (const auto& [term, arr] : j.at("postings").items()) {
      auto& list = index.postings_[term];
      for (const auto& p : arr) {
        const Posting posting{p.at(0).get<std::int32_t>(), p.at(1).get<std::int32_t>()};
        if (posting.doc < 0 || static_cast<std::size_t>(posting.doc) >= index.docs_.size() ||
            (!list.empty() && list.back().doc >= posting.doc))
          throw Error(Errc::kMalformedFile, "bad posting for term '" + term + "'");
        list.push_back(posting);
      }
    }
  } catch (const json::exception& e) {
    throw Error(Errc::kMalformedFile, std::string("index: ") + e.what());
  }
  index.finish();
  return index;
}

void InvertedIndex::save(const std::filesystem::path& path) const { write_file(path, serialize()); }

InvertedIndex InvertedIndex::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error(Errc::kMissingArtifact, path.string());
  return deserialize(read_file(path));
}

}  // namespace assist

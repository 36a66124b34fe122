#include "assist/pipeline.hpp"

#include <cstdio>

#include "assist/error.hpp"
#include "assist/io.hpp"

namespace assist {

IntentArtifactReport train_intent_artifact(const AppConfig& config, std::uint64_t seed, int epochs) {
  const auto graph = KnowledgeGraph::load(config.path("kg_nodes"), config.path("kg_edges"),
                                          config.path("kg_items"));
  const auto data = load_labeled_utterances(config.path("intent_train"));
  IntentConfig ic;
  ic.seed = seed;
  IntentTrainConfig tc;
  tc.epochs = epochs;
  tc.seed = seed;
  IntentArtifactReport report;
  report.examples = data.size();
  const Tagger tagger = graph_tagger(graph);
  const auto model = IntentClassifier::fit(data, tagger, ic, tc, true, &report.losses);
  std::size_t hit = 0;
  for (const auto& u : data) {
    const auto q = tagger(u.text);
    const auto c = tagger(u.context);
    hit += model.label_name(model.predict(u.text, q, c).label) == u.label;
  }
  report.train_accuracy = data.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(data.size());
  model.save(config.path("intent_model"));
  return report;
}

std::size_t index_kb_artifact(const std::filesystem::path& kb, const std::filesystem::path& out) {
  const auto pairs = load_kb(kb);
  build_index(pairs).save(out);
  return pairs.size();
}

std::vector<QAPair> chat_corpus_as_kb(std::span<const ChatPair> corpus) {
  std::vector<QAPair> kb;
  char id[32];
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    std::snprintf(id, sizeof id, "c%04zu", i);
    kb.push_back({id, corpus[i].post, corpus[i].reply, std::nullopt});
  }
  return kb;
}

ChatArtifactReport train_chat_artifact(const std::filesystem::path& corpus_path,
                                       const std::filesystem::path& model_out,
                                       const std::filesystem::path& index_out, int epochs,
                                       std::uint64_t seed) {
  const auto corpus = load_chat_corpus(corpus_path);
  Seq2SeqConfig mc;
  mc.seed = seed;
  Seq2SeqTrainConfig tc;
  tc.epochs = epochs;
  tc.seed = seed;
  ChatArtifactReport report;
  report.pairs = corpus.size();
  const auto model = train_seq2seq(corpus, mc, tc, &report.losses);
  report.token_accuracy = teacher_forced_accuracy(model, corpus);
  model.save(model_out);
  build_index(chat_corpus_as_kb(corpus)).save(index_out);
  return report;
}

void prepare_artifacts(const AppConfig& config, std::uint64_t seed) {
  train_intent_artifact(config, seed, static_cast<int>(config.integer("intent_epochs")));
  index_kb_artifact(config.path("kb"), config.path("kb_index"));
  train_chat_artifact(config.path("chat_corpus"), config.path("chat_model"), config.path("chat_index"),
                      static_cast<int>(config.integer("chat_epochs")), seed);
}

KgBuildReport build_kg_entities(const std::filesystem::path& corpus,
                                const std::filesystem::path& lexicon, double tfidf_min,
                                double pmi_min, std::int64_t count_min,
                                const std::filesystem::path& out) {
  const auto sentences = read_lines(corpus);
  const auto lex = load_lexicon(lexicon);
  KgBuildReport report;
  report.terms = extract_candidate_terms(sentences, lex, tfidf_min);
  report.entities = mine_high_order(sentences, report.terms, pmi_min, count_min);
  std::vector<json> records;
  for (const auto& t : report.terms)
    records.push_back({{"type", "term"}, {"surface", t.surface}, {"pos", pos_class_name(t.pos)}, {"tfidf", t.tfidf}});
  for (const auto& e : report.entities)
    records.push_back({{"type", "high_order"}, {"surface", e.surface}, {"parts", {e.first, e.second}},
                       {"count", e.count}, {"pmi", e.pmi}});
  write_jsonl(out, records);
  return report;
}

std::vector<PatternSpec> mine_patterns_artifact(const std::filesystem::path& items_path,
                                                const std::filesystem::path& chat_log_path,
                                                const std::filesystem::path& embeddings,
                                                double tau, double min_support,
                                                const std::filesystem::path& out) {
  std::vector<ItemText> items;
  for (const auto& r : read_jsonl(items_path)) items.push_back({r.at("id"), r.at("answer")});
  const auto log = load_chat_log(chat_log_path);
  CorpusStats stats;
  for (const auto& p : log) stats.add_document(tokenize(normalize(p.answer)));
  const SentenceEncoder encoder(load_embeddings(embeddings), stats);
  std::vector<PatternSpec> specs;
  for (const auto& cluster : normalize_utterances(items, log, encoder, tau)) {
    std::vector<std::string> questions;
    for (const auto& u : cluster.utterances) questions.push_back(u.question);
    const auto sets = mine_wording_patterns(questions, min_support);
    for (auto& s : itemsets_to_patterns(sets, questions, "item", cluster.item_id)) specs.push_back(std::move(s));
  }
  write_file(out, format_pattern_file(specs));
  return specs;
}

}  // namespace assist

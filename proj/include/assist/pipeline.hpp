#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "assist/chat_engine.hpp"
#include "assist/config.hpp"
#include "assist/kg_construction.hpp"

namespace assist {

// Offline stages shared by the command-line tool and the tests.

struct IntentArtifactReport {
  std::size_t examples = 0;
  std::vector<double> losses;
  double train_accuracy = 0.0;
};

/// Trains on `intent_train` with graph tags and writes `intent_model`.
IntentArtifactReport train_intent_artifact(const AppConfig& config, std::uint64_t seed, int epochs);

/// Indexes a KB file into an index file; returns the pair count.
std::size_t index_kb_artifact(const std::filesystem::path& kb, const std::filesystem::path& out);

/// Chat pairs as QA pairs with ids c0000, c0001, ... in corpus order.
std::vector<QAPair> chat_corpus_as_kb(std::span<const ChatPair> corpus);

struct ChatArtifactReport {
  std::size_t pairs = 0;
  std::vector<double> losses;
  double token_accuracy = 0.0;
};

/// Trains the generator and writes it plus the candidate index.
ChatArtifactReport train_chat_artifact(const std::filesystem::path& corpus,
                                       const std::filesystem::path& model_out,
                                       const std::filesystem::path& index_out, int epochs,
                                       std::uint64_t seed);

/// Builds every model and index named in the config.
void prepare_artifacts(const AppConfig& config, std::uint64_t seed);

struct KgBuildReport {
  std::vector<TermCandidate> terms;
  std::vector<HighOrderEntity> entities;
};

/// Candidate terms and compound entities from a corpus (one sentence per
/// line); writes them as JSON lines to `out`.
KgBuildReport build_kg_entities(const std::filesystem::path& corpus,
                                const std::filesystem::path& lexicon, double tfidf_min,
                                double pmi_min, std::int64_t count_min,
                                const std::filesystem::path& out);

/// Harvests chat-log questions per knowledge item and writes the mined
/// wording patterns as a pattern file with payload `item<TAB><item id>`.
std::vector<PatternSpec> mine_patterns_artifact(const std::filesystem::path& items,
                                                const std::filesystem::path& chat_log,
                                                const std::filesystem::path& embeddings,
                                                double tau, double min_support,
                                                const std::filesystem::path& out);

}  // namespace assist

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "assist/chat_engine.hpp"
#include "assist/io.hpp"
#include "assist/retrieval.hpp"

namespace assist {

/// Question with its acceptable answers.
struct EvalItem {
  std::string question;
  std::vector<std::string> acceptable;
};

/// `{"question", "acceptable": [...]}` per line. Throws EmptyEvalSet when
/// the file holds no records.
std::vector<EvalItem> load_eval_set(const std::filesystem::path& path);

enum class EvalSystem { kIr, kSeq2Seq, kHybrid };

std::string_view eval_system_name(EvalSystem s);
EvalSystem parse_eval_system(std::string_view name);

struct SystemScore {
  EvalSystem system = EvalSystem::kIr;
  std::size_t total = 0;
  std::size_t acceptable = 0;
  double p_top1 = 0.0;
};

struct EvalReport {
  std::vector<SystemScore> systems;
  int k = 0;
  double threshold = 0.0;
  std::uint64_t seed = 0;

  const SystemScore& score(EvalSystem s) const;
  json to_json() const;
};

/// Top-1 output of one system: the best retrieved answer (empty when none),
/// the greedy generation, or the hybrid rerank-or-generate answer.
std::string top1_answer(EvalSystem system, const std::string& question, const InvertedIndex& index,
                        const Seq2SeqModel& model, int k, double threshold);

/// Fraction of questions whose top-1 output equals an acceptable answer after
/// normalization; an empty output never counts. Throws EmptyEvalSet on an
/// empty set.
EvalReport run_eval(std::span<const EvalItem> items, std::span<const EvalSystem> systems,
                    const InvertedIndex& index, const Seq2SeqModel& model, int k, double threshold,
                    std::uint64_t seed = 0);

}  // namespace assist

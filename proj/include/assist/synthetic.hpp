#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "assist/chat_engine.hpp"
#include "assist/evaluation.hpp"
#include "assist/intent_cnn.hpp"
#include "assist/retrieval.hpp"

namespace assist::synthetic {

/// Ten intent classes, `per_class` templated utterances each. About one in
/// ten business utterances is a generic follow-up whose class is only
/// recoverable from the context question.
std::vector<LabeledUtterance> intent_benchmark(int per_class, std::uint64_t seed);

struct ParaphraseBenchmark {
  std::vector<QAPair> kb;           // one canonical wording per topic
  std::vector<ChatPair> train;      // paraphrases seen by the generator
  std::vector<EvalItem> eval;       // unseen paraphrases
};

/// Topics whose two concepts each have three interchangeable surface words.
/// The knowledge base stores only the first synonym of each concept.
ParaphraseBenchmark paraphrase_benchmark(int topics, int eval_per_topic, std::uint64_t seed);

}  // namespace assist::synthetic

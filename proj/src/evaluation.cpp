#include "assist/evaluation.hpp"

#include <algorithm>

#include "assist/error.hpp"

namespace assist {

std::vector<EvalItem> load_eval_set(const std::filesystem::path& path) {
  std::vector<EvalItem> out;
  for (const auto& r : read_jsonl(path)) {
    if (!r.contains("question") || !r.contains("acceptable"))
      throw Error(Errc::kMalformedFile, path.string() + ": record lacks question/acceptable");
    out.push_back({r.at("question"), r.at("acceptable").get<std::vector<std::string>>()});
  }
  if (out.empty()) throw Error(Errc::kEmptyEvalSet, path.string());
  return out;
}

std::string_view eval_system_name(EvalSystem s) {
  switch (s) {
    case EvalSystem::kIr: return "ir";
    case EvalSystem::kSeq2Seq: return "seq2seq";
    case EvalSystem::kHybrid: return "hybrid";
  }
  return "ir";
}

EvalSystem parse_eval_system(std::string_view name) {
  for (auto s : {EvalSystem::kIr, EvalSystem::kSeq2Seq, EvalSystem::kHybrid})
    if (eval_system_name(s) == name) return s;
  throw Error(Errc::kInvalidArgument, "unknown system '" + std::string(name) + "'");
}

const SystemScore& EvalReport::score(EvalSystem s) const {
  for (const auto& x : systems)
    if (x.system == s) return x;
  throw Error(Errc::kInvalidArgument, "system not evaluated");
}

json EvalReport::to_json() const {
  json j;
  j["k"] = k;
  j["threshold"] = threshold;
  j["seed"] = seed;
  for (const auto& s : systems)
    j["systems"][std::string(eval_system_name(s.system))] = {
        {"p_top1", s.p_top1}, {"total", s.total}, {"acceptable", s.acceptable}};
  return j;
}

std::string top1_answer(EvalSystem system, const std::string& question, const InvertedIndex& index,
                        const Seq2SeqModel& model, int k, double threshold) {
  switch (system) {
    case EvalSystem::kIr: {
      const auto hits = search(index, question, 1);
      return hits.empty() ? std::string{} : index.doc(hits[0].doc).answer;
    }
    case EvalSystem::kSeq2Seq: return generate(model, question);
    case EvalSystem::kHybrid: return chat_answer(question, index, model, k, threshold).text;
  }
  return {};
}

EvalReport run_eval(std::span<const EvalItem> items, std::span<const EvalSystem> systems,
                    const InvertedIndex& index, const Seq2SeqModel& model, int k, double threshold,
                    std::uint64_t seed) {
  if (items.empty()) throw Error(Errc::kEmptyEvalSet, "no evaluation questions");
  EvalReport report;
  report.k = k;
  report.threshold = threshold;
  report.seed = seed;
  for (auto system : systems) {
    SystemScore score{system, items.size(), 0, 0.0};
    for (const auto& item : items) {
      const std::string got = normalize(top1_answer(system, item.question, index, model, k, threshold));
      if (got.empty()) continue;  // no answer is never acceptable
      score.acceptable += std::any_of(item.acceptable.begin(), item.acceptable.end(),
                                      [&](const std::string& a) { return normalize(a) == got; });
    }
    score.p_top1 = static_cast<double>(score.acceptable) / static_cast<double>(score.total);
    report.systems.push_back(score);
  }
  return report;
}

}  // namespace assist

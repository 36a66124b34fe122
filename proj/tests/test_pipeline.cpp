#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sys/wait.h>

#include "assist/error.hpp"
#include "assist/evaluation.hpp"
#include "assist/pipeline.hpp"
#include "assist/synthetic.hpp"
#include "fixture.hpp"

using namespace assist;

namespace {

const std::filesystem::path kOffline = std::filesystem::path(ASSIST_DATA_DIR) / "demo" / "offline";

Seq2SeqModel untrained(std::span<const ChatPair> pairs) {
  Seq2SeqTrainConfig tc;
  tc.epochs = 0;
  return train_seq2seq(pairs, Seq2SeqConfig{}, tc);
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ASSIST_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("run_eval counts acceptable top-1 answers") {
  const std::vector<QAPair> kb{{"a", "alpha question here", "answer alpha", std::nullopt},
                               {"b", "beta question there", "answer beta", std::nullopt}};
  const auto index = build_index(kb);
  const std::vector<ChatPair> pairs{{"alpha question here", "answer alpha"}};
  const auto model = untrained(pairs);
  const std::vector<EvalSystem> ir{EvalSystem::kIr};

  const std::vector<EvalItem> perfect{{"alpha question", {"answer alpha"}}, {"beta there", {"x", "Answer  Beta"}}};
  CHECK(run_eval(perfect, ir, index, model, 5, 0.5).score(EvalSystem::kIr).p_top1 == 1.0);

  const std::vector<EvalItem> half{{"alpha question", {"answer alpha"}}, {"beta there", {"answer alpha"}}};
  const auto r = run_eval(half, ir, index, model, 5, 0.5);
  CHECK(r.score(EvalSystem::kIr).p_top1 == 0.5);
  CHECK(r.score(EvalSystem::kIr).acceptable == 1);
  CHECK(r.to_json()["systems"]["ir"]["total"] == 2);

  // No hit at all yields an empty answer, which is never acceptable.
  const std::vector<EvalItem> miss{{"gamma", {""}}};
  CHECK(run_eval(miss, ir, index, model, 5, 0.5).score(EvalSystem::kIr).p_top1 == 0.0);

  CHECK_THROWS_AS(run_eval(std::span<const EvalItem>{}, ir, index, model, 5, 0.5), Error);
  const auto empty = fixture::scratch_dir("eval") / "empty.jsonl";
  { std::ofstream(empty) << ""; }
  try {
    load_eval_set(empty);
    FAIL("expected EmptyEvalSet");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kEmptyEvalSet);
  }
  CHECK(parse_eval_system("hybrid") == EvalSystem::kHybrid);
  CHECK_THROWS_AS(parse_eval_system("oracle"), Error);
}

TEST_CASE("hybrid is at least as good as IR and the threshold is monotone") {
  const auto b = synthetic::paraphrase_benchmark(20, 5, 3);
  Seq2SeqTrainConfig tc;
  tc.epochs = 10;
  const auto model = train_seq2seq(b.train, Seq2SeqConfig{}, tc);
  const auto index = build_index(b.kb);
  const std::vector<EvalSystem> all{EvalSystem::kIr, EvalSystem::kSeq2Seq, EvalSystem::kHybrid};
  const auto r = run_eval(b.eval, all, index, model, 5, 0.3);
  CHECK(r.score(EvalSystem::kHybrid).p_top1 >= r.score(EvalSystem::kIr).p_top1);

  for (const auto& item : b.eval) {
    bool generated = false;
    for (int t = 1; t <= 9; ++t) {
      const auto resp = chat_answer(item.question, index, model, 5, t / 10.0);
      if (generated) CHECK(resp.source == ChatSource::kGenerated);
      generated = resp.source == ChatSource::kGenerated;
    }
  }
}

TEST_CASE("build_kg_entities on the demo corpus") {
  const auto out = fixture::scratch_dir("kg") / "entities.jsonl";
  const auto r = build_kg_entities(kOffline / "corpus.txt", kOffline / "lexicon.tsv", 0.0, 0.5, 2, out);
  std::map<std::string, HighOrderEntity> by_surface;
  for (const auto& e : r.entities) by_surface[e.surface] = e;
  REQUIRE(by_surface.count("alipay payment") == 1);
  REQUIRE(by_surface.count("taobao account") == 1);
  // 14 sentences; "alipay" and "payment" each occur in 3, always together.
  CHECK(by_surface["alipay payment"].count == 3);
  CHECK(std::abs(by_surface["alipay payment"].pmi - std::log(15.0 / 4.0)) < 1e-9);
  // Both parts occur in 2 sentences, together in both.
  CHECK(std::abs(by_surface["taobao account"].pmi - std::log(15.0 / 3.0)) < 1e-9);
  CHECK(by_surface.count("refund request") == 0);  // co-occurs once, below count_min

  std::size_t terms = 0, high = 0;
  for (const auto& rec : read_jsonl(out)) (rec.at("type") == "term" ? terms : high)++;
  CHECK(terms == r.terms.size());
  CHECK(high == r.entities.size());
}

TEST_CASE("mine_patterns_artifact maps chat-log wordings to items") {
  const auto out = fixture::scratch_dir("patterns") / "patterns.tsv";
  const auto specs = mine_patterns_artifact(std::filesystem::path(ASSIST_DATA_DIR) / "demo" / "kg_items.jsonl",
                                            kOffline / "chat_log.jsonl", kOffline / "embeddings.txt", 0.85, 0.4, out);
  REQUIRE(!specs.empty());
  std::set<std::string> items;
  for (const auto& s : specs) {
    CHECK(s.kind == "item");
    items.insert(s.value);
  }
  CHECK(items == std::set<std::string>{"k02", "k04"});
  const auto reloaded = load_pattern_file(out);
  REQUIRE(reloaded.size() == specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) CHECK(reloaded[i].pattern == specs[i].pattern);
  // Mined patterns compile into a trie that recognizes a new wording.
  std::vector<PatternTrie<std::string>::Pattern> patterns;
  for (const auto& s : reloaded) patterns.push_back({tokenize(normalize(s.pattern)), s.value});
  const auto trie = PatternTrie<std::string>::compile(patterns);
  const auto hits = trie.find_matches(tokenize(normalize("i lost my password how can i get it")));
  REQUIRE_FALSE(hits.empty());
  CHECK(hits.front().payloads == std::vector<std::string>{"k02"});
}

TEST_CASE("index_kb_artifact round-trips the in-memory index") {
  const auto kb = std::filesystem::path(ASSIST_DATA_DIR) / "demo" / "kb.jsonl";
  const auto out = fixture::scratch_dir("index") / "kb.index";
  CHECK(index_kb_artifact(kb, out) == 12);
  CHECK(InvertedIndex::load(out) == build_index(load_kb(kb)));
}

TEST_CASE("prepared artifacts load into engines deterministically") {
  const auto& cfg = fixture::prepared_config();
  const auto again = fixture::demo_config(fixture::scratch_dir("models_again"));
  prepare_artifacts(again, static_cast<std::uint64_t>(again.integer("seed")));
  for (const char* key : {"intent_model", "chat_model", "kb_index", "chat_index"}) {
    CAPTURE(key);
    CHECK(read_file(cfg.path(key)) == read_file(again.path(key)));
  }
}

TEST_CASE("command-line tool exit codes") {
  const std::string config = "--config " + (std::filesystem::path(ASSIST_DATA_DIR) / "demo" / "config.json").string();
  const auto dir = fixture::scratch_dir("cli");
  CHECK(run_cli(config + " index-kb --out " + (dir / "kb.index").string()) == 0);
  CHECK(std::filesystem::exists(dir / "kb.index"));
  CHECK(run_cli(config + " index-kb --in /nonexistent/kb.jsonl --out " + (dir / "x.index").string()) != 0);
  CHECK(run_cli("--config /nonexistent/config.json index-kb") != 0);
  CHECK(run_cli(config + " synth --kind paraphrase --n 3 --out " + dir.string()) == 0);
  CHECK(load_eval_set(dir / "eval.jsonl").size() == 15);
  CHECK(run_cli(config + " no-such-command") != 0);
}

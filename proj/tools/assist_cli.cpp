// Command-line driver for the offline stages, evaluation, REPL and server.

#include <csignal>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "assist/error.hpp"
#include "assist/evaluation.hpp"
#include "assist/pipeline.hpp"
#include "assist/service.hpp"
#include "assist/synthetic.hpp"

using namespace assist;

namespace {

struct Globals {
  std::string config;
  std::int64_t seed = -1;
  bool verbose = false;
};

AppConfig load_config(const Globals& g) {
  AppConfig c = g.config.empty() ? AppConfig() : AppConfig::load(g.config);
  if (g.config.empty()) c.apply_env();
  if (g.seed >= 0) c.set("seed", g.seed);
  return c;
}

std::uint64_t seed_of(const AppConfig& c) { return static_cast<std::uint64_t>(c.integer("seed")); }

void log(const Globals& g, const std::string& msg) {
  if (g.verbose) std::cerr << "[assist] " << msg << "\n";
}

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string part;
  while (std::getline(in, part, ',')) if (!part.empty()) out.push_back(part);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Assistant toolchain: training, indexing, evaluation and serving"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "JSON config file");
  app.add_option("--seed", g.seed, "Seed overriding the config");
  app.add_flag("--verbose", g.verbose, "Log progress to stderr");

  // train-intent
  auto* ti = app.add_subcommand("train-intent", "Train the intent classifier");
  std::string ti_data, ti_out;
  int ti_epochs = -1;
  ti->add_option("--data", ti_data, "Labeled utterances (JSON lines)");
  ti->add_option("--out", ti_out, "Model output path");
  ti->add_option("--epochs", ti_epochs, "Training epochs");

  // build-kg
  auto* bk = app.add_subcommand("build-kg", "Validate the graph and mine candidate entities");
  std::string bk_corpus, bk_lexicon, bk_out;
  double bk_tfidf = 0.0, bk_pmi = 0.5;
  std::int64_t bk_count = 2;
  bk->add_option("--corpus", bk_corpus, "Sentences, one per line");
  bk->add_option("--lexicon", bk_lexicon, "surface<TAB>class lexicon");
  bk->add_option("--out", bk_out, "Entities output (JSON lines)");
  bk->add_option("--tfidf-min", bk_tfidf);
  bk->add_option("--pmi-min", bk_pmi);
  bk->add_option("--count-min", bk_count);

  // mine-patterns
  auto* mp = app.add_subcommand("mine-patterns", "Mine wording patterns for knowledge items");
  std::string mp_items, mp_log, mp_emb, mp_out;
  double mp_tau = 0.85, mp_support = 0.4;
  mp->add_option("--items", mp_items, "Knowledge items (JSON lines)");
  mp->add_option("--chat-log", mp_log, "Chat log {question, answer} (JSON lines)")->required();
  mp->add_option("--embeddings", mp_emb, "Word vectors")->required();
  mp->add_option("--tau", mp_tau, "Answer similarity threshold");
  mp->add_option("--min-support", mp_support, "Apriori minimum support");
  mp->add_option("--out", mp_out, "Pattern file output")->required();

  // index-kb
  auto* ik = app.add_subcommand("index-kb", "Build the BM25 index over a QA knowledge base");
  std::string ik_in, ik_out;
  ik->add_option("--in", ik_in, "KB (JSON lines)");
  ik->add_option("--out", ik_out, "Index output");

  // train-chat
  auto* tc = app.add_subcommand("train-chat", "Train the sequence-to-sequence chat model");
  std::string tc_corpus, tc_out, tc_index;
  int tc_epochs = -1;
  tc->add_option("--corpus", tc_corpus, "Chat corpus {post, reply} (JSON lines)");
  tc->add_option("--epochs", tc_epochs);
  tc->add_option("--out", tc_out, "Model output path");
  tc->add_option("--index", tc_index, "Candidate index output path");

  // eval
  auto* ev = app.add_subcommand("eval", "P_top1 of ir, seq2seq and hybrid answers");
  std::string ev_qa, ev_kb, ev_model, ev_systems = "ir,seq2seq,hybrid";
  int ev_k = -1;
  double ev_t = -1.0;
  ev->add_option("--qa", ev_qa, "Labeled questions {question, acceptable[]}")->required();
  ev->add_option("--kb", ev_kb, "KB to index for candidates (default: chat index)");
  ev->add_option("--model", ev_model, "Chat model (default: config)");
  ev->add_option("--k", ev_k);
  ev->add_option("--threshold", ev_t);
  ev->add_option("--systems", ev_systems);

  // synth
  auto* sy = app.add_subcommand("synth", "Write synthetic corpora");
  std::string sy_kind = "intent", sy_out;
  int sy_n = 60;
  sy->add_option("--kind", sy_kind, "intent | paraphrase")->check(CLI::IsMember({"intent", "paraphrase"}));
  sy->add_option("--out", sy_out, "Output file (intent) or directory (paraphrase)")->required();
  sy->add_option("--n", sy_n, "Utterances per class or topics");

  // prepare
  auto* pr = app.add_subcommand("prepare", "Build every model and index named in the config");

  // repl
  auto* rp = app.add_subcommand("repl", "Converse on stdin through the same path as the server");
  bool rp_debug = false;
  std::int64_t rp_ts = -1;
  rp->add_flag("--debug", rp_debug, "Print the route trace");
  rp->add_option("--timestamp", rp_ts, "Fixed unix time for every turn");

  // serve
  auto* sv = app.add_subcommand("serve", "Start the HTTP service");
  int sv_port = -1;
  sv->add_option("--port", sv_port);

  CLI11_PARSE(app, argc, argv);

  try {
    AppConfig cfg = load_config(g);
    const std::uint64_t seed = seed_of(cfg);

    if (ti->parsed()) {
      if (!ti_data.empty()) cfg.set("intent_train", std::filesystem::absolute(ti_data).string());
      if (!ti_out.empty()) cfg.set("intent_model", std::filesystem::absolute(ti_out).string());
      const int epochs = ti_epochs >= 0 ? ti_epochs : static_cast<int>(cfg.integer("intent_epochs"));
      log(g, "training intent model on " + cfg.path("intent_train").string());
      const auto r = train_intent_artifact(cfg, seed, epochs);
      print(json{{"examples", r.examples}, {"epochs", epochs}, {"seed", seed},
             {"loss_first", r.losses.front()}, {"loss_last", r.losses.back()},
             {"train_accuracy", r.train_accuracy}, {"out", cfg.path("intent_model").string()}});
    } else if (bk->parsed()) {
      const auto graph = KnowledgeGraph::load(cfg.path("kg_nodes"), cfg.path("kg_edges"), cfg.path("kg_items"));
      json out{{"nodes", graph.nodes().size()}, {"edges", graph.edges().size()}, {"items", graph.items().size()}};
      if (!bk_corpus.empty()) {
        if (bk_lexicon.empty() || bk_out.empty())
          throw Error(Errc::kInvalidArgument, "--corpus needs --lexicon and --out");
        const auto r = build_kg_entities(bk_corpus, bk_lexicon, bk_tfidf, bk_pmi, bk_count, bk_out);
        out["terms"] = r.terms.size();
        out["high_order"] = r.entities.size();
        out["out"] = bk_out;
      }
      print(out);
    } else if (mp->parsed()) {
      const auto specs = mine_patterns_artifact(mp_items.empty() ? cfg.path("kg_items") : std::filesystem::path(mp_items), mp_log,
                                                mp_emb, mp_tau, mp_support, mp_out);
      print(json{{"patterns", specs.size()}, {"out", mp_out}});
    } else if (ik->parsed()) {
      const auto in = ik_in.empty() ? cfg.path("kb") : std::filesystem::path(ik_in);
      const auto out = ik_out.empty() ? cfg.path("kb_index") : std::filesystem::path(ik_out);
      print(json{{"pairs", index_kb_artifact(in, out)}, {"out", out.string()}});
    } else if (tc->parsed()) {
      const auto corpus = tc_corpus.empty() ? cfg.path("chat_corpus") : std::filesystem::path(tc_corpus);
      const auto out = tc_out.empty() ? cfg.path("chat_model") : std::filesystem::path(tc_out);
      const auto index = tc_index.empty() ? cfg.path("chat_index") : std::filesystem::path(tc_index);
      const int epochs = tc_epochs >= 0 ? tc_epochs : static_cast<int>(cfg.integer("chat_epochs"));
      log(g, "training chat model on " + corpus.string());
      const auto r = train_chat_artifact(corpus, out, index, epochs, seed);
      print(json{{"pairs", r.pairs}, {"epochs", epochs}, {"seed", seed}, {"loss_first", r.losses.front()},
             {"loss_last", r.losses.back()}, {"token_accuracy", r.token_accuracy}, {"out", out.string()}});
    } else if (ev->parsed()) {
      const auto items = load_eval_set(ev_qa);
      const auto model = Seq2SeqModel::load(ev_model.empty() ? cfg.path("chat_model") : std::filesystem::path(ev_model));
      const auto index = ev_kb.empty() ? InvertedIndex::load(cfg.path("chat_index")) : build_index(load_kb(ev_kb));
      std::vector<EvalSystem> systems;
      for (const auto& s : split_csv(ev_systems)) systems.push_back(parse_eval_system(s));
      const int k = ev_k > 0 ? ev_k : static_cast<int>(cfg.integer("k"));
      const double t = ev_t >= 0 ? ev_t : cfg.number("threshold");
      print(run_eval(items, systems, index, model, k, t, seed).to_json());
    } else if (sy->parsed()) {
      if (sy_kind == "intent") {
        std::vector<json> rows;
        for (const auto& u : synthetic::intent_benchmark(sy_n, seed))
          rows.push_back({{"text", u.text}, {"context", u.context}, {"label", u.label}});
        write_jsonl(sy_out, rows);
        print(json{{"utterances", rows.size()}, {"out", sy_out}});
      } else {
        const auto b = synthetic::paraphrase_benchmark(sy_n, 5, seed);
        const std::filesystem::path dir(sy_out);
        std::vector<json> kb, train, eval;
        for (const auto& p : b.kb) kb.push_back({{"id", p.id}, {"question", p.question}, {"answer", p.answer}});
        for (const auto& p : b.train) train.push_back({{"post", p.post}, {"reply", p.reply}});
        for (const auto& e : b.eval) eval.push_back({{"question", e.question}, {"acceptable", e.acceptable}});
        write_jsonl(dir / "kb.jsonl", kb);
        write_jsonl(dir / "train.jsonl", train);
        write_jsonl(dir / "eval.jsonl", eval);
        print(json{{"kb", kb.size()}, {"train", train.size()}, {"eval", eval.size()}, {"out", dir.string()}});
      }
    } else if (pr->parsed()) {
      log(g, "building all artifacts");
      prepare_artifacts(cfg, seed);
      print(json{{"intent_model", cfg.path("intent_model").string()}, {"chat_model", cfg.path("chat_model").string()},
             {"kb_index", cfg.path("kb_index").string()}, {"chat_index", cfg.path("chat_index").string()}});
    } else if (rp->parsed()) {
      auto engines = std::make_shared<const Engines>(load_engines(cfg));
      AssistService service(engines, cfg.path("journal"));
      std::optional<std::string> session;
      std::string line;
      while (std::getline(std::cin, line)) {
        if (normalize(line).empty()) continue;
        MessageRequest req{session, line, rp_debug, std::nullopt};
        if (rp_ts >= 0) req.timestamp = rp_ts;
        const auto r = service.handle_message(req);
        if (r.status != 200) {
          std::cout << "! " << r.body.dump() << "\n";
          continue;
        }
        session = r.body.at("session_id").get<std::string>();
        std::cout << "> " << r.body.at("reply").get<std::string>() << "  [" << r.body.at("source").get<std::string>() << "]\n";
        if (rp_debug) std::cout << r.body.at("trace").dump() << "\n";
      }
    } else if (sv->parsed()) {
      if (sv_port >= 0) cfg.set("port", sv_port);
      auto server = start_server(cfg);
      std::cerr << "listening on " << cfg.str("host") << ":" << server->port() << "\n";
      server->wait();
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

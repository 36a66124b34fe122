#include "assist/config.hpp"

#include <cctype>
#include <cstdlib>

#include "assist/error.hpp"

namespace assist {

namespace {

json defaults() {
  return json{{"rules", "rules.tsv"},
              {"promos", "promos.jsonl"},
              {"schemas", "schemas.jsonl"},
              {"kg_nodes", "kg_nodes.jsonl"},
              {"kg_edges", "kg_edges.jsonl"},
              {"kg_items", "kg_items.jsonl"},
              {"kb", "kb.jsonl"},
              {"chat_corpus", "chat_corpus.jsonl"},
              {"intent_train", "intent_train.jsonl"},
              {"intent_model", "models/intent.model"},
              {"chat_model", "models/chat.model"},
              {"kb_index", "models/kb.index"},
              {"chat_index", "models/chat.index"},
              {"executor", "mock"},
              {"executor_url", ""},
              {"threshold", 0.3},
              {"k", 5},
              {"s_min", 1.0},
              {"retry_limit", 2},
              {"port", 8080},
              {"host", "127.0.0.1"},
              {"journal", ""},
              {"seed", 7},
              {"intent_epochs", 15},
              {"chat_epochs", 150}};
}

std::filesystem::path require(const std::filesystem::path& p) {
  if (!std::filesystem::exists(p)) throw Error(Errc::kMissingArtifact, p.string());
  return p;
}

}  // namespace

AppConfig::AppConfig() : values_(defaults()), base_dir_(".") {}

AppConfig AppConfig::from_json(const json& values, std::filesystem::path base_dir) {
  AppConfig c;
  if (!values.is_object()) throw Error(Errc::kMalformedFile, "config must be a JSON object");
  for (const auto& [k, v] : values.items()) c.values_[k] = v;
  c.base_dir_ = std::move(base_dir);
  return c;
}

AppConfig AppConfig::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error(Errc::kMissingArtifact, path.string());
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error(Errc::kMalformedFile, path.string() + ": " + e.what());
  }
  AppConfig c = from_json(j, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
  c.apply_env();
  return c;
}

void AppConfig::apply_env() {
  for (auto& [key, value] : values_.items()) {
    std::string name = "ASSIST_";
    for (char ch : key) name += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    const char* raw = std::getenv(name.c_str());
    if (raw == nullptr) continue;
    const std::string text(raw);
    try {
      if (value.is_number_integer()) {
        value = std::stoll(text);
      } else if (value.is_number()) {
        value = std::stod(text);
      } else if (value.is_boolean()) {
        value = text == "1" || text == "true";
      } else {
        value = text;
      }
    } catch (const std::logic_error&) {
      throw Error(Errc::kInvalidArgument, name + " is not a number: " + text);
    }
  }
}

std::string AppConfig::str(const std::string& key) const {
  if (!values_.contains(key)) throw Error(Errc::kInvalidArgument, "missing config key '" + key + "'");
  const auto& v = values_.at(key);
  return v.is_string() ? v.get<std::string>() : v.dump();
}

std::filesystem::path AppConfig::path(const std::string& key) const {
  std::filesystem::path p = str(key);
  return p.is_absolute() || p.empty() ? p : base_dir_ / p;
}

double AppConfig::number(const std::string& key) const {
  const auto& v = values_.at(key);
  return v.is_string() ? std::stod(v.get<std::string>()) : v.get<double>();
}

std::int64_t AppConfig::integer(const std::string& key) const {
  const auto& v = values_.at(key);
  return v.is_string() ? std::stoll(v.get<std::string>()) : v.get<std::int64_t>();
}

RouterConfig router_config(const AppConfig& config) {
  RouterConfig rc;
  rc.retry_limit = static_cast<int>(config.integer("retry_limit"));
  rc.retrieval_min_score = config.number("s_min");
  rc.retrieval_k = static_cast<int>(config.integer("k"));
  rc.chat_k = static_cast<int>(config.integer("k"));
  rc.chat_threshold = config.number("threshold");
  return rc;
}

Engines load_engines(const AppConfig& config) {
  Engines e;
  e.rules = load_rules(require(config.path("rules")));
  e.promo_answers = load_promos(require(config.path("promos")));
  e.schemas = load_schema_file(require(config.path("schemas")));
  e.graph = KnowledgeGraph::load(require(config.path("kg_nodes")), require(config.path("kg_edges")),
                                 require(config.path("kg_items")));
  e.intent = IntentClassifier::load(require(config.path("intent_model")));
  e.kb_index = InvertedIndex::load(require(config.path("kb_index")));
  e.chat_index = InvertedIndex::load(require(config.path("chat_index")));
  e.chat_model = Seq2SeqModel::load(require(config.path("chat_model")));
  const std::string executor = config.str("executor");
  if (executor == "mock") {
    e.executor = std::make_shared<MockExecutor>();
  } else if (executor == "http") {
    e.executor = std::make_shared<HttpExecutor>(config.str("executor_url"));
  } else {
    throw Error(Errc::kInvalidArgument, "executor must be 'mock' or 'http'");
  }
  e.config = router_config(config);
  return e;
}

}  // namespace assist

#pragma once
// Demo deployment with freshly trained artifacts in a per-process temp dir.

#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <unistd.h>

#include "assist/config.hpp"
#include "assist/pipeline.hpp"
#include "assist/router.hpp"

namespace fixture {

inline std::filesystem::path scratch_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("assist_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

/// Demo config with model and index outputs redirected to scratch space.
inline assist::AppConfig demo_config(const std::filesystem::path& models) {
  auto cfg = assist::AppConfig::load(std::filesystem::path(ASSIST_DATA_DIR) / "demo" / "config.json");
  cfg.set("intent_model", (models / "intent.model").string());
  cfg.set("chat_model", (models / "chat.model").string());
  cfg.set("kb_index", (models / "kb.index").string());
  cfg.set("chat_index", (models / "chat.index").string());
  cfg.set("journal", "");
  return cfg;
}

/// Trained once per process; every caller shares the result.
inline const assist::AppConfig& prepared_config() {
  static std::once_flag once;
  static assist::AppConfig cfg;
  std::call_once(once, [] {
    cfg = demo_config(scratch_dir("models"));
    assist::prepare_artifacts(cfg, static_cast<std::uint64_t>(cfg.integer("seed")));
  });
  return cfg;
}

inline std::shared_ptr<const assist::Engines> engines() {
  static auto e = std::make_shared<const assist::Engines>(assist::load_engines(prepared_config()));
  return e;
}

}  // namespace fixture

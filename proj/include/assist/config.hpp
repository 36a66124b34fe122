#pragma once

#include <filesystem>
#include <string>

#include "assist/io.hpp"
#include "assist/router.hpp"

namespace assist {

/// JSON configuration. Relative paths resolve against the config file's
/// directory; `ASSIST_<KEY>` environment variables override any key.
class AppConfig {
 public:
  AppConfig();
  static AppConfig load(const std::filesystem::path& path);
  static AppConfig from_json(const json& values, std::filesystem::path base_dir);

  /// Re-reads `ASSIST_<UPPERCASE KEY>` for every known key.
  void apply_env();
  void set(const std::string& key, json value) { values_[key] = std::move(value); }

  bool has(const std::string& key) const { return values_.contains(key); }
  std::string str(const std::string& key) const;
  std::filesystem::path path(const std::string& key) const;
  double number(const std::string& key) const;
  std::int64_t integer(const std::string& key) const;
  const json& values() const { return values_; }
  const std::filesystem::path& base_dir() const { return base_dir_; }

 private:
  json values_;
  std::filesystem::path base_dir_;
};

RouterConfig router_config(const AppConfig& config);

/// Loads every artifact the router needs. Throws MissingArtifact naming the
/// first path that does not exist.
Engines load_engines(const AppConfig& config);

}  // namespace assist

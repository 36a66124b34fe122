#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace assist {

using json = nlohmann::json;

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

/// Non-empty lines that do not start with '#'.
std::vector<std::string> read_lines(const std::filesystem::path& path);

/// One JSON object per line. Blank lines and '#' comments are skipped.
std::vector<json> read_jsonl(const std::filesystem::path& path);
std::vector<json> parse_jsonl(const std::string& text, const std::string& origin);
void write_jsonl(const std::filesystem::path& path, const std::vector<json>& records);

// Parameter files: a line-oriented text format where every real is written as
// a C99 hexfloat, so a save/load round trip is bit-exact.
//
//   tensor <name> <rows> <cols>
//   <hexfloat> ... (one row per line)
class ParamWriter {
 public:
  explicit ParamWriter(std::ostream& out) : out_(out) {}
  void field(const std::string& key, const std::string& value);
  void tensor(const std::string& name, const Eigen::MatrixXd& m);
  void vector(const std::string& name, const Eigen::VectorXd& v);

 private:
  std::ostream& out_;
};

class ParamReader {
 public:
  explicit ParamReader(std::istream& in) : in_(in) {}
  std::string field(const std::string& key);
  Eigen::MatrixXd tensor(const std::string& name);
  Eigen::VectorXd vector(const std::string& name);
  /// Reads `count` raw lines (used for embedded vocabularies).
  std::string raw_lines(std::size_t count);

 private:
  std::string next_line();
  std::istream& in_;
};

}  // namespace assist

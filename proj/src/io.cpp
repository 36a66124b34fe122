#include "assist/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "assist/error.hpp"

namespace assist {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kMissingArtifact, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::kMissingArtifact, "cannot write " + path.string());
  out << content;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    lines.push_back(line);
  }
  return lines;
}

std::vector<json> parse_jsonl(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::vector<json> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    try {
      json record = json::parse(line);
      if (!record.is_object()) throw std::runtime_error("not an object");
      records.push_back(std::move(record));
    } catch (const std::exception& e) {
      throw Error(Errc::kMalformedFile,
                  origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return records;
}

std::vector<json> read_jsonl(const std::filesystem::path& path) {
  return parse_jsonl(read_file(path), path.string());
}

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& records) {
  std::string out;
  for (const auto& r : records) {
    out += r.dump();
    out += '\n';
  }
  write_file(path, out);
}

namespace {

std::string hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

}  // namespace

void ParamWriter::field(const std::string& key, const std::string& value) {
  out_ << "field " << key << ' ' << value << '\n';
}

void ParamWriter::tensor(const std::string& name, const Eigen::MatrixXd& m) {
  out_ << "tensor " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out_ << ' ';
      out_ << hex(m(r, c));
    }
    out_ << '\n';
  }
}

void ParamWriter::vector(const std::string& name, const Eigen::VectorXd& v) {
  tensor(name, Eigen::MatrixXd(v));
}

std::string ParamReader::next_line() {
  std::string line;
  if (!std::getline(in_, line)) throw Error(Errc::kMalformedFile, "unexpected end of parameter file");
  return line;
}

std::string ParamReader::field(const std::string& key) {
  const std::string line = next_line();
  const std::string prefix = "field " + key + " ";
  if (line.rfind(prefix, 0) != 0)
    throw Error(Errc::kMalformedFile, "expected field '" + key + "', got '" + line + "'");
  return line.substr(prefix.size());
}

Eigen::MatrixXd ParamReader::tensor(const std::string& name) {
  std::istringstream header(next_line());
  std::string tag, got;
  Eigen::Index rows = 0, cols = 0;
  header >> tag >> got >> rows >> cols;
  if (tag != "tensor" || got != name || rows < 0 || cols < 0)
    throw Error(Errc::kMalformedFile, "expected tensor '" + name + "'");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::string line = next_line();
    const char* p = line.c_str();
    for (Eigen::Index c = 0; c < cols; ++c) {
      char* end = nullptr;
      m(r, c) = std::strtod(p, &end);
      if (end == p) throw Error(Errc::kMalformedFile, "short row in tensor '" + name + "'");
      p = end;
    }
  }
  return m;
}

Eigen::VectorXd ParamReader::vector(const std::string& name) {
  Eigen::MatrixXd m = tensor(name);
  if (m.cols() != 1 && m.rows() != 0) throw Error(Errc::kMalformedFile, "tensor '" + name + "' is not a vector");
  return Eigen::VectorXd(m.col(0));
}

std::string ParamReader::raw_lines(std::size_t count) {
  std::string out;
  for (std::size_t i = 0; i < count; ++i) {
    out += next_line();
    out += '\n';
  }
  return out;
}

}  // namespace assist

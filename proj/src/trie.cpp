#include "assist/trie.hpp"

#include <sstream>

#include "assist/io.hpp"

namespace assist {

std::vector<PatternSpec> parse_pattern_file(const std::string& text, const std::string& origin) {
  std::vector<PatternSpec> specs;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos)
      throw Error(Errc::kMalformedFile,
                  origin + ":" + std::to_string(lineno) + ": expected three tab-separated fields");
    PatternSpec spec{line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1), line.substr(t2 + 1),
                     lineno};
    if (spec.pattern.empty() || spec.kind.empty())
      throw Error(Errc::kMalformedFile, origin + ":" + std::to_string(lineno) + ": empty field");
    specs.push_back(std::move(spec));
  }
  return specs;
}

std::vector<PatternSpec> load_pattern_file(const std::filesystem::path& path) {
  return parse_pattern_file(read_file(path), path.string());
}

std::string format_pattern_file(std::span<const PatternSpec> specs) {
  std::string out;
  for (const auto& s : specs) {
    out += s.pattern + '\t' + s.kind + '\t' + s.value + '\n';
  }
  return out;
}

}  // namespace assist

#include "assist/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/locid.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "assist/error.hpp"

namespace assist {

namespace {

bool is_space(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' ||
         u_isUWhiteSpace(static_cast<UChar32>(cp));
}

bool is_word_char(char32_t cp) {
  return u_isalnum(static_cast<UChar32>(cp)) || u_charType(cp) == U_NON_SPACING_MARK ||
         u_charType(cp) == U_COMBINING_SPACING_MARK;
}

bool is_digit(char32_t cp) { return cp >= U'0' && cp <= U'9'; }

struct Unit {
  std::string text;
  bool space_before = false;
};

std::vector<Unit> split_units(std::string_view text) {
  std::vector<Unit> units;
  const std::u32string cps = utf8_decode(text);
  std::u32string word;
  bool gap = false;
  bool word_gap = false;
  auto flush = [&] {
    if (!word.empty()) {
      units.push_back({utf8_encode(word), word_gap});
      word.clear();
      gap = false;
    }
  };
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t cp = cps[i];
    if (is_space(cp)) {
      flush();
      gap = true;
      continue;
    }
    if (is_cjk(cp)) {
      flush();
      units.push_back({utf8_encode(std::u32string(1, cp)), gap});
      gap = false;
      continue;
    }
    if (is_word_char(cp)) {
      if (word.empty()) word_gap = gap;
      word.push_back(cp);
      continue;
    }
    // Joiners stay inside a word when flanked by word characters: "don't",
    // "e-mail", "3.5".
    const bool next_word = i + 1 < cps.size() && is_word_char(cps[i + 1]) && !is_cjk(cps[i + 1]);
    if (!word.empty() && next_word &&
        (cp == U'\'' || cp == U'-' ||
         ((cp == U'.' || cp == U':') && is_digit(word.back()) && is_digit(cps[i + 1])))) {
      word.push_back(cp);
      continue;
    }
    flush();
    units.push_back({utf8_encode(std::u32string(1, cp)), gap});
    gap = false;
  }
  flush();
  return units;
}

}  // namespace

std::u32string utf8_decode(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    char32_t cp = 0xFFFD;
    std::size_t len = 1;
    if (c < 0x80) {
      cp = c;
    } else if ((c >> 5) == 0x6) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c >> 4) == 0xE) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c >> 3) == 0x1E) {
      len = 4;
      cp = c & 0x07;
    } else {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    if (i + len > text.size()) {
      out.push_back(0xFFFD);
      break;
    }
    bool ok = true;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(text[i + k]);
      if ((cc >> 6) != 0x2) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (cc & 0x3F);
    }
    if (!ok) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string utf8_encode(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : text) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

bool is_cjk(char32_t cp) {
  return (cp >= 0x3040 && cp <= 0x30FF) ||   // kana
         (cp >= 0x3400 && cp <= 0x4DBF) ||   // CJK ext A
         (cp >= 0x4E00 && cp <= 0x9FFF) ||   // CJK unified
         (cp >= 0xAC00 && cp <= 0xD7AF) ||   // Hangul syllables
         (cp >= 0xF900 && cp <= 0xFAFF) ||   // compatibility ideographs
         (cp >= 0x20000 && cp <= 0x2FA1F);   // ext B and beyond
}

bool is_content_token(std::string_view token) {
  for (char32_t cp : utf8_decode(token))
    if (is_word_char(cp) || is_cjk(cp)) return true;
  return false;
}

std::string normalize(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfkc = icu::Normalizer2::getNFKCInstance(status);
  icu::UnicodeString src = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  icu::UnicodeString folded = nfkc->normalize(src, status);
  if (U_FAILURE(status)) folded = src;
  folded.toLower(icu::Locale::getRoot());
  std::string utf8;
  folded.toUTF8String(utf8);

  std::u32string out;
  bool pending_space = false;
  for (char32_t cp : utf8_decode(utf8)) {
    if (is_space(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(U' ');
    pending_space = false;
    out.push_back(cp);
  }
  return utf8_encode(out);
}

TermDictionary::TermDictionary(std::span<const std::string> terms) {
  for (const auto& t : terms) add(t);
}

void TermDictionary::add(std::string_view term) {
  std::vector<std::string> units;
  for (auto& u : split_units(normalize(term))) units.push_back(std::move(u.text));
  if (units.empty()) return;
  max_units_ = std::max(max_units_, units.size());
  entries_.insert(std::move(units));
}

bool TermDictionary::contains(const std::vector<std::string>& units) const {
  return entries_.count(units) > 0;
}

std::vector<std::string> tokenize(std::string_view text, const TermDictionary* dict) {
  std::vector<Unit> units = split_units(text);
  std::vector<std::string> tokens;
  tokens.reserve(units.size());
  const bool use_dict = dict != nullptr && dict->max_units() > 1;
  std::size_t i = 0;
  while (i < units.size()) {
    std::size_t take = 1;
    if (use_dict) {
      const std::size_t longest = std::min(dict->max_units(), units.size() - i);
      std::vector<std::string> probe;
      for (std::size_t len = longest; len >= 2; --len) {
        probe.clear();
        for (std::size_t k = 0; k < len; ++k) probe.push_back(units[i + k].text);
        if (dict->contains(probe)) {
          take = len;
          break;
        }
      }
    }
    std::string surface = units[i].text;
    for (std::size_t k = 1; k < take; ++k) {
      if (units[i + k].space_before) surface.push_back(' ');
      surface += units[i + k].text;
    }
    tokens.push_back(std::move(surface));
    i += take;
  }
  return tokens;
}

std::string detokenize(std::span<const std::string> tokens) {
  auto first_cp = [](const std::string& s) {
    auto cps = utf8_decode(s);
    return cps.empty() ? char32_t{0} : cps.front();
  };
  auto last_cp = [](const std::string& s) {
    auto cps = utf8_decode(s);
    return cps.empty() ? char32_t{0} : cps.back();
  };
  auto closes = [](char32_t cp) {
    return cp == U',' || cp == U'.' || cp == U'!' || cp == U'?' || cp == U';' ||
           cp == U':' || cp == U')' || cp == U'%';
  };
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].empty()) continue;
    if (!out.empty()) {
      const char32_t prev = last_cp(out);
      const char32_t next = first_cp(tokens[i]);
      const bool glue = is_cjk(prev) || is_cjk(next) || prev == U'(' ||
                        (closes(next) && utf8_decode(tokens[i]).size() == 1);
      if (!glue) out.push_back(' ');
    }
    out += tokens[i];
  }
  return out;
}

Vocabulary::Vocabulary() : Vocabulary(std::span<const std::string>{}) {}

Vocabulary::Vocabulary(std::span<const std::string> extra_reserved) {
  add("<pad>");
  add("<unk>");
  for (const auto& s : extra_reserved) add(s);
}

std::int32_t Vocabulary::add(std::string_view surface) {
  if (auto it = ids_.find(std::string(surface)); it != ids_.end()) return it->second;
  const auto id = static_cast<std::int32_t>(surfaces_.size());
  surfaces_.emplace_back(surface);
  ids_.emplace(std::string(surface), id);
  return id;
}

std::int32_t Vocabulary::id(std::string_view surface) const {
  return find(surface).value_or(kUnk);
}

std::optional<std::int32_t> Vocabulary::find(std::string_view surface) const {
  auto it = ids_.find(std::string(surface));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

const std::string& Vocabulary::surface(std::int32_t id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= surfaces_.size()) return surfaces_[kUnk];
  return surfaces_[static_cast<std::size_t>(id)];
}

std::vector<std::int32_t> Vocabulary::encode(std::span<const std::string> tokens) const {
  std::vector<std::int32_t> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(id(t));
  return ids;
}

std::string Vocabulary::serialize() const {
  std::string out;
  for (std::size_t i = 0; i < surfaces_.size(); ++i) {
    out += surfaces_[i];
    out += '\t';
    out += std::to_string(i);
    out += '\n';
  }
  return out;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::kMissingArtifact, "cannot write " + path.string());
  out << serialize();
}

Vocabulary Vocabulary::deserialize(std::string_view text) {
  Vocabulary vocab;
  vocab.surfaces_.clear();
  vocab.ids_.clear();
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos)
      throw Error(Errc::kMalformedFile, "vocabulary line " + std::to_string(lineno));
    const std::string surface = line.substr(0, tab);
    const long id = std::stol(line.substr(tab + 1));
    if (id != static_cast<long>(vocab.surfaces_.size()) || surface.empty())
      throw Error(Errc::kMalformedFile, "vocabulary ids must be dense, line " +
                                            std::to_string(lineno));
    vocab.add(surface);
  }
  if (vocab.size() < 2 || vocab.surfaces_[kPad] != "<pad>" || vocab.surfaces_[kUnk] != "<unk>")
    throw Error(Errc::kMalformedFile, "vocabulary lacks <pad>/<unk>");
  return vocab;
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kMissingArtifact, path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str());
}

void CorpusStats::add_document(std::span<const std::string> tokens) {
  ++doc_count;
  std::set<std::string_view> seen(tokens.begin(), tokens.end());
  for (auto t : seen) ++doc_freq[std::string(t)];
}

std::int64_t CorpusStats::df(std::string_view term) const {
  auto it = doc_freq.find(std::string(term));
  return it == doc_freq.end() ? 0 : it->second;
}

double compute_idf(std::int64_t doc_count, std::int64_t df) {
  return std::log(static_cast<double>(doc_count + 1) / static_cast<double>(df + 1)) + 1.0;
}

double compute_idf(const CorpusStats& stats, std::string_view term) {
  return compute_idf(stats.doc_count, stats.df(term));
}

}  // namespace assist

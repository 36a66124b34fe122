#include "assist/text.hpp"

#include <cmath>
#include <random>

#include "assist/error.hpp"
#include "doctest.h"

using namespace assist;

namespace {

std::string strip_spaces(const std::string& s) {
  std::string out;
  for (char c : s)
    if (c != ' ') out.push_back(c);
  return out;
}

// Greedy longest match over whitespace-separated Latin words, written
// independently of the unit splitter.
std::vector<std::string> greedy_oracle(const std::string& text, const std::vector<std::string>& dict) {
  std::vector<std::string> words;
  std::string cur;
  for (char c : text) {
    if (c == ' ') {
      if (!cur.empty()) words.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) words.push_back(cur);
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < words.size()) {
    std::size_t best = 1;
    for (const auto& entry : dict) {
      std::string joined;
      for (std::size_t n = 1; i + n <= words.size(); ++n) {
        joined += (n > 1 ? " " : "") + words[i + n - 1];
        if (joined == entry && n > best) best = n;
      }
    }
    std::string tok = words[i];
    for (std::size_t n = 1; n < best; ++n) tok += " " + words[i + n];
    out.push_back(tok);
    i += best;
  }
  return out;
}

std::string random_text(std::mt19937& rng) {
  static const std::vector<std::string> pieces = {
      "a", "B", "c", "Ｔａｏ", "ｂａｏ", " ", "  ", "\t", "账", "号", "密码", ",", "!", "Flight",
      "TICKET", "x9", "　", "é", "É"};
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
  std::uniform_int_distribution<int> len(0, 12);
  std::string s;
  for (int i = len(rng); i > 0; --i) s += pieces[pick(rng)];
  return s;
}

}  // namespace

TEST_CASE("normalize lowercases and collapses whitespace") {
  CHECK(normalize("Real Person, Please ") == "real person, please");
  CHECK(normalize("") == "");
  CHECK(normalize("  many   \t spaces\n") == "many spaces");
}

TEST_CASE("normalize applies compatibility folding") {
  CHECK(normalize("\xEF\xBC\xB4\xEF\xBD\x81\xEF\xBD\x8F\xEF\xBD\x82\xEF\xBD\x81\xEF\xBD\x8F") ==
        "taobao");  // fullwidth "Ｔａｏｂａｏ"
  CHECK(normalize("a　b") == "a b");
}

TEST_CASE("normalize is idempotent") {
  std::mt19937 rng(11);
  for (int i = 0; i < 500; ++i) {
    const std::string s = random_text(rng);
    const std::string once = normalize(s);
    CHECK(normalize(once) == once);
  }
}

TEST_CASE("tokenize splits on whitespace and punctuation") {
  CHECK(tokenize("book a flight") == std::vector<std::string>{"book", "a", "flight"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("real person, please") ==
        std::vector<std::string>{"real", "person", ",", "please"});
  CHECK(tokenize("i don't know 3.5") == std::vector<std::string>{"i", "don't", "know", "3.5"});
}

TEST_CASE("tokenize merges dictionary terms by greedy longest match") {
  const std::vector<std::string> terms{"flight ticket"};
  TermDictionary dict(terms);
  CHECK(tokenize("book a flight ticket", &dict) ==
        std::vector<std::string>{"book", "a", "flight ticket"});

  const std::vector<std::string> nested{"a b", "a b c", "b c d", "c"};
  TermDictionary nd(nested);
  std::mt19937 rng(5);
  const std::vector<std::string> words{"a", "b", "c", "d"};
  for (int trial = 0; trial < 300; ++trial) {
    std::string text;
    for (int i = std::uniform_int_distribution<int>(0, 10)(rng); i > 0; --i)
      text += (text.empty() ? "" : " ") + words[rng() % words.size()];
    CHECK(tokenize(text, &nd) == greedy_oracle(text, nested));
  }
}

TEST_CASE("CJK runs fall back to single characters unless in the dictionary") {
  CHECK(tokenize("淘宝账号") == std::vector<std::string>{"淘", "宝", "账", "号"});
  const std::vector<std::string> terms{"淘宝", "淘宝账号"};
  TermDictionary dict(terms);
  CHECK(tokenize("查淘宝账号", &dict) == std::vector<std::string>{"查", "淘宝账号"});
  CHECK(detokenize(tokenize("查淘宝账号", &dict)) == "查淘宝账号");
}

TEST_CASE("tokens reconstruct the non-space content of the input") {
  std::mt19937 rng(3);
  const std::vector<std::string> terms{"flight ticket", "密码"};
  TermDictionary dict(terms);
  for (int i = 0; i < 500; ++i) {
    const std::string text = normalize(random_text(rng));
    std::string joined;
    for (const auto& t : tokenize(text, &dict)) {
      CHECK(!t.empty());
      joined += t;
    }
    CHECK(strip_spaces(joined) == strip_spaces(text));
  }
}

TEST_CASE("vocabulary reserves PAD and UNK and round-trips") {
  Vocabulary v;
  CHECK(v.size() == 2);
  CHECK(v.id("<pad>") == Vocabulary::kPad);
  CHECK(v.id("never seen") == Vocabulary::kUnk);
  const auto a = v.add("refund");
  CHECK(v.add("refund") == a);
  CHECK(v.surface(a) == "refund");
  CHECK(v.serialize() == "<pad>\t0\n<unk>\t1\nrefund\t2\n");
  CHECK(Vocabulary::deserialize(v.serialize()) == v);
  CHECK_THROWS_AS(Vocabulary::deserialize("<pad>\t0\nx\t5\n"), Error);
}

TEST_CASE("smoothed idf") {
  CHECK(compute_idf(3, 3) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(compute_idf(3, 1) == doctest::Approx(1.0 + std::log(2.0)).epsilon(1e-12));
  CHECK(compute_idf(3, 1) == doctest::Approx(1.6931).epsilon(1e-4));
  CHECK(compute_idf(3, 0) == doctest::Approx(2.3863).epsilon(1e-4));
  for (std::int64_t df = 0; df < 50; ++df) CHECK(compute_idf(50, df + 1) <= compute_idf(50, df));

  CorpusStats stats;
  const std::vector<std::vector<std::string>> docs{{"a", "b", "a"}, {"a"}, {"c"}};
  for (const auto& d : docs) stats.add_document(d);
  CHECK(stats.doc_count == 3);
  CHECK(stats.df("a") == 2);
  CHECK(stats.df("zzz") == 0);
  CHECK(compute_idf(stats, "zzz") == compute_idf(3, 0));
}

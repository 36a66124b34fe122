#include "assist/trie.hpp"

#include <chrono>
#include <map>
#include <random>
#include <set>

#include "assist/text.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace assist;

namespace {

using Trie = PatternTrie<std::string>;

std::vector<std::string> seq(std::initializer_list<const char*> xs) {
  return {xs.begin(), xs.end()};
}

}  // namespace

TEST_CASE("empty pattern set never matches") {
  Trie trie = Trie::compile(std::vector<Trie::Pattern>{});
  CHECK(trie.find_matches(seq({"a", "b"})).empty());
  CHECK(trie.node_count() == 1);
}

TEST_CASE("duplicate pattern/payload pairs are stored once") {
  std::vector<Trie::Pattern> p{{seq({"a", "b"}), "X"}, {seq({"a", "b"}), "X"}};
  Trie trie = Trie::compile(p);
  CHECK(trie.payloads_at(seq({"a", "b"})) == std::vector<std::string>{"X"});
}

TEST_CASE("empty pattern is rejected") {
  std::vector<Trie::Pattern> p{{{}, "X"}};
  CHECK_THROWS_AS(Trie::compile(p), Error);
}

TEST_CASE("node layout equals naive prefix-tree construction") {
  std::vector<Trie::Pattern> p{{seq({"a", "b"}), "X"}, {seq({"a", "b", "c"}), "Y"}};
  Trie trie = Trie::compile(p);
  // Distinct prefixes: {}, {a}, {a b}, {a b c}.
  std::set<std::vector<std::string>> prefixes{{}};
  for (const auto& [s, _] : p)
    for (std::size_t n = 1; n <= s.size(); ++n) prefixes.insert({s.begin(), s.begin() + static_cast<long>(n)});
  CHECK(trie.node_count() == prefixes.size());
  CHECK(trie.payloads_at(seq({"a", "b"})) == std::vector<std::string>{"X"});
  CHECK(trie.payloads_at(seq({"a", "b", "c"})) == std::vector<std::string>{"Y"});
  CHECK(trie.payloads_at(seq({"a"})).empty());
}

TEST_CASE("leftmost-longest wins") {
  std::vector<Trie::Pattern> p{{seq({"a", "b"}), "X"}, {seq({"a", "b", "c"}), "Y"}};
  Trie trie = Trie::compile(p);
  auto m = trie.find_matches(seq({"a", "b", "c"}));
  REQUIRE(m.size() == 1);
  CHECK(m[0] == Match<std::string>{0, 3, {"Y"}});
  CHECK(trie.find_matches(seq({"z", "q"})).empty());
}

TEST_CASE("promotional phrase is found in a tokenized question") {
  std::vector<Trie::Pattern> p{{tokenize("red envelope"), "PROMO"}};
  Trie trie = Trie::compile(p);
  const auto m = trie.find_matches(tokenize("what is the entry of grabbing red envelope ?"));
  REQUIRE(m.size() == 1);
  CHECK(m[0].payloads == std::vector<std::string>{"PROMO"});
  CHECK(m[0].start == 6);
  CHECK(m[0].end == 8);
}

TEST_CASE("random pattern sets agree with the naive scan") {
  std::mt19937 rng(42);
  const std::vector<std::string> alphabet{"a", "b", "c", "d", "e"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Trie::Pattern> patterns;
    const int n = std::uniform_int_distribution<int>(0, 40)(rng);
    for (int i = 0; i < n; ++i) {
      std::vector<std::string> s;
      for (int k = std::uniform_int_distribution<int>(1, 4)(rng); k > 0; --k)
        s.push_back(alphabet[rng() % alphabet.size()]);
      patterns.emplace_back(s, "p" + std::to_string(rng() % 6));
    }
    std::vector<std::string> text;
    for (int k = std::uniform_int_distribution<int>(0, 60)(rng); k > 0; --k)
      text.push_back(alphabet[rng() % alphabet.size()]);
    Trie trie = Trie::compile(patterns);
    const auto got = trie.find_matches(text);
    CHECK(got == oracle::naive_scan(patterns, text));
    for (std::size_t i = 1; i < got.size(); ++i) CHECK(got[i - 1].end <= got[i].start);
    for (const auto& m : got) CHECK((m.start < m.end && m.end <= text.size()));
  }
}

TEST_CASE("pattern file parsing") {
  const auto specs = parse_pattern_file(
      "# rules\nbook a flight ticket\tassist\tbook_flight\n\nreal person\thuman\t-\n", "mem");
  REQUIRE(specs.size() == 2);
  CHECK(specs[0].pattern == "book a flight ticket");
  CHECK(specs[0].kind == "assist");
  CHECK(specs[0].value == "book_flight");
  CHECK(specs[1].line == 4);
  CHECK(parse_pattern_file(format_pattern_file(specs), "again").size() == 2);
  CHECK_THROWS_AS(parse_pattern_file("only one field\n", "bad"), Error);
}

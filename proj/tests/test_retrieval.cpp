#include <cmath>
#include <random>

#include "assist/error.hpp"
#include "assist/retrieval.hpp"
#include "doctest.h"

using namespace assist;

namespace {

std::vector<QAPair> two_docs() {
  return {{"d1", "refund refund status now", "a1", std::nullopt},
          {"d2", "refund please", "a2", std::nullopt}};
}

}  // namespace

TEST_CASE("bm25 hand-computed two-document scores") {
  const auto index = build_index(two_docs());
  CHECK(index.avg_length() == 3.0);
  const auto hits = search(index, "refund", 5);
  REQUIRE(hits.size() == 2);
  // idf = ln 1.2; d1: tf 2, len 4; d2: tf 1, len 2.
  CHECK(hits[0].id == "d1");
  CHECK(std::abs(hits[0].score - 0.2292042428266858) < 1e-9);
  CHECK(hits[1].id == "d2");
  CHECK(std::abs(hits[1].score - 0.21110917102457905) < 1e-9);
}

TEST_CASE("index structure") {
  const std::vector<QAPair> kb{{"3", "alpha beta", "x", std::nullopt},
                               {"1", "alpha", "y", std::nullopt}};
  const auto index = build_index(kb);
  const auto* p = index.postings("alpha");
  REQUIRE(p);
  REQUIRE(p->size() == 2);
  CHECK(index.doc((*p)[0].doc).id == "1");
  CHECK(index.doc((*p)[1].doc).id == "3");
  const std::vector<QAPair> one{{"a", "one two three", "z", std::nullopt}};
  CHECK(build_index(one).avg_length() == 3.0);
  CHECK(search(build_index({}), "anything", 3).empty());
}

TEST_CASE("search errors and edge cases") {
  const auto index = build_index(two_docs());
  CHECK_THROWS_AS(search(index, "   ", 1), Error);
  try {
    search(index, "", 1);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kEmptyQuery);
  }
  CHECK(search(index, "zebra", 3).empty());
  CHECK(search(index, "refund", 1).size() == 1);
  auto dup = two_docs();
  dup.push_back(dup[0]);
  CHECK_THROWS_AS(build_index(dup), Error);
}

TEST_CASE("ties resolve to the smaller id") {
  const std::vector<QAPair> kb{{"b", "same text", "1", std::nullopt},
                               {"a", "same text", "2", std::nullopt}};
  const auto hits = search(build_index(kb), "same text", 2);
  REQUIRE(hits.size() == 2);
  CHECK(hits[0].score == hits[1].score);
  CHECK(hits[0].id == "a");
}

namespace {

std::vector<QAPair> random_kb(std::mt19937_64& rng, int n) {
  std::vector<QAPair> kb;
  for (int i = 0; i < n; ++i) {
    std::string q;
    for (int w = 0; w < 4; ++w) q += "w" + std::to_string(rng() % 400) + " ";
    q += "u" + std::to_string(i);
    kb.push_back({"q" + std::to_string(1000 + i), q, "answer " + std::to_string(i), std::nullopt});
  }
  return kb;
}

}  // namespace

TEST_CASE("self-retrieval on a 100-pair kb") {
  std::mt19937_64 rng(4);
  const auto kb = random_kb(rng, 100);
  const auto index = build_index(kb);
  int top1 = 0;
  for (const auto& p : kb) top1 += search(index, p.question, 1).at(0).id == p.id;
  CHECK(top1 == 100);
}

TEST_CASE("permutation invariance and unrelated documents") {
  std::mt19937_64 rng(8);
  auto kb = random_kb(rng, 40);
  const auto base = build_index(kb);
  auto shuffled = kb;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const auto perm = build_index(shuffled);
  CHECK(base == perm);
  for (int i = 0; i < 10; ++i) {
    const auto a = search(base, kb[static_cast<std::size_t>(i)].question, 10);
    const auto b = search(perm, kb[static_cast<std::size_t>(i)].question, 10);
    REQUIRE(a.size() == b.size());
    for (std::size_t h = 0; h < a.size(); ++h) {
      CHECK(a[h].id == b[h].id);
      CHECK(a[h].score == b[h].score);
    }
  }
  // Adding an unrelated document leaves the relative order unchanged.
  const std::vector<QAPair> fixed{{"x1", "refund status", "a", std::nullopt},
                                  {"x2", "refund refund money back", "b", std::nullopt},
                                  {"x3", "status of parcel", "c", std::nullopt}};
  auto grown = fixed;
  grown.push_back({"x4", "zebra giraffe lion", "d", std::nullopt});
  const auto r1 = search(build_index(fixed), "refund status", 5);
  const auto r2 = search(build_index(grown), "refund status", 5);
  REQUIRE(r1.size() == r2.size());
  for (std::size_t h = 0; h < r1.size(); ++h) CHECK(r1[h].id == r2[h].id);
}

TEST_CASE("score is non-decreasing in document term frequency at fixed length") {
  for (int tf = 1; tf < 5; ++tf) {
    auto make = [](int t) {
      std::string q;
      for (int i = 0; i < 6; ++i) q += i < t ? "refund " : "filler" + std::to_string(i) + " ";
      return q;
    };
    const std::vector<QAPair> kb{{"a", make(tf), "1", std::nullopt},
                                 {"b", make(tf + 1), "2", std::nullopt},
                                 {"c", "other words here", "3", std::nullopt}};
    const auto hits = search(build_index(kb), "refund", 3);
    REQUIRE(hits.size() == 2);
    CHECK(hits[0].id == "b");
    CHECK(hits[0].score >= hits[1].score);
  }
}

TEST_CASE("index save/load round trip") {
  std::mt19937_64 rng(1);
  auto kb = random_kb(rng, 20);
  kb[3].scenario = "refund";
  const auto index = build_index(kb);
  const auto back = InvertedIndex::deserialize(index.serialize());
  CHECK(back == index);
  CHECK(back.avg_length() == index.avg_length());
  CHECK(back.find(kb[3].id)->scenario == std::optional<std::string>("refund"));
  CHECK_THROWS_AS(InvertedIndex::deserialize("{"), Error);
  CHECK_THROWS_AS(InvertedIndex::load("/nonexistent/index.json"), Error);
}

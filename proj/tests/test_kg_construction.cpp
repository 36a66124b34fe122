#include "doctest.h"
#include "oracles.hpp"

#include <cmath>
#include <random>

#include "assist/error.hpp"
#include "assist/kg_construction.hpp"

using namespace assist;

TEST_CASE("lexicon parsing") {
  const auto lex = parse_lexicon("# c\nRefund\tnoun\napply\tverb\nthe\tother\n", "t");
  CHECK(lex.at("refund") == PosClass::kNoun);
  CHECK(lex.at("apply") == PosClass::kVerb);
  CHECK_THROWS_AS(parse_lexicon("x\tadj\n", "t"), Error);
  CHECK_THROWS_AS(parse_lexicon("x\n", "t"), Error);
}

TEST_CASE("candidate terms: tf-idf oracle") {
  // Three docs; "refund" in docs 0 and 1, "password" in doc 2 only.
  const std::vector<std::string> docs{"apply refund now", "refund status", "reset password please"};
  const auto lex = parse_lexicon("refund\tnoun\npassword\tnoun\napply\tverb\nreset\tverb\n", "t");
  const auto terms = extract_candidate_terms(docs, lex, 0.0);
  auto idf = [](double n, double df) { return std::log((n + 1) / (df + 1)) + 1; };
  std::map<std::string, double> want{
      {"refund", std::max(1.0 / 3 * idf(3, 2), 1.0 / 2 * idf(3, 2))},
      {"password", 1.0 / 3 * idf(3, 1)},
      {"apply", 1.0 / 3 * idf(3, 1)},
      {"reset", 1.0 / 3 * idf(3, 1)},
  };
  REQUIRE(terms.size() == want.size());
  for (const auto& t : terms) CHECK(t.tfidf == doctest::Approx(want.at(t.surface)).epsilon(1e-12));
  for (std::size_t i = 1; i < terms.size(); ++i) {
    CHECK(terms[i - 1].tfidf >= terms[i].tfidf);
    if (terms[i - 1].tfidf == terms[i].tfidf) CHECK(terms[i - 1].surface < terms[i].surface);
  }
  const auto strict = extract_candidate_terms(docs, lex, 0.6);
  CHECK(strict.size() == 1);
  CHECK(strict[0].surface == "refund");
  CHECK(extract_candidate_terms({}, lex, 0.0).empty());
}

TEST_CASE("smoothed PMI: worked example") {
  // 4 sentences, a and b each in 2, together in 2: (3/5)/((3/5)(3/5)).
  CHECK(std::abs(smoothed_pmi(2, 2, 2, 4) - std::log(5.0 / 3.0)) < 1e-12);
  CHECK(std::abs(smoothed_pmi(2, 2, 2, 4) - 0.5108256237659907) < 1e-9);
}

TEST_CASE("high-order entities: adjacent pairs with counts") {
  const std::vector<std::string> sentences{"alipay account locked", "my alipay account",
                                           "account balance", "alipay help"};
  std::vector<TermCandidate> terms{{"alipay", PosClass::kNoun, 1}, {"account", PosClass::kNoun, 1}};
  const auto ents = mine_high_order(sentences, terms, -100.0, 1);
  REQUIRE(ents.size() == 1);
  CHECK(ents[0].surface == "alipay account");
  CHECK(ents[0].count == 2);
  // c_a = 3, c_b = 3, c_ab = 2, N = 4.
  const double want = std::log((3.0 / 5) / ((4.0 / 5) * (4.0 / 5)));
  CHECK(std::abs(ents[0].pmi - want) < 1e-12);
  CHECK(mine_high_order(sentences, terms, 0.0, 1).empty());
  CHECK(mine_high_order(sentences, terms, -100.0, 3).empty());
}

TEST_CASE("sentence encoder: idf-weighted and normalized") {
  CorpusStats stats;
  stats.add_document(std::vector<std::string>{"refund", "money"});
  stats.add_document(std::vector<std::string>{"refund"});
  const SentenceEncoder enc({{"refund", {1, 0}}, {"money", {0, 1}}}, stats);
  const auto v = enc.embed("refund money");
  const double wr = compute_idf(stats, "refund"), wm = compute_idf(stats, "money");
  const double n = std::hypot(wr, wm);
  CHECK(v(0) == doctest::Approx(wr / n));
  CHECK(v(1) == doctest::Approx(wm / n));
  CHECK(enc.embed("unknown words").norm() == 0.0);
  CHECK(cosine(v, enc.embed("unknown")) == 0.0);
}

TEST_CASE("normalize utterances: threshold harvesting") {
  CorpusStats stats;
  const SentenceEncoder enc({{"refund", {1, 0}}, {"password", {0, 1}}, {"reset", {0.1, 1}}}, stats);
  const std::vector<ItemText> items{{"k1", "refund"}, {"k2", "password"}};
  const std::vector<ChatLogPair> log{{"where is my money", "refund"},
                                     {"forgot it", "reset password"},
                                     {"hello", "hi there"}};
  const auto clusters = normalize_utterances(items, log, enc, 0.9);
  REQUIRE(clusters.size() == 2);
  REQUIRE(clusters[0].utterances.size() == 1);
  CHECK(clusters[0].utterances[0].question == "where is my money");
  REQUIRE(clusters[1].utterances.size() == 1);
  CHECK(clusters[1].utterances[0].log_index == 1);
  const auto none = normalize_utterances(items, log, enc, 1.01);
  CHECK(none[0].utterances.empty());
}

TEST_CASE("apriori equals power-set oracle on random instances") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const int universe = 3 + static_cast<int>(rng() % 8);
    const int n = 1 + static_cast<int>(rng() % 30);
    std::vector<std::set<std::string>> tx(static_cast<std::size_t>(n));
    for (auto& t : tx)
      for (int i = 0; i < universe; ++i)
        if (rng() % 3 != 0) t.insert("w" + std::to_string(i));
    const double minsup = 0.1 + 0.1 * static_cast<double>(rng() % 8);
    const auto got = apriori(tx, minsup);
    CHECK(got == oracle::power_set(tx, minsup));
    // Anti-monotonicity: every subset of a frequent set is at least as frequent.
    std::map<std::vector<std::string>, std::int64_t> by;
    for (const auto& s : got) by[s.items] = s.count;
    for (const auto& s : got) {
      for (std::size_t drop = 0; s.items.size() > 1 && drop < s.items.size(); ++drop) {
        auto sub = s.items;
        sub.erase(sub.begin() + static_cast<long>(drop));
        REQUIRE(by.count(sub));
        CHECK(by[sub] >= s.count);
      }
    }
  }
}

TEST_CASE("apriori edge cases") {
  CHECK(apriori({}, 0.5).empty());
  std::vector<std::set<std::string>> tx{{"a"}, {"a", "b"}};
  CHECK(apriori(tx, 1.01).empty());
  const auto all = apriori(tx, 0.5);
  CHECK(all.size() == 3);
}

TEST_CASE("wording patterns to pattern lines") {
  const std::vector<std::string> utts{"how do I apply for a refund?", "apply for refund please",
                                      "refund apply for me", "where is my parcel"};
  const auto sets = mine_wording_patterns(utts, 0.75);
  bool has_pair = false;
  for (const auto& s : sets) has_pair |= s.items == std::vector<std::string>{"apply", "for"};
  CHECK(has_pair);
  for (const auto& s : sets)
    for (const auto& w : s.items) CHECK(w != "?");
  const auto specs = itemsets_to_patterns(sets, utts, "node", "refund");
  std::set<std::string> pats;
  for (const auto& p : specs) {
    pats.insert(p.pattern);
    CHECK(p.kind == "node");
    CHECK(p.value == "refund");
  }
  CHECK(pats.count("apply for"));
  CHECK(pats.count("apply for a refund") == 0);
}

TEST_CASE("high-order entities: the three PMI cases") {
  std::vector<TermCandidate> terms{{"customer", PosClass::kNoun, 1}, {"account", PosClass::kNoun, 1},
                                   {"alipay", PosClass::kNoun, 1}};
  // Co-occurring in 2 of 4 sentences, each in 2.
  const std::vector<std::string> s1{"customer account", "the customer account locked", "hello", "bye"};
  const auto e1 = mine_high_order(s1, terms, -100.0, 1);
  REQUIRE(e1.size() == 1);
  CHECK(std::abs(e1[0].pmi - std::log((3.0 / 5) / ((3.0 / 5) * (3.0 / 5)))) < 1e-9);
  // Never co-occurring: no candidate pair survives count_min = 1.
  const std::vector<std::string> s2{"customer here", "account there", "alipay"};
  CHECK(mine_high_order(s2, terms, -100.0, 1).empty());
  // Independent in the smoothed sample: PMI is exactly 0.
  const std::vector<std::string> s3{"alipay account", "alipay", "alipay again"};
  const auto e3 = mine_high_order(s3, terms, -100.0, 1);
  REQUIRE(e3.size() == 1);
  CHECK(std::abs(e3[0].pmi) < 1e-9);
  CHECK(mine_high_order(s3, terms, 1e-6, 1).empty());
}

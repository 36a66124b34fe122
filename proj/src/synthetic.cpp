#include "assist/synthetic.hpp"

#include <random>
#include <set>

namespace assist::synthetic {

namespace {

struct ClassSpec {
  const char* label;
  std::vector<std::string> heads;
  std::vector<std::string> objects;
};

const std::vector<ClassSpec>& classes() {
  static const std::vector<ClassSpec> specs{
      {"assist.flight",
       {"i want to book", "please reserve", "help me buy", "can i get"},
       {"a flight ticket", "a plane ticket to beijing", "an air ticket", "a flight from hangzhou"}},
      {"biz.account",
       {"how do i check", "i want to view", "where can i look up", "help me check", "i cannot open"},
       {"my taobao account", "the taobao id", "my account", "customer account details"}},
      {"biz.coupon",
       {"how to redeem", "where is", "i cannot use", "how do i get"},
       {"my coupon", "the voucher", "store coupons", "a discount voucher"}},
      {"biz.invoice",
       {"i need", "how to request", "please send me", "where can i download"},
       {"an invoice", "the receipt", "a tax invoice", "the invoice for my order"}},
      {"biz.logistics",
       {"where is", "track", "any news about", "why is nobody moving"},
       {"my parcel", "the package", "my delivery", "logistics of my order"}},
      {"biz.password",
       {"i forgot", "how to reset", "i want to change", "help me recover", "how can i update"},
       {"my password", "the login password", "payment password", "my pay password"}},
      {"biz.points",
       {"how many", "how to spend", "show me my", "why did i lose"},
       {"membership points", "points", "reward points", "points this month"}},
      {"biz.refund",
       {"i want to apply for", "how do i request", "what is the status of", "why is there no"},
       {"a refund", "my refund", "the money back", "refund for my order"}},
      {"chat.emotion",
       {"i am", "i feel", "today i am so", "honestly i am"},
       {"unhappy", "sad", "really tired", "bored", "lonely"}},
      {"chat.greeting",
       {"hello", "hi there", "good morning", "hey"},
       {"robot", "friend", "how are you", "nice to meet you"}},
  };
  return specs;
}

const std::vector<std::string> kPrefixes{"", "", "excuse me ", "please ", "hi, "};
const std::vector<std::string> kSuffixes{"", "", "?", " please", " thanks"};
const std::vector<std::string> kFollowUps{"what about the fee", "how long does it take",
                                          "it still does not work", "is there any update",
                                          "what should i do now", "can you help me with it"};

template <class T>
const T& pick(const std::vector<T>& v, std::mt19937_64& rng) {
  return v[rng() % v.size()];
}

std::string utterance(const ClassSpec& c, std::mt19937_64& rng) {
  return pick(kPrefixes, rng) + pick(c.heads, rng) + " " + pick(c.objects, rng) + pick(kSuffixes, rng);
}

}  // namespace

std::vector<LabeledUtterance> intent_benchmark(int per_class, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto& specs = classes();
  std::vector<LabeledUtterance> out;
  for (const auto& c : specs) {
    const bool business = std::string(c.label).rfind("biz.", 0) == 0;
    for (int i = 0; i < per_class; ++i) {
      LabeledUtterance u;
      u.label = c.label;
      if (business && i % 10 == 9) {
        u.text = pick(kFollowUps, rng);
        u.context = utterance(c, rng);
      } else {
        u.text = utterance(c, rng);
        if (rng() % 2 == 0) u.context = utterance(specs[rng() % specs.size()], rng);
      }
      out.push_back(std::move(u));
    }
  }
  return out;
}

namespace {

// Pronounceable pseudo-words, unique across one benchmark.
class WordMaker {
 public:
  explicit WordMaker(std::mt19937_64& rng) : rng_(rng) {}
  std::string next() {
    static const std::vector<std::string> on{"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z"};
    static const std::vector<std::string> nu{"a", "e", "i", "o", "u"};
    for (;;) {
      std::string w;
      const int syl = 2 + static_cast<int>(rng_() % 2);
      for (int s = 0; s < syl; ++s) w += pick(on, rng_) + pick(nu, rng_);
      if (used_.insert(w).second) return w;
    }
  }

 private:
  std::mt19937_64& rng_;
  std::set<std::string> used_;
};

const std::vector<std::string> kTrainTemplates{"{a} {b}", "tell me {a} {b}", "what about {a} and {b}"};
const std::vector<std::string> kEvalTemplates{"do you {a} {b}", "{b} or {a} maybe", "so {a} {b} right"};

std::string render(const std::string& tmpl, const std::string& a, const std::string& b) {
  std::string out;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl.compare(i, 3, "{a}") == 0) {
      out += a;
      i += 2;
    } else if (tmpl.compare(i, 3, "{b}") == 0) {
      out += b;
      i += 2;
    } else {
      out += tmpl[i];
    }
  }
  return out;
}

}  // namespace

ParaphraseBenchmark paraphrase_benchmark(int topics, int eval_per_topic, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  WordMaker words(rng);
  std::vector<std::string> reply_pool;
  for (int i = 0; i < 60; ++i) reply_pool.push_back(words.next());

  ParaphraseBenchmark bench;
  for (int t = 0; t < topics; ++t) {
    std::vector<std::string> a(3), b(3);
    for (auto& w : a) w = words.next();
    for (auto& w : b) w = words.next();
    std::string reply = words.next();  // topic marker keeps replies distinct
    for (int i = 0; i < 3; ++i) reply += " " + pick(reply_pool, rng);
    const std::string id = "t" + std::to_string(100 + t);
    bench.kb.push_back({id, a[0] + " " + b[0], reply, std::nullopt});
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        bench.train.push_back({render(pick(kTrainTemplates, rng), a[static_cast<std::size_t>(i)],
                                      b[static_cast<std::size_t>(j)]),
                               reply});
    for (int e = 0; e < eval_per_topic; ++e)
      bench.eval.push_back({render(pick(kEvalTemplates, rng), pick(a, rng), pick(b, rng)), {reply}});
  }
  return bench;
}

}  // namespace assist::synthetic

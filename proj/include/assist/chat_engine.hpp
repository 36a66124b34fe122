#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "assist/retrieval.hpp"
#include "assist/text.hpp"

namespace assist {

struct ChatPair {
  std::string post;
  std::string reply;
};

/// `{"post", "reply"}` per line.
std::vector<ChatPair> load_chat_corpus(const std::filesystem::path& path);

struct Seq2SeqConfig {
  int hidden = 48;
  int embed = 32;
  int max_decode = 20;
  std::uint64_t seed = 7;
};

struct Seq2SeqTrainConfig {
  int epochs = 60;
  double learning_rate = 0.01;
  int batch_size = 8;
  double clip_norm = 5.0;
  std::uint64_t seed = 7;
};

/// z, r, candidate gates; inputs of width `in`, state of width `h`.
struct GruParams {
  Eigen::MatrixXd wz, wr, wn;  // h x in
  Eigen::MatrixXd uz, ur, un;  // h x h
  Eigen::VectorXd bz, br, bn;

  static GruParams zeros(int in, int h);
};

/// Target ids: PAD 0, UNK 1, BOS 2, EOS 3. Source ids: PAD 0, UNK 1, EOS 2.
struct Seq2SeqModel {
  static constexpr std::int32_t kBos = 2;
  static constexpr std::int32_t kEos = 3;
  static constexpr std::int32_t kSrcEos = 2;

  Seq2SeqConfig config;
  Vocabulary src_vocab;
  Vocabulary tgt_vocab;
  Eigen::MatrixXd src_embed;  // d x Vs
  Eigen::MatrixXd tgt_embed;  // d x Vt
  GruParams encoder;
  GruParams decoder;
  Eigen::MatrixXd att_w;  // h x h, applied to the decoder state
  Eigen::MatrixXd att_u;  // h x h, applied to encoder states
  Eigen::VectorXd att_v;  // h
  Eigen::MatrixXd out_w;  // Vt x 2h
  Eigen::VectorXd out_b;  // Vt

  static Vocabulary make_src_vocab();
  static Vocabulary make_tgt_vocab();

  /// Seeded uniform init in [-0.1, 0.1]; biases zero.
  static Seq2SeqModel init(const Seq2SeqConfig& config, Vocabulary src, Vocabulary tgt);
  Seq2SeqModel zeros_like() const;

  struct Group {
    std::string name;
    double* data;
    std::size_t size;
  };
  std::vector<Group> parameter_groups();

  std::vector<std::int32_t> encode_source(const std::string& text) const;  // ends in EOS
  std::vector<std::int32_t> encode_target(const std::string& text) const;  // no EOS

  std::string serialize() const;
  static Seq2SeqModel deserialize(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static Seq2SeqModel load(const std::filesystem::path& path);

  friend bool operator==(const Seq2SeqModel& a, const Seq2SeqModel& b);
};

/// Per-step attention weights and output distributions of one decode.
struct DecodeTrace {
  std::vector<Eigen::VectorXd> attention;
  std::vector<Eigen::VectorXd> probs;
};

/// Teacher-forced pass; `target` is fed after BOS and scored, `target`
/// should already end in EOS when EOS is meant to be scored.
DecodeTrace teacher_forced(const Seq2SeqModel& model, std::span<const std::int32_t> source,
                           std::span<const std::int32_t> target);

/// Summed cross-entropy over `target`; accumulates gradients into `grad`
/// when non-null. Returns the loss.
double seq2seq_loss_and_gradient(const Seq2SeqModel& model, std::span<const std::int32_t> source,
                                 std::span<const std::int32_t> target, Seq2SeqModel* grad);

/// Builds vocabularies from the corpus and trains with Adam on mean token
/// cross-entropy, clipping the global gradient norm. Throws EmptyCorpus.
Seq2SeqModel train_seq2seq(std::span<const ChatPair> corpus, const Seq2SeqConfig& config,
                           const Seq2SeqTrainConfig& train, std::vector<double>* epoch_losses = nullptr);

/// Continues training from `initial` (epochs = 0 returns it unchanged).
Seq2SeqModel train_seq2seq(Seq2SeqModel initial, std::span<const ChatPair> corpus,
                           const Seq2SeqTrainConfig& train, std::vector<double>* epoch_losses = nullptr);

/// Teacher-forced argmax accuracy over reply tokens plus EOS.
double teacher_forced_accuracy(const Seq2SeqModel& model, std::span<const ChatPair> corpus);

/// Geometric-mean probability of the candidate's tokens (EOS excluded).
/// Throws EmptyCandidate on a blank candidate.
double score_candidate(const Seq2SeqModel& model, const std::string& question,
                       const std::string& candidate);

/// Greedy decode; ties to the smaller id; UNK stripped from the surface.
std::string generate(const Seq2SeqModel& model, const std::string& question,
                     DecodeTrace* trace = nullptr);

struct Seq2SeqGradCheck {
  double max_rel_error = 0.0;
  std::map<std::string, double> per_group;
};

/// Central differences against the analytic gradient, error metric
/// |g_a - g_n| / max(|g_a|, |g_n|, 1e-8). Steps below ~1e-5 are dominated by
/// round-off on near-zero components; 1e-4 keeps both error sources small.
Seq2SeqGradCheck seq2seq_grad_check(const Seq2SeqModel& model, std::span<const std::int32_t> source,
                                    std::span<const std::int32_t> target, double eps = 1e-4);

struct ScoredCandidate {
  std::string id;
  std::string text;
  double retrieval_score = 0.0;
  double confidence = 0.0;
};

enum class ChatSource { kRerankedCandidate, kGenerated };

std::string_view chat_source_name(ChatSource s);

struct ChatResponse {
  std::string text;
  ChatSource source = ChatSource::kGenerated;
  double confidence = 0.0;  // best candidate confidence, 0 without candidates
  std::vector<ScoredCandidate> candidates;
};

/// Reranks the top-k retrieved answers; falls back to generation when the
/// best confidence is below `threshold`.
ChatResponse chat_answer(const std::string& question, const InvertedIndex& index,
                         const Seq2SeqModel& model, int k, double threshold);

}  // namespace assist

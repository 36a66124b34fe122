#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "assist/text.hpp"

namespace assist {

/// Network shape. L must be at least the widest window.
struct IntentConfig {
  int dim = 32;
  std::vector<int> windows{2, 3, 4};
  int filters = 16;
  int max_len = 32;
  std::uint64_t seed = 7;
};

struct IntentTrainConfig {
  int epochs = 30;
  double learning_rate = 0.5;
  int batch_size = 16;
  std::uint64_t seed = 7;
};

/// One-layer convolution/max-pool text classifier over a shared word+tag
/// embedding table.
struct IntentModel {
  IntentConfig config;
  int num_classes = 0;
  Eigen::MatrixXd embedding;                 // dim x vocab, one column per id
  std::vector<Eigen::MatrixXd> filters;      // per window: filters x (w*dim)
  std::vector<Eigen::VectorXd> filter_bias;  // per window: filters
  Eigen::MatrixXd out_weight;                // classes x (filters*|windows|)
  Eigen::VectorXd out_bias;                  // classes

  /// Seeded initialization: embeddings uniform in [-0.5/d, 0.5/d] with the
  /// PAD column zeroed, Glorot-uniform filters and output weights, zero biases.
  static IntentModel init(const IntentConfig& config, std::size_t vocab_size, int num_classes);
  /// Same shapes as `like`, all zeros. Used as a gradient accumulator.
  static IntentModel zeros_like(const IntentModel& like);

  std::size_t feature_size() const;
  std::size_t vocab_size() const { return static_cast<std::size_t>(embedding.cols()); }

  /// Named views over every parameter tensor, in a fixed order.
  std::vector<std::pair<std::string, std::span<double>>> parameter_groups();

  friend bool operator==(const IntentModel& a, const IntentModel& b);
};

using IntentInput = std::vector<std::int32_t>;

struct IntentPrediction {
  int label = 0;
  std::vector<double> probs;
};

/// words(q) ++ tags(q) ++ tags(context), OOV mapped to UNK. When too long,
/// words are dropped from the tail first, then tags; then PAD-padded to L.
IntentInput build_input(std::span<const std::string> words, std::span<const std::string> q_tags,
                        std::span<const std::string> ctx_tags, const Vocabulary& vocab,
                        int max_len);

/// Softmax class probabilities.
Eigen::VectorXd forward(const IntentModel& model, const IntentInput& input);

/// Cross-entropy loss of one example; accumulates its gradient into `grad`
/// when non-null.
double loss_and_gradient(const IntentModel& model, const IntentInput& input, int label,
                         IntentModel* grad);

struct IntentExample {
  IntentInput input;
  int label = 0;
};

/// Mini-batch SGD on mean cross-entropy. `epoch_losses`, when given, receives
/// the mean loss before training followed by the mean loss after each epoch.
IntentModel train(IntentModel initial, std::span<const IntentExample> dataset,
                  const IntentTrainConfig& cfg, std::vector<double>* epoch_losses = nullptr);

/// Argmax with ties toward the smallest class id.
int argmax(const Eigen::VectorXd& probs);

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::map<std::string, double> per_group;
};

/// Central finite differences against the analytic gradient for every
/// parameter: max of |ga - gn| / max(|ga|, |gn|, 1e-8).
GradCheckReport grad_check(const IntentModel& model, const IntentInput& input, int label,
                           double eps);

/// Pretrained vectors: first line `count dim`, then `surface v1 .. v_dim`.
std::map<std::string, std::vector<double>> load_embeddings(const std::filesystem::path& path);
std::map<std::string, std::vector<double>> parse_embeddings(const std::string& text);
/// Copies vectors for surfaces present in `vocab`; returns how many were used.
std::size_t apply_pretrained(IntentModel& model, const Vocabulary& vocab,
                             const std::map<std::string, std::vector<double>>& vectors);

/// Vocabulary surface used for a semantic tag.
std::string tag_token(std::string_view node_id);

/// Labeled utterance as stored in the training data file
/// ({"text", "context"?, "label"} per line).
struct LabeledUtterance {
  std::string text;
  std::string context;
  std::string label;
};

std::vector<LabeledUtterance> load_labeled_utterances(const std::filesystem::path& path);

/// Returns semantic-tag node ids for a normalized text.
using Tagger = std::function<std::vector<std::string>(const std::string&)>;

/// Model plus the vocabulary and label names needed to serve it.
class IntentClassifier {
 public:
  IntentClassifier() = default;
  IntentClassifier(Vocabulary vocab, std::vector<std::string> labels, IntentModel model,
                   bool use_tags);

  /// Builds the vocabulary from the utterances (and their tags), sorts the
  /// label names to fix class ids, and trains.
  static IntentClassifier fit(std::span<const LabeledUtterance> data, const Tagger& tagger,
                              const IntentConfig& config, const IntentTrainConfig& train_cfg,
                              bool use_tags = true, std::vector<double>* epoch_losses = nullptr);

  IntentInput encode(const std::string& text, std::span<const std::string> q_tags,
                     std::span<const std::string> ctx_tags) const;

  /// Classifies a question given its tags and its context's tags (empty for
  /// the first question of a session).
  IntentPrediction predict(const std::string& text, std::span<const std::string> q_tags,
                           std::span<const std::string> ctx_tags) const;

  const std::string& label_name(int label) const { return labels_.at(static_cast<std::size_t>(label)); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::optional<int> label_id(std::string_view name) const;
  const Vocabulary& vocab() const { return vocab_; }
  const IntentModel& model() const { return model_; }
  bool use_tags() const { return use_tags_; }

  void save(const std::filesystem::path& path) const;
  std::string serialize() const;
  static IntentClassifier load(const std::filesystem::path& path);
  static IntentClassifier deserialize(const std::string& text);

 private:
  Vocabulary vocab_;
  std::vector<std::string> labels_;
  IntentModel model_;
  bool use_tags_ = true;
};

}  // namespace assist

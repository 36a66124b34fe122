#include "assist/intent_cnn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "assist/error.hpp"
#include "assist/io.hpp"

namespace assist {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using WindowMap = Eigen::Map<const MatrixXd, 0, Eigen::OuterStride<>>;

void uniform_fill(double* data, std::size_t n, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (std::size_t i = 0; i < n; ++i) data[i] = dist(rng);
}

VectorXd softmax(const VectorXd& logits) {
  const double top = logits.maxCoeff();
  VectorXd e = (logits.array() - top).exp();
  return e / e.sum();
}

// Column t of the result is the concatenation of embedding columns
// t..t+w-1, read straight out of the stacked input matrix.
WindowMap windows_of(const MatrixXd& x, int w) {
  const auto d = x.rows();
  return WindowMap(x.data(), d * w, x.cols() - w + 1, Eigen::OuterStride<>(d));
}

struct ForwardCache {
  MatrixXd x;                                   // dim x L
  std::vector<std::vector<Eigen::Index>> arg;   // per window, per filter
  VectorXd features;
  VectorXd probs;
};

void validate(const IntentModel& model, const IntentInput& input) {
  if (static_cast<int>(input.size()) != model.config.max_len)
    throw Error(Errc::kInvalidArgument, "intent input length differs from max_len");
  for (auto id : input) {
    if (id < 0 || static_cast<std::size_t>(id) >= model.vocab_size())
      throw Error(Errc::kInvalidArgument, "intent input id out of vocabulary range");
  }
}

void run_forward(const IntentModel& model, const IntentInput& input, ForwardCache& cache) {
  const int d = model.config.dim;
  const int length = static_cast<int>(input.size());
  cache.x.resize(d, length);
  for (int t = 0; t < length; ++t) cache.x.col(t) = model.embedding.col(input[t]);

  const int f = model.config.filters;
  cache.features.resize(static_cast<Eigen::Index>(model.feature_size()));
  cache.arg.assign(model.config.windows.size(), {});
  for (std::size_t k = 0; k < model.config.windows.size(); ++k) {
    const int w = model.config.windows[k];
    MatrixXd act = model.filters[k] * windows_of(cache.x, w);
    act.colwise() += model.filter_bias[k];
    cache.arg[k].resize(f);
    for (int j = 0; j < f; ++j) {
      Eigen::Index t = 0;
      const double top = act.row(j).maxCoeff(&t);  // first maximum on ties
      cache.arg[k][j] = t;
      cache.features(static_cast<Eigen::Index>(k) * f + j) = std::max(top, 0.0);
    }
  }
  cache.probs = softmax(model.out_weight * cache.features + model.out_bias);
}

}  // namespace

std::size_t IntentModel::feature_size() const {
  return static_cast<std::size_t>(config.filters) * config.windows.size();
}

IntentModel IntentModel::init(const IntentConfig& config, std::size_t vocab_size,
                              int num_classes) {
  if (config.dim <= 0 || config.filters <= 0 || config.windows.empty() || num_classes < 1 ||
      vocab_size < 2)
    throw Error(Errc::kInvalidArgument, "invalid intent model shape");
  for (int w : config.windows) {
    if (w <= 0 || w > config.max_len)
      throw Error(Errc::kInvalidArgument, "window size must be in [1, max_len]");
  }
  IntentModel m;
  m.config = config;
  m.num_classes = num_classes;
  std::mt19937_64 rng(config.seed);
  const auto d = config.dim;
  m.embedding.resize(d, static_cast<Eigen::Index>(vocab_size));
  uniform_fill(m.embedding.data(), m.embedding.size(), 0.5 / d, rng);
  m.embedding.col(Vocabulary::kPad).setZero();
  for (int w : config.windows) {
    MatrixXd filt(config.filters, w * d);
    uniform_fill(filt.data(), filt.size(), std::sqrt(6.0 / (w * d + config.filters)), rng);
    m.filters.push_back(std::move(filt));
    m.filter_bias.push_back(VectorXd::Zero(config.filters));
  }
  const auto feat = static_cast<Eigen::Index>(m.feature_size());
  m.out_weight.resize(num_classes, feat);
  uniform_fill(m.out_weight.data(), m.out_weight.size(),
               std::sqrt(6.0 / static_cast<double>(feat + num_classes)), rng);
  m.out_bias = VectorXd::Zero(num_classes);
  return m;
}

IntentModel IntentModel::zeros_like(const IntentModel& like) {
  IntentModel g = like;
  g.embedding.setZero();
  for (auto& f : g.filters) f.setZero();
  for (auto& b : g.filter_bias) b.setZero();
  g.out_weight.setZero();
  g.out_bias.setZero();
  return g;
}

std::vector<std::pair<std::string, std::span<double>>> IntentModel::parameter_groups() {
  auto view = [](auto& m) {
    return std::span<double>(m.data(), static_cast<std::size_t>(m.size()));
  };
  std::vector<std::pair<std::string, std::span<double>>> groups;
  groups.emplace_back("embedding", view(embedding));
  for (std::size_t k = 0; k < filters.size(); ++k) {
    const auto w = std::to_string(config.windows[k]);
    groups.emplace_back("filter_w" + w, view(filters[k]));
    groups.emplace_back("filter_bias_w" + w, view(filter_bias[k]));
  }
  groups.emplace_back("out_weight", view(out_weight));
  groups.emplace_back("out_bias", view(out_bias));
  return groups;
}

bool operator==(const IntentModel& a, const IntentModel& b) {
  auto same = [](const auto& x, const auto& y) {
    return x.rows() == y.rows() && x.cols() == y.cols() &&
           std::equal(x.data(), x.data() + x.size(), y.data());
  };
  if (a.config.dim != b.config.dim || a.config.windows != b.config.windows ||
      a.config.filters != b.config.filters || a.config.max_len != b.config.max_len ||
      a.config.seed != b.config.seed || a.num_classes != b.num_classes ||
      a.filters.size() != b.filters.size())
    return false;
  if (!same(a.embedding, b.embedding) || !same(a.out_weight, b.out_weight) ||
      !same(a.out_bias, b.out_bias))
    return false;
  for (std::size_t k = 0; k < a.filters.size(); ++k) {
    if (!same(a.filters[k], b.filters[k]) || !same(a.filter_bias[k], b.filter_bias[k]))
      return false;
  }
  return true;
}

IntentInput build_input(std::span<const std::string> words, std::span<const std::string> q_tags,
                        std::span<const std::string> ctx_tags, const Vocabulary& vocab,
                        int max_len) {
  const auto limit = static_cast<std::size_t>(std::max(max_len, 0));
  const std::size_t tag_count = q_tags.size() + ctx_tags.size();
  const std::size_t keep_words = tag_count >= limit ? 0 : std::min(words.size(), limit - tag_count);

  IntentInput ids;
  ids.reserve(limit);
  for (std::size_t i = 0; i < keep_words; ++i) ids.push_back(vocab.id(words[i]));
  for (const auto& t : q_tags) {
    if (ids.size() == limit) break;
    ids.push_back(vocab.id(t));
  }
  for (const auto& t : ctx_tags) {
    if (ids.size() == limit) break;
    ids.push_back(vocab.id(t));
  }
  ids.resize(limit, Vocabulary::kPad);
  return ids;
}

Eigen::VectorXd forward(const IntentModel& model, const IntentInput& input) {
  validate(model, input);
  ForwardCache cache;
  run_forward(model, input, cache);
  return cache.probs;
}

double loss_and_gradient(const IntentModel& model, const IntentInput& input, int label,
                         IntentModel* grad) {
  validate(model, input);
  if (label < 0 || label >= model.num_classes)
    throw Error(Errc::kLabelOutOfRange, "label " + std::to_string(label));
  ForwardCache cache;
  run_forward(model, input, cache);
  const double loss = -std::log(std::max(cache.probs(label), 1e-300));
  if (grad == nullptr) return loss;

  VectorXd dlogits = cache.probs;
  dlogits(label) -= 1.0;
  grad->out_weight.noalias() += dlogits * cache.features.transpose();
  grad->out_bias += dlogits;
  const VectorXd dfeat = model.out_weight.transpose() * dlogits;

  const int d = model.config.dim;
  const int f = model.config.filters;
  MatrixXd dx = MatrixXd::Zero(d, cache.x.cols());
  for (std::size_t k = 0; k < model.config.windows.size(); ++k) {
    const int w = model.config.windows[k];
    for (int j = 0; j < f; ++j) {
      const auto fi = static_cast<Eigen::Index>(k) * f + j;
      if (cache.features(fi) <= 0.0) continue;  // ReLU is flat here
      const double g = dfeat(fi);
      const Eigen::Index t = cache.arg[k][j];
      Eigen::Map<const VectorXd> window(cache.x.data() + t * d, w * d);
      grad->filters[k].row(j) += g * window.transpose();
      grad->filter_bias[k](j) += g;
      Eigen::Map<VectorXd> dwindow(dx.data() + t * d, w * d);
      dwindow += g * model.filters[k].row(j).transpose();
    }
  }
  for (Eigen::Index t = 0; t < dx.cols(); ++t) grad->embedding.col(input[t]) += dx.col(t);
  return loss;
}

int argmax(const Eigen::VectorXd& probs) {
  int best = 0;
  for (Eigen::Index i = 1; i < probs.size(); ++i) {
    if (probs(i) > probs(best)) best = static_cast<int>(i);
  }
  return best;
}

namespace {

double mean_loss(const IntentModel& model, std::span<const IntentExample> dataset) {
  double total = 0.0;
  for (const auto& ex : dataset) total += loss_and_gradient(model, ex.input, ex.label, nullptr);
  return total / static_cast<double>(dataset.size());
}

void sgd_step(IntentModel& model, IntentModel& grad, double scale) {
  model.embedding.noalias() -= scale * grad.embedding;
  for (std::size_t k = 0; k < model.filters.size(); ++k) {
    model.filters[k].noalias() -= scale * grad.filters[k];
    model.filter_bias[k].noalias() -= scale * grad.filter_bias[k];
  }
  model.out_weight.noalias() -= scale * grad.out_weight;
  model.out_bias.noalias() -= scale * grad.out_bias;
}

void zero(IntentModel& g) {
  g.embedding.setZero();
  for (auto& f : g.filters) f.setZero();
  for (auto& b : g.filter_bias) b.setZero();
  g.out_weight.setZero();
  g.out_bias.setZero();
}

}  // namespace

IntentModel train(IntentModel model, std::span<const IntentExample> dataset,
                  const IntentTrainConfig& cfg, std::vector<double>* epoch_losses) {
  if (dataset.empty()) throw Error(Errc::kEmptyDataset, "intent training set is empty");
  for (const auto& ex : dataset) {
    if (ex.label < 0 || ex.label >= model.num_classes)
      throw Error(Errc::kLabelOutOfRange, "label " + std::to_string(ex.label));
  }
  if (epoch_losses != nullptr) {
    epoch_losses->clear();
    epoch_losses->push_back(mean_loss(model, dataset));
  }
  if (cfg.epochs <= 0) return model;

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto batch = static_cast<std::size_t>(std::max(cfg.batch_size, 1));
  IntentModel grad = IntentModel::zeros_like(model);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      zero(grad);
      for (std::size_t i = start; i < end; ++i) {
        const auto& ex = dataset[order[i]];
        loss_and_gradient(model, ex.input, ex.label, &grad);
      }
      sgd_step(model, grad, cfg.learning_rate / static_cast<double>(end - start));
    }
    if (epoch_losses != nullptr) epoch_losses->push_back(mean_loss(model, dataset));
  }
  return model;
}

GradCheckReport grad_check(const IntentModel& model, const IntentInput& input, int label,
                           double eps) {
  IntentModel analytic = IntentModel::zeros_like(model);
  loss_and_gradient(model, input, label, &analytic);
  IntentModel probe = model;
  auto probe_groups = probe.parameter_groups();
  auto grad_groups = analytic.parameter_groups();

  GradCheckReport report;
  for (std::size_t g = 0; g < probe_groups.size(); ++g) {
    auto& [name, params] = probe_groups[g];
    const auto& grads = grad_groups[g].second;
    double worst = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double original = params[i];
      params[i] = original + eps;
      const double plus = loss_and_gradient(probe, input, label, nullptr);
      params[i] = original - eps;
      const double minus = loss_and_gradient(probe, input, label, nullptr);
      params[i] = original;
      const double numeric = (plus - minus) / (2.0 * eps);
      const double ga = grads[i];
      const double denom = std::max({std::abs(ga), std::abs(numeric), 1e-8});
      const double err = (ga == 0.0 && numeric == 0.0) ? 0.0 : std::abs(ga - numeric) / denom;
      worst = std::max(worst, err);
    }
    report.per_group[name] = worst;
    report.max_rel_error = std::max(report.max_rel_error, worst);
  }
  return report;
}

std::map<std::string, std::vector<double>> parse_embeddings(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t count = 0, dim = 0;
  if (!std::getline(in, line)) return {};
  {
    std::istringstream header(line);
    if (!(header >> count >> dim)) throw Error(Errc::kMalformedFile, "embeddings header");
  }
  std::map<std::string, std::vector<double>> vectors;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string surface;
    row >> surface;
    std::vector<double> v(dim);
    for (auto& x : v) {
      if (!(row >> x))
        throw Error(Errc::kMalformedFile, "embeddings line " + std::to_string(lineno));
    }
    vectors[surface] = std::move(v);
  }
  if (vectors.size() != count)
    throw Error(Errc::kMalformedFile, "embeddings count differs from header");
  return vectors;
}

std::map<std::string, std::vector<double>> load_embeddings(const std::filesystem::path& path) {
  return parse_embeddings(read_file(path));
}

std::size_t apply_pretrained(IntentModel& model, const Vocabulary& vocab,
                             const std::map<std::string, std::vector<double>>& vectors) {
  std::size_t used = 0;
  for (const auto& [surface, v] : vectors) {
    const auto id = vocab.find(surface);
    if (!id || *id == Vocabulary::kPad) continue;
    if (static_cast<int>(v.size()) != model.config.dim)
      throw Error(Errc::kInvalidArgument, "embedding dimension mismatch for '" + surface + "'");
    model.embedding.col(*id) = Eigen::Map<const VectorXd>(v.data(), model.config.dim);
    ++used;
  }
  return used;
}

std::string tag_token(std::string_view node_id) { return "#tag:" + std::string(node_id); }

std::vector<LabeledUtterance> load_labeled_utterances(const std::filesystem::path& path) {
  std::vector<LabeledUtterance> out;
  for (const auto& r : read_jsonl(path)) {
    if (!r.contains("text") || !r.contains("label"))
      throw Error(Errc::kMalformedFile, path.string() + ": record lacks text/label");
    out.push_back({r.at("text").get<std::string>(), r.value("context", std::string{}),
                   r.at("label").get<std::string>()});
  }
  return out;
}

IntentClassifier::IntentClassifier(Vocabulary vocab, std::vector<std::string> labels,
                                   IntentModel model, bool use_tags)
    : vocab_(std::move(vocab)),
      labels_(std::move(labels)),
      model_(std::move(model)),
      use_tags_(use_tags) {}

namespace {

std::vector<std::string> tag_tokens(const Tagger& tagger, const std::string& text) {
  std::vector<std::string> out;
  if (!tagger || text.empty()) return out;
  for (const auto& id : tagger(text)) out.push_back(tag_token(id));
  return out;
}

}  // namespace

IntentClassifier IntentClassifier::fit(std::span<const LabeledUtterance> data,
                                       const Tagger& tagger, const IntentConfig& config,
                                       const IntentTrainConfig& train_cfg, bool use_tags,
                                       std::vector<double>* epoch_losses) {
  if (data.empty()) throw Error(Errc::kEmptyDataset, "no labeled utterances");
  std::set<std::string> label_set;
  for (const auto& u : data) label_set.insert(u.label);
  std::vector<std::string> labels(label_set.begin(), label_set.end());

  struct Prepared {
    std::vector<std::string> words, q_tags, ctx_tags;
    int label;
  };
  std::vector<Prepared> prepared;
  Vocabulary vocab;
  for (const auto& u : data) {
    Prepared p;
    const std::string text = normalize(u.text);
    p.words = tokenize(text);
    if (use_tags) {
      p.q_tags = tag_tokens(tagger, text);
      p.ctx_tags = tag_tokens(tagger, normalize(u.context));
    }
    p.label = static_cast<int>(std::lower_bound(labels.begin(), labels.end(), u.label) -
                               labels.begin());
    for (const auto& w : p.words) vocab.add(w);
    for (const auto& t : p.q_tags) vocab.add(t);
    for (const auto& t : p.ctx_tags) vocab.add(t);
    prepared.push_back(std::move(p));
  }
  std::vector<IntentExample> dataset;
  dataset.reserve(prepared.size());
  for (const auto& p : prepared) {
    dataset.push_back({build_input(p.words, p.q_tags, p.ctx_tags, vocab, config.max_len), p.label});
  }
  IntentModel model = IntentModel::init(config, vocab.size(), static_cast<int>(labels.size()));
  model = train(std::move(model), dataset, train_cfg, epoch_losses);
  return IntentClassifier(std::move(vocab), std::move(labels), std::move(model), use_tags);
}

IntentInput IntentClassifier::encode(const std::string& text, std::span<const std::string> q_tags,
                                     std::span<const std::string> ctx_tags) const {
  std::vector<std::string> qt, ct;
  if (use_tags_) {
    for (const auto& t : q_tags) qt.push_back(tag_token(t));
    for (const auto& t : ctx_tags) ct.push_back(tag_token(t));
  }
  return build_input(tokenize(normalize(text)), qt, ct, vocab_, model_.config.max_len);
}

IntentPrediction IntentClassifier::predict(const std::string& text,
                                           std::span<const std::string> q_tags,
                                           std::span<const std::string> ctx_tags) const {
  if (normalize(text).empty()) throw Error(Errc::kEmptyQuestion, "empty question");
  const Eigen::VectorXd probs = forward(model_, encode(text, q_tags, ctx_tags));
  IntentPrediction p;
  p.label = argmax(probs);
  p.probs.assign(probs.data(), probs.data() + probs.size());
  return p;
}

std::optional<int> IntentClassifier::label_id(std::string_view name) const {
  auto it = std::find(labels_.begin(), labels_.end(), name);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<int>(it - labels_.begin());
}

std::string IntentClassifier::serialize() const {
  std::ostringstream out;
  ParamWriter w(out);
  const auto& c = model_.config;
  w.field("format", "intent-cnn-v1");
  w.field("dim", std::to_string(c.dim));
  std::string windows;
  for (int win : c.windows) windows += (windows.empty() ? "" : ",") + std::to_string(win);
  w.field("windows", windows);
  w.field("filters", std::to_string(c.filters));
  w.field("max_len", std::to_string(c.max_len));
  w.field("seed", std::to_string(c.seed));
  w.field("use_tags", use_tags_ ? "1" : "0");
  w.field("labels", json(labels_).dump());
  w.field("vocab_size", std::to_string(vocab_.size()));
  out << vocab_.serialize();
  w.tensor("embedding", model_.embedding);
  for (std::size_t k = 0; k < model_.filters.size(); ++k) {
    w.tensor("filter" + std::to_string(k), model_.filters[k]);
    w.vector("filter_bias" + std::to_string(k), model_.filter_bias[k]);
  }
  w.tensor("out_weight", model_.out_weight);
  w.vector("out_bias", model_.out_bias);
  return out.str();
}

IntentClassifier IntentClassifier::deserialize(const std::string& text) {
  std::istringstream in(text);
  ParamReader r(in);
  if (r.field("format") != "intent-cnn-v1")
    throw Error(Errc::kMalformedFile, "not an intent model file");
  IntentModel m;
  m.config.dim = std::stoi(r.field("dim"));
  m.config.windows.clear();
  {
    std::istringstream ws(r.field("windows"));
    std::string part;
    while (std::getline(ws, part, ',')) m.config.windows.push_back(std::stoi(part));
  }
  m.config.filters = std::stoi(r.field("filters"));
  m.config.max_len = std::stoi(r.field("max_len"));
  m.config.seed = std::stoull(r.field("seed"));
  const bool use_tags = r.field("use_tags") == "1";
  auto labels = json::parse(r.field("labels")).get<std::vector<std::string>>();
  const auto vocab_size = std::stoull(r.field("vocab_size"));
  Vocabulary vocab = Vocabulary::deserialize(r.raw_lines(vocab_size));
  m.num_classes = static_cast<int>(labels.size());
  m.embedding = r.tensor("embedding");
  for (std::size_t k = 0; k < m.config.windows.size(); ++k) {
    m.filters.push_back(r.tensor("filter" + std::to_string(k)));
    m.filter_bias.push_back(r.vector("filter_bias" + std::to_string(k)));
  }
  m.out_weight = r.tensor("out_weight");
  m.out_bias = r.vector("out_bias");
  if (static_cast<std::size_t>(m.embedding.cols()) != vocab.size() ||
      m.embedding.rows() != m.config.dim || m.out_weight.rows() != m.num_classes)
    throw Error(Errc::kMalformedFile, "intent model dimensions are inconsistent");
  return IntentClassifier(std::move(vocab), std::move(labels), std::move(m), use_tags);
}

void IntentClassifier::save(const std::filesystem::path& path) const {
  write_file(path, serialize());
}

IntentClassifier IntentClassifier::load(const std::filesystem::path& path) {
  return deserialize(read_file(path));
}

}  // namespace assist

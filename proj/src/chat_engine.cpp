#include "assist/chat_engine.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "assist/error.hpp"
#include "assist/io.hpp"

namespace assist {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::vector<ChatPair> load_chat_corpus(const std::filesystem::path& path) {
  std::vector<ChatPair> out;
  for (const auto& r : read_jsonl(path)) {
    if (!r.contains("post") || !r.contains("reply"))
      throw Error(Errc::kMalformedFile, path.string() + ": record lacks post/reply");
    out.push_back({r.at("post").get<std::string>(), r.at("reply").get<std::string>()});
  }
  return out;
}

GruParams GruParams::zeros(int in, int h) {
  GruParams p;
  p.wz = p.wr = p.wn = MatrixXd::Zero(h, in);
  p.uz = p.ur = p.un = MatrixXd::Zero(h, h);
  p.bz = p.br = p.bn = VectorXd::Zero(h);
  return p;
}

Vocabulary Seq2SeqModel::make_src_vocab() {
  const std::vector<std::string> extra{"</s>"};
  return Vocabulary(extra);
}

Vocabulary Seq2SeqModel::make_tgt_vocab() {
  const std::vector<std::string> extra{"<s>", "</s>"};
  return Vocabulary(extra);
}

namespace {

void uniform_fill(double* data, std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-0.1, 0.1);
  for (std::size_t i = 0; i < n; ++i) data[i] = dist(rng);
}

template <class Fn>
void for_each_tensor(GruParams& p, const std::string& prefix, Fn&& fn) {
  fn(prefix + "wz", p.wz.data(), std::size_t(p.wz.size()));
  fn(prefix + "wr", p.wr.data(), std::size_t(p.wr.size()));
  fn(prefix + "wn", p.wn.data(), std::size_t(p.wn.size()));
  fn(prefix + "uz", p.uz.data(), std::size_t(p.uz.size()));
  fn(prefix + "ur", p.ur.data(), std::size_t(p.ur.size()));
  fn(prefix + "un", p.un.data(), std::size_t(p.un.size()));
  fn(prefix + "bz", p.bz.data(), std::size_t(p.bz.size()));
  fn(prefix + "br", p.br.data(), std::size_t(p.br.size()));
  fn(prefix + "bn", p.bn.data(), std::size_t(p.bn.size()));
}

std::vector<std::string> chat_tokens(const std::string& text) { return tokenize(normalize(text)); }

}  // namespace

Seq2SeqModel Seq2SeqModel::init(const Seq2SeqConfig& config, Vocabulary src, Vocabulary tgt) {
  if (config.hidden < 1 || config.embed < 1 || config.max_decode < 1)
    throw Error(Errc::kInvalidArgument, "seq2seq dimensions must be positive");
  Seq2SeqModel m;
  m.config = config;
  m.src_vocab = std::move(src);
  m.tgt_vocab = std::move(tgt);
  const int h = config.hidden;
  const int d = config.embed;
  const auto vs = static_cast<Eigen::Index>(m.src_vocab.size());
  const auto vt = static_cast<Eigen::Index>(m.tgt_vocab.size());
  m.src_embed = MatrixXd::Zero(d, vs);
  m.tgt_embed = MatrixXd::Zero(d, vt);
  m.encoder = GruParams::zeros(d, h);
  m.decoder = GruParams::zeros(d, h);
  m.att_w = MatrixXd::Zero(h, h);
  m.att_u = MatrixXd::Zero(h, h);
  m.att_v = VectorXd::Zero(h);
  m.out_w = MatrixXd::Zero(vt, 2 * h);
  m.out_b = VectorXd::Zero(vt);
  std::mt19937_64 rng(config.seed);
  for (auto& g : m.parameter_groups()) {
    const bool bias = g.name.find("_b") != std::string::npos;
    if (!bias) uniform_fill(g.data, g.size, rng);
  }
  return m;
}

Seq2SeqModel Seq2SeqModel::zeros_like() const {
  Seq2SeqModel z = *this;
  for (auto& g : z.parameter_groups()) std::fill(g.data, g.data + g.size, 0.0);
  return z;
}

std::vector<Seq2SeqModel::Group> Seq2SeqModel::parameter_groups() {
  std::vector<Group> out;
  auto add = [&](const std::string& name, double* data, std::size_t size) {
    out.push_back({name, data, size});
  };
  add("src_embed", src_embed.data(), std::size_t(src_embed.size()));
  add("tgt_embed", tgt_embed.data(), std::size_t(tgt_embed.size()));
  // Bias names contain "_b"; init leaves them at zero.
  for_each_tensor(encoder, "enc_", add);
  for_each_tensor(decoder, "dec_", add);
  add("att_w", att_w.data(), std::size_t(att_w.size()));
  add("att_u", att_u.data(), std::size_t(att_u.size()));
  add("att_v", att_v.data(), std::size_t(att_v.size()));
  add("out_w", out_w.data(), std::size_t(out_w.size()));
  add("out_b", out_b.data(), std::size_t(out_b.size()));
  return out;
}

std::vector<std::int32_t> Seq2SeqModel::encode_source(const std::string& text) const {
  auto ids = src_vocab.encode(chat_tokens(text));
  ids.push_back(kSrcEos);
  return ids;
}

std::vector<std::int32_t> Seq2SeqModel::encode_target(const std::string& text) const {
  return tgt_vocab.encode(chat_tokens(text));
}

bool operator==(const Seq2SeqModel& a, const Seq2SeqModel& b) {
  auto& ma = const_cast<Seq2SeqModel&>(a);
  auto& mb = const_cast<Seq2SeqModel&>(b);
  if (a.config.hidden != b.config.hidden || a.config.embed != b.config.embed ||
      a.config.max_decode != b.config.max_decode || a.config.seed != b.config.seed ||
      !(a.src_vocab == b.src_vocab) || !(a.tgt_vocab == b.tgt_vocab))
    return false;
  const auto ga = ma.parameter_groups();
  const auto gb = mb.parameter_groups();
  for (std::size_t i = 0; i < ga.size(); ++i) {
    if (ga[i].size != gb[i].size || !std::equal(ga[i].data, ga[i].data + ga[i].size, gb[i].data))
      return false;
  }
  return true;
}

namespace {

VectorXd sigmoid(const VectorXd& x) { return (1.0 / (1.0 + (-x.array()).exp())).matrix(); }

VectorXd softmax(const VectorXd& x) {
  const VectorXd e = (x.array() - x.maxCoeff()).exp().matrix();
  return e / e.sum();
}

std::int32_t argmax(const VectorXd& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (v(i) > v(best)) best = i;
  return static_cast<std::int32_t>(best);
}

struct GruStep {
  VectorXd x, s_prev, z, r, rs, n, s;
};

GruStep gru_forward(const GruParams& p, const VectorXd& x, const VectorXd& s_prev) {
  GruStep st;
  st.x = x;
  st.s_prev = s_prev;
  st.z = sigmoid(p.wz * x + p.uz * s_prev + p.bz);
  st.r = sigmoid(p.wr * x + p.ur * s_prev + p.br);
  st.rs = st.r.cwiseProduct(s_prev);
  st.n = (p.wn * x + p.un * st.rs + p.bn).array().tanh().matrix();
  st.s = (1.0 - st.z.array()).matrix().cwiseProduct(s_prev) + st.z.cwiseProduct(st.n);
  return st;
}

// Given dL/ds, accumulates parameter gradients; returns dL/dx and dL/ds_prev.
void gru_backward(const GruParams& p, const GruStep& st, const VectorXd& ds, GruParams& g,
                  VectorXd& dx, VectorXd& ds_prev) {
  const VectorXd dz = ds.cwiseProduct(st.n - st.s_prev);
  const VectorXd dn = ds.cwiseProduct(st.z);
  ds_prev = ds.cwiseProduct((1.0 - st.z.array()).matrix());

  const VectorXd dan = dn.cwiseProduct((1.0 - st.n.array().square()).matrix());
  g.wn.noalias() += dan * st.x.transpose();
  g.un.noalias() += dan * st.rs.transpose();
  g.bn += dan;
  dx.noalias() = p.wn.transpose() * dan;
  const VectorXd drs = p.un.transpose() * dan;
  const VectorXd dr = drs.cwiseProduct(st.s_prev);
  ds_prev += drs.cwiseProduct(st.r);

  const VectorXd daz = dz.cwiseProduct(st.z.cwiseProduct((1.0 - st.z.array()).matrix()));
  g.wz.noalias() += daz * st.x.transpose();
  g.uz.noalias() += daz * st.s_prev.transpose();
  g.bz += daz;
  dx.noalias() += p.wz.transpose() * daz;
  ds_prev.noalias() += p.uz.transpose() * daz;

  const VectorXd dar = dr.cwiseProduct(st.r.cwiseProduct((1.0 - st.r.array()).matrix()));
  g.wr.noalias() += dar * st.x.transpose();
  g.ur.noalias() += dar * st.s_prev.transpose();
  g.br += dar;
  dx.noalias() += p.wr.transpose() * dar;
  ds_prev.noalias() += p.ur.transpose() * dar;
}

struct Encoded {
  std::vector<GruStep> steps;
  MatrixXd states;  // h x S
  MatrixXd projected;  // att_u * states
};

Encoded encode(const Seq2SeqModel& m, std::span<const std::int32_t> source) {
  const int h = m.config.hidden;
  Encoded enc;
  enc.states = MatrixXd::Zero(h, static_cast<Eigen::Index>(source.size()));
  VectorXd s = VectorXd::Zero(h);
  for (std::size_t i = 0; i < source.size(); ++i) {
    enc.steps.push_back(gru_forward(m.encoder, m.src_embed.col(source[i]), s));
    s = enc.steps.back().s;
    enc.states.col(static_cast<Eigen::Index>(i)) = s;
  }
  enc.projected = m.att_u * enc.states;
  return enc;
}

struct DecStep {
  std::int32_t input = 0;
  GruStep gru;
  MatrixXd act;  // tanh(att_w s + att_u h_i), h x S
  VectorXd alpha;
  VectorXd joint;  // [s; c]
  VectorXd probs;
};

DecStep decode_step(const Seq2SeqModel& m, const Encoded& enc, std::int32_t prev,
                    const VectorXd& s_prev) {
  const int h = m.config.hidden;
  DecStep st;
  st.input = prev;
  st.gru = gru_forward(m.decoder, m.tgt_embed.col(prev), s_prev);
  const VectorXd ws = m.att_w * st.gru.s;
  st.act = (enc.projected.colwise() + ws).array().tanh().matrix();
  st.alpha = softmax(st.act.transpose() * m.att_v);
  st.joint.resize(2 * h);
  st.joint.head(h) = st.gru.s;
  st.joint.tail(h) = enc.states * st.alpha;
  st.probs = softmax(m.out_w * st.joint + m.out_b);
  return st;
}

VectorXd initial_state(const Encoded& enc) { return enc.states.col(enc.states.cols() - 1); }

void check_ids(const Seq2SeqModel& m, std::span<const std::int32_t> source,
               std::span<const std::int32_t> target) {
  if (source.empty()) throw Error(Errc::kInvalidArgument, "empty source sequence");
  for (auto id : source)
    if (id < 0 || static_cast<std::size_t>(id) >= m.src_vocab.size())
      throw Error(Errc::kInvalidArgument, "source id out of range");
  for (auto id : target)
    if (id < 0 || static_cast<std::size_t>(id) >= m.tgt_vocab.size())
      throw Error(Errc::kInvalidArgument, "target id out of range");
}

}  // namespace

DecodeTrace teacher_forced(const Seq2SeqModel& model, std::span<const std::int32_t> source,
                           std::span<const std::int32_t> target) {
  check_ids(model, source, target);
  const Encoded enc = encode(model, source);
  DecodeTrace trace;
  VectorXd s = initial_state(enc);
  std::int32_t prev = Seq2SeqModel::kBos;
  for (auto y : target) {
    DecStep st = decode_step(model, enc, prev, s);
    s = st.gru.s;
    trace.attention.push_back(std::move(st.alpha));
    trace.probs.push_back(std::move(st.probs));
    prev = y;
  }
  return trace;
}

double seq2seq_loss_and_gradient(const Seq2SeqModel& model, std::span<const std::int32_t> source,
                                 std::span<const std::int32_t> target, Seq2SeqModel* grad) {
  check_ids(model, source, target);
  const int h = model.config.hidden;
  const Encoded enc = encode(model, source);
  std::vector<DecStep> steps;
  double loss = 0.0;
  VectorXd s = initial_state(enc);
  std::int32_t prev = Seq2SeqModel::kBos;
  for (auto y : target) {
    steps.push_back(decode_step(model, enc, prev, s));
    s = steps.back().gru.s;
    loss -= std::log(steps.back().probs(y));
    prev = y;
  }
  if (!grad) return loss;

  const auto S = enc.states.cols();
  MatrixXd d_states = MatrixXd::Zero(h, S);
  VectorXd ds_next = VectorXd::Zero(h);
  VectorXd dx(model.config.embed);
  VectorXd ds_prev(h);
  for (std::size_t t = steps.size(); t-- > 0;) {
    const DecStep& st = steps[t];
    VectorXd dlogits = st.probs;
    dlogits(target[t]) -= 1.0;
    grad->out_w.noalias() += dlogits * st.joint.transpose();
    grad->out_b += dlogits;
    const VectorXd djoint = model.out_w.transpose() * dlogits;
    VectorXd ds = djoint.head(h) + ds_next;
    const VectorXd dc = djoint.tail(h);

    const VectorXd dalpha = enc.states.transpose() * dc;
    d_states.noalias() += dc * st.alpha.transpose();
    const VectorXd de = st.alpha.cwiseProduct((dalpha.array() - st.alpha.dot(dalpha)).matrix());
    grad->att_v.noalias() += st.act * de;
    const MatrixXd dpre =
        (model.att_v * de.transpose()).cwiseProduct((1.0 - st.act.array().square()).matrix());
    const VectorXd dpre_sum = dpre.rowwise().sum();
    grad->att_w.noalias() += dpre_sum * st.gru.s.transpose();
    ds.noalias() += model.att_w.transpose() * dpre_sum;
    grad->att_u.noalias() += dpre * enc.states.transpose();
    d_states.noalias() += model.att_u.transpose() * dpre;

    gru_backward(model.decoder, st.gru, ds, grad->decoder, dx, ds_prev);
    grad->tgt_embed.col(st.input) += dx;
    ds_next = ds_prev;
  }
  d_states.col(S - 1) += ds_next;

  VectorXd dh_next = VectorXd::Zero(h);
  for (auto i = S; i-- > 0;) {
    const VectorXd dh = d_states.col(i) + dh_next;
    gru_backward(model.encoder, enc.steps[static_cast<std::size_t>(i)], dh, grad->encoder, dx, ds_prev);
    grad->src_embed.col(source[static_cast<std::size_t>(i)]) += dx;
    dh_next = ds_prev;
  }
  return loss;
}

namespace {

struct EncodedPair {
  std::vector<std::int32_t> source;
  std::vector<std::int32_t> target;  // ends in EOS
};

std::vector<EncodedPair> encode_corpus(const Seq2SeqModel& m, std::span<const ChatPair> corpus) {
  std::vector<EncodedPair> out;
  for (const auto& p : corpus) {
    EncodedPair e{m.encode_source(p.post), m.encode_target(p.reply)};
    e.target.push_back(Seq2SeqModel::kEos);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace

Seq2SeqModel train_seq2seq(std::span<const ChatPair> corpus, const Seq2SeqConfig& config,
                           const Seq2SeqTrainConfig& train, std::vector<double>* epoch_losses) {
  if (corpus.empty()) throw Error(Errc::kEmptyCorpus, "chat corpus has no pairs");
  Vocabulary src = Seq2SeqModel::make_src_vocab();
  Vocabulary tgt = Seq2SeqModel::make_tgt_vocab();
  for (const auto& p : corpus) {
    for (const auto& t : chat_tokens(p.post)) src.add(t);
    for (const auto& t : chat_tokens(p.reply)) tgt.add(t);
  }
  return train_seq2seq(Seq2SeqModel::init(config, std::move(src), std::move(tgt)), corpus, train,
                       epoch_losses);
}

Seq2SeqModel train_seq2seq(Seq2SeqModel model, std::span<const ChatPair> corpus,
                           const Seq2SeqTrainConfig& train, std::vector<double>* epoch_losses) {
  if (corpus.empty()) throw Error(Errc::kEmptyCorpus, "chat corpus has no pairs");
  if (train.batch_size < 1 || train.epochs < 0)
    throw Error(Errc::kInvalidArgument, "batch size must be positive and epochs non-negative");
  const auto data = encode_corpus(model, corpus);
  std::size_t total_tokens = 0;
  for (const auto& e : data) total_tokens += e.target.size();
  auto mean_loss = [&] {
    double sum = 0.0;
    for (const auto& e : data) sum += seq2seq_loss_and_gradient(model, e.source, e.target, nullptr);
    return sum / static_cast<double>(total_tokens);
  };
  if (epoch_losses) {
    epoch_losses->clear();
    epoch_losses->push_back(mean_loss());
  }

  Seq2SeqModel grad = model.zeros_like();
  Seq2SeqModel m1 = model.zeros_like();
  Seq2SeqModel m2 = model.zeros_like();
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  std::mt19937_64 rng(train.seed);
  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::int64_t step = 0;

  for (int epoch = 0; epoch < train.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(train.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(train.batch_size));
      for (auto& g : grad.parameter_groups()) std::fill(g.data, g.data + g.size, 0.0);
      std::size_t tokens = 0;
      for (std::size_t i = start; i < end; ++i) {
        const auto& e = data[order[i]];
        epoch_loss += seq2seq_loss_and_gradient(model, e.source, e.target, &grad);
        tokens += e.target.size();
      }
      auto gg = grad.parameter_groups();
      double norm2 = 0.0;
      for (auto& g : gg) {
        for (std::size_t i = 0; i < g.size; ++i) {
          g.data[i] /= static_cast<double>(tokens);
          norm2 += g.data[i] * g.data[i];
        }
      }
      const double norm = std::sqrt(norm2);
      const double scale = norm > train.clip_norm ? train.clip_norm / norm : 1.0;
      ++step;
      const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
      auto pg = model.parameter_groups();
      auto g1 = m1.parameter_groups();
      auto g2 = m2.parameter_groups();
      for (std::size_t k = 0; k < pg.size(); ++k) {
        for (std::size_t i = 0; i < pg[k].size; ++i) {
          const double g = gg[k].data[i] * scale;
          double& a = g1[k].data[i];
          double& b = g2[k].data[i];
          a = kBeta1 * a + (1.0 - kBeta1) * g;
          b = kBeta2 * b + (1.0 - kBeta2) * g * g;
          pg[k].data[i] -= train.learning_rate * (a / c1) / (std::sqrt(b / c2) + kEps);
        }
      }
    }
    if (epoch_losses) epoch_losses->push_back(epoch_loss / static_cast<double>(total_tokens));
  }
  return model;
}

double teacher_forced_accuracy(const Seq2SeqModel& model, std::span<const ChatPair> corpus) {
  std::size_t hit = 0;
  std::size_t total = 0;
  for (const auto& e : encode_corpus(model, corpus)) {
    const auto trace = teacher_forced(model, e.source, e.target);
    for (std::size_t t = 0; t < e.target.size(); ++t) hit += argmax(trace.probs[t]) == e.target[t];
    total += e.target.size();
  }
  return total == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(total);
}

double score_candidate(const Seq2SeqModel& model, const std::string& question,
                       const std::string& candidate) {
  const auto target = model.encode_target(candidate);
  if (target.empty()) throw Error(Errc::kEmptyCandidate, "candidate text is blank");
  const auto trace = teacher_forced(model, model.encode_source(question), target);
  if (target.size() == 1) return trace.probs[0](target[0]);
  double sum = 0.0;
  for (std::size_t t = 0; t < target.size(); ++t) sum += std::log(trace.probs[t](target[t]));
  return std::exp(sum / static_cast<double>(target.size()));
}

std::string generate(const Seq2SeqModel& model, const std::string& question, DecodeTrace* trace) {
  const auto source = model.encode_source(question);
  const Encoded enc = encode(model, source);
  VectorXd s = initial_state(enc);
  std::int32_t prev = Seq2SeqModel::kBos;
  std::vector<std::string> words;
  for (int t = 0; t < model.config.max_decode; ++t) {
    DecStep st = decode_step(model, enc, prev, s);
    s = st.gru.s;
    const std::int32_t y = argmax(st.probs);
    if (trace) {
      trace->attention.push_back(st.alpha);
      trace->probs.push_back(st.probs);
    }
    if (y == Seq2SeqModel::kEos) break;
    if (y != Vocabulary::kUnk && y != Vocabulary::kPad && y != Seq2SeqModel::kBos)
      words.push_back(model.tgt_vocab.surface(y));
    prev = y;
  }
  return detokenize(words);
}

Seq2SeqGradCheck seq2seq_grad_check(const Seq2SeqModel& model, std::span<const std::int32_t> source,
                                    std::span<const std::int32_t> target, double eps) {
  Seq2SeqModel analytic = model.zeros_like();
  seq2seq_loss_and_gradient(model, source, target, &analytic);
  Seq2SeqModel probe = model;
  auto probe_groups = probe.parameter_groups();
  auto grad_groups = analytic.parameter_groups();
  Seq2SeqGradCheck report;
  for (std::size_t g = 0; g < probe_groups.size(); ++g) {
    double worst = 0.0;
    for (std::size_t i = 0; i < probe_groups[g].size; ++i) {
      double& p = probe_groups[g].data[i];
      const double original = p;
      p = original + eps;
      const double plus = seq2seq_loss_and_gradient(probe, source, target, nullptr);
      p = original - eps;
      const double minus = seq2seq_loss_and_gradient(probe, source, target, nullptr);
      p = original;
      const double numeric = (plus - minus) / (2.0 * eps);
      const double ga = grad_groups[g].data[i];
      const double denom = std::max({std::abs(ga), std::abs(numeric), 1e-8});
      const double err = (ga == 0.0 && numeric == 0.0) ? 0.0 : std::abs(ga - numeric) / denom;
      worst = std::max(worst, err);
    }
    report.per_group[probe_groups[g].name] = worst;
    report.max_rel_error = std::max(report.max_rel_error, worst);
  }
  return report;
}

std::string_view chat_source_name(ChatSource s) {
  return s == ChatSource::kRerankedCandidate ? "reranked_candidate" : "generated";
}

ChatResponse chat_answer(const std::string& question, const InvertedIndex& index,
                         const Seq2SeqModel& model, int k, double threshold) {
  ChatResponse out;
  std::size_t best = 0;
  for (const auto& hit : search(index, question, k)) {
    const std::string& text = index.doc(hit.doc).answer;
    out.candidates.push_back({hit.id, text, hit.score, score_candidate(model, question, text)});
    // Hits arrive by retrieval score then id, so strict > keeps that tie order.
    if (out.candidates.back().confidence > out.candidates[best].confidence)
      best = out.candidates.size() - 1;
  }
  if (!out.candidates.empty()) {
    out.confidence = out.candidates[best].confidence;
    if (out.confidence >= threshold) {
      out.text = out.candidates[best].text;
      out.source = ChatSource::kRerankedCandidate;
      return out;
    }
  }
  out.text = generate(model, question);
  out.source = ChatSource::kGenerated;
  return out;
}

std::string Seq2SeqModel::serialize() const {
  std::ostringstream out;
  ParamWriter w(out);
  w.field("format", "seq2seq-gru-attn-v1");
  w.field("hidden", std::to_string(config.hidden));
  w.field("embed", std::to_string(config.embed));
  w.field("max_decode", std::to_string(config.max_decode));
  w.field("seed", std::to_string(config.seed));
  w.field("src_vocab_size", std::to_string(src_vocab.size()));
  out << src_vocab.serialize();
  w.field("tgt_vocab_size", std::to_string(tgt_vocab.size()));
  out << tgt_vocab.serialize();
  auto& self = const_cast<Seq2SeqModel&>(*this);
  for (const auto& g : self.parameter_groups()) {
    w.tensor(g.name, Eigen::Map<const MatrixXd>(g.data, 1, static_cast<Eigen::Index>(g.size)));
  }
  return out.str();
}

Seq2SeqModel Seq2SeqModel::deserialize(const std::string& text) {
  std::istringstream in(text);
  ParamReader r(in);
  if (r.field("format") != "seq2seq-gru-attn-v1")
    throw Error(Errc::kMalformedFile, "not a seq2seq model file");
  Seq2SeqConfig cfg;
  try {
    cfg.hidden = std::stoi(r.field("hidden"));
    cfg.embed = std::stoi(r.field("embed"));
    cfg.max_decode = std::stoi(r.field("max_decode"));
    cfg.seed = std::stoull(r.field("seed"));
  } catch (const std::logic_error&) {
    throw Error(Errc::kMalformedFile, "seq2seq header fields are not numbers");
  }
  Vocabulary src = Vocabulary::deserialize(r.raw_lines(std::stoull(r.field("src_vocab_size"))));
  Vocabulary tgt = Vocabulary::deserialize(r.raw_lines(std::stoull(r.field("tgt_vocab_size"))));
  Seq2SeqModel m = init(cfg, std::move(src), std::move(tgt));
  for (auto& g : m.parameter_groups()) {
    const MatrixXd t = r.tensor(g.name);
    if (static_cast<std::size_t>(t.size()) != g.size)
      throw Error(Errc::kMalformedFile, "tensor '" + g.name + "' has the wrong size");
    std::copy(t.data(), t.data() + t.size(), g.data);
  }
  return m;
}

void Seq2SeqModel::save(const std::filesystem::path& path) const { write_file(path, serialize()); }

Seq2SeqModel Seq2SeqModel::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error(Errc::kMissingArtifact, path.string());
  return deserialize(read_file(path));
}

}  // namespace assist

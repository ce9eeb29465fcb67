// Copyright 2026 The aegen Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "aegen/detector.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "aegen/base.h"
#include "aegen/eval.h"

namespace aegen {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr std::string_view kMagic = "aegen-detector";
constexpr int kFormatVersion = 1;

const char *const kParamNames[kNumParams] = {
    "embedding", "fwd_wx", "fwd_wh", "fwd_b", "bwd_wx", "bwd_wh",
    "bwd_b",     "hidden_w", "hidden_b", "output_w", "output_b"};

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Activations of one LSTM direction; column t belongs to token t.
struct LstmTrace {
  MatrixXd gates;  // 4H x n, after nonlinearities
  MatrixXd c;      // H x n
  MatrixXd h;      // H x n
};

struct Trace {
  std::vector<int> ids;
  MatrixXd x;       // E x n
  LstmTrace fwd, bwd;
  MatrixXd hidden;  // F x n, after tanh
  MatrixXd log_probs;  // 2 x n
};

void RunLstm(const MatrixXd &wx, const MatrixXd &wh, const MatrixXd &b, const MatrixXd &x,
             bool reverse, LstmTrace &trace) {
  const long n = x.cols();
  const long h = wh.cols();
  MatrixXd pre = wx * x;
  pre.colwise() += b.col(0);
  trace.gates.resize(4 * h, n);
  trace.c.resize(h, n);
  trace.h.resize(h, n);
  VectorXd h_prev = VectorXd::Zero(h), c_prev = VectorXd::Zero(h);
  for (long s = 0; s < n; ++s) {
    const long t = reverse ? n - 1 - s : s;
    VectorXd a = pre.col(t) + wh * h_prev;
    for (long k = 0; k < 3 * h; ++k) a(k) = Sigmoid(a(k));
    for (long k = 3 * h; k < 4 * h; ++k) a(k) = std::tanh(a(k));
    VectorXd c = a.segment(h, h).cwiseProduct(c_prev) +
                 a.segment(0, h).cwiseProduct(a.segment(3 * h, h));
    VectorXd out = a.segment(2 * h, h).cwiseProduct(c.array().tanh().matrix());
    trace.gates.col(t) = a;
    trace.c.col(t) = c;
    trace.h.col(t) = out;
    h_prev = out;
    c_prev = c;
  }
}

// Backpropagation through one direction. d_h holds the gradient arriving
// at each hidden state from above; gradients are accumulated.
void BackLstm(const MatrixXd &wx, const MatrixXd &wh, const MatrixXd &x, bool reverse,
              const LstmTrace &trace, const MatrixXd &d_h, MatrixXd &g_wx, MatrixXd &g_wh,
              MatrixXd &g_b, MatrixXd &d_x) {
  const long n = x.cols();
  const long h = wh.cols();
  MatrixXd d_pre(4 * h, n);
  MatrixXd h_prev_all = MatrixXd::Zero(h, n);
  VectorXd dh_next = VectorXd::Zero(h), dc_next = VectorXd::Zero(h);
  for (long s = n - 1; s >= 0; --s) {
    const long t = reverse ? n - 1 - s : s;
    const long prev = reverse ? t + 1 : t - 1;
    const bool has_prev = s > 0;
    const auto gates = trace.gates.col(t);
    const auto i = gates.segment(0, h).array();
    const auto f = gates.segment(h, h).array();
    const auto o = gates.segment(2 * h, h).array();
    const auto g = gates.segment(3 * h, h).array();
    const Eigen::ArrayXd tanh_c = trace.c.col(t).array().tanh();
    const Eigen::ArrayXd c_prev =
        has_prev ? Eigen::ArrayXd(trace.c.col(prev).array()) : Eigen::ArrayXd::Zero(h);
    if (has_prev) h_prev_all.col(t) = trace.h.col(prev);

    const Eigen::ArrayXd dh = d_h.col(t).array() + dh_next.array();
    const Eigen::ArrayXd dc = dh * o * (1.0 - tanh_c * tanh_c) + dc_next.array();
    auto col = d_pre.col(t);
    col.segment(0, h) = (dc * g * i * (1.0 - i)).matrix();
    col.segment(h, h) = (dc * c_prev * f * (1.0 - f)).matrix();
    col.segment(2 * h, h) = (dh * tanh_c * o * (1.0 - o)).matrix();
    col.segment(3 * h, h) = (dc * i * (1.0 - g * g)).matrix();
    dh_next = wh.transpose() * col;
    dc_next = (dc * f).matrix();
  }
  g_wx.noalias() += d_pre * x.transpose();
  g_wh.noalias() += d_pre * h_prev_all.transpose();
  g_b.col(0) += d_pre.rowwise().sum();
  d_x.noalias() += wx.transpose() * d_pre;
}

void Run(const DetectorModel &model, std::span<const std::string> words, Trace &trace) {
  if (words.empty()) throw Error("cannot run the detector on an empty sentence");
  const ParamSet &p = model.params();
  const long n = static_cast<long>(words.size());
  trace.ids.resize(words.size());
  trace.x.resize(model.embedding_dim(), n);
  for (long t = 0; t < n; ++t) {
    trace.ids[t] = model.WordIndex(words[t]);
    trace.x.col(t) = p[kEmbedding].col(trace.ids[t]);
  }
  RunLstm(p[kFwdWx], p[kFwdWh], p[kFwdB], trace.x, false, trace.fwd);
  RunLstm(p[kBwdWx], p[kBwdWh], p[kBwdB], trace.x, true, trace.bwd);
  const long h = model.hidden_dim();
  trace.hidden = p[kHiddenW].leftCols(h) * trace.fwd.h + p[kHiddenW].rightCols(h) * trace.bwd.h;
  trace.hidden.colwise() += p[kHiddenB].col(0);
  trace.hidden = trace.hidden.array().tanh().matrix();
  MatrixXd logits = p[kOutputW] * trace.hidden;
  logits.colwise() += p[kOutputB].col(0);
  trace.log_probs.resize(2, n);
  for (long t = 0; t < n; ++t) {
    const double m = std::max(logits(0, t), logits(1, t));
    const double lse = m + std::log(std::exp(logits(0, t) - m) + std::exp(logits(1, t) - m));
    trace.log_probs(0, t) = logits(0, t) - lse;
    trace.log_probs(1, t) = logits(1, t) - lse;
  }
}

std::vector<std::string> Words(const LabeledSentence &sentence) {
  std::vector<std::string> out;
  out.reserve(sentence.tokens.size());
  for (const auto &t : sentence.tokens) out.push_back(t.surface);
  return out;
}

}  // namespace

const char *ParamName(size_t index) { return kParamNames[index]; }

void DetectorConfig::Validate() const {
  if (embedding_dim < 1 || hidden_dim < 1 || ff_dim < 1) {
    throw Error("detector dimensions must be positive");
  }
  if (epochs < 1) throw Error("epochs must be at least 1");
  if (batch_size < 1) throw Error("batch size must be at least 1");
  if (!(rho > 0.0 && rho < 1.0)) throw Error("rho must lie in (0, 1)");
  if (!(epsilon > 0.0)) throw Error("epsilon must be positive");
  if (min_count < 1) throw Error("vocabulary cutoff must be at least 1");
}

DetectorModel::DetectorModel(std::vector<std::string> vocabulary, int e, int h, int f)
    : e_(e), h_(h), f_(f) {
  if (e < 1 || h < 1 || f < 1) throw Error("detector dimensions must be positive");
  vocabulary_.emplace_back(kUnknown);
  for (auto &w : vocabulary) {
    if (w != kUnknown) vocabulary_.push_back(std::move(w));
  }
  for (size_t i = 0; i < vocabulary_.size(); ++i) {
    if (!index_.emplace(vocabulary_[i], static_cast<int>(i)).second) {
      throw Error("duplicate vocabulary entry '" + vocabulary_[i] + "'");
    }
  }
  const long v = static_cast<long>(vocabulary_.size());
  params_[kEmbedding] = MatrixXd::Zero(e, v);
  for (size_t base : {kFwdWx, kBwdWx}) {
    params_[base] = MatrixXd::Zero(4 * h, e);
    params_[base + 1] = MatrixXd::Zero(4 * h, h);
    params_[base + 2] = MatrixXd::Zero(4 * h, 1);
  }
  params_[kHiddenW] = MatrixXd::Zero(f, 2 * h);
  params_[kHiddenB] = MatrixXd::Zero(f, 1);
  params_[kOutputW] = MatrixXd::Zero(2, f);
  params_[kOutputB] = MatrixXd::Zero(2, 1);
}

std::vector<std::string> DetectorModel::BuildVocabulary(
    std::span<const LabeledSentence> corpus, int min_count) {
  std::map<std::string, int> counts;
  for (const auto &s : corpus) {
    for (const auto &t : s.tokens) ++counts[t.surface];
  }
  std::vector<std::string> out;
  for (const auto &[word, c] : counts) {
    if (c >= min_count && word != kUnknown) out.push_back(word);
  }
  return out;
}

void DetectorModel::Initialize(uint64_t seed) {
  Rng rng(seed);
  for (size_t k = 0; k < kNumParams; ++k) {
    MatrixXd &m = params_[k];
    const bool bias = k == kFwdB || k == kBwdB || k == kHiddenB || k == kOutputB;
    if (bias) {
      m.setZero();
      continue;
    }
    const double bound = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
    for (long j = 0; j < m.cols(); ++j) {
      for (long i = 0; i < m.rows(); ++i) m(i, j) = (2.0 * rng.Uniform() - 1.0) * bound;
    }
  }
  params_[kFwdB].block(h_, 0, h_, 1).setOnes();
  params_[kBwdB].block(h_, 0, h_, 1).setOnes();
}

int DetectorModel::WordIndex(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? 0 : it->second;
}

Eigen::Matrix2Xd DetectorModel::Forward(std::span<const std::string> words) const {
  Trace trace;
  Run(*this, words, trace);
  return trace.log_probs.array().exp().matrix();
}

double DetectorModel::LossAndGradients(std::span<const LabeledSentence> batch,
                                       ParamSet *grads) const {
  size_t tokens = 0;
  for (const auto &s : batch) tokens += s.size();
  if (tokens == 0) return 0.0;
  if (grads != nullptr) *grads = ZerosLike(params_);
  const double scale = 1.0 / static_cast<double>(tokens);
  double loss = 0.0;
  Trace trace;
  for (const auto &sentence : batch) {
    if (sentence.labels.size() != sentence.tokens.size()) {
      throw Error("labeled sentence has mismatched labels");
    }
    Run(*this, Words(sentence), trace);
    const long n = static_cast<long>(sentence.size());
    MatrixXd d_logits = trace.log_probs.array().exp().matrix();
    for (long t = 0; t < n; ++t) {
      const int gold = sentence.labels[t] == Label::kIncorrect ? 1 : 0;
      loss -= trace.log_probs(gold, t);
      d_logits(gold, t) -= 1.0;
    }
    if (grads == nullptr) continue;
    d_logits *= scale;

    ParamSet &g = *grads;
    g[kOutputW].noalias() += d_logits * trace.hidden.transpose();
    g[kOutputB].col(0) += d_logits.rowwise().sum();
    MatrixXd d_hidden = params_[kOutputW].transpose() * d_logits;
    d_hidden.array() *= 1.0 - trace.hidden.array().square();
    g[kHiddenW].leftCols(h_).noalias() += d_hidden * trace.fwd.h.transpose();
    g[kHiddenW].rightCols(h_).noalias() += d_hidden * trace.bwd.h.transpose();
    g[kHiddenB].col(0) += d_hidden.rowwise().sum();
    MatrixXd d_fwd = params_[kHiddenW].leftCols(h_).transpose() * d_hidden;
    MatrixXd d_bwd = params_[kHiddenW].rightCols(h_).transpose() * d_hidden;

    MatrixXd d_x = MatrixXd::Zero(e_, n);
    BackLstm(params_[kFwdWx], params_[kFwdWh], trace.x, false, trace.fwd, d_fwd, g[kFwdWx],
             g[kFwdWh], g[kFwdB], d_x);
    BackLstm(params_[kBwdWx], params_[kBwdWh], trace.x, true, trace.bwd, d_bwd, g[kBwdWx],
             g[kBwdWh], g[kBwdB], d_x);
    for (long t = 0; t < n; ++t) g[kEmbedding].col(trace.ids[t]) += d_x.col(t);
  }
  return loss * scale;
}

std::string DetectorModel::Serialize() const {
  std::string out = std::string(kMagic) + " " + std::to_string(kFormatVersion) + "\n";
  out += "dims " + std::to_string(e_) + " " + std::to_string(h_) + " " + std::to_string(f_) + "\n";
  out += "vocab " + std::to_string(vocabulary_.size()) + "\n";
  for (const auto &w : vocabulary_) out += w + "\n";
  for (size_t k = 0; k < kNumParams; ++k) {
    const MatrixXd &m = params_[k];
    out += "param " + std::string(kParamNames[k]) + " " + std::to_string(m.rows()) + " " +
           std::to_string(m.cols()) + "\n";
    for (long i = 0; i < m.size(); ++i) {
      if (i > 0) out += ' ';
      out += FormatDouble(m.data()[i]);
    }
    out += "\n";
  }
  return out;
}

DetectorModel DetectorModel::Parse(std::string_view text) {
  auto lines = Split(text, '\n');
  size_t next = 0;
  auto line = [&]() -> std::string_view {
    if (next >= lines.size()) throw ParseError("unexpected end of model file", static_cast<int>(next));
    return lines[next++];
  };
  auto header = SplitWhitespace(line());
  if (header.size() != 2 || header[0] != kMagic) throw ParseError("not a detector model", 1);
  if (ParseInt(header[1], 1) != kFormatVersion) throw ParseError("unsupported model version", 1);
  auto dims = SplitWhitespace(line());
  if (dims.size() != 4 || dims[0] != "dims") throw ParseError("expected 'dims E H F'", 2);
  auto vocab = SplitWhitespace(line());
  if (vocab.size() != 2 || vocab[0] != "vocab") throw ParseError("expected 'vocab N'", 3);
  const long v = ParseInt(vocab[1], 3);
  if (v < 1) throw ParseError("vocabulary must hold at least <unk>", 3);
  std::vector<std::string> words;
  for (long i = 0; i < v; ++i) words.emplace_back(line());
  if (words[0] != kUnknown) throw ParseError("first vocabulary entry must be <unk>", 4);
  words.erase(words.begin());
  DetectorModel model(std::move(words), static_cast<int>(ParseInt(dims[1], 2)),
                      static_cast<int>(ParseInt(dims[2], 2)),
                      static_cast<int>(ParseInt(dims[3], 2)));
  if (model.vocab_size() != static_cast<size_t>(v)) throw ParseError("duplicate vocabulary entries", 4);
  for (size_t k = 0; k < kNumParams; ++k) {
    const int at = static_cast<int>(next + 1);
    auto head = SplitWhitespace(line());
    MatrixXd &m = model.params_[k];
    if (head.size() != 4 || head[0] != "param" || head[1] != kParamNames[k]) {
      throw ParseError("expected 'param " + std::string(kParamNames[k]) + " rows cols'", at);
    }
    if (ParseInt(head[2], at) != m.rows() || ParseInt(head[3], at) != m.cols()) {
      throw ParseError("shape of " + std::string(kParamNames[k]) + " does not match dims", at);
    }
    auto values = SplitWhitespace(line());
    if (static_cast<long>(values.size()) != m.size()) {
      throw ParseError("wrong number of values for " + std::string(kParamNames[k]), at + 1);
    }
    for (long i = 0; i < m.size(); ++i) m.data()[i] = ParseDouble(values[i], at + 1);
  }
  return model;
}

bool DetectorModel::operator==(const DetectorModel &other) const {
  if (e_ != other.e_ || h_ != other.h_ || f_ != other.f_ || vocabulary_ != other.vocabulary_) {
    return false;
  }
  for (size_t k = 0; k < kNumParams; ++k) {
    if (params_[k] != other.params_[k]) return false;
  }
  return true;
}

ParamSet ZerosLike(const ParamSet &params) {
  ParamSet out;
  for (size_t k = 0; k < kNumParams; ++k) {
    out[k] = MatrixXd::Zero(params[k].rows(), params[k].cols());
  }
  return out;
}

AdaDeltaState::AdaDeltaState(const ParamSet &params, double rho_, double epsilon_)
    : rho(rho_), epsilon(epsilon_), mean_sq_grad(ZerosLike(params)),
      mean_sq_update(ZerosLike(params)) {}

void AdaDeltaStep(ParamSet &params, const ParamSet &grads, AdaDeltaState &state) {
  for (size_t k = 0; k < kNumParams; ++k) {
    if (grads[k].rows() != params[k].rows() || grads[k].cols() != params[k].cols() ||
        state.mean_sq_grad[k].size() != params[k].size()) {
      throw Error(std::string("shape mismatch for parameter ") + kParamNames[k]);
    }
    for (long i = 0; i < grads[k].size(); ++i) {
      if (!std::isfinite(grads[k].data()[i])) {
        throw Error(std::string("non-finite gradient in ") + kParamNames[k] + " entry " +
                    std::to_string(i) + " (" + std::to_string(grads[k].data()[i]) + ")");
      }
    }
  }
  const double rho = state.rho, eps = state.epsilon;
  for (size_t k = 0; k < kNumParams; ++k) {
    auto g = grads[k].array();
    auto eg = state.mean_sq_grad[k].array();
    auto ed = state.mean_sq_update[k].array();
    eg = rho * eg + (1.0 - rho) * g.square();
    Eigen::ArrayXXd delta = -((ed + eps).sqrt() / (eg + eps).sqrt()) * g;
    ed = rho * ed + (1.0 - rho) * delta.square();
    params[k].array() += delta;
  }
}

LabeledSentence PredictSentence(const DetectorModel &model, const TaggedSentence &sentence,
                                double threshold) {
  LabeledSentence out;
  out.tokens = sentence.tokens;
  auto probs = model.Forward(Surfaces(sentence));
  for (long t = 0; t < probs.cols(); ++t) {
    out.labels.push_back(probs(1, t) >= threshold ? Label::kIncorrect : Label::kCorrect);
  }
  return out;
}

std::vector<LabeledSentence> Predict(const DetectorModel &model,
                                     std::span<const LabeledSentence> corpus,
                                     double threshold, int threads) {
  std::vector<LabeledSentence> out(corpus.size());
  ParallelFor(corpus.size(), threads, [&](size_t i) {
    TaggedSentence s;
    s.tokens = corpus[i].tokens;
    out[i] = PredictSentence(model, s, threshold);
  });
  return out;
}

TrainResult TrainDetector(std::span<const LabeledSentence> train,
                          std::span<const LabeledSentence> dev, const DetectorConfig &config,
                          const EpochCallback &on_epoch) {
  config.Validate();
  if (train.empty()) throw Error("training corpus is empty");
  if (dev.empty()) throw Error("development corpus is empty");
  for (const auto &s : train) {
    if (s.tokens.empty()) throw Error("training corpus contains an empty sentence");
  }

  DetectorModel model(DetectorModel::BuildVocabulary(train, config.min_count),
                      config.embedding_dim, config.hidden_dim, config.ff_dim);
  model.Initialize(config.seed);
  AdaDeltaState state(model.params(), config.rho, config.epsilon);

  TrainResult result;
  double best = -1.0;
  std::vector<size_t> order(train.size());
  std::vector<LabeledSentence> batch;
  ParamSet grads;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(DeriveSeed(config.seed, static_cast<uint64_t>(epoch)));
    rng.Shuffle(order);

    double loss_sum = 0.0;
    size_t batches = 0;
    for (size_t start = 0; start < order.size(); start += config.batch_size) {
      batch.clear();
      for (size_t i = start; i < std::min(order.size(), start + config.batch_size); ++i) {
        batch.push_back(train[order[i]]);
      }
      loss_sum += model.LossAndGradients(batch, &grads);
      ++batches;
      AdaDeltaStep(model.params(), grads, state);
    }
    const double loss = loss_sum / static_cast<double>(batches);
    const double f05 = Score(Predict(model, dev, config.threshold, config.threads), dev).f05;
    result.train_loss.push_back(loss);
    result.dev_f05.push_back(f05);
    if (f05 > best) {
      best = f05;
      result.model = model;
      result.best_epoch = epoch;
    }
    if (on_epoch) on_epoch(epoch, loss, f05);
  }
  return result;
}

}  // namespace aegen

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

// Token-level error detector.
//
// Each token is embedded, read by a forward and a backward LSTM, and the
// concatenated hidden states go through a tanh feedforward layer and a
// two-way softmax (index 0 = correct, 1 = incorrect). An LSTM step with
// pre-activation a = Wx x + Wh h' + b, split in row blocks [i f o g]:
//
//   i, f, o = sigmoid(a_i, a_f, a_o),  g = tanh(a_g)
//   c = f * c' + i * g,                h = o * tanh(c)
//
// Training minimises the mean token cross-entropy with AdaDelta.

#ifndef AEGEN_DETECTOR_H_
#define AEGEN_DETECTOR_H_

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "aegen/align.h"
#include "aegen/corpus.h"

namespace aegen {

enum Param : size_t {
  kEmbedding = 0,  // E x V, one column per word
  kFwdWx,          // 4H x E
  kFwdWh,          // 4H x H
  kFwdB,           // 4H x 1
  kBwdWx,
  kBwdWh,
  kBwdB,
  kHiddenW,  // F x 2H, input [forward; backward]
  kHiddenB,  // F x 1
  kOutputW,  // 2 x F
  kOutputB,  // 2 x 1
  kNumParams
};

using ParamSet = std::array<Eigen::MatrixXd, kNumParams>;

const char *ParamName(size_t index);

struct DetectorConfig {
  int embedding_dim = 50;
  int hidden_dim = 100;
  int ff_dim = 50;
  int epochs = 20;
  size_t batch_size = 32;
  double rho = 0.95;
  double epsilon = 1e-6;
  uint64_t seed = 1;
  int min_count = 2;  // rarer training words map to <unk>
  double threshold = 0.5;
  int threads = 1;  // prediction only; training is sequential

  void Validate() const;
};

class DetectorModel {
 public:
  static constexpr std::string_view kUnknown = "<unk>";

  DetectorModel() = default;
  // Zero parameters over the given vocabulary (<unk> is added first).
  DetectorModel(std::vector<std::string> vocabulary, int e, int h, int f);

  static std::vector<std::string> BuildVocabulary(std::span<const LabeledSentence> corpus,
                                                  int min_count);
  // Glorot-uniform weights, zero biases, forget-gate bias 1.
  void Initialize(uint64_t seed);

  int embedding_dim() const { return e_; }
  int hidden_dim() const { return h_; }
  int ff_dim() const { return f_; }
  size_t vocab_size() const { return vocabulary_.size(); }
  const std::vector<std::string> &vocabulary() const { return vocabulary_; }
  int WordIndex(std::string_view word) const;

  ParamSet &params() { return params_; }
  const ParamSet &params() const { return params_; }

  // Per token: column (p(correct), p(incorrect)). Throws on an empty sentence.
  Eigen::Matrix2Xd Forward(std::span<const std::string> words) const;

  // Mean cross-entropy over all tokens of the batch; fills `grads` (same
  // shapes as the parameters) when given.
  double LossAndGradients(std::span<const LabeledSentence> batch, ParamSet *grads) const;

  std::string Serialize() const;
  static DetectorModel Parse(std::string_view text);

  bool operator==(const DetectorModel &other) const;

 private:
  int e_ = 0, h_ = 0, f_ = 0;
  std::vector<std::string> vocabulary_;
  std::unordered_map<std::string, int> index_;
  ParamSet params_;
};

// Parameter-shaped zero tensors.
ParamSet ZerosLike(const ParamSet &params);

struct AdaDeltaState {
  double rho = 0.95;
  double epsilon = 1e-6;
  ParamSet mean_sq_grad;
  ParamSet mean_sq_update;

  AdaDeltaState() = default;
  AdaDeltaState(const ParamSet &params, double rho, double epsilon);
};

// One AdaDelta update in place. A non-finite gradient entry throws Error
// naming the parameter and entry, before anything is modified.
void AdaDeltaStep(ParamSet &params, const ParamSet &grads, AdaDeltaState &state);

LabeledSentence PredictSentence(const DetectorModel &model, const TaggedSentence &sentence,
                                double threshold = 0.5);
std::vector<LabeledSentence> Predict(const DetectorModel &model,
                                     std::span<const LabeledSentence> corpus,
                                     double threshold = 0.5, int threads = 1);

struct TrainResult {
  DetectorModel model;               // snapshot with the best dev F0.5
  std::vector<double> dev_f05;       // after each epoch
  std::vector<double> train_loss;    // mean batch loss per epoch
  int best_epoch = 0;                // 1-based
};

// Called after each epoch with (epoch, train loss, dev F0.5).
using EpochCallback = std::function<void(int, double, double)>;

TrainResult TrainDetector(std::span<const LabeledSentence> train,
                          std::span<const LabeledSentence> dev,
                          const DetectorConfig &config, const EpochCallback &on_epoch = {});

}  // namespace aegen

#endif  // AEGEN_DETECTOR_H_

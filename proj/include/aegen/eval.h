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

// Token-level detection metrics. The positive class is kIncorrect.

#ifndef AEGEN_EVAL_H_
#define AEGEN_EVAL_H_

#include <cstdint>
#include <span>
#include <string>

#include "aegen/align.h"
#include "json.hpp"

namespace aegen {

struct ConfusionCounts {
  size_t tp = 0, fp = 0, fn = 0, tn = 0;

  size_t total() const { return tp + fp + fn + tn; }
  ConfusionCounts &operator+=(const ConfusionCounts &other);
  bool operator==(const ConfusionCounts &other) const = default;
};

// (1 + b^2) p r / (b^2 p + r), or 0 when the denominator is 0. Works on
// either the [0, 1] or the percent scale.
double FBeta(double p, double r, double beta = 0.5);

struct Scores {
  double precision = 0.0;  // [0, 1]
  double recall = 0.0;
  double f05 = 0.0;
  ConfusionCounts counts;
};

// Throws Error naming the sentence when token counts differ.
ConfusionCounts CountSentence(const LabeledSentence &pred, const LabeledSentence &gold,
                              size_t index = 0);
Scores ScoreCounts(const ConfusionCounts &counts);
Scores Score(std::span<const LabeledSentence> pred, std::span<const LabeledSentence> gold);

std::string FormatScores(const Scores &scores);
nlohmann::json ScoresToJson(const Scores &scores);

struct SignificanceResult {
  double observed = 0.0;  // |F0.5(a) - F0.5(b)|
  size_t rounds = 0;
  uint64_t seed = 0;
  size_t at_least = 0;  // rounds whose statistic reached the observed one
  double p_value = 1.0;
};

// Approximate randomisation: every round swaps the two systems' outputs
// for each sentence with probability 1/2, using Rng(DeriveSeed(seed,
// round)). p = (at_least + 1) / (rounds + 1).
SignificanceResult RandomizationTest(std::span<const LabeledSentence> sys_a,
                                     std::span<const LabeledSentence> sys_b,
                                     std::span<const LabeledSentence> gold,
                                     size_t rounds = 10000, uint64_t seed = 0,
                                     int threads = 1);

nlohmann::json SignificanceToJson(const SignificanceResult &result);

}  // namespace aegen

#endif  // AEGEN_EVAL_H_

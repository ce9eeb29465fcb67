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

#include "aegen/eval.h"

#include <cmath>
#include <cstdio>
#include <vector>

#include "aegen/base.h"

namespace aegen {
namespace {

// Ties within this margin count as reaching the observed statistic.
constexpr double kTieMargin = 1e-12;

std::vector<ConfusionCounts> PerSentence(std::span<const LabeledSentence> pred,
                                         std::span<const LabeledSentence> gold) {
  if (pred.size() != gold.size()) {
    throw Error("system has " + std::to_string(pred.size()) + " sentences, gold has " +
                std::to_string(gold.size()));
  }
  std::vector<ConfusionCounts> out(pred.size());
  for (size_t i = 0; i < pred.size(); ++i) out[i] = CountSentence(pred[i], gold[i], i);
  return out;
}

}  // namespace

ConfusionCounts &ConfusionCounts::operator+=(const ConfusionCounts &other) {
  tp += other.tp;
  fp += other.fp;
  fn += other.fn;
  tn += other.tn;
  return *this;
}

double FBeta(double p, double r, double beta) {
  const double b2 = beta * beta;
  const double denominator = b2 * p + r;
  if (denominator == 0.0) return 0.0;
  return (1.0 + b2) * p * r / denominator;
}

ConfusionCounts CountSentence(const LabeledSentence &pred, const LabeledSentence &gold,
                              size_t index) {
  if (pred.labels.size() != gold.labels.size()) {
    throw Error("sentence " + std::to_string(index) + ": prediction has " +
                std::to_string(pred.labels.size()) + " tokens, gold has " +
                std::to_string(gold.labels.size()));
  }
  ConfusionCounts c;
  for (size_t t = 0; t < gold.labels.size(); ++t) {
    const bool p = pred.labels[t] == Label::kIncorrect;
    const bool g = gold.labels[t] == Label::kIncorrect;
    if (p && g) ++c.tp;
    else if (p) ++c.fp;
    else if (g) ++c.fn;
    else ++c.tn;
  }
  return c;
}

Scores ScoreCounts(const ConfusionCounts &counts) {
  Scores s;
  s.counts = counts;
  if (counts.tp + counts.fp > 0) {
    s.precision = static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fp);
  }
  if (counts.tp + counts.fn > 0) {
    s.recall = static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fn);
  }
  s.f05 = FBeta(s.precision, s.recall, 0.5);
  return s;
}

Scores Score(std::span<const LabeledSentence> pred, std::span<const LabeledSentence> gold) {
  ConfusionCounts total;
  for (const auto &c : PerSentence(pred, gold)) total += c;
  return ScoreCounts(total);
}

std::string FormatScores(const Scores &s) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "P      %7.2f\nR      %7.2f\nF0.5   %7.2f\nTP %zu  FP %zu  FN %zu  TN %zu\n",
                100 * s.precision, 100 * s.recall, 100 * s.f05, s.counts.tp, s.counts.fp,
                s.counts.fn, s.counts.tn);
  return buf;
}

nlohmann::json ScoresToJson(const Scores &s) {
  return {{"precision", 100 * s.precision},
          {"recall", 100 * s.recall},
          {"f0.5", 100 * s.f05},
          {"tp", s.counts.tp},
          {"fp", s.counts.fp},
          {"fn", s.counts.fn},
          {"tn", s.counts.tn}};
}

SignificanceResult RandomizationTest(std::span<const LabeledSentence> sys_a,
                                     std::span<const LabeledSentence> sys_b,
                                     std::span<const LabeledSentence> gold,
                                     size_t rounds, uint64_t seed, int threads) {
  if (rounds < 1) throw Error("randomisation test needs at least one round");
  const auto a = PerSentence(sys_a, gold);
  const auto b = PerSentence(sys_b, gold);

  ConfusionCounts total_a, total_b;
  for (size_t i = 0; i < a.size(); ++i) {
    total_a += a[i];
    total_b += b[i];
  }
  SignificanceResult result;
  result.rounds = rounds;
  result.seed = seed;
  result.observed = std::fabs(ScoreCounts(total_a).f05 - ScoreCounts(total_b).f05);

  std::vector<unsigned char> reached(rounds, 0);
  ParallelFor(rounds, threads, [&](size_t round) {
    Rng rng(DeriveSeed(seed, round));
    ConfusionCounts x, y;
    for (size_t i = 0; i < a.size(); ++i) {
      if (rng.Coin()) {
        x += b[i];
        y += a[i];
      } else {
        x += a[i];
        y += b[i];
      }
    }
    double stat = std::fabs(ScoreCounts(x).f05 - ScoreCounts(y).f05);
    reached[round] = stat >= result.observed - kTieMargin;
  });
  for (unsigned char r : reached) result.at_least += r;
  result.p_value =
      static_cast<double>(result.at_least + 1) / static_cast<double>(rounds + 1);
  return result;
}

nlohmann::json SignificanceToJson(const SignificanceResult &r) {
  return {{"observed", r.observed},
          {"rounds", r.rounds},
          {"seed", r.seed},
          {"at_least", r.at_least},
          {"p_value", r.p_value}};
}

}  // namespace aegen

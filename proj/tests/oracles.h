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

// Independent reference implementations shared by the unit tests and the
// acceptance run.

#ifndef AEGEN_TESTS_ORACLES_H_
#define AEGEN_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "aegen/align.h"
#include "aegen/base.h"
#include "aegen/detector.h"
#include "aegen/eval.h"
#include "aegen/lm.h"
#include "aegen/smt.h"

namespace aegen::oracle {

using Words = std::vector<std::string>;

// Minimum cost over every edit script, by plain recursion.
inline size_t Exhaustive(const Words &a, size_t i, const Words &b, size_t j) {
  if (i == a.size()) return b.size() - j;
  if (j == b.size()) return a.size() - i;
  size_t best = Exhaustive(a, i + 1, b, j + 1) + (a[i] == b[j] ? 0 : 1);
  best = std::min(best, Exhaustive(a, i + 1, b, j) + 1);
  best = std::min(best, Exhaustive(a, i, b, j + 1) + 1);
  return best;
}

// Textbook Wagner-Fischer table.
inline size_t TableDistance(const Words &a, const Words &b) {
  std::vector<std::vector<size_t>> d(a.size() + 1, std::vector<size_t>(b.size() + 1));
  for (size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
  }
  return d[a.size()][b.size()];
}

inline NGramLM SmallLm(uint64_t seed, int order) {
  Rng rng(seed);
  const char *vocab[] = {"a", "b", "c", "d", "e", "x", "y"};
  std::vector<Words> corpus;
  for (int i = 0; i < 300; ++i) {
    Words s;
    for (size_t k = 1 + rng.UniformInt(8); k > 0; --k) s.push_back(vocab[rng.UniformInt(7)]);
    corpus.push_back(s);
  }
  return NGramLM::Train(corpus, order);
}

struct Instance {
  Words source;
  PhraseTable table;
};

// Up to 8 source words and 20 phrase pairs.
inline Instance RandomInstance(Rng &rng) {
  const char *src_vocab[] = {"a", "b", "c", "d", "e"};
  const char *tgt_vocab[] = {"a", "b", "c", "d", "e", "x", "y"};
  Instance inst;
  for (size_t k = 1 + rng.UniformInt(8); k > 0; --k) inst.source.push_back(src_vocab[rng.UniformInt(5)]);
  size_t entries = 1 + rng.UniformInt(20);
  std::map<std::pair<Words, Words>, bool> seen;
  while (inst.table.size() < entries) {
    Words s, t;
    // Sources are often substrings of the sentence so they apply.
    if (rng.Uniform() < 0.7) {
      size_t b = rng.UniformInt(inst.source.size());
      size_t len = 1 + rng.UniformInt(std::min<size_t>(3, inst.source.size() - b));
      s.assign(inst.source.begin() + b, inst.source.begin() + b + len);
    } else {
      for (size_t k = 1 + rng.UniformInt(2); k > 0; --k) s.push_back(src_vocab[rng.UniformInt(5)]);
    }
    for (size_t k = 1 + rng.UniformInt(3); k > 0; --k) t.push_back(tgt_vocab[rng.UniformInt(7)]);
    if (seen[{s, t}]) continue;
    seen[{s, t}] = true;
    inst.table.Add(MakePhrasePair(s, t, 0.05 + 0.95 * rng.Uniform(), 0.05 + 0.95 * rng.Uniform()));
  }
  return inst;
}

// Every monotone segmentation with every applicable pair; a word with no
// single-word pair may also pass through unchanged. Keeps the best score
// per distinct output.
inline void Enumerate(const Instance &inst, const NGramLM &lm, const FeatureVector &w,
                      std::map<Words, double> &best) {
  const size_t n = inst.source.size();
  Words out;
  FeatureVector feats{};
  std::function<void(size_t)> rec = [&](size_t i) {
    if (i == n) {
      FeatureVector f = feats;
      f[kLanguageModel] = lm.SequenceLogProb(out);
      double score = Dot(w, f);
      auto it = best.find(out);
      if (it == best.end() || score > it->second) best[out] = score;
      return;
    }
    bool single = false;
    for (size_t j = i + 1; j <= n; ++j) {
      Words src(inst.source.begin() + i, inst.source.begin() + j);
      const auto *list = inst.table.Lookup(Join(src, " "));
      if (list == nullptr) continue;
      single = single || j == i + 1;
      for (const auto &p : *list) {
        FeatureVector saved = feats;
        auto pf = PhraseFeatures(p);
        for (size_t k = 0; k < kNumFeatures; ++k) feats[k] += pf[k];
        size_t mark = out.size();
        out.insert(out.end(), p.target.begin(), p.target.end());
        rec(j);
        out.resize(mark);
        feats = saved;
      }
    }
    if (!single) {
      auto p = MakePhrasePair({inst.source[i]}, {inst.source[i]}, 1.0, 1.0);
      FeatureVector saved = feats;
      auto pf = PhraseFeatures(p);
      for (size_t k = 0; k < kNumFeatures; ++k) feats[k] += pf[k];
      out.push_back(inst.source[i]);
      rec(i + 1);
      out.pop_back();
      feats = saved;
    }
  };
  rec(0);
}

inline LabeledSentence Labeled(const Words &words, const std::vector<int> &labels) {
  LabeledSentence s;
  for (size_t i = 0; i < words.size(); ++i) {
    s.tokens.push_back({words[i], "X"});
    s.labels.push_back(labels[i] ? Label::kIncorrect : Label::kCorrect);
  }
  return s;
}

// Glorot weights plus random biases, so every gradient term is exercised.
inline DetectorModel RandomModel(uint64_t seed, int e, int h, int f) {
  DetectorModel model({"a", "b", "c", "d"}, e, h, f);
  model.Initialize(seed);
  Rng rng(seed + 1000);
  for (size_t k : {kFwdB, kBwdB, kHiddenB, kOutputB}) {
    auto &m = model.params()[k];
    for (long i = 0; i < m.size(); ++i) m.data()[i] += rng.Uniform() - 0.5;
  }
  return model;
}

inline std::vector<LabeledSentence> RandomBatch(Rng &rng, size_t sentences) {
  const char *vocab[] = {"a", "b", "c", "d", "e"};
  std::vector<LabeledSentence> batch;
  for (size_t s = 0; s < sentences; ++s) {
    Words w;
    std::vector<int> l;
    for (size_t k = 1 + rng.UniformInt(5); k > 0; --k) {
      w.push_back(vocab[rng.UniformInt(5)]);
      l.push_back(static_cast<int>(rng.UniformInt(2)));
    }
    batch.push_back(Labeled(w, l));
  }
  return batch;
}

// Largest |analytic - numeric| / max(|analytic|, |numeric|, 1e-7) over all
// parameters, with central differences of step 1e-5.
inline double MaxRelativeGradientError(DetectorModel model,
                                       const std::vector<LabeledSentence> &batch) {
  ParamSet grads;
  model.LossAndGradients(batch, &grads);
  const double h = 1e-5;
  double worst = 0.0;
  for (size_t k = 0; k < kNumParams; ++k) {
    auto &m = model.params()[k];
    for (long i = 0; i < m.size(); ++i) {
      const double saved = m.data()[i];
      m.data()[i] = saved + h;
      double up = model.LossAndGradients(batch, nullptr);
      m.data()[i] = saved - h;
      double down = model.LossAndGradients(batch, nullptr);
      m.data()[i] = saved;
      double numeric = (up - down) / (2 * h);
      double analytic = grads[k].data()[i];
      double scale = std::max({std::fabs(numeric), std::fabs(analytic), 1e-7});
      worst = std::max(worst, std::fabs(numeric - analytic) / scale);
    }
  }
  return worst;
}

// Exact randomisation p: the share of all 2^n sentence swaps whose F0.5
// difference reaches the observed one.
inline double ExactPValue(const std::vector<LabeledSentence> &a,
                          const std::vector<LabeledSentence> &b,
                          const std::vector<LabeledSentence> &gold) {
  const size_t n = gold.size();
  auto f05 = [](const ConfusionCounts &c) {
    double p = c.tp + c.fp == 0 ? 0.0 : double(c.tp) / double(c.tp + c.fp);
    double r = c.tp + c.fn == 0 ? 0.0 : double(c.tp) / double(c.tp + c.fn);
    return p + r == 0.0 ? 0.0 : 1.25 * p * r / (0.25 * p + r);
  };
  auto count = [](const LabeledSentence &pred, const LabeledSentence &g, ConfusionCounts &c) {
    for (size_t i = 0; i < g.labels.size(); ++i) {
      bool pi = pred.labels[i] == Label::kIncorrect, gi = g.labels[i] == Label::kIncorrect;
      if (pi && gi) ++c.tp;
      else if (pi) ++c.fp;
      else if (gi) ++c.fn;
      else ++c.tn;
    }
  };
  double observed = 0.0;
  size_t reached = 0;
  for (size_t mask = 0; mask < (size_t{1} << n); ++mask) {
    ConfusionCounts ca, cb;
    for (size_t s = 0; s < n; ++s) {
      bool swap = (mask >> s) & 1;
      count(swap ? b[s] : a[s], gold[s], ca);
      count(swap ? a[s] : b[s], gold[s], cb);
    }
    double stat = std::fabs(f05(ca) - f05(cb));
    if (mask == 0) observed = stat;
    if (stat >= observed - 1e-12) ++reached;
  }
  return double(reached) / double(size_t{1} << n);
}

}  // namespace aegen::oracle

#endif  // AEGEN_TESTS_ORACLES_H_

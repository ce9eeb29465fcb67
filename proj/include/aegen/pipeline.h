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

// Glue for the full experiments: gold labels from annotations, the two
// error generators trained end to end, and the versions sweep.

#ifndef AEGEN_PIPELINE_H_
#define AEGEN_PIPELINE_H_

#include <span>
#include <vector>

#include "aegen/align.h"
#include "aegen/corpus.h"
#include "aegen/detector.h"
#include "aegen/inject.h"
#include "aegen/smt.h"

namespace aegen {

// Token labels of the original (learner) side of each pair.
std::vector<LabeledSentence> GoldLabels(std::span<const AnnotatedPair> pairs);

struct PatternGeneratorConfig {
  size_t threshold = 5;
  uint64_t seed = 0;
  int threads = 1;
};

// Learns patterns and background statistics from `annotated` and corrupts
// `clean` k times (seeds seed, seed+1, ...).
std::vector<std::vector<LabeledSentence>> PatternVersions(
    std::span<const AnnotatedPair> annotated, std::span<const TaggedSentence> clean,
    const PatternGeneratorConfig &config, size_t k);

struct MtGeneratorConfig {
  int lm_order = 5;
  size_t max_phrase_length = 7;
  double identity_count = 1.0;
  DecoderConfig decoder;
};

// Trains the phrase table and the language model on `annotated` and
// translates `clean` into k versions from the n-best lists.
std::vector<std::vector<LabeledSentence>> MtVersions(std::span<const AnnotatedPair> annotated,
                                                     std::span<const TaggedSentence> clean,
                                                     const MtGeneratorConfig &config, size_t k);

// base followed by the first k versions.
std::vector<LabeledSentence> CombineTraining(std::span<const LabeledSentence> base,
                                             std::span<const std::vector<LabeledSentence>> versions,
                                             size_t k);

struct VersionsRow {
  size_t versions = 0;
  double dev_f05 = 0.0;  // best dev F0.5 of the trained detector, [0, 1]
};

// For each k in order: train on base + k versions with a fixed seed and
// record the best dev F0.5.
std::vector<VersionsRow> ExperimentVersions(std::span<const LabeledSentence> base,
                                            std::span<const std::vector<LabeledSentence>> versions,
                                            std::span<const size_t> ks,
                                            std::span<const LabeledSentence> dev,
                                            const DetectorConfig &config);

}  // namespace aegen

#endif  // AEGEN_PIPELINE_H_

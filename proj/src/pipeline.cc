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

#include "aegen/pipeline.h"

#include "aegen/lm.h"
#include "aegen/patterns.h"

namespace aegen {

std::vector<LabeledSentence> GoldLabels(std::span<const AnnotatedPair> pairs) {
  std::vector<LabeledSentence> out;
  out.reserve(pairs.size());
  for (const auto &pair : pairs) {
    out.push_back(LabelFromAlignment(pair.original, AlignTokens(pair.original, pair.corrected)));
  }
  return out;
}

std::vector<std::vector<LabeledSentence>> PatternVersions(
    std::span<const AnnotatedPair> annotated, std::span<const TaggedSentence> clean,
    const PatternGeneratorConfig &config, size_t k) {
  PatternStore store = PatternStore::Build(annotated, config.threshold);
  InjectionConfig inject;
  inject.background = ComputeBackground(annotated);
  inject.seed = config.seed;
  inject.threads = config.threads;
  std::vector<std::vector<LabeledSentence>> out;
  for (const auto &records : GenerateVersions(clean, store, inject, k)) {
    out.push_back(Results(records));
  }
  return out;
}

std::vector<std::vector<LabeledSentence>> MtVersions(std::span<const AnnotatedPair> annotated,
                                                     std::span<const TaggedSentence> clean,
                                                     const MtGeneratorConfig &config, size_t k) {
  auto examples = ParallelFromPairs(annotated);
  PhraseTable table =
      PhraseTable::Extract(examples, config.max_phrase_length, config.identity_count);
  std::vector<TaggedSentence> learner;
  learner.reserve(annotated.size());
  for (const auto &pair : annotated) learner.push_back(pair.original);
  NGramLM lm = NGramLM::Train(learner, config.lm_order);
  DecoderConfig decoder = config.decoder;
  decoder.nbest = std::max(decoder.nbest, k);
  return GenerateArtificial(clean, table, lm, decoder, k);
}

std::vector<LabeledSentence> CombineTraining(std::span<const LabeledSentence> base,
                                             std::span<const std::vector<LabeledSentence>> versions,
                                             size_t k) {
  if (k > versions.size()) {
    throw Error("requested " + std::to_string(k) + " versions but only " +
                std::to_string(versions.size()) + " exist");
  }
  std::vector<LabeledSentence> out(base.begin(), base.end());
  for (size_t j = 0; j < k; ++j) out.insert(out.end(), versions[j].begin(), versions[j].end());
  return out;
}

std::vector<VersionsRow> ExperimentVersions(std::span<const LabeledSentence> base,
                                            std::span<const std::vector<LabeledSentence>> versions,
                                            std::span<const size_t> ks,
                                            std::span<const LabeledSentence> dev,
                                            const DetectorConfig &config) {
  std::vector<VersionsRow> rows;
  for (size_t k : ks) {
    auto train = CombineTraining(base, versions, k);
    TrainResult result = TrainDetector(train, dev, config);
    rows.push_back({k, result.dev_f05[static_cast<size_t>(result.best_epoch - 1)]});
  }
  return rows;
}

}  // namespace aegen

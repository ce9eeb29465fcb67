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

// A small synthetic learner-English world for end-to-end experiments.
//
// Clean sentences come from a tagged template grammar (agreement, gerunds
// after "went", prepositions before places and days, determiners). Errors
// are planted with a fixed set of 40 rewrite rules in six types, so
// annotated data, clean text and held-out sets can be produced in any
// amount without external corpora.

#ifndef AEGEN_SYNTHETIC_H_
#define AEGEN_SYNTHETIC_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "aegen/base.h"
#include "aegen/corpus.h"

namespace aegen {

// Rewrites `correct` into `incorrect` when the neighbouring tags match
// (an empty tag matches anything, including the sentence edge). Either
// side may be empty, for omissions and insertions.
struct PlantedRule {
  std::string type;
  std::vector<Token> correct;
  std::vector<Token> incorrect;
  std::string left_tag;
  std::string right_tag;
};

const std::vector<PlantedRule> &PlantedRules();

TaggedSentence GenerateCleanSentence(Rng &rng);

// Plants up to n_errors non-adjacent errors. The result is an annotated
// pair whose original side is the erroneous sentence.
AnnotatedPair PlantErrors(const TaggedSentence &clean, size_t n_errors, Rng &rng);

struct SyntheticConfig {
  uint64_t seed = 1;
  size_t train = 500;   // annotated pairs
  size_t dev = 500;
  size_t test = 1000;
  size_t clean = 5000;  // unannotated correct sentences
  double error_sentence_rate = 0.6;
  std::map<int, double> error_counts = {{1, 0.5}, {2, 0.3}, {3, 0.2}};
};

struct SyntheticWorld {
  std::vector<AnnotatedPair> train, dev, test;
  std::vector<TaggedSentence> clean;
};

SyntheticWorld BuildSyntheticWorld(const SyntheticConfig &config);

}  // namespace aegen

#endif  // AEGEN_SYNTHETIC_H_

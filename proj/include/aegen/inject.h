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

// Corrupts error-free tagged text with reversed error patterns so that the
// result follows the error statistics of a background corpus.
//
// corrupt_corpus runs in two passes. Pass 1 finds pattern matches for every
// sentence and may run on several threads. Pass 2 walks the sentences in
// order: a seeded shuffle decides which sentences stay error-free (matching
// the background's correct-sentence proportion), every other sentence draws
// an error count from the background's non-zero counts, and patterns are
// sampled one at a time among matches that do not overlap earlier picks.
//
// Sampling weight of a candidate match with pattern p of type t:
//
//   count(p) * max(0.01, target(t) - realized(t) + floor)
//
// where target(t) is the background type frequency and realized(t) the
// running type frequency over all errors injected so far in the corpus.
//
// Every random draw for sentence i comes from Rng(DeriveSeed(seed, i)), and
// the untouched-set shuffle from Rng(DeriveSeed(seed, kShuffleStream)), so
// the output depends only on the seed, the corpus and the store.

#ifndef AEGEN_INJECT_H_
#define AEGEN_INJECT_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "aegen/align.h"
#include "aegen/base.h"
#include "aegen/corpus.h"
#include "aegen/patterns.h"

namespace aegen {

struct InjectionConfig {
  ErrorCountDistribution background;
  uint64_t seed = 0;
  size_t max_attempts = 64;  // sampling rounds per sentence
  double type_floor = 0.01;
  int threads = 1;

  void Validate() const;
};

struct InjectionRecord {
  std::string sentence_id;
  size_t requested = 0;
  std::vector<PatternMatch> applied;
  LabeledSentence result;

  bool exhausted() const { return applied.size() < requested; }
};

// Running error-type quota shared by the sentences of one corpus.
class TypeBalancer {
 public:
  TypeBalancer(std::map<std::string, double> targets, double floor);

  double Factor(const std::string &type) const;
  void Record(const std::string &type);

  const std::map<std::string, size_t> &realized() const { return realized_; }
  size_t total() const { return total_; }

 private:
  std::map<std::string, double> targets_;
  std::map<std::string, size_t> realized_;
  size_t total_ = 0;
  double floor_;
};

// Draws from the full per-sentence error-count distribution.
int SampleErrorCount(const ErrorCountDistribution &dist, Rng &rng);
// Draws from the distribution restricted to counts >= 1; 0 if it has no
// such mass.
int SampleNonzeroErrorCount(const ErrorCountDistribution &dist, Rng &rng);

// Applies up to n_errors patterns to `sentence`. Stops early ("exhausted")
// when no non-overlapping match is left.
InjectionRecord CorruptSentence(const TaggedSentence &sentence,
                                const PatternStore &store, size_t n_errors,
                                TypeBalancer &quota, Rng &rng,
                                size_t max_attempts = 64);
// Same, with the sentence's matches precomputed by store.Match().
InjectionRecord CorruptSentence(const TaggedSentence &sentence,
                                const PatternStore &store,
                                std::span<const PatternMatch> matches,
                                size_t n_errors, TypeBalancer &quota, Rng &rng,
                                size_t max_attempts = 64);

std::vector<InjectionRecord> CorruptCorpus(std::span<const TaggedSentence> corpus,
                                           const PatternStore &store,
                                           const InjectionConfig &config);

// k corruptions using seeds seed, seed+1, ..., seed+k-1.
std::vector<std::vector<InjectionRecord>> GenerateVersions(
    std::span<const TaggedSentence> corpus, const PatternStore &store,
    const InjectionConfig &config, size_t k);

std::vector<LabeledSentence> Results(std::span<const InjectionRecord> records);

// One JSON record per sentence: id, requested count, applied patterns.
std::string SerializeAuditLog(std::span<const InjectionRecord> records,
                              const PatternStore &store);

}  // namespace aegen

#endif  // AEGEN_INJECT_H_

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

// Phrase-based "translation" from correct text into text with errors.
//
// Training pairs run from corrected sentences (source) to the learner's
// original sentences (target). Phrase pairs are the blocks consistent with
// the token alignment produced by AlignTokens; every phrase pair carries
//
//   log p(t|s), log p(s|t)   relative frequencies over extracted blocks
//   levenshtein              character edit distance of the joined sides
//   word penalty             number of target words
//   phrase penalty           1
//
// and a derivation adds the language-model log probability of the output.
// The score of a derivation is the dot product of its summed features with
// the decoder weights, so a negative levenshtein weight favours small edits.
//
// Decoding is monotone. Hypotheses are grouped in stacks by the number of
// source tokens covered, recombined on (coverage, last order-1 output
// words) and pruned to the beam width. Recombined hypotheses are kept as
// extra arcs of the surviving one, so the search graph also yields the
// n-best list.

#ifndef AEGEN_SMT_H_
#define AEGEN_SMT_H_

#include <array>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aegen/align.h"
#include "aegen/corpus.h"
#include "aegen/lm.h"

namespace aegen {

// Character (code point) edit distance.
int CharLevenshtein(std::string_view a, std::string_view b);

struct PhrasePair {
  std::vector<std::string> source;  // corrected side
  std::vector<std::string> target;  // erroneous side
  double p_target_given_source = 1.0;
  double p_source_given_target = 1.0;
  int levenshtein = 0;

  bool operator==(const PhrasePair &other) const = default;
};

PhrasePair MakePhrasePair(std::vector<std::string> source,
                          std::vector<std::string> target, double p_tgs,
                          double p_sgt);

struct ParallelExample {
  std::vector<std::string> source;
  std::vector<std::string> target;
  EditScript script;  // AlignTokens(source, target)
};

std::vector<ParallelExample> ParallelFromPairs(std::span<const AnnotatedPair> pairs);

class PhraseTable {
 public:
  PhraseTable() = default;

  // Extracts alignment-consistent phrase pairs up to max_len tokens per
  // side. Every source word whose identity pair was not extracted gets one
  // with count identity_count, so any training word can pass through.
  static PhraseTable Extract(std::span<const ParallelExample> examples,
                             size_t max_len = 7, double identity_count = 1.0);

  void Add(PhrasePair pair);

  // Pairs for a space-joined source phrase, best p(t|s) first.
  const std::vector<PhrasePair> *Lookup(const std::string &source) const;
  size_t max_length() const { return max_length_; }
  size_t size() const;
  const std::map<std::string, std::vector<PhrasePair>> &entries() const { return entries_; }

  // Keeps the `limit` most probable targets per source phrase.
  void Prune(size_t limit);

  // One pair per line: "source ||| target ||| p(t|s) p(s|t) lev ||| "
  std::string Serialize() const;
  static PhraseTable Parse(std::string_view text);

 private:
  std::map<std::string, std::vector<PhrasePair>> entries_;
  size_t max_length_ = 0;
};

enum Feature : size_t {
  kLanguageModel = 0,
  kTargetGivenSource,
  kSourceGivenTarget,
  kLevenshtein,
  kWordPenalty,
  kPhrasePenalty,
  kNumFeatures
};
using FeatureVector = std::array<double, kNumFeatures>;

inline constexpr FeatureVector kDefaultWeights = {0.5, 0.2, 0.2, -0.1, -1.0, -1.0};

struct DecoderConfig {
  FeatureVector weights = kDefaultWeights;
  size_t beam_width = 100;
  size_t nbest = 1;
  int threads = 1;

  void Validate() const;
};

struct Segment {
  Span source;
  PhrasePair pair;
};

struct Derivation {
  std::vector<std::string> output;
  std::vector<Segment> segmentation;
  FeatureVector features{};
  double score = 0.0;
};

double Dot(const FeatureVector &weights, const FeatureVector &features);

// Feature values of one phrase application, without the LM term.
FeatureVector PhraseFeatures(const PhrasePair &pair);

// Up to config.nbest derivations with distinct outputs, best first. May
// return fewer when the search space has fewer distinct outputs.
std::vector<Derivation> Decode(std::span<const std::string> source,
                               const PhraseTable &table, const NGramLM &lm,
                               const DecoderConfig &config);

std::vector<std::vector<Derivation>> DecodeCorpus(
    std::span<const TaggedSentence> corpus, const PhraseTable &table,
    const NGramLM &lm, const DecoderConfig &config);

// Labels a decoded output against its source: the output is aligned to the
// source and labeled with LabelFromAlignment. Output tokens matching a
// source token take its tag; others get kUntagged.
LabeledSentence LabelOutput(const TaggedSentence &source,
                            std::span<const std::string> output);

// Version j (0-based) takes the (j+1)-th best output of every sentence,
// or the best one when the list is shorter.
std::vector<std::vector<LabeledSentence>> ArtificialFromNBest(
    std::span<const TaggedSentence> corpus,
    std::span<const std::vector<Derivation>> nbest, size_t k);

std::vector<std::vector<LabeledSentence>> GenerateArtificial(
    std::span<const TaggedSentence> corpus, const PhraseTable &table,
    const NGramLM &lm, const DecoderConfig &config, size_t k);

// "sent_id ||| output ||| f1 .. f6 ||| total" per derivation; features in
// Feature order.
std::string SerializeNBest(std::span<const TaggedSentence> corpus,
                           std::span<const std::vector<Derivation>> nbest);

// Picks the weight vector whose 1-best outputs are closest (mean word edit
// distance) to the reference targets.
FeatureVector GridSearchWeights(std::span<const ParallelExample> dev,
                                const PhraseTable &table, const NGramLM &lm,
                                const DecoderConfig &base,
                                std::span<const FeatureVector> candidates);

}  // namespace aegen

#endif  // AEGEN_SMT_H_

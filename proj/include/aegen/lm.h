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

// Interpolated modified Kneser-Ney n-gram language model.
//
// Sentences are padded as <s> w1 ... wn </s>. For order n the adjusted
// count a(g) of an n-gram g is its raw count when n is the model order or g
// starts with <s>, and otherwise the number of distinct words seen directly
// to its left. From the count-of-counts n1..n4 of the adjusted counts:
//
//   Y  = n1 / (n1 + 2 n2)
//   D1 = 1 - 2Y n2/n1,  D2 = 2 - 3Y n3/n2,  D3+ = 3 - 4Y n4/n3
//
// and the probabilities interpolate down to a uniform distribution over
// the vocabulary (including </s> and <unk>, excluding <s>):
//
//   p(w|h) = max(a(hw) - D(a(hw)), 0) / S(h) + gamma(h) p(w|h')
//   gamma(h) = (D1 N1(h.) + D2 N2(h.) + D3+ N3+(h.)) / S(h)
//
// with S(h) the summed adjusted counts after h and h' = h minus its first
// word. A discount level whose statistics are missing (some nk = 0) or
// that falls outside (0, k] uses 0.75 and records a warning.
//
// The trained model is held in backoff form, which represents the
// interpolated model exactly: seen n-grams store their full probability,
// contexts store gamma as backoff weight. This is also the ARPA layout.

#ifndef AEGEN_LM_H_
#define AEGEN_LM_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "aegen/corpus.h"

namespace aegen {

using WordId = uint32_t;

inline constexpr std::string_view kSentenceStart = "<s>";
inline constexpr std::string_view kSentenceEnd = "</s>";
inline constexpr std::string_view kUnknownWord = "<unk>";

class NGramLM {
 public:
  static NGramLM Train(std::span<const std::vector<std::string>> sentences,
                       int order = 5);
  static NGramLM Train(std::span<const TaggedSentence> sentences, int order = 5);

  // Natural-log probability of `word` after `context` (oldest word first;
  // only the last order-1 words are used). Unknown words map to <unk>.
  double LogProb(std::string_view word, std::span<const std::string> context) const;
  double LogProb(WordId word, std::span<const WordId> context) const;

  // Sum of LogProb over the words and </s>, starting from <s>.
  double SequenceLogProb(std::span<const std::string> words) const;

  WordId Id(std::string_view word) const;  // <unk> when unknown
  const std::string &Word(WordId id) const { return words_.at(id); }
  WordId start_id() const { return bos_; }
  WordId end_id() const { return eos_; }
  WordId unknown_id() const { return unk_; }
  // Words that can be predicted: everything but <s>.
  std::vector<WordId> PredictableWords() const;

  int order() const { return order_; }
  size_t NGramCount(int n) const { return tables_.at(n - 1).size(); }
  // {D1, D2, D3+} used for order n; empty for models read from ARPA.
  std::array<double, 3> discounts(int n) const { return discounts_.at(n - 1); }
  const std::vector<std::string> &warnings() const { return warnings_; }

  std::string ToArpa() const;
  static NGramLM FromArpa(std::string_view text);

 private:
  using NGram = std::vector<WordId>;
  struct NGramHash {
    size_t operator()(const NGram &g) const;
  };
  struct Entry {
    double log10_prob = 0.0;
    double log10_backoff = 0.0;
    bool has_backoff = false;
  };
  using Table = std::unordered_map<NGram, Entry, NGramHash>;

  WordId Intern(std::string_view word);
  double Log10Prob(WordId word, std::span<const WordId> context) const;

  int order_ = 0;
  std::vector<std::string> words_;
  std::unordered_map<std::string, WordId> ids_;
  WordId bos_ = 0, eos_ = 0, unk_ = 0;
  std::vector<Table> tables_;  // tables_[n-1] holds the n-grams
  std::vector<std::array<double, 3>> discounts_;
  std::vector<std::string> warnings_;
};

}  // namespace aegen

#endif  // AEGEN_LM_H_

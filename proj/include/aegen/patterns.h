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

// Error patterns: (incorrect phrase, correct phrase) pairs over word forms
// and POS tags, learned from annotated corrections and applied in reverse
// to error-free text.
//
// A pattern covers one maximal run of non-matching alignment steps plus at
// most one token of context on each side. Tokens whose form changed are
// kept as word forms (surface + tag); context tokens are kept as tags only.
// Written in the usual notation, "We went shop on Saturday" corrected to
// "We went shopping on Saturday" gives
//
//   (VVD shop_VV0 II, VVD shopping_VVG II)

#ifndef AEGEN_PATTERNS_H_
#define AEGEN_PATTERNS_H_

#include <compare>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "aegen/align.h"
#include "aegen/corpus.h"

namespace aegen {

// Type assigned when no annotated edit overlaps an alignment run.
inline constexpr std::string_view kUnknownErrorType = "UNK";

// A word form (surface + tag) or, when surface is empty, a bare tag.
struct PatternItem {
  std::string pos;
  std::string surface;

  static PatternItem Tag(std::string pos) { return {std::move(pos), {}}; }
  static PatternItem Word(const Token &t) { return {t.pos, t.surface}; }

  bool is_word() const { return !surface.empty(); }
  bool Matches(const Token &token) const {
    return token.pos == pos && (surface.empty() || token.surface == surface);
  }
  std::string ToString() const { return is_word() ? surface + "_" + pos : pos; }

  auto operator<=>(const PatternItem &other) const = default;
};

struct ErrorPattern {
  std::vector<PatternItem> incorrect;
  std::vector<PatternItem> correct;
  // Whether the first / last item of both sides is a context item.
  bool left_context = false;
  bool right_context = false;
  std::string type;
  size_t count = 1;

  size_t context_size() const { return (left_context ? 1 : 0) + (right_context ? 1 : 0); }
  // In-span items, i.e. the sides without their context.
  std::span<const PatternItem> IncorrectCore() const;
  std::span<const PatternItem> CorrectCore() const;

  // "(VVD shop_VV0 II, VVD shopping_VVG II)"
  std::string ToString() const;

  // Identity used for aggregation; ignores count.
  bool SameRule(const ErrorPattern &other) const;
};

// One pattern per maximal run of non-Match ops in `script`, which must
// align pair.original to pair.corrected.
std::vector<ErrorPattern> ExtractPatterns(const AnnotatedPair &pair,
                                          const EditScript &script);

struct PatternMatch {
  size_t pattern = 0;   // index into PatternStore::patterns()
  size_t position = 0;  // sentence index of the first correct-side item

  bool operator==(const PatternMatch &other) const = default;
};

// Frequency-filtered, immutable collection of patterns indexed for
// correct-side lookup.
class PatternStore {
 public:
  PatternStore() = default;

  // Aggregates patterns from every pair (aligned with AlignTokens when no
  // scripts are given) and keeps those seen at least `threshold` times.
  static PatternStore Build(std::span<const AnnotatedPair> pairs,
                            std::span<const EditScript> scripts,
                            size_t threshold = 5);
  static PatternStore Build(std::span<const AnnotatedPair> pairs,
                            size_t threshold = 5);
  // Builds directly from already aggregated patterns.
  static PatternStore FromPatterns(std::vector<ErrorPattern> patterns,
                                   size_t threshold);

  // Every (pattern, position) whose correct side matches the sentence.
  // Matches may overlap. Ordered by position, then pattern index.
  std::vector<PatternMatch> Match(const TaggedSentence &sentence) const;

  // Sorted by correct side, then type, then incorrect side.
  const std::vector<ErrorPattern> &patterns() const { return patterns_; }
  // Patterns sharing a correct side, as indices into patterns().
  const std::vector<size_t> *WithCorrectSide(
      const std::vector<PatternItem> &correct) const;
  const std::map<std::string, size_t> &type_counts() const { return type_counts_; }
  size_t threshold() const { return threshold_; }
  size_t size() const { return patterns_.size(); }
  bool empty() const { return patterns_.empty(); }

  // Line-delimited JSON: a header record (format, threshold and optional
  // background statistics) followed by one pattern per line.
  std::string Serialize(const ErrorCountDistribution *background = nullptr) const;
  static PatternStore Parse(std::string_view text,
                            std::optional<ErrorCountDistribution> *background = nullptr);

 private:
  void Index();

  std::vector<ErrorPattern> patterns_;
  std::map<std::vector<PatternItem>, std::vector<size_t>> by_correct_;
  std::unordered_map<std::string, std::vector<size_t>> by_first_tag_;
  std::map<std::string, size_t> type_counts_;
  size_t threshold_ = 1;
};

// Applies non-overlapping matches to `sentence` in reverse (correct side
// replaced by incorrect side). In-span tokens of the incorrect side are
// labeled incorrect; a pattern whose incorrect core is empty (a word goes
// missing) marks the token that follows the gap, or the last token when the
// gap is sentence-final.
LabeledSentence ApplyReversed(const TaggedSentence &sentence,
                              const PatternStore &store,
                              std::span<const PatternMatch> matches);

}  // namespace aegen

#endif  // AEGEN_PATTERNS_H_

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

#ifndef AEGEN_ALIGN_H_
#define AEGEN_ALIGN_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aegen/corpus.h"

namespace aegen {

enum class EditKind { kMatch, kSubstitute, kInsert, kDelete };

// One step of a token alignment from sentence A (original) to B (corrected).
// Insert means a B token with no A counterpart; Delete an A token with no B
// counterpart.
struct EditOp {
  EditKind kind = EditKind::kMatch;
  std::optional<size_t> orig_index;
  std::optional<size_t> corr_index;

  bool operator==(const EditOp &other) const = default;
};

struct EditScript {
  std::vector<EditOp> ops;
  size_t cost = 0;

  bool operator==(const EditScript &other) const = default;
};

// Minimal word-level Levenshtein alignment with unit costs. Surfaces are
// compared case-sensitively; tags are ignored. Among optimal scripts the
// canonical one is chosen by preferring, at each step from the left,
// match/substitute, then delete, then insert.
EditScript AlignTokens(std::span<const std::string> a,
                       std::span<const std::string> b);
EditScript AlignTokens(const TaggedSentence &a, const TaggedSentence &b);

// Replays the script on `a`, producing `b`'s surfaces. `b` supplies the
// tokens for Substitute and Insert steps.
std::vector<std::string> Replay(const EditScript &script,
                                std::span<const std::string> a,
                                std::span<const std::string> b);

enum class Label : unsigned char { kCorrect = 0, kIncorrect = 1 };

struct LabeledSentence {
  std::vector<Token> tokens;
  std::vector<Label> labels;

  size_t size() const { return tokens.size(); }
  size_t CountIncorrect() const;
  bool operator==(const LabeledSentence &other) const = default;
};

LabeledSentence AllCorrect(const TaggedSentence &sentence);

// Labels the original's tokens from a script aligning it to its correction.
// Substituted and deleted tokens are incorrect. A missing word (Insert)
// marks the original token that follows the insertion point, or the last
// token when the insertion is sentence-final.
LabeledSentence LabelFromAlignment(const TaggedSentence &original,
                                   const EditScript &script);

// Labeled TSV: surface<TAB>pos<TAB>{c|i}, blank line between sentences.
std::string SerializeLabeled(std::span<const LabeledSentence> sentences);
// Accepts 3-column labeled rows; 2-column rows are read as all correct.
std::vector<LabeledSentence> ParseLabeled(std::string_view text);

}  // namespace aegen

#endif  // AEGEN_ALIGN_H_

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

// Corpus types and the text formats they are read from and written to.
//
// Inputs arrive tokenized and tagged. Two formats are supported:
//
//   M2 (learner corpora with annotated corrections):
//     S He go home
//     A 1 2|||Verb|||goes|||REQUIRED|||-NONE-|||0
//     <blank line>
//
//   Tagged TSV (one token per line, blank line between sentences):
//     We<TAB>PPIS2
//     went<TAB>VVD
//
// M2 carries no POS tags; tokens read from it get the placeholder tag
// kUntagged until AttachTags() copies tags from sidecar TSV files.

#ifndef AEGEN_CORPUS_H_
#define AEGEN_CORPUS_H_

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace aegen {

inline constexpr std::string_view kUntagged = "_";

struct Token {
  std::string surface;
  std::string pos;

  bool operator==(const Token &other) const = default;
};

// Throws Error if the surface or tag is empty or contains whitespace,
// control bytes or invalid UTF-8.
void ValidateToken(const Token &token);

struct TaggedSentence {
  std::string id;
  std::vector<Token> tokens;

  size_t size() const { return tokens.size(); }
  bool operator==(const TaggedSentence &other) const = default;
};

std::vector<std::string> Surfaces(const TaggedSentence &sentence);

// Half-open token interval [begin, end).
struct Span {
  size_t begin = 0;
  size_t end = 0;

  size_t size() const { return end - begin; }
  bool empty() const { return begin == end; }
  bool operator==(const Span &other) const = default;
};

// One annotated correction: original[original) is replaced by the
// `replacement` surfaces, which occupy corrected[corrected].
struct Edit {
  Span original;
  Span corrected;
  std::string type;
  std::vector<std::string> replacement;

  bool operator==(const Edit &other) const = default;
};

struct AnnotatedPair {
  TaggedSentence original;
  TaggedSentence corrected;
  std::vector<Edit> edits;

  bool operator==(const AnnotatedPair &other) const = default;
};

// Parses an M2 stream, keeping annotator 0. Edits are sorted by position
// and the corrected sentence is rebuilt from them. Throws ParseError for
// malformed lines and Error naming the stanza for inconsistent spans.
std::vector<AnnotatedPair> ParseM2(std::string_view text);
std::string SerializeM2(std::span<const AnnotatedPair> pairs);

// Surfaces obtained by applying every edit to `original`, right to left.
std::vector<std::string> ApplyEdits(const TaggedSentence &original,
                                    std::span<const Edit> edits);

// Parses tagged TSV. Sentence ids are their 0-based index.
std::vector<TaggedSentence> ParseTagged(std::string_view text);
std::string SerializeTagged(std::span<const TaggedSentence> sentences);

// Copies POS tags from sidecar tagged sentences onto M2 pairs. Sidecars are
// matched to pairs by sentence id and must agree on surfaces.
void AttachTags(std::vector<AnnotatedPair> &pairs,
                std::span<const TaggedSentence> original_tags,
                std::span<const TaggedSentence> corrected_tags);

// Rows of a whitespace-free column file, grouped into blank-line separated
// stanzas. Every row must have between min_fields and max_fields fields.
struct ColumnRow {
  std::vector<std::string> fields;
  int line = 0;
};
std::vector<std::vector<ColumnRow>> ParseColumnStanzas(std::string_view text,
                                                       size_t min_fields,
                                                       size_t max_fields);

// Error statistics of a background (annotated) corpus.
struct ErrorCountDistribution {
  std::map<int, double> count_probs;        // edits per sentence -> P
  double correct_proportion = 0.0;          // P(sentence has no edits)
  std::map<std::string, double> type_probs;  // error type -> P

  // Throws Error unless every mapping is a distribution within 1e-9.
  void Validate() const;
  bool operator==(const ErrorCountDistribution &other) const = default;
};

ErrorCountDistribution ComputeBackground(std::span<const AnnotatedPair> pairs);

nlohmann::json BackgroundToJson(const ErrorCountDistribution &dist);
ErrorCountDistribution BackgroundFromJson(const nlohmann::json &json);

// Line-delimited export: one JSON record per line.
//   {"count":1,"p":0.25}
//   {"correct_proportion":0.5}
//   {"type":"Det","p":0.5}
std::string SerializeBackground(const ErrorCountDistribution &dist);
ErrorCountDistribution ParseBackground(std::string_view text);

}  // namespace aegen

#endif  // AEGEN_CORPUS_H_

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

#include "aegen/corpus.h"

#include <algorithm>
#include <cmath>

#include "aegen/base.h"

namespace aegen {
namespace {

bool ValidUtf8(std::string_view s) {
  size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    size_t extra;
    if (c < 0x80) {
      extra = 0;
    } else if ((c & 0xE0) == 0xC0 && c >= 0xC2) {
      extra = 1;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
    } else if ((c & 0xF8) == 0xF0 && c <= 0xF4) {
      extra = 3;
    } else {
      return false;
    }
    if (i + extra >= s.size() && extra > 0) return false;
    for (size_t k = 1; k <= extra; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) return false;
    }
    i += extra + 1;
  }
  return true;
}

bool CleanField(std::string_view s) {
  if (s.empty()) return false;
  for (char ch : s) {
    auto c = static_cast<unsigned char>(ch);
    if (c <= 0x20 || c == 0x7F) return false;
  }
  return ValidUtf8(s);
}

std::string_view StripCr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

std::string StanzaName(size_t index, int line) {
  return "stanza " + std::to_string(index) + " (line " + std::to_string(line) +
         ")";
}

// Accumulates one M2 stanza while parsing.
struct M2Stanza {
  std::vector<std::string> words;
  std::vector<Edit> edits;
  int line = 0;
};

AnnotatedPair FinishStanza(M2Stanza &stanza, size_t index) {
  const std::string name = StanzaName(index, stanza.line);
  if (stanza.words.empty()) throw Error(name + ": empty sentence");

  AnnotatedPair pair;
  pair.original.id = std::to_string(index);
  for (auto &w : stanza.words) {
    Token token{w, std::string(kUntagged)};
    try {
      ValidateToken(token);
    } catch (const Error &e) {
      throw Error(name + ": " + e.what());
    }
    pair.original.tokens.push_back(std::move(token));
  }

  const size_t n = stanza.words.size();
  std::stable_sort(stanza.edits.begin(), stanza.edits.end(),
                   [](const Edit &a, const Edit &b) {
                     return a.original.begin < b.original.begin ||
                            (a.original.begin == b.original.begin &&
                             a.original.end < b.original.end);
                   });
  for (size_t i = 0; i < stanza.edits.size(); ++i) {
    const Span &span = stanza.edits[i].original;
    if (span.begin > span.end || span.end > n) {
      throw Error(name + ": edit span " + std::to_string(span.begin) + " " +
                  std::to_string(span.end) + " out of range for " +
                  std::to_string(n) + " tokens");
    }
    if (i > 0 && stanza.edits[i - 1].original.end > span.begin) {
      throw Error(name + ": overlapping edits at token " +
                  std::to_string(span.begin));
    }
  }

  long offset = 0;
  for (auto &edit : stanza.edits) {
    edit.corrected.begin = static_cast<size_t>(static_cast<long>(edit.original.begin) + offset);
    edit.corrected.end = edit.corrected.begin + edit.replacement.size();
    offset += static_cast<long>(edit.replacement.size()) -
              static_cast<long>(edit.original.size());
  }

  pair.corrected.id = pair.original.id;
  for (auto &w : ApplyEdits(pair.original, stanza.edits)) {
    Token token{std::move(w), std::string(kUntagged)};
    try {
      ValidateToken(token);
    } catch (const Error &e) {
      throw Error(name + ": replacement " + e.what());
    }
    pair.corrected.tokens.push_back(std::move(token));
  }
  if (pair.corrected.tokens.empty()) {
    throw Error(name + ": corrected sentence is empty");
  }
  pair.edits = std::move(stanza.edits);
  return pair;
}

Edit ParseEditLine(std::string_view body, int line, int *annotator) {
  // body: "start end|||type|||replacement|||required|||comment|||annotator"
  std::vector<std::string_view> fields;
  size_t start = 0;
  for (;;) {
    size_t pos = body.find("|||", start);
    if (pos == std::string_view::npos) {
      fields.push_back(body.substr(start));
      break;
    }
    fields.push_back(body.substr(start, pos - start));
    start = pos + 3;
  }
  if (fields.size() < 3) {
    throw ParseError("edit line needs at least 3 '|||' fields", line);
  }
  auto span = SplitWhitespace(fields[0]);
  if (span.size() != 2) throw ParseError("edit span must be 'start end'", line);
  long begin = ParseInt(span[0], line);
  long end = ParseInt(span[1], line);
  *annotator = fields.size() >= 6 ? static_cast<int>(ParseInt(fields[5], line)) : 0;

  Edit edit;
  edit.type = std::string(fields[1]);
  if (begin == -1 && end == -1) {
    edit.type = "noop";
    return edit;
  }
  if (begin < 0 || end < 0) throw ParseError("negative edit span", line);
  edit.original = {static_cast<size_t>(begin), static_cast<size_t>(end)};
  if (fields[2] != "-NONE-") {
    for (auto w : SplitWhitespace(fields[2])) edit.replacement.emplace_back(w);
  }
  return edit;
}

}  // namespace

void ValidateToken(const Token &token) {
  if (!CleanField(token.surface)) {
    throw Error("invalid token surface '" + token.surface + "'");
  }
  if (!CleanField(token.pos)) {
    throw Error("invalid POS tag '" + token.pos + "' on '" + token.surface + "'");
  }
}

std::vector<std::string> Surfaces(const TaggedSentence &sentence) {
  std::vector<std::string> out;
  out.reserve(sentence.size());
  for (const auto &t : sentence.tokens) out.push_back(t.surface);
  return out;
}

std::vector<AnnotatedPair> ParseM2(std::string_view text) {
  std::vector<AnnotatedPair> pairs;
  M2Stanza stanza;
  bool open = false;
  int line_no = 0;
  auto flush = [&] {
    if (open) pairs.push_back(FinishStanza(stanza, pairs.size()));
    stanza = M2Stanza();
    open = false;
  };

  for (auto raw : Split(text, '\n')) {
    ++line_no;
    std::string_view line = StripCr(raw);
    if (line.empty()) {
      flush();
      continue;
    }
    if (line[0] == 'S' && (line.size() == 1 || line[1] == ' ')) {
      if (open) throw ParseError("'S' line inside a stanza; missing blank line", line_no);
      open = true;
      stanza.line = line_no;
      for (auto w : SplitWhitespace(line.substr(1))) stanza.words.emplace_back(w);
    } else if (line[0] == 'A' && line.size() > 1 && line[1] == ' ') {
      if (!open) throw ParseError("'A' line before any 'S' line", line_no);
      int annotator = 0;
      Edit edit = ParseEditLine(line.substr(2), line_no, &annotator);
      if (annotator != 0 || edit.type == "noop") continue;
      stanza.edits.push_back(std::move(edit));
    } else {
      throw ParseError("expected a line starting with 'S ' or 'A '", line_no);
    }
  }
  flush();
  return pairs;
}

std::string SerializeM2(std::span<const AnnotatedPair> pairs) {
  std::string out;
  for (const auto &pair : pairs) {
    out += "S";
    for (const auto &t : pair.original.tokens) {
      out += ' ';
      out += t.surface;
    }
    out += '\n';
    for (const auto &e : pair.edits) {
      out += "A " + std::to_string(e.original.begin) + " " +
             std::to_string(e.original.end) + "|||" + e.type + "|||" +
             Join(e.replacement, " ") + "|||REQUIRED|||-NONE-|||0\n";
    }
    out += '\n';
  }
  return out;
}

std::vector<std::string> ApplyEdits(const TaggedSentence &original,
                                    std::span<const Edit> edits) {
  std::vector<std::string> words = Surfaces(original);
  for (auto it = edits.rbegin(); it != edits.rend(); ++it) {
    if (it->original.end > words.size() || it->original.begin > it->original.end) {
      throw Error("edit span out of range in sentence " + original.id);
    }
    words.erase(words.begin() + static_cast<long>(it->original.begin),
                words.begin() + static_cast<long>(it->original.end));
    words.insert(words.begin() + static_cast<long>(it->original.begin),
                 it->replacement.begin(), it->replacement.end());
  }
  return words;
}

std::vector<std::vector<ColumnRow>> ParseColumnStanzas(std::string_view text,
                                                       size_t min_fields,
                                                       size_t max_fields) {
  std::vector<std::vector<ColumnRow>> stanzas;
  std::vector<ColumnRow> current;
  int line_no = 0;
  for (auto raw : Split(text, '\n')) {
    ++line_no;
    std::string_view line = StripCr(raw);
    if (line.empty()) {
      if (!current.empty()) stanzas.push_back(std::move(current));
      current.clear();
      continue;
    }
    auto fields = Split(line, '\t');
    if (fields.size() < min_fields || fields.size() > max_fields) {
      throw ParseError("expected " + std::to_string(min_fields) +
                           (min_fields == max_fields
                                ? ""
                                : "-" + std::to_string(max_fields)) +
                           " tab-separated fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    ColumnRow row;
    row.line = line_no;
    for (auto f : fields) row.fields.emplace_back(f);
    current.push_back(std::move(row));
  }
  if (!current.empty()) stanzas.push_back(std::move(current));
  return stanzas;
}

std::vector<TaggedSentence> ParseTagged(std::string_view text) {
  std::vector<TaggedSentence> sentences;
  for (auto &stanza : ParseColumnStanzas(text, 2, 2)) {
    TaggedSentence sentence;
    sentence.id = std::to_string(sentences.size());
    for (auto &row : stanza) {
      Token token{std::move(row.fields[0]), std::move(row.fields[1])};
      try {
        ValidateToken(token);
      } catch (const Error &e) {
        throw ParseError(e.what(), row.line);
      }
      sentence.tokens.push_back(std::move(token));
    }
    sentences.push_back(std::move(sentence));
  }
  return sentences;
}

std::string SerializeTagged(std::span<const TaggedSentence> sentences) {
  std::string out;
  for (const auto &s : sentences) {
    for (const auto &t : s.tokens) out += t.surface + "\t" + t.pos + "\n";
    out += '\n';
  }
  return out;
}

void AttachTags(std::vector<AnnotatedPair> &pairs,
                std::span<const TaggedSentence> original_tags,
                std::span<const TaggedSentence> corrected_tags) {
  std::map<std::string, const TaggedSentence *> orig_by_id, corr_by_id;
  for (const auto &s : original_tags) orig_by_id[s.id] = &s;
  for (const auto &s : corrected_tags) corr_by_id[s.id] = &s;

  auto attach = [](TaggedSentence &target,
                   const std::map<std::string, const TaggedSentence *> &by_id,
                   const char *side) {
    auto it = by_id.find(target.id);
    if (it == by_id.end()) {
      throw Error(std::string("no ") + side + " tags for sentence " + target.id);
    }
    const TaggedSentence &tags = *it->second;
    if (tags.size() != target.size()) {
      throw Error(std::string(side) + " tags for sentence " + target.id +
                  " have " + std::to_string(tags.size()) + " tokens, expected " +
                  std::to_string(target.size()));
    }
    for (size_t i = 0; i < tags.size(); ++i) {
      if (tags.tokens[i].surface != target.tokens[i].surface) {
        throw Error(std::string(side) + " tags for sentence " + target.id +
                    " disagree at token " + std::to_string(i) + ": '" +
                    tags.tokens[i].surface + "' vs '" +
                    target.tokens[i].surface + "'");
      }
      target.tokens[i].pos = tags.tokens[i].pos;
    }
  };

  for (auto &pair : pairs) {
    attach(pair.original, orig_by_id, "original");
    attach(pair.corrected, corr_by_id, "corrected");
  }
}

void ErrorCountDistribution::Validate() const {
  auto check = [](double total, const char *what) {
    if (std::abs(total - 1.0) > 1e-9) {
      throw Error(std::string(what) + " probabilities sum to " +
                  FormatDouble(total));
    }
  };
  double total = 0.0;
  for (auto [count, p] : count_probs) {
    if (count < 0 || !(p >= 0.0)) throw Error("invalid error-count probability");
    total += p;
  }
  check(total, "error-count");
  if (!(correct_proportion >= 0.0 && correct_proportion <= 1.0)) {
    throw Error("correct proportion outside [0, 1]");
  }
  if (!type_probs.empty()) {
    total = 0.0;
    for (const auto &[type, p] : type_probs) {
      if (!(p >= 0.0)) throw Error("invalid error-type probability for " + type);
      total += p;
    }
    check(total, "error-type");
  }
}

ErrorCountDistribution ComputeBackground(std::span<const AnnotatedPair> pairs) {
  if (pairs.empty()) throw Error("background corpus is empty");
  std::map<int, size_t> counts;
  std::map<std::string, size_t> types;
  size_t total_edits = 0;
  for (const auto &pair : pairs) {
    ++counts[static_cast<int>(pair.edits.size())];
    for (const auto &e : pair.edits) ++types[e.type];
    total_edits += pair.edits.size();
  }
  ErrorCountDistribution dist;
  const double n = static_cast<double>(pairs.size());
  for (auto [count, freq] : counts) dist.count_probs[count] = static_cast<double>(freq) / n;
  dist.correct_proportion = counts.count(0) ? static_cast<double>(counts[0]) / n : 0.0;
  for (const auto &[type, freq] : types) {
    dist.type_probs[type] = static_cast<double>(freq) / static_cast<double>(total_edits);
  }
  return dist;
}

nlohmann::json BackgroundToJson(const ErrorCountDistribution &dist) {
  nlohmann::json counts = nlohmann::json::object();
  for (auto [count, p] : dist.count_probs) counts[std::to_string(count)] = p;
  return {{"count_probs", counts},
          {"correct_proportion", dist.correct_proportion},
          {"type_probs", dist.type_probs}};
}

ErrorCountDistribution BackgroundFromJson(const nlohmann::json &json) {
  ErrorCountDistribution dist;
  try {
    for (const auto &[key, p] : json.at("count_probs").items()) {
      dist.count_probs[static_cast<int>(ParseInt(key))] = p.get<double>();
    }
    dist.correct_proportion = json.at("correct_proportion").get<double>();
    dist.type_probs =
        json.at("type_probs").get<std::map<std::string, double>>();
  } catch (const nlohmann::json::exception &e) {
    throw Error(std::string("malformed background statistics: ") + e.what());
  }
  dist.Validate();
  return dist;
}

std::string SerializeBackground(const ErrorCountDistribution &dist) {
  std::string out;
  for (auto [count, p] : dist.count_probs) {
    out += nlohmann::json({{"count", count}, {"p", p}}).dump() + "\n";
  }
  out += nlohmann::json({{"correct_proportion", dist.correct_proportion}}).dump() + "\n";
  for (const auto &[type, p] : dist.type_probs) {
    out += nlohmann::json({{"type", type}, {"p", p}}).dump() + "\n";
  }
  return out;
}

ErrorCountDistribution ParseBackground(std::string_view text) {
  ErrorCountDistribution dist;
  int line_no = 0;
  for (auto line : Split(text, '\n')) {
    ++line_no;
    line = StripCr(line);
    if (line.empty()) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
      if (record.contains("count")) {
        dist.count_probs[record.at("count").get<int>()] = record.at("p").get<double>();
      } else if (record.contains("correct_proportion")) {
        dist.correct_proportion = record.at("correct_proportion").get<double>();
      } else if (record.contains("type")) {
        dist.type_probs[record.at("type").get<std::string>()] =
            record.at("p").get<double>();
      } else {
        throw ParseError("unknown background record", line_no);
      }
    } catch (const nlohmann::json::exception &e) {
      throw ParseError(e.what(), line_no);
    }
  }
  dist.Validate();
  return dist;
}

}  // namespace aegen

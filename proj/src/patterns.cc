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

#include "aegen/patterns.h"

#include <algorithm>
#include <tuple>

#include "aegen/base.h"

namespace aegen {
namespace {

// Sort key: correct side, then type, then the rest of the rule.
auto RuleKey(const ErrorPattern &p) {
  return std::tie(p.correct, p.type, p.incorrect, p.left_context, p.right_context);
}

bool Overlaps(Span run, Span edit) {
  if (run.empty() && edit.empty()) return run.begin == edit.begin;
  if (run.empty()) return edit.begin <= run.begin && run.begin <= edit.end;
  if (edit.empty()) return run.begin <= edit.begin && edit.begin <= run.end;
  return std::max(run.begin, edit.begin) < std::min(run.end, edit.end);
}

nlohmann::json ItemsToJson(const std::vector<PatternItem> &items) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto &item : items) {
    if (item.is_word()) {
      out.push_back({item.surface, item.pos});
    } else {
      out.push_back({item.pos});
    }
  }
  return out;
}

std::vector<PatternItem> ItemsFromJson(const nlohmann::json &json) {
  std::vector<PatternItem> items;
  for (const auto &entry : json) {
    if (entry.size() == 1) {
      items.push_back(PatternItem::Tag(entry.at(0).get<std::string>()));
    } else if (entry.size() == 2) {
      items.push_back({entry.at(1).get<std::string>(), entry.at(0).get<std::string>()});
    } else {
      throw Error("pattern item must have 1 or 2 fields");
    }
    ValidateToken({items.back().is_word() ? items.back().surface : "x", items.back().pos});
  }
  return items;
}

void ValidatePattern(const ErrorPattern &p) {
  const size_t ctx = p.context_size();
  if (p.incorrect.size() < ctx || p.correct.size() < ctx) {
    throw Error("pattern shorter than its context: " + p.ToString());
  }
  if (p.count == 0) throw Error("pattern with zero count: " + p.ToString());
  if (p.incorrect == p.correct) throw Error("pattern sides identical: " + p.ToString());
  for (const auto &item : p.IncorrectCore()) {
    if (!item.is_word()) throw Error("incorrect-side core must be word forms: " + p.ToString());
  }
  if (p.left_context && (p.incorrect.front() != p.correct.front() || p.correct.front().is_word())) {
    throw Error("left context differs between sides: " + p.ToString());
  }
  if (p.right_context && (p.incorrect.back() != p.correct.back() || p.correct.back().is_word())) {
    throw Error("right context differs between sides: " + p.ToString());
  }
}

}  // namespace

std::span<const PatternItem> ErrorPattern::IncorrectCore() const {
  std::span<const PatternItem> all(incorrect);
  return all.subspan(left_context ? 1 : 0, incorrect.size() - context_size());
}

std::span<const PatternItem> ErrorPattern::CorrectCore() const {
  std::span<const PatternItem> all(correct);
  return all.subspan(left_context ? 1 : 0, correct.size() - context_size());
}

std::string ErrorPattern::ToString() const {
  auto side = [](const std::vector<PatternItem> &items) {
    std::vector<std::string> parts;
    for (const auto &item : items) parts.push_back(item.ToString());
    return Join(parts, " ");
  };
  return "(" + side(incorrect) + ", " + side(correct) + ")";
}

bool ErrorPattern::SameRule(const ErrorPattern &other) const {
  return RuleKey(*this) == RuleKey(other);
}

std::vector<ErrorPattern> ExtractPatterns(const AnnotatedPair &pair,
                                          const EditScript &script) {
  const auto &orig = pair.original.tokens;
  const auto &corr = pair.corrected.tokens;
  std::vector<ErrorPattern> out;

  size_t oi = 0, ci = 0;  // tokens consumed on each side
  size_t k = 0;
  while (k < script.ops.size()) {
    if (script.ops[k].kind == EditKind::kMatch) {
      ++oi;
      ++ci;
      ++k;
      continue;
    }
    const size_t orig_begin = oi, corr_begin = ci;
    std::vector<PatternItem> orig_core, corr_core;
    for (; k < script.ops.size() && script.ops[k].kind != EditKind::kMatch; ++k) {
      const EditOp &op = script.ops[k];
      if (op.kind != EditKind::kInsert) orig_core.push_back(PatternItem::Word(orig.at(oi++)));
      if (op.kind != EditKind::kDelete) corr_core.push_back(PatternItem::Word(corr.at(ci++)));
    }
    const Span orig_run{orig_begin, oi};
    const Span corr_run{corr_begin, ci};

    ErrorPattern p;
    // Context tokens are matched on each side; their tag is taken from the
    // corrected sentence, the side patterns are matched against.
    p.left_context = corr_begin > 0 && orig_begin > 0;
    p.right_context = ci < corr.size() && oi < orig.size();
    if (p.context_size() == 0 && (orig_core.empty() || corr_core.empty())) {
      continue;  // nothing to anchor an insertion or deletion on
    }
    if (p.left_context) {
      auto ctx = PatternItem::Tag(corr[corr_begin - 1].pos);
      p.incorrect.push_back(ctx);
      p.correct.push_back(ctx);
    }
    p.incorrect.insert(p.incorrect.end(), orig_core.begin(), orig_core.end());
    p.correct.insert(p.correct.end(), corr_core.begin(), corr_core.end());
    if (p.right_context) {
      auto ctx = PatternItem::Tag(corr[ci].pos);
      p.incorrect.push_back(ctx);
      p.correct.push_back(ctx);
    }

    p.type = std::string(kUnknownErrorType);
    for (const auto &edit : pair.edits) {
      if (Overlaps(orig_run, edit.original) || Overlaps(corr_run, edit.corrected)) {
        p.type = edit.type;
        break;
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

PatternStore PatternStore::Build(std::span<const AnnotatedPair> pairs,
                                 std::span<const EditScript> scripts,
                                 size_t threshold) {
  if (threshold < 1) throw Error("pattern threshold must be at least 1");
  if (scripts.size() != pairs.size()) {
    throw Error("pattern extraction needs one alignment per sentence pair");
  }
  std::vector<ErrorPattern> all;
  for (size_t i = 0; i < pairs.size(); ++i) {
    for (auto &p : ExtractPatterns(pairs[i], scripts[i])) all.push_back(std::move(p));
  }
  std::sort(all.begin(), all.end(),
            [](const ErrorPattern &a, const ErrorPattern &b) { return RuleKey(a) < RuleKey(b); });
  std::vector<ErrorPattern> merged;
  for (auto &p : all) {
    if (!merged.empty() && merged.back().SameRule(p)) {
      merged.back().count += p.count;
    } else {
      merged.push_back(std::move(p));
    }
  }
  std::erase_if(merged, [&](const ErrorPattern &p) { return p.count < threshold; });
  return FromPatterns(std::move(merged), threshold);
}

PatternStore PatternStore::Build(std::span<const AnnotatedPair> pairs, size_t threshold) {
  std::vector<EditScript> scripts;
  scripts.reserve(pairs.size());
  for (const auto &pair : pairs) scripts.push_back(AlignTokens(pair.original, pair.corrected));
  return Build(pairs, scripts, threshold);
}

PatternStore PatternStore::FromPatterns(std::vector<ErrorPattern> patterns,
                                        size_t threshold) {
  if (threshold < 1) throw Error("pattern threshold must be at least 1");
  PatternStore store;
  store.threshold_ = threshold;
  for (const auto &p : patterns) {
    ValidatePattern(p);
    if (p.count < threshold) {
      throw Error("pattern below threshold " + std::to_string(threshold) + ": " + p.ToString());
    }
  }
  std::sort(patterns.begin(), patterns.end(),
            [](const ErrorPattern &a, const ErrorPattern &b) { return RuleKey(a) < RuleKey(b); });
  for (size_t i = 1; i < patterns.size(); ++i) {
    if (patterns[i].SameRule(patterns[i - 1])) {
      throw Error("duplicate pattern " + patterns[i].ToString());
    }
  }
  store.patterns_ = std::move(patterns);
  store.Index();
  return store;
}

void PatternStore::Index() {
  by_correct_.clear();
  by_first_tag_.clear();
  type_counts_.clear();
  for (size_t i = 0; i < patterns_.size(); ++i) {
    const ErrorPattern &p = patterns_[i];
    by_correct_[p.correct].push_back(i);
    by_first_tag_[p.correct.front().pos].push_back(i);
    type_counts_[p.type] += p.count;
  }
}

const std::vector<size_t> *PatternStore::WithCorrectSide(
    const std::vector<PatternItem> &correct) const {
  auto it = by_correct_.find(correct);
  return it == by_correct_.end() ? nullptr : &it->second;
}

std::vector<PatternMatch> PatternStore::Match(const TaggedSentence &sentence) const {
  std::vector<PatternMatch> matches;
  const auto &tokens = sentence.tokens;
  for (size_t pos = 0; pos < tokens.size(); ++pos) {
    auto it = by_first_tag_.find(tokens[pos].pos);
    if (it == by_first_tag_.end()) continue;
    for (size_t index : it->second) {
      const auto &side = patterns_[index].correct;
      if (pos + side.size() > tokens.size()) continue;
      bool ok = true;
      for (size_t k = 0; k < side.size() && ok; ++k) ok = side[k].Matches(tokens[pos + k]);
      if (ok) matches.push_back({index, pos});
    }
  }
  return matches;
}

std::string PatternStore::Serialize(const ErrorCountDistribution *background) const {
  nlohmann::json header = {{"format", "aegen-patterns"}, {"version", 1},
                           {"threshold", threshold_}, {"patterns", patterns_.size()}};
  if (background != nullptr) header["background"] = BackgroundToJson(*background);
  std::string out = header.dump() + "\n";
  for (const auto &p : patterns_) {
    nlohmann::json record = {{"correct", ItemsToJson(p.correct)},
                             {"incorrect", ItemsToJson(p.incorrect)},
                             {"left", p.left_context},
                             {"right", p.right_context},
                             {"type", p.type},
                             {"count", p.count}};
    out += record.dump() + "\n";
  }
  return out;
}

PatternStore PatternStore::Parse(std::string_view text,
                                 std::optional<ErrorCountDistribution> *background) {
  std::vector<ErrorPattern> patterns;
  size_t threshold = 1;
  bool have_header = false;
  int line_no = 0;
  for (auto line : Split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    try {
      auto record = nlohmann::json::parse(line);
      if (!have_header) {
        if (record.value("format", "") != "aegen-patterns") {
          throw ParseError("missing pattern file header", line_no);
        }
        threshold = record.at("threshold").get<size_t>();
        if (background != nullptr && record.contains("background")) {
          *background = BackgroundFromJson(record.at("background"));
        }
        have_header = true;
        continue;
      }
      ErrorPattern p;
      p.correct = ItemsFromJson(record.at("correct"));
      p.incorrect = ItemsFromJson(record.at("incorrect"));
      p.left_context = record.at("left").get<bool>();
      p.right_context = record.at("right").get<bool>();
      p.type = record.at("type").get<std::string>();
      p.count = record.at("count").get<size_t>();
      patterns.push_back(std::move(p));
    } catch (const nlohmann::json::exception &e) {
      throw ParseError(e.what(), line_no);
    } catch (const ParseError &) {
      throw;
    } catch (const Error &e) {
      throw ParseError(e.what(), line_no);
    }
  }
  if (!have_header) throw ParseError("empty pattern file", 0);
  return FromPatterns(std::move(patterns), threshold);
}

LabeledSentence ApplyReversed(const TaggedSentence &sentence,
                              const PatternStore &store,
                              std::span<const PatternMatch> matches) {
  std::vector<PatternMatch> ordered(matches.begin(), matches.end());
  std::sort(ordered.begin(), ordered.end(),
            [](const PatternMatch &a, const PatternMatch &b) { return a.position < b.position; });

  LabeledSentence out;
  bool mark_next = false;
  auto emit = [&](Token token, bool incorrect) {
    out.tokens.push_back(std::move(token));
    out.labels.push_back(incorrect || mark_next ? Label::kIncorrect : Label::kCorrect);
    mark_next = false;
  };

  size_t pos = 0;
  for (const auto &m : ordered) {
    const ErrorPattern &p = store.patterns().at(m.pattern);
    if (m.position < pos || m.position + p.correct.size() > sentence.size()) {
      throw Error("overlapping or out-of-range pattern application in sentence " +
                  sentence.id);
    }
    for (size_t k = 0; k < p.correct.size(); ++k) {
      if (!p.correct[k].Matches(sentence.tokens[m.position + k])) {
        throw Error("pattern " + p.ToString() + " does not match sentence " +
                    sentence.id + " at " + std::to_string(m.position));
      }
    }
    for (; pos < m.position; ++pos) emit(sentence.tokens[pos], false);
    if (p.left_context) emit(sentence.tokens[pos], false);
    auto core = p.IncorrectCore();
    for (const auto &item : core) emit(Token{item.surface, item.pos}, true);
    if (core.empty()) mark_next = true;
    pos = m.position + p.correct.size();
    if (p.right_context) emit(sentence.tokens[pos - 1], false);
  }
  for (; pos < sentence.size(); ++pos) emit(sentence.tokens[pos], false);
  if (mark_next && !out.labels.empty()) out.labels.back() = Label::kIncorrect;
  return out;
}

}  // namespace aegen

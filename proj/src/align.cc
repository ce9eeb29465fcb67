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

#include "aegen/align.h"

#include <algorithm>

#include "aegen/base.h"

namespace aegen {

EditScript AlignTokens(std::span<const std::string> a,
                       std::span<const std::string> b) {
  const size_t n = a.size();
  const size_t m = b.size();
  const size_t width = m + 1;
  // rest[i * width + j] = edit distance between a[i..] and b[j..].
  std::vector<uint32_t> rest((n + 1) * width);
  for (size_t i = n + 1; i-- > 0;) {
    for (size_t j = m + 1; j-- > 0;) {
      uint32_t &cell = rest[i * width + j];
      if (i == n) {
        cell = static_cast<uint32_t>(m - j);
      } else if (j == m) {
        cell = static_cast<uint32_t>(n - i);
      } else {
        uint32_t diag = rest[(i + 1) * width + j + 1] + (a[i] == b[j] ? 0 : 1);
        uint32_t del = rest[(i + 1) * width + j] + 1;
        uint32_t ins = rest[i * width + j + 1] + 1;
        cell = std::min({diag, del, ins});
      }
    }
  }

  EditScript script;
  script.cost = rest[0];
  size_t i = 0, j = 0;
  while (i < n || j < m) {
    const uint32_t here = rest[i * width + j];
    if (i < n && j < m) {
      bool same = a[i] == b[j];
      if (here == rest[(i + 1) * width + j + 1] + (same ? 0 : 1)) {
        script.ops.push_back({same ? EditKind::kMatch : EditKind::kSubstitute, i, j});
        ++i;
        ++j;
        continue;
      }
    }
    if (i < n && here == rest[(i + 1) * width + j] + 1) {
      script.ops.push_back({EditKind::kDelete, i, std::nullopt});
      ++i;
    } else {
      script.ops.push_back({EditKind::kInsert, std::nullopt, j});
      ++j;
    }
  }
  return script;
}

EditScript AlignTokens(const TaggedSentence &a, const TaggedSentence &b) {
  auto sa = Surfaces(a);
  auto sb = Surfaces(b);
  return AlignTokens(sa, sb);
}

std::vector<std::string> Replay(const EditScript &script,
                                std::span<const std::string> a,
                                std::span<const std::string> b) {
  std::vector<std::string> out;
  for (const auto &op : script.ops) {
    switch (op.kind) {
      case EditKind::kMatch:
        out.push_back(a[*op.orig_index]);
        break;
      case EditKind::kSubstitute:
      case EditKind::kInsert:
        out.push_back(b[*op.corr_index]);
        break;
      case EditKind::kDelete:
        break;
    }
  }
  return out;
}

size_t LabeledSentence::CountIncorrect() const {
  return static_cast<size_t>(
      std::count(labels.begin(), labels.end(), Label::kIncorrect));
}

LabeledSentence AllCorrect(const TaggedSentence &sentence) {
  return {sentence.tokens,
          std::vector<Label>(sentence.size(), Label::kCorrect)};
}

LabeledSentence LabelFromAlignment(const TaggedSentence &original,
                                   const EditScript &script) {
  LabeledSentence out = AllCorrect(original);
  const size_t n = original.size();
  auto mark = [&](size_t index) {
    if (index >= n) {
      throw Error("alignment index " + std::to_string(index) +
                  " out of range for sentence " + original.id);
    }
    out.labels[index] = Label::kIncorrect;
  };

  // Original position reached so far; an Insert marks this token.
  size_t next_orig = 0;
  bool pending_insert = false;
  for (const auto &op : script.ops) {
    if (op.kind == EditKind::kInsert) {
      pending_insert = true;
      continue;
    }
    if (!op.orig_index) throw Error("malformed edit op in sentence " + original.id);
    next_orig = *op.orig_index;
    if (pending_insert) {
      mark(next_orig);
      pending_insert = false;
    }
    if (op.kind == EditKind::kSubstitute || op.kind == EditKind::kDelete) {
      mark(next_orig);
    }
  }
  if (pending_insert) {
    if (n == 0) throw Error("cannot label an empty sentence");
    mark(n - 1);
  }
  return out;
}

std::string SerializeLabeled(std::span<const LabeledSentence> sentences) {
  std::string out;
  for (const auto &s : sentences) {
    for (size_t i = 0; i < s.size(); ++i) {
      out += s.tokens[i].surface;
      out += '\t';
      out += s.tokens[i].pos;
      out += s.labels[i] == Label::kIncorrect ? "\ti\n" : "\tc\n";
    }
    out += '\n';
  }
  return out;
}

std::vector<LabeledSentence> ParseLabeled(std::string_view text) {
  std::vector<LabeledSentence> sentences;
  for (auto &stanza : ParseColumnStanzas(text, 2, 3)) {
    LabeledSentence sentence;
    for (auto &row : stanza) {
      Label label = Label::kCorrect;
      if (row.fields.size() == 3) {
        if (row.fields[2] == "i") {
          label = Label::kIncorrect;
        } else if (row.fields[2] != "c") {
          throw ParseError("label must be 'c' or 'i', got '" + row.fields[2] + "'",
                           row.line);
        }
      }
      Token token{std::move(row.fields[0]), std::move(row.fields[1])};
      try {
        ValidateToken(token);
      } catch (const Error &e) {
        throw ParseError(e.what(), row.line);
      }
      sentence.tokens.push_back(std::move(token));
      sentence.labels.push_back(label);
    }
    sentences.push_back(std::move(sentence));
  }
  return sentences;
}

}  // namespace aegen

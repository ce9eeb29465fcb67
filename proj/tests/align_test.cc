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
#include "doctest.h"
#include "oracles.h"

namespace aegen {
namespace {

using Words = std::vector<std::string>;

using oracle::Exhaustive;
using oracle::TableDistance;

TaggedSentence Tagged(const Words &w) {
  TaggedSentence s;
  for (const auto &x : w) s.tokens.push_back({x, "X"});
  return s;
}

TEST_CASE("identical sentences align with matches only") {
  Words a = {"a", "b", "c"};
  auto script = AlignTokens(a, a);
  CHECK(script.cost == 0);
  for (const auto &op : script.ops) CHECK(op.kind == EditKind::kMatch);
}

TEST_CASE("worked example substitution") {
  Words a = {"We", "went", "shop", "on", "Saturday"};
  Words b = {"We", "went", "shopping", "on", "Saturday"};
  auto script = AlignTokens(a, b);
  CHECK(script.cost == 1);
  size_t subs = 0;
  for (const auto &op : script.ops) {
    if (op.kind == EditKind::kSubstitute) {
      ++subs;
      CHECK(*op.orig_index == 2);
    }
  }
  CHECK(subs == 1);
}

TEST_CASE("deletion against exhaustive search") {
  Words a = {"a", "b", "c"}, b = {"a", "c"};
  auto script = AlignTokens(a, b);
  CHECK(script.cost == 1);
  CHECK(script.cost == Exhaustive(a, 0, b, 0));
  bool found = false;
  for (const auto &op : script.ops) {
    if (op.kind == EditKind::kDelete) found = *op.orig_index == 1;
  }
  CHECK(found);
}

TEST_CASE("substitution preferred over insert plus delete") {
  Words a = {"x", "b"}, b = {"y", "b"};
  auto script = AlignTokens(a, b);
  CHECK(script.ops.size() == 2);
  CHECK(script.ops[0].kind == EditKind::kSubstitute);
}

TEST_CASE("fuzzed pairs against exhaustive and table oracles") {
  Rng rng(17);
  const char *vocab[] = {"a", "b", "c", "d"};
  for (int trial = 0; trial < 2000; ++trial) {
    const size_t max_len = trial < 500 ? 5 : 12;
    Words a, b;
    for (size_t k = rng.UniformInt(max_len + 1); k > 0; --k) a.push_back(vocab[rng.UniformInt(4)]);
    for (size_t k = rng.UniformInt(max_len + 1); k > 0; --k) b.push_back(vocab[rng.UniformInt(4)]);
    auto script = AlignTokens(a, b);
    if (max_len == 5) CHECK(script.cost == Exhaustive(a, 0, b, 0));
    CHECK(script.cost == TableDistance(a, b));
    CHECK(Replay(script, a, b) == b);
    size_t counted = 0;
    for (const auto &op : script.ops) counted += op.kind != EditKind::kMatch;
    CHECK(counted == script.cost);
  }
}

TEST_CASE("labels follow the conventions") {
  auto orig = Tagged({"We", "am", "a", "class"});
  auto corr = Tagged({"We", "are", "a", "class"});
  auto labeled = LabelFromAlignment(orig, AlignTokens(orig, corr));
  CHECK(labeled.labels == std::vector<Label>{Label::kCorrect, Label::kIncorrect, Label::kCorrect,
                                             Label::kCorrect});

  auto missing = Tagged({"He", "home"});
  auto full = Tagged({"He", "goes", "home"});
  auto l2 = LabelFromAlignment(missing, AlignTokens(missing, full));
  CHECK(l2.labels == std::vector<Label>{Label::kCorrect, Label::kIncorrect});

  auto final_gap = Tagged({"He", "goes"});
  auto l3 = LabelFromAlignment(final_gap, AlignTokens(final_gap, full));
  CHECK(l3.labels.back() == Label::kIncorrect);

  auto self = LabelFromAlignment(orig, AlignTokens(orig, orig));
  CHECK(self.CountIncorrect() == 0);
}

TEST_CASE("incorrect labels are bounded by the script") {
  Rng rng(23);
  const char *vocab[] = {"a", "b", "c"};
  for (int trial = 0; trial < 1000; ++trial) {
    Words a, b;
    for (size_t k = 1 + rng.UniformInt(8); k > 0; --k) a.push_back(vocab[rng.UniformInt(3)]);
    for (size_t k = rng.UniformInt(9); k > 0; --k) b.push_back(vocab[rng.UniformInt(3)]);
    auto script = AlignTokens(a, b);
    auto labeled = LabelFromAlignment(Tagged(a), script);
    size_t inserts = 0;
    for (const auto &op : script.ops) inserts += op.kind == EditKind::kInsert;
    CHECK(labeled.CountIncorrect() <= script.cost + inserts);
  }
}

TEST_CASE("labeled tsv round trip") {
  auto orig = Tagged({"We", "am", "here"});
  auto corr = Tagged({"We", "are", "here"});
  std::vector<LabeledSentence> corpus = {LabelFromAlignment(orig, AlignTokens(orig, corr)),
                                         AllCorrect(corr)};
  auto text = SerializeLabeled(corpus);
  CHECK(text.find("am\tX\ti\n") != std::string::npos);
  CHECK(ParseLabeled(text) == corpus);
  auto two_col = ParseLabeled("a\tX\nb\tY\n");
  CHECK(two_col[0].CountIncorrect() == 0);
  CHECK_THROWS_AS(ParseLabeled("a\tX\tq\n"), ParseError);
}

}  // namespace
}  // namespace aegen

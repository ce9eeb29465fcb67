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

#include "aegen/base.h"
#include "doctest.h"

namespace aegen {
namespace {

TaggedSentence Sent(const std::string &text) {
  // "word_TAG word_TAG ..."
  TaggedSentence s;
  for (auto item : SplitWhitespace(text)) {
    auto cut = item.rfind('_');
    s.tokens.push_back({std::string(item.substr(0, cut)), std::string(item.substr(cut + 1))});
  }
  return s;
}

AnnotatedPair Pair(const std::string &orig, const std::string &corr, const std::string &type) {
  AnnotatedPair p;
  p.original = Sent(orig);
  p.corrected = Sent(corr);
  auto script = AlignTokens(p.original, p.corrected);
  // One edit covering every changed original token.
  size_t lo = p.original.size(), hi = 0, clo = p.corrected.size(), chi = 0;
  for (const auto &op : script.ops) {
    if (op.kind == EditKind::kMatch) continue;
    if (op.orig_index) lo = std::min(lo, *op.orig_index), hi = std::max(hi, *op.orig_index + 1);
    if (op.corr_index) clo = std::min(clo, *op.corr_index), chi = std::max(chi, *op.corr_index + 1);
  }
  if (lo <= hi && clo <= chi) {
    Edit e;
    e.original = {std::min(lo, hi), hi};
    e.corrected = {std::min(clo, chi), chi};
    e.type = type;
    p.edits.push_back(e);
  }
  return p;
}

const char *kShopOrig = "We_PPIS2 went_VVD shop_VV0 on_II Saturday_NPD1";
const char *kShopCorr = "We_PPIS2 went_VVD shopping_VVG on_II Saturday_NPD1";

TEST_CASE("worked example pattern") {
  auto pair = Pair(kShopOrig, kShopCorr, "Verb");
  auto patterns = ExtractPatterns(pair, AlignTokens(pair.original, pair.corrected));
  REQUIRE(patterns.size() == 1);
  CHECK(patterns[0].ToString() == "(VVD shop_VV0 II, VVD shopping_VVG II)");
  CHECK(patterns[0].type == "Verb");
  CHECK(patterns[0].left_context);
  CHECK(patterns[0].right_context);
}

TEST_CASE("identical pair yields nothing") {
  auto pair = Pair(kShopCorr, kShopCorr, "x");
  CHECK(ExtractPatterns(pair, AlignTokens(pair.original, pair.corrected)).empty());
}

TEST_CASE("conjunction pattern") {
  auto pair = Pair("boys_NN2 an_CC girls_NN2", "boys_NN2 and_CC girls_NN2", "Spell");
  auto patterns = ExtractPatterns(pair, AlignTokens(pair.original, pair.corrected));
  REQUIRE(patterns.size() == 1);
  CHECK(patterns[0].ToString() == "(NN2 an_CC NN2, NN2 and_CC NN2)");
}

TEST_CASE("runs without annotation get the unknown type") {
  AnnotatedPair pair;
  pair.original = Sent(kShopOrig);
  pair.corrected = Sent(kShopCorr);
  auto patterns = ExtractPatterns(pair, AlignTokens(pair.original, pair.corrected));
  REQUIRE(patterns.size() == 1);
  CHECK(patterns[0].type == kUnknownErrorType);
}

TEST_CASE("adjacent changes merge into one run") {
  auto pair = Pair("a_X b_Y c_Z d_W", "a_X q_Y r_Z d_W", "T");
  auto patterns = ExtractPatterns(pair, AlignTokens(pair.original, pair.corrected));
  REQUIRE(patterns.size() == 1);
  CHECK(patterns[0].IncorrectCore().size() == 2);
}

TEST_CASE("threshold and counting") {
  std::vector<AnnotatedPair> pairs;
  for (int i = 0; i < 4; ++i) pairs.push_back(Pair(kShopOrig, kShopCorr, "Verb"));
  CHECK(PatternStore::Build(pairs, 5).empty());
  pairs.push_back(Pair(kShopOrig, kShopCorr, "Verb"));
  auto store = PatternStore::Build(pairs, 5);
  REQUIRE(store.size() == 1);
  CHECK(store.patterns()[0].count == 5);
  CHECK(PatternStore::Build(std::vector<AnnotatedPair>{}, 1).empty());

  std::vector<AnnotatedPair> two = {Pair(kShopOrig, kShopCorr, "Verb"),
                                    Pair(kShopOrig, kShopCorr, "Verb")};
  CHECK(PatternStore::Build(two, 1).patterns()[0].count == 2);
  // Same transformation, different type: counted separately.
  two[1] = Pair(kShopOrig, kShopCorr, "Form");
  CHECK(PatternStore::Build(two, 1).size() == 2);
}

TEST_CASE("matching") {
  std::vector<AnnotatedPair> pairs = {Pair(kShopOrig, kShopCorr, "Verb")};
  auto store = PatternStore::Build(pairs, 1);
  auto s = Sent("They_PPHS2 went_VVD shopping_VVG on_II Monday_NPD1");
  auto matches = store.Match(s);
  REQUIRE(matches.size() == 1);
  CHECK(matches[0].position == 1);
  CHECK(PatternStore().Match(s).empty());

  std::vector<AnnotatedPair> conj = {Pair("boys_NN2 an_CC girls_NN2", "boys_NN2 and_CC girls_NN2", "S")};
  auto cstore = PatternStore::Build(conj, 1);
  auto m = cstore.Match(Sent("x_NN2 and_CC y_NN2 and_CC z_NN2"));
  REQUIRE(m.size() == 2);
  CHECK(m[0].position == 0);
  CHECK(m[1].position == 2);
}

// Every (pattern, position) found by trying all of them.
std::vector<PatternMatch> NaiveMatch(const PatternStore &store, const TaggedSentence &s) {
  std::vector<PatternMatch> out;
  for (size_t pos = 0; pos < s.size(); ++pos) {
    for (size_t p = 0; p < store.size(); ++p) {
      const auto &items = store.patterns()[p].correct;
      if (pos + items.size() > s.size()) continue;
      bool ok = true;
      for (size_t k = 0; k < items.size(); ++k) ok = ok && items[k].Matches(s.tokens[pos + k]);
      if (ok) out.push_back({p, pos});
    }
  }
  return out;
}

std::vector<AnnotatedPair> RandomPairs(size_t n, uint64_t seed) {
  Rng rng(seed);
  const char *words[][2] = {{"a", "AT1"}, {"the", "AT"}, {"dog", "NN1"}, {"dogs", "NN2"},
                            {"run", "VV0"}, {"runs", "VVZ"}, {"in", "II"}, {"on", "II"}};
  std::vector<AnnotatedPair> out;
  for (size_t i = 0; i < n; ++i) {
    std::string corr, orig;
    size_t len = 2 + rng.UniformInt(6);
    for (size_t k = 0; k < len; ++k) {
      auto &w = words[rng.UniformInt(8)];
      std::string tok = std::string(w[0]) + "_" + w[1];
      corr += tok + " ";
      double u = rng.Uniform();
      if (u < 0.1) {
        auto &r = words[rng.UniformInt(8)];
        orig += std::string(r[0]) + "_" + r[1] + " ";
      } else if (u < 0.15) {
        // dropped word
      } else if (u < 0.2) {
        orig += tok + " the_AT ";
      } else {
        orig += tok + " ";
      }
    }
    if (SplitWhitespace(orig).empty()) orig = "x_X";
    out.push_back(Pair(orig, corr, "T" + std::to_string(rng.UniformInt(2))));
  }
  return out;
}

TEST_CASE("matches agree with a naive scan") {
  auto pairs = RandomPairs(400, 3);
  auto store = PatternStore::Build(pairs, 1);
  REQUIRE(store.size() > 10);
  for (const auto &p : pairs) {
    auto fast = store.Match(p.corrected);
    auto naive = NaiveMatch(store, p.corrected);
    std::sort(fast.begin(), fast.end(), [](auto &a, auto &b) {
      return std::pair(a.position, a.pattern) < std::pair(b.position, b.pattern);
    });
    CHECK(fast == naive);
  }
}

TEST_CASE("reversed application reproduces the original phrase") {
  auto pairs = RandomPairs(300, 8);
  for (const auto &pair : pairs) {
    auto script = AlignTokens(pair.original, pair.corrected);
    for (const auto &pattern : ExtractPatterns(pair, script)) {
      auto store = PatternStore::FromPatterns({pattern}, 1);
      auto matches = store.Match(pair.corrected);
      REQUIRE(!matches.empty());
      bool reproduced = false;
      for (const auto &m : matches) {
        std::vector<PatternMatch> one = {m};
        auto out = ApplyReversed(pair.corrected, store, one);
        // The rewritten window must appear in the original sentence.
        std::vector<std::string> window;
        for (size_t k = m.position; k < m.position + pattern.incorrect.size(); ++k) {
          window.push_back(out.tokens[k].surface);
        }
        auto orig = Surfaces(pair.original);
        reproduced = reproduced ||
                     std::search(orig.begin(), orig.end(), window.begin(), window.end()) != orig.end();
      }
      CHECK(reproduced);
    }
  }
}

TEST_CASE("worked example reversal reproduces the original") {
  std::vector<AnnotatedPair> pairs = {Pair(kShopOrig, kShopCorr, "Verb")};
  auto store = PatternStore::Build(pairs, 1);
  auto corrected = Sent(kShopCorr);
  auto out = ApplyReversed(corrected, store, store.Match(corrected));
  CHECK(out.tokens == Sent(kShopOrig).tokens);
  CHECK(out.labels[2] == Label::kIncorrect);
  CHECK(out.CountIncorrect() == 1);
}

TEST_CASE("missing word patterns mark the following token") {
  auto pair = Pair("on_II Monday_NPD1 ._YSTP", "on_II the_AT Monday_NPD1 ._YSTP", "Det");
  auto store = PatternStore::Build(std::vector<AnnotatedPair>{pair}, 1);
  REQUIRE(store.size() == 1);
  CHECK(store.patterns()[0].IncorrectCore().empty());
  auto out = ApplyReversed(pair.corrected, store, store.Match(pair.corrected));
  CHECK(out.tokens == pair.original.tokens);
  CHECK(out.labels == std::vector<Label>{Label::kCorrect, Label::kIncorrect, Label::kCorrect});
}

TEST_CASE("store invariants") {
  auto pairs = RandomPairs(500, 13);
  auto store = PatternStore::Build(pairs, 2);
  for (const auto &p : store.patterns()) CHECK(p.incorrect != p.correct);

  auto shuffled = pairs;
  Rng rng(1);
  rng.Shuffle(shuffled);
  CHECK(PatternStore::Build(shuffled, 2).patterns().size() == store.size());
  auto a = PatternStore::Build(shuffled, 2).Serialize();
  CHECK(a == store.Serialize());
}

TEST_CASE("store serialization round trip") {
  auto pairs = RandomPairs(300, 21);
  auto store = PatternStore::Build(pairs, 1);
  auto bg = ComputeBackground(pairs);
  std::optional<ErrorCountDistribution> read;
  auto back = PatternStore::Parse(store.Serialize(&bg), &read);
  CHECK(back.Serialize(&bg) == store.Serialize(&bg));
  REQUIRE(read.has_value());
  CHECK(*read == bg);
  std::optional<ErrorCountDistribution> none;
  PatternStore::Parse(store.Serialize(), &none);
  CHECK(!none.has_value());
  CHECK_THROWS_AS(PatternStore::Parse("{\"format\":\"other\"}\n"), Error);
}

}  // namespace
}  // namespace aegen

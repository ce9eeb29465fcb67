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

#include "aegen/smt.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "aegen/base.h"
#include "doctest.h"
#include "oracles.h"

namespace aegen {
namespace {

using Words = std::vector<std::string>;

// Character DP written out independently of the library.
int NaiveLevenshtein(const std::u32string &a, const std::u32string &b) {
  std::vector<std::vector<int>> d(a.size() + 1, std::vector<int>(b.size() + 1));
  for (size_t i = 0; i <= a.size(); ++i) d[i][0] = static_cast<int>(i);
  for (size_t j = 0; j <= b.size(); ++j) d[0][j] = static_cast<int>(j);
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] != b[j - 1])});
    }
  }
  return d[a.size()][b.size()];
}

TEST_CASE("character levenshtein") {
  CHECK(CharLevenshtein("shopping", "shop") == 4);
  CHECK(CharLevenshtein("on", "on") == 0);
  CHECK(CharLevenshtein("", "abc") == 3);
  // Code points, not bytes: e-acute vs e is one edit.
  CHECK(CharLevenshtein("caf\xc3\xa9", "cafe") == 1);
  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    std::string a, b;
    std::u32string ua, ub;
    for (size_t k = rng.UniformInt(8); k > 0; --k) {
      char c = static_cast<char>('a' + rng.UniformInt(3));
      a += c;
      ua += c;
    }
    for (size_t k = rng.UniformInt(8); k > 0; --k) {
      char c = static_cast<char>('a' + rng.UniformInt(3));
      b += c;
      ub += c;
    }
    CHECK(CharLevenshtein(a, b) == NaiveLevenshtein(ua, ub));
  }
}

ParallelExample Example(const std::string &source, const std::string &target) {
  ParallelExample ex;
  for (auto w : SplitWhitespace(source)) ex.source.emplace_back(w);
  for (auto w : SplitWhitespace(target)) ex.target.emplace_back(w);
  ex.script = AlignTokens(ex.source, ex.target);
  return ex;
}

const PhrasePair *Find(const PhraseTable &table, const std::string &s, const std::string &t) {
  const auto *list = table.Lookup(s);
  if (list == nullptr) return nullptr;
  for (const auto &p : *list) {
    if (Join(p.target, " ") == t) return &p;
  }
  return nullptr;
}

TEST_CASE("relative frequencies") {
  std::vector<ParallelExample> examples = {Example("with equal numbers of", "with equals numbers of"),
                                           Example("with equal numbers of", "with equal numbers of")};
  auto table = PhraseTable::Extract(examples);
  const auto *changed = Find(table, "equal numbers", "equals numbers");
  const auto *same = Find(table, "equal numbers", "equal numbers");
  REQUIRE(changed != nullptr);
  REQUIRE(same != nullptr);
  CHECK(changed->p_target_given_source == doctest::Approx(0.5));
  CHECK(same->p_target_given_source == doctest::Approx(0.5));
  const auto *shop = Find(PhraseTable::Extract(std::vector{Example("went shopping", "went shop")}),
                          "shopping", "shop");
  REQUIRE(shop != nullptr);
  CHECK(shop->levenshtein == 4);
  const auto *on = Find(table, "of", "of");
  REQUIRE(on != nullptr);
  CHECK(on->levenshtein == 0);
}

TEST_CASE("extraction respects alignment consistency") {
  auto ex = Example("a b c", "a x c");
  auto table = PhraseTable::Extract(std::vector{ex});
  CHECK(Find(table, "b", "x") != nullptr);
  CHECK(Find(table, "a b", "a x") != nullptr);
  CHECK(Find(table, "a", "a x") == nullptr);
  // Every source word keeps an identity pair.
  CHECK(Find(table, "b", "b") != nullptr);
}

TEST_CASE("unaligned target words extend phrases") {
  auto table = PhraseTable::Extract(std::vector{Example("on Monday", "on the Monday")});
  CHECK(Find(table, "on", "on the") != nullptr);
  CHECK(Find(table, "Monday", "the Monday") != nullptr);
  CHECK(Find(table, "on Monday", "on the Monday") != nullptr);
}

TEST_CASE("conditional probabilities are distributions") {
  Rng rng(5);
  const char *vocab[] = {"a", "b", "c", "d"};
  std::vector<ParallelExample> examples;
  for (int i = 0; i < 200; ++i) {
    std::string s, t;
    for (size_t k = 1 + rng.UniformInt(6); k > 0; --k) {
      std::string w = vocab[rng.UniformInt(4)];
      s += w + " ";
      double u = rng.Uniform();
      if (u < 0.1) t += std::string(vocab[rng.UniformInt(4)]) + " ";
      else if (u < 0.15) continue;
      else t += w + " ";
    }
    if (t.empty()) t = "a";
    examples.push_back(Example(s, t));
  }
  auto table = PhraseTable::Extract(examples, 4);
  for (const auto &[src, list] : table.entries()) {
    double total = 0.0;
    for (const auto &p : list) {
      CHECK(p.p_target_given_source > 0.0);
      CHECK(p.p_target_given_source <= 1.0);
      CHECK(p.levenshtein == CharLevenshtein(Join(p.source, " "), Join(p.target, " ")));
      total += p.p_target_given_source;
    }
    CHECK(std::fabs(total - 1.0) < 1e-9);
  }
  std::map<std::string, double> by_target;
  for (const auto &[src, list] : table.entries()) {
    for (const auto &p : list) by_target[Join(p.target, " ")] += p.p_source_given_target;
  }
  for (const auto &[t, total] : by_target) CHECK(std::fabs(total - 1.0) < 1e-9);

  auto text = table.Serialize();
  CHECK(PhraseTable::Parse(text).Serialize() == text);
  table.Prune(1);
  for (const auto &[src, list] : table.entries()) CHECK(list.size() == 1);
  CHECK_THROWS_AS(PhraseTable::Parse("a ||| b ||| 0.5 0.5 7 ||| \n"), ParseError);
  CHECK_THROWS_AS(PhraseTable::Parse("a ||| b ||| 1.5 0.5 1 ||| \n"), ParseError);
}

using oracle::SmallLm;

TEST_CASE("identity table reproduces the input") {
  PhraseTable table;
  for (const char *w : {"a", "b", "c"}) table.Add(MakePhrasePair({w}, {w}, 1.0, 1.0));
  auto lm = SmallLm(1, 3);
  Words src = {"a", "c", "b", "a"};
  auto d = Decode(src, table, lm, DecoderConfig{});
  REQUIRE(d.size() == 1);
  CHECK(d[0].output == src);
}

using oracle::Instance;
using oracle::RandomInstance;
using oracle::Enumerate;

TEST_CASE("decoder agrees with exhaustive enumeration") {
  Rng rng(41);
  auto lm = SmallLm(2, 3);
  DecoderConfig config;
  config.nbest = 5;
  for (int trial = 0; trial < 150; ++trial) {
    auto inst = RandomInstance(rng);
    std::map<Words, double> best;
    Enumerate(inst, lm, config.weights, best);
    std::vector<double> scores;
    for (const auto &[o, s] : best) scores.push_back(s);
    std::sort(scores.rbegin(), scores.rend());

    auto d = Decode(inst.source, inst.table, lm, config);
    REQUIRE(!d.empty());
    CHECK(d.size() == std::min<size_t>(5, scores.size()));
    for (size_t r = 0; r < d.size(); ++r) {
      CHECK(std::fabs(d[r].score - scores[r]) < 1e-9);
      CHECK(std::fabs(best.at(d[r].output) - d[r].score) < 1e-9);
    }
  }
}

TEST_CASE("derivation contract") {
  Rng rng(43);
  auto lm = SmallLm(3, 3);
  DecoderConfig config;
  config.nbest = 10;
  for (int trial = 0; trial < 100; ++trial) {
    auto inst = RandomInstance(rng);
    auto d = Decode(inst.source, inst.table, lm, config);
    std::map<Words, int> seen;
    for (size_t r = 0; r < d.size(); ++r) {
      CHECK(++seen[d[r].output] == 1);
      if (r > 0) CHECK(d[r].score <= d[r - 1].score);
      CHECK(std::fabs(Dot(config.weights, d[r].features) - d[r].score) < 1e-9);
      size_t pos = 0;
      Words joined;
      for (const auto &seg : d[r].segmentation) {
        CHECK(seg.source.begin == pos);
        pos = seg.source.end;
        joined.insert(joined.end(), seg.pair.target.begin(), seg.pair.target.end());
      }
      CHECK(pos == inst.source.size());
      CHECK(joined == d[r].output);
      CHECK(std::fabs(d[r].features[kLanguageModel] - lm.SequenceLogProb(d[r].output)) < 1e-9);
    }
  }
}

TEST_CASE("wider beams never score lower") {
  Rng rng(47);
  auto lm = SmallLm(4, 5);
  for (int trial = 0; trial < 100; ++trial) {
    auto inst = RandomInstance(rng);
    double previous = -INFINITY;
    for (size_t beam : {1, 2, 4, 8, 32, 128}) {
      DecoderConfig config;
      config.beam_width = beam;
      double score = Decode(inst.source, inst.table, lm, config).front().score;
      CHECK(score >= previous - 1e-12);
      previous = score;
    }
  }
}

TEST_CASE("n-best versions differ at the changed phrase") {
  PhraseTable table;
  for (const char *w : {"we", "went", "on", "Saturday"}) table.Add(MakePhrasePair({w}, {w}, 1.0, 1.0));
  table.Add(MakePhrasePair({"shopping"}, {"shopping"}, 0.6, 1.0));
  table.Add(MakePhrasePair({"shopping"}, {"shop"}, 0.4, 1.0));
  auto lm = NGramLM::Train(std::vector<Words>{{"we", "went", "shopping", "on", "Saturday"}}, 3);
  TaggedSentence src;
  src.id = "0";
  for (const char *w : {"we", "went", "shopping", "on", "Saturday"}) src.tokens.push_back({w, "X"});
  DecoderConfig config;
  config.nbest = 2;
  auto versions = GenerateArtificial(std::vector{src}, table, lm, config, 2);
  REQUIRE(versions.size() == 2);
  CHECK(versions[0][0].CountIncorrect() == 0);
  CHECK(versions[0][0].tokens[2].pos == "X");
  CHECK(versions[1][0].tokens[2].surface == "shop");
  CHECK(versions[1][0].tokens[2].pos == kUntagged);
  CHECK(versions[1][0].labels ==
        std::vector<Label>{Label::kCorrect, Label::kCorrect, Label::kIncorrect, Label::kCorrect, Label::kCorrect});
  CHECK_THROWS_AS(GenerateArtificial(std::vector{src}, table, lm, config, 3), Error);

  // A short n-best list falls back to the best output.
  auto nbest = DecodeCorpus(std::vector{src}, table, lm, config);
  auto three = ArtificialFromNBest(std::vector{src}, nbest, 3);
  CHECK(three[2][0] == three[0][0]);
  auto text = SerializeNBest(std::vector{src}, nbest);
  CHECK(text.rfind("0 ||| we went shopping on Saturday ||| ", 0) == 0);
}

TEST_CASE("grid search prefers weights that reproduce the references") {
  PhraseTable table;
  for (const char *w : {"a", "b"}) table.Add(MakePhrasePair({w}, {w}, 0.5, 1.0));
  table.Add(MakePhrasePair({"a"}, {"x"}, 0.5, 1.0));
  auto lm = NGramLM::Train(std::vector<Words>{{"x", "b"}, {"a", "b"}}, 2);
  std::vector<ParallelExample> dev = {{{"a", "b"}, {"x", "b"}, {}}};
  DecoderConfig base;
  FeatureVector keep = {0, 0, 0, -1, 0, 0};   // levenshtein penalty: identity wins
  FeatureVector change = {0, 0, 0, 1, 0, 0};  // rewards edits
  std::vector<FeatureVector> grid = {keep, change};
  CHECK(GridSearchWeights(dev, table, lm, base, grid) == change);
}

TEST_CASE("decoder preconditions") {
  PhraseTable table;
  auto lm = SmallLm(1, 2);
  DecoderConfig bad;
  bad.beam_width = 0;
  Words src = {"a"};
  CHECK_THROWS_AS(Decode(src, table, lm, bad), Error);
  CHECK_THROWS_AS(Decode(Words{}, table, lm, DecoderConfig{}), Error);
  // Unknown words pass through.
  CHECK(Decode(src, table, lm, DecoderConfig{}).front().output == src);
}

}  // namespace
}  // namespace aegen

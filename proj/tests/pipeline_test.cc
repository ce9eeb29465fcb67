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

#include "aegen/pipeline.h"

#include "aegen/eval.h"
#include "aegen/synthetic.h"
#include "doctest.h"

namespace aegen {
namespace {

SyntheticWorld SmallWorld() {
  SyntheticConfig config;
  config.train = 150;
  config.dev = 60;
  config.test = 0;
  config.clean = 200;
  return BuildSyntheticWorld(config);
}

DetectorConfig SmallDetector() {
  DetectorConfig config;
  config.embedding_dim = 6;
  config.hidden_dim = 6;
  config.ff_dim = 6;
  config.epochs = 2;
  config.batch_size = 16;
  return config;
}

TEST_CASE("gold labels") {
  auto world = SmallWorld();
  auto gold = GoldLabels(world.train);
  REQUIRE(gold.size() == world.train.size());
  for (size_t i = 0; i < gold.size(); ++i) {
    CHECK(gold[i].tokens == world.train[i].original.tokens);
    CHECK((gold[i].CountIncorrect() == 0) == world.train[i].edits.empty());
  }
}

TEST_CASE("combining training sets") {
  auto world = SmallWorld();
  auto base = GoldLabels(world.train);
  std::vector<std::vector<LabeledSentence>> versions = {{AllCorrect(world.clean[0])},
                                                        {AllCorrect(world.clean[1])}};
  auto two = CombineTraining(base, versions, 2);
  CHECK(two.size() == base.size() + 2);
  CHECK(two.back() == versions[1][0]);
  CHECK(CombineTraining(base, versions, 0).size() == base.size());
  CHECK_THROWS_AS(CombineTraining(base, versions, 3), Error);
}

TEST_CASE("pattern versions") {
  auto world = SmallWorld();
  PatternGeneratorConfig config;
  config.threshold = 2;
  auto versions = PatternVersions(world.train, world.clean, config, 2);
  REQUIRE(versions.size() == 2);
  size_t flagged = 0;
  for (const auto &v : versions) {
    REQUIRE(v.size() == world.clean.size());
    for (const auto &s : v) flagged += s.CountIncorrect();
  }
  CHECK(flagged > 0);
  CHECK(versions[0] != versions[1]);
  CHECK(PatternVersions(world.train, world.clean, config, 2) == versions);
}

TEST_CASE("mt versions") {
  auto world = SmallWorld();
  std::vector<TaggedSentence> clean(world.clean.begin(), world.clean.begin() + 40);
  MtGeneratorConfig config;
  config.lm_order = 3;
  config.decoder.beam_width = 20;
  auto versions = MtVersions(world.train, clean, config, 3);
  REQUIRE(versions.size() == 3);
  for (const auto &v : versions) REQUIRE(v.size() == clean.size());
  size_t differing = 0;
  for (size_t i = 0; i < clean.size(); ++i) differing += versions[0][i] != versions[2][i];
  CHECK(differing > 0);
}

TEST_CASE("versions experiment") {
  auto world = SmallWorld();
  auto base = GoldLabels(world.train);
  auto dev = GoldLabels(world.dev);
  PatternGeneratorConfig pat;
  pat.threshold = 2;
  auto versions = PatternVersions(world.train, world.clean, pat, 2);
  auto config = SmallDetector();
  std::vector<size_t> ks = {2, 0};
  auto rows = ExperimentVersions(base, versions, ks, dev, config);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].versions == 2);
  CHECK(rows[1].versions == 0);
  auto direct = TrainDetector(base, dev, config);
  CHECK(rows[1].dev_f05 == direct.dev_f05[direct.best_epoch - 1]);
  CHECK(rows[1].dev_f05 == Score(Predict(direct.model, dev), dev).f05);
}

}  // namespace
}  // namespace aegen

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

#include "aegen/synthetic.h"

#include <algorithm>

namespace aegen {
namespace {

struct Verb {
  const char *base, *third, *past;
};

constexpr Verb kTransitive[] = {{"like", "likes", "liked"},   {"watch", "watches", "watched"},
                                {"want", "wants", "wanted"},  {"need", "needs", "needed"},
                                {"carry", "carries", "carried"}, {"love", "loves", "loved"}};
constexpr Verb kIntransitive[] = {{"walk", "walks", "walked"},
                                  {"play", "plays", "played"},
                                  {"work", "works", "worked"},
                                  {"wait", "waits", "waited"}};
constexpr const char *kGerunds[] = {"shopping", "swimming", "running", "fishing"};
constexpr const char *kAnimate[][2] = {{"dog", "dogs"},         {"cat", "cats"},
                                       {"teacher", "teachers"}, {"student", "students"},
                                       {"girl", "girls"},       {"boy", "boys"}};
constexpr const char *kObjects[][2] = {{"book", "books"}, {"letter", "letters"},
                                       {"car", "cars"},   {"song", "songs"},
                                       {"film", "films"}, {"ball", "balls"}};
constexpr const char *kPlaces[] = {"park", "school", "garden", "library", "kitchen", "office"};
constexpr const char *kDays[] = {"Monday", "Tuesday", "Saturday", "Sunday"};
constexpr const char *kAdjectives[] = {"big", "small", "old", "new", "happy", "red"};
constexpr const char *kModals[] = {"can", "will", "must"};

template <typename T, size_t N>
const T &Pick(const T (&items)[N], Rng &rng) {
  return items[rng.UniformInt(N)];
}

class Builder {
 public:
  explicit Builder(Rng &rng) : rng_(rng) {}

  void Add(std::string surface, std::string pos) {
    tokens_.push_back({std::move(surface), std::move(pos)});
  }

  // Returns whether the subject is plural.
  bool Subject() {
    const bool plural = rng_.Coin();
    if (rng_.Uniform() < 0.4) {
      const char *pron[] = {plural ? "they" : "he", plural ? "we" : "she"};
      Add(pron[rng_.UniformInt(2)], plural ? "PPHS2" : "PPHS1");
    } else {
      Add("the", "AT");
      if (rng_.Uniform() < 0.3) Add(Pick(kAdjectives, rng_), "JJ");
      const auto &noun = Pick(kAnimate, rng_);
      Add(noun[plural ? 1 : 0], plural ? "NN2" : "NN1");
    }
    return plural;
  }

  void Object() {
    const auto &noun = Pick(kObjects, rng_);
    switch (rng_.UniformInt(4)) {
      case 0:
      case 1:
        Add(rng_.Coin() ? "the" : "a", "AT");
        if (tokens_.back().surface == "a") tokens_.back().pos = "AT1";
        if (rng_.Uniform() < 0.3) Add(Pick(kAdjectives, rng_), "JJ");
        Add(noun[0], "NN1");
        break;
      case 2:
        Add("the", "AT");
        Add(noun[1], "NN2");
        break;
      default:
        Add("many", "DA2");
        Add(noun[1], "NN2");
    }
  }

  void Place() {
    Add(rng_.Coin() ? "in" : "at", "II");
    Add("the", "AT");
    Add(Pick(kPlaces, rng_), "NN1");
  }

  void Day() {
    Add("on", "II");
    Add(Pick(kDays, rng_), "NPD1");
  }

  void Clause() {
    const bool plural = Subject();
    switch (rng_.UniformInt(6)) {
      case 0: {
        const Verb &v = Pick(kTransitive, rng_);
        Add(plural ? v.base : v.third, plural ? "VV0" : "VVZ");
        Object();
        if (rng_.Coin()) Place();
        break;
      }
      case 1: {
        const Verb &v = Pick(kIntransitive, rng_);
        Add(plural ? v.base : v.third, plural ? "VV0" : "VVZ");
        Place();
        if (rng_.Coin()) Day();
        break;
      }
      case 2:
        Add(Pick(kModals, rng_), "VM");
        Add(Pick(kTransitive, rng_).base, "VV0");
        Object();
        break;
      case 3:
        Add("went", "VVD");
        Add(Pick(kGerunds, rng_), "VVG");
        Day();
        break;
      case 4:
        Add(Pick(kTransitive, rng_).past, "VVD");
        Object();
        Place();
        break;
      default:
        Add(Pick(kIntransitive, rng_).past, "VVD");
        Place();
        Day();
    }
  }

  std::vector<Token> Take() { return std::move(tokens_); }

 private:
  Rng &rng_;
  std::vector<Token> tokens_;
};

std::vector<PlantedRule> MakeRules() {
  std::vector<PlantedRule> rules;
  auto add = [&](const char *type, std::vector<Token> correct, std::vector<Token> incorrect,
                 const char *left = "", const char *right = "") {
    rules.push_back({type, std::move(correct), std::move(incorrect), left, right});
  };
  for (const char *w : {"like", "watch", "want"}) {
    for (const auto &v : kTransitive) {
      if (std::string_view(v.base) == w) add("SVA", {{v.third, "VVZ"}}, {{v.base, "VV0"}});
    }
  }
  for (const auto &v : kIntransitive) {
    if (std::string_view(v.base) != "wait") add("SVA", {{v.third, "VVZ"}}, {{v.base, "VV0"}});
  }
  for (const char *w : {"like", "walk", "play", "need"}) {
    add("SVA", {{w, "VV0"}}, {{std::string(w) + "s", "VVZ"}});
  }
  const char *stems[] = {"shop", "swim", "run", "fish"};
  for (size_t i = 0; i < 4; ++i) add("Vform", {{kGerunds[i], "VVG"}}, {{stems[i], "VV0"}});
  add("Vform", {{"carry", "VV0"}}, {{"carried", "VVD"}}, "VM");
  add("Vform", {{"watch", "VV0"}}, {{"watched", "VVD"}}, "VM");

  add("Prep", {{"on", "II"}}, {{"in", "II"}}, "", "NPD1");
  add("Prep", {{"on", "II"}}, {{"at", "II"}}, "", "NPD1");
  add("Prep", {{"in", "II"}}, {{"at", "II"}}, "", "AT");
  add("Prep", {{"in", "II"}}, {{"on", "II"}}, "", "AT");
  add("Prep", {{"at", "II"}}, {{"in", "II"}}, "", "AT");
  add("Prep", {{"at", "II"}}, {{"on", "II"}}, "", "AT");

  add("Det", {{"the", "AT"}}, {{"a", "AT1"}}, "", "NN2");
  add("Det", {{"a", "AT1"}}, {{"an", "AT1"}}, "", "NN1");
  add("Det", {{"the", "AT"}}, {}, "", "NN1");
  add("Det", {}, {{"the", "AT"}}, "II", "NPD1");
  add("Det", {{"many", "DA2"}}, {{"much", "DA1"}}, "", "NN2");
  add("Det", {{"a", "AT1"}}, {}, "", "NN1");

  for (const auto &noun : kObjects) add("Noun", {{noun[1], "NN2"}}, {{noun[0], "NN1"}}, "DA2");

  add("Spell", {{"library", "NN1"}}, {{"libary", "NN1"}});
  add("Spell", {{"kitchen", "NN1"}}, {{"kichen", "NN1"}});
  add("Spell", {{"student", "NN1"}}, {{"studnet", "NN1"}});
  add("Spell", {{"happy", "JJ"}}, {{"hapy", "JJ"}});
  add("Spell", {{"Saturday", "NPD1"}}, {{"Saterday", "NPD1"}});
  add("Spell", {{"Tuesday", "NPD1"}}, {{"Tuseday", "NPD1"}});
  return rules;
}

bool RuleMatches(const PlantedRule &rule, const std::vector<Token> &tokens, size_t pos) {
  const size_t len = rule.correct.size();
  if (pos + len > tokens.size()) return false;
  for (size_t k = 0; k < len; ++k) {
    if (!(tokens[pos + k] == rule.correct[k])) return false;
  }
  if (!rule.left_tag.empty() && (pos == 0 || tokens[pos - 1].pos != rule.left_tag)) {
    return false;
  }
  if (!rule.right_tag.empty() &&
      (pos + len >= tokens.size() || tokens[pos + len].pos != rule.right_tag)) {
    return false;
  }
  return !(len == 0 && (pos == 0 || pos == tokens.size()));
}

int SampleCount(const std::map<int, double> &dist, Rng &rng) {
  std::vector<int> counts;
  std::vector<double> probs;
  for (auto [c, p] : dist) {
    counts.push_back(c);
    probs.push_back(p);
  }
  size_t pick = rng.Categorical(probs);
  return pick < counts.size() ? counts[pick] : 0;
}

std::vector<AnnotatedPair> MakePairs(size_t n, const SyntheticConfig &config, Rng &rng) {
  std::vector<AnnotatedPair> out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    TaggedSentence clean = GenerateCleanSentence(rng);
    clean.id = std::to_string(i);
    size_t errors = 0;
    if (rng.Uniform() < config.error_sentence_rate) {
      errors = static_cast<size_t>(SampleCount(config.error_counts, rng));
    }
    out.push_back(PlantErrors(clean, errors, rng));
  }
  return out;
}

}  // namespace

const std::vector<PlantedRule> &PlantedRules() {
  static const std::vector<PlantedRule> rules = MakeRules();
  return rules;
}

TaggedSentence GenerateCleanSentence(Rng &rng) {
  Builder b(rng);
  b.Clause();
  if (rng.Uniform() < 0.2) {
    b.Add("and", "CC");
    b.Clause();
  }
  b.Add(".", "YSTP");
  TaggedSentence s;
  s.tokens = b.Take();
  return s;
}

AnnotatedPair PlantErrors(const TaggedSentence &clean, size_t n_errors, Rng &rng) {
  const auto &rules = PlantedRules();
  const auto &tokens = clean.tokens;
  struct Site {
    size_t rule, pos;
  };
  std::vector<Site> sites;
  for (size_t r = 0; r < rules.size(); ++r) {
    for (size_t pos = 0; pos <= tokens.size(); ++pos) {
      if (RuleMatches(rules[r], tokens, pos)) sites.push_back({r, pos});
    }
  }
  rng.Shuffle(sites);

  // Chosen sites must not touch each other, so their contexts stay intact.
  std::vector<bool> claimed(tokens.size() + 2, false);
  std::vector<Site> chosen;
  for (const Site &s : sites) {
    if (chosen.size() >= n_errors) break;
    const size_t lo = s.pos, hi = s.pos + rules[s.rule].correct.size() + 2;
    bool free = true;
    for (size_t k = lo; k < hi; ++k) free = free && !claimed[k];
    if (!free) continue;
    for (size_t k = lo; k < hi; ++k) claimed[k] = true;
    chosen.push_back(s);
  }
  std::sort(chosen.begin(), chosen.end(), [](const Site &a, const Site &b) { return a.pos < b.pos; });

  AnnotatedPair pair;
  pair.corrected = clean;
  pair.original.id = clean.id;
  size_t next = 0;
  for (const Site &s : chosen) {
    const PlantedRule &rule = rules[s.rule];
    for (; next < s.pos; ++next) pair.original.tokens.push_back(tokens[next]);
    Edit edit;
    edit.original.begin = pair.original.tokens.size();
    edit.corrected = {s.pos, s.pos + rule.correct.size()};
    edit.type = rule.type;
    for (const auto &t : rule.correct) edit.replacement.push_back(t.surface);
    for (const auto &t : rule.incorrect) pair.original.tokens.push_back(t);
    edit.original.end = pair.original.tokens.size();
    next = s.pos + rule.correct.size();
    pair.edits.push_back(std::move(edit));
  }
  for (; next < tokens.size(); ++next) pair.original.tokens.push_back(tokens[next]);
  return pair;
}

SyntheticWorld BuildSyntheticWorld(const SyntheticConfig &config) {
  SyntheticWorld world;
  Rng train_rng(DeriveSeed(config.seed, 0));
  Rng dev_rng(DeriveSeed(config.seed, 1));
  Rng test_rng(DeriveSeed(config.seed, 2));
  Rng clean_rng(DeriveSeed(config.seed, 3));
  world.train = MakePairs(config.train, config, train_rng);
  world.dev = MakePairs(config.dev, config, dev_rng);
  world.test = MakePairs(config.test, config, test_rng);
  for (size_t i = 0; i < config.clean; ++i) {
    TaggedSentence s = GenerateCleanSentence(clean_rng);
    s.id = std::to_string(i);
    world.clean.push_back(std::move(s));
  }
  return world;
}

}  // namespace aegen

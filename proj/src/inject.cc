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

#include "aegen/inject.h"

#include <algorithm>
#include <cmath>

namespace aegen {
namespace {

constexpr uint64_t kShuffleStream = 0xFFFFFFFFFFFFFFFFULL;

}  // namespace

void InjectionConfig::Validate() const {
  background.Validate();
  if (max_attempts < 1) throw Error("max attempts per sentence must be at least 1");
  if (!(type_floor >= 0.0)) throw Error("type floor must be non-negative");
}

TypeBalancer::TypeBalancer(std::map<std::string, double> targets, double floor)
    : targets_(std::move(targets)), floor_(floor) {}

double TypeBalancer::Factor(const std::string &type) const {
  auto t = targets_.find(type);
  double target = t == targets_.end() ? 0.0 : t->second;
  double realized = 0.0;
  if (total_ > 0) {
    auto r = realized_.find(type);
    if (r != realized_.end()) {
      realized = static_cast<double>(r->second) / static_cast<double>(total_);
    }
  }
  return std::max(0.01, target - realized + floor_);
}

void TypeBalancer::Record(const std::string &type) {
  ++realized_[type];
  ++total_;
}

int SampleErrorCount(const ErrorCountDistribution &dist, Rng &rng) {
  std::vector<int> counts;
  std::vector<double> probs;
  for (auto [count, p] : dist.count_probs) {
    counts.push_back(count);
    probs.push_back(p);
  }
  size_t pick = rng.Categorical(probs);
  return pick < counts.size() ? counts[pick] : 0;
}

int SampleNonzeroErrorCount(const ErrorCountDistribution &dist, Rng &rng) {
  std::vector<int> counts;
  std::vector<double> probs;
  for (auto [count, p] : dist.count_probs) {
    if (count < 1) continue;
    counts.push_back(count);
    probs.push_back(p);
  }
  size_t pick = rng.Categorical(probs);
  return pick < counts.size() ? counts[pick] : 0;
}

InjectionRecord CorruptSentence(const TaggedSentence &sentence,
                                const PatternStore &store, size_t n_errors,
                                TypeBalancer &quota, Rng &rng,
                                size_t max_attempts) {
  auto matches = store.Match(sentence);
  return CorruptSentence(sentence, store, matches, n_errors, quota, rng, max_attempts);
}

InjectionRecord CorruptSentence(const TaggedSentence &sentence,
                                const PatternStore &store,
                                std::span<const PatternMatch> matches,
                                size_t n_errors, TypeBalancer &quota, Rng &rng,
                                size_t max_attempts) {
  InjectionRecord record;
  record.sentence_id = sentence.id;
  record.requested = n_errors;

  std::vector<PatternMatch> candidates(matches.begin(), matches.end());
  std::vector<bool> claimed(sentence.size(), false);
  std::vector<double> weights;
  for (size_t attempt = 0;
       attempt < max_attempts && record.applied.size() < n_errors && !candidates.empty();
       ++attempt) {
    weights.clear();
    for (const auto &m : candidates) {
      const ErrorPattern &p = store.patterns()[m.pattern];
      weights.push_back(static_cast<double>(p.count) * quota.Factor(p.type));
    }
    size_t pick = rng.Categorical(weights);
    if (pick >= candidates.size()) break;

    const PatternMatch chosen = candidates[pick];
    const ErrorPattern &p = store.patterns()[chosen.pattern];
    record.applied.push_back(chosen);
    quota.Record(p.type);
    for (size_t k = 0; k < p.correct.size(); ++k) claimed[chosen.position + k] = true;

    std::erase_if(candidates, [&](const PatternMatch &m) {
      const size_t len = store.patterns()[m.pattern].correct.size();
      for (size_t k = 0; k < len; ++k) {
        if (claimed[m.position + k]) return true;
      }
      return false;
    });
  }
  record.result = ApplyReversed(sentence, store, record.applied);
  return record;
}

std::vector<InjectionRecord> CorruptCorpus(std::span<const TaggedSentence> corpus,
                                           const PatternStore &store,
                                           const InjectionConfig &config) {
  config.Validate();
  const size_t n = corpus.size();

  std::vector<std::vector<PatternMatch>> matches(n);
  ParallelFor(n, config.threads, [&](size_t i) { matches[i] = store.Match(corpus[i]); });

  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  Rng shuffle_rng(DeriveSeed(config.seed, kShuffleStream));
  shuffle_rng.Shuffle(order);
  const auto untouched_count = static_cast<size_t>(
      std::llround(config.background.correct_proportion * static_cast<double>(n)));
  std::vector<bool> untouched(n, false);
  for (size_t i = 0; i < std::min(untouched_count, n); ++i) untouched[order[i]] = true;

  TypeBalancer quota(config.background.type_probs, config.type_floor);
  std::vector<InjectionRecord> records;
  records.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    Rng rng(DeriveSeed(config.seed, i));
    size_t n_errors = 0;
    if (!untouched[i]) {
      n_errors = static_cast<size_t>(SampleNonzeroErrorCount(config.background, rng));
    }
    records.push_back(CorruptSentence(corpus[i], store, matches[i], n_errors, quota,
                                      rng, config.max_attempts));
  }
  return records;
}

std::vector<std::vector<InjectionRecord>> GenerateVersions(
    std::span<const TaggedSentence> corpus, const PatternStore &store,
    const InjectionConfig &config, size_t k) {
  if (k < 1) throw Error("number of versions must be at least 1");
  std::vector<std::vector<InjectionRecord>> versions;
  for (size_t j = 0; j < k; ++j) {
    InjectionConfig version = config;
    version.seed = config.seed + j;
    versions.push_back(CorruptCorpus(corpus, store, version));
  }
  return versions;
}

std::vector<LabeledSentence> Results(std::span<const InjectionRecord> records) {
  std::vector<LabeledSentence> out;
  out.reserve(records.size());
  for (const auto &r : records) out.push_back(r.result);
  return out;
}

std::string SerializeAuditLog(std::span<const InjectionRecord> records,
                              const PatternStore &store) {
  std::string out;
  for (const auto &r : records) {
    nlohmann::json applied = nlohmann::json::array();
    for (const auto &m : r.applied) {
      const ErrorPattern &p = store.patterns().at(m.pattern);
      applied.push_back({{"position", m.position}, {"type", p.type}, {"pattern", p.ToString()}});
    }
    nlohmann::json record = {{"id", r.sentence_id},
                             {"requested", r.requested},
                             {"applied", applied},
                             {"exhausted", r.exhausted()}};
    out += record.dump() + "\n";
  }
  return out;
}

}  // namespace aegen

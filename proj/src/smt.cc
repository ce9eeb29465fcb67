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
#include <deque>
#include <limits>
#include <queue>
#include <set>
#include <unordered_map>

#include "aegen/base.h"

namespace aegen {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr size_t kNone = std::numeric_limits<size_t>::max();

std::vector<char32_t> CodePoints(std::string_view s) {
  std::vector<char32_t> out;
  size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    size_t extra = c < 0x80 ? 0 : (c & 0xE0) == 0xC0 ? 1 : (c & 0xF0) == 0xE0 ? 2
                                                      : (c & 0xF8) == 0xF0 ? 3 : 0;
    if (i + extra >= s.size() + (extra ? 0 : 1)) extra = 0;
    char32_t cp = extra == 0 ? c : c & (0x3F >> extra);
    bool ok = true;
    for (size_t k = 1; k <= extra; ++k) {
      auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (cc & 0x3F);
    }
    if (!ok) {
      cp = c;
      extra = 0;
    }
    out.push_back(cp);
    i += extra + 1;
  }
  return out;
}

bool BetterTarget(const PhrasePair &a, const PhrasePair &b) {
  if (a.p_target_given_source != b.p_target_given_source) {
    return a.p_target_given_source > b.p_target_given_source;
  }
  return a.target < b.target;
}

// A phrase pair applicable to a source span, with its feature values.
struct Option {
  const PhrasePair *pair;
  Span span;
  std::vector<WordId> target_ids;
  FeatureVector features;
  double score;
};

struct Arc {
  size_t from;
  const Option *option;  // null for the final </s> arc
  FeatureVector features;
  double delta;
};

struct Node {
  size_t covered = 0;
  std::vector<WordId> state;
  double best = kNegInf;
  std::vector<Arc> arcs;
  bool alive = true;
};

struct StateHash {
  size_t operator()(const std::vector<WordId> &v) const {
    uint64_t h = 1469598103934665603ULL;
    for (WordId w : v) h = (h ^ w) * 1099511628211ULL;
    return static_cast<size_t>(h);
  }
};

// Entry of a node's k-best list: the rank-th best derivation of arc's
// source node extended by arc.
struct KEntry {
  double score;
  size_t arc;
  size_t rank;
};

std::vector<KEntry> MergeKBest(const std::vector<Arc> &arcs,
                               const std::vector<std::vector<KEntry>> &kbest,
                               size_t k) {
  auto worse = [&](const KEntry &a, const KEntry &b) {
    if (a.score != b.score) return a.score < b.score;
    if (a.arc != b.arc) return a.arc > b.arc;
    return a.rank > b.rank;
  };
  std::priority_queue<KEntry, std::vector<KEntry>, decltype(worse)> heap(worse);
  for (size_t a = 0; a < arcs.size(); ++a) {
    const auto &pred = kbest[arcs[a].from];
    if (!pred.empty()) heap.push({pred[0].score + arcs[a].delta, a, 0});
  }
  std::vector<KEntry> out;
  while (!heap.empty() && out.size() < k) {
    KEntry top = heap.top();
    heap.pop();
    out.push_back(top);
    const auto &pred = kbest[arcs[top.arc].from];
    if (top.rank + 1 < pred.size()) {
      heap.push({pred[top.rank + 1].score + arcs[top.arc].delta, top.arc, top.rank + 1});
    }
  }
  return out;
}

}  // namespace

int CharLevenshtein(std::string_view a, std::string_view b) {
  auto x = CodePoints(a);
  auto y = CodePoints(b);
  std::vector<int> prev(y.size() + 1), cur(y.size() + 1);
  for (size_t j = 0; j <= y.size(); ++j) prev[j] = static_cast<int>(j);
  for (size_t i = 1; i <= x.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (size_t j = 1; j <= y.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x[i - 1] == y[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[y.size()];
}

PhrasePair MakePhrasePair(std::vector<std::string> source,
                          std::vector<std::string> target, double p_tgs,
                          double p_sgt) {
  PhrasePair pair;
  pair.levenshtein = CharLevenshtein(Join(source, " "), Join(target, " "));
  pair.source = std::move(source);
  pair.target = std::move(target);
  pair.p_target_given_source = p_tgs;
  pair.p_source_given_target = p_sgt;
  return pair;
}

std::vector<ParallelExample> ParallelFromPairs(std::span<const AnnotatedPair> pairs) {
  std::vector<ParallelExample> out;
  out.reserve(pairs.size());
  for (const auto &pair : pairs) {
    ParallelExample ex;
    ex.source = Surfaces(pair.corrected);
    ex.target = Surfaces(pair.original);
    ex.script = AlignTokens(ex.source, ex.target);
    out.push_back(std::move(ex));
  }
  return out;
}

PhraseTable PhraseTable::Extract(std::span<const ParallelExample> examples,
                                 size_t max_len, double identity_count) {
  if (max_len < 1) throw Error("maximum phrase length must be at least 1");
  using Phrase = std::vector<std::string>;
  std::map<std::pair<Phrase, Phrase>, double> counts;
  std::set<std::string> source_vocab;

  for (const auto &ex : examples) {
    const size_t ns = ex.source.size(), nt = ex.target.size();
    // Alignment links from Match/Substitute steps; -1 = unaligned.
    std::vector<long> s2t(ns, -1), t2s(nt, -1);
    for (const auto &op : ex.script.ops) {
      if (op.orig_index && op.corr_index) {
        if (*op.orig_index >= ns || *op.corr_index >= nt) {
          throw Error("alignment does not fit its sentence pair");
        }
        s2t[*op.orig_index] = static_cast<long>(*op.corr_index);
        t2s[*op.corr_index] = static_cast<long>(*op.orig_index);
      }
    }
    for (const auto &w : ex.source) source_vocab.insert(w);

    for (size_t s1 = 0; s1 < ns; ++s1) {
      for (size_t s2 = s1; s2 < ns && s2 - s1 + 1 <= max_len; ++s2) {
        long tmin = std::numeric_limits<long>::max(), tmax = -1;
        for (size_t s = s1; s <= s2; ++s) {
          if (s2t[s] >= 0) {
            tmin = std::min(tmin, s2t[s]);
            tmax = std::max(tmax, s2t[s]);
          }
        }
        if (tmax < 0) continue;
        bool consistent = true;
        for (long t = tmin; t <= tmax && consistent; ++t) {
          long s = t2s[static_cast<size_t>(t)];
          if (s >= 0 && (static_cast<size_t>(s) < s1 || static_cast<size_t>(s) > s2)) {
            consistent = false;
          }
        }
        if (!consistent) continue;
        // Grow over unaligned target words on both edges.
        long lo = tmin, hi = tmax;
        while (lo > 0 && t2s[static_cast<size_t>(lo - 1)] < 0) --lo;
        while (hi + 1 < static_cast<long>(nt) && t2s[static_cast<size_t>(hi + 1)] < 0) ++hi;
        Phrase src(ex.source.begin() + static_cast<long>(s1),
                   ex.source.begin() + static_cast<long>(s2 + 1));
        for (long t1 = tmin; t1 >= lo; --t1) {
          for (long t2 = tmax; t2 <= hi; ++t2) {
            if (static_cast<size_t>(t2 - t1 + 1) > max_len) break;
            Phrase tgt(ex.target.begin() + t1, ex.target.begin() + t2 + 1);
            counts[{src, tgt}] += 1.0;
          }
        }
      }
    }
  }

  for (const auto &w : source_vocab) {
    auto &c = counts[{Phrase{w}, Phrase{w}}];
    if (c == 0.0) c = identity_count;
  }

  std::map<Phrase, double> source_totals, target_totals;
  for (const auto &[key, c] : counts) {
    source_totals[key.first] += c;
    target_totals[key.second] += c;
  }
  PhraseTable table;
  for (const auto &[key, c] : counts) {
    if (!(c > 0.0)) continue;
    table.Add(MakePhrasePair(key.first, key.second, c / source_totals[key.first],
                             c / target_totals[key.second]));
  }
  return table;
}

void PhraseTable::Add(PhrasePair pair) {
  if (pair.source.empty() || pair.target.empty()) {
    throw Error("phrase pairs need non-empty sides");
  }
  for (double p : {pair.p_target_given_source, pair.p_source_given_target}) {
    if (!(p > 0.0 && p <= 1.0)) throw Error("phrase probability outside (0, 1]");
  }
  max_length_ = std::max(max_length_, pair.source.size());
  auto &list = entries_[Join(pair.source, " ")];
  auto pos = std::upper_bound(list.begin(), list.end(), pair, BetterTarget);
  list.insert(pos, std::move(pair));
}

const std::vector<PhrasePair> *PhraseTable::Lookup(const std::string &source) const {
  auto it = entries_.find(source);
  return it == entries_.end() ? nullptr : &it->second;
}

size_t PhraseTable::size() const {
  size_t n = 0;
  for (const auto &[key, list] : entries_) n += list.size();
  return n;
}

void PhraseTable::Prune(size_t limit) {
  for (auto &[key, list] : entries_) {
    if (list.size() > limit) list.resize(limit);
  }
}

std::string PhraseTable::Serialize() const {
  std::string out;
  for (const auto &[key, list] : entries_) {
    for (const auto &p : list) {
      out += key + " ||| " + Join(p.target, " ") + " ||| " +
             FormatDouble(p.p_target_given_source) + " " +
             FormatDouble(p.p_source_given_target) + " " +
             std::to_string(p.levenshtein) + " ||| \n";
    }
  }
  return out;
}

PhraseTable PhraseTable::Parse(std::string_view text) {
  PhraseTable table;
  int line_no = 0;
  for (auto line : Split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    size_t start = 0;
    for (;;) {
      size_t pos = line.find("|||", start);
      fields.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
      if (pos == std::string_view::npos) break;
      start = pos + 3;
    }
    if (fields.size() < 3) throw ParseError("expected 'source ||| target ||| scores'", line_no);
    auto src = SplitWhitespace(fields[0]);
    auto tgt = SplitWhitespace(fields[1]);
    auto scores = SplitWhitespace(fields[2]);
    if (src.empty() || tgt.empty()) throw ParseError("empty phrase", line_no);
    if (scores.size() != 3) throw ParseError("expected 3 scores: p(t|s) p(s|t) lev", line_no);
    PhrasePair pair;
    for (auto w : src) pair.source.emplace_back(w);
    for (auto w : tgt) pair.target.emplace_back(w);
    pair.p_target_given_source = ParseDouble(scores[0], line_no);
    pair.p_source_given_target = ParseDouble(scores[1], line_no);
    pair.levenshtein = static_cast<int>(ParseInt(scores[2], line_no));
    if (pair.levenshtein != CharLevenshtein(Join(pair.source, " "), Join(pair.target, " "))) {
      throw ParseError("levenshtein feature disagrees with the phrase pair", line_no);
    }
    try {
      table.Add(std::move(pair));
    } catch (const Error &e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return table;
}

void DecoderConfig::Validate() const {
  if (beam_width < 1) throw Error("beam width must be at least 1");
  if (nbest < 1) throw Error("n-best size must be at least 1");
}

double Dot(const FeatureVector &weights, const FeatureVector &features) {
  double total = 0.0;
  for (size_t i = 0; i < kNumFeatures; ++i) total += weights[i] * features[i];
  return total;
}

FeatureVector PhraseFeatures(const PhrasePair &pair) {
  FeatureVector f{};
  f[kTargetGivenSource] = std::log(pair.p_target_given_source);
  f[kSourceGivenTarget] = std::log(pair.p_source_given_target);
  f[kLevenshtein] = pair.levenshtein;
  f[kWordPenalty] = static_cast<double>(pair.target.size());
  f[kPhrasePenalty] = 1.0;
  return f;
}

std::vector<Derivation> Decode(std::span<const std::string> source,
                               const PhraseTable &table, const NGramLM &lm,
                               const DecoderConfig &config) {
  config.Validate();
  const size_t n = source.size();
  if (n == 0) throw Error("cannot decode an empty sentence");
  const auto &w = config.weights;
  const size_t state_len = static_cast<size_t>(std::max(lm.order() - 1, 0));

  // Translation options by start position.
  std::deque<PhrasePair> passthrough;
  std::vector<std::vector<Option>> options(n);
  for (size_t i = 0; i < n; ++i) {
    std::string key;
    for (size_t j = i; j < n && j - i < std::max<size_t>(table.max_length(), 1); ++j) {
      if (j > i) key += ' ';
      key += source[j];
      const auto *list = table.Lookup(key);
      if (list == nullptr) continue;
      for (const auto &pair : *list) options[i].push_back({&pair, {i, j + 1}, {}, {}, 0.0});
    }
    bool has_single = std::any_of(options[i].begin(), options[i].end(),
                                  [](const Option &o) { return o.span.size() == 1; });
    if (!has_single) {
      passthrough.push_back(MakePhrasePair({source[i]}, {source[i]}, 1.0, 1.0));
      options[i].push_back({&passthrough.back(), {i, i + 1}, {}, {}, 0.0});
    }
    for (auto &o : options[i]) {
      for (const auto &t : o.pair->target) o.target_ids.push_back(lm.Id(t));
      o.features = PhraseFeatures(*o.pair);
      o.score = Dot(w, o.features);
    }
  }

  std::vector<Node> nodes;
  std::vector<std::vector<size_t>> stacks(n + 1);
  std::vector<std::unordered_map<std::vector<WordId>, size_t, StateHash>> index(n + 1);
  {
    Node root;
    root.state.push_back(lm.start_id());
    if (root.state.size() > state_len) root.state.erase(root.state.begin());
    root.best = 0.0;
    nodes.push_back(std::move(root));
    stacks[0].push_back(0);
  }

  std::vector<WordId> context;
  for (size_t i = 0; i < n; ++i) {
    // Histogram pruning; ties keep creation order.
    auto &stack = stacks[i];
    std::stable_sort(stack.begin(), stack.end(),
                     [&](size_t a, size_t b) { return nodes[a].best > nodes[b].best; });
    for (size_t r = config.beam_width; r < stack.size(); ++r) nodes[stack[r]].alive = false;
    if (stack.size() > config.beam_width) stack.resize(config.beam_width);

    for (size_t from : stack) {
      for (const Option &o : options[i]) {
        context = nodes[from].state;
        double lm_score = 0.0;
        for (WordId t : o.target_ids) {
          lm_score += lm.LogProb(t, context);
          context.push_back(t);
        }
        if (context.size() > state_len) {
          context.erase(context.begin(), context.end() - static_cast<long>(state_len));
        }
        Arc arc{from, &o, o.features, 0.0};
        arc.features[kLanguageModel] = lm_score;
        arc.delta = o.score + w[kLanguageModel] * lm_score;
        const double total = nodes[from].best + arc.delta;

        const size_t j = o.span.end;
        auto [it, inserted] = index[j].try_emplace(context, nodes.size());
        if (inserted) {
          Node node;
          node.covered = j;
          node.state = context;
          nodes.push_back(std::move(node));
          stacks[j].push_back(it->second);
        }
        Node &target = nodes[it->second];
        target.best = std::max(target.best, total);
        target.arcs.push_back(std::move(arc));
      }
    }
  }

  // Goal arcs close every complete hypothesis with </s>.
  Node goal;
  for (size_t from : stacks[n]) {
    context = nodes[from].state;
    double lm_score = lm.LogProb(lm.end_id(), context);
    Arc arc{from, nullptr, {}, w[kLanguageModel] * lm_score};
    arc.features[kLanguageModel] = lm_score;
    goal.arcs.push_back(std::move(arc));
  }
  if (goal.arcs.size() > config.beam_width) {
    // The last stack is pruned like the others.
    std::vector<size_t> order(stacks[n].begin(), stacks[n].end());
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return nodes[a].best > nodes[b].best; });
    std::set<size_t> keep(order.begin(), order.begin() + static_cast<long>(config.beam_width));
    std::erase_if(goal.arcs, [&](const Arc &a) { return !keep.count(a.from); });
  }

  // k-best derivations over the search graph, widened until enough
  // distinct outputs are found or the graph is exhausted.
  std::vector<Derivation> result;
  for (size_t k = config.nbest;; k *= 4) {
    std::vector<std::vector<KEntry>> kbest(nodes.size());
    kbest[0] = {{0.0, kNone, 0}};
    for (size_t i = 1; i <= n; ++i) {
      for (size_t v : stacks[i]) kbest[v] = MergeKBest(nodes[v].arcs, kbest, k);
    }
    std::vector<KEntry> finals = MergeKBest(goal.arcs, kbest, k);

    result.clear();
    std::set<std::vector<std::string>> seen;
    for (const KEntry &entry : finals) {
      Derivation d;
      d.score = entry.score;
      std::vector<const Arc *> path;
      const Arc *arc = &goal.arcs[entry.arc];
      size_t rank = entry.rank;
      for (;;) {
        path.push_back(arc);
        const auto &pred = kbest[arc->from];
        if (arc->from == 0) break;
        const KEntry &e = pred[rank];
        arc = &nodes[arc->from].arcs[e.arc];
        rank = e.rank;
      }
      std::reverse(path.begin(), path.end());
      for (const Arc *a : path) {
        for (size_t f = 0; f < kNumFeatures; ++f) d.features[f] += a->features[f];
        if (a->option != nullptr) {
          d.segmentation.push_back({a->option->span, *a->option->pair});
          for (const auto &t : a->option->pair->target) d.output.push_back(t);
        }
      }
      if (seen.insert(d.output).second) result.push_back(std::move(d));
      if (result.size() == config.nbest) break;
    }
    if (result.size() >= config.nbest || finals.size() < k || k >= config.nbest * 256) break;
  }
  return result;
}

std::vector<std::vector<Derivation>> DecodeCorpus(
    std::span<const TaggedSentence> corpus, const PhraseTable &table,
    const NGramLM &lm, const DecoderConfig &config) {
  std::vector<std::vector<Derivation>> out(corpus.size());
  ParallelFor(corpus.size(), config.threads, [&](size_t i) {
    auto words = Surfaces(corpus[i]);
    out[i] = Decode(words, table, lm, config);
  });
  return out;
}

LabeledSentence LabelOutput(const TaggedSentence &source,
                            std::span<const std::string> output) {
  auto src = Surfaces(source);
  EditScript script = AlignTokens(output, src);
  TaggedSentence sentence;
  sentence.id = source.id;
  for (const auto &w : output) sentence.tokens.push_back({w, std::string(kUntagged)});
  for (const auto &op : script.ops) {
    if (op.kind == EditKind::kMatch) {
      sentence.tokens[*op.orig_index].pos = source.tokens[*op.corr_index].pos;
    }
  }
  return LabelFromAlignment(sentence, script);
}

std::vector<std::vector<LabeledSentence>> ArtificialFromNBest(
    std::span<const TaggedSentence> corpus,
    std::span<const std::vector<Derivation>> nbest, size_t k) {
  if (k < 1) throw Error("number of versions must be at least 1");
  if (nbest.size() != corpus.size()) throw Error("n-best lists do not match the corpus");
  std::vector<std::vector<LabeledSentence>> versions(k);
  for (size_t j = 0; j < k; ++j) {
    versions[j].reserve(corpus.size());
    for (size_t i = 0; i < corpus.size(); ++i) {
      if (nbest[i].empty()) {
        versions[j].push_back(AllCorrect(corpus[i]));
        continue;
      }
      const Derivation &d = j < nbest[i].size() ? nbest[i][j] : nbest[i][0];
      versions[j].push_back(LabelOutput(corpus[i], d.output));
    }
  }
  return versions;
}

std::vector<std::vector<LabeledSentence>> GenerateArtificial(
    std::span<const TaggedSentence> corpus, const PhraseTable &table,
    const NGramLM &lm, const DecoderConfig &config, size_t k) {
  if (k > config.nbest) throw Error("more versions requested than the n-best size");
  auto nbest = DecodeCorpus(corpus, table, lm, config);
  return ArtificialFromNBest(corpus, nbest, k);
}

std::string SerializeNBest(std::span<const TaggedSentence> corpus,
                           std::span<const std::vector<Derivation>> nbest) {
  std::string out;
  for (size_t i = 0; i < nbest.size(); ++i) {
    for (const auto &d : nbest[i]) {
      out += corpus[i].id + " ||| " + Join(d.output, " ") + " |||";
      for (double f : d.features) out += " " + FormatDouble(f);
      out += " ||| " + FormatDouble(d.score) + "\n";
    }
  }
  return out;
}

FeatureVector GridSearchWeights(std::span<const ParallelExample> dev,
                                const PhraseTable &table, const NGramLM &lm,
                                const DecoderConfig &base,
                                std::span<const FeatureVector> candidates) {
  if (candidates.empty()) throw Error("weight grid is empty");
  FeatureVector best = candidates[0];
  double best_distance = std::numeric_limits<double>::infinity();
  for (const auto &weights : candidates) {
    DecoderConfig config = base;
    config.weights = weights;
    config.nbest = 1;
    double total = 0.0;
    for (const auto &ex : dev) {
      auto d = Decode(ex.source, table, lm, config);
      total += static_cast<double>(AlignTokens(d.front().output, ex.target).cost);
    }
    double mean = dev.empty() ? 0.0 : total / static_cast<double>(dev.size());
    if (mean < best_distance) {
      best_distance = mean;
      best = weights;
    }
  }
  return best;
}

}  // namespace aegen

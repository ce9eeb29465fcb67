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

#include "aegen/lm.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "aegen/base.h"

namespace aegen {
namespace {

constexpr double kLn10 = 2.302585092994045684;
// log10 probability written for <s>, which is never predicted.
constexpr double kNoProb = -99.0;
constexpr double kFallbackDiscount = 0.75;

struct ContextStats {
  double total = 0.0;                 // S(h)
  std::array<size_t, 3> buckets{};    // N1, N2, N3+
};

double Discount(const std::array<double, 3> &d, uint64_t count) {
  if (count == 0) return 0.0;
  return d[std::min<uint64_t>(count, 3) - 1];
}

}  // namespace

size_t NGramLM::NGramHash::operator()(const NGram &g) const {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (WordId w : g) {
    h ^= w;
    h *= 0x100000001b3ULL;
  }
  return static_cast<size_t>(h ^ (h >> 29));
}

WordId NGramLM::Intern(std::string_view word) {
  auto it = ids_.find(std::string(word));
  if (it != ids_.end()) return it->second;
  auto id = static_cast<WordId>(words_.size());
  words_.emplace_back(word);
  ids_.emplace(std::string(word), id);
  return id;
}

WordId NGramLM::Id(std::string_view word) const {
  auto it = ids_.find(std::string(word));
  return it == ids_.end() ? unk_ : it->second;
}

std::vector<WordId> NGramLM::PredictableWords() const {
  std::vector<WordId> out;
  for (WordId id = 0; id < words_.size(); ++id) {
    if (id != bos_) out.push_back(id);
  }
  return out;
}

NGramLM NGramLM::Train(std::span<const TaggedSentence> sentences, int order) {
  std::vector<std::vector<std::string>> words;
  words.reserve(sentences.size());
  for (const auto &s : sentences) words.push_back(Surfaces(s));
  return Train(words, order);
}

NGramLM NGramLM::Train(std::span<const std::vector<std::string>> sentences,
                       int order) {
  if (order < 1) throw Error("language model order must be at least 1");
  if (sentences.empty()) throw Error("language model training corpus is empty");

  NGramLM lm;
  lm.order_ = order;
  lm.bos_ = lm.Intern(kSentenceStart);
  lm.eos_ = lm.Intern(kSentenceEnd);
  lm.unk_ = lm.Intern(kUnknownWord);
  const auto n_orders = static_cast<size_t>(order);

  // Raw counts of every n-gram that predicts a word (never <s>).
  std::vector<std::unordered_map<NGram, uint64_t, NGramHash>> raw(n_orders);
  for (const auto &sentence : sentences) {
    NGram padded{lm.bos_};
    for (const auto &w : sentence) {
      if (w == kSentenceStart || w == kSentenceEnd) {
        throw Error("training sentence contains reserved symbol '" + w + "'");
      }
      padded.push_back(lm.Intern(w));
    }
    padded.push_back(lm.eos_);
    for (size_t end = 1; end < padded.size(); ++end) {
      for (size_t n = 1; n <= n_orders && n <= end + 1; ++n) {
        NGram g(padded.begin() + static_cast<long>(end + 1 - n),
                padded.begin() + static_cast<long>(end + 1));
        ++raw[n - 1][g];
      }
    }
  }

  // Adjusted counts: raw at the top order and for <s>-initial n-grams,
  // left-continuation counts otherwise.
  std::vector<std::unordered_map<NGram, uint64_t, NGramHash>> adjusted(n_orders);
  for (size_t n = 1; n <= n_orders; ++n) {
    for (const auto &[g, c] : raw[n - 1]) {
      if (n == n_orders || g.front() == lm.bos_) adjusted[n - 1][g] = c;
    }
  }
  for (size_t n = 2; n <= n_orders; ++n) {
    for (const auto &[g, c] : raw[n - 1]) {
      NGram suffix(g.begin() + 1, g.end());
      ++adjusted[n - 2][suffix];
    }
  }

  // Discounts per order from count-of-counts.
  lm.discounts_.assign(n_orders, {kFallbackDiscount, kFallbackDiscount, kFallbackDiscount});
  for (size_t n = 1; n <= n_orders; ++n) {
    std::array<double, 5> cc{};  // cc[k] = number of n-grams with count k
    for (const auto &[g, c] : adjusted[n - 1]) {
      if (c >= 1 && c <= 4) cc[c] += 1.0;
    }
    auto &d = lm.discounts_[n - 1];
    const bool have_y = cc[1] > 0 && cc[2] > 0;
    const double y = have_y ? cc[1] / (cc[1] + 2.0 * cc[2]) : 0.0;
    for (int k = 1; k <= 3; ++k) {
      bool ok = have_y && cc[k] > 0 && cc[k + 1] > 0;
      double value = ok ? k - (k + 1) * y * cc[k + 1] / cc[k] : kFallbackDiscount;
      if (ok && !(value > 0.0 && value <= k)) ok = false;
      if (!ok) {
        value = kFallbackDiscount;
        lm.warnings_.push_back("order " + std::to_string(n) + ": discount D" +
                               std::to_string(k) + (k == 3 ? "+" : "") +
                               " not estimable from count-of-counts; using 0.75");
      }
      d[k - 1] = value;
    }
  }

  // Context statistics S(h), N1(h.), N2(h.), N3+(h.).
  std::vector<std::unordered_map<NGram, ContextStats, NGramHash>> contexts(n_orders);
  for (size_t n = 1; n <= n_orders; ++n) {
    for (const auto &[g, c] : adjusted[n - 1]) {
      NGram h(g.begin(), g.end() - 1);
      auto &stats = contexts[n - 1][h];
      stats.total += static_cast<double>(c);
      stats.buckets[std::min<uint64_t>(c, 3) - 1] += 1;
    }
  }
  auto gamma = [&](size_t n, const ContextStats &stats) {
    const auto &d = lm.discounts_[n - 1];
    return (d[0] * static_cast<double>(stats.buckets[0]) +
            d[1] * static_cast<double>(stats.buckets[1]) +
            d[2] * static_cast<double>(stats.buckets[2])) /
           stats.total;
  };

  // Interpolated probabilities, lowest order first.
  lm.tables_.assign(n_orders, Table());
  std::vector<std::unordered_map<NGram, double, NGramHash>> prob(n_orders);
  {
    const ContextStats &root = contexts[0][NGram()];
    const double uniform = 1.0 / static_cast<double>(lm.words_.size() - 1);
    const double g0 = gamma(1, root);
    for (WordId w = 0; w < lm.words_.size(); ++w) {
      if (w == lm.bos_) continue;
      auto it = adjusted[0].find(NGram{w});
      uint64_t a = it == adjusted[0].end() ? 0 : it->second;
      double p = (static_cast<double>(a) - Discount(lm.discounts_[0], a)) / root.total +
                 g0 * uniform;
      prob[0][NGram{w}] = p;
      lm.tables_[0][NGram{w}].log10_prob = std::log10(p);
    }
    lm.tables_[0][NGram{lm.bos_}].log10_prob = kNoProb;
  }
  for (size_t n = 2; n <= n_orders; ++n) {
    for (const auto &[g, a] : adjusted[n - 1]) {
      NGram h(g.begin(), g.end() - 1);
      NGram lower(g.begin() + 1, g.end());
      const ContextStats &stats = contexts[n - 1].at(h);
      double p = (static_cast<double>(a) - Discount(lm.discounts_[n - 1], a)) / stats.total +
                 gamma(n, stats) * prob[n - 2].at(lower);
      prob[n - 1][g] = p;
      lm.tables_[n - 1][g].log10_prob = std::log10(p);
    }
    for (const auto &[h, stats] : contexts[n - 1]) {
      Entry &e = lm.tables_[n - 2].at(h);
      e.log10_backoff = std::log10(gamma(n, stats));
      e.has_backoff = true;
    }
  }
  return lm;
}

double NGramLM::Log10Prob(WordId word, std::span<const WordId> context) const {
  const size_t max_ctx = std::min<size_t>(context.size(), static_cast<size_t>(order_ - 1));
  thread_local NGram key;
  double backoff = 0.0;
  for (size_t len = max_ctx + 1; len-- > 0;) {
    key.assign(context.end() - static_cast<long>(len), context.end());
    key.push_back(word);
    const Table &table = tables_[len];
    auto it = table.find(key);
    if (it != table.end()) return backoff + it->second.log10_prob;
    if (len == 0) break;
    key.pop_back();
    auto ctx = tables_[len - 1].find(key);
    if (ctx != tables_[len - 1].end()) backoff += ctx->second.log10_backoff;
  }
  // Word missing from the unigram table: score as <unk>.
  if (word != unk_) return backoff + Log10Prob(unk_, {});
  return backoff + kNoProb;
}

double NGramLM::LogProb(WordId word, std::span<const WordId> context) const {
  return Log10Prob(word, context) * kLn10;
}

double NGramLM::LogProb(std::string_view word, std::span<const std::string> context) const {
  std::vector<WordId> ids;
  ids.reserve(context.size());
  for (const auto &w : context) ids.push_back(Id(w));
  return LogProb(Id(word), ids);
}

double NGramLM::SequenceLogProb(std::span<const std::string> words) const {
  std::vector<WordId> context{bos_};
  double total = 0.0;
  for (const auto &w : words) {
    WordId id = Id(w);
    total += LogProb(id, context);
    context.push_back(id);
  }
  return total + LogProb(eos_, context);
}

std::string NGramLM::ToArpa() const {
  std::string out = "\\data\\\n";
  for (int n = 1; n <= order_; ++n) {
    out += "ngram " + std::to_string(n) + "=" + std::to_string(tables_[n - 1].size()) + "\n";
  }
  for (int n = 1; n <= order_; ++n) {
    out += "\n\\" + std::to_string(n) + "-grams:\n";
    std::vector<const std::pair<const NGram, Entry> *> sorted;
    for (const auto &entry : tables_[n - 1]) sorted.push_back(&entry);
    std::sort(sorted.begin(), sorted.end(),
              [](auto *a, auto *b) { return a->first < b->first; });
    for (const auto *entry : sorted) {
      out += FormatDouble(entry->second.log10_prob);
      out += '\t';
      for (size_t i = 0; i < entry->first.size(); ++i) {
        if (i > 0) out += ' ';
        out += words_[entry->first[i]];
      }
      if (entry->second.has_backoff) {
        out += '\t';
        out += FormatDouble(entry->second.log10_backoff);
      }
      out += '\n';
    }
  }
  out += "\n\\end\\\n";
  return out;
}

NGramLM NGramLM::FromArpa(std::string_view text) {
  NGramLM lm;
  std::vector<size_t> declared;
  int section = -1;  // -1 before \data\, 0 in \data\, n in \n-grams:
  bool ended = false;
  int line_no = 0;
  for (auto line : Split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || ended) continue;
    if (line == "\\data\\") {
      section = 0;
      continue;
    }
    if (line == "\\end\\") {
      ended = true;
      continue;
    }
    if (line.front() == '\\') {
      auto dash = line.find("-grams:");
      if (dash == std::string_view::npos) throw ParseError("unknown ARPA section", line_no);
      section = static_cast<int>(ParseInt(line.substr(1, dash - 1), line_no));
      if (section < 1 || section > static_cast<int>(declared.size())) {
        throw ParseError("n-gram section not declared in \\data\\", line_no);
      }
      continue;
    }
    if (section == 0) {
      if (line.substr(0, 6) != "ngram ") throw ParseError("expected 'ngram N=count'", line_no);
      auto eq = line.find('=');
      if (eq == std::string_view::npos) throw ParseError("expected 'ngram N=count'", line_no);
      auto n = static_cast<size_t>(ParseInt(line.substr(6, eq - 6), line_no));
      if (n != declared.size() + 1) throw ParseError("n-gram orders out of sequence", line_no);
      declared.push_back(static_cast<size_t>(ParseInt(line.substr(eq + 1), line_no)));
      continue;
    }
    if (section < 1) throw ParseError("content before \\data\\", line_no);

    if (lm.tables_.empty()) {
      lm.order_ = static_cast<int>(declared.size());
      lm.tables_.assign(declared.size(), Table());
    }
    // prob w1 .. wn [backoff]; tabs or spaces.
    auto fields = SplitWhitespace(line);
    const auto n = static_cast<size_t>(section);
    if (fields.size() != n + 1 && fields.size() != n + 2) {
      throw ParseError("expected probability, " + std::to_string(n) +
                           " words and an optional backoff",
                       line_no);
    }
    Entry entry;
    entry.log10_prob = ParseDouble(fields[0], line_no);
    if (fields.size() == n + 2) {
      entry.log10_backoff = ParseDouble(fields.back(), line_no);
      entry.has_backoff = true;
    }
    std::vector<std::string_view> words(fields.begin() + 1, fields.begin() + 1 + static_cast<long>(n));
    NGram g;
    for (auto w : words) g.push_back(lm.Intern(w));
    lm.tables_[section - 1][g] = entry;
  }
  if (declared.empty()) throw ParseError("missing \\data\\ section", 0);
  if (lm.tables_.empty()) {
    lm.order_ = static_cast<int>(declared.size());
    lm.tables_.assign(declared.size(), Table());
  }
  for (size_t n = 1; n <= declared.size(); ++n) {
    if (lm.tables_[n - 1].size() != declared[n - 1]) {
      throw ParseError("declared " + std::to_string(declared[n - 1]) + " " +
                           std::to_string(n) + "-grams, found " +
                           std::to_string(lm.tables_[n - 1].size()),
                       0);
    }
  }
  lm.bos_ = lm.Intern(kSentenceStart);
  lm.eos_ = lm.Intern(kSentenceEnd);
  lm.unk_ = lm.Intern(kUnknownWord);
  for (WordId w : {lm.bos_, lm.eos_, lm.unk_}) {
    if (!lm.tables_[0].count(NGram{w})) {
      lm.tables_[0][NGram{w}].log10_prob = kNoProb;
      lm.warnings_.push_back("ARPA file lacks " + lm.words_[w] + "; assigned log10 prob -99");
    }
  }
  lm.discounts_.assign(declared.size(), {0.0, 0.0, 0.0});
  return lm;
}

}  // namespace aegen

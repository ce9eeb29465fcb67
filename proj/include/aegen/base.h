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

#ifndef AEGEN_BASE_H_
#define AEGEN_BASE_H_

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aegen {

// Base class for all data errors raised by the toolkit.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &what) : std::runtime_error(what) {}
};

// Malformed input text. line() is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string &what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

// Seedable generator used everywhere randomness is needed.
//
// The engine is std::mt19937_64, whose output sequence is fully specified by
// the standard. The standard distributions are not, so all derived draws are
// computed here from raw engine output:
//   Uniform()      = (next() >> 11) * 2^-53, in [0, 1)
//   UniformInt(n)  = rejection sampling on the top bits, in [0, n)
//   Categorical(w) = first index whose running weight sum exceeds
//                    Uniform() * sum(w)
// This keeps every seeded run reproducible across platforms and compilers.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t Next() { return engine_(); }
  double Uniform();
  uint64_t UniformInt(uint64_t n);
  bool Coin() { return (Next() >> 63) != 0; }

  // Index drawn proportionally to the non-negative weights. Returns
  // weights.size() when all weights are zero.
  size_t Categorical(std::span<const double> weights);

  // Fisher-Yates shuffle.
  template <typename T>
  void Shuffle(std::vector<T> &items) {
    for (size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[UniformInt(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Derives an independent seed for a sub-task (sentence index, round, ...)
// from a parent seed with the splitmix64 finalizer.
uint64_t DeriveSeed(uint64_t seed, uint64_t index);

// Runs fn(i) for i in [0, n) on up to `threads` worker threads. Work is
// split into contiguous blocks so results written by index are independent
// of the thread count.
void ParallelFor(size_t n, int threads, const std::function<void(size_t)> &fn);

// Shortest decimal representation that parses back to the same double.
std::string FormatDouble(double value);
double ParseDouble(std::string_view text, int line = 0);
long ParseInt(std::string_view text, int line = 0);

// Splits on a single character; keeps empty fields.
std::vector<std::string_view> Split(std::string_view text, char sep);
// Splits on runs of spaces/tabs; drops empty fields.
std::vector<std::string_view> SplitWhitespace(std::string_view text);
std::string Join(const std::vector<std::string> &parts, std::string_view sep);

// Reads a whole file; throws Error naming the path on failure.
std::string ReadFile(const std::string &path);
void WriteFile(const std::string &path, std::string_view contents);

}  // namespace aegen

#endif  // AEGEN_BASE_H_

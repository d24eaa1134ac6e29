// va/util.h

// Copyright 2026  The va-pipeline Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace va {

// All recoverable failures in the library throw Error; the CLI turns it
// into a one-line "error: ..." message and a nonzero exit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
inline void append(std::ostringstream&) {}
template <typename T, typename... Rest>
void append(std::ostringstream& os, const T& head, const Rest&... rest) {
  os << head;
  append(os, rest...);
}
}  // namespace detail

template <typename... Args>
std::string msg(const Args&... args) {
  std::ostringstream os;
  detail::append(os, args...);
  return os.str();
}

template <typename... Args>
[[noreturn]] void fail(const Args&... args) {
  throw Error(msg(args...));
}

template <typename... Args>
void require(bool ok, const Args&... args) {
  if (!ok) fail(args...);
}

// Deterministic RNG used everywhere seeds matter. The distributions are
// hand-rolled so streams do not depend on the standard library version.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(splitmix(seed ? seed : 0x9e3779b97f4a7c15ull)) {}

  uint64_t next_u64() {
    // xorshift* variant seeded through splitmix64.
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545f4914f6cdd1dull;
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  uint64_t below(uint64_t n) { return next_u64() % n; }

  // Standard normal via Box-Muller (one value per call; the spare is kept).
  double normal();

  // Derives an independent stream, e.g. one per video or per epoch.
  Rng fork(uint64_t salt) const { return Rng(splitmix(state_ ^ splitmix(salt))); }

  static uint64_t splitmix(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

 private:
  uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Fisher-Yates shuffle driven by Rng so the order is seed-stable.
template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (size_t i = items.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(rng.below(i));
    std::swap(items[i - 1], items[j]);
  }
}

// Runs fn(i) for i in [0, n) on up to VA_NUM_WORKERS threads. Results must
// be written to disjoint slots so the schedule cannot change outputs.
void parallel_for(int n, const std::function<void(int)>& fn);

// Worker cap: VA_NUM_WORKERS if set, otherwise hardware concurrency.
int num_workers();

}  // namespace va

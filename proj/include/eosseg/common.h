// Copyright (c) 2026 The eosseg Authors
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

#ifndef EOSSEG_COMMON_H_
#define EOSSEG_COMMON_H_

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace eosseg {

// Invalid or mutually inconsistent configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke an operation's precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

#define EOSSEG_REQUIRE(cond, msg)                                   \
  do {                                                              \
    if (!(cond)) throw ::eosseg::ContractViolation(std::string(msg)); \
  } while (0)

// Stateless 64-bit mixing (splitmix64 finalizer).
uint64_t Mix64(uint64_t x);
uint64_t HashCombine(uint64_t seed, uint64_t value);
// FNV-1a; stable across platforms, unlike std::hash.
uint64_t HashString(std::string_view s);

// Uniform in [0, 1) from a hash key, 53-bit resolution.
double HashUniform(uint64_t key);
// Standard normal from a hash key (Box-Muller over two derived uniforms).
double HashNormal(uint64_t key);

// Sequential generator. The engine is std::mt19937_64; the distribution
// mappings are spelled out here because the std:: distributions are not
// specified bit-for-bit and outputs must match across standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  double Uniform();                     // [0, 1)
  int64_t UniformInt(int64_t lo, int64_t hi);  // inclusive
  bool Bernoulli(double p) { return Uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace eosseg

#endif  // EOSSEG_COMMON_H_

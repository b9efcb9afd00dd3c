/*
 * Copyright 2026 The FairCon Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Shared error types, seeded randomness and a minimal parallel loop.

#ifndef FAIRCON_COMMON_H_
#define FAIRCON_COMMON_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>

namespace faircon {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid user configuration (bad probability vector, bad hyperparameter...).
// The CLI maps this family to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input file. `line` is 1-based, 0 when not line-oriented.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Well-formed input that violates a domain invariant.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, std::size_t line = 0)
      : Error(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Non-finite numbers or other numerical preconditions.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Seeded pseudo-random stream.
//
// The helpers below fix the exact mapping from engine output to values so the
// draw sequence of any seeded routine can be replayed independently.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n) by rejection; n must be > 0.
  std::size_t index(std::size_t n);

  // Draws from an unnormalized discrete distribution by inversion.
  std::size_t categorical(const double* weights, std::size_t n);

 private:
  std::mt19937_64 engine_;
};

// Deterministic child seed derived from a root seed and up to three tags.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t tag,
                          std::uint64_t a = 0, std::uint64_t b = 0);

// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

// Worker count from FAIRCON_THREADS (unset or invalid -> 1).
std::size_t worker_threads();

// Runs body(i) for i in [0, n) on up to `threads` workers. Each index is
// visited exactly once; callers write results into per-index slots.
void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace faircon

#endif  // FAIRCON_COMMON_H_

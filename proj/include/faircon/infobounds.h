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

// Exact information quantities over small discrete joints p(a, y, z, z'),
// and checks of the bounds that tie conditional mutual information to the
// contrastive objectives:
//
//   sandwich      I(Z';Z|Y) - I(Z';Z|A,Y) - eps <= I(Z;A|Y)
//                                  <= I(Z';Z|Y) - I(Z';Z|A,Y) + eps,
//                 eps = H(Z|Z',Y)
//   upper bound   I(Z';Z|Y) <= -E_y E_{z'|y} E_{z|y} log p(z'|z,y)
//   lower bound   E_{a,y} E_{(z'_i,z_i)^N | a,y}
//                   [ log e^{s(z'_i,z_i)} / (1/N sum_j e^{s(z'_i,z_j)}) ]
//                 <= I(Z';Z|A,Y)
//   variational   sup_s E_P[s] - E_Q[e^s] + 1 = KL(P||Q), s* = log dP/dQ
//   mixture       KL(P_{Z',Z} || E_{a,y}[P_{Z'|a,y} P_{Z|a,y}]) <= I(Z';Z|A,Y)
//
// All values are in nats with 0 log 0 = 0. Everything is computed by full
// enumeration; sizes above the caps below are refused.

#ifndef FAIRCON_INFOBOUNDS_H_
#define FAIRCON_INFOBOUNDS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "faircon/common.h"
#include "json.hpp"

namespace faircon::info {

inline constexpr std::uint32_t kMaxGroups = 3;
inline constexpr std::uint32_t kMaxLabels = 3;
inline constexpr std::uint32_t kMaxZ = 4;
inline constexpr std::uint32_t kMaxX = 6;
inline constexpr std::uint32_t kMaxSamples = 3;

// Slack used by every pass/fail decision.
inline constexpr double kSlack = 1e-9;

// Raised when an exact enumeration would exceed the caps.
class EnumerationLimitError : public Error {
 public:
  using Error::Error;
};

// Variable sets are bit masks.
enum Var : unsigned { kA = 1u, kY = 2u, kZ = 4u, kZp = 8u };
using VarSet = unsigned;

class DiscreteJoint {
 public:
  // `table` is indexed [((a * ny + y) * nz + z) * nz + z']. Throws
  // ValidationError on negative/non-finite entries or mass != 1 (1e-12).
  DiscreteJoint(std::uint32_t na, std::uint32_t ny, std::uint32_t nz,
                std::vector<double> table);

  std::uint32_t na() const { return dims_[0]; }
  std::uint32_t ny() const { return dims_[1]; }
  std::uint32_t nz() const { return dims_[2]; }

  double operator()(std::uint32_t a, std::uint32_t y, std::uint32_t z,
                    std::uint32_t zp) const {
    return table_[((static_cast<std::size_t>(a) * dims_[1] + y) * dims_[2] + z) *
                      dims_[2] +
                  zp];
  }
  const std::vector<double>& table() const { return table_; }

  // Marginal over `vars`, laid out in A, Y, Z, Z' order with the omitted
  // variables dropped.
  std::vector<double> marginal(VarSet vars) const;

  std::uint32_t dim(unsigned var_index) const { return dims_[var_index]; }

 private:
  std::uint32_t dims_[4];
  std::vector<double> table_;
};

double entropy(const DiscreteJoint& joint, VarSet vars);
// H(targets | given).
double cond_entropy(const DiscreteJoint& joint, VarSet targets, VarSet given);
// I(u; v | w) by direct summation of p(u,v,w) log p(u,v|w) / (p(u|w) p(v|w)).
// u, v must be non-empty and the three sets disjoint.
double cond_mutual_info(const DiscreteJoint& joint, VarSet u, VarSet v,
                        VarSet w = 0);

// Generative model: A -> Y, (A, Y) -> X, X -> X' through an augmentation
// kernel independent of (A, Y), and a deterministic encoder Z = f(X),
// Z' = f(X').
struct GenerativeSpec {
  std::vector<double> p_a;          // [a]
  std::vector<double> p_y_given_a;  // [a * ny + y]
  std::uint32_t nx = 0;
  std::vector<double> p_x_given_ay;  // [(a * ny + y) * nx + x]
  std::vector<double> augment;       // p(x' | x), [x * nx + x']
  std::vector<std::uint32_t> encoder;  // f(x) in [0, nz)
  std::uint32_t nz = 0;

  std::uint32_t na() const { return static_cast<std::uint32_t>(p_a.size()); }
  std::uint32_t ny() const {
    return p_a.empty() ? 0
                       : static_cast<std::uint32_t>(p_y_given_a.size() /
                                                    p_a.size());
  }
  // Throws ValidationError or EnumerationLimitError.
  void validate() const;
};

DiscreteJoint joint_from_spec(const GenerativeSpec& spec);

struct RandomSpecOptions {
  std::uint32_t na = 2;
  std::uint32_t ny = 2;
  std::uint32_t nx = 4;
  std::uint32_t nz = 3;
  // Probability of zeroing each off-diagonal augmentation entry.
  double kernel_sparsity = 0.0;
  // p(x | a, y) shared by every cell, so (Z, Z') is independent of (A, Y).
  bool inputs_independent_of_cell = false;
};

// Dirichlet(1) conditionals and a uniformly random encoder table.
GenerativeSpec random_spec(Rng& rng, const RandomSpecOptions& options);

// Generative spec with the identity augmentation and an injective encoder.
GenerativeSpec identity_spec(Rng& rng, std::uint32_t na, std::uint32_t ny,
                             std::uint32_t nx);

// Critic table s(z', z), [z' * nz + z].
struct Critic {
  std::uint32_t nz = 0;
  std::vector<double> table;

  double operator()(std::uint32_t zp, std::uint32_t z) const {
    return table[static_cast<std::size_t>(zp) * nz + z];
  }
};

Critic random_critic(Rng& rng, std::uint32_t nz, double scale = 2.0);

// log p(z',z|a,y) / (p(z'|a,y) p(z|a,y)) averaged over p(a,y); pairs with
// zero probability get `floor`.
Critic pmi_critic(const DiscreteJoint& joint, double floor = -50.0);

struct BoundReport {
  double i_za_given_y = 0.0;     // I(Z;A|Y)
  double i_zpz_given_y = 0.0;    // I(Z';Z|Y)
  double i_zpz_given_ay = 0.0;   // I(Z';Z|A,Y)
  double epsilon = 0.0;          // H(Z|Z',Y)
  double lower = 0.0;
  double upper = 0.0;
  bool lower_holds = false;
  bool upper_holds = false;
  bool pass = false;
};

BoundReport check_sandwich(const DiscreteJoint& joint);

struct UpperBoundReport {
  double lhs = 0.0;
  double rhs = 0.0;  // +inf when a zero p(z'|z,y) carries weight
  bool rhs_infinite = false;
  bool pass = false;
};

UpperBoundReport check_upper_bound(const DiscreteJoint& joint);

// Exact expectation over all N-tuples of (z', z) pairs in every (a, y) cell.
// Throws EnumerationLimitError above the caps.
double cs_infonce_exact(const DiscreteJoint& joint, const Critic& critic,
                        std::uint32_t n_samples);

double kl_divergence(const std::vector<double>& p, const std::vector<double>& q);

// E_P[s] - E_Q[exp s] + 1.
double variational_objective(const std::vector<double>& p,
                             const std::vector<double>& q,
                             const std::vector<double>& s);

struct KlVariationalReport {
  double kl = 0.0;
  double optimal_objective = 0.0;
  double optimum_gap = 0.0;  // |objective(s*) - KL|
  std::size_t random_critics = 0;
  double max_random_objective = 0.0;
  std::size_t random_violations = 0;
  bool pass = false;
};

// Throws ValidationError when Q = 0 somewhere P > 0.
KlVariationalReport kl_variational_check(const std::vector<double>& p,
                                         const std::vector<double>& q,
                                         Rng& rng,
                                         std::size_t random_critics = 100);

struct MixtureBoundReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool lhs_infinite = false;
  bool pass = false;
};

MixtureBoundReport check_mixture_bound(const DiscreteJoint& joint);

// One randomized trial of every check.
struct TrialReport {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  BoundReport sandwich;
  UpperBoundReport upper;
  MixtureBoundReport mixture;
  double cs_infonce = 0.0;  // random critic, N = 2
  bool cs_infonce_holds = false;
  KlVariationalReport kl;
  bool pass = false;
};

struct SuiteConfig {
  std::size_t trials = 1000;
  std::uint64_t seed = 7;
  std::size_t threads = 1;
  std::size_t kl_critics_per_trial = 10;
};

struct SuiteReport {
  std::vector<TrialReport> trials;
  std::size_t passed = 0;
  std::size_t sandwich_passed = 0;
  std::size_t upper_passed = 0;
  std::size_t upper_infinite = 0;
  std::size_t mixture_passed = 0;
  std::size_t cs_infonce_passed = 0;
  std::size_t kl_passed = 0;
  bool all_passed() const { return passed == trials.size(); }
};

TrialReport run_trial(std::size_t trial, std::uint64_t root_seed,
                      std::size_t kl_critics);
SuiteReport run_suite(const SuiteConfig& config);

nlohmann::ordered_json trial_to_json(const TrialReport& t);
nlohmann::ordered_json suite_to_json(const SuiteReport& r);

}  // namespace faircon::info

#endif  // FAIRCON_INFOBOUNDS_H_

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

#include "faircon/infobounds.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace faircon::info {
namespace {

constexpr std::uint64_t kTagTrial = 0x5452;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_distribution(const double* p, std::size_t n, const char* what) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(p[i] >= 0.0) || !std::isfinite(p[i])) {
      throw ValidationError(std::string(what) +
                            " has a negative or non-finite entry");
    }
    sum += p[i];
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw ValidationError(std::string(what) + " does not sum to 1");
  }
}

// Index of `tuple` (a, y, z, z') inside the marginal over `vars`.
std::size_t project(const std::uint32_t tuple[4], const std::uint32_t dims[4],
                    VarSet vars) {
  std::size_t idx = 0;
  for (unsigned v = 0; v < 4; ++v) {
    if (vars & (1u << v)) idx = idx * dims[v] + tuple[v];
  }
  return idx;
}

std::vector<double> dirichlet(Rng& rng, std::size_t n) {
  std::vector<double> w(n);
  double sum = 0.0;
  for (auto& x : w) {
    x = -std::log1p(-rng.uniform());
    sum += x;
  }
  for (auto& x : w) x /= sum;
  return w;
}

// Weights over `mask`-selected entries only, others zero.
std::vector<double> dirichlet_masked(Rng& rng, const std::vector<bool>& keep) {
  std::vector<double> w(keep.size(), 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (!keep[i]) continue;
    w[i] = -std::log1p(-rng.uniform());
    sum += w[i];
  }
  for (auto& x : w) x /= sum;
  return w;
}

double xlogy_ratio(double p, double num, double den) {
  return p > 0.0 ? p * std::log(num / den) : 0.0;
}

}  // namespace

DiscreteJoint::DiscreteJoint(std::uint32_t na, std::uint32_t ny,
                             std::uint32_t nz, std::vector<double> table)
    : dims_{na, ny, nz, nz}, table_(std::move(table)) {
  if (na == 0 || ny == 0 || nz == 0) {
    throw ValidationError("joint alphabets must be non-empty");
  }
  if (table_.size() != static_cast<std::size_t>(na) * ny * nz * nz) {
    throw ValidationError("joint table size does not match its alphabets");
  }
  check_distribution(table_.data(), table_.size(), "joint table");
}

std::vector<double> DiscreteJoint::marginal(VarSet vars) const {
  std::size_t size = 1;
  for (unsigned v = 0; v < 4; ++v) {
    if (vars & (1u << v)) size *= dims_[v];
  }
  std::vector<double> out(size, 0.0);
  std::uint32_t t[4];
  std::size_t k = 0;
  for (t[0] = 0; t[0] < dims_[0]; ++t[0]) {
    for (t[1] = 0; t[1] < dims_[1]; ++t[1]) {
      for (t[2] = 0; t[2] < dims_[2]; ++t[2]) {
        for (t[3] = 0; t[3] < dims_[3]; ++t[3]) {
          out[project(t, dims_, vars)] += table_[k++];
        }
      }
    }
  }
  return out;
}

double entropy(const DiscreteJoint& joint, VarSet vars) {
  if (vars == 0) return 0.0;
  double h = 0.0;
  for (double p : joint.marginal(vars)) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double cond_entropy(const DiscreteJoint& joint, VarSet targets, VarSet given) {
  return entropy(joint, targets | given) - entropy(joint, given);
}

double cond_mutual_info(const DiscreteJoint& joint, VarSet u, VarSet v,
                        VarSet w) {
  if (u == 0 || v == 0) throw ValidationError("mutual information needs two variables");
  if ((u & v) || (u & w) || (v & w) || ((u | v | w) & ~0xFu)) {
    throw ValidationError("variable sets must be disjoint subsets of {A,Y,Z,Z'}");
  }
  const std::uint32_t dims[4] = {joint.dim(0), joint.dim(1), joint.dim(2),
                                 joint.dim(3)};
  const VarSet all = u | v | w;
  const auto p_uvw = joint.marginal(all);
  const auto p_uw = joint.marginal(u | w);
  const auto p_vw = joint.marginal(v | w);
  const auto p_w = w ? joint.marginal(w) : std::vector<double>{1.0};

  double total = 0.0;
  std::uint32_t t[4];
  // Variables outside `all` stay pinned at 0 so each tuple is visited once.
  for (t[0] = 0; t[0] < ((all & kA) ? dims[0] : 1); ++t[0]) {
    for (t[1] = 0; t[1] < ((all & kY) ? dims[1] : 1); ++t[1]) {
      for (t[2] = 0; t[2] < ((all & kZ) ? dims[2] : 1); ++t[2]) {
        for (t[3] = 0; t[3] < ((all & kZp) ? dims[3] : 1); ++t[3]) {
          const double p = p_uvw[project(t, dims, all)];
          if (p <= 0.0) continue;
          const double pw = w ? p_w[project(t, dims, w)] : 1.0;
          // p(u,v|w) / (p(u|w) p(v|w)) = p(u,v,w) p(w) / (p(u,w) p(v,w))
          total += p * std::log(p * pw / (p_uw[project(t, dims, u | w)] *
                                          p_vw[project(t, dims, v | w)]));
        }
      }
    }
  }
  return total;
}

void GenerativeSpec::validate() const {
  const std::uint32_t a_n = na();
  const std::uint32_t y_n = ny();
  if (a_n == 0 || y_n == 0 || nx == 0 || nz == 0) {
    throw ValidationError("generative spec alphabets must be non-empty");
  }
  if (a_n > kMaxGroups || y_n > kMaxLabels || nx > kMaxX || nz > kMaxZ) {
    throw EnumerationLimitError(
        "generative spec exceeds the enumeration caps (|A|,|Y| <= 3, |X| <= 6, "
        "|Z| <= 4)");
  }
  if (p_y_given_a.size() != static_cast<std::size_t>(a_n) * y_n ||
      p_x_given_ay.size() != static_cast<std::size_t>(a_n) * y_n * nx ||
      augment.size() != static_cast<std::size_t>(nx) * nx ||
      encoder.size() != nx) {
    throw ValidationError("generative spec tables have inconsistent sizes");
  }
  check_distribution(p_a.data(), a_n, "p(a)");
  for (std::uint32_t a = 0; a < a_n; ++a) {
    check_distribution(&p_y_given_a[a * y_n], y_n, "p(y|a)");
    for (std::uint32_t y = 0; y < y_n; ++y) {
      check_distribution(&p_x_given_ay[(a * y_n + y) * nx], nx, "p(x|a,y)");
    }
  }
  for (std::uint32_t x = 0; x < nx; ++x) {
    check_distribution(&augment[x * nx], nx, "p(x'|x)");
    if (encoder[x] >= nz) throw ValidationError("encoder maps outside Z");
  }
}

DiscreteJoint joint_from_spec(const GenerativeSpec& spec) {
  spec.validate();
  const std::uint32_t na = spec.na(), ny = spec.ny(), nx = spec.nx,
                      nz = spec.nz;
  std::vector<double> table(static_cast<std::size_t>(na) * ny * nz * nz, 0.0);
  for (std::uint32_t a = 0; a < na; ++a) {
    for (std::uint32_t y = 0; y < ny; ++y) {
      const double pay = spec.p_a[a] * spec.p_y_given_a[a * ny + y];
      for (std::uint32_t x = 0; x < nx; ++x) {
        const double pxay = pay * spec.p_x_given_ay[(a * ny + y) * nx + x];
        if (pxay == 0.0) continue;
        const std::uint32_t z = spec.encoder[x];
        for (std::uint32_t xp = 0; xp < nx; ++xp) {
          const std::uint32_t zp = spec.encoder[xp];
          table[((static_cast<std::size_t>(a) * ny + y) * nz + z) * nz + zp] +=
              pxay * spec.augment[x * nx + xp];
        }
      }
    }
  }
  return DiscreteJoint(na, ny, nz, std::move(table));
}

GenerativeSpec random_spec(Rng& rng, const RandomSpecOptions& o) {
  GenerativeSpec s;
  s.nx = o.nx;
  s.nz = o.nz;
  s.p_a = dirichlet(rng, o.na);
  for (std::uint32_t a = 0; a < o.na; ++a) {
    const auto row = dirichlet(rng, o.ny);
    s.p_y_given_a.insert(s.p_y_given_a.end(), row.begin(), row.end());
  }
  const auto shared = dirichlet(rng, o.nx);
  for (std::uint32_t c = 0; c < o.na * o.ny; ++c) {
    const auto row = o.inputs_independent_of_cell ? shared : dirichlet(rng, o.nx);
    s.p_x_given_ay.insert(s.p_x_given_ay.end(), row.begin(), row.end());
  }
  for (std::uint32_t x = 0; x < o.nx; ++x) {
    std::vector<bool> keep(o.nx, true);
    for (std::uint32_t xp = 0; xp < o.nx; ++xp) {
      if (xp != x && o.kernel_sparsity > 0.0) {
        keep[xp] = rng.uniform() >= o.kernel_sparsity;
      }
    }
    const auto row = dirichlet_masked(rng, keep);
    s.augment.insert(s.augment.end(), row.begin(), row.end());
  }
  for (std::uint32_t x = 0; x < o.nx; ++x) {
    s.encoder.push_back(static_cast<std::uint32_t>(rng.index(o.nz)));
  }
  return s;
}

GenerativeSpec identity_spec(Rng& rng, std::uint32_t na, std::uint32_t ny,
                             std::uint32_t nx) {
  RandomSpecOptions o;
  o.na = na;
  o.ny = ny;
  o.nx = nx;
  o.nz = nx;
  GenerativeSpec s = random_spec(rng, o);
  std::fill(s.augment.begin(), s.augment.end(), 0.0);
  for (std::uint32_t x = 0; x < nx; ++x) {
    s.augment[x * nx + x] = 1.0;
    s.encoder[x] = x;
  }
  return s;
}

Critic random_critic(Rng& rng, std::uint32_t nz, double scale) {
  Critic c;
  c.nz = nz;
  c.table.resize(static_cast<std::size_t>(nz) * nz);
  for (auto& v : c.table) v = rng.uniform(-scale, scale);
  return c;
}

Critic pmi_critic(const DiscreteJoint& joint, double floor) {
  const std::uint32_t na = joint.na(), ny = joint.ny(), nz = joint.nz();
  Critic c;
  c.nz = nz;
  c.table.assign(static_cast<std::size_t>(nz) * nz, 0.0);
  std::vector<double> weight(c.table.size(), 0.0);
  for (std::uint32_t a = 0; a < na; ++a) {
    for (std::uint32_t y = 0; y < ny; ++y) {
      double pay = 0.0;
      std::vector<double> pz(nz, 0.0), pzp(nz, 0.0);
      for (std::uint32_t z = 0; z < nz; ++z) {
        for (std::uint32_t zp = 0; zp < nz; ++zp) {
          const double p = joint(a, y, z, zp);
          pay += p;
          pz[z] += p;
          pzp[zp] += p;
        }
      }
      if (pay <= 0.0) continue;
      for (std::uint32_t z = 0; z < nz; ++z) {
        for (std::uint32_t zp = 0; zp < nz; ++zp) {
          const double p = joint(a, y, z, zp);
          const double v = p > 0.0 ? std::log(p * pay / (pz[z] * pzp[zp])) : floor;
          c.table[zp * nz + z] += pay * v;
          weight[zp * nz + z] += pay;
        }
      }
    }
  }
  for (std::size_t k = 0; k < c.table.size(); ++k) {
    if (weight[k] > 0.0) c.table[k] /= weight[k];
  }
  return c;
}

BoundReport check_sandwich(const DiscreteJoint& joint) {
  BoundReport r;
  r.i_za_given_y = cond_mutual_info(joint, kZ, kA, kY);
  r.i_zpz_given_y = cond_mutual_info(joint, kZp, kZ, kY);
  r.i_zpz_given_ay = cond_mutual_info(joint, kZp, kZ, kA | kY);
  r.epsilon = cond_entropy(joint, kZ, kZp | kY);
  const double gap = r.i_zpz_given_y - r.i_zpz_given_ay;
  r.lower = gap - r.epsilon;
  r.upper = gap + r.epsilon;
  r.lower_holds = r.lower <= r.i_za_given_y + kSlack;
  r.upper_holds = r.i_za_given_y <= r.upper + kSlack;
  r.pass = r.lower_holds && r.upper_holds;
  return r;
}

UpperBoundReport check_upper_bound(const DiscreteJoint& joint) {
  const std::uint32_t ny = joint.ny(), nz = joint.nz();
  const auto p_y = joint.marginal(kY);
  const auto p_yz = joint.marginal(kY | kZ);            // [y][z]
  const auto p_yzp = joint.marginal(kY | kZp);          // [y][z']
  const auto p_yzzp = joint.marginal(kY | kZ | kZp);    // [y][z][z']
  UpperBoundReport r;
  r.lhs = cond_mutual_info(joint, kZp, kZ, kY);
  double rhs = 0.0;
  for (std::uint32_t y = 0; y < ny && !r.rhs_infinite; ++y) {
    if (p_y[y] <= 0.0) continue;
    for (std::uint32_t zp = 0; zp < nz && !r.rhs_infinite; ++zp) {
      const double pzp_y = p_yzp[y * nz + zp] / p_y[y];
      if (pzp_y <= 0.0) continue;
      for (std::uint32_t z = 0; z < nz; ++z) {
        const double pz_y = p_yz[y * nz + z] / p_y[y];
        if (pz_y <= 0.0) continue;
        const double pzp_zy = p_yzzp[(y * nz + z) * nz + zp] / p_yz[y * nz + z];
        if (pzp_zy <= 0.0) {
          r.rhs_infinite = true;
          break;
        }
        rhs -= p_y[y] * pzp_y * pz_y * std::log(pzp_zy);
      }
    }
  }
  r.rhs = r.rhs_infinite ? kInf : rhs;
  r.pass = r.rhs_infinite || r.lhs <= r.rhs + kSlack;
  return r;
}

double cs_infonce_exact(const DiscreteJoint& joint, const Critic& critic,
                        std::uint32_t n_samples) {
  const std::uint32_t na = joint.na(), ny = joint.ny(), nz = joint.nz();
  if (n_samples == 0) throw ValidationError("n_samples must be >= 1");
  if (n_samples > kMaxSamples || nz > kMaxZ || na > kMaxGroups ||
      ny > kMaxLabels) {
    throw EnumerationLimitError(
        "exact CS-InfoNCE enumeration is capped at N <= 3, |Z| <= 4, "
        "|A|,|Y| <= 3; use a Monte Carlo estimate for larger problems");
  }
  if (critic.nz != nz || critic.table.size() != static_cast<std::size_t>(nz) * nz) {
    throw ValidationError("critic alphabet does not match the joint");
  }
  const std::size_t pairs = static_cast<std::size_t>(nz) * nz;  // k = z'*nz + z
  const double log_n = std::log(static_cast<double>(n_samples));
  std::vector<double> q(pairs);
  std::vector<std::size_t> tuple(n_samples);
  std::vector<double> row(n_samples);

  double total = 0.0;
  for (std::uint32_t a = 0; a < na; ++a) {
    for (std::uint32_t y = 0; y < ny; ++y) {
      double pay = 0.0;
      for (std::uint32_t z = 0; z < nz; ++z) {
        for (std::uint32_t zp = 0; zp < nz; ++zp) {
          q[zp * nz + z] = joint(a, y, z, zp);
          pay += q[zp * nz + z];
        }
      }
      if (pay <= 0.0) continue;
      for (auto& v : q) v /= pay;

      double cell = 0.0;
      std::fill(tuple.begin(), tuple.end(), 0);
      for (;;) {
        double prob = 1.0;
        for (auto k : tuple) prob *= q[k];
        if (prob > 0.0) {
          double acc = 0.0;
          for (std::uint32_t i = 0; i < n_samples; ++i) {
            const std::uint32_t zp_i = static_cast<std::uint32_t>(tuple[i] / nz);
            double mx = -kInf;
            for (std::uint32_t j = 0; j < n_samples; ++j) {
              row[j] = critic(zp_i, static_cast<std::uint32_t>(tuple[j] % nz));
              mx = std::max(mx, row[j]);
            }
            double sum = 0.0;
            for (double v : row) sum += std::exp(v - mx);
            acc += row[i] - (mx + std::log(sum) - log_n);
          }
          cell += prob * acc / static_cast<double>(n_samples);
        }
        std::size_t pos = 0;
        while (pos < n_samples && ++tuple[pos] == pairs) tuple[pos++] = 0;
        if (pos == n_samples) break;
      }
      total += pay * cell;
    }
  }
  return total;
}

double kl_divergence(const std::vector<double>& p,
                     const std::vector<double>& q) {
  if (p.size() != q.size()) throw ValidationError("P and Q sizes differ");
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return kInf;
    kl += xlogy_ratio(p[i], p[i], q[i]);
  }
  return kl;
}

double variational_objective(const std::vector<double>& p,
                             const std::vector<double>& q,
                             const std::vector<double>& s) {
  double e_p = 0.0, e_q = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) e_p += p[i] * s[i];
    if (q[i] > 0.0) e_q += q[i] * std::exp(s[i]);
  }
  return e_p - e_q + 1.0;
}

KlVariationalReport kl_variational_check(const std::vector<double>& p,
                                         const std::vector<double>& q,
                                         Rng& rng,
                                         std::size_t random_critics) {
  if (p.size() != q.size() || p.empty()) {
    throw ValidationError("P and Q must share a non-empty alphabet");
  }
  check_distribution(p.data(), p.size(), "P");
  check_distribution(q.data(), q.size(), "Q");
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0 && q[i] <= 0.0) {
      throw ValidationError("Q is zero at symbol " + std::to_string(i) +
                            " where P is positive");
    }
  }
  KlVariationalReport r;
  r.kl = kl_divergence(p, q);
  std::vector<double> s_star(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    s_star[i] = p[i] > 0.0 ? std::log(p[i] / q[i]) : -kInf;
  }
  r.optimal_objective = variational_objective(p, q, s_star);
  r.optimum_gap = std::abs(r.optimal_objective - r.kl);
  r.max_random_objective = -kInf;
  std::vector<double> s(p.size());
  for (std::size_t c = 0; c < random_critics; ++c) {
    // Alternate free random tables with perturbations of the optimum.
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double base = c % 2 == 0 || !std::isfinite(s_star[i]) ? 0.0 : s_star[i];
      s[i] = base + rng.uniform(-3.0, 3.0) * (c % 2 == 0 ? 1.0 : 0.25);
    }
    const double obj = variational_objective(p, q, s);
    r.max_random_objective = std::max(r.max_random_objective, obj);
    if (obj > r.kl + kSlack) ++r.random_violations;
    ++r.random_critics;
  }
  r.pass = r.optimum_gap <= kSlack && r.random_violations == 0;
  return r;
}

MixtureBoundReport check_mixture_bound(const DiscreteJoint& joint) {
  const std::uint32_t na = joint.na(), ny = joint.ny(), nz = joint.nz();
  const auto p_zzp = joint.marginal(kZ | kZp);  // [z][z']
  std::vector<double> mixture(static_cast<std::size_t>(nz) * nz, 0.0);
  for (std::uint32_t a = 0; a < na; ++a) {
    for (std::uint32_t y = 0; y < ny; ++y) {
      double pay = 0.0;
      std::vector<double> pz(nz, 0.0), pzp(nz, 0.0);
      for (std::uint32_t z = 0; z < nz; ++z) {
        for (std::uint32_t zp = 0; zp < nz; ++zp) {
          const double p = joint(a, y, z, zp);
          pay += p;
          pz[z] += p;
          pzp[zp] += p;
        }
      }
      if (pay <= 0.0) continue;
      for (std::uint32_t z = 0; z < nz; ++z) {
        for (std::uint32_t zp = 0; zp < nz; ++zp) {
          // p(a,y) p(z'|a,y) p(z|a,y)
          mixture[z * nz + zp] += pzp[zp] * pz[z] / pay;
        }
      }
    }
  }
  MixtureBoundReport r;
  r.lhs = kl_divergence(p_zzp, mixture);
  r.lhs_infinite = std::isinf(r.lhs);
  r.rhs = cond_mutual_info(joint, kZp, kZ, kA | kY);
  r.pass = !r.lhs_infinite && r.lhs <= r.rhs + kSlack;
  return r;
}

TrialReport run_trial(std::size_t trial, std::uint64_t root_seed,
                      std::size_t kl_critics) {
  TrialReport t;
  t.trial = trial;
  t.seed = derive_seed(root_seed, kTagTrial, trial);
  Rng rng(t.seed);

  // Rotate through dense, sparse-kernel, cell-independent and
  // identity-augmentation regimes.
  GenerativeSpec spec;
  RandomSpecOptions o;
  switch (trial % 4) {
    case 0:
      spec = random_spec(rng, o);
      break;
    case 1:
      o.kernel_sparsity = 0.5;
      spec = random_spec(rng, o);
      break;
    case 2:
      o.inputs_independent_of_cell = true;
      spec = random_spec(rng, o);
      break;
    default:
      spec = identity_spec(rng, 2, 2, 3);
      break;
  }
  const DiscreteJoint joint = joint_from_spec(spec);
  t.sandwich = check_sandwich(joint);
  t.upper = check_upper_bound(joint);
  t.mixture = check_mixture_bound(joint);
  const Critic critic = random_critic(rng, joint.nz());
  t.cs_infonce = cs_infonce_exact(joint, critic, 2);
  t.cs_infonce_holds = t.cs_infonce <= t.sandwich.i_zpz_given_ay + kSlack;

  const auto p = dirichlet(rng, 6);
  const auto q = dirichlet(rng, 6);
  t.kl = kl_variational_check(p, q, rng, kl_critics);

  t.pass = t.sandwich.pass && t.upper.pass && t.mixture.pass &&
           t.cs_infonce_holds && t.kl.pass;
  return t;
}

SuiteReport run_suite(const SuiteConfig& config) {
  SuiteReport r;
  r.trials.resize(config.trials);
  parallel_for(config.trials, config.threads, [&](std::size_t i) {
    r.trials[i] = run_trial(i, config.seed, config.kl_critics_per_trial);
  });
  for (const auto& t : r.trials) {
    r.passed += t.pass;
    r.sandwich_passed += t.sandwich.pass;
    r.upper_passed += t.upper.pass;
    r.upper_infinite += t.upper.rhs_infinite;
    r.mixture_passed += t.mixture.pass;
    r.cs_infonce_passed += t.cs_infonce_holds;
    r.kl_passed += t.kl.pass;
  }
  return r;
}

nlohmann::ordered_json trial_to_json(const TrialReport& t) {
  auto num = [](double v) -> nlohmann::ordered_json {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
  };
  nlohmann::ordered_json j;
  j["trial"] = t.trial;
  j["seed"] = t.seed;
  j["pass"] = t.pass;
  j["sandwich"] = {{"i_za_given_y", t.sandwich.i_za_given_y},
                   {"i_zpz_given_y", t.sandwich.i_zpz_given_y},
                   {"i_zpz_given_ay", t.sandwich.i_zpz_given_ay},
                   {"epsilon", t.sandwich.epsilon},
                   {"lower", t.sandwich.lower},
                   {"upper", t.sandwich.upper},
                   {"pass", t.sandwich.pass}};
  j["upper_bound"] = {{"lhs", t.upper.lhs},
                      {"rhs", num(t.upper.rhs)},
                      {"rhs_infinite", t.upper.rhs_infinite},
                      {"pass", t.upper.pass}};
  j["mixture_bound"] = {{"lhs", num(t.mixture.lhs)},
                        {"rhs", t.mixture.rhs},
                        {"pass", t.mixture.pass}};
  j["cs_infonce"] = {{"value", t.cs_infonce},
                     {"bound", t.sandwich.i_zpz_given_ay},
                     {"pass", t.cs_infonce_holds}};
  j["kl_variational"] = {{"kl", t.kl.kl},
                         {"optimal_objective", t.kl.optimal_objective},
                         {"max_random_objective", t.kl.max_random_objective},
                         {"random_critics", t.kl.random_critics},
                         {"pass", t.kl.pass}};
  return j;
}

nlohmann::ordered_json suite_to_json(const SuiteReport& r) {
  nlohmann::ordered_json j;
  j["trials"] = r.trials.size();
  j["passed"] = r.passed;
  j["sandwich_passed"] = r.sandwich_passed;
  j["upper_bound_passed"] = r.upper_passed;
  j["upper_bound_infinite_rhs"] = r.upper_infinite;
  j["mixture_bound_passed"] = r.mixture_passed;
  j["cs_infonce_passed"] = r.cs_infonce_passed;
  j["kl_variational_passed"] = r.kl_passed;
  nlohmann::ordered_json per = nlohmann::ordered_json::array();
  for (const auto& t : r.trials) per.push_back(trial_to_json(t));
  j["per_trial"] = per;
  return j;
}

}  // namespace faircon::info

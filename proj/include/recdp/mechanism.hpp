// Copyright 2026 The recdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RECDP_MECHANISM_HPP_
#define RECDP_MECHANISM_HPP_

#include <cstdint>
#include <map>
#include <random>
#include <string>

#include "recdp/sequences.hpp"

namespace recdp {

struct MechanismParams {
  double epsilon1 = 0.0;
  double epsilon2 = 0.0;
  double beta = 0.0;
  double theta = 1.0;
  double mu = 0.5;
  int g = 2;  // 2 for the LP-based sequences, 1 for the reference sequences

  // Debug-only: forces both noise draws to zero. The output is NOT private.
  bool zero_noise = false;

  void validate() const;
};

// Deterministic noise stream: identical (seed, stream) pairs reproduce the
// same sequence; distinct streams are independent for practical purposes.
class NoiseSource {
 public:
  NoiseSource(std::uint64_t master_seed, std::uint64_t stream_index);

  // Uniform on (-1/2, 1/2], excluding the singular endpoint +1/2.
  double uniform_signed();

  // Inverse-CDF Laplace draw with the given scale; scale 0 returns 0.
  double laplace(double scale);

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_index() const { return stream_index_; }

 private:
  std::uint64_t master_seed_, stream_index_;
  std::mt19937_64 rng_;
};

// -scale * sgn(v) * ln(1 - 2|v|) for v in (-1/2, 1/2); v = 0 maps to 0.
double laplace_from_uniform(double v, double scale);

struct MechanismTrace {
  double delta = 0.0;
  double delta_hat = 0.0;
  int j_index = 0;
  double i_star = 0.0;
  int i_integer = 0;
  double x = 0.0;
  double x_hat = 0.0;
  double true_answer = 0.0;      // debug only
  double us_sensitivity = 0.0;   // debug only
  std::map<int, double> h_values, g_values;
  MechanismParams params;
};

// Smallest j in [0, |P|] with G_{|P|-j} <= e^{j beta} theta, found by binary
// search on the monotone predicate; Delta = e^{j beta} theta. The initial
// range is capped at 1 + ln(G_{|P|}/theta)/beta when G_{|P|} > theta.
std::pair<double, int> compute_delta(SequenceEvaluator& se, const MechanismParams& params,
                                     MechanismTrace* trace = nullptr);

// Multiplicative noise: e^{mu + Y} Delta with Y ~ Lap(beta/epsilon1).
double randomize_delta(double delta, const MechanismParams& params, NoiseSource& ns);

struct XResult {
  double x = 0.0;
  int i = 0;
  double i_star = 0.0;
};

// Clipped estimate X = min over i of H_i + (|P|-i) delta_hat, recovered from
// the fractional minimizer plus convexity of H.
XResult compute_X(SequenceEvaluator& se, double delta_hat, MechanismTrace* trace = nullptr);

// Full pipeline; deterministic given (relation, query, params, noise stream).
MechanismTrace release(SequenceEvaluator& se, const MechanismParams& params, NoiseSource& ns);
MechanismTrace release(const AnnotatedRelation& relation, const LinearQuery& query,
                       const MechanismParams& params, NoiseSource& ns);

// Flat single-line record: delta, delta_hat, j, i_star, i, X, X_hat,
// epsilon1, epsilon2, beta, theta, mu, g, plus true_answer and
// us_sensitivity when debug is set. Locale-independent formatting.
std::string serialize_trace(const MechanismTrace& trace, bool debug);

// Locale-independent general-format number with 9 significant digits.
std::string format_number(double value);

}  // namespace recdp

#endif  // RECDP_MECHANISM_HPP_

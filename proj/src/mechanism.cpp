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

#include "recdp/mechanism.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace recdp {

void MechanismParams::validate() const {
  if (!(epsilon1 > 0)) throw DataError("epsilon1 must be positive");
  if (!(epsilon2 > 0)) throw DataError("epsilon2 must be positive");
  if (!(beta > 0)) throw DataError("beta must be positive");
  if (!(theta > 0)) throw DataError("theta must be positive");
  if (!(mu > 0)) throw DataError("mu must be positive");
  if (g != 1 && g != 2) throw DataError("g must be 1 or 2");
}

NoiseSource::NoiseSource(std::uint64_t master_seed, std::uint64_t stream_index)
    : master_seed_(master_seed), stream_index_(stream_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(stream_index),
                    static_cast<std::uint32_t>(stream_index >> 32)};
  rng_.seed(seq);
}

double NoiseSource::uniform_signed() {
  for (;;) {
    std::uint64_t mantissa = rng_() >> 11;  // 53 bits
    double v = static_cast<double>(mantissa + 1) * 0x1.0p-53 - 0.5;
    if (v < 0.5) return v;  // reject the singular endpoint
  }
}

double laplace_from_uniform(double v, double scale) {
  if (scale < 0) throw DataError("laplace scale must be nonnegative");
  if (v == 0.0 || scale == 0.0) return 0.0;
  double sign = v > 0 ? 1.0 : -1.0;
  return -scale * sign * std::log(1.0 - 2.0 * std::fabs(v));
}

double NoiseSource::laplace(double scale) {
  if (scale < 0) throw DataError("laplace scale must be nonnegative");
  if (scale == 0.0) return 0.0;
  return laplace_from_uniform(uniform_signed(), scale);
}

std::pair<double, int> compute_delta(SequenceEvaluator& se, const MechanismParams& params,
                                     MechanismTrace* trace) {
  params.validate();
  const int population = static_cast<int>(se.population());

  auto g_at = [&](int index) {
    double value = se.eval_G(index);
    if (trace != nullptr) trace->g_values[index] = value;
    return value;
  };
  auto predicate = [&](int j) {
    return g_at(population - j) <= std::exp(j * params.beta) * params.theta;
  };

  int lo = 0;
  int hi = population;
  double g_top = g_at(population);
  if (g_top <= params.theta) {
    lo = hi = 0;
  } else {
    double cap = 1.0 + std::log(g_top / params.theta) / params.beta;
    if (cap < static_cast<double>(population)) {
      int capped = static_cast<int>(std::ceil(cap - 1e-12));
      capped = std::max(capped, 0);
      if (capped < population && predicate(capped)) {
        hi = capped;
      }
    }
    while (lo < hi) {
      int mid = lo + (hi - lo) / 2;
      if (predicate(mid)) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
  }
  double delta = std::exp(lo * params.beta) * params.theta;
  if (trace != nullptr) {
    trace->delta = delta;
    trace->j_index = lo;
  }
  return {delta, lo};
}

double randomize_delta(double delta, const MechanismParams& params, NoiseSource& ns) {
  params.validate();
  if (!(delta > 0)) throw DataError("delta must be positive");
  double y = params.zero_noise ? 0.0 : ns.laplace(params.beta / params.epsilon1);
  return std::exp(params.mu + y) * delta;
}

XResult compute_X(SequenceEvaluator& se, double delta_hat, MechanismTrace* trace) {
  if (!(delta_hat > 0)) throw DataError("delta_hat must be positive");
  const int population = static_cast<int>(se.population());

  double i_star = se.fractional_argmin_i(delta_hat);
  int lo = std::clamp(static_cast<int>(std::floor(i_star)), 0, population);
  int hi = std::clamp(static_cast<int>(std::ceil(i_star)), 0, population);

  auto h_at = [&](int index) {
    double value = se.eval_H(index);
    if (trace != nullptr) trace->h_values[index] = value;
    return value;
  };
  double x_lo = h_at(lo) + (population - lo) * delta_hat;
  double x_hi = h_at(hi) + (population - hi) * delta_hat;

  XResult result;
  result.i_star = i_star;
  if (x_hi <= x_lo) {  // exact tie resolves toward the larger index
    result.x = x_hi;
    result.i = hi;
  } else {
    result.x = x_lo;
    result.i = lo;
  }
  if (trace != nullptr) {
    trace->i_star = i_star;
    trace->i_integer = result.i;
    trace->x = result.x;
  }
  return result;
}

MechanismTrace release(SequenceEvaluator& se, const MechanismParams& params, NoiseSource& ns) {
  params.validate();
  MechanismTrace trace;
  trace.params = params;
  auto [delta, j] = compute_delta(se, params, &trace);
  trace.delta_hat = randomize_delta(delta, params, ns);
  compute_X(se, trace.delta_hat, &trace);
  double noise =
      params.zero_noise ? 0.0 : ns.laplace(trace.delta_hat / params.epsilon2);
  trace.x_hat = trace.x + noise;
  trace.true_answer = se.true_answer();
  trace.us_sensitivity = se.us_sensitivity();
  return trace;
}

MechanismTrace release(const AnnotatedRelation& relation, const LinearQuery& query,
                       const MechanismParams& params, NoiseSource& ns) {
  SequenceEvaluator se(relation, query);
  return release(se, params, ns);
}

std::string format_number(double value) {
  char buffer[64];
  auto result = std::to_chars(buffer, buffer + sizeof(buffer), value,
                              std::chars_format::general, 9);
  return std::string(buffer, result.ptr);
}

std::string serialize_trace(const MechanismTrace& trace, bool debug) {
  std::string out;
  auto field = [&out](const std::string& key, const std::string& value) {
    if (!out.empty()) out += ' ';
    out += key;
    out += '=';
    out += value;
  };
  field("delta", format_number(trace.delta));
  field("delta_hat", format_number(trace.delta_hat));
  field("j", std::to_string(trace.j_index));
  field("i_star", format_number(trace.i_star));
  field("i", std::to_string(trace.i_integer));
  field("X", format_number(trace.x));
  field("X_hat", format_number(trace.x_hat));
  field("epsilon1", format_number(trace.params.epsilon1));
  field("epsilon2", format_number(trace.params.epsilon2));
  field("beta", format_number(trace.params.beta));
  field("theta", format_number(trace.params.theta));
  field("mu", format_number(trace.params.mu));
  field("g", std::to_string(trace.params.g));
  if (debug) {
    field("true_answer", format_number(trace.true_answer));
    field("us_sensitivity", format_number(trace.us_sensitivity));
  }
  return out;
}

}  // namespace recdp

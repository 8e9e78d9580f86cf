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

#ifndef RECDP_EXPERIMENT_HPP_
#define RECDP_EXPERIMENT_HPP_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "recdp/subgraph.hpp"

namespace recdp {

// Flat key=value configuration for the experiment harness. Keys: n, avgdeg,
// instances, pattern, privacy (comma list of node/edge), epsilon, trials,
// seed, threads, and optional overrides theta, beta, mu, epsilon1, epsilon2.
struct ExperimentConfig {
  int n = 100;
  double avgdeg = 10.0;
  int instances = 1;
  Pattern pattern = Pattern::triangle();
  std::vector<PrivacyMode> privacy = {PrivacyMode::kEdge};
  double epsilon = 0.5;
  int trials = 1;
  std::uint64_t seed = 0;
  int threads = 1;
  bool zero_noise = false;
  std::optional<double> theta, beta, mu, epsilon1, epsilon2;

  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::string& path);

  MechanismParams mechanism_params(PrivacyMode mode) const;
};

struct ExperimentRow {
  int n = 0;
  double avgdeg = 0.0;
  std::string pattern;
  std::string privacy;
  double epsilon = 0.0;
  int instances = 0;
  int trials = 0;
  double median_rel_error = 0.0;
  double mean_time_ms = 0.0;
  int skipped_zero_true = 0;  // diagnostics only, not a CSV column
};

std::vector<ExperimentRow> run_experiment_rows(const ExperimentConfig& config,
                                               std::ostream* diagnostics = nullptr);

// CSV with the fixed header
// n,avgdeg,pattern,privacy,epsilon,instances,trials,median_rel_error,mean_time_ms
// and one row per privacy mode. Instances with a zero true answer are
// excluded from the median and reported on the diagnostics stream.
std::string run_experiment(const ExperimentConfig& config, std::ostream* diagnostics = nullptr);

}  // namespace recdp

#endif  // RECDP_EXPERIMENT_HPP_

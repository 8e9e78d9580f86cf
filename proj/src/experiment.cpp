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

#include "recdp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

namespace recdp {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ParseError("bad numeric value '" + value + "' for key '" + key + "'");
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ParseError("bad integer value '" + value + "' for key '" + key + "'");
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig config;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool privacy_set = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config line " + std::to_string(line_no) + " is not key=value");
    }
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key == "n") {
      config.n = static_cast<int>(parse_int(key, value));
    } else if (key == "avgdeg") {
      config.avgdeg = parse_double(key, value);
    } else if (key == "instances") {
      config.instances = static_cast<int>(parse_int(key, value));
    } else if (key == "pattern") {
      config.pattern = Pattern::parse(value);
    } else if (key == "privacy") {
      config.privacy.clear();
      privacy_set = true;
      std::istringstream modes(value);
      std::string mode;
      while (std::getline(modes, mode, ',')) {
        config.privacy.push_back(parse_privacy_mode(trim(mode)));
      }
    } else if (key == "epsilon") {
      config.epsilon = parse_double(key, value);
    } else if (key == "trials") {
      config.trials = static_cast<int>(parse_int(key, value));
    } else if (key == "seed") {
      config.seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "threads") {
      config.threads = static_cast<int>(parse_int(key, value));
    } else if (key == "zero_noise") {
      config.zero_noise = (value == "1" || value == "true");
    } else if (key == "theta") {
      config.theta = parse_double(key, value);
    } else if (key == "beta") {
      config.beta = parse_double(key, value);
    } else if (key == "mu") {
      config.mu = parse_double(key, value);
    } else if (key == "epsilon1") {
      config.epsilon1 = parse_double(key, value);
    } else if (key == "epsilon2") {
      config.epsilon2 = parse_double(key, value);
    } else {
      throw ParseError("unknown config key '" + key + "'");
    }
  }
  if (config.trials < 1) throw DataError("trials must be >= 1");
  if (config.instances < 1) throw DataError("instances must be >= 1");
  if (config.threads < 1) throw DataError("threads must be >= 1");
  if (!privacy_set || config.privacy.empty()) {
    throw DataError("config must set privacy to node, edge, or a comma list");
  }
  return config;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

MechanismParams ExperimentConfig::mechanism_params(PrivacyMode mode) const {
  MechanismParams params;
  params.epsilon1 = epsilon1.value_or(epsilon / 2.0);
  params.epsilon2 = epsilon2.value_or(epsilon / 2.0);
  params.beta = beta.value_or(epsilon / 5.0);
  params.theta = theta.value_or(1.0);
  params.mu = mu.value_or(mode == PrivacyMode::kNode ? 1.0 : 0.5);
  params.g = 2;
  params.zero_noise = zero_noise;
  params.validate();
  return params;
}

namespace {

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::uint64_t trial_stream(int instance, int mode_index, int trial) {
  return (static_cast<std::uint64_t>(instance) << 40) ^
         (static_cast<std::uint64_t>(mode_index) << 32) ^ static_cast<std::uint64_t>(trial);
}

struct TrialOutcome {
  double rel_error = 0.0;
  double elapsed_ms = 0.0;
  bool counted = false;
};

}  // namespace

std::vector<ExperimentRow> run_experiment_rows(const ExperimentConfig& config,
                                               std::ostream* diagnostics) {
  std::vector<Graph> graphs;
  graphs.reserve(config.instances);
  std::vector<std::vector<Match>> match_sets;
  for (int inst = 0; inst < config.instances; ++inst) {
    graphs.push_back(generate_gnp(config.n, config.avgdeg, config.seed + 1000003ULL * inst));
    match_sets.push_back(enumerate_matches(graphs.back(), config.pattern));
  }

  std::vector<ExperimentRow> rows;
  for (std::size_t mode_index = 0; mode_index < config.privacy.size(); ++mode_index) {
    PrivacyMode mode = config.privacy[mode_index];
    MechanismParams params = config.mechanism_params(mode);
    ExperimentRow row;
    row.n = config.n;
    row.avgdeg = config.avgdeg;
    row.pattern = config.pattern.describe();
    row.privacy = mode == PrivacyMode::kNode ? "node" : "edge";
    row.epsilon = config.epsilon;
    row.instances = config.instances;
    row.trials = config.trials;

    std::vector<double> rel_errors;
    double total_ms = 0.0;
    long counted_runs = 0;

    for (int inst = 0; inst < config.instances; ++inst) {
      const std::vector<Match>& matches = match_sets[inst];
      double true_answer = static_cast<double>(matches.size());
      if (true_answer <= 0.0) {
        ++row.skipped_zero_true;
        if (diagnostics != nullptr) {
          (*diagnostics) << "note: instance " << inst << " (" << row.privacy
                         << ") has a zero true answer and is excluded from the median\n";
        }
        continue;
      }
      AnnotatedRelation relation = build_krelation(graphs[inst], config.pattern, matches, mode);
      SequenceEvaluator evaluator(relation, LinearQuery::count());

      std::vector<TrialOutcome> outcomes(config.trials);
      auto run_trial = [&](int trial) {
        NoiseSource ns(config.seed, trial_stream(inst, static_cast<int>(mode_index), trial));
        auto start = std::chrono::steady_clock::now();
        MechanismTrace trace = release(evaluator, params, ns);
        auto stop = std::chrono::steady_clock::now();
        TrialOutcome outcome;
        outcome.elapsed_ms =
            std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(stop - start)
                .count();
        outcome.rel_error = std::fabs(trace.x_hat - true_answer) / true_answer;
        outcome.counted = true;
        outcomes[trial] = outcome;
      };

      if (config.threads <= 1) {
        for (int trial = 0; trial < config.trials; ++trial) run_trial(trial);
      } else {
        std::vector<std::thread> workers;
        std::atomic<int> next{0};
        int worker_count = std::min(config.threads, config.trials);
        for (int w = 0; w < worker_count; ++w) {
          workers.emplace_back([&]() {
            for (;;) {
              int trial = next.fetch_add(1);
              if (trial >= config.trials) return;
              run_trial(trial);
            }
          });
        }
        for (auto& worker : workers) worker.join();
      }

      for (const TrialOutcome& outcome : outcomes) {
        if (!outcome.counted) continue;
        rel_errors.push_back(outcome.rel_error);
        total_ms += outcome.elapsed_ms;
        ++counted_runs;
      }
    }

    row.median_rel_error = median(std::move(rel_errors));
    row.mean_time_ms = counted_runs > 0 ? total_ms / counted_runs : 0.0;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string run_experiment(const ExperimentConfig& config, std::ostream* diagnostics) {
  std::vector<ExperimentRow> rows = run_experiment_rows(config, diagnostics);
  std::string out =
      "n,avgdeg,pattern,privacy,epsilon,instances,trials,median_rel_error,mean_time_ms\n";
  for (const ExperimentRow& row : rows) {
    out += std::to_string(row.n);
    out += ',';
    out += format_number(row.avgdeg);
    out += ',';
    out += row.pattern;
    out += ',';
    out += row.privacy;
    out += ',';
    out += format_number(row.epsilon);
    out += ',';
    out += std::to_string(row.instances);
    out += ',';
    out += std::to_string(row.trials);
    out += ',';
    out += format_number(row.median_rel_error);
    out += ',';
    out += format_number(row.mean_time_ms);
    out += '\n';
  }
  return out;
}

}  // namespace recdp

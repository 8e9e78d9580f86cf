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

#include "recdp/cli.hpp"

#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "recdp/experiment.hpp"
#include "recdp/relalg.hpp"

namespace recdp {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;
constexpr int kExitCapacity = 3;

struct MechanismFlags {
  double epsilon = 0.0;
  std::optional<double> epsilon1, epsilon2, theta, beta, mu;
  std::uint64_t seed = 0;
  bool debug = false;
  bool zero_noise = false;
};

void add_mechanism_flags(CLI::App* cmd, MechanismFlags* flags) {
  cmd->add_option("--epsilon", flags->epsilon, "total privacy budget")->required();
  cmd->add_option("--epsilon1", flags->epsilon1, "budget for the clipping scale (default epsilon/2)");
  cmd->add_option("--epsilon2", flags->epsilon2, "budget for the release noise (default epsilon/2)");
  cmd->add_option("--theta", flags->theta, "clipping floor (default 1.0)");
  cmd->add_option("--beta", flags->beta, "growth rate (default epsilon/5)");
  cmd->add_option("--mu", flags->mu, "overshoot margin (default 0.5; 1.0 for node privacy)");
  cmd->add_option("--seed", flags->seed, "noise seed (default 0)");
  cmd->add_flag("--debug", flags->debug, "include true_answer and us_sensitivity in the record");
  cmd->add_flag("--zero-noise", flags->zero_noise,
                "debug mode that disables noise; the output is NOT private");
}

MechanismParams make_params(const MechanismFlags& flags, bool node_privacy) {
  if (!(flags.epsilon > 0)) throw DataError("epsilon must be positive");
  MechanismParams params;
  params.epsilon1 = flags.epsilon1.value_or(flags.epsilon / 2.0);
  params.epsilon2 = flags.epsilon2.value_or(flags.epsilon / 2.0);
  params.beta = flags.beta.value_or(flags.epsilon / 5.0);
  params.theta = flags.theta.value_or(1.0);
  params.mu = flags.mu.value_or(node_privacy ? 1.0 : 0.5);
  params.g = 2;
  params.zero_noise = flags.zero_noise;
  params.validate();
  return params;
}

void warn_zero_noise(const MechanismFlags& flags, std::ostream& err) {
  if (flags.zero_noise) {
    err << "WARNING: output is NOT differentially private (zero-noise debug mode)\n";
  }
}

int run_subgraph(const std::string& graph_path, const std::string& pattern_text,
                 const std::string& privacy_text, const MechanismFlags& flags, std::ostream& out,
                 std::ostream& err) {
  Graph graph = Graph::load(graph_path);
  if (graph.self_loops_dropped() > 0) {
    err << "note: dropped " << graph.self_loops_dropped() << " self-loop(s)\n";
  }
  Pattern pattern = Pattern::parse(pattern_text);
  PrivacyMode mode = parse_privacy_mode(privacy_text);
  MechanismParams params = make_params(flags, mode == PrivacyMode::kNode);
  warn_zero_noise(flags, err);
  NoiseSource ns(flags.seed, 0);
  auto [x_hat, trace] = count_pipeline(graph, pattern, mode, params, ns);
  (void)x_hat;
  out << serialize_trace(trace, flags.debug) << "\n";
  return kExitOk;
}

int run_relalg(const std::string& tables_dir, const std::string& query_path,
               const std::string& weight_spec, const MechanismFlags& flags, std::ostream& out,
               std::ostream& err) {
  TableSet tables = load_tables_dir(tables_dir);
  std::ifstream in(query_path, std::ios::binary);
  if (!in) throw DataError("cannot open query file '" + query_path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  RelalgQuery query = parse_relalg(buffer.str());
  AnnotatedRelation result = execute(query, tables);

  LinearQuery weight = LinearQuery::count();
  if (weight_spec == "count") {
    // default
  } else if (weight_spec.rfind("column:", 0) == 0) {
    weight = LinearQuery::column(weight_spec.substr(7));
  } else {
    throw DataError("unknown weight spec '" + weight_spec + "' (expected count or column:NAME)");
  }
  // Negative column values are a data error and must fail before release.
  (void)query_true_answer(result, weight);

  MechanismParams params = make_params(flags, /*node_privacy=*/false);
  warn_zero_noise(flags, err);
  NoiseSource ns(flags.seed, 0);
  MechanismTrace trace = release(result, weight, params, ns);
  out << serialize_trace(trace, flags.debug) << "\n";
  return kExitOk;
}

int run_experiment_cmd(const std::string& config_path, std::ostream& out, std::ostream& err) {
  ExperimentConfig config = ExperimentConfig::load(config_path);
  if (config.zero_noise) {
    err << "WARNING: output is NOT differentially private (zero-noise debug mode)\n";
  }
  out << run_experiment(config, &err);
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"differentially private linear statistics over annotated relations"};
  app.require_subcommand(1);

  auto* subgraph_cmd = app.add_subcommand("subgraph", "count subgraph occurrences privately");
  std::string graph_path, pattern_text, privacy_text;
  MechanismFlags subgraph_flags;
  subgraph_cmd->add_option("--graph", graph_path, "edge-list file")->required();
  subgraph_cmd
      ->add_option("--pattern", pattern_text, "triangle | star:K | ktriangle:K | file:PATH")
      ->required();
  subgraph_cmd->add_option("--privacy", privacy_text, "node | edge")->required();
  add_mechanism_flags(subgraph_cmd, &subgraph_flags);

  auto* relalg_cmd = app.add_subcommand("relalg", "run an algebra query and release a statistic");
  std::string tables_dir, query_path, weight_spec = "count";
  MechanismFlags relalg_flags;
  relalg_cmd->add_option("--tables", tables_dir, "directory of .tbl files")->required();
  relalg_cmd->add_option("--query", query_path, "query file")->required();
  relalg_cmd->add_option("--weight", weight_spec, "count | column:NAME");
  add_mechanism_flags(relalg_cmd, &relalg_flags);

  auto* experiment_cmd = app.add_subcommand("experiment", "run the accuracy harness");
  std::string config_path, format = "csv";
  experiment_cmd->add_option("--config", config_path, "key=value config file")->required();
  experiment_cmd->add_option("--format", format)->check(CLI::IsMember({"csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (subgraph_cmd->parsed()) {
      return run_subgraph(graph_path, pattern_text, privacy_text, subgraph_flags, out, err);
    }
    if (relalg_cmd->parsed()) {
      return run_relalg(tables_dir, query_path, weight_spec, relalg_flags, out, err);
    }
    if (experiment_cmd->parsed()) {
      return run_experiment_cmd(config_path, out, err);
    }
  } catch (const CapacityError& e) {
    err << "capacity error: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace recdp

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

#ifndef RECDP_LP_HPP_
#define RECDP_LP_HPP_

#include <string>
#include <utility>
#include <vector>

#include "recdp/errors.hpp"

namespace recdp {

inline constexpr double kLpFeasibilityTol = 1e-7;

// Minimization problem with box-bounded variables and <=/= constraints.
struct LinearProgramInstance {
  struct Constraint {
    std::vector<std::pair<int, double>> terms;
    bool is_equality = false;
    double rhs = 0.0;
  };

  std::vector<double> lower, upper, objective;
  std::vector<std::string> names;
  std::vector<Constraint> constraints;

  int add_variable(double lo, double hi, double obj = 0.0, std::string name = {});
  void set_objective(int var, double coeff);
  void add_constraint_le(std::vector<std::pair<int, double>> terms, double rhs);
  void add_constraint_eq(std::vector<std::pair<int, double>> terms, double rhs);

  std::size_t variable_count() const { return lower.size(); }

  // Plain-text "minimize / subject to / bounds" dump for debugging.
  std::string dump() const;
};

struct LpSolution {
  enum class Status { kOptimal, kInfeasible };
  Status status = Status::kInfeasible;
  double objective = 0.0;
  std::vector<double> values;
};

// Dense bounded-variable primal simplex, two phases, deterministic for a
// fixed instance. Dantzig pricing with a Bland's-rule fallback that engages
// on degenerate stalls, which guards against cycling.
LpSolution solve_lp(const LinearProgramInstance& lp);

}  // namespace recdp

#endif  // RECDP_LP_HPP_

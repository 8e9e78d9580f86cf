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

#ifndef RECDP_SEQUENCES_HPP_
#define RECDP_SEQUENCES_HPP_

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "recdp/krelation.hpp"
#include "recdp/lp.hpp"

namespace recdp {

// Encodes the relaxation of k over the given assignment variables into lp:
// one [0,1] variable per distinct subexpression, lower-bound constraints for
// conjunction and disjunction nodes. Returns the root variable. Exact at the
// optimum whenever the root appears downstream with nonnegative coefficients
// in a minimization.
int encode_phi(LinearProgramInstance* lp, const Expr& k,
               const std::map<ParticipantId, int>& assignment_vars);

// Evaluates the relaxed sequences H_i and G_i of a relation/query pair by
// linear programming, with per-index caching. Participants that appear in no
// annotation are aggregated into one mass variable, which preserves the
// optimum exactly. Cache access is internally synchronized; solved values are
// deterministic for fixed inputs.
class SequenceEvaluator {
 public:
  SequenceEvaluator(AnnotatedRelation relation, LinearQuery query);

  std::size_t population() const { return population_; }
  double true_answer() const { return true_answer_; }
  // Universal empirical sensitivity of the query at this relation.
  double us_sensitivity() const { return us_sensitivity_; }
  const AnnotatedRelation& relation() const { return relation_; }

  // min over f in [0,1]^P with |f| = i of sum_t q(t) phi_{R(t)}(f).
  // i may be fractional; 0 <= i <= |P|.
  double eval_H(double i);

  // min over f with |f| = i of 2 max_p sum_t q(t) phi_{R(t)}(f) S_{R(t),p}.
  // Integer i only.
  double eval_G(int i);

  // Mass |f| at the optimum of sum_t q(t) phi_{R(t)}(f) - delta_hat |f| with
  // the mass constraint released; ties resolve to the largest optimal mass.
  double fractional_argmin_i(double delta_hat);

  struct EncodingStats {
    std::size_t variables = 0;
    std::size_t constraints = 0;
  };
  // Size of the H encoding, for cost accounting.
  EncodingStats encoding_stats();

 private:
  struct Row {
    Expr annotation;
    double weight = 0.0;
    std::map<ParticipantId, int> sensitivities;
  };

  struct Base {
    LinearProgramInstance lp;
    std::map<ParticipantId, int> f_vars;
    int mass_var = -1;  // aggregate of non-occurring participants
    std::vector<int> roots;
  };

  Base build_base() const;
  std::vector<std::pair<int, double>> mass_terms(const Base& base) const;
  double solve_h(double i) const;
  double solve_g(int i) const;

  AnnotatedRelation relation_;
  std::vector<Row> rows_;
  std::vector<ParticipantId> occurring_;
  std::size_t population_ = 0;
  std::size_t free_count_ = 0;
  double true_answer_ = 0.0;
  double us_sensitivity_ = 0.0;
  double sens_bound_ = 0.0;  // max_p sum_t q(t) S_{t,p}

  std::mutex cache_mutex_;
  std::map<double, double> h_cache_;
  std::map<int, double> g_cache_;
};

}  // namespace recdp

#endif  // RECDP_SEQUENCES_HPP_

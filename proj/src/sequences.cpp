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

#include "recdp/sequences.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace recdp {

namespace {

int encode_node(LinearProgramInstance* lp, const Expr& k,
                const std::map<ParticipantId, int>& assignment_vars,
                std::map<std::string, int>* memo) {
  switch (k.kind()) {
    case Expr::Kind::kTrue: {
      std::string key = "#t";
      auto it = memo->find(key);
      if (it != memo->end()) return it->second;
      int v = lp->add_variable(1.0, 1.0);
      memo->emplace(std::move(key), v);
      return v;
    }
    case Expr::Kind::kFalse: {
      std::string key = "#f";
      auto it = memo->find(key);
      if (it != memo->end()) return it->second;
      int v = lp->add_variable(0.0, 0.0);
      memo->emplace(std::move(key), v);
      return v;
    }
    case Expr::Kind::kVar: {
      auto it = assignment_vars.find(k.var_name());
      if (it == assignment_vars.end()) {
        throw DataError("unbound variable '" + k.var_name() + "' in encoding");
      }
      return it->second;
    }
    case Expr::Kind::kAnd:
    case Expr::Kind::kOr: {
      std::string key = to_string(k);
      auto it = memo->find(key);
      if (it != memo->end()) return it->second;
      int zl = encode_node(lp, k.left(), assignment_vars, memo);
      int zr = encode_node(lp, k.right(), assignment_vars, memo);
      int z = lp->add_variable(0.0, 1.0);
      if (k.kind() == Expr::Kind::kAnd) {
        // z >= zl + zr - 1, z >= 0 (bound)
        lp->add_constraint_le({{zl, 1.0}, {zr, 1.0}, {z, -1.0}}, 1.0);
      } else {
        // z >= zl, z >= zr
        lp->add_constraint_le({{zl, 1.0}, {z, -1.0}}, 0.0);
        lp->add_constraint_le({{zr, 1.0}, {z, -1.0}}, 0.0);
      }
      memo->emplace(std::move(key), z);
      return z;
    }
  }
  throw Error("unreachable expression kind");
}

}  // namespace

int encode_phi(LinearProgramInstance* lp, const Expr& k,
               const std::map<ParticipantId, int>& assignment_vars) {
  std::map<std::string, int> memo;
  return encode_node(lp, k, assignment_vars, &memo);
}

SequenceEvaluator::SequenceEvaluator(AnnotatedRelation relation, LinearQuery query)
    : relation_(std::move(relation)) {
  population_ = relation_.participants().size();
  std::set<ParticipantId> occurring;
  for (const auto& [tuple, annotation] : relation_.rows()) {
    Row row;
    row.annotation = annotation;
    row.weight = query(relation_.schema(), tuple);
    if (row.weight < 0) throw DataError("linear query weights must be nonnegative");
    row.sensitivities = phi_sensitivities(annotation);
    true_answer_ += row.weight;
    for (const auto& [p, s] : row.sensitivities) {
      if (s > 0) occurring.insert(p);
    }
    for (const ParticipantId& p : variables(annotation)) occurring.insert(p);
    rows_.push_back(std::move(row));
  }
  occurring_.assign(occurring.begin(), occurring.end());
  free_count_ = population_ - occurring_.size();

  std::map<ParticipantId, double> weighted;
  std::map<ParticipantId, double> impact_weight;
  for (const Row& row : rows_) {
    for (const auto& [p, s] : row.sensitivities) weighted[p] += row.weight * s;
    for (const ParticipantId& p : variables(row.annotation)) {
      impact_weight[p] += row.weight;
    }
  }
  for (const auto& [p, v] : weighted) sens_bound_ = std::max(sens_bound_, v);
  for (const auto& [p, v] : impact_weight) us_sensitivity_ = std::max(us_sensitivity_, v);
}

SequenceEvaluator::Base SequenceEvaluator::build_base() const {
  Base base;
  for (const ParticipantId& p : occurring_) {
    base.f_vars[p] = base.lp.add_variable(0.0, 1.0, 0.0, p);
  }
  if (free_count_ > 0) {
    base.mass_var =
        base.lp.add_variable(0.0, static_cast<double>(free_count_), 0.0, "free_mass");
  }
  base.roots.reserve(rows_.size());
  for (const Row& row : rows_) {
    base.roots.push_back(encode_phi(&base.lp, row.annotation, base.f_vars));
  }
  return base;
}

std::vector<std::pair<int, double>> SequenceEvaluator::mass_terms(const Base& base) const {
  std::vector<std::pair<int, double>> terms;
  terms.reserve(base.f_vars.size() + 1);
  for (const auto& [p, v] : base.f_vars) terms.emplace_back(v, 1.0);
  if (base.mass_var >= 0) terms.emplace_back(base.mass_var, 1.0);
  return terms;
}

double SequenceEvaluator::solve_h(double i) const {
  Base base = build_base();
  base.lp.add_constraint_eq(mass_terms(base), i);
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    base.lp.set_objective(base.roots[r],
                          base.lp.objective[base.roots[r]] + rows_[r].weight);
  }
  LpSolution solution = solve_lp(base.lp);
  if (solution.status != LpSolution::Status::kOptimal) {
    throw Error("H encoding unexpectedly infeasible");
  }
  return std::max(0.0, solution.objective);
}

double SequenceEvaluator::solve_g(int i) const {
  Base base = build_base();
  base.lp.add_constraint_eq(mass_terms(base), static_cast<double>(i));
  int u = base.lp.add_variable(0.0, std::max(0.0, sens_bound_), 2.0, "u");
  // u >= sum_t q(t) S_{t,p} z_t for every participant with a nonzero term;
  // the rest reduce to u >= 0, which the bound provides.
  for (const ParticipantId& p : occurring_) {
    std::vector<std::pair<int, double>> terms;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      auto it = rows_[r].sensitivities.find(p);
      if (it == rows_[r].sensitivities.end() || it->second == 0) continue;
      double coeff = rows_[r].weight * it->second;
      if (coeff != 0.0) terms.emplace_back(base.roots[r], coeff);
    }
    if (terms.empty()) continue;
    terms.emplace_back(u, -1.0);
    base.lp.add_constraint_le(std::move(terms), 0.0);
  }
  LpSolution solution = solve_lp(base.lp);
  if (solution.status != LpSolution::Status::kOptimal) {
    throw Error("G encoding unexpectedly infeasible");
  }
  return std::max(0.0, solution.objective);
}

double SequenceEvaluator::eval_H(double i) {
  if (i < -1e-9 || i > static_cast<double>(population_) + 1e-9) {
    throw DataError("H index " + std::to_string(i) + " outside [0, " +
                    std::to_string(population_) + "]");
  }
  i = std::min(std::max(i, 0.0), static_cast<double>(population_));
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = h_cache_.find(i);
    if (it != h_cache_.end()) return it->second;
  }
  double value = solve_h(i);
  std::lock_guard<std::mutex> lock(cache_mutex_);
  return h_cache_.emplace(i, value).first->second;
}

double SequenceEvaluator::eval_G(int i) {
  if (i < 0 || i > static_cast<int>(population_)) {
    throw DataError("G index " + std::to_string(i) + " outside [0, " +
                    std::to_string(population_) + "]");
  }
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = g_cache_.find(i);
    if (it != g_cache_.end()) return it->second;
  }
  double value = solve_g(i);
  std::lock_guard<std::mutex> lock(cache_mutex_);
  return g_cache_.emplace(i, value).first->second;
}

double SequenceEvaluator::fractional_argmin_i(double delta_hat) {
  if (!(delta_hat > 0)) throw DataError("fractional_argmin_i requires delta_hat > 0");

  Base base = build_base();
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    base.lp.set_objective(base.roots[r],
                          base.lp.objective[base.roots[r]] + rows_[r].weight);
  }
  for (const auto& [v, c] : mass_terms(base)) {
    base.lp.set_objective(v, base.lp.objective[v] - delta_hat * c);
  }
  LpSolution first = solve_lp(base.lp);
  if (first.status != LpSolution::Status::kOptimal) {
    throw Error("argmin encoding unexpectedly infeasible");
  }

  // Second stage: among optima of the first objective, take the largest mass.
  Base tie = build_base();
  std::vector<std::pair<int, double>> opt_terms;
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    opt_terms.emplace_back(tie.roots[r], rows_[r].weight);
  }
  for (const auto& [v, c] : mass_terms(tie)) opt_terms.emplace_back(v, -delta_hat * c);
  tie.lp.add_constraint_le(std::move(opt_terms), first.objective + 1e-9);
  for (const auto& [v, c] : mass_terms(tie)) tie.lp.set_objective(v, -c);
  LpSolution second = solve_lp(tie.lp);
  if (second.status != LpSolution::Status::kOptimal) {
    throw Error("argmin tie-break encoding unexpectedly infeasible");
  }
  double mass = 0.0;
  for (const auto& [v, c] : mass_terms(tie)) mass += c * second.values[v];
  return std::min(std::max(mass, 0.0), static_cast<double>(population_));
}

SequenceEvaluator::EncodingStats SequenceEvaluator::encoding_stats() {
  Base base = build_base();
  base.lp.add_constraint_eq(mass_terms(base), static_cast<double>(population_));
  return EncodingStats{base.lp.variable_count(), base.lp.constraints.size()};
}

}  // namespace recdp

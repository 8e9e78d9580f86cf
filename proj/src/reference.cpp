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

#include "recdp/reference.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace recdp {

namespace {

void check_cap(std::size_t n, std::size_t cap, const char* what) {
  if (n > cap) {
    throw CapacityError(std::string(what) + " limited to " + std::to_string(cap) +
                        " participants, got " + std::to_string(n));
  }
}

}  // namespace

SensitiveDatabase SensitiveDatabase::from_krelation(const AnnotatedRelation& r) {
  check_cap(r.participants().size(), kSensitiveDbParticipantCap, "from_krelation");
  SensitiveDatabase db;
  db.schema_ = r.schema();
  db.participants_.assign(r.participants().begin(), r.participants().end());
  for (const auto& [t, ann] : r.rows()) db.rows_.emplace_back(t, ann);
  return db;
}

std::vector<Tuple> SensitiveDatabase::content(std::uint32_t mask) const {
  BoolAssignment f;
  for (std::size_t i = 0; i < participants_.size(); ++i) {
    f[participants_[i]] = (mask >> i) & 1u;
  }
  std::vector<Tuple> out;
  for (const auto& [t, ann] : rows_) {
    if (evaluate(ann, f)) out.push_back(t);
  }
  return out;
}

double SensitiveDatabase::answer(std::uint32_t mask, const LinearQuery& q) const {
  BoolAssignment f;
  for (std::size_t i = 0; i < participants_.size(); ++i) {
    f[participants_[i]] = (mask >> i) & 1u;
  }
  double total = 0.0;
  for (const auto& [t, ann] : rows_) {
    if (evaluate(ann, f)) total += q(schema_, t);
  }
  return total;
}

double local_empirical_sensitivity(const SensitiveDatabase& db, const LinearQuery& q) {
  const std::size_t n = db.participants().size();
  if (n == 0) return 0.0;
  const std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1u);
  double at_full = db.answer(full, q);
  double best = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    best = std::max(best, std::fabs(at_full - db.answer(full & ~(1u << p), q)));
  }
  return best;
}

namespace {

// Per-mask query answers over all 2^n subsets.
std::vector<double> answer_table(const SensitiveDatabase& db, const LinearQuery& q) {
  const std::size_t n = db.participants().size();
  check_cap(n, kExhaustiveParticipantCap, "exhaustive enumeration");
  std::vector<double> table(std::size_t{1} << n, 0.0);
  for (std::uint32_t mask = 0; mask < table.size(); ++mask) {
    table[mask] = db.answer(mask, q);
  }
  return table;
}

std::vector<double> local_sensitivity_table(const SensitiveDatabase& db,
                                            const std::vector<double>& answers) {
  const std::size_t n = db.participants().size();
  std::vector<double> ls(answers.size(), 0.0);
  for (std::uint32_t mask = 0; mask < answers.size(); ++mask) {
    double best = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      if (mask & (1u << p)) {
        best = std::max(best, std::fabs(answers[mask] - answers[mask & ~(1u << p)]));
      }
    }
    ls[mask] = best;
  }
  return ls;
}

// gs[mask] = max over submasks of ls, via subset-max DP.
std::vector<double> global_sensitivity_table(std::size_t n, std::vector<double> ls) {
  for (std::size_t p = 0; p < n; ++p) {
    for (std::uint32_t mask = 0; mask < ls.size(); ++mask) {
      if (mask & (1u << p)) {
        ls[mask] = std::max(ls[mask], ls[mask & ~(1u << p)]);
      }
    }
  }
  return ls;
}

}  // namespace

double global_empirical_sensitivity(const SensitiveDatabase& db, const LinearQuery& q) {
  std::vector<double> answers = answer_table(db, q);
  std::vector<double> ls = local_sensitivity_table(db, answers);
  double best = 0.0;
  for (double v : ls) best = std::max(best, v);
  return best;
}

std::pair<double, double> general_sequences(const SensitiveDatabase& db, const LinearQuery& q,
                                            int i) {
  const std::size_t n = db.participants().size();
  if (i < 0 || i > static_cast<int>(n)) {
    throw DataError("sequence index outside [0, |P|]");
  }
  std::vector<double> answers = answer_table(db, q);
  std::vector<double> gs =
      global_sensitivity_table(n, local_sensitivity_table(db, answers));
  double h = std::numeric_limits<double>::infinity();
  double g = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < answers.size(); ++mask) {
    if (std::popcount(mask) != i) continue;
    h = std::min(h, answers[mask]);
    g = std::min(g, gs[mask]);
  }
  return {h, g};
}

namespace {

// Flat postfix program for fast repeated evaluation of one annotation.
struct CompiledExpr {
  enum : std::int8_t { kPushVar, kPushConst, kAnd, kOr };
  struct Op {
    std::int8_t code;
    std::int8_t var = 0;    // kPushVar
    std::int8_t truth = 0;  // kPushConst
  };
  std::vector<Op> ops;

  // phi scaled by m: values in [0, m].
  int eval_units(const int* f_units, int m) const {
    int stack[64];
    int top = 0;
    for (const Op& op : ops) {
      switch (op.code) {
        case kPushVar:
          stack[top++] = f_units[op.var];
          break;
        case kPushConst:
          stack[top++] = op.truth ? m : 0;
          break;
        case kAnd: {
          int b = stack[--top];
          int a = stack[top - 1];
          stack[top - 1] = std::max(0, a + b - m);
          break;
        }
        case kOr: {
          int b = stack[--top];
          int a = stack[top - 1];
          stack[top - 1] = std::max(a, b);
          break;
        }
      }
    }
    return stack[0];
  }

  double eval_real(const double* f) const {
    double stack[64];
    int top = 0;
    for (const Op& op : ops) {
      switch (op.code) {
        case kPushVar:
          stack[top++] = f[op.var];
          break;
        case kPushConst:
          stack[top++] = op.truth ? 1.0 : 0.0;
          break;
        case kAnd: {
          double b = stack[--top];
          double a = stack[top - 1];
          stack[top - 1] = std::max(0.0, a + b - 1.0);
          break;
        }
        case kOr: {
          double b = stack[--top];
          double a = stack[top - 1];
          stack[top - 1] = std::max(a, b);
          break;
        }
      }
    }
    return stack[0];
  }
};

void compile_expr(const Expr& k, const std::map<ParticipantId, int>& index, int* depth,
                  CompiledExpr* out) {
  switch (k.kind()) {
    case Expr::Kind::kTrue:
      out->ops.push_back({CompiledExpr::kPushConst, 0, 1});
      ++*depth;
      break;
    case Expr::Kind::kFalse:
      out->ops.push_back({CompiledExpr::kPushConst, 0, 0});
      ++*depth;
      break;
    case Expr::Kind::kVar:
      out->ops.push_back(
          {CompiledExpr::kPushVar, static_cast<std::int8_t>(index.at(k.var_name())), 0});
      ++*depth;
      break;
    case Expr::Kind::kAnd:
    case Expr::Kind::kOr: {
      compile_expr(k.left(), index, depth, out);
      compile_expr(k.right(), index, depth, out);
      out->ops.push_back(
          {k.kind() == Expr::Kind::kAnd ? CompiledExpr::kAnd : CompiledExpr::kOr, 0, 0});
      --*depth;
      break;
    }
  }
  if (*depth >= 64) throw CapacityError("annotation too deep for the grid oracle");
}

struct GridProblem {
  std::vector<ParticipantId> participants;
  std::vector<CompiledExpr> programs;
  std::vector<double> weights;
  std::vector<std::vector<std::pair<int, int>>> row_sens;  // (participant idx, S)
  int n = 0;

  double h_objective_units(const int* f, int m) const {
    double total = 0.0;
    for (std::size_t r = 0; r < programs.size(); ++r) {
      total += weights[r] * programs[r].eval_units(f, m);
    }
    return total / m;
  }

  double h_objective_real(const double* f) const {
    double total = 0.0;
    for (std::size_t r = 0; r < programs.size(); ++r) {
      total += weights[r] * programs[r].eval_real(f);
    }
    return total;
  }

  double g_objective_units(const int* f, int m) const {
    double per[32] = {0};
    for (std::size_t r = 0; r < programs.size(); ++r) {
      double phi = static_cast<double>(programs[r].eval_units(f, m)) / m;
      if (phi == 0.0) continue;
      for (const auto& [p, s] : row_sens[r]) per[p] += weights[r] * phi * s;
    }
    double best = 0.0;
    for (int p = 0; p < n; ++p) best = std::max(best, per[p]);
    return 2.0 * best;
  }

  double g_objective_real(const double* f) const {
    double per[32] = {0};
    for (std::size_t r = 0; r < programs.size(); ++r) {
      double phi = programs[r].eval_real(f);
      if (phi == 0.0) continue;
      for (const auto& [p, s] : row_sens[r]) per[p] += weights[r] * phi * s;
    }
    double best = 0.0;
    for (int p = 0; p < n; ++p) best = std::max(best, per[p]);
    return 2.0 * best;
  }
};

GridProblem build_grid_problem(const AnnotatedRelation& r, const LinearQuery& q) {
  check_cap(r.participants().size(), kGridParticipantCap, "grid oracle");
  GridProblem problem;
  problem.participants.assign(r.participants().begin(), r.participants().end());
  problem.n = static_cast<int>(problem.participants.size());
  std::map<ParticipantId, int> index;
  for (int i = 0; i < problem.n; ++i) index[problem.participants[i]] = i;
  for (const auto& [t, ann] : r.rows()) {
    CompiledExpr program;
    int depth = 0;
    compile_expr(ann, index, &depth, &program);
    problem.programs.push_back(std::move(program));
    double w = q(r.schema(), t);
    if (w < 0) throw DataError("linear query weights must be nonnegative");
    problem.weights.push_back(w);
    std::vector<std::pair<int, int>> sens;
    for (const auto& [p, s] : phi_sensitivities(ann)) {
      sens.emplace_back(index.at(p), s);
    }
    problem.row_sens.push_back(std::move(sens));
  }
  return problem;
}

template <typename Objective>
double grid_enumerate(const GridProblem& problem, double i, int m, const Objective& objective,
                      std::vector<int>* best_units) {
  const int n = problem.n;
  // Total units within 1/(2m) of i in f-space: |sum - i*m| <= 0.5.
  const double target = i * m;
  int t_low = static_cast<int>(std::ceil(target - 0.5 - 1e-9));
  int t_high = static_cast<int>(std::floor(target + 0.5 + 1e-9));
  t_low = std::max(t_low, 0);
  t_high = std::min(t_high, n * m);
  if (t_low > t_high) throw DataError("grid window empty; index out of range");

  std::vector<int> units(std::max(n, 1), 0);
  double best = std::numeric_limits<double>::infinity();

  auto recurse = [&](auto&& self, int coord, int partial) -> void {
    if (coord == n - 1) {
      for (int total = std::max(t_low, partial); total <= std::min(t_high, partial + m);
           ++total) {
        units[coord] = total - partial;
        double value = objective(units.data(), m);
        if (value < best) {
          best = value;
          *best_units = units;
        }
      }
      return;
    }
    int remaining = n - 1 - coord;
    int lo = std::max(0, t_low - partial - remaining * m);
    int hi = std::min(m, t_high - partial);
    for (int v = lo; v <= hi; ++v) {
      units[coord] = v;
      self(self, coord + 1, partial + v);
    }
  };

  if (n == 0) {
    best = objective(units.data(), m);
    best_units->clear();
    return best;
  }
  recurse(recurse, 0, 0);
  return best;
}

// Coordinate-pair descent on the exact-sum slice, with ternary search along
// each feasible segment. The objectives are convex along lines.
template <typename RealObjective>
double polish(const GridProblem& problem, std::vector<double>* f, const RealObjective& objective) {
  const int n = problem.n;
  double current = objective(f->data());
  for (int pass = 0; pass < 40; ++pass) {
    double before = current;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        if (a == b) continue;
        double lo = std::max(-(*f)[a], (*f)[b] - 1.0);
        double hi = std::min(1.0 - (*f)[a], (*f)[b]);
        if (hi - lo < 1e-12) continue;
        auto eval_at = [&](double t) {
          std::vector<double> probe = *f;
          probe[a] += t;
          probe[b] -= t;
          return objective(probe.data());
        };
        double l = lo, r = hi;
        for (int iter = 0; iter < 60; ++iter) {
          double m1 = l + (r - l) / 3.0;
          double m2 = r - (r - l) / 3.0;
          if (eval_at(m1) <= eval_at(m2)) {
            r = m2;
          } else {
            l = m1;
          }
        }
        double t = (l + r) / 2.0;
        double candidate = eval_at(t);
        if (candidate < current - 1e-12) {
          (*f)[a] += t;
          (*f)[b] -= t;
          current = candidate;
        }
      }
    }
    if (before - current < 1e-10) break;
  }
  return current;
}

template <typename UnitsObjective, typename RealObjective>
double grid_minimize(const AnnotatedRelation& r, const LinearQuery& q, double i, int m,
                     const UnitsObjective& units_objective, const RealObjective& real_objective) {
  GridProblem problem = build_grid_problem(r, q);
  if (i < -1e-9 || i > problem.n + 1e-9) {
    throw DataError("grid oracle index outside [0, |P|]");
  }
  if (m < 1) throw DataError("grid resolution must be >= 1");
  std::vector<int> best_units;
  double best =
      grid_enumerate(problem, i, m, [&](const int* f, int mm) { return units_objective(problem, f, mm); },
                     &best_units);
  if (problem.n == 0) return best;

  // Move the best grid point onto the exact-sum slice before polishing.
  std::vector<double> f(problem.n);
  for (int j = 0; j < problem.n; ++j) f[j] = static_cast<double>(best_units[j]) / m;
  double excess = 0.0;
  for (double v : f) excess += v;
  excess -= i;
  for (int j = 0; j < problem.n && std::fabs(excess) > 1e-12; ++j) {
    double adjust = std::clamp(f[j] - excess, 0.0, 1.0) - f[j];
    f[j] += adjust;
    excess += adjust;
  }
  double polished =
      polish(problem, &f, [&](const double* ff) { return real_objective(problem, ff); });
  return std::min(best, polished);
}

}  // namespace

double grid_min_H(const AnnotatedRelation& r, const LinearQuery& q, double i, int resolution) {
  return grid_minimize(
      r, q, i, resolution,
      [](const GridProblem& p, const int* f, int m) { return p.h_objective_units(f, m); },
      [](const GridProblem& p, const double* f) { return p.h_objective_real(f); });
}

double grid_min_G(const AnnotatedRelation& r, const LinearQuery& q, int i, int resolution) {
  return grid_minimize(
      r, q, static_cast<double>(i), resolution,
      [](const GridProblem& p, const int* f, int m) { return p.g_objective_units(f, m); },
      [](const GridProblem& p, const double* f) { return p.g_objective_real(f); });
}

}  // namespace recdp

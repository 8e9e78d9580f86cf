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

#include "recdp/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace recdp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr int kStallLimit = 60;  // degenerate steps before Bland's rule engages

}  // namespace

int LinearProgramInstance::add_variable(double lo, double hi, double obj, std::string name) {
  if (!(lo <= hi)) throw DataError("variable bounds must satisfy lo <= hi");
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    throw DataError("instance variables must be box-bounded");
  }
  lower.push_back(lo);
  upper.push_back(hi);
  objective.push_back(obj);
  names.push_back(std::move(name));
  return static_cast<int>(lower.size()) - 1;
}

void LinearProgramInstance::set_objective(int var, double coeff) {
  objective.at(static_cast<std::size_t>(var)) = coeff;
}

void LinearProgramInstance::add_constraint_le(std::vector<std::pair<int, double>> terms,
                                              double rhs) {
  constraints.push_back(Constraint{std::move(terms), false, rhs});
}

void LinearProgramInstance::add_constraint_eq(std::vector<std::pair<int, double>> terms,
                                              double rhs) {
  constraints.push_back(Constraint{std::move(terms), true, rhs});
}

std::string LinearProgramInstance::dump() const {
  std::ostringstream out;
  out.precision(12);
  auto var_name = [this](int j) {
    return names[j].empty() ? "x" + std::to_string(j) : names[j];
  };
  out << "minimize";
  for (std::size_t j = 0; j < objective.size(); ++j) {
    if (objective[j] != 0.0) out << " + " << objective[j] << " " << var_name(static_cast<int>(j));
  }
  out << "\nsubject to\n";
  for (const Constraint& c : constraints) {
    out << " ";
    for (const auto& [j, coeff] : c.terms) out << " + " << coeff << " " << var_name(j);
    out << (c.is_equality ? " = " : " <= ") << c.rhs << "\n";
  }
  out << "bounds\n";
  for (std::size_t j = 0; j < lower.size(); ++j) {
    out << "  " << lower[j] << " <= " << var_name(static_cast<int>(j)) << " <= " << upper[j]
        << "\n";
  }
  return out.str();
}

namespace {

enum class VarStatus { kBasic, kAtLower, kAtUpper };

class Simplex {
 public:
  explicit Simplex(const LinearProgramInstance& lp) : lp_(lp) { build(); }

  LpSolution run() {
    if (!phase(/*phase_one=*/true)) throw Error("simplex iteration limit exceeded (phase 1)");
    double infeas = 0.0;
    for (int j = art_begin_; j < ncols_; ++j) infeas += value(j);
    double scale = 1.0;
    for (int i = 0; i < m_; ++i) scale = std::max(scale, std::fabs(rhs_[i]));
    if (infeas > kLpFeasibilityTol * scale) {
      return LpSolution{LpSolution::Status::kInfeasible, 0.0, {}};
    }
    expel_artificials();
    for (int j = art_begin_; j < ncols_; ++j) lo_[j] = hi_[j] = 0.0;
    load_objective();
    if (!phase(/*phase_one=*/false)) throw Error("simplex iteration limit exceeded (phase 2)");

    LpSolution solution;
    solution.status = LpSolution::Status::kOptimal;
    solution.values.resize(lp_.variable_count());
    for (std::size_t j = 0; j < lp_.variable_count(); ++j) {
      double v = value(static_cast<int>(j));
      v = std::min(std::max(v, lp_.lower[j]), lp_.upper[j]);
      solution.values[j] = v;
    }
    double obj = 0.0;
    for (std::size_t j = 0; j < lp_.variable_count(); ++j) {
      obj += lp_.objective[j] * solution.values[j];
    }
    solution.objective = obj;
    return solution;
  }

 private:
  void build() {
    const int n0 = static_cast<int>(lp_.variable_count());
    const int m = static_cast<int>(lp_.constraints.size());
    int slacks = 0;
    for (const auto& c : lp_.constraints) {
      if (!c.is_equality) ++slacks;
    }
    m_ = m;
    art_begin_ = n0 + slacks;
    ncols_ = art_begin_ + m;

    lo_.assign(ncols_, 0.0);
    hi_.assign(ncols_, kInf);
    for (int j = 0; j < n0; ++j) {
      lo_[j] = lp_.lower[j];
      hi_[j] = lp_.upper[j];
    }
    status_.assign(ncols_, VarStatus::kAtLower);
    nb_value_.assign(ncols_, 0.0);
    for (int j = 0; j < ncols_; ++j) nb_value_[j] = lo_[j];

    tab_.assign(static_cast<std::size_t>(m_) * ncols_, 0.0);
    rhs_.assign(m_, 0.0);
    basic_.assign(m_, -1);
    xb_.assign(m_, 0.0);

    int slack = n0;
    for (int i = 0; i < m_; ++i) {
      const auto& c = lp_.constraints[i];
      std::map<int, double> coeffs;  // coalesces duplicate variable terms
      for (const auto& [j, a] : c.terms) {
        if (j < 0 || j >= n0) throw DataError("constraint references unknown variable");
        coeffs[j] += a;
      }
      double* row = row_ptr(i);
      for (const auto& [j, a] : coeffs) row[j] = a;
      if (!c.is_equality) row[slack++] = 1.0;
      rhs_[i] = c.rhs;
    }

    // Nonbasic at lower bounds; one artificial per row absorbs the residual.
    for (int i = 0; i < m_; ++i) {
      double* row = row_ptr(i);
      double residual = rhs_[i];
      for (int j = 0; j < art_begin_; ++j) residual -= row[j] * nb_value_[j];
      double sign = residual >= 0 ? 1.0 : -1.0;
      if (sign < 0) {
        for (int j = 0; j < art_begin_; ++j) row[j] = -row[j];
        rhs_[i] = -rhs_[i];
      }
      row[art_begin_ + i] = 1.0;
      basic_[i] = art_begin_ + i;
      status_[art_begin_ + i] = VarStatus::kBasic;
      xb_[i] = std::fabs(residual);
    }

    // Phase-1 reduced costs: cost 1 on artificials, all of which are basic.
    dj_.assign(ncols_, 0.0);
    for (int j = 0; j < ncols_; ++j) {
      double d = (j >= art_begin_) ? 1.0 : 0.0;
      for (int i = 0; i < m_; ++i) d -= row_ptr(i)[j];  // basic costs are all 1
      dj_[j] = d;
    }
    for (int i = 0; i < m_; ++i) dj_[basic_[i]] = 0.0;
  }

  void load_objective() { recompute_costs(/*phase_one=*/false); }

  void recompute_costs(bool phase_one) {
    dj_.assign(ncols_, 0.0);
    if (phase_one) {
      for (int j = art_begin_; j < ncols_; ++j) dj_[j] = 1.0;
    } else {
      for (std::size_t j = 0; j < lp_.variable_count(); ++j) dj_[j] = lp_.objective[j];
    }
    auto cost_of = [this, phase_one](int j) -> double {
      if (phase_one) return j >= art_begin_ ? 1.0 : 0.0;
      return j < static_cast<int>(lp_.variable_count()) ? lp_.objective[j] : 0.0;
    };
    for (int i = 0; i < m_; ++i) {
      double cb = cost_of(basic_[i]);
      if (cb == 0.0) continue;
      const double* row = row_ptr(i);
      for (int j = 0; j < ncols_; ++j) dj_[j] -= cb * row[j];
    }
    for (int i = 0; i < m_; ++i) dj_[basic_[i]] = 0.0;
  }

  // Pivots remaining zero-valued artificials out of the basis where possible.
  void expel_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (basic_[i] < art_begin_) continue;
      const double* row = row_ptr(i);
      int col = -1;
      for (int j = 0; j < art_begin_; ++j) {
        if (status_[j] != VarStatus::kBasic && std::fabs(row[j]) > kPivotTol) {
          col = j;
          break;
        }
      }
      if (col < 0) continue;  // redundant row; artificial stays pinned at zero
      double entering_value = nb_value_[col];
      status_[basic_[i]] = VarStatus::kAtLower;
      nb_value_[basic_[i]] = 0.0;
      pivot(i, col);
      xb_[i] = entering_value;
    }
  }

  bool phase(bool phase_one) {
    const long max_iters = 20000L + 60L * (m_ + ncols_);
    int stall = 0;
    bool bland = false;
    bool verified = false;
    for (long iter = 0; iter < max_iters; ++iter) {
      int enter = -1;
      int dir = +1;
      double best_rate = kDualTol;
      for (int j = 0; j < ncols_; ++j) {
        if (status_[j] == VarStatus::kBasic) continue;
        if (hi_[j] - lo_[j] <= 0.0) continue;  // fixed
        double rate = 0.0;
        int d = 0;
        if (status_[j] == VarStatus::kAtLower && dj_[j] < -kDualTol) {
          rate = -dj_[j];
          d = +1;
        } else if (status_[j] == VarStatus::kAtUpper && dj_[j] > kDualTol) {
          rate = dj_[j];
          d = -1;
        } else {
          continue;
        }
        if (bland) {
          enter = j;
          dir = d;
          break;
        }
        if (rate > best_rate) {
          best_rate = rate;
          enter = j;
          dir = d;
        }
      }
      if (enter < 0) {
        // Guard against incremental reduced-cost drift before declaring
        // optimality.
        if (!verified) {
          recompute_costs(phase_one);
          verified = true;
          continue;
        }
        return true;
      }
      verified = false;

      // Ratio test: how far can the entering variable move?
      double t_max = hi_[enter] - lo_[enter];
      double best_t = t_max;
      int leave_row = -1;
      bool leave_to_upper = false;
      for (int i = 0; i < m_; ++i) {
        double a = dir * row_ptr(i)[enter];
        int bvar = basic_[i];
        double t;
        bool to_upper;
        if (a > kPivotTol) {
          t = (xb_[i] - lo_[bvar]) / a;
          to_upper = false;
        } else if (a < -kPivotTol) {
          if (hi_[bvar] == kInf) continue;
          t = (xb_[i] - hi_[bvar]) / a;
          to_upper = true;
        } else {
          continue;
        }
        if (t < 0) t = 0;
        if (t < best_t - 1e-12 ||
            (t < best_t + 1e-12 && leave_row >= 0 && bvar < basic_[leave_row])) {
          best_t = t;
          leave_row = i;
          leave_to_upper = to_upper;
        }
      }

      if (leave_row < 0) {
        if (t_max == kInf) throw Error("simplex detected an unbounded direction");
        // Bound flip: the entering variable runs to its other bound.
        double delta = dir * t_max;
        for (int i = 0; i < m_; ++i) xb_[i] -= delta * row_ptr(i)[enter];
        status_[enter] = (dir > 0) ? VarStatus::kAtUpper : VarStatus::kAtLower;
        nb_value_[enter] = (dir > 0) ? hi_[enter] : lo_[enter];
        stall = 0;
        bland = false;
        continue;
      }

      double delta = dir * best_t;
      double entering_value = nb_value_[enter] + delta;
      for (int i = 0; i < m_; ++i) xb_[i] -= delta * row_ptr(i)[enter];
      int leaving = basic_[leave_row];
      status_[leaving] = leave_to_upper ? VarStatus::kAtUpper : VarStatus::kAtLower;
      nb_value_[leaving] = leave_to_upper ? hi_[leaving] : lo_[leaving];
      pivot(leave_row, enter);
      xb_[leave_row] = entering_value;

      if (best_t <= 1e-12) {
        if (++stall > kStallLimit) bland = true;
      } else {
        stall = 0;
        bland = false;
      }
    }
    return false;
  }

  void pivot(int r, int col) {
    double* prow = row_ptr(r);
    double piv = prow[col];
    double inv = 1.0 / piv;
    for (int j = 0; j < ncols_; ++j) prow[j] *= inv;
    prow[col] = 1.0;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = row_ptr(i);
      double factor = row[col];
      if (factor == 0.0) continue;
      for (int j = 0; j < ncols_; ++j) row[j] -= factor * prow[j];
      row[col] = 0.0;
    }
    double dfac = dj_[col];
    if (dfac != 0.0) {
      for (int j = 0; j < ncols_; ++j) dj_[j] -= dfac * prow[j];
    }
    dj_[col] = 0.0;
    basic_[r] = col;
    status_[col] = VarStatus::kBasic;
  }

  double value(int j) const {
    if (status_[j] == VarStatus::kBasic) {
      for (int i = 0; i < m_; ++i) {
        if (basic_[i] == j) return xb_[i];
      }
    }
    return nb_value_[j];
  }

  double* row_ptr(int i) { return tab_.data() + static_cast<std::size_t>(i) * ncols_; }
  const double* row_ptr(int i) const {
    return tab_.data() + static_cast<std::size_t>(i) * ncols_;
  }

  const LinearProgramInstance& lp_;
  int m_ = 0, ncols_ = 0, art_begin_ = 0;
  std::vector<double> tab_, rhs_, xb_, dj_, lo_, hi_, nb_value_;
  std::vector<int> basic_;
  std::vector<VarStatus> status_;
};

}  // namespace

LpSolution solve_lp(const LinearProgramInstance& lp) {
  for (std::size_t j = 0; j < lp.variable_count(); ++j) {
    if (!std::isfinite(lp.lower[j]) || !std::isfinite(lp.upper[j])) {
      throw DataError("instance variables must be box-bounded");
    }
  }
  Simplex simplex(lp);
  return simplex.run();
}

}  // namespace recdp

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

#ifndef RECDP_EXPR_HPP_
#define RECDP_EXPR_HPP_

#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>

#include "recdp/errors.hpp"

namespace recdp {

// Participants are named by identifiers: [A-Za-z_][A-Za-z0-9_.-]*,
// excluding the reserved words "true" and "false".
using ParticipantId = std::string;

bool is_valid_identifier(std::string_view text);

// Positive Boolean expression over participant variables: constants,
// variables, and binary conjunction/disjunction. No negation. Immutable;
// copies share structure and are cheap.
class Expr {
 public:
  enum class Kind { kTrue, kFalse, kVar, kAnd, kOr };

  Expr();  // constant FALSE

  static Expr constant(bool value);
  static Expr var(ParticipantId name);
  static Expr make_and(Expr left, Expr right);
  static Expr make_or(Expr left, Expr right);

  Kind kind() const;
  bool is_constant() const { return kind() == Kind::kTrue || kind() == Kind::kFalse; }
  const ParticipantId& var_name() const;  // requires kind() == kVar
  Expr left() const;                      // requires kAnd or kOr
  Expr right() const;

  // Number of nodes in the tree; the "length" of an annotation.
  std::size_t size() const;

  bool structurally_equal(const Expr& other) const;

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Assignments are total on the variables of the expression they are applied
// to; a missing variable raises DataError.
using BoolAssignment = std::map<ParticipantId, int>;
using RealAssignment = std::map<ParticipantId, double>;

// Standard Boolean semantics, TRUE = 1, FALSE = 0.
int evaluate(const Expr& k, const BoolAssignment& f);

// Replaces every occurrence of variable p by the given constant. No
// simplification is performed; p absent is the identity.
Expr substitute_const(const Expr& k, const ParticipantId& p, bool value);

// Fixpoint of the identity and annihilator rewrites (x&true -> x,
// x|false -> x, x&false -> false, x|true -> true). The result is either a
// constant or contains no constant node, and has the same relaxation phi.
Expr fold_constants(const Expr& k);

inline constexpr std::size_t kDefaultDnfClauseLimit = 100000;

// Expands into an OR of ANDs of variables using only the invariant
// transformations (plus child swaps). Duplicate variables inside a clause
// are kept as-is. Throws CapacityError past max_clauses.
Expr to_dnf(const Expr& k, std::size_t max_clauses = kDefaultDnfClauseLimit);

// The relaxation phi: phi_false = 0, phi_true = 1, phi_p(f) = f(p),
// phi_{x&y} = max(0, phi_x + phi_y - 1), phi_{x|y} = max(phi_x, phi_y).
// Exact on Boolean points; monotone and convex on [0,1]^P.
double phi_eval(const Expr& k, const RealAssignment& f);

// phi*_k(c f) where phi*_k(f) = 1 - phi_k(1 - min(1, f)). Satisfies the
// truncated-linearity identity phi*_k(c f) = min(1, c phi*_k(f)) for c >= 1.
double phi_star_eval(const Expr& k, const RealAssignment& f, double scale);

// Recursive slope bound of phi_k in coordinate p: constants 0, S_{p,p} = 1,
// conjunction adds, disjunction takes the max. A repeated variable inside a
// conjunction counts each occurrence.
int phi_sensitivity(const Expr& k, const ParticipantId& p);

// All nonzero phi-sensitivities of k in one traversal.
std::map<ParticipantId, int> phi_sensitivities(const Expr& k);

// True iff the two expressions agree on every Boolean assignment over the
// union of their variables. Necessary (not sufficient) for phi-equality.
// Throws CapacityError past max_vars variables.
bool truth_equivalent(const Expr& k1, const Expr& k2, std::size_t max_vars = 20);

std::set<ParticipantId> variables(const Expr& k);

// Text grammar: expr := term ('|' term)*; term := factor ('&' factor)*;
// factor := 'true' | 'false' | IDENT | '(' expr ')'. Whitespace is
// insignificant; '&' binds tighter than '|'; chains parse left-associative.
Expr parse_expr(std::string_view text);
std::string to_string(const Expr& k);

}  // namespace recdp

#endif  // RECDP_EXPR_HPP_

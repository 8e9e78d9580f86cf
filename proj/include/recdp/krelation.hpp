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

#ifndef RECDP_KRELATION_HPP_
#define RECDP_KRELATION_HPP_

#include <compare>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "recdp/expr.hpp"

namespace recdp {

// Ordered attribute list; names unique within a schema.
using Schema = std::vector<std::string>;

// Row values aligned with the schema, compared as exact strings.
struct Tuple {
  std::vector<std::string> values;
  auto operator<=>(const Tuple&) const = default;
};

// Finite mapping tuple -> positive Boolean annotation, plus the participant
// set. Rows whose annotation folds to FALSE are never stored; stored
// annotations are constant-folded. Immutable by convention once built: the
// algebra below returns fresh relations.
class AnnotatedRelation {
 public:
  AnnotatedRelation() = default;
  explicit AnnotatedRelation(Schema schema);

  const Schema& schema() const { return schema_; }
  const std::map<Tuple, Expr>& rows() const { return rows_; }
  const std::set<ParticipantId>& participants() const { return participants_; }

  // Folds the annotation; drops the row if it folds to FALSE. A tuple that
  // is already present gets the disjunction of old and new annotations.
  // Variables of the annotation join the participant set.
  void add_row(Tuple tuple, Expr annotation);

  // Participants may include ids that appear in no annotation.
  void add_participant(ParticipantId p);
  void set_participants(std::set<ParticipantId> participants);

  int attribute_index(const std::string& name) const;  // -1 when absent

  // Total annotation length L = sum of node counts over stored rows.
  std::size_t total_annotation_size() const;

 private:
  Schema schema_;
  std::map<Tuple, Expr> rows_;
  std::set<ParticipantId> participants_;
};

// Nonnegative per-tuple weight; the released statistic is the weighted sum
// over the support.
struct LinearQuery {
  std::function<double(const Schema&, const Tuple&)> weight;

  static LinearQuery count();
  static LinearQuery column(std::string attribute);

  double operator()(const Schema& schema, const Tuple& t) const { return weight(schema, t); }
};

// Positive relational algebra with provenance propagation. Every operation
// returns a relation satisfying the class invariants.
AnnotatedRelation union_relations(const AnnotatedRelation& r1, const AnnotatedRelation& r2);
AnnotatedRelation project(const AnnotatedRelation& r, const std::vector<std::string>& attrs);
AnnotatedRelation select(const AnnotatedRelation& r,
                         const std::function<bool(const Tuple&)>& pred);
AnnotatedRelation natural_join(const AnnotatedRelation& r1, const AnnotatedRelation& r2);
AnnotatedRelation rename(const AnnotatedRelation& r,
                         const std::map<std::string, std::string>& mapping);

// Substitutes FALSE for p everywhere, folds, drops dead rows, and removes p
// from the participant set. The result is a neighboring relation.
AnnotatedRelation remove_participant(const AnnotatedRelation& r, const ParticipantId& p);

// Tuples whose (folded) annotation still mentions p. Over-approximates the
// set of tuples whose annotation changes non-equivalently under p -> FALSE;
// exact for annotations whose clauses use distinct variables.
std::set<Tuple> impact(const AnnotatedRelation& r, const ParticipantId& p);

// Per-participant sum of q over the impact set, and its maximum.
std::pair<std::map<ParticipantId, double>, double> universal_empirical_sensitivity(
    const AnnotatedRelation& r, const LinearQuery& q);

double query_true_answer(const AnnotatedRelation& r, const LinearQuery& q);

// Annotated-table text format. First line: "#schema<TAB>attr...<TAB>@annotation";
// optional "#participants<TAB>p1,p2,..." second line; data rows are
// tab-separated values followed by an annotation in the expression grammar;
// other '#' lines are comments.
AnnotatedRelation parse_annotated_table(const std::string& text);
AnnotatedRelation load_annotated_table(const std::string& path);
std::string format_annotated_table(const AnnotatedRelation& r);

}  // namespace recdp

#endif  // RECDP_KRELATION_HPP_

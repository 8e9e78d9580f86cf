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
//
// Brute-force reference oracles for desk-scale verification. None of these
// paths are differentially private; they exist to validate definitions and
// the LP-based sequences, not to release data.

#ifndef RECDP_REFERENCE_HPP_
#define RECDP_REFERENCE_HPP_

#include <cstdint>
#include <utility>
#include <vector>

#include "recdp/krelation.hpp"

namespace recdp {

inline constexpr std::size_t kSensitiveDbParticipantCap = 20;
inline constexpr std::size_t kExhaustiveParticipantCap = 12;
inline constexpr std::size_t kGridParticipantCap = 4;

// Explicit sensitive-database view of a K-relation: the content under every
// participant subset, enumerated on demand.
class SensitiveDatabase {
 public:
  static SensitiveDatabase from_krelation(const AnnotatedRelation& r);

  const std::vector<ParticipantId>& participants() const { return participants_; }
  const Schema& schema() const { return schema_; }
  std::size_t row_count() const { return rows_.size(); }

  // Tuples present when exactly the participants in mask (bit i = i-th
  // participant in sorted order) contribute.
  std::vector<Tuple> content(std::uint32_t mask) const;

  // Weighted query answer at the given subset.
  double answer(std::uint32_t mask, const LinearQuery& q) const;

 private:
  Schema schema_;
  std::vector<std::pair<Tuple, Expr>> rows_;
  std::vector<ParticipantId> participants_;
};

// max over p in P of |q(M(P)) - q(M(P - {p}))|; 0 for empty P.
double local_empirical_sensitivity(const SensitiveDatabase& db, const LinearQuery& q);

// max of the local empirical sensitivity over all ancestor subsets.
double global_empirical_sensitivity(const SensitiveDatabase& db, const LinearQuery& q);

// The exhaustive sequences: H_i = min over size-i subsets of the answer,
// G_i = min over size-i subsets of the global empirical sensitivity there.
// A 1-bounding pair.
std::pair<double, double> general_sequences(const SensitiveDatabase& db, const LinearQuery& q,
                                            int i);

// Grid minimization of the relaxed H objective over f in {0, 1/m, ..., 1}^P
// restricted to |sum f - i| <= 1/(2m), polished by coordinate descent.
// Accurate to O(1/m) times the objective Lipschitz constant.
double grid_min_H(const AnnotatedRelation& r, const LinearQuery& q, double i, int resolution);

// Same for the G objective 2 max_p sum_t q(t) phi_{R(t)}(f) S_{R(t),p}.
double grid_min_G(const AnnotatedRelation& r, const LinearQuery& q, int i, int resolution);

}  // namespace recdp

#endif  // RECDP_REFERENCE_HPP_

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

#ifndef RECDP_TESTS_TESTUTIL_HPP_
#define RECDP_TESTS_TESTUTIL_HPP_

#include <random>
#include <string>
#include <vector>

#include "recdp/krelation.hpp"
#include "recdp/subgraph.hpp"

namespace recdp::testutil {

using Rng = std::mt19937_64;

inline int rand_int(Rng& rng, int lo, int hi) {  // inclusive
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline double rand_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::vector<ParticipantId> participant_pool(int count) {
  static const char* names[] = {"p0", "p1", "p2", "p3", "p4", "p5", "p6", "p7"};
  std::vector<ParticipantId> pool;
  for (int i = 0; i < count; ++i) pool.push_back(names[i]);
  return pool;
}

// Random positive expression over the pool. allow_constants adds occasional
// TRUE/FALSE leaves.
inline Expr random_expr(Rng& rng, const std::vector<ParticipantId>& pool, int max_depth,
                        bool allow_constants = false) {
  bool leaf = max_depth <= 0 || rand_int(rng, 0, 99) < 30;
  if (leaf) {
    if (allow_constants && rand_int(rng, 0, 99) < 10) {
      return Expr::constant(rand_int(rng, 0, 1) == 1);
    }
    return Expr::var(pool[rand_int(rng, 0, static_cast<int>(pool.size()) - 1)]);
  }
  Expr l = random_expr(rng, pool, max_depth - 1, allow_constants);
  Expr r = random_expr(rng, pool, max_depth - 1, allow_constants);
  return rand_int(rng, 0, 1) ? Expr::make_and(std::move(l), std::move(r))
                             : Expr::make_or(std::move(l), std::move(r));
}

inline RealAssignment random_assignment(Rng& rng, const std::vector<ParticipantId>& pool) {
  RealAssignment f;
  for (const ParticipantId& p : pool) f[p] = rand_unit(rng);
  return f;
}

inline BoolAssignment random_bool_assignment(Rng& rng, const std::vector<ParticipantId>& pool) {
  BoolAssignment f;
  for (const ParticipantId& p : pool) f[p] = rand_int(rng, 0, 1);
  return f;
}

// Random relation over <= max_participants participants with <= max_rows
// rows; annotations are constant-free so that H_0 = 0 holds. The participant
// set always includes the full pool, occurring or not.
inline AnnotatedRelation random_relation(Rng& rng, int max_participants, int max_rows,
                                         int max_depth) {
  int participant_count = rand_int(rng, 1, max_participants);
  std::vector<ParticipantId> pool = participant_pool(participant_count);
  int rows = rand_int(rng, 1, max_rows);
  AnnotatedRelation r{Schema{"id"}};
  for (int i = 0; i < rows; ++i) {
    Expr ann = random_expr(rng, pool, rand_int(rng, 0, max_depth), /*allow_constants=*/false);
    r.add_row(Tuple{{"t" + std::to_string(i)}}, std::move(ann));
  }
  std::set<ParticipantId> participants(pool.begin(), pool.end());
  r.set_participants(std::move(participants));
  return r;
}

// Weighted variant: integer weights in [0, 3] exposed through a "w" column.
inline std::pair<AnnotatedRelation, LinearQuery> random_weighted_relation(Rng& rng,
                                                                          int max_participants,
                                                                          int max_rows,
                                                                          int max_depth) {
  int participant_count = rand_int(rng, 1, max_participants);
  std::vector<ParticipantId> pool = participant_pool(participant_count);
  int rows = rand_int(rng, 1, max_rows);
  AnnotatedRelation r{Schema{"id", "w"}};
  for (int i = 0; i < rows; ++i) {
    Expr ann = random_expr(rng, pool, rand_int(rng, 0, max_depth), /*allow_constants=*/false);
    r.add_row(Tuple{{"t" + std::to_string(i), std::to_string(rand_int(rng, 0, 3))}},
              std::move(ann));
  }
  std::set<ParticipantId> participants(pool.begin(), pool.end());
  r.set_participants(std::move(participants));
  return {std::move(r), LinearQuery::column("w")};
}

// --- invariant transformation machinery -----------------------------------
// Rewrites that leave phi unchanged: identity, annihilator, associativity,
// distributivity of AND over OR, and child swaps. Applied at random subterms.

using NodePath = std::vector<int>;  // 0 = left, 1 = right

inline void collect_paths(const Expr& e, NodePath prefix, std::vector<NodePath>* out) {
  out->push_back(prefix);
  if (e.kind() == Expr::Kind::kAnd || e.kind() == Expr::Kind::kOr) {
    NodePath l = prefix;
    l.push_back(0);
    collect_paths(e.left(), l, out);
    NodePath r = prefix;
    r.push_back(1);
    collect_paths(e.right(), r, out);
  }
}

inline Expr get_node(const Expr& e, const NodePath& path, std::size_t at = 0) {
  if (at == path.size()) return e;
  return get_node(path[at] == 0 ? e.left() : e.right(), path, at + 1);
}

inline Expr replace_node(const Expr& e, const NodePath& path, const Expr& replacement,
                         std::size_t at = 0) {
  if (at == path.size()) return replacement;
  if (path[at] == 0) {
    return e.kind() == Expr::Kind::kAnd
               ? Expr::make_and(replace_node(e.left(), path, replacement, at + 1), e.right())
               : Expr::make_or(replace_node(e.left(), path, replacement, at + 1), e.right());
  }
  return e.kind() == Expr::Kind::kAnd
             ? Expr::make_and(e.left(), replace_node(e.right(), path, replacement, at + 1))
             : Expr::make_or(e.left(), replace_node(e.right(), path, replacement, at + 1));
}

// Applies one random phi-invariant rewrite somewhere in the tree; returns the
// rewritten expression, or the input when the sampled rewrite is inapplicable
// after a few retries.
inline Expr random_invariant_rewrite(Rng& rng, const Expr& root,
                                     const std::vector<ParticipantId>& pool) {
  std::vector<NodePath> paths;
  collect_paths(root, {}, &paths);
  for (int attempt = 0; attempt < 40; ++attempt) {
    const NodePath& path = paths[rand_int(rng, 0, static_cast<int>(paths.size()) - 1)];
    Expr node = get_node(root, path);
    int rule = rand_int(rng, 0, 9);
    auto is_op = [&node](Expr::Kind k) { return node.kind() == k; };
    switch (rule) {
      case 0:  // child swap
        if (is_op(Expr::Kind::kAnd)) {
          return replace_node(root, path, Expr::make_and(node.right(), node.left()));
        }
        if (is_op(Expr::Kind::kOr)) {
          return replace_node(root, path, Expr::make_or(node.right(), node.left()));
        }
        break;
      case 1:  // associativity (x op y) op z -> x op (y op z)
        if ((is_op(Expr::Kind::kAnd) && node.left().kind() == Expr::Kind::kAnd) ||
            (is_op(Expr::Kind::kOr) && node.left().kind() == Expr::Kind::kOr)) {
          Expr x = node.left().left(), y = node.left().right(), z = node.right();
          Expr rebuilt = is_op(Expr::Kind::kAnd)
                             ? Expr::make_and(x, Expr::make_and(y, z))
                             : Expr::make_or(x, Expr::make_or(y, z));
          return replace_node(root, path, rebuilt);
        }
        break;
      case 2:  // associativity x op (y op z) -> (x op y) op z
        if ((is_op(Expr::Kind::kAnd) && node.right().kind() == Expr::Kind::kAnd) ||
            (is_op(Expr::Kind::kOr) && node.right().kind() == Expr::Kind::kOr)) {
          Expr x = node.left(), y = node.right().left(), z = node.right().right();
          Expr rebuilt = is_op(Expr::Kind::kAnd)
                             ? Expr::make_and(Expr::make_and(x, y), z)
                             : Expr::make_or(Expr::make_or(x, y), z);
          return replace_node(root, path, rebuilt);
        }
        break;
      case 3:  // identity intro: x -> x & true
        return replace_node(root, path, Expr::make_and(node, Expr::constant(true)));
      case 4:  // identity intro: x -> x | false
        return replace_node(root, path, Expr::make_or(node, Expr::constant(false)));
      case 5:  // identity elim
        if (is_op(Expr::Kind::kAnd) && node.right().kind() == Expr::Kind::kTrue) {
          return replace_node(root, path, node.left());
        }
        if (is_op(Expr::Kind::kOr) && node.right().kind() == Expr::Kind::kFalse) {
          return replace_node(root, path, node.left());
        }
        break;
      case 6:  // annihilator elim
        if (is_op(Expr::Kind::kAnd) && node.right().kind() == Expr::Kind::kFalse) {
          return replace_node(root, path, Expr::constant(false));
        }
        if (is_op(Expr::Kind::kOr) && node.right().kind() == Expr::Kind::kTrue) {
          return replace_node(root, path, Expr::constant(true));
        }
        break;
      case 7:  // annihilator intro on a constant
        if (is_op(Expr::Kind::kFalse)) {
          Expr filler = random_expr(rng, pool, 1);
          return replace_node(root, path, Expr::make_and(filler, Expr::constant(false)));
        }
        if (is_op(Expr::Kind::kTrue)) {
          Expr filler = random_expr(rng, pool, 1);
          return replace_node(root, path, Expr::make_or(filler, Expr::constant(true)));
        }
        break;
      case 8:  // distributivity forward: x & (y | z) -> (x & y) | (x & z)
        if (is_op(Expr::Kind::kAnd) && node.right().kind() == Expr::Kind::kOr) {
          Expr x = node.left(), y = node.right().left(), z = node.right().right();
          return replace_node(
              root, path,
              Expr::make_or(Expr::make_and(x, y), Expr::make_and(x, z)));
        }
        break;
      case 9:  // distributivity backward: (x & y) | (x & z) -> x & (y | z)
        if (is_op(Expr::Kind::kOr) && node.left().kind() == Expr::Kind::kAnd &&
            node.right().kind() == Expr::Kind::kAnd &&
            node.left().left().structurally_equal(node.right().left())) {
          Expr x = node.left().left();
          Expr y = node.left().right();
          Expr z = node.right().right();
          return replace_node(root, path, Expr::make_and(x, Expr::make_or(y, z)));
        }
        break;
    }
  }
  return root;
}

inline Graph fig3_graph() {
  return Graph::from_edges({{"a", "b"},
                            {"a", "c"},
                            {"b", "c"},
                            {"b", "d"},
                            {"c", "d"},
                            {"c", "e"},
                            {"d", "e"}});
}

// The triangle-counting node-privacy relation of the fig3 graph.
inline AnnotatedRelation fig3_triangle_relation() {
  Graph g = fig3_graph();
  Pattern pattern = Pattern::triangle();
  return build_krelation(g, pattern, enumerate_matches(g, pattern), PrivacyMode::kNode);
}

}  // namespace recdp::testutil

#endif  // RECDP_TESTS_TESTUTIL_HPP_

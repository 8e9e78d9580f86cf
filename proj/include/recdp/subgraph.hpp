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

#ifndef RECDP_SUBGRAPH_HPP_
#define RECDP_SUBGRAPH_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "recdp/krelation.hpp"
#include "recdp/mechanism.hpp"

namespace recdp {

// Undirected simple graph with identifier node names. Self-loops and
// duplicate edges are dropped at construction and counted.
class Graph {
 public:
  Graph() = default;
  static Graph from_edges(const std::vector<std::pair<std::string, std::string>>& edges);
  static Graph load(const std::string& path);

  const std::vector<std::string>& nodes() const { return nodes_; }  // sorted
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }  // i < j
  const std::vector<std::vector<int>>& adjacency() const { return adjacency_; }
  const std::string& node_name(int idx) const { return nodes_[idx]; }
  int node_index(const std::string& name) const;  // -1 when absent
  int self_loops_dropped() const { return self_loops_dropped_; }
  int duplicate_edges_dropped() const { return duplicate_edges_dropped_; }
  bool has_edge(int a, int b) const;

  std::string format_edge_list() const;

 private:
  std::vector<std::string> nodes_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> adjacency_;
  int self_loops_dropped_ = 0;
  int duplicate_edges_dropped_ = 0;
};

inline constexpr int kCustomPatternNodeCap = 8;

struct Pattern {
  enum class Kind { kTriangle, kStar, kKTriangle, kCustom };
  Kind kind = Kind::kTriangle;
  int k = 0;     // kStar / kKTriangle
  Graph custom;  // kCustom: connected, <= 8 nodes

  static Pattern triangle();
  static Pattern star(int k);
  static Pattern ktriangle(int k);
  static Pattern custom_graph(Graph pattern);

  // "triangle" | "star:K" | "ktriangle:K" | "file:PATH"
  static Pattern parse(const std::string& text);

  std::string describe() const;
};

// One pattern occurrence. Role layout of nodes:
//   triangle:   three nodes, sorted
//   star:       center first, then sorted leaves
//   k-triangle: the base edge (sorted pair), then sorted common neighbors
//   custom:     images of the pattern nodes, canonical over automorphisms
struct Match {
  std::vector<int> nodes;

  std::string key(const Graph& g, const Pattern& pattern) const;
  std::vector<std::pair<int, int>> edges_used(const Pattern& pattern) const;

  bool operator<(const Match& other) const { return nodes < other.nodes; }
  bool operator==(const Match& other) const { return nodes == other.nodes; }
};

inline constexpr std::size_t kDefaultMatchLimit = 2000000;

// All pattern occurrences, deterministically ordered, non-induced semantics.
// Throws CapacityError past match_limit.
std::vector<Match> enumerate_matches(const Graph& g, const Pattern& pattern,
                                     std::size_t match_limit = kDefaultMatchLimit);

enum class PrivacyMode { kNode, kEdge };

PrivacyMode parse_privacy_mode(const std::string& text);

// Edge participant name: "e_" + lexicographically ordered endpoints.
std::string edge_participant_name(const std::string& u, const std::string& v);

// One row per match over schema {match}. Node mode annotates with the
// conjunction of the match's node variables and lists every graph node as a
// participant; edge mode uses edge variables and lists every graph edge.
// Annotations are conjunctions of distinct variables (DNF, S = 1).
AnnotatedRelation build_krelation(const Graph& g, const Pattern& pattern,
                                  const std::vector<Match>& matches, PrivacyMode mode);

// enumerate -> build -> release with the counting query.
std::pair<double, MechanismTrace> count_pipeline(const Graph& g, const Pattern& pattern,
                                                 PrivacyMode mode,
                                                 const MechanismParams& params, NoiseSource& ns,
                                                 std::size_t match_limit = kDefaultMatchLimit);

// G(n, p) with p = avgdeg/(n-1); deterministic per seed.
Graph generate_gnp(int n, double avgdeg, std::uint64_t seed);

}  // namespace recdp

#endif  // RECDP_SUBGRAPH_HPP_

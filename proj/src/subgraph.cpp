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

#include "recdp/subgraph.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace recdp {

Graph Graph::from_edges(const std::vector<std::pair<std::string, std::string>>& edges) {
  Graph g;
  std::set<std::string> node_set;
  for (const auto& [u, v] : edges) {
    if (!is_valid_identifier(u) || !is_valid_identifier(v)) {
      throw ParseError("invalid node identifier in edge (" + u + ", " + v + ")");
    }
    node_set.insert(u);
    node_set.insert(v);
  }
  g.nodes_.assign(node_set.begin(), node_set.end());
  std::set<std::pair<int, int>> edge_set;
  for (const auto& [u, v] : edges) {
    if (u == v) {
      ++g.self_loops_dropped_;
      continue;
    }
    int a = g.node_index(u);
    int b = g.node_index(v);
    if (a > b) std::swap(a, b);
    if (!edge_set.insert({a, b}).second) ++g.duplicate_edges_dropped_;
  }
  g.edges_.assign(edge_set.begin(), edge_set.end());
  g.adjacency_.assign(g.nodes_.size(), {});
  for (const auto& [a, b] : g.edges_) {
    g.adjacency_[a].push_back(b);
    g.adjacency_[b].push_back(a);
  }
  for (auto& neighbors : g.adjacency_) std::sort(neighbors.begin(), neighbors.end());
  return g;
}

Graph Graph::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open graph file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::string u, v, extra;
    if (!(fields >> u)) continue;  // blank
    if (!(fields >> v) || (fields >> extra)) {
      throw ParseError("graph line " + std::to_string(line_no) +
                       " must hold exactly two node ids");
    }
    if (!is_valid_identifier(u) || !is_valid_identifier(v)) {
      throw ParseError("invalid node identifier on graph line " + std::to_string(line_no));
    }
    edges.emplace_back(std::move(u), std::move(v));
  }
  return from_edges(edges);
}

int Graph::node_index(const std::string& name) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), name);
  if (it == nodes_.end() || *it != name) return -1;
  return static_cast<int>(it - nodes_.begin());
}

bool Graph::has_edge(int a, int b) const {
  const auto& neighbors = adjacency_[a];
  return std::binary_search(neighbors.begin(), neighbors.end(), b);
}

std::string Graph::format_edge_list() const {
  std::string out;
  for (const auto& [a, b] : edges_) {
    out += nodes_[a];
    out += ' ';
    out += nodes_[b];
    out += '\n';
  }
  return out;
}

Pattern Pattern::triangle() { return Pattern{Kind::kTriangle, 0, {}}; }

Pattern Pattern::star(int k) {
  if (k < 1) throw DataError("star pattern requires k >= 1");
  return Pattern{Kind::kStar, k, {}};
}

Pattern Pattern::ktriangle(int k) {
  if (k < 1) throw DataError("k-triangle pattern requires k >= 1");
  return Pattern{Kind::kKTriangle, k, {}};
}

namespace {

bool pattern_connected(const Graph& g) {
  if (g.nodes().empty()) return false;
  std::vector<bool> seen(g.nodes().size(), false);
  std::vector<int> stack = {0};
  seen[0] = true;
  std::size_t visited = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v : g.adjacency()[u]) {
      if (!seen[v]) {
        seen[v] = true;
        ++visited;
        stack.push_back(v);
      }
    }
  }
  return visited == g.nodes().size();
}

}  // namespace

Pattern Pattern::custom_graph(Graph pattern) {
  if (pattern.nodes().size() > static_cast<std::size_t>(kCustomPatternNodeCap)) {
    throw CapacityError("custom patterns limited to " + std::to_string(kCustomPatternNodeCap) +
                        " nodes");
  }
  if (!pattern_connected(pattern)) {
    throw DataError("custom pattern must be connected and non-empty");
  }
  Pattern p;
  p.kind = Kind::kCustom;
  p.custom = std::move(pattern);
  return p;
}

Pattern Pattern::parse(const std::string& text) {
  if (text == "triangle") return triangle();
  auto parse_k = [&text](std::size_t prefix_len) {
    const std::string arg = text.substr(prefix_len);
    try {
      std::size_t used = 0;
      int k = std::stoi(arg, &used);
      if (used != arg.size()) throw std::invalid_argument(arg);
      return k;
    } catch (const std::exception&) {
      throw DataError("bad pattern parameter '" + arg + "'");
    }
  };
  if (text.rfind("star:", 0) == 0) return star(parse_k(5));
  if (text.rfind("ktriangle:", 0) == 0) return ktriangle(parse_k(10));
  if (text.rfind("file:", 0) == 0) return custom_graph(Graph::load(text.substr(5)));
  throw DataError("unknown pattern '" + text +
                  "' (expected triangle, star:K, ktriangle:K, or file:PATH)");
}

std::string Pattern::describe() const {
  switch (kind) {
    case Kind::kTriangle:
      return "triangle";
    case Kind::kStar:
      return "star:" + std::to_string(k);
    case Kind::kKTriangle:
      return "ktriangle:" + std::to_string(k);
    case Kind::kCustom:
      return "custom:" + std::to_string(custom.nodes().size()) + "n" +
             std::to_string(custom.edges().size()) + "e";
  }
  return "?";
}

std::string Match::key(const Graph& g, const Pattern& pattern) const {
  std::string out;
  auto append_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      if (i > begin) out += ',';
      out += g.node_name(nodes[i]);
    }
  };
  switch (pattern.kind) {
    case Pattern::Kind::kTriangle:
    case Pattern::Kind::kCustom:
      append_range(0, nodes.size());
      return out;
    case Pattern::Kind::kStar:
      out += g.node_name(nodes[0]);
      out += '|';
      append_range(1, nodes.size());
      return out;
    case Pattern::Kind::kKTriangle:
      append_range(0, 2);
      out += '|';
      append_range(2, nodes.size());
      return out;
  }
  return out;
}

std::vector<std::pair<int, int>> Match::edges_used(const Pattern& pattern) const {
  std::set<std::pair<int, int>> edges;
  auto add = [&edges](int a, int b) {
    if (a > b) std::swap(a, b);
    edges.insert({a, b});
  };
  switch (pattern.kind) {
    case Pattern::Kind::kTriangle:
      add(nodes[0], nodes[1]);
      add(nodes[0], nodes[2]);
      add(nodes[1], nodes[2]);
      break;
    case Pattern::Kind::kStar:
      for (std::size_t i = 1; i < nodes.size(); ++i) add(nodes[0], nodes[i]);
      break;
    case Pattern::Kind::kKTriangle:
      add(nodes[0], nodes[1]);
      for (std::size_t i = 2; i < nodes.size(); ++i) {
        add(nodes[0], nodes[i]);
        add(nodes[1], nodes[i]);
      }
      break;
    case Pattern::Kind::kCustom:
      for (const auto& [a, b] : pattern.custom.edges()) {
        add(nodes[a], nodes[b]);
      }
      break;
  }
  return {edges.begin(), edges.end()};
}

namespace {

void guard_matches(std::size_t count, std::size_t limit) {
  if (count > limit) {
    throw CapacityError("match enumeration exceeds the limit of " + std::to_string(limit) +
                        " matches");
  }
}

// Emits every sorted k-subset of the (sorted) candidate list.
void for_each_subset(const std::vector<int>& candidates, int k,
                     const std::function<void(const std::vector<int>&)>& emit) {
  if (k > static_cast<int>(candidates.size())) return;
  std::vector<int> chosen(k);
  auto recurse = [&](auto&& self, int start, int depth) -> void {
    if (depth == k) {
      emit(chosen);
      return;
    }
    for (std::size_t i = start; i + (k - depth) <= candidates.size(); ++i) {
      chosen[depth] = candidates[i];
      self(self, static_cast<int>(i) + 1, depth + 1);
    }
  };
  recurse(recurse, 0, 0);
}

std::vector<int> sorted_common_neighbors(const Graph& g, int u, int v) {
  const auto& nu = g.adjacency()[u];
  const auto& nv = g.adjacency()[v];
  std::vector<int> common;
  std::set_intersection(nu.begin(), nu.end(), nv.begin(), nv.end(),
                        std::back_inserter(common));
  return common;
}

std::vector<std::vector<int>> pattern_automorphisms(const Graph& pattern) {
  const int n = static_cast<int>(pattern.nodes().size());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> autos;
  do {
    bool ok = true;
    for (const auto& [a, b] : pattern.edges()) {
      if (!pattern.has_edge(perm[a], perm[b])) {
        ok = false;
        break;
      }
    }
    if (ok) autos.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return autos;
}

void enumerate_custom(const Graph& g, const Graph& pattern, std::size_t limit,
                      std::set<std::vector<int>>* out) {
  const int n = static_cast<int>(pattern.nodes().size());
  if (static_cast<std::size_t>(n) > g.nodes().size()) return;
  std::vector<std::vector<int>> autos = pattern_automorphisms(pattern);

  // Order pattern nodes so each (after the first) touches an earlier one;
  // the pattern is connected, so this always succeeds.
  std::vector<int> order;
  std::vector<bool> placed(n, false);
  order.push_back(0);
  placed[0] = true;
  while (static_cast<int>(order.size()) < n) {
    for (int v = 0; v < n; ++v) {
      if (placed[v]) continue;
      bool touches = false;
      for (int u : order) {
        if (pattern.has_edge(u, v)) {
          touches = true;
          break;
        }
      }
      if (touches) {
        order.push_back(v);
        placed[v] = true;
        break;
      }
    }
  }

  std::vector<int> image(n, -1);
  std::vector<bool> used(g.nodes().size(), false);
  auto canonicalize = [&autos, n](const std::vector<int>& img) {
    std::vector<int> best;
    std::vector<int> candidate(n);
    for (const auto& sigma : autos) {
      for (int v = 0; v < n; ++v) candidate[v] = img[sigma[v]];
      if (best.empty() || candidate < best) best = candidate;
    }
    return best;
  };

  auto recurse = [&](auto&& self, int depth) -> void {
    if (depth == n) {
      out->insert(canonicalize(image));
      guard_matches(out->size(), limit);
      return;
    }
    int pv = order[depth];
    // Candidates must be adjacent to the image of some earlier neighbor.
    int anchor = -1;
    for (int j = 0; j < depth; ++j) {
      if (pattern.has_edge(order[j], pv)) {
        anchor = order[j];
        break;
      }
    }
    auto try_node = [&](int gv) {
      if (used[gv]) return;
      for (int j = 0; j < depth; ++j) {
        int pu = order[j];
        if (pattern.has_edge(pu, pv) && !g.has_edge(image[pu], gv)) return;
      }
      image[pv] = gv;
      used[gv] = true;
      self(self, depth + 1);
      used[gv] = false;
      image[pv] = -1;
    };
    if (anchor >= 0) {
      for (int gv : g.adjacency()[image[anchor]]) try_node(gv);
    } else {
      for (std::size_t gv = 0; gv < g.nodes().size(); ++gv) try_node(static_cast<int>(gv));
    }
  };
  recurse(recurse, 0);
}

}  // namespace

std::vector<Match> enumerate_matches(const Graph& g, const Pattern& pattern,
                                     std::size_t match_limit) {
  std::vector<Match> matches;
  switch (pattern.kind) {
    case Pattern::Kind::kTriangle: {
      for (const auto& [u, v] : g.edges()) {
        for (int w : sorted_common_neighbors(g, u, v)) {
          if (w > v) {
            matches.push_back(Match{{u, v, w}});
            guard_matches(matches.size(), match_limit);
          }
        }
      }
      break;
    }
    case Pattern::Kind::kStar: {
      for (std::size_t c = 0; c < g.nodes().size(); ++c) {
        for_each_subset(g.adjacency()[c], pattern.k, [&](const std::vector<int>& leaves) {
          Match m;
          m.nodes.push_back(static_cast<int>(c));
          m.nodes.insert(m.nodes.end(), leaves.begin(), leaves.end());
          matches.push_back(std::move(m));
          guard_matches(matches.size(), match_limit);
        });
      }
      break;
    }
    case Pattern::Kind::kKTriangle: {
      for (const auto& [u, v] : g.edges()) {
        std::vector<int> common = sorted_common_neighbors(g, u, v);
        for_each_subset(common, pattern.k, [&](const std::vector<int>& chosen) {
          Match m;
          m.nodes = {u, v};
          m.nodes.insert(m.nodes.end(), chosen.begin(), chosen.end());
          matches.push_back(std::move(m));
          guard_matches(matches.size(), match_limit);
        });
      }
      break;
    }
    case Pattern::Kind::kCustom: {
      std::set<std::vector<int>> canonical;
      enumerate_custom(g, pattern.custom, match_limit, &canonical);
      for (const auto& image : canonical) matches.push_back(Match{image});
      break;
    }
  }
  std::sort(matches.begin(), matches.end());
  return matches;
}

PrivacyMode parse_privacy_mode(const std::string& text) {
  if (text == "node") return PrivacyMode::kNode;
  if (text == "edge") return PrivacyMode::kEdge;
  throw DataError("unknown privacy mode '" + text + "' (expected node or edge)");
}

std::string edge_participant_name(const std::string& u, const std::string& v) {
  const std::string& lo = u <= v ? u : v;
  const std::string& hi = u <= v ? v : u;
  return "e_" + lo + "_" + hi;
}

AnnotatedRelation build_krelation(const Graph& g, const Pattern& pattern,
                                  const std::vector<Match>& matches, PrivacyMode mode) {
  AnnotatedRelation out{Schema{"match"}};
  for (const Match& m : matches) {
    std::vector<std::string> vars;
    if (mode == PrivacyMode::kNode) {
      std::set<int> distinct(m.nodes.begin(), m.nodes.end());
      for (int v : distinct) vars.push_back(g.node_name(v));
    } else {
      for (const auto& [a, b] : m.edges_used(pattern)) {
        vars.push_back(edge_participant_name(g.node_name(a), g.node_name(b)));
      }
    }
    std::sort(vars.begin(), vars.end());
    Expr annotation = Expr::var(vars.front());
    for (std::size_t i = 1; i < vars.size(); ++i) {
      annotation = Expr::make_and(std::move(annotation), Expr::var(vars[i]));
    }
    out.add_row(Tuple{{m.key(g, pattern)}}, std::move(annotation));
  }
  std::set<ParticipantId> participants = out.participants();
  if (mode == PrivacyMode::kNode) {
    for (const std::string& n : g.nodes()) participants.insert(n);
  } else {
    for (const auto& [a, b] : g.edges()) {
      participants.insert(edge_participant_name(g.node_name(a), g.node_name(b)));
    }
  }
  out.set_participants(std::move(participants));
  return out;
}

std::pair<double, MechanismTrace> count_pipeline(const Graph& g, const Pattern& pattern,
                                                 PrivacyMode mode,
                                                 const MechanismParams& params, NoiseSource& ns,
                                                 std::size_t match_limit) {
  std::vector<Match> matches = enumerate_matches(g, pattern, match_limit);
  AnnotatedRelation relation = build_krelation(g, pattern, matches, mode);
  MechanismTrace trace = release(relation, LinearQuery::count(), params, ns);
  return {trace.x_hat, trace};
}

Graph generate_gnp(int n, double avgdeg, std::uint64_t seed) {
  if (n < 2) throw DataError("generate_gnp requires n >= 2");
  if (avgdeg < 0 || avgdeg > n - 1) {
    throw DataError("generate_gnp requires 0 <= avgdeg <= n-1");
  }
  double p = avgdeg / (n - 1);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    0x9e3779b9u};
  std::mt19937_64 rng(seq);
  int width = 1;
  for (int scale = 10; scale <= n; scale *= 10) ++width;
  auto name = [width](int idx) {
    std::string digits = std::to_string(idx);
    return "v" + std::string(width - digits.size(), '0') + digits;
  };
  std::vector<std::pair<std::string, std::string>> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      if (u < p) edges.emplace_back(name(i), name(j));
    }
  }
  if (edges.empty()) {
    // Keep all n nodes visible even with no sampled edges.
    Graph g;
    std::vector<std::pair<std::string, std::string>> loops;
    for (int i = 0; i < n; ++i) loops.emplace_back(name(i), name(i));
    return Graph::from_edges(loops);
  }
  Graph g = Graph::from_edges(edges);
  if (static_cast<int>(g.nodes().size()) < n) {
    // Isolated nodes are absent from the edge list; rebuild with loops that
    // are dropped but register the names.
    std::vector<std::pair<std::string, std::string>> padded = edges;
    for (int i = 0; i < n; ++i) padded.emplace_back(name(i), name(i));
    g = Graph::from_edges(padded);
  }
  return g;
}

}  // namespace recdp

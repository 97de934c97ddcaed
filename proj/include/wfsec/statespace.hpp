/*
 * Copyright (c) 2026, the wfsec authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef WFSEC_STATESPACE_HPP_
#define WFSEC_STATESPACE_HPP_

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "wfsec/engine.hpp"
#include "wfsec/workload.hpp"

namespace wfsec {

/// One processed request: graph endpoints plus everything a rule pattern
/// can match on. `user`/`account` are the identity the request acted as
/// (account -1 for invalid-session edges).
struct Edge {
  int from = 0;
  int to = 0;
  int client = 0;
  RequestMsg request;
  Decision decision = Decision::Denied;
  std::string user;
  int64_t account = 0;
};

/// Reachable-state graph. Node ids index `states`; node 0 is the root.
/// Numbering is deterministic: successors are generated in (client id,
/// queue position) order and discovery order assigns ids.
struct StateGraph {
  std::vector<SystemState> states;
  std::vector<Edge> edges;
  std::vector<std::vector<int>> out;  // node -> outgoing edge indices
  std::vector<std::vector<int>> in;   // node -> incoming edge indices
  int root = 0;
};

struct ExploreBudget {
  std::size_t max_nodes = 1000000;
  std::size_t max_paths = 100000;  // per path-enumeration query
};

/// Reads WFSEC_BUDGET (a node count) over the defaults when set.
ExploreBudget budget_from_env();

struct ExploreResult {
  StateGraph graph;
  bool truncated = false;
  ExploreBudget budget;
};

/// Exhaustive breadth-first exploration from initial_state(policy, w),
/// merging canonically equal states. Identical concrete requests from one
/// client in one state produce a single edge.
ExploreResult explore(const PolicySpec& policy, const Workload& w,
                      const ExploreBudget& budget = {});

std::vector<int> filter_nodes(const StateGraph& g,
                              const std::function<bool(const SystemState&)>& p);

/// Node successor lists (parallel edges and self loops collapsed).
std::vector<std::vector<int>> successors(const StateGraph& g);

/// Strongly connected components of an adjacency list, each sorted,
/// returned in a deterministic order.
std::vector<std::vector<int>> sccs(const std::vector<std::vector<int>>& adj);

/// The components that contain a cycle: size > 1, or a self loop.
std::vector<std::vector<int>> cyclic_sccs(
    const std::vector<std::vector<int>>& adj);

struct PathSet {
  /// Each path is a root-to-target sequence of edge indices.
  std::vector<std::vector<int>> paths;
  bool truncated = false;
};

/// All acyclic root-to-`target` paths, up to `max_paths`.
PathSet acyclic_paths_to_root(const StateGraph& g, int target,
                              std::size_t max_paths);

/// One shortest root-to-`target` edge sequence (breadth-first, first-edge
/// tie break). Empty for the root itself or unreachable targets.
std::vector<int> shortest_path_from_root(const StateGraph& g, int target);

std::string to_dot(const StateGraph& g);

}  // namespace wfsec

#endif  // WFSEC_STATESPACE_HPP_

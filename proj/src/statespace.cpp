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

#include "wfsec/statespace.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <map>
#include <set>
#include <sstream>

namespace wfsec {

ExploreBudget budget_from_env() {
  ExploreBudget b;
  if (const char* v = std::getenv("WFSEC_BUDGET")) {
    char* end = nullptr;
    long long n = std::strtoll(v, &end, 10);
    if (end && *end == '\0' && n > 0) b.max_nodes = static_cast<std::size_t>(n);
  }
  return b;
}

ExploreResult explore(const PolicySpec& policy, const Workload& w,
                      const ExploreBudget& budget) {
  ExploreResult res;
  res.budget = budget;
  StateGraph& g = res.graph;

  g.states.push_back(initial_state(policy, w));
  g.out.emplace_back();
  g.in.emplace_back();
  std::map<std::string, int> ids;
  ids[canonical_bytes(g.states[0])] = 0;

  std::deque<int> frontier{0};
  while (!frontier.empty()) {
    int id = frontier.front();
    frontier.pop_front();
    // Copy: g.states may reallocate while this node is being expanded.
    SystemState state = g.states[id];

    std::set<RequestMsg> emitted;
    for (const auto& [client, q] : state.client_queues) {
      std::size_t choices =
          w.clients.at(client).free_order ? q.remaining.size() : 1;
      for (std::size_t i = 0; i < choices; ++i) {
        RequestMsg r = instantiate_template(client, q, q.remaining[i], state);
        if (!emitted.insert(r).second) continue;

        StepResult sr = step(state, r, policy);
        if (w.stop_on_deny && sr.response.decision == Decision::Denied)
          sr.state.client_queues.erase(client);

        std::string key = canonical_bytes(sr.state);
        auto [it, fresh] = ids.try_emplace(key, static_cast<int>(g.states.size()));
        if (fresh) {
          if (g.states.size() >= budget.max_nodes) {
            res.truncated = true;
            ids.erase(it);
            continue;
          }
          g.states.push_back(std::move(sr.state));
          g.out.emplace_back();
          g.in.emplace_back();
          frontier.push_back(it->second);
        }
        int to = it->second;
        int eidx = static_cast<int>(g.edges.size());
        g.edges.push_back({id, to, client, std::move(r), sr.response.decision,
                           sr.binding.user, sr.binding.account});
        g.out[id].push_back(eidx);
        g.in[to].push_back(eidx);
      }
    }
  }
  return res;
}

std::vector<int> filter_nodes(
    const StateGraph& g, const std::function<bool(const SystemState&)>& p) {
  std::vector<int> out;
  for (std::size_t i = 0; i < g.states.size(); ++i)
    if (p(g.states[i])) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<std::vector<int>> successors(const StateGraph& g) {
  std::vector<std::vector<int>> adj(g.states.size());
  for (std::size_t n = 0; n < g.states.size(); ++n) {
    std::set<int> next;
    for (int e : g.out[n]) next.insert(g.edges[e].to);
    adj[n].assign(next.begin(), next.end());
  }
  return adj;
}

namespace {

// Iterative Tarjan.
struct TarjanState {
  const std::vector<std::vector<int>>& adj;
  std::vector<int> index, lowlink;
  std::vector<bool> on_stack;
  std::vector<int> stack;
  int counter = 0;
  std::vector<std::vector<int>> components;

  explicit TarjanState(const std::vector<std::vector<int>>& a)
      : adj(a),
        index(a.size(), -1),
        lowlink(a.size(), 0),
        on_stack(a.size(), false) {}

  void run(int root) {
    struct Frame {
      int node;
      std::size_t next_child = 0;
    };
    std::vector<Frame> frames{{root}};
    index[root] = lowlink[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;

    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.next_child < adj[f.node].size()) {
        int child = adj[f.node][f.next_child++];
        if (index[child] < 0) {
          index[child] = lowlink[child] = counter++;
          stack.push_back(child);
          on_stack[child] = true;
          frames.push_back({child});
        } else if (on_stack[child]) {
          lowlink[f.node] = std::min(lowlink[f.node], index[child]);
        }
      } else {
        if (lowlink[f.node] == index[f.node]) {
          std::vector<int> comp;
          int v;
          do {
            v = stack.back();
            stack.pop_back();
            on_stack[v] = false;
            comp.push_back(v);
          } while (v != f.node);
          std::sort(comp.begin(), comp.end());
          components.push_back(std::move(comp));
        }
        int done = f.node;
        frames.pop_back();
        if (!frames.empty())
          lowlink[frames.back().node] =
              std::min(lowlink[frames.back().node], lowlink[done]);
      }
    }
  }
};

}  // namespace

std::vector<std::vector<int>> sccs(const std::vector<std::vector<int>>& adj) {
  TarjanState t(adj);
  for (std::size_t n = 0; n < adj.size(); ++n)
    if (t.index[n] < 0) t.run(static_cast<int>(n));
  std::sort(t.components.begin(), t.components.end(),
            [](const auto& a, const auto& b) { return a[0] < b[0]; });
  return t.components;
}

std::vector<std::vector<int>> cyclic_sccs(
    const std::vector<std::vector<int>>& adj) {
  std::vector<std::vector<int>> out;
  for (auto& comp : sccs(adj)) {
    bool cyclic = comp.size() > 1;
    if (!cyclic) {
      int n = comp[0];
      cyclic = std::find(adj[n].begin(), adj[n].end(), n) != adj[n].end();
    }
    if (cyclic) out.push_back(comp);
  }
  return out;
}

namespace {

struct PathEnum {
  const StateGraph& g;
  std::size_t max_paths;
  PathSet result;
  std::vector<bool> on_path;
  std::vector<int> current;  // edge indices, target-to-root order

  PathEnum(const StateGraph& graph, std::size_t budget)
      : g(graph), max_paths(budget), on_path(graph.states.size(), false) {}

  bool visit(int node) {
    if (node == g.root) {
      if (result.paths.size() >= max_paths) {
        result.truncated = true;
        return false;
      }
      result.paths.emplace_back(current.rbegin(), current.rend());
      return true;
    }
    on_path[node] = true;
    for (int e : g.in[node]) {
      int prev = g.edges[e].from;
      if (on_path[prev]) continue;
      current.push_back(e);
      bool keep_going = visit(prev);
      current.pop_back();
      if (!keep_going) {
        on_path[node] = false;
        return false;
      }
    }
    on_path[node] = false;
    return true;
  }
};

}  // namespace

PathSet acyclic_paths_to_root(const StateGraph& g, int target,
                              std::size_t max_paths) {
  PathEnum en(g, max_paths);
  en.on_path[g.root] = false;
  en.visit(target);
  return std::move(en.result);
}

std::vector<int> shortest_path_from_root(const StateGraph& g, int target) {
  std::vector<int> parent_edge(g.states.size(), -1);
  std::vector<bool> seen(g.states.size(), false);
  seen[g.root] = true;
  std::deque<int> frontier{g.root};
  while (!frontier.empty() && !seen[target]) {
    int n = frontier.front();
    frontier.pop_front();
    for (int e : g.out[n]) {
      int to = g.edges[e].to;
      if (seen[to]) continue;
      seen[to] = true;
      parent_edge[to] = e;
      frontier.push_back(to);
    }
  }
  std::vector<int> path;
  if (!seen[target]) return path;
  for (int n = target; n != g.root; n = g.edges[parent_edge[n]].from)
    path.push_back(parent_edge[n]);
  std::reverse(path.begin(), path.end());
  return path;
}

std::string to_dot(const StateGraph& g) {
  std::ostringstream out;
  out << "digraph states {\n  rankdir=TB;\n";
  for (std::size_t n = 0; n < g.states.size(); ++n)
    out << "  n" << n << " [label=\"" << n << "\"];\n";
  for (const Edge& e : g.edges) {
    out << "  n" << e.from << " -> n" << e.to << " [label=\"c" << e.client
        << ":" << e.request.action << "^" << to_string(e.decision) << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace wfsec

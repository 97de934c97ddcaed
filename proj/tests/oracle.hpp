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

// Naive reference implementation of the rule checkers. Enumerates every
// simple root-to-target path explicitly and scans it, with none of the
// product-graph machinery of the production checkers. Only suitable for
// small graphs; the tests use it as an independent oracle.

#ifndef WFSEC_TESTS_ORACLE_HPP_
#define WFSEC_TESTS_ORACLE_HPP_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wfsec/rulecheck.hpp"
#include "wfsec/statespace.hpp"

namespace wfsec_oracle {

using wfsec::Decision;
using wfsec::Edge;
using wfsec::EventPattern;
using wfsec::ParamValue;
using wfsec::PatTerm;
using wfsec::Rule;
using wfsec::StateGraph;

using Bindings = std::map<std::string, ParamValue>;

inline bool term_ok(const PatTerm& t, const ParamValue& v, Bindings& b) {
  switch (t.kind) {
    case PatTerm::Kind::Any:
      return true;
    case PatTerm::Kind::LitInt:
      return v.kind() == wfsec::ValueKind::Int && v.as_int() == t.int_val;
    case PatTerm::Kind::LitText:
      return v.kind() == wfsec::ValueKind::Text && v.as_text() == t.text;
    case PatTerm::Kind::Var: {
      auto [it, fresh] = b.emplace(t.text, v);
      return fresh || it->second == v;
    }
  }
  return false;
}

inline bool event_ok(const EventPattern& p, const Edge& e, Bindings& b) {
  if (e.decision != p.decision || e.request.action != p.action) return false;
  Bindings trial = b;
  if (!term_ok(p.user, ParamValue(e.user), trial)) return false;
  if (!term_ok(p.account, ParamValue(e.account), trial)) return false;
  for (const auto& [key, term] : p.params) {
    const ParamValue* v = e.request.params.find(key);
    if (!v || !term_ok(term, *v, trial)) return false;
  }
  b = std::move(trial);
  return true;
}

/// Every simple root-to-`target` path, as edge index sequences. The empty
/// path is included when target is the root.
inline std::vector<std::vector<int>> all_paths(const StateGraph& g,
                                               int target) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::vector<char> visited(g.states.size(), 0);
  struct Rec {
    const StateGraph& g;
    int target;
    std::vector<std::vector<int>>& out;
    std::vector<int>& cur;
    std::vector<char>& visited;
    void walk(int node) {
      if (node == target) {
        out.push_back(cur);
        return;
      }
      visited[node] = 1;
      for (int ei : g.out[node]) {
        if (visited[g.edges[ei].to]) continue;
        cur.push_back(ei);
        walk(g.edges[ei].to);
        cur.pop_back();
      }
      visited[node] = 0;
    }
  } rec{g, target, out, cur, visited};
  rec.walk(g.root);
  return out;
}

struct OracleViolation {
  int insecure_state = 0;
  std::optional<int64_t> accumulated;
};

inline bool response_assign(const StateGraph& g, const wfsec::ResponseRule& rr,
                            const std::vector<int>& path, const Edge& target,
                            std::size_t idx, std::size_t from,
                            const Bindings& b) {
  if (idx == rr.antecedents.size()) {
    Bindings trial = b;
    if (!event_ok(rr.forbidden, target, trial)) return false;
    if (rr.reset) {
      for (std::size_t pos = from; pos < path.size(); ++pos) {
        Bindings rt = trial;
        if (event_ok(*rr.reset, g.edges[path[pos]], rt)) return false;
      }
    }
    return true;
  }
  for (std::size_t pos = from; pos < path.size(); ++pos) {
    Bindings trial = b;
    if (event_ok(rr.antecedents[idx], g.edges[path[pos]], trial) &&
        response_assign(g, rr, path, target, idx + 1, pos + 1, trial))
      return true;
  }
  return false;
}

inline std::vector<OracleViolation> oracle_check(const StateGraph& g,
                                                 const Rule& rule) {
  std::vector<OracleViolation> out;

  if (const auto* pr = std::get_if<wfsec::PrecedenceRule>(&rule.body)) {
    for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
      const Edge& e = g.edges[ei];
      Bindings bound = rule.side_conditions;
      if (!event_ok(pr->target, e, bound)) continue;
      for (const auto& path : all_paths(g, e.from)) {
        bool guarded = false;
        for (int pe : path) {
          Bindings trial = bound;
          guarded = guarded || event_ok(pr->guard, g.edges[pe], trial);
        }
        if (!guarded) {
          out.push_back({e.to, {}});
          break;
        }
      }
    }
    return out;
  }

  if (const auto* rr = std::get_if<wfsec::ResponseRule>(&rule.body)) {
    for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
      const Edge& e = g.edges[ei];
      if (e.request.action != rr->forbidden.action ||
          e.decision != rr->forbidden.decision)
        continue;
      for (const auto& path : all_paths(g, e.from)) {
        if (response_assign(g, *rr, path, e, 0, 0, rule.side_conditions)) {
          out.push_back({e.to, {}});
          break;
        }
      }
    }
    return out;
  }

  if (const auto* ts = std::get_if<wfsec::ThreeStrikesRule>(&rule.body)) {
    for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
      const Edge& e = g.edges[ei];
      if (e.request.action != ts->action ||
          e.decision != Decision::Authorized)
        continue;
      for (const auto& path : all_paths(g, e.from)) {
        int denials = 0;
        for (auto it = path.rbegin(); it != path.rend(); ++it) {
          const Edge& pe = g.edges[*it];
          if (pe.request.action != ts->action || pe.user != e.user ||
              pe.account != e.account)
            continue;
          if (pe.decision == Decision::Denied) {
            if (++denials >= ts->threshold) break;
          } else if (pe.decision == Decision::Authorized) {
            break;
          }
        }
        if (denials >= ts->threshold) {
          out.push_back({e.to, {}});
          break;
        }
      }
    }
    return out;
  }

  const auto& ar = std::get<wfsec::AccumulationRule>(rule.body);
  std::set<int> cyclic;
  for (const auto& comp : wfsec::cyclic_sccs(wfsec::successors(g)))
    cyclic.insert(comp.begin(), comp.end());
  for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
    const Edge& e = g.edges[ei];
    if (e.request.action != ar.auth_action ||
        e.decision != Decision::Authorized)
      continue;
    if (cyclic.count(e.to)) {
      out.push_back({e.to, {}});
      continue;
    }
    std::set<int64_t> registered;
    if (!ar.registered_task.empty()) {
      auto it = g.states[g.root].account_task_params.find(
          {e.account, ar.registered_task});
      if (it != g.states[g.root].account_task_params.end())
        registered =
            it->second.get(ar.registered_key, ParamValue(std::set<int64_t>{}))
                .as_int_set();
    }
    int64_t best = -1;
    for (auto path : all_paths(g, e.from)) {
      path.push_back(static_cast<int>(ei));
      std::set<int64_t> pending;
      int64_t sum = 0;
      for (auto it = path.rbegin(); it != path.rend(); ++it) {
        const Edge& pe = g.edges[*it];
        if (pe.decision != Decision::Authorized || pe.user != e.user ||
            pe.account != e.account)
          continue;
        if (pe.request.action == ar.auth_action) {
          if (const ParamValue* tid = pe.request.params.find(ar.link_key))
            pending.insert(tid->as_int());
        } else if (pe.request.action == ar.forms_action) {
          const ParamValue* tid = pe.request.params.find(ar.link_key);
          const ParamValue* dest = pe.request.params.find(ar.dest_key);
          const ParamValue* val = pe.request.params.find(ar.value_key);
          if (!tid || !dest || !val) continue;
          if ((registered.count(dest->as_int()) != 0) != ar.registered)
            continue;
          if (!pending.count(tid->as_int())) continue;
          sum += val->as_int();
          pending.erase(tid->as_int());
        }
      }
      best = std::max(best, sum);
    }
    if (best > ar.limit) out.push_back({e.to, best});
  }
  return out;
}

}  // namespace wfsec_oracle

#endif  // WFSEC_TESTS_ORACLE_HPP_

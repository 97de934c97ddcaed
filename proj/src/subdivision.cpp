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

#include "wfsec/subdivision.hpp"

#include <deque>

#include "wfsec/policy_eval.hpp"

namespace wfsec {

namespace {

constexpr const char* kWildcard = "*";

bool keys_overlap(const std::string& a, const std::string& b) {
  return a == kWildcard || b == kWildcard || a == b;
}

// Static read/write summary of one action over the policy ASTs.
struct ActionSummary {
  /// (task, key) parameter writes; key "*" when the key is computed.
  std::set<std::pair<std::string, std::string>> writes;
  std::set<std::string> clearance_writes;  // tasks
  bool session_effect = false;
  /// (task, key) parameter reads anywhere in constraint or updates.
  std::set<std::pair<std::string, std::string>> reads;
};

void collect_reads(const Expr& e, const std::string& own_task,
                   std::set<std::pair<std::string, std::string>>& reads) {
  if (e.op == Expr::Op::ParamTask || e.op == Expr::Op::ParamTaskOf) {
    std::string task = e.op == Expr::Op::ParamTask ? own_task : e.text;
    std::string key = e.args[0]->op == Expr::Op::LitText ? e.args[0]->text
                                                         : kWildcard;
    reads.emplace(std::move(task), std::move(key));
  }
  for (const auto& arg : e.args) collect_reads(*arg, own_task, reads);
}

void summarize_block(const UpdateBlock& block, const std::string& own_task,
                     ActionSummary& s) {
  for (const auto& st : block) {
    for (const ExprPtr& e : {st.key, st.value, st.user_expr, st.account_expr})
      if (e) collect_reads(*e, own_task, s.reads);
    switch (st.kind) {
      case UpdateStmt::Kind::SetTaskParam:
        s.writes.emplace(st.task, st.key->op == Expr::Op::LitText
                                      ? st.key->text
                                      : kWildcard);
        break;
      case UpdateStmt::Kind::SetClearance:
        s.clearance_writes.insert(st.task);
        break;
      case UpdateStmt::Kind::OpenSession:
      case UpdateStmt::Kind::CloseSession:
      case UpdateStmt::Kind::SetSessParam:
        s.session_effect = true;
        break;
    }
  }
}

ActionSummary summarize(const ActionSpec& act) {
  ActionSummary s;
  if (act.constraint) collect_reads(**act.constraint, act.task, s.reads);
  for (const VariantSpec* v : {&act.on_authorized, &act.on_denied}) {
    for (const auto& block :
         {v->account_update, v->clearance_update, v->session_update})
      if (block) summarize_block(*block, act.task, s);
  }
  return s;
}

// Evaluates both variants of `action` against one state for one identity
// and classifies the resulting delta. Empty string: no dependence found.
std::string classify_delta(const StateDelta& delta, const std::string& task) {
  for (const auto& [key, value] : delta.task_param_writes) {
    (void)value;
    if (key.first == task) return "task-params-changed";
  }
  if (delta.close_session || delta.open_session ||
      !delta.sess_param_writes.empty())
    return "session-params-changed";
  if (delta.clearance_writes.count(task)) return "indirect-influence";
  return {};
}

}  // namespace

ProbeResult probe_task_independence(const PolicySpec& policy,
                                    const std::string& task,
                                    const std::string& action,
                                    const std::vector<SystemState>& sample) {
  const ActionSpec& act = policy.actions.at(action);
  if (act.task == task) return {false, "same-task"};

  // Dynamic part: force both decisions over every sampled state and
  // compare the task's parameters and the session parameters.
  ParamSet no_request;
  ParamSet no_session;
  for (const SystemState& state : sample) {
    for (const std::string& user : policy.users) {
      for (int64_t account : policy.accounts) {
        std::map<std::string, ParamSet> task_params;
        std::map<std::string, Clearance> clearance;
        for (const auto& t : policy.tasks) {
          auto it = state.account_task_params.find({account, t});
          task_params[t] =
              it != state.account_task_params.end() ? it->second : ParamSet{};
          auto cit = state.clearances.find({user, account, t});
          clearance[t] = cit != state.clearances.end()
                             ? cit->second
                             : policy.initial_clearance(user, account, t);
        }
        EvalContext ctx;
        ctx.request_params = &no_request;
        ctx.session_params = &no_session;
        ctx.account_task_params = &task_params;
        ctx.clearance_snapshot = &clearance;
        ctx.user = user;
        ctx.account = account;
        ctx.task = act.task;
        for (const VariantSpec* v : {&act.on_authorized, &act.on_denied}) {
          std::string reason;
          try {
            reason = classify_delta(eval_variant(*v, ctx), task);
          } catch (const EvalError&) {
            reason = "indirect-influence";  // unevaluable: assume the worst
          }
          if (!reason.empty()) return {false, reason};
        }
      }
    }
  }

  // Static part: a write to any key read by the task's actions, or to the
  // task's clearance, influences outcomes the dynamic probe cannot see.
  ActionSummary own = summarize(act);
  if (own.session_effect) return {false, "session-params-changed"};
  if (own.clearance_writes.count(task)) return {false, "indirect-influence"};
  std::set<std::pair<std::string, std::string>> task_reads;
  for (const auto& [name, other] : policy.actions)
    if (other.task == task) {
      ActionSummary s = summarize(other);
      task_reads.insert(s.reads.begin(), s.reads.end());
    }
  for (const auto& [wtask, wkey] : own.writes) {
    if (wtask == task) return {false, "task-params-changed"};
    for (const auto& [rtask, rkey] : task_reads)
      if (wtask == rtask && keys_overlap(wkey, rkey))
        return {false, "indirect-influence"};
  }
  return {true, {}};
}

IndependenceReport build_independence_report(
    const PolicySpec& policy, const std::string& task,
    const std::vector<SystemState>& sample) {
  IndependenceReport report;
  report.task = task;
  for (const auto& [name, act] : policy.actions) {
    (void)act;
    ProbeResult r = probe_task_independence(policy, task, name, sample);
    if (r.independent)
      report.independent_actions.insert(name);
    else if (r.reason == "session-params-changed" ||
             r.reason == "indirect-influence")
      report.exceptions.emplace_back(name, r.reason);
  }
  return report;
}

std::vector<SystemState> sample_states(const PolicySpec& policy,
                                       const Workload& w,
                                       const ExploreBudget& budget) {
  ExploreResult res = explore(policy, w, budget);
  if (!res.truncated) return std::move(res.graph.states);

  // Fallback: the initial state plus every length <= 2 prefix.
  std::vector<SystemState> sample;
  std::deque<std::pair<SystemState, int>> frontier;
  frontier.emplace_back(initial_state(policy, w), 0);
  sample.push_back(frontier.front().first);
  while (!frontier.empty()) {
    auto [state, depth] = std::move(frontier.front());
    frontier.pop_front();
    if (depth >= 2) continue;
    for (const auto& [client, q] : state.client_queues) {
      std::size_t choices =
          w.clients.at(client).free_order ? q.remaining.size() : 1;
      for (std::size_t i = 0; i < choices; ++i) {
        RequestMsg r = instantiate_template(client, q, q.remaining[i], state);
        StepResult sr = step(state, r, policy);
        sample.push_back(sr.state);
        frontier.emplace_back(std::move(sr.state), depth + 1);
      }
    }
  }
  return sample;
}

Workload project_workload(const Workload& w,
                          const IndependenceReport& report) {
  Workload out = w;
  for (auto& [id, client] : out.clients) {
    (void)id;
    std::vector<ReqTemplate> kept;
    for (auto& tpl : client.requests)
      if (!report.independent_actions.count(tpl.action))
        kept.push_back(std::move(tpl));
    client.requests = std::move(kept);
  }
  return out;
}

Equivalence verify_equivalence(const PolicySpec& policy, const Workload& w,
                               const std::string& task,
                               const std::vector<Rule>& rules,
                               const ExploreBudget& budget) {
  ExploreResult whole = explore(policy, w, budget);
  if (whole.truncated) return Equivalence::Inconclusive;

  IndependenceReport report =
      build_independence_report(policy, task, whole.graph.states);
  ExploreResult part = explore(policy, project_workload(w, report), budget);
  if (part.truncated) return Equivalence::Inconclusive;

  for (const Rule& rule : rules) {
    CheckResult a = check_rule(whole.graph, rule, budget.max_paths);
    CheckResult b = check_rule(part.graph, rule, budget.max_paths);
    if (a.partial || b.partial) return Equivalence::Inconclusive;
    if (a.violations.empty() != b.violations.empty())
      return Equivalence::Different;
  }
  return Equivalence::Equal;
}

}  // namespace wfsec

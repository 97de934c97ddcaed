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

#include "wfsec/engine.hpp"

#include "wfsec/policy_eval.hpp"

namespace wfsec {

const char* to_string(Decision d) {
  switch (d) {
    case Decision::Authorized:
      return "A";
    case Decision::Denied:
      return "D";
    case Decision::InvalidSession:
      return "I";
  }
  return "?";
}

namespace {

Clearance clearance_at(const SystemState& state, const PolicySpec& policy,
                       const std::string& user, int64_t account,
                       const std::string& task) {
  auto it = state.clearances.find({user, account, task});
  if (it != state.clearances.end()) return it->second;
  return policy.initial_clearance(user, account, task);
}

const ActionSpec& action_of(const PolicySpec& policy, const RequestMsg& r) {
  auto it = policy.actions.find(r.action);
  if (it == policy.actions.end())
    throw EvalError("request names unknown action \"" + r.action + "\"");
  return it->second;
}

// Pre-state snapshots the constraint and update functions read.
struct CtxStorage {
  ParamSet session_params;
  std::map<std::string, ParamSet> account_task_params;
  std::map<std::string, Clearance> clearance_snapshot;
  EvalContext ctx;
};

CtxStorage build_context(const SystemState& state, const RequestMsg& r,
                         const ResolvedSession& resolved,
                         const SessionBinding& binding,
                         const PolicySpec& policy, const std::string& task) {
  CtxStorage s;
  if (resolved.kind == ResolvedSession::Kind::Existing)
    s.session_params = resolved.session->params;
  for (const auto& t : policy.tasks) {
    auto it = state.account_task_params.find({binding.account, t});
    s.account_task_params[t] =
        it != state.account_task_params.end() ? it->second : ParamSet{};
    s.clearance_snapshot[t] =
        clearance_at(state, policy, binding.user, binding.account, t);
  }
  s.ctx.request_params = &r.params;
  s.ctx.session_params = &s.session_params;
  s.ctx.account_task_params = &s.account_task_params;
  s.ctx.clearance_snapshot = &s.clearance_snapshot;
  s.ctx.user = binding.user;
  s.ctx.account = binding.account;
  s.ctx.task = task;
  return s;
}

}  // namespace

ResolvedSession resolve_session(const SystemState& state, const RequestMsg& r) {
  ResolvedSession out;
  if (!r.params.has("sess")) {
    out.kind = ResolvedSession::Kind::New;
    return out;
  }
  int64_t id = r.params.get("sess", ParamValue(int64_t{-1})).as_int();
  auto it = state.open_sessions.find(id);
  if (it == state.open_sessions.end()) {
    out.kind = ResolvedSession::Kind::Invalid;
    return out;
  }
  out.kind = ResolvedSession::Kind::Existing;
  out.session = &it->second;
  return out;
}

SessionBinding binding_of(const SystemState& state, const RequestMsg& r,
                          const ResolvedSession& resolved,
                          const PolicySpec& policy) {
  (void)state;
  SessionBinding b;
  if (resolved.kind == ResolvedSession::Kind::Existing) {
    b.user = resolved.session->user;
    b.account = resolved.session->account;
    return b;
  }
  b.user = r.user;
  if (r.params.has("acc")) {
    b.account = r.params.get("acc", ParamValue(int64_t{0})).as_int();
  } else if (!policy.accounts.empty()) {
    b.account = policy.accounts.front();
  }
  return b;
}

bool check_clearance(const SystemState& state, const RequestMsg& r,
                     const SessionBinding& binding, const PolicySpec& policy) {
  const ActionSpec& act = action_of(policy, r);
  return clearance_at(state, policy, binding.user, binding.account, act.task) >=
         act.required_clearance;
}

Decision authorize(const SystemState& state, const RequestMsg& r,
                   const ResolvedSession& resolved,
                   const SessionBinding& binding, const PolicySpec& policy) {
  if (!check_clearance(state, r, binding, policy)) return Decision::Denied;
  const ActionSpec& act = action_of(policy, r);
  if (!act.constraint) return Decision::Authorized;
  CtxStorage s = build_context(state, r, resolved, binding, policy, act.task);
  return eval_constraint(**act.constraint, s.ctx) ? Decision::Authorized
                                                  : Decision::Denied;
}

RequestMsg instantiate_template(int client, const ClientQueue& queue,
                                const ReqTemplate& tpl,
                                const SystemState& state) {
  RequestMsg r;
  r.client = client;
  r.user = queue.user;
  r.action = tpl.action;
  r.params = tpl.params;
  if (tpl.bind_session) {
    int64_t sid = -1;
    auto it = state.client_sessions.find(client);
    if (it != state.client_sessions.end()) sid = it->second;
    r.params.set("sess", ParamValue(sid));
  } else if (!r.params.has("sess") && !r.params.has("acc")) {
    r.params.set("acc", ParamValue(queue.account));
  }
  return r;
}

StepResult step(const SystemState& state, const RequestMsg& r,
                const PolicySpec& policy) {
  StepResult out;
  out.state = state;

  // Consume the matching queued request, when one exists (simulate mode
  // passes external requests with no queue entry).
  auto qit = out.state.client_queues.find(r.client);
  if (qit != out.state.client_queues.end()) {
    ClientQueue& q = qit->second;
    for (std::size_t i = 0; i < q.remaining.size(); ++i) {
      if (instantiate_template(r.client, q, q.remaining[i], state) == r) {
        q.remaining.erase(q.remaining.begin() + static_cast<long>(i));
        break;
      }
    }
    if (q.remaining.empty()) out.state.client_queues.erase(qit);
  }

  ResolvedSession resolved = resolve_session(state, r);
  if (resolved.kind == ResolvedSession::Kind::Invalid) {
    out.response = {r, Decision::InvalidSession, {}};
    out.binding.user = r.user;
    out.binding.account = -1;
    return out;
  }

  out.binding = binding_of(state, r, resolved, policy);
  Decision decision = authorize(state, r, resolved, out.binding, policy);
  const ActionSpec& act = action_of(policy, r);
  const VariantSpec& variant =
      decision == Decision::Authorized ? act.on_authorized : act.on_denied;

  StateDelta delta;
  try {
    CtxStorage s =
        build_context(state, r, resolved, out.binding, policy, act.task);
    delta = eval_variant(variant, s.ctx);
  } catch (const EvalError& err) {
    throw EvalError("action \"" + act.name + "\" (" +
                    (decision == Decision::Authorized ? "authorized"
                                                      : "denied") +
                    " variant): " + err.what());
  }

  // Account-task parameter writes: requesting account only, by construction.
  for (const auto& [key, value] : delta.task_param_writes) {
    out.state.account_task_params[{out.binding.account, key.first}].set(
        key.second, value);
  }
  // Clearance writes: requesting (user, account) only, by construction.
  for (const auto& [task, cl] : delta.clearance_writes) {
    out.state.clearances.insert_or_assign(
        {out.binding.user, out.binding.account, task}, cl);
  }

  ParamSet payload;
  if (resolved.kind == ResolvedSession::Kind::Existing) {
    if (delta.open_session)
      throw EvalError("action \"" + act.name +
                      "\": open_session on an already bound session");
    if (delta.close_session) {
      out.state.open_sessions.erase(resolved.session->id);
    } else if (!delta.sess_param_writes.empty()) {
      SessionRec& rec = out.state.open_sessions.at(resolved.session->id);
      rec.params = rec.params.merged(delta.sess_param_writes);
    }
  } else {  // New
    if (delta.open_session) {
      // The id is consumed only when a session is actually opened.
      SessionRec rec;
      rec.id = state.next_session_id;
      rec.user = delta.open_session->user;
      rec.account = delta.open_session->account;
      rec.params = delta.sess_param_writes;
      out.state.next_session_id = rec.id + 1;
      out.state.client_sessions[r.client] = rec.id;
      payload.set("sess", ParamValue(rec.id));
      out.state.open_sessions.emplace(rec.id, std::move(rec));
    } else if (!delta.sess_param_writes.empty()) {
      throw EvalError("action \"" + act.name +
                      "\": set sess with no bound or opened session");
    }
  }

  out.response = {r, decision, std::move(payload)};
  return out;
}

std::vector<ResponseMsg> run_sequence(const SystemState& initial,
                                      const std::vector<RequestMsg>& requests,
                                      const PolicySpec& policy) {
  std::vector<ResponseMsg> out;
  SystemState state = initial;
  for (const auto& r : requests) {
    StepResult res = step(state, r, policy);
    out.push_back(res.response);
    state = std::move(res.state);
  }
  return out;
}

}  // namespace wfsec

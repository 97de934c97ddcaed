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

#ifndef WFSEC_ENGINE_HPP_
#define WFSEC_ENGINE_HPP_

#include <optional>
#include <vector>

#include "wfsec/message.hpp"
#include "wfsec/policy_ast.hpp"
#include "wfsec/state.hpp"

namespace wfsec {

/// Outcome of matching a request against the open-session pool.
struct ResolvedSession {
  enum class Kind { Existing, New, Invalid };
  Kind kind = Kind::New;
  const SessionRec* session = nullptr;  // set iff Existing
};

/// "sess" absent -> New; present and open -> Existing; present and
/// unmatched -> Invalid.
ResolvedSession resolve_session(const SystemState& state, const RequestMsg& r);

/// The (user, account) pair a request acts as: the session's identity for
/// bound requests, the claimed identity otherwise.
struct SessionBinding {
  std::string user;
  int64_t account = 0;
};

SessionBinding binding_of(const SystemState& state, const RequestMsg& r,
                          const ResolvedSession& resolved,
                          const PolicySpec& policy);

/// The multilevel stage: clearance of (user, account, task-of-action) at
/// least the action's required level.
bool check_clearance(const SystemState& state, const RequestMsg& r,
                     const SessionBinding& binding, const PolicySpec& policy);

/// Full authorization: clearance stage conjoined with the action's
/// constraint function (constant true when absent).
Decision authorize(const SystemState& state, const RequestMsg& r,
                   const ResolvedSession& resolved,
                   const SessionBinding& binding, const PolicySpec& policy);

/// Turns a queued template into the concrete request the client would send
/// from `state`: `sess = @` binds the client's latest granted session id
/// (-1 when none), and templates naming neither a session nor an account
/// get the queue's account as an "acc" hint.
RequestMsg instantiate_template(int client, const ClientQueue& queue,
                                const ReqTemplate& tpl,
                                const SystemState& state);

struct StepResult {
  SystemState state;
  ResponseMsg response;
  SessionBinding binding;  // identity the request acted as
};

/// Processes one request: session resolution, two-stage authorization,
/// then the matching decision variant's updates, all read against the
/// pre-state. Pure; throws EvalError (annotated with the action name) on
/// runtime policy bugs.
StepResult step(const SystemState& state, const RequestMsg& r,
                const PolicySpec& policy);

/// Deterministic simulate mode: folds step over a concrete request list.
std::vector<ResponseMsg> run_sequence(const SystemState& initial,
                                      const std::vector<RequestMsg>& requests,
                                      const PolicySpec& policy);

}  // namespace wfsec

#endif  // WFSEC_ENGINE_HPP_

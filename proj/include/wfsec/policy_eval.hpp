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

#ifndef WFSEC_POLICY_EVAL_HPP_
#define WFSEC_POLICY_EVAL_HPP_

#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "wfsec/policy_ast.hpp"

namespace wfsec {

/// Runtime policy bug (type mismatch, division by zero, misuse of session
/// statements). Aborts the run; silently denying would corrupt analysis.
struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Read-only snapshot the update and constraint functions evaluate against.
/// All parameter maps are pre-state values for the requesting account and
/// (user, account) pair.
struct EvalContext {
  const ParamSet* request_params = nullptr;
  const ParamSet* session_params = nullptr;
  const std::map<std::string, ParamSet>* account_task_params = nullptr;
  const std::map<std::string, Clearance>* clearance_snapshot = nullptr;
  std::string user;
  int64_t account = 0;
  std::string task;
};

/// Evaluates a Bool-typed expression. Pure; throws EvalError on runtime
/// policy bugs.
bool eval_constraint(const Expr& e, const EvalContext& ctx);

/// Typed runtime evaluation (exposed for tests and the update evaluator).
ParamValue eval_value(const Expr& e, const EvalContext& ctx);

/// The pending writes of one step, all computed against the pre-state.
/// Task-param writes apply to the requesting account only and clearance
/// writes to the requesting (user, account) only, by construction.
struct StateDelta {
  std::map<std::pair<std::string, std::string>, ParamValue> task_param_writes;
  std::map<std::string, Clearance> clearance_writes;
  bool close_session = false;
  struct OpenSession {
    std::string user;
    int64_t account = 0;
  };
  std::optional<OpenSession> open_session;
  ParamSet sess_param_writes;

  bool empty() const {
    return task_param_writes.empty() && clearance_writes.empty() &&
           !close_session && !open_session && sess_param_writes.empty();
  }
};

/// Evaluates one update block into a delta; an empty block is the identity.
StateDelta eval_update(const UpdateBlock& block, const EvalContext& ctx);

/// Evaluates all three slots of a variant into one merged delta.
StateDelta eval_variant(const VariantSpec& variant, const EvalContext& ctx);

}  // namespace wfsec

#endif  // WFSEC_POLICY_EVAL_HPP_

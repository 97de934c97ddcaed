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

#ifndef WFSEC_STATE_HPP_
#define WFSEC_STATE_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "wfsec/params.hpp"

namespace wfsec {

/// An open session: id, bound user, bound account, session parameters.
struct SessionRec {
  int64_t id = 0;
  std::string user;
  int64_t account = 0;
  ParamSet params;

  bool operator==(const SessionRec&) const = default;
  auto operator<=>(const SessionRec&) const = default;
};

/// A not-yet-sent workload request. `bind_session` means the instantiated
/// request gets a "sess" param holding the client's current session id
/// (-1 when the client has none yet).
struct ReqTemplate {
  std::string action;
  ParamSet params;
  bool bind_session = false;

  bool operator==(const ReqTemplate&) const = default;
  auto operator<=>(const ReqTemplate&) const = default;
};

/// Remaining workload of one client, plus the constants needed to turn a
/// template into a concrete request.
struct ClientQueue {
  std::string user;
  int64_t account = 0;
  std::vector<ReqTemplate> remaining;

  bool operator==(const ClientQueue&) const = default;
  auto operator<=>(const ClientQueue&) const = default;
};

/// Canonical snapshot of the whole system. All maps are ordered, so
/// structural equality coincides with byte equality of canonical_bytes.
struct SystemState {
  std::map<int64_t, SessionRec> open_sessions;
  int64_t next_session_id = 1;
  /// (account, task) -> parameters.
  std::map<std::pair<int64_t, std::string>, ParamSet> account_task_params;
  /// (user, account, task) -> clearance.
  std::map<std::tuple<std::string, int64_t, std::string>, Clearance> clearances;
  /// client -> remaining workload. Empty queues are erased, never kept.
  std::map<int, ClientQueue> client_queues;
  /// client -> most recently granted session id.
  std::map<int, int64_t> client_sessions;

  bool operator==(const SystemState&) const = default;
};

/// Deterministic serialization; equal states yield identical bytes.
std::string canonical_bytes(const SystemState& s);

/// Inverse of canonical_bytes. Throws std::runtime_error on malformed input.
SystemState state_from_bytes(const std::string& bytes);

/// Serialization helpers shared with the report writer.
std::string param_value_to_text(const ParamValue& v);
std::string param_set_to_text(const ParamSet& p);

}  // namespace wfsec

#endif  // WFSEC_STATE_HPP_

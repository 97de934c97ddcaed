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

#ifndef WFSEC_WORKLOAD_HPP_
#define WFSEC_WORKLOAD_HPP_

#include <map>
#include <string>
#include <vector>

#include "wfsec/policy_ast.hpp"
#include "wfsec/state.hpp"

namespace wfsec {

/// One client of a workload: identity constants plus its request templates.
/// `free_order` clients may send any remaining request next; ordered
/// clients always send the head.
struct WorkloadClient {
  int id = 0;
  std::string user;
  int64_t account = 0;
  bool free_order = true;
  std::vector<ReqTemplate> requests;
};

struct Workload {
  std::string name;
  std::map<int, WorkloadClient> clients;
  /// When true, a Denied response removes the rest of that client's queue
  /// in every successor (the denied edge itself is still produced).
  bool stop_on_deny = true;
};

/// Parses the workload text format:
///
///   workload NAME
///   stop_on_deny true|false        # optional, default true
///   client ID user "U" account N free_order|ordered {
///     ACTION { key = VALUE, ... }  # VALUE: int, "text", or @ (sess only)
///   }
///
/// Throws ParseError (from policy_parse.hpp) on malformed input.
Workload parse_workload(const std::string& text);

/// parse_workload over a file's contents. Throws std::runtime_error when
/// the file cannot be read.
Workload load_workload(const std::string& path);

/// The root state of an exploration: initial account-task parameters and
/// materialized initial clearances from the policy, plus one queue per
/// workload client.
SystemState initial_state(const PolicySpec& policy, const Workload& w);

}  // namespace wfsec

#endif  // WFSEC_WORKLOAD_HPP_

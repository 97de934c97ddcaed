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

#ifndef WFSEC_SUBDIVISION_HPP_
#define WFSEC_SUBDIVISION_HPP_

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "wfsec/rulecheck.hpp"
#include "wfsec/statespace.hpp"

namespace wfsec {

/// Probe verdict. Reasons: "same-task", "task-params-changed",
/// "session-params-changed", "indirect-influence".
struct ProbeResult {
  bool independent = false;
  std::string reason;
};

/// Decides whether `action` can be excluded from the analysis of `task`:
/// across the sampled states, both forced decision variants must leave the
/// task's parameters and the session parameters unchanged, and a static
/// scan of the policy must find no write by `action` to any key read by
/// the task's actions (nor to the task's clearance). Conservative: errs
/// toward dependent.
ProbeResult probe_task_independence(const PolicySpec& policy,
                                    const std::string& task,
                                    const std::string& action,
                                    const std::vector<SystemState>& sample);

struct IndependenceReport {
  std::string task;
  std::set<std::string> independent_actions;
  /// (action, reason), reasons limited to "session-params-changed" and
  /// "indirect-influence"; plainly dependent actions get no entry.
  std::vector<std::pair<std::string, std::string>> exceptions;
};

IndependenceReport build_independence_report(
    const PolicySpec& policy, const std::string& task,
    const std::vector<SystemState>& sample);

/// All graph states when exploration fits the budget, otherwise the
/// initial state plus every state reached by a length-1 or length-2
/// request prefix.
std::vector<SystemState> sample_states(const PolicySpec& policy,
                                       const Workload& w,
                                       const ExploreBudget& budget = {});

/// Drops requests whose actions were proven independent; order and modes
/// are otherwise preserved.
Workload project_workload(const Workload& w, const IndependenceReport& report);

enum class Equivalence { Equal, Different, Inconclusive };

/// Small-instance validator: explores the workload whole and projected for
/// `task` and compares per-rule verdicts (violation present or absent).
/// Inconclusive when any exploration or path query hits its budget.
Equivalence verify_equivalence(const PolicySpec& policy, const Workload& w,
                               const std::string& task,
                               const std::vector<Rule>& rules,
                               const ExploreBudget& budget = {});

}  // namespace wfsec

#endif  // WFSEC_SUBDIVISION_HPP_

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

#ifndef WFSEC_BANK_FIXTURE_HPP_
#define WFSEC_BANK_FIXTURE_HPP_

#include <map>
#include <string>
#include <vector>

#include "wfsec/rulecheck.hpp"
#include "wfsec/workload.hpp"

namespace wfsec {

/// Root of the shipped fixture files: WFSEC_FIXTURE_DIR from the
/// environment, falling back to the build-time location.
std::string fixture_dir();

std::string bank_policy_source();
PolicySpec build_bank_policy();
std::vector<Rule> bank_rules();

/// One workload per published scenario row, keyed by workload name.
std::map<std::string, Workload> table2_workloads();

/// Known policy mutations, each defeating exactly one security mechanism.
std::vector<std::string> mutation_catalog();

/// Applies one cataloged mutation. Throws std::invalid_argument on an
/// unknown id.
PolicySpec mutate_policy(const PolicySpec& policy,
                         const std::string& mutation_id);

/// The rule each mutation is built to trigger.
std::string targeted_rule(const std::string& mutation_id);

/// The shipped workload demonstrating the mutation.
Workload mutant_workload(const std::string& mutation_id);

}  // namespace wfsec

#endif  // WFSEC_BANK_FIXTURE_HPP_

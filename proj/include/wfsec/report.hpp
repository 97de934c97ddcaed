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

#ifndef WFSEC_REPORT_HPP_
#define WFSEC_REPORT_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wfsec/policy_ast.hpp"
#include "wfsec/subdivision.hpp"

namespace wfsec {

struct RuleOutcome {
  std::string rule_id;
  std::size_t violation_count = 0;
  std::vector<int> first_witness;  // edge indices of the first violation
  std::optional<int64_t> accumulated;
  bool partial = false;
};

/// One analysis run, serialized in the `wfsec-report v1` text format (see
/// README). Everything except timing_ms is deterministic for fixed inputs.
struct RunReport {
  std::string policy_hash;
  std::string workload;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t scc_count = 0;
  bool truncated = false;
  int64_t timing_ms = 0;
  std::vector<RuleOutcome> rules;
  std::vector<IndependenceReport> independence;
};

uint64_t fnv1a64(const std::string& bytes);

/// Hash of the policy's printed form; stable across reparses.
std::string policy_hash(const PolicySpec& policy);

std::string write_report(const RunReport& report);

/// The report text minus its timing line, for determinism comparisons.
std::string strip_timing(const std::string& report_text);

}  // namespace wfsec

#endif  // WFSEC_REPORT_HPP_

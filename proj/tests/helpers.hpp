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

#ifndef WFSEC_TESTS_HELPERS_HPP_
#define WFSEC_TESTS_HELPERS_HPP_

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "wfsec/bank_fixture.hpp"
#include "wfsec/engine.hpp"
#include "wfsec/rulecheck.hpp"
#include "wfsec/statespace.hpp"
#include "wfsec/workload.hpp"

namespace wfsec_tests {

// Returns a copy so callers may outlive a temporary rules vector.
inline wfsec::Rule rule_by_id(const std::vector<wfsec::Rule>& rules,
                              const std::string& id) {
  for (const auto& r : rules)
    if (r.id == id) return r;
  throw std::runtime_error("no such rule: " + id);
}

/// Per-rule verdict summary used to compare checker and oracle: sorted
/// (insecure state, accumulated) pairs.
using Verdict = std::vector<std::pair<int, std::optional<int64_t>>>;

inline Verdict verdict_of(const wfsec::CheckResult& cr) {
  Verdict v;
  for (const auto& viol : cr.violations)
    v.emplace_back(viol.insecure_state, viol.accumulated);
  std::sort(v.begin(), v.end());
  return v;
}

inline Verdict verdict_of(
    const std::vector<wfsec_oracle::OracleViolation>& violations) {
  Verdict v;
  for (const auto& viol : violations)
    v.emplace_back(viol.insecure_state, viol.accumulated);
  std::sort(v.begin(), v.end());
  return v;
}

/// Replays a witness through the engine; true when every edge's decision
/// and successor state are reproduced exactly.
inline bool replay_witness(const wfsec::StateGraph& g,
                           const std::vector<int>& witness,
                           const wfsec::PolicySpec& policy) {
  wfsec::SystemState state = g.states[g.root];
  for (int ei : witness) {
    const wfsec::Edge& e = g.edges[ei];
    wfsec::StepResult sr = wfsec::step(state, e.request, policy);
    if (sr.response.decision != e.decision) return false;
    if (wfsec::canonical_bytes(sr.state) !=
        wfsec::canonical_bytes(g.states[e.to]))
      return false;
    state = std::move(sr.state);
  }
  return true;
}

}  // namespace wfsec_tests

#endif  // WFSEC_TESTS_HELPERS_HPP_

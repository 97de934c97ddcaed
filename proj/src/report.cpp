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

#include "wfsec/report.hpp"

#include <sstream>

#include "wfsec/policy_parse.hpp"

namespace wfsec {

uint64_t fnv1a64(const std::string& bytes) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string policy_hash(const PolicySpec& policy) {
  std::ostringstream out;
  out << std::hex << fnv1a64(print_policy(policy));
  return out.str();
}

std::string write_report(const RunReport& r) {
  std::ostringstream out;
  out << "wfsec-report v1\n";
  out << "policy_hash " << r.policy_hash << "\n";
  out << "workload " << r.workload << "\n";
  out << "nodes " << r.nodes << "\n";
  out << "edges " << r.edges << "\n";
  out << "scc_count " << r.scc_count << "\n";
  out << "truncated " << (r.truncated ? 1 : 0) << "\n";
  out << "timing_ms " << r.timing_ms << "\n";
  for (const RuleOutcome& rule : r.rules) {
    out << "rule " << rule.rule_id;
    if (rule.violation_count == 0) {
      out << (rule.partial ? " clean-partial" : " clean");
    } else {
      out << " violations " << rule.violation_count << " first_witness ";
      for (std::size_t i = 0; i < rule.first_witness.size(); ++i) {
        if (i) out << "->";
        out << rule.first_witness[i];
      }
      if (rule.accumulated) out << " accumulated " << *rule.accumulated;
      if (rule.partial) out << " partial";
    }
    out << "\n";
  }
  for (const IndependenceReport& ir : r.independence) {
    out << "independence task " << ir.task << " independent ";
    bool first = true;
    for (const auto& a : ir.independent_actions) {
      if (!first) out << ",";
      first = false;
      out << a;
    }
    if (ir.independent_actions.empty()) out << "-";
    out << " exceptions ";
    first = true;
    for (const auto& [action, reason] : ir.exceptions) {
      if (!first) out << ",";
      first = false;
      out << action << ":" << reason;
    }
    if (ir.exceptions.empty()) out << "-";
    out << "\n";
  }
  return out.str();
}

std::string strip_timing(const std::string& report_text) {
  std::istringstream in(report_text);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line))
    if (line.rfind("timing_ms ", 0) != 0) out << line << "\n";
  return out.str();
}

}  // namespace wfsec

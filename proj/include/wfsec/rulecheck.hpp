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

#ifndef WFSEC_RULECHECK_HPP_
#define WFSEC_RULECHECK_HPP_

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wfsec/statespace.hpp"

namespace wfsec {

/// A pattern position: wildcard, literal, or a rule-scoped variable that
/// binds on first match and constrains later matches.
struct PatTerm {
  enum class Kind { Any, LitInt, LitText, Var };
  Kind kind = Kind::Any;
  int64_t int_val = 0;
  std::string text;  // literal text or variable name

  static PatTerm any() { return {}; }
  static PatTerm lit(int64_t v) { return {Kind::LitInt, v, {}}; }
  static PatTerm lit(std::string v) { return {Kind::LitText, 0, std::move(v)}; }
  static PatTerm var(std::string name) {
    return {Kind::Var, 0, std::move(name)};
  }
};

/// Matches one processed request (a graph edge) by identity, action,
/// request parameters, and decision.
struct EventPattern {
  PatTerm user;
  PatTerm account;
  std::string action;
  std::vector<std::pair<std::string, PatTerm>> params;
  Decision decision = Decision::Authorized;
};

/// `target` without an earlier `guard` (same bindings) on some path is
/// insecure.
struct PrecedenceRule {
  EventPattern guard;
  EventPattern target;
};

/// After `antecedents` matched in order on a path, a later occurrence
/// matching `forbidden` is insecure, unless a `reset` match intervenes
/// between the last antecedent and the occurrence.
struct ResponseRule {
  std::vector<EventPattern> antecedents;
  EventPattern forbidden;
  std::optional<EventPattern> reset;
};

/// `threshold` consecutive denials of `action` for one (user, account),
/// then an authorization of it, is insecure.
struct ThreeStrikesRule {
  std::string action;
  int threshold = 3;
};

/// Accumulation over linked form/authorization pairs: along each acyclic
/// path to an authorized `auth_action`, sum `value_key` of authorized
/// `forms_action` requests of the same (user, account) whose `link_key`
/// is consumed by a later authorized `auth_action`, keeping only
/// destinations passing the registered filter. The path maximum above
/// `limit` is insecure, as is any authorized `auth_action` inside a
/// state-space cycle.
struct AccumulationRule {
  std::string forms_action;
  std::string auth_action;
  std::string link_key = "tid";
  std::string value_key = "val";
  std::string dest_key = "dest";
  bool registered = true;  // false: only non-registered destinations count
  int64_t limit = 0;
  /// Where the destination register lives: root state's
  /// (account, registered_task) parameters under registered_key.
  std::string registered_task;
  std::string registered_key = "registered";
};

struct Rule {
  std::string id;
  std::variant<PrecedenceRule, ResponseRule, ThreeStrikesRule, AccumulationRule>
      body;
  /// Pre-bound variables from side conditions (e.g. u = "helper").
  std::map<std::string, ParamValue> side_conditions;
  std::string source_text;
};

struct Violation {
  int insecure_state = 0;
  std::string rule_id;
  std::vector<int> witness;  // root-to-violation edge indices
  std::optional<int64_t> accumulated;
};

struct CheckResult {
  std::vector<Violation> violations;
  /// Set when a path-enumeration budget was hit; absence of violations is
  /// then inconclusive.
  bool partial = false;
};

/// Compiles one rule in the communication-sequence notation:
///
///   [(u,a)] ACTION[^A|^D][(k=v,...)]            bare form; the stated
///       decision is the secure outcome, so the checker searches for the
///       opposite decision
///   PATTERN precedes PATTERN
///   after PATTERN [-> PATTERN ...] forbid PATTERN [unless PATTERN]
///   strikes ACTION N
///   accumulate forms=A auth=B link=K value=K dest=K
///       filter=registered|unregistered limit=N registered=TASK.KEY
///
/// with trailing side conditions `, var = literal`. Throws ParseError on
/// anything outside these templates.
Rule compile_notation(const std::string& text);

/// One rule per line, `#` comments, optional `ID:` prefix per line.
std::vector<Rule> parse_rules_file(const std::string& text);

/// Checks one rule over the whole graph. `max_paths` bounds each
/// path-enumeration query.
CheckResult check_rule(const StateGraph& g, const Rule& rule,
                       std::size_t max_paths = 100000);

/// The accumulation checker (check_rule dispatches here for
/// AccumulationRule bodies).
CheckResult check_accumulation(const StateGraph& g, const Rule& rule,
                               std::size_t max_paths = 100000);

}  // namespace wfsec

#endif  // WFSEC_RULECHECK_HPP_

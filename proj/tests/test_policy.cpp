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

#include "doctest.h"
#include "helpers.hpp"
#include "wfsec/policy_parse.hpp"
#include "wfsec/report.hpp"

using namespace wfsec;

TEST_CASE("bank policy parses with the expected shape") {
  PolicySpec p = build_bank_policy();
  CHECK(p.tasks ==
        std::set<std::string>{"balance", "eft", "login", "logout"});
  CHECK(p.actions.size() == 7);
  CHECK(p.users == std::vector<std::string>{"master", "helper"});
  CHECK(p.accounts == std::vector<int64_t>{1, 2});
  CHECK(p.actions.at("transf_auth").required_clearance == Clearance{2});
  CHECK(p.actions.at("idtf").required_clearance == Clearance{0});
  CHECK(p.actions.at("balance").task == "balance");
  CHECK_FALSE(p.actions.at("balance").constraint.has_value());
  CHECK(p.initial_account_params.at({1, "eft"})
            .get("avLimitReg", ParamValue(int64_t{0}))
            .as_int() == 150000);
}

TEST_CASE("print then parse is a fixpoint") {
  PolicySpec p = build_bank_policy();
  std::string once = print_policy(p);
  std::string twice = print_policy(parse_policy(once));
  CHECK(once == twice);
  CHECK(policy_hash(p) == policy_hash(parse_policy(once)));
}

TEST_CASE("mutations change the policy hash, identity preserves it") {
  PolicySpec p = build_bank_policy();
  for (const std::string& m : mutation_catalog())
    CHECK(policy_hash(mutate_policy(p, m)) != policy_hash(p));
  CHECK_THROWS_AS(mutate_policy(p, "no-such-mutation"), std::invalid_argument);
}

TEST_CASE("parse errors carry locations") {
  CHECK_THROWS_AS(parse_policy("task"), ParseError);
  CHECK_THROWS_AS(parse_policy("action a task t clearance {"), ParseError);
  CHECK_THROWS_AS(
      parse_policy("task t\naction a task t clearance 0 {\n"
                   "  constraint req(\"x\", 0) + 1\n}"),
      ParseError);  // constraint must be Bool
}

TEST_CASE("typed expression grammar rejects kind mismatches") {
  // member() wants (element, set) of matching kinds.
  CHECK_THROWS_AS(
      parse_policy("task t\naction a task t clearance 0 {\n"
                   "  constraint member(req(\"x\", \"\"), intset{1})\n}"),
      ParseError);
}

TEST_CASE("computed param keys parse (concat in key position)") {
  PolicySpec p = parse_policy(
      "task t\naction a task t clearance 0 {\n"
      "  on_authorized { account_update {\n"
      "    set task t[concat(\"k\", to_text(req(\"i\", 0)))] = 1\n"
      "  } }\n}");
  CHECK(p.actions.at("a").on_authorized.account_update.has_value());
}

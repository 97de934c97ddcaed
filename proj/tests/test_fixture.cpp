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

using namespace wfsec;
using wfsec_tests::replay_witness;
using wfsec_tests::rule_by_id;

TEST_CASE("fixture inventory") {
  CHECK(table2_workloads().size() == 10);
  CHECK(mutation_catalog().size() == 5);
  for (const std::string& m : mutation_catalog()) {
    CHECK_FALSE(targeted_rule(m).empty());
    CHECK_FALSE(mutant_workload(m).clients.empty());
  }
}

TEST_CASE("base workload: the listed order authorizes every request, all "
          "rules stay clean across interleavings") {
  PolicySpec p = build_bank_policy();
  Workload w = table2_workloads().at("base");
  // In listed order every request is authorized.
  SystemState s = initial_state(p, w);
  const int client = w.clients.begin()->first;
  for (const ReqTemplate& tpl : w.clients.begin()->second.requests) {
    const ClientQueue& q = s.client_queues.at(client);
    StepResult sr = step(s, instantiate_template(client, q, tpl, s), p);
    CAPTURE(tpl.action);
    CHECK(sr.response.decision == Decision::Authorized);
    s = std::move(sr.state);
  }
  CHECK(s.client_queues.empty());

  ExploreResult res = explore(p, w);
  REQUIRE_FALSE(res.truncated);
  for (const Rule& r : bank_rules()) {
    CAPTURE(r.id);
    CheckResult cr = check_rule(res.graph, r);
    CHECK(cr.violations.empty());
    CHECK_FALSE(cr.partial);
  }
}

TEST_CASE("small scenario workloads stay clean under the intact policy") {
  PolicySpec p = build_bank_policy();
  auto workloads = table2_workloads();
  for (const char* name : {"wrong_login_password", "wrong_eft_password",
                           "helper_user", "eft_500", "extra_tid", "combined"}) {
    CAPTURE(name);
    ExploreResult res = explore(p, workloads.at(name));
    REQUIRE_FALSE(res.truncated);
    for (const Rule& r : bank_rules()) {
      CAPTURE(r.id);
      CHECK(check_rule(res.graph, r).violations.empty());
    }
  }
}

TEST_CASE("kill matrix: each mutation trips exactly its targeted rule") {
  PolicySpec bank = build_bank_policy();
  auto rules = bank_rules();
  for (const std::string& m : mutation_catalog()) {
    CAPTURE(m);
    PolicySpec mutated = mutate_policy(bank, m);
    Workload w = mutant_workload(m);
    ExploreResult res = explore(mutated, w);
    REQUIRE_FALSE(res.truncated);
    const std::string target = targeted_rule(m);
    for (const Rule& r : rules) {
      CAPTURE(r.id);
      CheckResult cr = check_rule(res.graph, r);
      if (r.id == target)
        CHECK_FALSE(cr.violations.empty());
      else
        CHECK(cr.violations.empty());
    }
    // The same workload is clean without the mutation.
    ExploreResult intact = explore(bank, w);
    for (const Rule& r : rules)
      CHECK(check_rule(intact.graph, r).violations.empty());
  }
}

TEST_CASE("mutant witnesses replay through the engine") {
  PolicySpec bank = build_bank_policy();
  for (const std::string& m : mutation_catalog()) {
    CAPTURE(m);
    PolicySpec mutated = mutate_policy(bank, m);
    ExploreResult res = explore(mutated, mutant_workload(m));
    CheckResult cr =
        check_rule(res.graph, rule_by_id(bank_rules(), targeted_rule(m)));
    REQUIRE_FALSE(cr.violations.empty());
    for (const Violation& v : cr.violations) {
      REQUIRE_FALSE(v.witness.empty());
      CHECK(res.graph.edges[v.witness.back()].to == v.insecure_state);
      CHECK(replay_witness(res.graph, v.witness, mutated));
    }
  }
}

TEST_CASE("witness edges are contiguous from the root") {
  PolicySpec p = mutate_policy(build_bank_policy(), "allow-helper-auth");
  ExploreResult res = explore(p, mutant_workload("allow-helper-auth"));
  CheckResult cr = check_rule(res.graph, rule_by_id(bank_rules(), "r5"));
  REQUIRE_FALSE(cr.violations.empty());
  int at = res.graph.root;
  for (int ei : cr.violations.front().witness) {
    CHECK(res.graph.edges[ei].from == at);
    at = res.graph.edges[ei].to;
  }
}

TEST_CASE("fixture files and builtins agree") {
  // The shipped policy text and the builder must denote the same policy.
  CHECK(print_policy(parse_policy(bank_policy_source())) ==
        print_policy(build_bank_policy()));
}

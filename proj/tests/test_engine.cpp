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

#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "wfsec/policy_eval.hpp"

using namespace wfsec;

namespace {

RequestMsg req(const std::string& user, const std::string& action,
               ParamSet params) {
  RequestMsg r;
  r.client = 0;
  r.user = user;
  r.action = action;
  r.params = std::move(params);
  return r;
}

ParamValue pv(int v) { return ParamValue(int64_t{v}); }
ParamValue pv(const char* v) { return ParamValue(v); }
ParamValue empty_set() { return ParamValue(std::set<int64_t>{}); }

SystemState bank_initial() {
  return initial_state(build_bank_policy(), Workload{});
}

}  // namespace

TEST_CASE("identify opens a session and grants the login clearances") {
  PolicySpec p = build_bank_policy();
  SystemState s0 = bank_initial();
  StepResult r = step(s0, req("master", "idtf", {{"acc", pv(1)}}), p);
  CHECK(r.response.decision == Decision::Authorized);
  CHECK(r.response.payload.get("sess", pv(-1)).as_int() == 1);
  REQUIRE(r.state.open_sessions.count(1) == 1);
  CHECK(r.state.open_sessions.at(1).user == "master");
  CHECK(r.state.open_sessions.at(1).account == 1);
  CHECK(r.state.open_sessions.at(1).params.get("li", pv(0)).as_int() == 1);
  CHECK(r.state.clearances.at({"master", 1, "balance"}) == Clearance{-1});
  CHECK(r.state.clearances.at({"master", 1, "eft"}) == Clearance{-1});
  CHECK(r.state.next_session_id == 2);
}

TEST_CASE("balance before authentication is denied, after it authorized") {
  PolicySpec p = build_bank_policy();
  SystemState s = step(bank_initial(), req("master", "idtf", {{"acc", pv(1)}}),
                       p)
                      .state;
  StepResult denied = step(s, req("master", "balance", {{"sess", pv(1)}}), p);
  CHECK(denied.response.decision == Decision::Denied);
  s = step(s, req("master", "auth", {{"sess", pv(1)}, {"pass", pv("pw1")}}), p)
          .state;
  StepResult ok = step(s, req("master", "balance", {{"sess", pv(1)}}), p);
  CHECK(ok.response.decision == Decision::Authorized);
}

TEST_CASE("three-strikes boundary: two wrong attempts recover, three lock") {
  PolicySpec p = build_bank_policy();
  SystemState base =
      step(bank_initial(), req("master", "idtf", {{"acc", pv(1)}}), p).state;
  RequestMsg wrong =
      req("master", "auth", {{"sess", pv(1)}, {"pass", pv("nope")}});
  RequestMsg right =
      req("master", "auth", {{"sess", pv(1)}, {"pass", pv("pw1")}});

  SystemState s = base;
  for (int i = 0; i < 2; ++i) {
    StepResult r = step(s, wrong, p);
    CHECK(r.response.decision == Decision::Denied);
    s = r.state;
  }
  CHECK(s.account_task_params.at({1, "login"}).get("failcount", pv(0))
            .as_int() == 2);
  CHECK(step(s, right, p).response.decision == Decision::Authorized);

  s = base;
  for (int i = 0; i < 3; ++i) s = step(s, wrong, p).state;
  CHECK(s.account_task_params.at({1, "login"}).get("failcount", pv(0))
            .as_int() == 3);
  CHECK(step(s, right, p).response.decision == Decision::Denied);
}

TEST_CASE("denials with the right password never raise the fail count") {
  PolicySpec p = build_bank_policy();
  SystemState s =
      step(bank_initial(), req("master", "idtf", {{"acc", pv(1)}}), p).state;
  RequestMsg right =
      req("master", "auth", {{"sess", pv(1)}, {"pass", pv("pw1")}});
  s = step(s, right, p).state;  // authorized; login clearance drops to -1
  StepResult again = step(s, right, p);
  CHECK(again.response.decision == Decision::Denied);
  CHECK(again.state.account_task_params.at({1, "login"})
            .get("failcount", pv(0))
            .as_int() == 0);
}

TEST_CASE("unknown session ids answer InvalidSession and change nothing") {
  PolicySpec p = build_bank_policy();
  SystemState s0 = bank_initial();
  StepResult r = step(s0, req("master", "balance", {{"sess", pv(99)}}), p);
  CHECK(r.response.decision == Decision::InvalidSession);
  CHECK(canonical_bytes(r.state) == canonical_bytes(s0));
  CHECK(r.binding.account == -1);
}

TEST_CASE("transfer flow: form, approve, allowance bookkeeping, limits") {
  PolicySpec p = build_bank_policy();
  SystemState s =
      step(bank_initial(), req("master", "idtf", {{"acc", pv(1)}}), p).state;
  s = step(s, req("master", "auth", {{"sess", pv(1)}, {"pass", pv("pw1")}}), p)
          .state;

  // Forms need the home step first.
  RequestMsg forms = req("master", "transf_forms",
                         {{"sess", pv(1)},
                          {"tid", pv(1)},
                          {"dest", pv(999)},
                          {"val", pv(25000)}});
  CHECK(step(s, forms, p).response.decision == Decision::Denied);
  s = step(s, req("master", "transf_home", {{"sess", pv(1)}}), p).state;
  StepResult formed = step(s, forms, p);
  CHECK(formed.response.decision == Decision::Authorized);
  s = formed.state;
  const ParamSet& eft = s.account_task_params.at({1, "eft"});
  CHECK(eft.get("pending", empty_set()).as_int_set() ==
        std::set<int64_t>{1});
  CHECK(eft.get("dest1", pv(0)).as_int() == 999);
  CHECK(eft.get("val1", pv(0)).as_int() == 25000);

  StepResult approved = step(
      s, req("master", "transf_auth", {{"sess", pv(1)}, {"tid", pv(1)},
                                       {"pass", pv("pw1")}}),
      p);
  CHECK(approved.response.decision == Decision::Authorized);
  s = approved.state;
  CHECK(s.account_task_params.at({1, "eft"}).get("avLimit", pv(0)).as_int() ==
        25000);
  CHECK(s.account_task_params.at({1, "eft"})
            .get("pending", empty_set())
            .as_int_set()
            .empty());

  // A second unregistered transfer above the remaining allowance is denied.
  s = step(s, req("master", "transf_forms",
                  {{"sess", pv(1)}, {"tid", pv(2)}, {"dest", pv(999)},
                   {"val", pv(25001)}}),
           p)
          .state;
  CHECK(step(s, req("master", "transf_auth",
                    {{"sess", pv(1)}, {"tid", pv(2)}, {"pass", pv("pw1")}}),
             p)
            .response.decision == Decision::Denied);
}

TEST_CASE("registered transfers draw on the registered allowance") {
  PolicySpec p = build_bank_policy();
  SystemState s =
      step(bank_initial(), req("master", "idtf", {{"acc", pv(1)}}), p).state;
  s = step(s, req("master", "auth", {{"sess", pv(1)}, {"pass", pv("pw1")}}), p)
          .state;
  s = step(s, req("master", "transf_home", {{"sess", pv(1)}}), p).state;
  // Account 2 is registered for account 1; 100000 > avLimit but fits
  // avLimitReg.
  s = step(s, req("master", "transf_forms",
                  {{"sess", pv(1)}, {"tid", pv(1)}, {"dest", pv(2)},
                   {"val", pv(100000)}}),
           p)
          .state;
  StepResult approved = step(
      s, req("master", "transf_auth", {{"sess", pv(1)}, {"tid", pv(1)},
                                       {"pass", pv("pw1")}}),
      p);
  CHECK(approved.response.decision == Decision::Authorized);
  const ParamSet& eft = approved.state.account_task_params.at({1, "eft"});
  CHECK(eft.get("avLimitReg", pv(0)).as_int() == 50000);
  CHECK(eft.get("avLimit", pv(0)).as_int() == 50000);
}

TEST_CASE("helper never reaches approval clearance") {
  PolicySpec p = build_bank_policy();
  SystemState s =
      step(bank_initial(), req("helper", "idtf", {{"acc", pv(1)}}), p).state;
  s = step(s, req("helper", "auth", {{"sess", pv(1)}, {"pass", pv("pw2")}}), p)
          .state;
  CHECK(s.clearances.at({"helper", 1, "eft"}) == Clearance{1});
  s = step(s, req("helper", "transf_home", {{"sess", pv(1)}}), p).state;
  s = step(s, req("helper", "transf_forms",
                  {{"sess", pv(1)}, {"tid", pv(1)}, {"dest", pv(2)},
                   {"val", pv(100)}}),
           p)
          .state;
  CHECK(step(s, req("helper", "transf_auth",
                    {{"sess", pv(1)}, {"tid", pv(1)}, {"pass", pv("pw2")}}),
             p)
            .response.decision == Decision::Denied);
}

TEST_CASE("logout clears pending forms and closes the session") {
  PolicySpec p = build_bank_policy();
  SystemState s =
      step(bank_initial(), req("master", "idtf", {{"acc", pv(1)}}), p).state;
  s = step(s, req("master", "auth", {{"sess", pv(1)}, {"pass", pv("pw1")}}), p)
          .state;
  s = step(s, req("master", "transf_home", {{"sess", pv(1)}}), p).state;
  s = step(s, req("master", "transf_forms",
                  {{"sess", pv(1)}, {"tid", pv(7)}, {"dest", pv(2)},
                   {"val", pv(10)}}),
           p)
          .state;
  StepResult out = step(s, req("master", "logout", {{"sess", pv(1)}}), p);
  CHECK(out.response.decision == Decision::Authorized);
  CHECK(out.state.open_sessions.empty());
  CHECK(out.state.account_task_params.at({1, "eft"})
            .get("pending", empty_set())
            .as_int_set()
            .empty());
  CHECK(step(out.state, req("master", "balance", {{"sess", pv(1)}}), p)
            .response.decision == Decision::InvalidSession);
}

TEST_CASE("the session identity wins over the claimed identity") {
  PolicySpec p = build_bank_policy();
  SystemState s =
      step(bank_initial(), req("master", "idtf", {{"acc", pv(1)}}), p).state;
  // Request claims helper but rides master's session.
  StepResult r = step(
      s, req("helper", "auth", {{"sess", pv(1)}, {"pass", pv("pw1")}}), p);
  CHECK(r.binding.user == "master");
  CHECK(r.binding.account == 1);
  CHECK(r.response.decision == Decision::Authorized);
}

TEST_CASE("locality: 10000 randomized steps never touch foreign state") {
  PolicySpec bank = build_bank_policy();
  std::vector<PolicySpec> policies{bank};
  for (const std::string& m : mutation_catalog())
    policies.push_back(mutate_policy(bank, m));

  std::mt19937 rng(20260823);
  auto pick_text = [&rng](std::initializer_list<const char*> xs) {
    return std::string(*(xs.begin() + rng() % xs.size()));
  };
  auto pick_int = [&rng](std::initializer_list<int64_t> xs) {
    return *(xs.begin() + rng() % xs.size());
  };

  const std::vector<std::string> actions{"idtf",        "auth",
                                         "balance",     "transf_home",
                                         "transf_forms", "transf_auth",
                                         "logout"};
  std::size_t steps_taken = 0;
  SystemState state = initial_state(bank, Workload{});
  std::size_t policy_ix = 0;

  while (steps_taken < 10000) {
    const PolicySpec& p = policies[policy_ix];
    RequestMsg r;
    r.client = static_cast<int>(rng() % 3);
    r.user = pick_text({"master", "helper", "nobody"});
    r.action = actions[rng() % actions.size()];
    if (rng() % 2) r.params.set("sess", pv(static_cast<int64_t>(rng() % 4)));
    if (rng() % 2) r.params.set("acc", pv(static_cast<int64_t>(rng() % 3)));
    if (rng() % 2) r.params.set("pass", pick_text({"pw1", "pw2", "nope"}));
    if (rng() % 2) r.params.set("tid", pv(static_cast<int64_t>(rng() % 3)));
    if (rng() % 2) r.params.set("dest", pv(pick_int({1, 2, 999})));
    if (rng() % 2) r.params.set("val", pv(pick_int({0, 100, 40000, 100000})));

    StepResult sr;
    try {
      sr = step(state, r, p);
    } catch (const EvalError&) {
      continue;  // runtime modeling errors are out of scope here
    } catch (const TypeMismatchError&) {
      continue;
    }
    ++steps_taken;

    // Frame conditions: nothing outside the requesting (user, account)
    // clearance and the requesting account's task params may change.
    for (const auto& [key, params] : state.account_task_params) {
      if (key.first == sr.binding.account) continue;
      auto it = sr.state.account_task_params.find(key);
      REQUIRE(it != sr.state.account_task_params.end());
      REQUIRE(it->second == params);
    }
    for (const auto& [key, params] : sr.state.account_task_params) {
      if (key.first != sr.binding.account)
        REQUIRE(state.account_task_params.count(key) == 1);
    }
    for (const auto& [key, level] : state.clearances) {
      if (std::get<0>(key) == sr.binding.user &&
          std::get<1>(key) == sr.binding.account)
        continue;
      auto it = sr.state.clearances.find(key);
      REQUIRE(it != sr.state.clearances.end());
      REQUIRE(it->second == level);
    }
    for (const auto& [key, level] : sr.state.clearances) {
      if (std::get<0>(key) != sr.binding.user ||
          std::get<1>(key) != sr.binding.account)
        REQUIRE(state.clearances.count(key) == 1);
    }

    state = std::move(sr.state);
    if (rng() % 100 == 0) {
      // Occasionally restart from scratch under another policy variant.
      policy_ix = rng() % policies.size();
      state = initial_state(policies[policy_ix], Workload{});
    }
  }
  CHECK(steps_taken == 10000);
}

TEST_CASE("run_sequence equals folding step") {
  PolicySpec p = build_bank_policy();
  std::vector<RequestMsg> seq{
      req("master", "idtf", {{"acc", pv(1)}}),
      req("master", "auth", {{"sess", pv(1)}, {"pass", pv("pw1")}}),
      req("master", "balance", {{"sess", pv(1)}}),
  };
  SystemState s = bank_initial();
  std::vector<ResponseMsg> folded;
  SystemState cur = s;
  for (const auto& r : seq) {
    StepResult sr = step(cur, r, p);
    folded.push_back(sr.response);
    cur = sr.state;
  }
  CHECK(run_sequence(s, seq, p) == folded);
}

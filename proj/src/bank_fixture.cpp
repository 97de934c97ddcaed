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

#include "wfsec/bank_fixture.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "wfsec/policy_parse.hpp"

#ifndef WFSEC_FIXTURE_DIR
#define WFSEC_FIXTURE_DIR "fixtures"
#endif

namespace wfsec {

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read fixture file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool mentions_task_key(const Expr& e, const std::string& key) {
  if ((e.op == Expr::Op::ParamTask || e.op == Expr::Op::ParamTaskOf) &&
      e.args[0]->op == Expr::Op::LitText && e.args[0]->text == key)
    return true;
  for (const auto& arg : e.args)
    if (mentions_task_key(*arg, key)) return true;
  return false;
}

// Replaces every ordering comparison that reads `key` with literal true.
ExprPtr drop_limit_comparisons(const ExprPtr& e, const std::string& key) {
  bool is_ordering = e->op == Expr::Op::Lt || e->op == Expr::Op::Le ||
                     e->op == Expr::Op::Gt || e->op == Expr::Op::Ge;
  if (is_ordering && mentions_task_key(*e, key)) return make_bool(true);
  if (e->args.empty()) return e;
  auto out = std::make_shared<Expr>(*e);
  for (auto& arg : out->args) arg = drop_limit_comparisons(arg, key);
  return out;
}

}  // namespace

std::string fixture_dir() {
  if (const char* dir = std::getenv("WFSEC_FIXTURE_DIR")) return dir;
  return WFSEC_FIXTURE_DIR;
}

std::string bank_policy_source() {
  return slurp(fixture_dir() + "/bank.policy");
}

PolicySpec build_bank_policy() { return parse_policy(bank_policy_source()); }

std::vector<Rule> bank_rules() {
  return parse_rules_file(slurp(fixture_dir() + "/bank.rules"));
}

std::map<std::string, Workload> table2_workloads() {
  std::map<std::string, Workload> out;
  for (const char* name :
       {"base", "wrong_login_password", "wrong_eft_password", "helper_user",
        "eft_500", "extra_tid", "combined", "misc_variations",
        "helper_same_account", "master_two_accounts"}) {
    Workload w =
        load_workload(fixture_dir() + "/table2/" + name + ".workload");
    out.emplace(w.name, std::move(w));
  }
  return out;
}

std::vector<std::string> mutation_catalog() {
  return {"drop-limit-6", "drop-limit-7", "drop-three-strikes",
          "drop-login-guard", "allow-helper-auth"};
}

PolicySpec mutate_policy(const PolicySpec& policy,
                         const std::string& mutation_id) {
  PolicySpec out = policy;
  if (mutation_id == "drop-limit-6" || mutation_id == "drop-limit-7") {
    const std::string key =
        mutation_id == "drop-limit-6" ? "avLimit" : "avLimitReg";
    ActionSpec& act = out.actions.at("transf_auth");
    if (act.constraint)
      act.constraint = drop_limit_comparisons(*act.constraint, key);
    return out;
  }
  if (mutation_id == "drop-three-strikes") {
    out.actions.at("auth").on_denied.account_update.reset();
    return out;
  }
  if (mutation_id == "drop-login-guard") {
    out.actions.at("balance").required_clearance = Clearance{0};
    return out;
  }
  if (mutation_id == "allow-helper-auth") {
    auto& block = out.actions.at("auth").on_authorized.clearance_update;
    if (block)
      for (auto& st : *block)
        if (st.kind == UpdateStmt::Kind::SetClearance && st.task == "eft")
          st.value = make_int(2);
    return out;
  }
  throw std::invalid_argument("unknown mutation id: " + mutation_id);
}

std::string targeted_rule(const std::string& mutation_id) {
  if (mutation_id == "drop-limit-6") return "r6";
  if (mutation_id == "drop-limit-7") return "r7";
  if (mutation_id == "drop-three-strikes") return "r2";
  if (mutation_id == "drop-login-guard") return "r3";
  if (mutation_id == "allow-helper-auth") return "r5";
  throw std::invalid_argument("unknown mutation id: " + mutation_id);
}

Workload mutant_workload(const std::string& mutation_id) {
  targeted_rule(mutation_id);  // validates the id
  return load_workload(fixture_dir() + "/mutants/" + mutation_id +
                       ".workload");
}

}  // namespace wfsec

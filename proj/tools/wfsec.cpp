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

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "wfsec/bank_fixture.hpp"
#include "wfsec/policy_parse.hpp"
#include "wfsec/report.hpp"
#include "wfsec/rulecheck.hpp"
#include "wfsec/subdivision.hpp"
#include "wfsec/workload.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << text;
}

wfsec::ExploreBudget make_budget(std::size_t override_nodes) {
  wfsec::ExploreBudget b = wfsec::budget_from_env();
  if (override_nodes > 0) b.max_nodes = override_nodes;
  return b;
}

int cmd_simulate(const std::string& policy_path,
                 const std::string& workload_path) {
  wfsec::PolicySpec policy = wfsec::parse_policy(slurp(policy_path));
  wfsec::Workload w = wfsec::load_workload(workload_path);
  wfsec::SystemState state = wfsec::initial_state(policy, w);
  for (const auto& [id, client] : w.clients) {
    (void)client;
    while (true) {
      auto qit = state.client_queues.find(id);
      if (qit == state.client_queues.end()) break;
      wfsec::RequestMsg r = wfsec::instantiate_template(
          id, qit->second, qit->second.remaining.front(), state);
      wfsec::StepResult sr = wfsec::step(state, r, policy);
      std::cout << "c" << id << " " << r.action << " -> "
                << wfsec::to_string(sr.response.decision);
      for (const auto& [key, value] : sr.response.payload)
        std::cout << " " << key << "=" << wfsec::param_value_to_text(value);
      std::cout << "\n";
      state = std::move(sr.state);
      if (w.stop_on_deny &&
          sr.response.decision == wfsec::Decision::Denied)
        state.client_queues.erase(id);
    }
  }
  return 0;
}

int cmd_explore(const std::string& policy_path,
                const std::string& workload_path, bool force_stop_on_deny,
                std::size_t budget_nodes, const std::string& dot_path) {
  wfsec::PolicySpec policy = wfsec::parse_policy(slurp(policy_path));
  wfsec::Workload w = wfsec::load_workload(workload_path);
  if (force_stop_on_deny) w.stop_on_deny = true;
  wfsec::ExploreResult res =
      wfsec::explore(policy, w, make_budget(budget_nodes));
  std::cout << "nodes " << res.graph.states.size() << "\n"
            << "edges " << res.graph.edges.size() << "\n"
            << "scc_count " << wfsec::sccs(wfsec::successors(res.graph)).size()
            << "\n"
            << "truncated " << (res.truncated ? 1 : 0) << "\n";
  if (!dot_path.empty()) emit(wfsec::to_dot(res.graph), dot_path);
  return res.truncated ? 3 : 0;
}

int cmd_check(const std::string& policy_path, const std::string& workload_path,
              const std::string& rules_path, const std::string& mutation,
              std::size_t budget_nodes, const std::string& report_path) {
  auto start = std::chrono::steady_clock::now();
  wfsec::PolicySpec policy = wfsec::parse_policy(slurp(policy_path));
  if (!mutation.empty()) policy = wfsec::mutate_policy(policy, mutation);
  wfsec::Workload w = wfsec::load_workload(workload_path);
  std::vector<wfsec::Rule> rules = wfsec::parse_rules_file(slurp(rules_path));
  wfsec::ExploreBudget budget = make_budget(budget_nodes);
  wfsec::ExploreResult res = wfsec::explore(policy, w, budget);

  wfsec::RunReport report;
  report.policy_hash = wfsec::policy_hash(policy);
  report.workload = w.name;
  report.nodes = res.graph.states.size();
  report.edges = res.graph.edges.size();
  report.scc_count = wfsec::sccs(wfsec::successors(res.graph)).size();
  report.truncated = res.truncated;

  bool any_violation = false;
  bool any_partial = res.truncated;
  for (const wfsec::Rule& rule : rules) {
    wfsec::CheckResult cr =
        wfsec::check_rule(res.graph, rule, budget.max_paths);
    wfsec::RuleOutcome outcome;
    outcome.rule_id = rule.id;
    outcome.violation_count = cr.violations.size();
    outcome.partial = cr.partial || res.truncated;
    if (!cr.violations.empty()) {
      outcome.first_witness = cr.violations.front().witness;
      outcome.accumulated = cr.violations.front().accumulated;
      any_violation = true;
    }
    any_partial = any_partial || cr.partial;
    report.rules.push_back(std::move(outcome));
  }
  report.timing_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - start)
                         .count();
  emit(wfsec::write_report(report), report_path);
  if (any_violation) return 2;
  if (any_partial) return 3;
  return 0;
}

int cmd_independence(const std::string& policy_path, const std::string& task,
                     const std::string& workload_path,
                     std::size_t budget_nodes) {
  wfsec::PolicySpec policy = wfsec::parse_policy(slurp(policy_path));
  if (!policy.tasks.count(task))
    throw std::runtime_error("unknown task: " + task);
  std::vector<wfsec::SystemState> sample;
  if (workload_path.empty()) {
    sample.push_back(wfsec::initial_state(policy, wfsec::Workload{}));
  } else {
    sample = wfsec::sample_states(policy, wfsec::load_workload(workload_path),
                                  make_budget(budget_nodes));
  }
  wfsec::IndependenceReport ir =
      wfsec::build_independence_report(policy, task, sample);
  wfsec::RunReport report;
  report.policy_hash = wfsec::policy_hash(policy);
  report.workload = workload_path.empty() ? "-" : "sampled";
  report.independence.push_back(std::move(ir));
  std::cout << wfsec::write_report(report);
  return 0;
}

int cmd_report(const std::vector<std::string>& inputs,
               const std::string& out_path) {
  std::string merged;
  for (const auto& path : inputs) merged += slurp(path);
  emit(merged, out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Security-policy workflow engine and state-space checker"};
  app.require_subcommand(1);

  std::string policy_path, workload_path, rules_path, dot_path, report_path;
  std::string task, mutation;
  std::vector<std::string> inputs;
  std::size_t budget_nodes = 0;
  bool ordered = false;
  bool force_stop_on_deny = false;

  CLI::App* simulate = app.add_subcommand(
      "simulate", "Replay a workload sequentially and print the transcript");
  simulate->add_option("-p,--policy", policy_path)->required();
  simulate->add_option("-w,--workload", workload_path)->required();
  simulate->add_flag("--ordered", ordered,
                     "Process each client's requests in listed order "
                     "(simulate always does; flag kept for symmetry)");

  CLI::App* explore_cmd = app.add_subcommand(
      "explore", "Build the reachable state graph and print its size");
  explore_cmd->add_option("-p,--policy", policy_path)->required();
  explore_cmd->add_option("-w,--workload", workload_path)->required();
  explore_cmd->add_flag("--stop-on-deny", force_stop_on_deny);
  explore_cmd->add_option("--budget", budget_nodes);
  explore_cmd->add_option("--dot", dot_path);

  CLI::App* check = app.add_subcommand(
      "check", "Explore and check every rule; emit a run report");
  check->add_option("-p,--policy", policy_path)->required();
  check->add_option("-w,--workload", workload_path)->required();
  check->add_option("-r,--rules", rules_path)->required();
  check->add_option("--budget", budget_nodes);
  check->add_option("--report", report_path);
  check->add_option("--mutate", mutation,
                    "Apply a named policy mutation before checking");

  CLI::App* independence = app.add_subcommand(
      "independence", "Report which actions are independent of a task");
  independence->add_option("-p,--policy", policy_path)->required();
  independence->add_option("-t,--task", task)->required();
  independence->add_option("-w,--workload", workload_path);
  independence->add_option("--budget", budget_nodes);

  CLI::App* report = app.add_subcommand(
      "report", "Concatenate prior report files into one");
  report->add_option("inputs", inputs)->required();
  report->add_option("-o,--output", report_path);

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmd_simulate(policy_path, workload_path);
    if (explore_cmd->parsed())
      return cmd_explore(policy_path, workload_path, force_stop_on_deny,
                         budget_nodes, dot_path);
    if (check->parsed())
      return cmd_check(policy_path, workload_path, rules_path, mutation,
                       budget_nodes, report_path);
    if (independence->parsed())
      return cmd_independence(policy_path, task, workload_path, budget_nodes);
    if (report->parsed()) return cmd_report(inputs, report_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

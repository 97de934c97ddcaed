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

#include "wfsec/rulecheck.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <set>
#include <sstream>

#include "wfsec/policy_parse.hpp"

namespace wfsec {

namespace {

using Bindings = std::map<std::string, ParamValue>;

bool match_term(const PatTerm& t, const ParamValue& v, Bindings& b) {
  switch (t.kind) {
    case PatTerm::Kind::Any:
      return true;
    case PatTerm::Kind::LitInt:
      return v.kind() == ValueKind::Int && v.as_int() == t.int_val;
    case PatTerm::Kind::LitText:
      return v.kind() == ValueKind::Text && v.as_text() == t.text;
    case PatTerm::Kind::Var: {
      auto it = b.find(t.text);
      if (it == b.end()) {
        b.emplace(t.text, v);
        return true;
      }
      return it->second == v;
    }
  }
  return false;
}

bool match_event(const EventPattern& p, const Edge& e, Bindings& b) {
  if (e.decision != p.decision) return false;
  if (e.request.action != p.action) return false;
  Bindings trial = b;
  if (!match_term(p.user, ParamValue(e.user), trial)) return false;
  if (!match_term(p.account, ParamValue(e.account), trial)) return false;
  for (const auto& [key, term] : p.params) {
    const ParamValue* v = e.request.params.find(key);
    if (!v || !match_term(term, *v, trial)) return false;
  }
  b = std::move(trial);
  return true;
}

// ---------------------------------------------------------------------------
// Notation parser.

struct RuleScanner {
  explicit RuleScanner(const std::string& text) : text_(text) {}

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool eof() {
    skip_ws();
    return pos_ >= text_.size();
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool peek2(char a, char b) {
    skip_ws();
    return pos_ + 1 < text_.size() && text_[pos_] == a && text_[pos_ + 1] == b;
  }

  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError("rule notation: " + msg, 1,
                     static_cast<int>(pos_) + 1);
  }

  bool at_ident() {
    char c = peek();
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }

  std::string ident() {
    if (!at_ident()) fail("expected an identifier");
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_'))
      ++pos_;
    return text_.substr(start, pos_ - start);
  }

  int64_t integer() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < text_.size() && text_[pos_] == '-') ++pos_;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (pos_ == start || text_[pos_ - 1] == '-') fail("expected an integer");
    return std::stoll(text_.substr(start, pos_ - start));
  }

  std::string string_lit() {
    if (peek() != '"') fail("expected a string literal");
    ++pos_;
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') out += text_[pos_++];
    if (pos_ >= text_.size()) fail("unterminated string literal");
    ++pos_;
    return out;
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

PatTerm parse_term(RuleScanner& sc) {
  char c = sc.peek();
  if (c == '"') return PatTerm::lit(sc.string_lit());
  if (c == '-' || std::isdigit(static_cast<unsigned char>(c)))
    return PatTerm::lit(sc.integer());
  return PatTerm::var(sc.ident());
}

Decision parse_decision(RuleScanner& sc) {
  sc.expect('^');
  std::string d = sc.ident();
  if (d == "A") return Decision::Authorized;
  if (d == "D") return Decision::Denied;
  sc.fail("decision superscript must be A or D");
}

EventPattern parse_pattern(RuleScanner& sc) {
  EventPattern p;
  bool have_decision = false;

  if (sc.peek() == '(') {  // (user, account) identity prefix
    sc.expect('(');
    p.user = parse_term(sc);
    sc.expect(',');
    p.account = parse_term(sc);
    sc.expect(')');
  }

  if (sc.peek() == '"')
    p.action = sc.string_lit();
  else
    p.action = sc.ident();
  if (p.action.empty()) sc.fail("empty action name");

  for (;;) {
    char c = sc.peek();
    if (c == '^') {
      if (have_decision) sc.fail("decision given twice");
      p.decision = parse_decision(sc);
      have_decision = true;
    } else if (c == '(') {
      sc.expect('(');
      if (sc.peek() == '^') {
        if (have_decision) sc.fail("decision given twice");
        p.decision = parse_decision(sc);
        have_decision = true;
      } else if (sc.at_ident()) {
        // Either a key=value parameter list or a (user, account) identity
        // group; the first '=' or ',' decides.
        std::string word = sc.ident();
        if (sc.peek() == '=') {
          sc.expect('=');
          p.params.emplace_back(word, parse_term(sc));
          while (sc.peek() == ',') {
            sc.expect(',');
            std::string key = sc.ident();
            sc.expect('=');
            p.params.emplace_back(key, parse_term(sc));
          }
        } else {
          p.user = PatTerm::var(word);
          sc.expect(',');
          p.account = parse_term(sc);
        }
      } else {
        p.user = parse_term(sc);
        sc.expect(',');
        p.account = parse_term(sc);
      }
      sc.expect(')');
    } else {
      break;
    }
  }
  if (!have_decision) sc.fail("pattern lacks a ^A or ^D decision");
  return p;
}

Rule parse_accumulate(RuleScanner& sc) {
  AccumulationRule ar;
  bool have_forms = false, have_auth = false, have_filter = false,
       have_limit = false;
  while (!sc.eof() && sc.peek() != ',') {
    std::string key = sc.ident();
    sc.expect('=');
    if (key == "forms") {
      ar.forms_action = sc.peek() == '"' ? sc.string_lit() : sc.ident();
      have_forms = true;
    } else if (key == "auth") {
      ar.auth_action = sc.peek() == '"' ? sc.string_lit() : sc.ident();
      have_auth = true;
    } else if (key == "link") {
      ar.link_key = sc.ident();
    } else if (key == "value") {
      ar.value_key = sc.ident();
    } else if (key == "dest") {
      ar.dest_key = sc.ident();
    } else if (key == "filter") {
      std::string f = sc.ident();
      if (f == "registered")
        ar.registered = true;
      else if (f == "unregistered")
        ar.registered = false;
      else
        sc.fail("filter must be registered or unregistered");
      have_filter = true;
    } else if (key == "limit") {
      ar.limit = sc.integer();
      have_limit = true;
    } else if (key == "registered") {
      ar.registered_task = sc.ident();
      sc.expect('.');
      ar.registered_key = sc.ident();
    } else {
      sc.fail("unknown accumulate key \"" + key + "\"");
    }
  }
  if (!have_forms || !have_auth || !have_filter || !have_limit)
    sc.fail("accumulate needs forms=, auth=, filter= and limit=");
  if (ar.limit <= 0) sc.fail("accumulate limit must be positive");
  Rule r;
  r.body = std::move(ar);
  return r;
}

}  // namespace

Rule compile_notation(const std::string& text) {
  RuleScanner sc(text);
  Rule rule;
  rule.source_text = text;
  bool have_body = false;

  if (sc.at_ident()) {
    std::size_t mark = sc.pos_;
    std::string kw = sc.ident();
    if (kw == "strikes") {
      ThreeStrikesRule ts;
      ts.action = sc.peek() == '"' ? sc.string_lit() : sc.ident();
      ts.threshold = static_cast<int>(sc.integer());
      if (ts.threshold < 1) sc.fail("strikes threshold must be at least 1");
      rule.body = std::move(ts);
      have_body = true;
    } else if (kw == "accumulate") {
      rule.body = std::move(parse_accumulate(sc).body);
      have_body = true;
    } else if (kw == "after") {
      ResponseRule rr;
      rr.antecedents.push_back(parse_pattern(sc));
      while (sc.peek2('-', '>')) {
        sc.pos_ += 2;
        rr.antecedents.push_back(parse_pattern(sc));
      }
      if (sc.ident() != "forbid") sc.fail("expected \"forbid\"");
      rr.forbidden = parse_pattern(sc);
      if (sc.at_ident()) {
        std::size_t mark2 = sc.pos_;
        if (sc.ident() == "unless")
          rr.reset = parse_pattern(sc);
        else
          sc.pos_ = mark2;
      }
      rule.body = std::move(rr);
      have_body = true;
    } else {
      sc.pos_ = mark;  // plain pattern starting with an identifier
    }
  }

  if (!have_body) {
    EventPattern first = parse_pattern(sc);
    if (sc.at_ident()) {
      if (sc.ident() != "precedes")
        sc.fail("expected \"precedes\" or end of rule");
      PrecedenceRule pr;
      pr.guard = std::move(first);
      pr.target = parse_pattern(sc);
      rule.body = std::move(pr);
    } else {
      // Bare form: the stated decision is the secure outcome; search for
      // the opposite.
      first.decision = first.decision == Decision::Authorized
                           ? Decision::Denied
                           : Decision::Authorized;
      ResponseRule rr;
      rr.forbidden = std::move(first);
      rule.body = std::move(rr);
    }
  }

  while (!sc.eof()) {
    sc.expect(',');
    std::string name = sc.ident();
    sc.expect('=');
    char c = sc.peek();
    ParamValue v = c == '"' ? ParamValue(sc.string_lit())
                            : ParamValue(sc.integer());
    rule.side_conditions.emplace(std::move(name), std::move(v));
  }
  return rule;
}

std::vector<Rule> parse_rules_file(const std::string& text) {
  std::vector<Rule> rules;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    std::size_t a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    std::size_t b = line.find_last_not_of(" \t\r");
    line = line.substr(a, b - a + 1);

    std::string id;
    std::size_t i = 0;
    while (i < line.size() &&
           (std::isalnum(static_cast<unsigned char>(line[i])) ||
            line[i] == '_'))
      ++i;
    std::size_t j = i;
    while (j < line.size() && (line[j] == ' ' || line[j] == '\t')) ++j;
    if (i > 0 && j < line.size() && line[j] == ':') {
      id = line.substr(0, i);
      line = line.substr(j + 1);
    }
    try {
      Rule r = compile_notation(line);
      r.id = id.empty() ? "rule" + std::to_string(rules.size() + 1) : id;
      rules.push_back(std::move(r));
    } catch (const ParseError& err) {
      throw ParseError(std::string(err.what()) + " (rules file line " +
                           std::to_string(lineno) + ")",
                       lineno, err.col);
    }
  }
  return rules;
}

// ---------------------------------------------------------------------------
// Checkers.

namespace {

std::vector<int> with_edge(std::vector<int> path, int e) {
  path.push_back(e);
  return path;
}

// Does the edge match the pattern under fixed bindings? Bindings the match
// itself would add are discarded, exactly as when scanning a path.
bool edge_matches(const EventPattern& p, const Edge& e, const Bindings& b) {
  Bindings trial = b;
  return match_event(p, e, trial);
}

std::string bindings_key(const Bindings& b) {
  std::string out;
  for (const auto& [name, value] : b) {
    out += name;
    out += '=';
    out += param_value_to_text(value);
    out += ';';
  }
  return out;
}

void collect_vars(const PatTerm& t, std::set<std::string>& vars) {
  if (t.kind == PatTerm::Kind::Var) vars.insert(t.text);
}

/// True when every variable in the pattern is already bound.
bool pattern_ground(const EventPattern& p, const Bindings& b) {
  std::set<std::string> vars;
  collect_vars(p.user, vars);
  collect_vars(p.account, vars);
  for (const auto& [key, term] : p.params) {
    (void)key;
    collect_vars(term, vars);
  }
  for (const auto& v : vars)
    if (!b.count(v)) return false;
  return true;
}

/// Breadth-first reachability from the root using only edges that do not
/// match `avoid`. parent_edge reconstructs one witness path per node.
struct ReachInfo {
  std::vector<char> reachable;
  std::vector<int> parent_edge;
};

ReachInfo reach_avoiding(const StateGraph& g, const EventPattern* avoid,
                         const Bindings& bound) {
  ReachInfo r;
  r.reachable.assign(g.states.size(), 0);
  r.parent_edge.assign(g.states.size(), -1);
  std::vector<int> queue{g.root};
  r.reachable[g.root] = 1;
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    for (int ei : g.out[queue[qi]]) {
      const Edge& e = g.edges[ei];
      if (r.reachable[e.to]) continue;
      if (avoid && edge_matches(*avoid, e, bound)) continue;
      r.reachable[e.to] = 1;
      r.parent_edge[e.to] = ei;
      queue.push_back(e.to);
    }
  }
  return r;
}

std::vector<int> reach_path(const StateGraph& g, const ReachInfo& r,
                            int node) {
  std::vector<int> path;
  while (node != g.root) {
    int ei = r.parent_edge[node];
    path.push_back(ei);
    node = g.edges[ei].from;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

void check_precedence(const StateGraph& g, const Rule& rule,
                      const PrecedenceRule& pr, CheckResult& out) {
  std::map<std::string, ReachInfo> memo;
  for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
    const Edge& e = g.edges[ei];
    Bindings bound = rule.side_conditions;
    if (!match_event(pr.target, e, bound)) continue;
    auto [it, fresh] = memo.try_emplace(bindings_key(bound));
    if (fresh) it->second = reach_avoiding(g, &pr.guard, bound);
    if (it->second.reachable[e.from])
      out.violations.push_back(
          {e.to, rule.id,
           with_edge(reach_path(g, it->second, e.from), static_cast<int>(ei)),
           {}});
  }
}

// Tries every in-order assignment of the antecedents to path positions.
bool match_antecedents(const StateGraph& g, const ResponseRule& rr,
                       const std::vector<int>& path, const Edge& target,
                       std::size_t idx, std::size_t start_pos,
                       const Bindings& bound) {
  if (idx == rr.antecedents.size()) {
    Bindings trial = bound;
    if (!match_event(rr.forbidden, target, trial)) return false;
    if (rr.reset) {
      for (std::size_t pos = start_pos; pos < path.size(); ++pos) {
        Bindings reset_trial = trial;
        if (match_event(*rr.reset, g.edges[path[pos]], reset_trial))
          return false;
      }
    }
    return true;
  }
  for (std::size_t pos = start_pos; pos < path.size(); ++pos) {
    Bindings trial = bound;
    if (match_event(rr.antecedents[idx], g.edges[path[pos]], trial) &&
        match_antecedents(g, rr, path, target, idx + 1, pos + 1, trial))
      return true;
  }
  return false;
}

/// Product reachability: the second coordinate counts matched antecedents,
/// with level k (all matched) dropping back to k-1 when a reset edge is
/// crossed. Level k at a node means some path reaches it with every
/// antecedent matched in order and no reset after the last one.
struct NfaInfo {
  std::size_t levels = 0;
  std::vector<char> reached;                     // node * levels + level
  std::vector<std::pair<int, int>> parent;       // (prior product id, edge)
};

NfaInfo response_reach(const StateGraph& g, const ResponseRule& rr,
                       const Bindings& bound) {
  NfaInfo info;
  const std::size_t k = rr.antecedents.size();
  info.levels = k + 1;
  info.reached.assign(g.states.size() * info.levels, 0);
  info.parent.assign(g.states.size() * info.levels, {-1, -1});
  auto id = [&](int node, std::size_t level) {
    return static_cast<std::size_t>(node) * info.levels + level;
  };
  std::vector<std::size_t> queue{id(g.root, 0)};
  info.reached[queue[0]] = 1;
  auto push = [&](std::size_t from_id, int node, std::size_t level, int ei) {
    std::size_t to_id = id(node, level);
    if (info.reached[to_id]) return;
    info.reached[to_id] = 1;
    info.parent[to_id] = {static_cast<int>(from_id), ei};
    queue.push_back(to_id);
  };
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    std::size_t cur = queue[qi];
    int node = static_cast<int>(cur / info.levels);
    std::size_t level = cur % info.levels;
    for (int ei : g.out[node]) {
      const Edge& e = g.edges[ei];
      if (level < k) {
        push(cur, e.to, level, ei);
        if (edge_matches(rr.antecedents[level], e, bound))
          push(cur, e.to, level + 1, ei);
      } else if (rr.reset && edge_matches(*rr.reset, e, bound)) {
        push(cur, e.to, k > 0 ? k - 1 : k, ei);
      } else {
        push(cur, e.to, k, ei);
      }
    }
  }
  return info;
}

std::vector<int> nfa_path(const NfaInfo& info, int node, std::size_t level) {
  std::vector<int> path;
  std::size_t cur = static_cast<std::size_t>(node) * info.levels + level;
  while (info.parent[cur].second >= 0) {
    path.push_back(info.parent[cur].second);
    cur = static_cast<std::size_t>(info.parent[cur].first);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

void check_response(const StateGraph& g, const Rule& rule,
                    const ResponseRule& rr, std::size_t max_paths,
                    CheckResult& out) {
  std::map<std::string, ReachInfo> reset_memo;
  std::map<std::string, NfaInfo> nfa_memo;
  for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
    const Edge& e = g.edges[ei];
    if (e.request.action != rr.forbidden.action ||
        e.decision != rr.forbidden.decision)
      continue;
    Bindings bound = rule.side_conditions;
    if (!match_event(rr.forbidden, e, bound)) continue;

    if (rr.antecedents.empty() && !rr.reset) {
      out.violations.push_back(
          {e.to, rule.id,
           with_edge(shortest_path_from_root(g, e.from),
                     static_cast<int>(ei)),
           {}});
      continue;
    }

    bool ground = !rr.reset || pattern_ground(*rr.reset, bound);
    for (const EventPattern& a : rr.antecedents)
      ground = ground && pattern_ground(a, bound);

    if (!ground) {
      // A variable appears only before the forbidden edge; fall back to
      // explicit path enumeration.
      PathSet ps = acyclic_paths_to_root(g, e.from, max_paths);
      out.partial = out.partial || ps.truncated;
      for (const auto& path : ps.paths) {
        if (match_antecedents(g, rr, path, e, 0, 0, rule.side_conditions)) {
          out.violations.push_back(
              {e.to, rule.id, with_edge(path, static_cast<int>(ei)), {}});
          break;
        }
      }
      continue;
    }

    if (rr.antecedents.empty()) {
      // Only a reset: forbidden unless a reset edge intervenes.
      auto [it, fresh] = reset_memo.try_emplace(bindings_key(bound));
      if (fresh) it->second = reach_avoiding(g, &*rr.reset, bound);
      if (it->second.reachable[e.from])
        out.violations.push_back(
            {e.to, rule.id,
             with_edge(reach_path(g, it->second, e.from),
                       static_cast<int>(ei)),
             {}});
      continue;
    }

    auto [it, fresh] = nfa_memo.try_emplace(bindings_key(bound));
    if (fresh) it->second = response_reach(g, rr, bound);
    const NfaInfo& info = it->second;
    std::size_t k = rr.antecedents.size();
    if (info.reached[static_cast<std::size_t>(e.from) * info.levels + k])
      out.violations.push_back(
          {e.to, rule.id,
           with_edge(nfa_path(info, e.from, k), static_cast<int>(ei)),
           {}});
  }
}

/// Product reachability whose second coordinate is the number of
/// consecutive denials of `action` under one identity, capped at the
/// threshold. Authorized resets it, invalid-session edges leave it alone.
struct StrikeInfo {
  std::size_t levels = 0;
  std::vector<char> reached;
  std::vector<std::pair<int, int>> parent;
};

StrikeInfo strike_reach(const StateGraph& g, const ThreeStrikesRule& ts,
                        const std::string& user, int64_t account) {
  StrikeInfo info;
  info.levels = static_cast<std::size_t>(ts.threshold) + 1;
  info.reached.assign(g.states.size() * info.levels, 0);
  info.parent.assign(g.states.size() * info.levels, {-1, -1});
  auto id = [&](int node, std::size_t level) {
    return static_cast<std::size_t>(node) * info.levels + level;
  };
  std::vector<std::size_t> queue{id(g.root, 0)};
  info.reached[queue[0]] = 1;
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    std::size_t cur = queue[qi];
    int node = static_cast<int>(cur / info.levels);
    std::size_t level = cur % info.levels;
    for (int ei : g.out[node]) {
      const Edge& e = g.edges[ei];
      std::size_t next = level;
      if (e.request.action == ts.action && e.user == user &&
          e.account == account) {
        if (e.decision == Decision::Denied)
          next = std::min(level + 1, info.levels - 1);
        else if (e.decision == Decision::Authorized)
          next = 0;
      }
      std::size_t to_id = id(e.to, next);
      if (info.reached[to_id]) continue;
      info.reached[to_id] = 1;
      info.parent[to_id] = {static_cast<int>(cur), ei};
      queue.push_back(to_id);
    }
  }
  return info;
}

void check_strikes(const StateGraph& g, const Rule& rule,
                   const ThreeStrikesRule& ts, CheckResult& out) {
  std::map<std::pair<std::string, int64_t>, StrikeInfo> memo;
  for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
    const Edge& e = g.edges[ei];
    if (e.request.action != ts.action || e.decision != Decision::Authorized)
      continue;
    auto [it, fresh] = memo.try_emplace({e.user, e.account});
    if (fresh) it->second = strike_reach(g, ts, e.user, e.account);
    const StrikeInfo& info = it->second;
    std::size_t full = info.levels - 1;
    if (info.reached[static_cast<std::size_t>(e.from) * info.levels + full]) {
      std::vector<int> path;
      std::size_t cur = static_cast<std::size_t>(e.from) * info.levels + full;
      while (info.parent[cur].second >= 0) {
        path.push_back(info.parent[cur].second);
        cur = static_cast<std::size_t>(info.parent[cur].first);
      }
      std::reverse(path.begin(), path.end());
      out.violations.push_back(
          {e.to, rule.id, with_edge(std::move(path), static_cast<int>(ei)),
           {}});
    }
  }
}

std::set<int64_t> registered_set(const StateGraph& g,
                                 const AccumulationRule& ar, int64_t account) {
  std::set<int64_t> registered;
  if (ar.registered_task.empty()) return registered;
  auto it = g.states[g.root].account_task_params.find(
      {account, ar.registered_task});
  if (it != g.states[g.root].account_task_params.end())
    registered = it->second
                     .get(ar.registered_key, ParamValue(std::set<int64_t>{}))
                     .as_int_set();
  return registered;
}

/// The highest sum any single root-to-target path accumulates, computed by
/// the backward scan the notation defines: each authorization consumes the
/// latest still-unconsumed filter-matching transfer with its link id.
int64_t scan_path(const StateGraph& g, const AccumulationRule& ar,
                  const Edge& target, const std::set<int64_t>& registered,
                  const std::vector<int>& full) {
  std::set<int64_t> pending;
  int64_t consumed = 0;
  for (auto it = full.rbegin(); it != full.rend(); ++it) {
    const Edge& pe = g.edges[*it];
    if (pe.decision != Decision::Authorized || pe.user != target.user ||
        pe.account != target.account)
      continue;
    if (pe.request.action == ar.auth_action) {
      if (const ParamValue* tid = pe.request.params.find(ar.link_key))
        pending.insert(tid->as_int());
    } else if (pe.request.action == ar.forms_action) {
      const ParamValue* tid = pe.request.params.find(ar.link_key);
      const ParamValue* dest = pe.request.params.find(ar.dest_key);
      const ParamValue* val = pe.request.params.find(ar.value_key);
      if (!tid || !dest || !val) continue;
      if ((registered.count(dest->as_int()) != 0) != ar.registered) continue;
      if (!pending.count(tid->as_int())) continue;
      consumed += val->as_int();
      pending.erase(tid->as_int());
    }
  }
  return consumed;
}

constexpr int64_t kNoForm = std::numeric_limits<int64_t>::min();

/// Forward dynamic program equivalent to scan_path on every acyclic path.
/// State: per link id, the value of the latest form not yet consumed by an
/// authorization. Keeps the maximum accumulated sum per (node, state).
struct AccumEntry {
  int node = 0;
  std::vector<int64_t> forms;  // per link id; kNoForm when none pending
  int64_t consumed = 0;
  int parent = -1;
  int via_edge = -1;
};

struct AccumDp {
  std::vector<AccumEntry> entries;
  std::vector<std::map<std::vector<int64_t>, int>> at_node;
  bool overflow = false;
};

AccumDp accum_dp(const StateGraph& g, const AccumulationRule& ar,
                 const std::string& user, int64_t account,
                 const std::set<int64_t>& registered,
                 const std::vector<int64_t>& tids,
                 const std::vector<int>& topo) {
  AccumDp dp;
  dp.at_node.resize(g.states.size());
  AccumEntry root;
  root.node = g.root;
  root.forms.assign(tids.size(), kNoForm);
  dp.entries.push_back(root);
  dp.at_node[g.root][dp.entries[0].forms] = 0;

  auto tid_index = [&](int64_t tid) {
    auto it = std::lower_bound(tids.begin(), tids.end(), tid);
    return it != tids.end() && *it == tid
               ? static_cast<int>(it - tids.begin())
               : -1;
  };

  for (int node : topo) {
    std::vector<int> ids;
    for (const auto& [forms, id] : dp.at_node[node]) {
      (void)forms;
      ids.push_back(id);
    }
    for (int id : ids) {
      for (int ei : g.out[node]) {
        const Edge& e = g.edges[ei];
        AccumEntry next;
        next.node = e.to;
        next.forms = dp.entries[id].forms;
        next.consumed = dp.entries[id].consumed;
        next.parent = id;
        next.via_edge = ei;
        if (e.decision == Decision::Authorized && e.user == user &&
            e.account == account) {
          if (e.request.action == ar.auth_action) {
            if (const ParamValue* tid = e.request.params.find(ar.link_key)) {
              int ti = tid_index(tid->as_int());
              if (ti >= 0 && next.forms[ti] != kNoForm) {
                next.consumed += next.forms[ti];
                next.forms[ti] = kNoForm;
              }
            }
          } else if (e.request.action == ar.forms_action) {
            const ParamValue* tid = e.request.params.find(ar.link_key);
            const ParamValue* dest = e.request.params.find(ar.dest_key);
            const ParamValue* val = e.request.params.find(ar.value_key);
            if (tid && dest && val &&
                (registered.count(dest->as_int()) != 0) == ar.registered) {
              int ti = tid_index(tid->as_int());
              if (ti >= 0) next.forms[ti] = val->as_int();
            }
          }
        }
        auto [it, fresh] = dp.at_node[e.to].try_emplace(
            next.forms, static_cast<int>(dp.entries.size()));
        if (fresh) {
          dp.entries.push_back(std::move(next));
          if (dp.entries.size() > 200000) {
            dp.overflow = true;
            return dp;
          }
        } else if (next.consumed > dp.entries[it->second].consumed) {
          int keep = it->second;
          next.forms = dp.entries[keep].forms;
          dp.entries[keep] = std::move(next);
        }
      }
    }
  }
  return dp;
}

std::vector<int> accum_path(const AccumDp& dp, int entry) {
  std::vector<int> path;
  for (int id = entry; dp.entries[id].via_edge >= 0;
       id = dp.entries[id].parent)
    path.push_back(dp.entries[id].via_edge);
  std::reverse(path.begin(), path.end());
  return path;
}

/// Path-enumeration fallback for cyclic graphs and state blowups.
void check_accumulation_paths(const StateGraph& g, const Rule& rule,
                              const AccumulationRule& ar, std::size_t ei,
                              std::size_t max_paths, CheckResult& out) {
  const Edge& e = g.edges[ei];
  std::set<int64_t> registered = registered_set(g, ar, e.account);
  PathSet ps = acyclic_paths_to_root(g, e.from, max_paths);
  out.partial = out.partial || ps.truncated;
  int64_t best = -1;
  std::vector<int> best_path;
  for (const auto& path : ps.paths) {
    std::vector<int> full = with_edge(path, static_cast<int>(ei));
    int64_t consumed = scan_path(g, ar, e, registered, full);
    if (consumed > best) {
      best = consumed;
      best_path = std::move(full);
    }
  }
  if (best > ar.limit)
    out.violations.push_back({e.to, rule.id, std::move(best_path), best});
}

}  // namespace

CheckResult check_accumulation(const StateGraph& g, const Rule& rule,
                               std::size_t max_paths) {
  CheckResult out;
  const auto& ar = std::get<AccumulationRule>(rule.body);

  std::set<int> cyclic_nodes;
  for (const auto& comp : cyclic_sccs(successors(g)))
    cyclic_nodes.insert(comp.begin(), comp.end());

  // Topological order via incoming-edge counts; empty when cyclic.
  std::vector<int> topo;
  if (cyclic_nodes.empty()) {
    std::vector<std::size_t> indeg(g.states.size());
    for (std::size_t n = 0; n < g.states.size(); ++n)
      indeg[n] = g.in[n].size();
    for (std::size_t n = 0; n < g.states.size(); ++n)
      if (indeg[n] == 0) topo.push_back(static_cast<int>(n));
    for (std::size_t i = 0; i < topo.size(); ++i)
      for (int ei : g.out[topo[i]])
        if (--indeg[g.edges[ei].to] == 0) topo.push_back(g.edges[ei].to);
  }

  std::set<int64_t> tid_set;
  for (const Edge& e : g.edges)
    if (const ParamValue* tid = e.request.params.find(ar.link_key))
      if (tid->kind() == ValueKind::Int) tid_set.insert(tid->as_int());
  std::vector<int64_t> tids(tid_set.begin(), tid_set.end());

  std::map<std::pair<std::string, int64_t>, AccumDp> memo;
  for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
    const Edge& e = g.edges[ei];
    if (e.request.action != ar.auth_action ||
        e.decision != Decision::Authorized)
      continue;

    if (cyclic_nodes.count(e.to)) {
      out.violations.push_back(
          {e.to, rule.id, shortest_path_from_root(g, e.to), {}});
      continue;
    }
    if (!cyclic_nodes.empty() || tids.size() > 12) {
      check_accumulation_paths(g, rule, ar, ei, max_paths, out);
      continue;
    }

    auto [mit, fresh] = memo.try_emplace({e.user, e.account});
    if (fresh)
      mit->second = accum_dp(g, ar, e.user, e.account,
                             registered_set(g, ar, e.account), tids, topo);
    const AccumDp& dp = mit->second;
    if (dp.overflow) {
      check_accumulation_paths(g, rule, ar, ei, max_paths, out);
      continue;
    }

    const ParamValue* target_tid = e.request.params.find(ar.link_key);
    int64_t best = -1;
    int best_entry = -1;
    for (const auto& [forms, id] : dp.at_node[e.from]) {
      int64_t cand = dp.entries[id].consumed;
      if (target_tid && target_tid->kind() == ValueKind::Int) {
        auto it = std::lower_bound(tids.begin(), tids.end(),
                                   target_tid->as_int());
        if (it != tids.end() && *it == target_tid->as_int()) {
          int64_t pending = forms[it - tids.begin()];
          if (pending != kNoForm) cand += pending;
        }
      }
      if (cand > best) {
        best = cand;
        best_entry = id;
      }
    }
    if (best > ar.limit && best_entry >= 0)
      out.violations.push_back(
          {e.to, rule.id,
           with_edge(accum_path(dp, best_entry), static_cast<int>(ei)),
           best});
  }
  return out;
}

CheckResult check_rule(const StateGraph& g, const Rule& rule,
                       std::size_t max_paths) {
  if (std::holds_alternative<AccumulationRule>(rule.body))
    return check_accumulation(g, rule, max_paths);
  CheckResult out;
  if (const auto* pr = std::get_if<PrecedenceRule>(&rule.body))
    check_precedence(g, rule, *pr, out);
  else if (const auto* rr = std::get_if<ResponseRule>(&rule.body))
    check_response(g, rule, *rr, max_paths, out);
  else if (const auto* ts = std::get_if<ThreeStrikesRule>(&rule.body))
    check_strikes(g, rule, *ts, out);
  return out;
}

}  // namespace wfsec

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

#include "wfsec/workload.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "wfsec/policy_parse.hpp"

namespace wfsec {

namespace {

struct Scanner {
  explicit Scanner(const std::string& text) : text_(text) {}

  void skip_ws() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (c == '\n') {
        ++line_;
        col_ = 1;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++col_;
        ++pos_;
      } else {
        break;
      }
    }
  }

  bool eof() {
    skip_ws();
    return pos_ >= text_.size();
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(msg, line_, col_);
  }

  std::string ident() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_')) {
      ++pos_;
      ++col_;
    }
    if (start == pos_) fail("expected an identifier");
    return text_.substr(start, pos_ - start);
  }

  int64_t integer() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < text_.size() && text_[pos_] == '-') {
      ++pos_;
      ++col_;
    }
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
      ++col_;
    }
    if (start == pos_ || text_[pos_ - 1] == '-') fail("expected an integer");
    return std::stoll(text_.substr(start, pos_ - start));
  }

  std::string string_lit() {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != '"')
      fail("expected a string literal");
    ++pos_;
    ++col_;
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\n') fail("newline in string literal");
      out += text_[pos_];
      ++pos_;
      ++col_;
    }
    if (pos_ >= text_.size()) fail("unterminated string literal");
    ++pos_;
    ++col_;
    return out;
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c)
      fail(std::string("expected '") + c + "'");
    ++pos_;
    ++col_;
  }

  void keyword(const std::string& kw) {
    if (ident() != kw) fail("expected keyword \"" + kw + "\"");
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

ReqTemplate parse_request(Scanner& sc) {
  ReqTemplate tpl;
  tpl.action = sc.ident();
  sc.expect('{');
  bool first = true;
  while (sc.peek() != '}') {
    if (!first) sc.expect(',');
    first = false;
    std::string key = sc.ident();
    sc.expect('=');
    char c = sc.peek();
    if (c == '@') {
      sc.expect('@');
      if (key != "sess") sc.fail("'@' is only valid for the \"sess\" key");
      tpl.bind_session = true;
    } else if (c == '"') {
      tpl.params.set(key, ParamValue(sc.string_lit()));
    } else {
      tpl.params.set(key, ParamValue(sc.integer()));
    }
  }
  sc.expect('}');
  return tpl;
}

WorkloadClient parse_client(Scanner& sc) {
  WorkloadClient cl;
  cl.id = static_cast<int>(sc.integer());
  sc.keyword("user");
  cl.user = sc.string_lit();
  sc.keyword("account");
  cl.account = sc.integer();
  std::string order = sc.ident();
  if (order == "free_order")
    cl.free_order = true;
  else if (order == "ordered")
    cl.free_order = false;
  else
    sc.fail("expected \"free_order\" or \"ordered\"");
  sc.expect('{');
  while (sc.peek() != '}') cl.requests.push_back(parse_request(sc));
  sc.expect('}');
  return cl;
}

}  // namespace

Workload parse_workload(const std::string& text) {
  Scanner sc(text);
  Workload w;
  sc.keyword("workload");
  w.name = sc.ident();
  while (!sc.eof()) {
    std::string kw = sc.ident();
    if (kw == "stop_on_deny") {
      std::string v = sc.ident();
      if (v == "true")
        w.stop_on_deny = true;
      else if (v == "false")
        w.stop_on_deny = false;
      else
        sc.fail("expected true or false");
    } else if (kw == "client") {
      WorkloadClient cl = parse_client(sc);
      if (!w.clients.emplace(cl.id, std::move(cl)).second)
        sc.fail("duplicate client id");
    } else {
      sc.fail("expected \"client\" or \"stop_on_deny\"");
    }
  }
  if (w.clients.empty()) sc.fail("workload declares no clients");
  return w;
}

Workload load_workload(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read workload file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_workload(buf.str());
}

SystemState initial_state(const PolicySpec& policy, const Workload& w) {
  SystemState s;
  s.account_task_params = policy.initial_account_params;
  // Materialize every clearance so that later writes of the same level do
  // not make semantically equal states canonically distinct.
  for (const auto& user : policy.users)
    for (int64_t account : policy.accounts)
      for (const auto& task : policy.tasks)
        s.clearances[{user, account, task}] =
            policy.initial_clearance(user, account, task);
  for (const auto& [id, cl] : w.clients) {
    ClientQueue q;
    q.user = cl.user;
    q.account = cl.account;
    q.remaining = cl.requests;
    if (!q.remaining.empty()) s.client_queues[id] = std::move(q);
  }
  return s;
}

}  // namespace wfsec

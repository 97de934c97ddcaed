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

#include "wfsec/policy_parse.hpp"

#include <cctype>
#include <sstream>
#include <utility>

namespace wfsec {

const char* to_string(ExprType t) {
  switch (t) {
    case ExprType::Int:
      return "int";
    case ExprType::Text:
      return "text";
    case ExprType::IntSet:
      return "intset";
    case ExprType::TextSet:
      return "textset";
    case ExprType::Bool:
      return "bool";
  }
  return "?";
}

ExprPtr make_expr(Expr::Op op, ExprType type, std::vector<ExprPtr> args,
                  std::string text) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->type = type;
  e->args = std::move(args);
  e->text = std::move(text);
  return e;
}

ExprPtr make_int(int64_t v) {
  auto e = std::make_shared<Expr>();
  e->op = Expr::Op::LitInt;
  e->type = ExprType::Int;
  e->int_val = v;
  return e;
}

ExprPtr make_text(std::string v) {
  auto e = std::make_shared<Expr>();
  e->op = Expr::Op::LitText;
  e->type = ExprType::Text;
  e->text = std::move(v);
  return e;
}

ExprPtr make_bool(bool v) {
  auto e = std::make_shared<Expr>();
  e->op = Expr::Op::LitBool;
  e->type = ExprType::Bool;
  e->bool_val = v;
  return e;
}

ExprPtr make_int_set(std::set<int64_t> v) {
  auto e = std::make_shared<Expr>();
  e->op = Expr::Op::LitIntSet;
  e->type = ExprType::IntSet;
  e->int_set = std::move(v);
  return e;
}

ExprPtr make_text_set(std::set<std::string> v) {
  auto e = std::make_shared<Expr>();
  e->op = Expr::Op::LitTextSet;
  e->type = ExprType::TextSet;
  e->text_set = std::move(v);
  return e;
}

namespace {

struct Token {
  enum class Kind { Ident, Int, String, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  int64_t int_val = 0;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& cur() const { return cur_; }

  void advance() {
    skip_ws();
    cur_ = Token{};
    cur_.line = line_;
    cur_.col = col_;
    if (pos_ >= src_.size()) {
      cur_.kind = Token::Kind::End;
      return;
    }
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string word;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_')) {
        word += take();
      }
      cur_.kind = Token::Kind::Ident;
      cur_.text = std::move(word);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string num;
      while (pos_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_])))
        num += take();
      cur_.kind = Token::Kind::Int;
      cur_.int_val = std::stoll(num);
      return;
    }
    if (c == '"') {
      take();
      std::string out;
      while (pos_ < src_.size() && src_[pos_] != '"') {
        if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) take();
        out += take();
      }
      if (pos_ >= src_.size()) fail("unterminated string literal");
      take();
      cur_.kind = Token::Kind::String;
      cur_.text = std::move(out);
      return;
    }
    // Multi-char operators first.
    for (const char* op : {"<=", ">=", "!="}) {
      if (src_.compare(pos_, 2, op) == 0) {
        take();
        take();
        cur_.kind = Token::Kind::Punct;
        cur_.text = op;
        return;
      }
    }
    if (std::string("{}[](),=+-*<>").find(c) != std::string::npos) {
      take();
      cur_.kind = Token::Kind::Punct;
      cur_.text = std::string(1, c);
      return;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, cur_.line, cur_.col);
  }

 private:
  char take() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_ws() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') take();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        take();
      } else {
        break;
      }
    }
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token cur_;
};

class Parser {
 public:
  explicit Parser(const std::string& src) : lex_(src) {}

  PolicySpec parse() {
    while (!at_end()) {
      if (eat_ident("task")) {
        policy_.tasks.insert(expect_name());
      } else if (eat_ident("users")) {
        do policy_.users.push_back(expect_name());
        while (cur().kind == Token::Kind::Ident && !is_decl_keyword());
      } else if (eat_ident("accounts")) {
        do policy_.accounts.push_back(expect_int());
        while (cur().kind == Token::Kind::Int);
      } else if (eat_ident("init")) {
        parse_init();
      } else if (eat_ident("action")) {
        parse_action();
      } else {
        fail("expected a declaration (task/users/accounts/init/action)");
      }
    }
    if (policy_.tasks.empty()) fail("policy declares no tasks");
    return std::move(policy_);
  }

 private:
  // ---- declarations ----

  bool is_decl_keyword() const {
    const std::string& w = cur().text;
    return w == "task" || w == "users" || w == "accounts" || w == "init" ||
           w == "action";
  }

  void parse_init() {
    if (eat_ident("account")) {
      int64_t acc = expect_int();
      expect_ident("task");
      std::string task = expect_task_name();
      expect_punct("{");
      ParamSet params;
      while (!eat_punct("}")) {
        std::string key = expect_string();
        expect_punct("=");
        params.set(key, parse_param_literal());
        eat_punct(",");
      }
      policy_.initial_account_params[{acc, task}] = std::move(params);
    } else if (eat_ident("clearance")) {
      std::string user = expect_name();
      int64_t acc = expect_int();
      std::string task = expect_task_name();
      expect_punct("=");
      policy_.clearance_overrides[{user, acc, task}] =
          Clearance{expect_signed_int()};
    } else {
      fail("expected 'account' or 'clearance' after 'init'");
    }
  }

  ParamValue parse_param_literal() {
    if (cur().kind == Token::Kind::Int) return ParamValue(expect_int());
    if (cur().kind == Token::Kind::String) return ParamValue(expect_string());
    if (eat_punct("-")) return ParamValue(-expect_int());
    if (eat_ident("intset")) {
      expect_punct("{");
      std::set<int64_t> xs;
      while (!eat_punct("}")) {
        xs.insert(expect_signed_int());
        eat_punct(",");
      }
      return ParamValue(std::move(xs));
    }
    if (eat_ident("textset")) {
      expect_punct("{");
      std::set<std::string> xs;
      while (!eat_punct("}")) {
        xs.insert(expect_string());
        eat_punct(",");
      }
      return ParamValue(std::move(xs));
    }
    fail("expected a parameter literal");
  }

  void parse_action() {
    ActionSpec act;
    act.name = expect_name();
    if (policy_.actions.count(act.name))
      fail("duplicate action \"" + act.name + "\"");
    expect_ident("task");
    act.task = expect_task_name();
    expect_ident("clearance");
    act.required_clearance = Clearance{expect_signed_int()};
    expect_punct("{");
    if (eat_ident("constraint")) {
      ExprPtr c = parse_expr();
      require_type(*c, ExprType::Bool, "constraint");
      act.constraint = c;
    }
    while (!eat_punct("}")) {
      bool authorized;
      if (eat_ident("on_authorized"))
        authorized = true;
      else if (eat_ident("on_denied"))
        authorized = false;
      else
        fail("expected 'on_authorized', 'on_denied' or '}'");
      VariantSpec& v = authorized ? act.on_authorized : act.on_denied;
      expect_punct("{");
      while (!eat_punct("}")) {
        if (eat_ident("account_update")) {
          set_slot(v.account_update, parse_stmts(Slot::Account), "account_update");
        } else if (eat_ident("clearance_update")) {
          set_slot(v.clearance_update, parse_stmts(Slot::Clearance),
                   "clearance_update");
        } else if (eat_ident("session_update")) {
          set_slot(v.session_update, parse_stmts(Slot::Session),
                   "session_update");
        } else {
          fail("expected an update slot name or '}'");
        }
      }
    }
    policy_.actions.emplace(act.name, std::move(act));
  }

  void set_slot(std::optional<UpdateBlock>& slot, UpdateBlock block,
                const char* name) {
    if (slot) fail(std::string("duplicate slot ") + name);
    slot = std::move(block);
  }

  enum class Slot { Account, Clearance, Session };

  UpdateBlock parse_stmts(Slot slot) {
    expect_punct("{");
    UpdateBlock block;
    while (!eat_punct("}")) {
      UpdateStmt st;
      if (eat_ident("set")) {
        if (eat_ident("task")) {
          if (slot != Slot::Account)
            fail("'set task' only allowed in account_update");
          st.kind = UpdateStmt::Kind::SetTaskParam;
          st.task = expect_task_name();
          expect_punct("[");
          st.key = parse_expr();
          require_type(*st.key, ExprType::Text, "parameter key");
          expect_punct("]");
          expect_punct("=");
          st.value = parse_expr();
          require_value_type(*st.value, "task parameter value");
        } else if (eat_ident("clearance")) {
          if (slot != Slot::Clearance)
            fail("'set clearance' only allowed in clearance_update");
          st.kind = UpdateStmt::Kind::SetClearance;
          st.task = expect_task_name();
          expect_punct("=");
          st.value = parse_expr();
          require_type(*st.value, ExprType::Int, "clearance value");
        } else if (eat_ident("sess")) {
          if (slot != Slot::Session)
            fail("'set sess' only allowed in session_update");
          st.kind = UpdateStmt::Kind::SetSessParam;
          expect_punct("[");
          st.key = parse_expr();
          require_type(*st.key, ExprType::Text, "parameter key");
          expect_punct("]");
          expect_punct("=");
          st.value = parse_expr();
          require_value_type(*st.value, "session parameter value");
        } else {
          fail("expected 'task', 'clearance' or 'sess' after 'set'");
        }
      } else if (eat_ident("open_session")) {
        if (slot != Slot::Session)
          fail("'open_session' only allowed in session_update");
        st.kind = UpdateStmt::Kind::OpenSession;
        expect_punct("(");
        st.user_expr = parse_expr();
        require_type(*st.user_expr, ExprType::Text, "session user");
        expect_punct(",");
        st.account_expr = parse_expr();
        require_type(*st.account_expr, ExprType::Int, "session account");
        expect_punct(")");
      } else if (eat_ident("close_session")) {
        if (slot != Slot::Session)
          fail("'close_session' only allowed in session_update");
        st.kind = UpdateStmt::Kind::CloseSession;
      } else {
        fail("expected an update statement or '}'");
      }
      block.push_back(std::move(st));
    }
    return block;
  }

  // ---- expressions ----

  ExprPtr parse_expr() { return parse_or(); }

  ExprPtr parse_or() {
    ExprPtr lhs = parse_and();
    while (eat_ident("or")) {
      require_type(*lhs, ExprType::Bool, "'or' operand");
      ExprPtr rhs = parse_and();
      require_type(*rhs, ExprType::Bool, "'or' operand");
      lhs = make_expr(Expr::Op::Or, ExprType::Bool, {lhs, rhs});
    }
    return lhs;
  }

  ExprPtr parse_and() {
    ExprPtr lhs = parse_not();
    while (eat_ident("and")) {
      require_type(*lhs, ExprType::Bool, "'and' operand");
      ExprPtr rhs = parse_not();
      require_type(*rhs, ExprType::Bool, "'and' operand");
      lhs = make_expr(Expr::Op::And, ExprType::Bool, {lhs, rhs});
    }
    return lhs;
  }

  ExprPtr parse_not() {
    if (eat_ident("not")) {
      ExprPtr e = parse_not();
      require_type(*e, ExprType::Bool, "'not' operand");
      return make_expr(Expr::Op::Not, ExprType::Bool, {e});
    }
    return parse_cmp();
  }

  ExprPtr parse_cmp() {
    ExprPtr lhs = parse_add();
    Expr::Op op;
    if (eat_punct("="))
      op = Expr::Op::Eq;
    else if (eat_punct("!="))
      op = Expr::Op::Ne;
    else if (eat_punct("<="))
      op = Expr::Op::Le;
    else if (eat_punct(">="))
      op = Expr::Op::Ge;
    else if (eat_punct("<"))
      op = Expr::Op::Lt;
    else if (eat_punct(">"))
      op = Expr::Op::Gt;
    else
      return lhs;
    ExprPtr rhs = parse_add();
    if (lhs->type != rhs->type)
      fail(std::string("cannot compare ") + to_string(lhs->type) + " with " +
           to_string(rhs->type));
    bool ordering = op != Expr::Op::Eq && op != Expr::Op::Ne;
    if (ordering && lhs->type != ExprType::Int)
      fail("ordering comparison requires int operands");
    if (!ordering && lhs->type == ExprType::Bool)
      fail("equality on booleans is not supported");
    return make_expr(op, ExprType::Bool, {lhs, rhs});
  }

  ExprPtr parse_add() {
    ExprPtr lhs = parse_mul();
    for (;;) {
      Expr::Op op;
      if (eat_punct("+"))
        op = Expr::Op::Add;
      else if (eat_punct("-"))
        op = Expr::Op::Sub;
      else
        break;
      require_type(*lhs, ExprType::Int, "arithmetic operand");
      ExprPtr rhs = parse_mul();
      require_type(*rhs, ExprType::Int, "arithmetic operand");
      lhs = make_expr(op, ExprType::Int, {lhs, rhs});
    }
    return lhs;
  }

  ExprPtr parse_mul() {
    ExprPtr lhs = parse_unary();
    for (;;) {
      Expr::Op op;
      if (eat_punct("*"))
        op = Expr::Op::Mul;
      else if (cur().kind == Token::Kind::Ident && cur().text == "div") {
        lex_.advance();
        op = Expr::Op::Div;
      } else
        break;
      require_type(*lhs, ExprType::Int, "arithmetic operand");
      ExprPtr rhs = parse_unary();
      require_type(*rhs, ExprType::Int, "arithmetic operand");
      lhs = make_expr(op, ExprType::Int, {lhs, rhs});
    }
    return lhs;
  }

  ExprPtr parse_unary() {
    if (eat_punct("-")) {
      ExprPtr e = parse_unary();
      require_type(*e, ExprType::Int, "negation operand");
      if (e->op == Expr::Op::LitInt) return make_int(-e->int_val);
      return make_expr(Expr::Op::Neg, ExprType::Int, {e});
    }
    return parse_primary();
  }

  ExprPtr parse_param_ref(Expr::Op op, std::string task_name = {}) {
    expect_punct("(");
    ExprPtr key = parse_expr();
    require_type(*key, ExprType::Text, "parameter key");
    expect_punct(",");
    ExprPtr def = parse_expr();
    require_value_type(*def, "parameter default");
    expect_punct(")");
    return make_expr(op, def->type, {key, def}, std::move(task_name));
  }

  ExprPtr parse_primary() {
    if (cur().kind == Token::Kind::Int) return make_int(expect_int());
    if (cur().kind == Token::Kind::String) return make_text(expect_string());
    if (eat_punct("(")) {
      ExprPtr e = parse_expr();
      expect_punct(")");
      return e;
    }
    if (cur().kind != Token::Kind::Ident) fail("expected an expression");
    std::string word = cur().text;
    // keyword forms
    if (word == "true" || word == "false") {
      lex_.advance();
      return make_bool(word == "true");
    }
    if (word == "intset") {
      lex_.advance();
      expect_punct("{");
      std::set<int64_t> xs;
      while (!eat_punct("}")) {
        xs.insert(expect_signed_int());
        eat_punct(",");
      }
      return make_int_set(std::move(xs));
    }
    if (word == "textset") {
      lex_.advance();
      expect_punct("{");
      std::set<std::string> xs;
      while (!eat_punct("}")) {
        xs.insert(expect_string());
        eat_punct(",");
      }
      return make_text_set(std::move(xs));
    }
    if (word == "req") {
      lex_.advance();
      return parse_param_ref(Expr::Op::ParamReq);
    }
    if (word == "sess") {
      lex_.advance();
      return parse_param_ref(Expr::Op::ParamSess);
    }
    if (word == "task") {
      lex_.advance();
      return parse_param_ref(Expr::Op::ParamTask);
    }
    if (word == "taskof") {
      lex_.advance();
      expect_punct("(");
      std::string task = expect_task_name();
      expect_punct(",");
      ExprPtr key = parse_expr();
      require_type(*key, ExprType::Text, "parameter key");
      expect_punct(",");
      ExprPtr def = parse_expr();
      require_value_type(*def, "parameter default");
      expect_punct(")");
      return make_expr(Expr::Op::ParamTaskOf, def->type, {key, def},
                       std::move(task));
    }
    if (word == "user") {
      lex_.advance();
      expect_punct("(");
      expect_punct(")");
      return make_expr(Expr::Op::User, ExprType::Text, {});
    }
    if (word == "account") {
      lex_.advance();
      expect_punct("(");
      expect_punct(")");
      return make_expr(Expr::Op::Account, ExprType::Int, {});
    }
    if (word == "member") {
      lex_.advance();
      expect_punct("(");
      ExprPtr elem = parse_expr();
      expect_punct(",");
      ExprPtr set = parse_expr();
      expect_punct(")");
      check_set_elem(*set, *elem);
      return make_expr(Expr::Op::Member, ExprType::Bool, {elem, set});
    }
    if (word == "insert" || word == "remove") {
      lex_.advance();
      Expr::Op op = word == "insert" ? Expr::Op::Insert : Expr::Op::Remove;
      expect_punct("(");
      ExprPtr set = parse_expr();
      expect_punct(",");
      ExprPtr elem = parse_expr();
      expect_punct(")");
      check_set_elem(*set, *elem);
      return make_expr(op, set->type, {set, elem});
    }
    if (word == "size") {
      lex_.advance();
      expect_punct("(");
      ExprPtr set = parse_expr();
      expect_punct(")");
      if (set->type != ExprType::IntSet && set->type != ExprType::TextSet)
        fail("size() requires a set argument");
      return make_expr(Expr::Op::Size, ExprType::Int, {set});
    }
    if (word == "concat") {
      lex_.advance();
      expect_punct("(");
      ExprPtr a = parse_expr();
      require_type(*a, ExprType::Text, "concat operand");
      expect_punct(",");
      ExprPtr b = parse_expr();
      require_type(*b, ExprType::Text, "concat operand");
      expect_punct(")");
      return make_expr(Expr::Op::Concat, ExprType::Text, {a, b});
    }
    if (word == "to_text") {
      lex_.advance();
      expect_punct("(");
      ExprPtr a = parse_expr();
      require_type(*a, ExprType::Int, "to_text operand");
      expect_punct(")");
      return make_expr(Expr::Op::ToText, ExprType::Text, {a});
    }
    if (word == "if") {
      lex_.advance();
      ExprPtr cond = parse_expr();
      require_type(*cond, ExprType::Bool, "if condition");
      expect_ident("then");
      ExprPtr then = parse_expr();
      expect_ident("else");
      ExprPtr els = parse_expr();
      if (then->type != els->type) fail("if branches have different types");
      return make_expr(Expr::Op::If, then->type, {cond, then, els});
    }
    if (word == "let") {
      lex_.advance();
      std::string name = expect_name();
      expect_punct("=");
      ExprPtr bound = parse_expr();
      expect_ident("in");
      vars_.emplace_back(name, bound->type);
      ExprPtr body = parse_expr();
      vars_.pop_back();
      return make_expr(Expr::Op::Let, body->type, {bound, body},
                       std::move(name));
    }
    // plain variable reference
    for (auto it = vars_.rbegin(); it != vars_.rend(); ++it) {
      if (it->first == word) {
        lex_.advance();
        return make_expr(Expr::Op::Var, it->second, {}, word);
      }
    }
    fail("unknown identifier \"" + word + "\"");
  }

  void check_set_elem(const Expr& set, const Expr& elem) {
    if (set.type == ExprType::IntSet && elem.type == ExprType::Int) return;
    if (set.type == ExprType::TextSet && elem.type == ExprType::Text) return;
    fail(std::string("set operation type mismatch: ") + to_string(set.type) +
         " vs " + to_string(elem.type));
  }

  // ---- token helpers ----

  const Token& cur() const { return lex_.cur(); }
  bool at_end() const { return cur().kind == Token::Kind::End; }

  bool eat_ident(const char* word) {
    if (cur().kind == Token::Kind::Ident && cur().text == word) {
      lex_.advance();
      return true;
    }
    return false;
  }

  void expect_ident(const char* word) {
    if (!eat_ident(word)) fail(std::string("expected '") + word + "'");
  }

  bool eat_punct(const char* p) {
    if (cur().kind == Token::Kind::Punct && cur().text == p) {
      lex_.advance();
      return true;
    }
    return false;
  }

  void expect_punct(const char* p) {
    if (!eat_punct(p)) fail(std::string("expected '") + p + "'");
  }

  std::string expect_name() {
    if (cur().kind != Token::Kind::Ident) fail("expected a name");
    std::string n = cur().text;
    lex_.advance();
    return n;
  }

  std::string expect_task_name() {
    Token tok = cur();
    std::string n = expect_name();
    if (!policy_.tasks.count(n))
      throw ParseError("unknown task \"" + n + "\"", tok.line, tok.col);
    return n;
  }

  int64_t expect_int() {
    if (cur().kind != Token::Kind::Int) fail("expected an integer");
    int64_t v = cur().int_val;
    lex_.advance();
    return v;
  }

  int64_t expect_signed_int() {
    if (eat_punct("-")) return -expect_int();
    return expect_int();
  }

  std::string expect_string() {
    if (cur().kind != Token::Kind::String) fail("expected a string literal");
    std::string s = cur().text;
    lex_.advance();
    return s;
  }

  void require_type(const Expr& e, ExprType t, const char* what) {
    if (e.type != t)
      fail(std::string(what) + " must be " + to_string(t) + ", got " +
           to_string(e.type));
  }

  void require_value_type(const Expr& e, const char* what) {
    if (e.type == ExprType::Bool)
      fail(std::string(what) + " cannot be boolean");
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, cur().line, cur().col);
  }

  Lexer lex_;
  PolicySpec policy_;
  std::vector<std::pair<std::string, ExprType>> vars_;
};

// ---- printer ----

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

void print_expr_rec(const Expr& e, std::string& out) {
  auto bin = [&](const char* op) {
    out += '(';
    print_expr_rec(*e.args[0], out);
    out += ' ';
    out += op;
    out += ' ';
    print_expr_rec(*e.args[1], out);
    out += ')';
  };
  auto call = [&](const char* name) {
    out += name;
    out += '(';
    for (std::size_t i = 0; i < e.args.size(); ++i) {
      if (i) out += ", ";
      print_expr_rec(*e.args[i], out);
    }
    out += ')';
  };
  switch (e.op) {
    case Expr::Op::LitInt:
      if (e.int_val < 0) {
        out += "(-" + std::to_string(-e.int_val) + ")";
      } else {
        out += std::to_string(e.int_val);
      }
      break;
    case Expr::Op::LitText:
      out += quoted(e.text);
      break;
    case Expr::Op::LitBool:
      out += e.bool_val ? "true" : "false";
      break;
    case Expr::Op::LitIntSet: {
      out += "intset{";
      bool first = true;
      for (int64_t x : e.int_set) {
        if (!first) out += ", ";
        first = false;
        if (x < 0)
          out += "-" + std::to_string(-x);
        else
          out += std::to_string(x);
      }
      out += '}';
      break;
    }
    case Expr::Op::LitTextSet: {
      out += "textset{";
      bool first = true;
      for (const auto& x : e.text_set) {
        if (!first) out += ", ";
        first = false;
        out += quoted(x);
      }
      out += '}';
      break;
    }
    case Expr::Op::ParamReq:
      call("req");
      break;
    case Expr::Op::ParamSess:
      call("sess");
      break;
    case Expr::Op::ParamTask:
      call("task");
      break;
    case Expr::Op::ParamTaskOf:
      out += "taskof(" + e.text + ", ";
      print_expr_rec(*e.args[0], out);
      out += ", ";
      print_expr_rec(*e.args[1], out);
      out += ')';
      break;
    case Expr::Op::User:
      out += "user()";
      break;
    case Expr::Op::Account:
      out += "account()";
      break;
    case Expr::Op::Add:
      bin("+");
      break;
    case Expr::Op::Sub:
      bin("-");
      break;
    case Expr::Op::Mul:
      bin("*");
      break;
    case Expr::Op::Div:
      bin("div");
      break;
    case Expr::Op::Neg:
      out += "(-";
      print_expr_rec(*e.args[0], out);
      out += ')';
      break;
    case Expr::Op::Eq:
      bin("=");
      break;
    case Expr::Op::Ne:
      bin("!=");
      break;
    case Expr::Op::Lt:
      bin("<");
      break;
    case Expr::Op::Le:
      bin("<=");
      break;
    case Expr::Op::Gt:
      bin(">");
      break;
    case Expr::Op::Ge:
      bin(">=");
      break;
    case Expr::Op::And:
      bin("and");
      break;
    case Expr::Op::Or:
      bin("or");
      break;
    case Expr::Op::Not:
      out += "(not ";
      print_expr_rec(*e.args[0], out);
      out += ')';
      break;
    case Expr::Op::Member:
      call("member");
      break;
    case Expr::Op::Insert:
      call("insert");
      break;
    case Expr::Op::Remove:
      call("remove");
      break;
    case Expr::Op::Size:
      call("size");
      break;
    case Expr::Op::Concat:
      call("concat");
      break;
    case Expr::Op::ToText:
      call("to_text");
      break;
    case Expr::Op::If:
      out += "(if ";
      print_expr_rec(*e.args[0], out);
      out += " then ";
      print_expr_rec(*e.args[1], out);
      out += " else ";
      print_expr_rec(*e.args[2], out);
      out += ')';
      break;
    case Expr::Op::Let:
      out += "(let " + e.text + " = ";
      print_expr_rec(*e.args[0], out);
      out += " in ";
      print_expr_rec(*e.args[1], out);
      out += ')';
      break;
    case Expr::Op::Var:
      out += e.text;
      break;
  }
}

void print_stmt(const UpdateStmt& st, std::string& out) {
  switch (st.kind) {
    case UpdateStmt::Kind::SetTaskParam:
      out += "set task " + st.task + "[";
      print_expr_rec(*st.key, out);
      out += "] = ";
      print_expr_rec(*st.value, out);
      break;
    case UpdateStmt::Kind::SetClearance:
      out += "set clearance " + st.task + " = ";
      print_expr_rec(*st.value, out);
      break;
    case UpdateStmt::Kind::OpenSession:
      out += "open_session(";
      print_expr_rec(*st.user_expr, out);
      out += ", ";
      print_expr_rec(*st.account_expr, out);
      out += ')';
      break;
    case UpdateStmt::Kind::CloseSession:
      out += "close_session";
      break;
    case UpdateStmt::Kind::SetSessParam:
      out += "set sess[";
      print_expr_rec(*st.key, out);
      out += "] = ";
      print_expr_rec(*st.value, out);
      break;
  }
}

void print_param_literal(const ParamValue& v, std::string& out) {
  switch (v.kind()) {
    case ValueKind::Int: {
      int64_t x = v.as_int();
      out += x < 0 ? "-" + std::to_string(-x) : std::to_string(x);
      break;
    }
    case ValueKind::Text:
      out += quoted(v.as_text());
      break;
    case ValueKind::IntSet: {
      out += "intset{";
      bool first = true;
      for (int64_t x : v.as_int_set()) {
        if (!first) out += ", ";
        first = false;
        out += x < 0 ? "-" + std::to_string(-x) : std::to_string(x);
      }
      out += '}';
      break;
    }
    case ValueKind::TextSet: {
      out += "textset{";
      bool first = true;
      for (const auto& x : v.as_text_set()) {
        if (!first) out += ", ";
        first = false;
        out += quoted(x);
      }
      out += '}';
      break;
    }
  }
}

void print_variant(const char* name, const VariantSpec& v, std::string& out) {
  if (v.empty()) return;
  out += std::string("  ") + name + " {\n";
  auto slot = [&](const char* slot_name,
                  const std::optional<UpdateBlock>& block) {
    if (!block) return;
    out += std::string("    ") + slot_name + " {\n";
    for (const auto& st : *block) {
      out += "      ";
      print_stmt(st, out);
      out += '\n';
    }
    out += "    }\n";
  };
  slot("account_update", v.account_update);
  slot("clearance_update", v.clearance_update);
  slot("session_update", v.session_update);
  out += "  }\n";
}

}  // namespace

PolicySpec parse_policy(const std::string& source) {
  return Parser(source).parse();
}

std::string print_expr(const Expr& e) {
  std::string out;
  print_expr_rec(e, out);
  return out;
}

std::string print_policy(const PolicySpec& policy) {
  std::string out;
  for (const auto& t : policy.tasks) out += "task " + t + "\n";
  if (!policy.users.empty()) {
    out += "users";
    for (const auto& u : policy.users) out += " " + u;
    out += '\n';
  }
  if (!policy.accounts.empty()) {
    out += "accounts";
    for (int64_t a : policy.accounts) out += " " + std::to_string(a);
    out += '\n';
  }
  for (const auto& [key, params] : policy.initial_account_params) {
    out += "init account " + std::to_string(key.first) + " task " +
           key.second + " {\n";
    for (const auto& [k, v] : params) {
      out += "  " + quoted(k) + " = ";
      print_param_literal(v, out);
      out += '\n';
    }
    out += "}\n";
  }
  for (const auto& [key, cl] : policy.clearance_overrides) {
    out += "init clearance " + std::get<0>(key) + " " +
           std::to_string(std::get<1>(key)) + " " + std::get<2>(key) + " = " +
           std::to_string(cl.level) + "\n";
  }
  for (const auto& [name, act] : policy.actions) {
    out += "action " + name + " task " + act.task + " clearance " +
           std::to_string(act.required_clearance.level) + " {\n";
    if (act.constraint) {
      out += "  constraint ";
      print_expr_rec(**act.constraint, out);
      out += '\n';
    }
    print_variant("on_authorized", act.on_authorized, out);
    print_variant("on_denied", act.on_denied, out);
    out += "}\n";
  }
  return out;
}

}  // namespace wfsec

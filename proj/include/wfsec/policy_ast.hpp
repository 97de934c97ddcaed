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

#ifndef WFSEC_POLICY_AST_HPP_
#define WFSEC_POLICY_AST_HPP_

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wfsec/params.hpp"

namespace wfsec {

/// Static type of a policy expression.
enum class ExprType { Int, Text, IntSet, TextSet, Bool };

const char* to_string(ExprType t);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable, typed policy expression tree.
struct Expr {
  enum class Op {
    LitInt,
    LitText,
    LitIntSet,
    LitTextSet,
    LitBool,
    ParamReq,     // args: key (Text), default
    ParamSess,    // args: key (Text), default
    ParamTask,    // args: key (Text), default     (the action's own task)
    ParamTaskOf,  // text = task name; args: key (Text), default
    User,
    Account,
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Not,
    Member,  // args: element, set
    Insert,  // args: set, element
    Remove,  // args: set, element
    Size,    // args: set
    Concat,  // args: Text, Text
    ToText,  // args: Int
    If,      // args: cond, then, else
    Let,     // text = name; args: bound, body
    Var,     // text = name
  };

  Op op;
  ExprType type = ExprType::Bool;
  int64_t int_val = 0;
  std::string text;
  std::set<int64_t> int_set;
  std::set<std::string> text_set;
  bool bool_val = false;
  std::vector<ExprPtr> args;
};

ExprPtr make_int(int64_t v);
ExprPtr make_text(std::string v);
ExprPtr make_bool(bool v);
ExprPtr make_int_set(std::set<int64_t> v);
ExprPtr make_text_set(std::set<std::string> v);
ExprPtr make_expr(Expr::Op op, ExprType type, std::vector<ExprPtr> args,
                  std::string text = {});

/// One update statement. The write target is structurally local: task-param
/// writes name no account and clearance writes name no (user, account), so a
/// block can never touch another account's data.
struct UpdateStmt {
  enum class Kind {
    SetTaskParam,  // task + key + value
    SetClearance,  // task + value (Int)
    OpenSession,   // user_expr (Text) + account_expr (Int)
    CloseSession,
    SetSessParam,  // key + value
  };
  Kind kind;
  std::string task;
  ExprPtr key;
  ExprPtr value;
  ExprPtr user_expr;
  ExprPtr account_expr;
};

using UpdateBlock = std::vector<UpdateStmt>;

/// The three optional update slots of one decision variant. An absent slot
/// is the identity function.
struct VariantSpec {
  std::optional<UpdateBlock> account_update;
  std::optional<UpdateBlock> clearance_update;
  std::optional<UpdateBlock> session_update;

  bool empty() const {
    return !account_update && !clearance_update && !session_update;
  }
};

struct ActionSpec {
  std::string name;
  std::string task;
  Clearance required_clearance;
  std::optional<ExprPtr> constraint;  // absent means constant true
  VariantSpec on_authorized;
  VariantSpec on_denied;
};

struct PolicySpec {
  std::set<std::string> tasks;
  std::map<std::string, ActionSpec> actions;
  std::vector<std::string> users;
  std::vector<int64_t> accounts;
  std::map<std::pair<int64_t, std::string>, ParamSet> initial_account_params;
  Clearance default_clearance{0};
  std::map<std::tuple<std::string, int64_t, std::string>, Clearance>
      clearance_overrides;

  Clearance initial_clearance(const std::string& user, int64_t account,
                              const std::string& task) const {
    auto it = clearance_overrides.find({user, account, task});
    return it == clearance_overrides.end() ? default_clearance : it->second;
  }
};

}  // namespace wfsec

#endif  // WFSEC_POLICY_AST_HPP_

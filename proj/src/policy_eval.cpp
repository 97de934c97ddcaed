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

#include "wfsec/policy_eval.hpp"

#include <variant>
#include <vector>

namespace wfsec {

namespace {

// Runtime value: the four parameter variants plus bool.
struct RtValue {
  std::variant<int64_t, std::string, std::set<int64_t>, std::set<std::string>,
               bool>
      v;

  int64_t as_int() const { return std::get<int64_t>(v); }
  bool as_bool() const { return std::get<bool>(v); }
  const std::string& as_text() const { return std::get<std::string>(v); }
};

RtValue from_param(const ParamValue& p) {
  switch (p.kind()) {
    case ValueKind::Int:
      return {p.as_int()};
    case ValueKind::Text:
      return {p.as_text()};
    case ValueKind::IntSet:
      return {p.as_int_set()};
    case ValueKind::TextSet:
      return {p.as_text_set()};
  }
  throw EvalError("corrupt parameter value");
}

ParamValue to_param(const RtValue& v) {
  if (std::holds_alternative<bool>(v.v))
    throw EvalError("boolean value cannot be stored as a parameter");
  if (auto* i = std::get_if<int64_t>(&v.v)) return ParamValue(*i);
  if (auto* s = std::get_if<std::string>(&v.v)) return ParamValue(*s);
  if (auto* is = std::get_if<std::set<int64_t>>(&v.v)) return ParamValue(*is);
  return ParamValue(std::get<std::set<std::string>>(v.v));
}

class Evaluator {
 public:
  explicit Evaluator(const EvalContext& ctx) : ctx_(ctx) {}

  RtValue eval(const Expr& e) {
    using Op = Expr::Op;
    switch (e.op) {
      case Op::LitInt:
        return {e.int_val};
      case Op::LitText:
        return {e.text};
      case Op::LitBool:
        return {e.bool_val};
      case Op::LitIntSet:
        return {e.int_set};
      case Op::LitTextSet:
        return {e.text_set};
      case Op::ParamReq:
        return param_ref(e, ctx_.request_params, "request");
      case Op::ParamSess:
        return param_ref(e, ctx_.session_params, "session");
      case Op::ParamTask:
        return task_ref(e, ctx_.task);
      case Op::ParamTaskOf:
        return task_ref(e, e.text);
      case Op::User:
        return {ctx_.user};
      case Op::Account:
        return {ctx_.account};
      case Op::Add:
        return {eval(*e.args[0]).as_int() + eval(*e.args[1]).as_int()};
      case Op::Sub:
        return {eval(*e.args[0]).as_int() - eval(*e.args[1]).as_int()};
      case Op::Mul:
        return {eval(*e.args[0]).as_int() * eval(*e.args[1]).as_int()};
      case Op::Div: {
        int64_t denom = eval(*e.args[1]).as_int();
        if (denom == 0) throw EvalError("division by zero");
        return {eval(*e.args[0]).as_int() / denom};
      }
      case Op::Neg:
        return {-eval(*e.args[0]).as_int()};
      case Op::Eq:
        return {eval(*e.args[0]).v == eval(*e.args[1]).v};
      case Op::Ne:
        return {eval(*e.args[0]).v != eval(*e.args[1]).v};
      case Op::Lt:
        return {eval(*e.args[0]).as_int() < eval(*e.args[1]).as_int()};
      case Op::Le:
        return {eval(*e.args[0]).as_int() <= eval(*e.args[1]).as_int()};
      case Op::Gt:
        return {eval(*e.args[0]).as_int() > eval(*e.args[1]).as_int()};
      case Op::Ge:
        return {eval(*e.args[0]).as_int() >= eval(*e.args[1]).as_int()};
      case Op::And:
        return {eval(*e.args[0]).as_bool() && eval(*e.args[1]).as_bool()};
      case Op::Or:
        return {eval(*e.args[0]).as_bool() || eval(*e.args[1]).as_bool()};
      case Op::Not:
        return {!eval(*e.args[0]).as_bool()};
      case Op::Member: {
        RtValue elem = eval(*e.args[0]);
        RtValue set = eval(*e.args[1]);
        if (auto* is = std::get_if<std::set<int64_t>>(&set.v))
          return {is->count(elem.as_int()) != 0};
        return {std::get<std::set<std::string>>(set.v).count(elem.as_text()) !=
                0};
      }
      case Op::Insert: {
        RtValue set = eval(*e.args[0]);
        RtValue elem = eval(*e.args[1]);
        if (auto* is = std::get_if<std::set<int64_t>>(&set.v)) {
          auto out = *is;
          out.insert(elem.as_int());
          return {std::move(out)};
        }
        auto out = std::get<std::set<std::string>>(set.v);
        out.insert(elem.as_text());
        return {std::move(out)};
      }
      case Op::Remove: {
        RtValue set = eval(*e.args[0]);
        RtValue elem = eval(*e.args[1]);
        if (auto* is = std::get_if<std::set<int64_t>>(&set.v)) {
          auto out = *is;
          out.erase(elem.as_int());
          return {std::move(out)};
        }
        auto out = std::get<std::set<std::string>>(set.v);
        out.erase(elem.as_text());
        return {std::move(out)};
      }
      case Op::Size: {
        RtValue set = eval(*e.args[0]);
        if (auto* is = std::get_if<std::set<int64_t>>(&set.v))
          return {static_cast<int64_t>(is->size())};
        return {static_cast<int64_t>(
            std::get<std::set<std::string>>(set.v).size())};
      }
      case Op::Concat:
        return {eval(*e.args[0]).as_text() + eval(*e.args[1]).as_text()};
      case Op::ToText:
        return {std::to_string(eval(*e.args[0]).as_int())};
      case Op::If:
        return eval(*e.args[0]).as_bool() ? eval(*e.args[1])
                                          : eval(*e.args[2]);
      case Op::Let: {
        lets_.emplace_back(e.text, eval(*e.args[0]));
        RtValue out = eval(*e.args[1]);
        lets_.pop_back();
        return out;
      }
      case Op::Var: {
        for (auto it = lets_.rbegin(); it != lets_.rend(); ++it)
          if (it->first == e.text) return it->second;
        throw EvalError("unbound variable \"" + e.text + "\"");
      }
    }
    throw EvalError("corrupt expression");
  }

 private:
  ParamValue default_of(const Expr& ref) {
    return to_param(eval(*ref.args[1]));
  }

  RtValue param_ref(const Expr& ref, const ParamSet* params,
                    const char* scope) {
    std::string key = eval(*ref.args[0]).as_text();
    ParamValue def = default_of(ref);
    if (!params) return from_param(def);
    try {
      return from_param(params->get(key, def));
    } catch (const TypeMismatchError& err) {
      throw EvalError(std::string(scope) + " parameter: " + err.what());
    }
  }

  RtValue task_ref(const Expr& ref, const std::string& task) {
    std::string key = eval(*ref.args[0]).as_text();
    ParamValue def = default_of(ref);
    const ParamSet* params = nullptr;
    if (ctx_.account_task_params) {
      auto it = ctx_.account_task_params->find(task);
      if (it != ctx_.account_task_params->end()) params = &it->second;
    }
    if (!params) return from_param(def);
    try {
      return from_param(params->get(key, def));
    } catch (const TypeMismatchError& err) {
      throw EvalError("task \"" + task + "\" parameter: " + err.what());
    }
  }

  const EvalContext& ctx_;
  std::vector<std::pair<std::string, RtValue>> lets_;
};

}  // namespace

bool eval_constraint(const Expr& e, const EvalContext& ctx) {
  RtValue v = Evaluator(ctx).eval(e);
  if (!std::holds_alternative<bool>(v.v))
    throw EvalError("constraint did not evaluate to a boolean");
  return v.as_bool();
}

ParamValue eval_value(const Expr& e, const EvalContext& ctx) {
  RtValue v = Evaluator(ctx).eval(e);
  if (std::holds_alternative<bool>(v.v))
    throw EvalError("expected a storable value, got a boolean");
  return to_param(v);
}

StateDelta eval_update(const UpdateBlock& block, const EvalContext& ctx) {
  StateDelta delta;
  for (const auto& st : block) {
    switch (st.kind) {
      case UpdateStmt::Kind::SetTaskParam: {
        std::string key = eval_value(*st.key, ctx).as_text();
        delta.task_param_writes[{st.task, key}] = eval_value(*st.value, ctx);
        break;
      }
      case UpdateStmt::Kind::SetClearance: {
        delta.clearance_writes[st.task] =
            Clearance{eval_value(*st.value, ctx).as_int()};
        break;
      }
      case UpdateStmt::Kind::OpenSession: {
        if (delta.open_session)
          throw EvalError("open_session used twice in one update");
        StateDelta::OpenSession open;
        open.user = eval_value(*st.user_expr, ctx).as_text();
        open.account = eval_value(*st.account_expr, ctx).as_int();
        delta.open_session = std::move(open);
        break;
      }
      case UpdateStmt::Kind::CloseSession:
        delta.close_session = true;
        break;
      case UpdateStmt::Kind::SetSessParam: {
        std::string key = eval_value(*st.key, ctx).as_text();
        delta.sess_param_writes.set(key, eval_value(*st.value, ctx));
        break;
      }
    }
  }
  return delta;
}

StateDelta eval_variant(const VariantSpec& variant, const EvalContext& ctx) {
  StateDelta delta;
  auto merge_block = [&](const std::optional<UpdateBlock>& block) {
    if (!block) return;
    StateDelta d = eval_update(*block, ctx);
    for (auto& [k, v] : d.task_param_writes)
      delta.task_param_writes[k] = std::move(v);
    for (auto& [k, v] : d.clearance_writes) delta.clearance_writes[k] = v;
    delta.close_session = delta.close_session || d.close_session;
    if (d.open_session) delta.open_session = std::move(d.open_session);
    delta.sess_param_writes = delta.sess_param_writes.merged(d.sess_param_writes);
  };
  merge_block(variant.account_update);
  merge_block(variant.clearance_update);
  merge_block(variant.session_update);
  return delta;
}

}  // namespace wfsec

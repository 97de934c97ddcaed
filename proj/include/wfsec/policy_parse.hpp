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

#ifndef WFSEC_POLICY_PARSE_HPP_
#define WFSEC_POLICY_PARSE_HPP_

#include <stdexcept>
#include <string>

#include "wfsec/policy_ast.hpp"

namespace wfsec {

/// Syntax or static type error, with a 1-based source position.
struct ParseError : std::runtime_error {
  ParseError(std::string msg, int line, int col)
      : std::runtime_error(msg + " at " + std::to_string(line) + ":" +
                           std::to_string(col)),
        line(line),
        col(col) {}
  int line;
  int col;
};

/// Parses and type-checks a policy. Throws ParseError with line/column.
PolicySpec parse_policy(const std::string& source);

/// Prints a policy back to source text that reparses to a structurally
/// equal PolicySpec.
std::string print_policy(const PolicySpec& policy);

std::string print_expr(const Expr& e);

}  // namespace wfsec

#endif  // WFSEC_POLICY_PARSE_HPP_

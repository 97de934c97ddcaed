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

#ifndef WFSEC_MESSAGE_HPP_
#define WFSEC_MESSAGE_HPP_

#include <string>

#include "wfsec/params.hpp"

namespace wfsec {

/// One request to the workflow server. `user` is the claimed identity; for
/// session-bound requests the session's identity wins.
struct RequestMsg {
  int client = 0;
  std::string user;
  std::string action;
  ParamSet params;

  bool operator==(const RequestMsg&) const = default;
  auto operator<=>(const RequestMsg&) const = default;
};

enum class Decision { Authorized, Denied, InvalidSession };

const char* to_string(Decision d);

struct ResponseMsg {
  RequestMsg request;
  Decision decision = Decision::Denied;
  ParamSet payload;

  bool operator==(const ResponseMsg&) const = default;
};

}  // namespace wfsec

#endif  // WFSEC_MESSAGE_HPP_

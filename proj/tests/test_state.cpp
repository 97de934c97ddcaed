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

#include "doctest.h"
#include "helpers.hpp"
#include "wfsec/state.hpp"

using namespace wfsec;

namespace {

SystemState sample_state() {
  SystemState s;
  s.next_session_id = 4;
  s.open_sessions[3] = {3, "master", 1,
                        ParamSet{{"li", ParamValue(int64_t{1})}}};
  s.account_task_params[{1, "eft"}] =
      ParamSet{{"pending", ParamValue(std::set<int64_t>{1, 2})},
               {"avLimit", ParamValue(int64_t{50000})}};
  s.clearances[{"master", 1, "eft"}] = Clearance{2};
  s.clearances[{"helper", 2, "eft"}] = Clearance{1};
  s.client_queues[0] = {"master", 1, {{"logout", {}, true}}};
  s.client_sessions[0] = 3;
  return s;
}

}  // namespace

TEST_CASE("canonical_bytes round trips through state_from_bytes") {
  SystemState s = sample_state();
  SystemState back = state_from_bytes(canonical_bytes(s));
  CHECK(back == s);
  CHECK(canonical_bytes(back) == canonical_bytes(s));
}

TEST_CASE("equal states serialize identically regardless of insert order") {
  SystemState a = sample_state();
  SystemState b;
  b.client_sessions[0] = 3;
  b.client_queues[0] = {"master", 1, {{"logout", {}, true}}};
  b.clearances[{"helper", 2, "eft"}] = Clearance{1};
  b.clearances[{"master", 1, "eft"}] = Clearance{2};
  b.account_task_params[{1, "eft"}] =
      ParamSet{{"avLimit", ParamValue(int64_t{50000})},
               {"pending", ParamValue(std::set<int64_t>{2, 1})}};
  b.open_sessions[3] = {3, "master", 1,
                        ParamSet{{"li", ParamValue(int64_t{1})}}};
  b.next_session_id = 4;
  CHECK(canonical_bytes(a) == canonical_bytes(b));
}

TEST_CASE("distinct states serialize differently") {
  SystemState a = sample_state();
  SystemState b = sample_state();
  b.next_session_id = 5;
  CHECK(canonical_bytes(a) != canonical_bytes(b));
  b = sample_state();
  b.clearances[{"master", 1, "eft"}] = Clearance{1};
  CHECK(canonical_bytes(a) != canonical_bytes(b));
}

TEST_CASE("state_from_bytes rejects malformed input") {
  CHECK_THROWS_AS(state_from_bytes("garbage"), std::runtime_error);
}

TEST_CASE("empty state round trips") {
  SystemState s;
  CHECK(state_from_bytes(canonical_bytes(s)) == s);
}

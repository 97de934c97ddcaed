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

#include "wfsec/params.hpp"

namespace wfsec {

const char* to_string(ValueKind k) {
  switch (k) {
    case ValueKind::Int:
      return "integer";
    case ValueKind::Text:
      return "text";
    case ValueKind::IntSet:
      return "integer-set";
    case ValueKind::TextSet:
      return "text-set";
  }
  return "?";
}

ParamValue ParamSet::get(const std::string& key, const ParamValue& def) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return def;
  if (it->second.kind() != def.kind())
    throw TypeMismatchError("key \"" + key + "\" holds " +
                            to_string(it->second.kind()) + ", expected " +
                            to_string(def.kind()));
  return it->second;
}

ParamSet ParamSet::merged(const ParamSet& updates) const {
  ParamSet out = *this;
  for (const auto& [k, v] : updates.entries_) out.entries_.insert_or_assign(k, v);
  return out;
}

}  // namespace wfsec

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

#ifndef WFSEC_PARAMS_HPP_
#define WFSEC_PARAMS_HPP_

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>

namespace wfsec {

/// Raised when a stored value's variant does not match the expected one.
struct TypeMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ValueKind { Int, Text, IntSet, TextSet };

const char* to_string(ValueKind k);

/// One attribute value: integer, text, or a canonically ordered set of either.
class ParamValue {
 public:
  ParamValue() : v_(int64_t{0}) {}
  ParamValue(int64_t i) : v_(i) {}
  ParamValue(std::string s) : v_(std::move(s)) {}
  ParamValue(const char* s) : v_(std::string(s)) {}
  ParamValue(std::set<int64_t> s) : v_(std::move(s)) {}
  ParamValue(std::set<std::string> s) : v_(std::move(s)) {}

  ValueKind kind() const { return static_cast<ValueKind>(v_.index()); }

  int64_t as_int() const { return get<int64_t>("integer"); }
  const std::string& as_text() const { return get<std::string>("text"); }
  const std::set<int64_t>& as_int_set() const {
    return get<std::set<int64_t>>("integer-set");
  }
  const std::set<std::string>& as_text_set() const {
    return get<std::set<std::string>>("text-set");
  }

  bool operator==(const ParamValue&) const = default;
  auto operator<=>(const ParamValue&) const = default;

 private:
  template <typename T>
  const T& get(const char* what) const {
    if (!std::holds_alternative<T>(v_))
      throw TypeMismatchError(std::string("expected ") + what + ", stored " +
                              to_string(kind()));
    return std::get<T>(v_);
  }

  std::variant<int64_t, std::string, std::set<int64_t>, std::set<std::string>>
      v_;
};

/// Key -> value attribute set, used for request, session, and account-task
/// parameters alike. Keys are unique by construction; lookup with a
/// caller-supplied default never fails.
class ParamSet {
 public:
  ParamSet() = default;
  ParamSet(std::initializer_list<std::pair<const std::string, ParamValue>> kv)
      : entries_(kv) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  /// Returns the stored value, or `def` when absent. Throws
  /// TypeMismatchError when the stored variant differs from the default's.
  ParamValue get(const std::string& key, const ParamValue& def) const;

  /// Kind-agnostic lookup; null when absent.
  const ParamValue* find(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }

  void set(const std::string& key, ParamValue v) {
    entries_.insert_or_assign(key, std::move(v));
  }

  /// Keys in `updates` overwrite; other keys preserved.
  ParamSet merged(const ParamSet& updates) const;

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  bool operator==(const ParamSet&) const = default;
  auto operator<=>(const ParamSet&) const = default;

 private:
  std::map<std::string, ParamValue> entries_;
};

/// Integer clearance level; may be negative. Total order by level.
struct Clearance {
  int64_t level = 0;
  bool operator==(const Clearance&) const = default;
  auto operator<=>(const Clearance&) const = default;
};

}  // namespace wfsec

#endif  // WFSEC_PARAMS_HPP_

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

#include "wfsec/state.hpp"

#include <sstream>
#include <stdexcept>

namespace wfsec {

namespace {

void put_quoted(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
}

void put_value(std::string& out, const ParamValue& v) {
  switch (v.kind()) {
    case ValueKind::Int:
      out += 'i';
      out += std::to_string(v.as_int());
      break;
    case ValueKind::Text:
      out += 't';
      put_quoted(out, v.as_text());
      break;
    case ValueKind::IntSet: {
      out += "I[";
      bool first = true;
      for (int64_t x : v.as_int_set()) {
        if (!first) out += ',';
        first = false;
        out += std::to_string(x);
      }
      out += ']';
      break;
    }
    case ValueKind::TextSet: {
      out += "T[";
      bool first = true;
      for (const auto& x : v.as_text_set()) {
        if (!first) out += ',';
        first = false;
        put_quoted(out, x);
      }
      out += ']';
      break;
    }
  }
}

void put_params(std::string& out, const ParamSet& p) {
  out += '{';
  bool first = true;
  for (const auto& [k, v] : p) {
    if (!first) out += ';';
    first = false;
    put_quoted(out, k);
    out += '=';
    put_value(out, v);
  }
  out += '}';
}

// Minimal recursive-descent reader for the canonical format.
class Reader {
 public:
  explicit Reader(const std::string& s) : s_(s) {}

  void expect(char c) {
    if (pos_ >= s_.size() || s_[pos_] != c)
      fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  void expect(const char* lit) {
    for (const char* p = lit; *p; ++p) expect(*p);
  }
  bool peek(char c) const { return pos_ < s_.size() && s_[pos_] == c; }
  bool eat(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }

  int64_t read_int() {
    std::size_t start = pos_;
    if (peek('-')) ++pos_;
    while (pos_ < s_.size() && isdigit(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
    if (pos_ == start) fail("expected integer");
    return std::stoll(s_.substr(start, pos_ - start));
  }

  std::string read_quoted() {
    expect('"');
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      if (s_[pos_] == '\\') ++pos_;
      if (pos_ >= s_.size()) fail("unterminated string");
      out += s_[pos_++];
    }
    expect('"');
    return out;
  }

  ParamValue read_value() {
    if (eat('i')) return ParamValue(read_int());
    if (eat('t')) return ParamValue(read_quoted());
    if (eat('I')) {
      expect('[');
      std::set<int64_t> xs;
      if (!peek(']'))
        do xs.insert(read_int());
        while (eat(','));
      expect(']');
      return ParamValue(std::move(xs));
    }
    if (eat('T')) {
      expect('[');
      std::set<std::string> xs;
      if (!peek(']'))
        do xs.insert(read_quoted());
        while (eat(','));
      expect(']');
      return ParamValue(std::move(xs));
    }
    fail("expected value tag");
    return {};
  }

  ParamSet read_params() {
    expect('{');
    ParamSet p;
    if (!peek('}')) {
      do {
        std::string k = read_quoted();
        expect('=');
        p.set(k, read_value());
      } while (eat(';'));
    }
    expect('}');
    return p;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::runtime_error("canonical state parse error at offset " +
                             std::to_string(pos_) + ": " + msg);
  }

  void done() const {
    if (pos_ != s_.size()) fail("trailing bytes");
  }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string param_value_to_text(const ParamValue& v) {
  std::string out;
  put_value(out, v);
  return out;
}

std::string param_set_to_text(const ParamSet& p) {
  std::string out;
  put_params(out, p);
  return out;
}

std::string canonical_bytes(const SystemState& s) {
  std::string out = "st{ns=";
  out += std::to_string(s.next_session_id);
  out += ";ss[";
  bool first = true;
  for (const auto& [id, rec] : s.open_sessions) {
    if (!first) out += ',';
    first = false;
    out += "{id=";
    out += std::to_string(rec.id);
    out += ";u=";
    put_quoted(out, rec.user);
    out += ";a=";
    out += std::to_string(rec.account);
    out += ";p=";
    put_params(out, rec.params);
    out += '}';
  }
  out += "];ap[";
  first = true;
  for (const auto& [key, params] : s.account_task_params) {
    if (!first) out += ',';
    first = false;
    out += "{a=";
    out += std::to_string(key.first);
    out += ";t=";
    put_quoted(out, key.second);
    out += ";p=";
    put_params(out, params);
    out += '}';
  }
  out += "];cl[";
  first = true;
  for (const auto& [key, cl] : s.clearances) {
    if (!first) out += ',';
    first = false;
    out += "{u=";
    put_quoted(out, std::get<0>(key));
    out += ";a=";
    out += std::to_string(std::get<1>(key));
    out += ";t=";
    put_quoted(out, std::get<2>(key));
    out += ";l=";
    out += std::to_string(cl.level);
    out += '}';
  }
  out += "];cq[";
  first = true;
  for (const auto& [client, q] : s.client_queues) {
    if (!first) out += ',';
    first = false;
    out += "{c=";
    out += std::to_string(client);
    out += ";u=";
    put_quoted(out, q.user);
    out += ";a=";
    out += std::to_string(q.account);
    out += ";r=[";
    bool f2 = true;
    for (const auto& t : q.remaining) {
      if (!f2) out += ',';
      f2 = false;
      out += "{act=";
      put_quoted(out, t.action);
      out += ";b=";
      out += t.bind_session ? '1' : '0';
      out += ";p=";
      put_params(out, t.params);
      out += '}';
    }
    out += "]}";
  }
  out += "];cs[";
  first = true;
  for (const auto& [client, sid] : s.client_sessions) {
    if (!first) out += ',';
    first = false;
    out += "{c=";
    out += std::to_string(client);
    out += ";s=";
    out += std::to_string(sid);
    out += '}';
  }
  out += "]}";
  return out;
}

SystemState state_from_bytes(const std::string& bytes) {
  Reader r(bytes);
  SystemState s;
  r.expect("st{ns=");
  s.next_session_id = r.read_int();
  r.expect(";ss[");
  if (!r.peek(']')) {
    do {
      SessionRec rec;
      r.expect("{id=");
      rec.id = r.read_int();
      r.expect(";u=");
      rec.user = r.read_quoted();
      r.expect(";a=");
      rec.account = r.read_int();
      r.expect(";p=");
      rec.params = r.read_params();
      r.expect('}');
      s.open_sessions.emplace(rec.id, std::move(rec));
    } while (r.eat(','));
  }
  r.expect("];ap[");
  if (!r.peek(']')) {
    do {
      r.expect("{a=");
      int64_t acc = r.read_int();
      r.expect(";t=");
      std::string task = r.read_quoted();
      r.expect(";p=");
      ParamSet p = r.read_params();
      r.expect('}');
      s.account_task_params.emplace(std::make_pair(acc, task), std::move(p));
    } while (r.eat(','));
  }
  r.expect("];cl[");
  if (!r.peek(']')) {
    do {
      r.expect("{u=");
      std::string user = r.read_quoted();
      r.expect(";a=");
      int64_t acc = r.read_int();
      r.expect(";t=");
      std::string task = r.read_quoted();
      r.expect(";l=");
      Clearance cl{r.read_int()};
      r.expect('}');
      s.clearances.emplace(std::make_tuple(user, acc, task), cl);
    } while (r.eat(','));
  }
  r.expect("];cq[");
  if (!r.peek(']')) {
    do {
      r.expect("{c=");
      int client = static_cast<int>(r.read_int());
      ClientQueue q;
      r.expect(";u=");
      q.user = r.read_quoted();
      r.expect(";a=");
      q.account = r.read_int();
      r.expect(";r=[");
      if (!r.peek(']')) {
        do {
          ReqTemplate t;
          r.expect("{act=");
          t.action = r.read_quoted();
          r.expect(";b=");
          t.bind_session = r.read_int() != 0;
          r.expect(";p=");
          t.params = r.read_params();
          r.expect('}');
          q.remaining.push_back(std::move(t));
        } while (r.eat(','));
      }
      r.expect("]}");
      s.client_queues.emplace(client, std::move(q));
    } while (r.eat(','));
  }
  r.expect("];cs[");
  if (!r.peek(']')) {
    do {
      r.expect("{c=");
      int client = static_cast<int>(r.read_int());
      r.expect(";s=");
      int64_t sid = r.read_int();
      r.expect('}');
      s.client_sessions.emplace(client, sid);
    } while (r.eat(','));
  }
  r.expect("]}");
  r.done();
  return s;
}

}  // namespace wfsec

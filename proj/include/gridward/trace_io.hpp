#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "gridward/errors.hpp"
#include "gridward/trace.hpp"

namespace gridward {

namespace detail {

// Escaping identical to nlohmann::json::dump so canonical bytes do not
// depend on which side produced them.
inline void json_escape_to(std::string& out, std::string_view s) {
  static constexpr char hex[] = "0123456789abcdef";
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          out += "\\u00";
          out += hex[(c >> 4) & 0xF];
          out += hex[c & 0xF];
        } else {
          out += static_cast<char>(c);
        }
    }
  }
}

inline void append_quoted(std::string& out, std::string_view s) {
  out += '"';
  json_escape_to(out, s);
  out += '"';
}

inline std::int64_t require_i64(const nlohmann::json& j, const char* key,
                                std::size_t line) {
  if (!j.contains(key) || !j[key].is_number_integer())
    throw ParseError(std::string("missing or non-integer \"") + key + "\"",
                     line);
  if (j[key].is_number_unsigned() &&
      j[key].get<std::uint64_t>() >
          static_cast<std::uint64_t>(INT64_MAX))
    throw ParseError(std::string("\"") + key + "\" out of range", line);
  return j[key].get<std::int64_t>();
}

inline const nlohmann::json& require_key(const nlohmann::json& j,
                                         const char* key, std::size_t line) {
  if (!j.contains(key))
    throw ParseError(std::string("missing key \"") + key + "\"", line);
  return j[key];
}

}  // namespace detail

// Canonical JSONL rendering: fixed key order, no whitespace outside
// strings, base-10 integers, LF line endings. parse_trace of the result
// reproduces the Trace and re-rendering reproduces the bytes.
inline std::string render_trace(const Trace& trace) {
  std::string out;
  out.reserve(64 + trace.events.size() * 64);
  out += "{\"job\":";
  detail::append_quoted(out, trace.meta.job_id);
  out += ",\"user\":";
  detail::append_quoted(out, trace.meta.user);
  out += ",\"profile\":";
  detail::append_quoted(out, trace.meta.profile_label.value_or(""));
  out += ",\"seed\":";
  out += std::to_string(trace.meta.seed.value_or(0));
  out += "}\n";
  for (const SyscallEvent& ev : trace.events) {
    out += "{\"t\":";
    out += std::to_string(ev.t);
    out += ",\"pid\":";
    out += std::to_string(ev.pid);
    out += ",\"sc\":\"";
    out += syscall_name(ev.sc);
    out += "\",\"args\":[";
    for (std::size_t i = 0; i < ev.args.size(); ++i) {
      if (i) out += ',';
      if (is_int(ev.args[i]))
        out += std::to_string(as_int(ev.args[i]));
      else
        detail::append_quoted(out, as_str(ev.args[i]));
    }
    out += "],\"ret\":";
    out += std::to_string(ev.ret);
    out += "}\n";
  }
  return out;
}

// Parses the JSONL trace format. Every diagnostic carries the 1-based
// line number. Event order is preserved; timestamps must be
// non-decreasing.
inline Trace parse_trace(std::string_view bytes) {
  Trace trace;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool have_header = false;
  std::int64_t prev_t = 0;

  while (pos <= bytes.size()) {
    std::size_t eol = bytes.find('\n', pos);
    std::string_view line;
    if (eol == std::string_view::npos) {
      if (pos == bytes.size()) break;  // trailing newline already consumed
      line = bytes.substr(pos);
      pos = bytes.size() + 1;
    } else {
      line = bytes.substr(pos, eol - pos);
      pos = eol + 1;
    }
    ++line_no;

    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("malformed line: ") + e.what(), line_no);
    }
    if (!j.is_object()) throw ParseError("malformed line: not an object", line_no);

    if (!have_header) {
      for (auto& [k, v] : j.items()) {
        (void)v;
        if (k != "job" && k != "user" && k != "profile" && k != "seed")
          throw ParseError("unexpected header key \"" + k + "\"", line_no);
      }
      const auto& job = detail::require_key(j, "job", line_no);
      const auto& user = detail::require_key(j, "user", line_no);
      const auto& profile = detail::require_key(j, "profile", line_no);
      const auto& seed = detail::require_key(j, "seed", line_no);
      if (!job.is_string() || !user.is_string() || !profile.is_string())
        throw ParseError("header fields job/user/profile must be strings",
                         line_no);
      if (!seed.is_number_integer() ||
          (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0))
        throw ParseError("header \"seed\" must be a non-negative integer",
                         line_no);
      trace.meta.job_id = job.get<std::string>();
      if (trace.meta.job_id.empty())
        throw ParseError("empty job id", line_no);
      trace.meta.user = user.get<std::string>();
      std::string label = profile.get<std::string>();
      if (!label.empty()) trace.meta.profile_label = std::move(label);
      std::uint64_t s = seed.get<std::uint64_t>();
      if (s != 0) trace.meta.seed = s;
      have_header = true;
      continue;
    }

    for (auto& [k, v] : j.items()) {
      (void)v;
      if (k != "t" && k != "pid" && k != "sc" && k != "args" && k != "ret")
        throw ParseError("unexpected event key \"" + k + "\"", line_no);
    }
    SyscallEvent ev;
    ev.t = detail::require_i64(j, "t", line_no);
    ev.pid = detail::require_i64(j, "pid", line_no);
    if (ev.pid <= 0) throw ParseError("pid must be positive", line_no);
    const auto& sc = detail::require_key(j, "sc", line_no);
    if (!sc.is_string()) throw ParseError("\"sc\" must be a string", line_no);
    auto id = syscall_id(sc.get<std::string>());
    if (!id)
      throw ParseError("unknown syscall name \"" + sc.get<std::string>() + "\"",
                       line_no);
    ev.sc = *id;
    const auto& args = detail::require_key(j, "args", line_no);
    if (!args.is_array()) throw ParseError("\"args\" must be an array", line_no);
    if (args.size() > kMaxArgs)
      throw ParseError("more than 4 args", line_no);
    for (const auto& a : args) {
      if (a.is_number_integer()) {
        if (a.is_number_unsigned() &&
            a.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX))
          throw ParseError("integer arg out of range", line_no);
        ev.args.emplace_back(a.get<std::int64_t>());
      } else if (a.is_string()) {
        std::string s = a.get<std::string>();
        if (s.size() > kMaxArgStringBytes)
          throw ParseError("string arg longer than 256 bytes", line_no);
        ev.args.emplace_back(std::move(s));
      } else {
        throw ParseError("args entries must be integers or strings", line_no);
      }
    }
    ev.ret = detail::require_i64(j, "ret", line_no);
    if (!trace.events.empty() && ev.t < prev_t)
      throw ParseError("non-monotonic timestamp", line_no);
    prev_t = ev.t;
    trace.events.push_back(std::move(ev));
  }

  if (!have_header) throw ParseError("missing header line", 1);
  return trace;
}

}  // namespace gridward

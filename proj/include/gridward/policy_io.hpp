#pragma once

#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gridward/errors.hpp"
#include "gridward/policy.hpp"

namespace gridward {

namespace detail {

struct PolicyToken {
  std::string text;
  bool quoted = false;
};

// Splits one rule line into tokens. Quoted strings accept exactly the
// \" and \\ escapes; an unquoted '#' starts a comment.
inline std::vector<PolicyToken> lex_policy_line(std::string_view line,
                                                std::size_t line_no) {
  std::vector<PolicyToken> out;
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    if (c == '#') break;
    if (c == '"') {
      std::string s;
      ++i;
      bool closed = false;
      while (i < line.size()) {
        char d = line[i];
        if (d == '\\') {
          if (i + 1 >= line.size())
            throw ParseError("dangling backslash in string", line_no);
          char e = line[i + 1];
          if (e != '"' && e != '\\')
            throw ParseError("unsupported escape in string", line_no);
          s += e;
          i += 2;
          continue;
        }
        if (d == '"') {
          closed = true;
          ++i;
          break;
        }
        s += d;
        ++i;
      }
      if (!closed) throw ParseError("unterminated string", line_no);
      out.push_back({std::move(s), true});
      continue;
    }
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' &&
           line[i] != '\r' && line[i] != '#' && line[i] != '"')
      ++i;
    out.push_back({std::string(line.substr(start, i - start)), false});
  }
  return out;
}

inline std::optional<std::int64_t> token_as_int(const PolicyToken& t) {
  if (t.quoted || t.text.empty()) return std::nullopt;
  std::size_t i = 0;
  if (t.text[0] == '-') {
    if (t.text.size() == 1) return std::nullopt;
    i = 1;
  }
  for (; i < t.text.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(t.text[i])))
      return std::nullopt;
  try {
    return std::stoll(t.text);
  } catch (...) {
    return std::nullopt;
  }
}

inline void render_policy_string(std::string& out, std::string_view s) {
  out += '"';
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
}

inline void render_action(std::string& out, const FilterAction& a) {
  switch (a.kind) {
    case FilterAction::Kind::Allow: out += "allow"; break;
    case FilterAction::Kind::Deny:
      out += "deny ";
      out += std::to_string(a.deny_errno);
      break;
    case FilterAction::Kind::Kill: out += "kill"; break;
    case FilterAction::Kind::Log: out += "log"; break;
  }
}

}  // namespace detail

// Canonical policy text: header, default, one rule per line, single
// spaces, predicates ordered by arg index. parse_policy of the result
// reproduces the Policy byte-for-byte on re-render.
inline std::string render_policy(const Policy& policy) {
  validate_policy(policy);
  std::string out = "policy " + policy.name + "\n";
  out += "default ";
  detail::render_action(out, policy.default_action);
  out += '\n';
  for (const FilterRule& r : policy.rules) {
    detail::render_action(out, r.action);
    out += ' ';
    out += r.syscall ? std::string(syscall_name(*r.syscall)) : "*";
    std::vector<ArgPredicate> preds = r.predicates;
    std::sort(preds.begin(), preds.end(),
              [](const ArgPredicate& a, const ArgPredicate& b) {
                return a.index < b.index;
              });
    for (std::size_t i = 0; i < preds.size(); ++i) {
      out += i == 0 ? " if arg" : " and arg";
      out += static_cast<char>('0' + preds[i].index);
      switch (preds[i].op) {
        case ArgPredicate::Op::EqInt:
          out += " == ";
          out += std::to_string(as_int(preds[i].value));
          break;
        case ArgPredicate::Op::EqStr:
          out += " == ";
          detail::render_policy_string(out, as_str(preds[i].value));
          break;
        case ArgPredicate::Op::Prefix:
          out += " prefix ";
          detail::render_policy_string(out, as_str(preds[i].value));
          break;
      }
    }
    out += '\n';
  }
  return out;
}

namespace detail {

// Parses "<action>" from tokens starting at pos; advances pos. The
// deny form carries its errno before the syscall. When the token after
// "deny" is not an integer we look it up in the alphabet so that
// "deny ptraze 1" reports the unknown syscall rather than a bare
// syntax error.
inline FilterAction parse_action_tokens(const std::vector<PolicyToken>& toks,
                                        std::size_t& pos,
                                        std::size_t line_no) {
  if (pos >= toks.size()) throw ParseError("missing action", line_no);
  const std::string& a = toks[pos].text;
  if (toks[pos].quoted) throw ParseError("unknown action \"" + a + "\"", line_no);
  ++pos;
  if (a == "allow") return FilterAction::allow();
  if (a == "kill") return FilterAction::kill();
  if (a == "log") return FilterAction::log();
  if (a == "deny") {
    if (pos >= toks.size())
      throw ParseError("deny requires an errno", line_no);
    auto n = token_as_int(toks[pos]);
    if (!n) {
      if (!toks[pos].quoted && syscall_id(toks[pos].text))
        throw ParseError("deny requires an errno before the syscall", line_no);
      throw ParseError("unknown syscall \"" + toks[pos].text + "\"", line_no);
    }
    if (*n < 1 || *n > 133)
      throw ParseError("deny errno must be in [1,133]", line_no);
    ++pos;
    return FilterAction::deny(static_cast<std::uint8_t>(*n));
  }
  throw ParseError("unknown action \"" + a + "\"", line_no);
}

}  // namespace detail

// Parses the line-oriented policy grammar. '#' starts a comment, blank
// lines are skipped, every error carries its line number.
inline Policy parse_policy(std::string_view text) {
  Policy policy;
  bool have_header = false;
  bool have_default = false;

  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line;
    if (eol == std::string_view::npos) {
      if (pos >= text.size()) break;
      line = text.substr(pos);
      pos = text.size() + 1;
    } else {
      line = text.substr(pos, eol - pos);
      pos = eol + 1;
    }
    ++line_no;

    auto toks = detail::lex_policy_line(line, line_no);
    if (toks.empty()) continue;

    if (!have_header) {
      if (toks[0].quoted || toks[0].text != "policy")
        throw ParseError("missing policy header", line_no);
      if (toks.size() != 2 || toks[1].quoted || toks[1].text.empty())
        throw ParseError("policy header needs a single name", line_no);
      policy.name = toks[1].text;
      have_header = true;
      continue;
    }
    if (!toks[0].quoted && toks[0].text == "policy")
      throw ParseError("duplicate policy header", line_no);

    if (!toks[0].quoted && toks[0].text == "default") {
      if (have_default) throw ParseError("duplicate default", line_no);
      std::size_t p = 1;
      policy.default_action = detail::parse_action_tokens(toks, p, line_no);
      if (p != toks.size())
        throw ParseError("trailing tokens after default action", line_no);
      have_default = true;
      continue;
    }

    FilterRule rule;
    std::size_t p = 0;
    rule.action = detail::parse_action_tokens(toks, p, line_no);
    if (p >= toks.size()) throw ParseError("missing syscall", line_no);
    if (toks[p].quoted)
      throw ParseError("syscall must not be quoted", line_no);
    if (toks[p].text == "*") {
      rule.syscall = std::nullopt;
    } else {
      auto id = syscall_id(toks[p].text);
      if (!id)
        throw ParseError("unknown syscall \"" + toks[p].text + "\"", line_no);
      rule.syscall = *id;
    }
    ++p;

    if (p < toks.size()) {
      if (toks[p].quoted || toks[p].text != "if")
        throw ParseError("expected \"if\" before predicates", line_no);
      ++p;
      bool first = true;
      while (true) {
        if (!first) {
          if (p >= toks.size()) break;
          if (toks[p].quoted || toks[p].text != "and")
            throw ParseError("expected \"and\" between predicates", line_no);
          ++p;
        }
        first = false;
        if (p >= toks.size())
          throw ParseError("missing predicate", line_no);
        const std::string& t = toks[p].text;
        if (toks[p].quoted || t.size() != 4 || t.compare(0, 3, "arg") != 0 ||
            t[3] < '0' || t[3] > '3')
          throw ParseError("malformed predicate: expected arg0..arg3",
                           line_no);
        ArgPredicate pred;
        pred.index = static_cast<std::uint8_t>(t[3] - '0');
        ++p;
        if (p >= toks.size())
          throw ParseError("malformed predicate: missing operator", line_no);
        const std::string& op = toks[p].text;
        if (!toks[p].quoted && op == "==") {
          ++p;
          if (p >= toks.size())
            throw ParseError("malformed predicate: missing value", line_no);
          if (toks[p].quoted) {
            pred.op = ArgPredicate::Op::EqStr;
            pred.value = toks[p].text;
          } else if (auto n = detail::token_as_int(toks[p])) {
            pred.op = ArgPredicate::Op::EqInt;
            pred.value = *n;
          } else {
            throw ParseError("malformed predicate: value must be an integer "
                             "or a quoted string",
                             line_no);
          }
          ++p;
        } else if (!toks[p].quoted && op == "prefix") {
          ++p;
          if (p >= toks.size() || !toks[p].quoted)
            throw ParseError("malformed predicate: prefix needs a quoted "
                             "string",
                             line_no);
          pred.op = ArgPredicate::Op::Prefix;
          pred.value = toks[p].text;
          ++p;
        } else {
          throw ParseError("malformed predicate: unknown operator \"" + op +
                               "\"",
                           line_no);
        }
        for (const ArgPredicate& existing : rule.predicates)
          if (existing.index == pred.index)
            throw ParseError("duplicate predicate for arg" +
                                 std::to_string(pred.index),
                             line_no);
        rule.predicates.push_back(std::move(pred));
        if (p >= toks.size()) break;
      }
    }
    policy.rules.push_back(std::move(rule));
  }

  if (!have_header) throw ParseError("missing policy header", 1);
  if (!have_default) throw ParseError("missing default action", line_no);
  validate_policy(policy);
  return policy;
}

}  // namespace gridward

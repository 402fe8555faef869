#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gridward/errors.hpp"
#include "gridward/syscalls.hpp"

namespace gridward {

// Markov generator of job syscall traces. `initial` picks the first
// syscall, each following syscall is drawn from the transition row of
// the previous one. Rows are only required for reachable states.
struct BehaviorProfile {
  enum class Kind : std::uint8_t { Normal, Attack };

  std::string name;
  Kind kind = Kind::Normal;
  std::array<double, kSyscallCount> initial{};
  std::array<std::array<double, kSyscallCount>, kSyscallCount> transition{};
  std::array<bool, kSyscallCount> has_row{};
  std::array<std::vector<std::string>, kSyscallCount> arg0_pool;
  int mean_len = 1;  // default trace length when the site config gives none
};

inline constexpr double kProbSumTolerance = 1e-9;

inline void validate_profile(const BehaviorProfile& p) {
  if (p.name.empty()) throw InvalidArgument("profile name must be non-empty");
  if (p.mean_len < 1) throw InvalidArgument("profile len must be >= 1");
  double s = 0.0;
  for (double v : p.initial) {
    if (v < 0.0) throw InvalidArgument("negative initial probability");
    s += v;
  }
  if (std::fabs(s - 1.0) > kProbSumTolerance)
    throw InvalidArgument("initial probabilities must sum to 1");
  for (std::size_t r = 0; r < kSyscallCount; ++r) {
    if (!p.has_row[r]) continue;
    double rs = 0.0;
    for (double v : p.transition[r]) {
      if (v < 0.0) throw InvalidArgument("negative transition probability");
      rs += v;
    }
    if (std::fabs(rs - 1.0) > kProbSumTolerance)
      throw InvalidArgument(std::string("transition row for ") +
                            std::string(syscall_name(r)) +
                            " must sum to 1");
  }
  // Every state the chain can reach must have a transition row.
  std::array<bool, kSyscallCount> reach{};
  std::vector<std::uint8_t> stack;
  for (std::size_t i = 0; i < kSyscallCount; ++i)
    if (p.initial[i] > 0.0) {
      reach[i] = true;
      stack.push_back(static_cast<std::uint8_t>(i));
    }
  while (!stack.empty()) {
    std::uint8_t cur = stack.back();
    stack.pop_back();
    if (!p.has_row[cur])
      throw InvalidArgument(std::string("syscall ") +
                            std::string(syscall_name(cur)) +
                            " is reachable but has no transition row");
    for (std::size_t j = 0; j < kSyscallCount; ++j) {
      if (p.transition[cur][j] > 0.0 && !reach[j]) {
        reach[j] = true;
        stack.push_back(static_cast<std::uint8_t>(j));
      }
    }
  }
}

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() &&
           (line[i] == ' ' || line[i] == '\t' || line[i] == '\r'))
      ++i;
    if (i >= line.size()) break;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' &&
           line[i] != '\r')
      ++i;
    out.push_back(line.substr(start, i - start));
  }
  return out;
}

inline double parse_prob(std::string_view tok, std::size_t line_no) {
  std::string s(tok);
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !(v >= 0.0) || v > 1.0)
    throw ParseError("bad probability \"" + s + "\"", line_no);
  return v;
}

}  // namespace detail

// Profile file grammar, line oriented, '#' comments:
//   profile <name> <normal|attack>
//   len <int>
//   init <32 floats>
//   row <syscall> <32 floats>
//   pool <syscall> arg0 <comma-separated strings>
inline BehaviorProfile parse_profile(std::string_view text) {
  BehaviorProfile prof;
  bool have_header = false, have_len = false, have_init = false;

  std::size_t pos = 0, line_no = 0;
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
    std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    auto toks = detail::split_ws(line);
    if (toks.empty()) continue;

    if (toks[0] == "profile") {
      if (have_header) throw ParseError("duplicate profile header", line_no);
      if (toks.size() != 3)
        throw ParseError("expected: profile <name> <normal|attack>", line_no);
      prof.name = std::string(toks[1]);
      if (toks[2] == "normal")
        prof.kind = BehaviorProfile::Kind::Normal;
      else if (toks[2] == "attack")
        prof.kind = BehaviorProfile::Kind::Attack;
      else
        throw ParseError("profile kind must be normal or attack", line_no);
      have_header = true;
      continue;
    }
    if (!have_header) throw ParseError("missing profile header", line_no);

    if (toks[0] == "len") {
      if (have_len) throw ParseError("duplicate len", line_no);
      if (toks.size() != 2) throw ParseError("expected: len <int>", line_no);
      try {
        prof.mean_len = std::stoi(std::string(toks[1]));
      } catch (...) {
        throw ParseError("bad len", line_no);
      }
      have_len = true;
      continue;
    }
    if (toks[0] == "init") {
      if (have_init) throw ParseError("duplicate init", line_no);
      if (toks.size() != 1 + kSyscallCount)
        throw ParseError("init needs 32 probabilities", line_no);
      for (std::size_t i = 0; i < kSyscallCount; ++i)
        prof.initial[i] = detail::parse_prob(toks[1 + i], line_no);
      have_init = true;
      continue;
    }
    if (toks[0] == "row") {
      if (toks.size() != 2 + kSyscallCount)
        throw ParseError("row needs a syscall and 32 probabilities", line_no);
      auto id = syscall_id(toks[1]);
      if (!id)
        throw ParseError("unknown syscall \"" + std::string(toks[1]) + "\"",
                         line_no);
      if (prof.has_row[*id])
        throw ParseError("duplicate row for " + std::string(toks[1]), line_no);
      for (std::size_t i = 0; i < kSyscallCount; ++i)
        prof.transition[*id][i] = detail::parse_prob(toks[2 + i], line_no);
      prof.has_row[*id] = true;
      continue;
    }
    if (toks[0] == "pool") {
      if (toks.size() < 4 || toks[2] != "arg0")
        throw ParseError("expected: pool <syscall> arg0 <strings>", line_no);
      auto id = syscall_id(toks[1]);
      if (!id)
        throw ParseError("unknown syscall \"" + std::string(toks[1]) + "\"",
                         line_no);
      if (!prof.arg0_pool[*id].empty())
        throw ParseError("duplicate pool for " + std::string(toks[1]),
                         line_no);
      // Pool entries are comma separated and contain no whitespace, so
      // rejoin the remaining tokens before splitting on commas.
      std::string rest;
      for (std::size_t i = 3; i < toks.size(); ++i) {
        if (i > 3) rest += ' ';
        rest += std::string(toks[i]);
      }
      std::size_t start = 0;
      while (start <= rest.size()) {
        std::size_t comma = rest.find(',', start);
        std::string entry = comma == std::string::npos
                                ? rest.substr(start)
                                : rest.substr(start, comma - start);
        if (entry.empty()) throw ParseError("empty pool entry", line_no);
        if (entry.size() > 256)
          throw ParseError("pool entry longer than 256 bytes", line_no);
        prof.arg0_pool[*id].push_back(std::move(entry));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      continue;
    }
    throw ParseError("unknown directive \"" + std::string(toks[0]) + "\"",
                     line_no);
  }

  if (!have_header) throw ParseError("missing profile header", 1);
  if (!have_init) throw ParseError("missing init line", line_no);
  validate_profile(prof);
  return prof;
}

class ProfileCatalog {
 public:
  void add(BehaviorProfile p) {
    if (find(p.name)) throw InvalidArgument("duplicate profile " + p.name);
    profiles_.push_back(std::move(p));
  }

  const BehaviorProfile* find(std::string_view name) const {
    for (const BehaviorProfile& p : profiles_)
      if (p.name == name) return &p;
    return nullptr;
  }

  const BehaviorProfile& require(std::string_view name) const {
    const BehaviorProfile* p = find(name);
    if (!p) throw InvalidArgument("unknown profile \"" + std::string(name) + "\"");
    return *p;
  }

  const std::vector<BehaviorProfile>& all() const { return profiles_; }

 private:
  std::vector<BehaviorProfile> profiles_;
};

}  // namespace gridward

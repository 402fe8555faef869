#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gridward/errors.hpp"
#include "gridward/trace.hpp"

namespace gridward {

struct FilterAction {
  enum class Kind : std::uint8_t { Allow, Deny, Kill, Log };

  Kind kind = Kind::Allow;
  std::uint8_t deny_errno = 0;  // only meaningful for Deny, in [1,133]

  static FilterAction allow() { return {Kind::Allow, 0}; }
  static FilterAction deny(std::uint8_t e) { return {Kind::Deny, e}; }
  static FilterAction kill() { return {Kind::Kill, 0}; }
  static FilterAction log() { return {Kind::Log, 0}; }

  bool operator==(const FilterAction&) const = default;
};

struct ArgPredicate {
  enum class Op : std::uint8_t { EqInt, EqStr, Prefix };

  std::uint8_t index = 0;  // 0..3
  Op op = Op::EqInt;
  ArgValue value;

  bool operator==(const ArgPredicate&) const = default;
};

struct FilterRule {
  std::optional<std::uint8_t> syscall;  // nullopt = wildcard
  std::vector<ArgPredicate> predicates; // conjunction, at most one per index
  FilterAction action;

  bool operator==(const FilterRule&) const = default;
};

struct Policy {
  std::string name;
  FilterAction default_action;
  std::vector<FilterRule> rules;

  bool operator==(const Policy&) const = default;
};

inline void validate_action(const FilterAction& a) {
  if (a.kind == FilterAction::Kind::Deny &&
      (a.deny_errno < 1 || a.deny_errno > 133))
    throw InvalidArgument("deny errno must be in [1,133]");
}

inline void validate_policy(const Policy& p) {
  if (p.name.empty()) throw InvalidArgument("policy name must be non-empty");
  if (p.name.find_first_of(" \t\r\n\"#") != std::string::npos)
    throw InvalidArgument("policy name must be a single bare token");
  validate_action(p.default_action);
  for (const FilterRule& r : p.rules) {
    validate_action(r.action);
    if (r.syscall && *r.syscall >= kSyscallCount)
      throw InvalidArgument("rule syscall id out of range");
    if (r.predicates.size() > kMaxArgs)
      throw InvalidArgument("more than 4 predicates");
    std::set<std::uint8_t> seen;
    for (const ArgPredicate& pr : r.predicates) {
      if (pr.index >= kMaxArgs)
        throw InvalidArgument("predicate arg index out of range");
      if (!seen.insert(pr.index).second)
        throw InvalidArgument("duplicate predicate for one arg index");
      const bool wants_int = pr.op == ArgPredicate::Op::EqInt;
      if (wants_int != is_int(pr.value))
        throw InvalidArgument("predicate op/value tag mismatch");
      if (is_str(pr.value) &&
          as_str(pr.value).find_first_of("\n\r") != std::string::npos)
        throw InvalidArgument("predicate strings must be single-line");
    }
  }
}

inline bool predicate_holds(const ArgPredicate& p, const SyscallEvent& ev) {
  if (p.index >= ev.args.size()) return false;
  const ArgValue& a = ev.args[p.index];
  switch (p.op) {
    case ArgPredicate::Op::EqInt:
      return is_int(a) && as_int(a) == as_int(p.value);
    case ArgPredicate::Op::EqStr:
      return is_str(a) && as_str(a) == as_str(p.value);
    case ArgPredicate::Op::Prefix:
      return is_str(a) && as_str(a).starts_with(as_str(p.value));
  }
  return false;
}

inline bool rule_matches(const FilterRule& r, const SyscallEvent& ev) {
  if (r.syscall && *r.syscall != ev.sc) return false;
  for (const ArgPredicate& p : r.predicates)
    if (!predicate_holds(p, ev)) return false;
  return true;
}

// First-match evaluation. Log rules record a hit and keep scanning; the
// returned action is the first terminal match or the default.
inline FilterAction evaluate(const Policy& policy, const SyscallEvent& ev) {
  for (const FilterRule& r : policy.rules) {
    if (!rule_matches(r, ev)) continue;
    if (r.action.kind != FilterAction::Kind::Log) return r.action;
  }
  return policy.default_action;
}

enum class SurfaceClass : std::uint8_t {
  AlwaysAllowed,
  AlwaysBlocked,
  Conditional,
};

struct AuditReport {
  std::array<SurfaceClass, kSyscallCount> classes{};
  int surface = 0;  // number of always-allowed syscalls
};

namespace detail {

// Candidate argument values for one arg index: every constant the
// matching rules compare against, the exact-prefix strings plus short
// extensions of each (so "matches the prefix but not the equality" and
// "extends one prefix without reaching a longer one" are both
// realized), and fresh values outside every pool.
struct ArgCandidates {
  bool referenced = false;
  std::vector<ArgValue> values;  // tried in addition to "absent"
};

inline void collect_candidates(const std::vector<const FilterRule*>& rules,
                               std::array<ArgCandidates, kMaxArgs>& cands) {
  for (std::size_t k = 0; k < kMaxArgs; ++k) {
    std::set<std::int64_t> ints;
    std::set<std::string> strs;
    for (const FilterRule* r : rules) {
      for (const ArgPredicate& p : r->predicates) {
        if (p.index != k) continue;
        cands[k].referenced = true;
        if (p.op == ArgPredicate::Op::EqInt)
          ints.insert(as_int(p.value));
        else
          strs.insert(as_str(p.value));
      }
    }
    if (!cands[k].referenced) continue;
    for (std::int64_t v : ints) cands[k].values.emplace_back(v);
    std::int64_t fresh = 0;
    while (ints.count(fresh)) ++fresh;
    cands[k].values.emplace_back(fresh);
    std::set<std::string> probe;
    for (const std::string& s : strs) {
      probe.insert(s);
      probe.insert(s + '\x01');
      probe.insert(s + '~');
    }
    probe.insert("\x7f\x7f");
    for (const std::string& s : probe) cands[k].values.emplace_back(s);
  }
}

}  // namespace detail

// Surface-of-attack classification. Decided by exhaustive evaluation
// over a finite probe basis per syscall: all arg lengths 0..4 crossed
// with the candidate values above. The basis covers every equality and
// prefix boundary a policy's own constants can express.
inline AuditReport audit(const Policy& policy) {
  AuditReport report;
  for (std::size_t sc = 0; sc < kSyscallCount; ++sc) {
    std::vector<const FilterRule*> relevant;
    for (const FilterRule& r : policy.rules)
      if (!r.syscall || *r.syscall == sc) relevant.push_back(&r);

    std::array<detail::ArgCandidates, kMaxArgs> cands;
    detail::collect_candidates(relevant, cands);

    std::size_t max_ref = 0;
    bool any_ref = false;
    for (std::size_t k = 0; k < kMaxArgs; ++k)
      if (cands[k].referenced) {
        any_ref = true;
        max_ref = k;
      }
    const std::size_t max_len = any_ref ? max_ref + 1 : 0;

    bool saw_allow = false, saw_block = false, saw_log = false;
    auto note = [&](const FilterAction& a) {
      switch (a.kind) {
        case FilterAction::Kind::Allow: saw_allow = true; break;
        case FilterAction::Kind::Deny:
        case FilterAction::Kind::Kill: saw_block = true; break;
        case FilterAction::Kind::Log: saw_log = true; break;
      }
    };

    SyscallEvent ev;
    ev.sc = static_cast<std::uint8_t>(sc);
    note(evaluate(policy, ev));  // argless probe

    // Enumerate arg vectors of each length; unreferenced positions get
    // a fixed filler since no predicate can observe them.
    for (std::size_t len = 1; len <= max_len; ++len) {
      std::vector<std::size_t> idx(len, 0);
      auto option_count = [&](std::size_t k) {
        return cands[k].referenced ? cands[k].values.size() : 1;
      };
      while (true) {
        ev.args.clear();
        for (std::size_t k = 0; k < len; ++k) {
          if (cands[k].referenced)
            ev.args.push_back(cands[k].values[idx[k]]);
          else
            ev.args.push_back(std::int64_t{0});
        }
        note(evaluate(policy, ev));
        std::size_t k = 0;
        for (; k < len; ++k) {
          if (++idx[k] < option_count(k)) break;
          idx[k] = 0;
        }
        if (k == len) break;
      }
    }

    SurfaceClass cls;
    if (saw_allow && !saw_block && !saw_log)
      cls = SurfaceClass::AlwaysAllowed;
    else if (saw_block && !saw_allow && !saw_log)
      cls = SurfaceClass::AlwaysBlocked;
    else
      cls = SurfaceClass::Conditional;
    report.classes[sc] = cls;
    if (cls == SurfaceClass::AlwaysAllowed) ++report.surface;
  }
  return report;
}

}  // namespace gridward

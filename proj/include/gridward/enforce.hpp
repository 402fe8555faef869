#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gridward/errors.hpp"
#include "gridward/policy.hpp"
#include "gridward/trace.hpp"

namespace gridward {

// Per-job private view of the system: uid mapping plus the path
// prefixes the job is allowed to see.
struct NamespaceConfig {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> uid_map;  // container->host
  std::vector<std::string> visible_paths;
};

inline void validate_namespace(const NamespaceConfig& ns) {
  if (ns.visible_paths.empty())
    throw InvalidArgument("visible_paths must be non-empty");
  bool maps_root = false;
  for (auto [cuid, huid] : ns.uid_map) {
    if (huid == 0)
      throw InvalidArgument("container uids must not map to host uid 0");
    if (cuid == 0) {
      maps_root = true;
      if (huid < 1000)
        throw InvalidArgument("container root must map to host uid >= 1000");
    }
  }
  if (!maps_root)
    throw InvalidArgument("uid_map must map container uid 0");
}

// cgroup-style ceilings. Every event costs 1 ms of cpu budget.
struct ResourceLimits {
  std::int64_t cpu_ms = 0;
  std::int64_t mem_bytes = 0;
  std::int64_t max_pids = 0;
};

inline void validate_limits(const ResourceLimits& l) {
  if (l.cpu_ms <= 0 || l.mem_bytes <= 0 || l.max_pids <= 0)
    throw InvalidArgument("resource limits must be strictly positive");
}

enum class ViolationReason : std::uint8_t {
  RuleDeny,
  RuleKill,
  PathHidden,
  CpuLimit,
  MemLimit,
  PidLimit,
};

inline std::string_view violation_reason_name(ViolationReason r) {
  switch (r) {
    case ViolationReason::RuleDeny: return "rule-deny";
    case ViolationReason::RuleKill: return "rule-kill";
    case ViolationReason::PathHidden: return "path-hidden";
    case ViolationReason::CpuLimit: return "cpu-limit";
    case ViolationReason::MemLimit: return "mem-limit";
    case ViolationReason::PidLimit: return "pid-limit";
  }
  return "?";
}

struct Violation {
  std::size_t event_index = 0;
  ViolationReason reason = ViolationReason::RuleDeny;

  bool operator==(const Violation&) const = default;
};

struct EnforcementReport {
  Trace enforced;                      // prefix of the input, denied events kept
  std::vector<FilterAction> verdicts;  // one per processed event
  std::vector<Violation> violations;
  std::optional<std::size_t> killed_at;
  std::int64_t cpu_used_ms = 0;    // processed events x 1 ms
  std::int64_t mem_peak_bytes = 0;
  std::int64_t pid_peak = 1;
};

// Syscalls whose string arg0 is a path subject to the namespace check.
inline bool namespace_checked(std::uint8_t sc) {
  switch (static_cast<Sys>(sc)) {
    case Sys::open:
    case Sys::stat:
    case Sys::access:
    case Sys::execve:
    case Sys::chmod:
    case Sys::chown:
    case Sys::getdents:
      return true;
    default:
      return false;
  }
}

inline bool path_visible(const NamespaceConfig& ns, std::string_view path) {
  for (const std::string& p : ns.visible_paths)
    if (path.substr(0, p.size()) == p) return true;
  return false;
}

inline constexpr std::uint8_t kHiddenPathErrno = 13;

// Processes the trace in order. Per event: namespace check first (a
// permissive rule must not bypass the container boundary), then rule
// evaluation, then resource accounting for events that were allowed to
// run. Deny-class outcomes keep the event in the enforced trace with
// ret rewritten to -errno; the first Kill-class outcome truncates the
// trace so that enforced.events has exactly killed_at events. Nothing
// here throws: misbehavior is reported, not raised.
inline EnforcementReport enforce(const Policy& policy,
                                 const NamespaceConfig& ns,
                                 const ResourceLimits& limits,
                                 const Trace& trace) {
  EnforcementReport report;
  report.enforced.meta = trace.meta;
  report.enforced.events.reserve(trace.events.size());

  std::int64_t cpu = 0;
  std::int64_t mem = 0;
  std::int64_t live_pids = 1;

  for (std::size_t i = 0; i < trace.events.size(); ++i) {
    const SyscallEvent& ev = trace.events[i];

    cpu += 1;
    report.cpu_used_ms = cpu;
    if (cpu > limits.cpu_ms) {
      report.violations.push_back({i, ViolationReason::CpuLimit});
      report.verdicts.push_back(FilterAction::kill());
      report.killed_at = i;
      break;
    }

    if (namespace_checked(ev.sc) && !ev.args.empty() && is_str(ev.args[0]) &&
        !path_visible(ns, as_str(ev.args[0]))) {
      report.violations.push_back({i, ViolationReason::PathHidden});
      FilterAction verdict = FilterAction::deny(kHiddenPathErrno);
      report.verdicts.push_back(verdict);
      SyscallEvent suppressed = ev;
      suppressed.ret = -static_cast<std::int64_t>(kHiddenPathErrno);
      report.enforced.events.push_back(std::move(suppressed));
      continue;
    }

    FilterAction action = evaluate(policy, ev);
    if (action.kind == FilterAction::Kind::Kill) {
      report.violations.push_back({i, ViolationReason::RuleKill});
      report.verdicts.push_back(action);
      report.killed_at = i;
      break;
    }
    if (action.kind == FilterAction::Kind::Deny) {
      report.violations.push_back({i, ViolationReason::RuleDeny});
      report.verdicts.push_back(action);
      SyscallEvent suppressed = ev;
      suppressed.ret = -static_cast<std::int64_t>(action.deny_errno);
      report.enforced.events.push_back(std::move(suppressed));
      continue;
    }

    // Allowed (Allow or Log): the syscall's resource effects happen.
    bool limit_kill = false;
    if ((ev.sc == sys_id(Sys::mmap) || ev.sc == sys_id(Sys::brk)) &&
        !ev.args.empty() && is_int(ev.args[0])) {
      mem += as_int(ev.args[0]);
      if (mem < 0) mem = 0;
      if (mem > report.mem_peak_bytes) report.mem_peak_bytes = mem;
      if (mem > limits.mem_bytes) {
        report.violations.push_back({i, ViolationReason::MemLimit});
        limit_kill = true;
      }
    } else if ((ev.sc == sys_id(Sys::fork) || ev.sc == sys_id(Sys::clone)) &&
               ev.ret >= 0) {
      live_pids += 1;
      if (live_pids > report.pid_peak) report.pid_peak = live_pids;
      if (live_pids > limits.max_pids) {
        report.violations.push_back({i, ViolationReason::PidLimit});
        limit_kill = true;
      }
    } else if (ev.sc == sys_id(Sys::exit) || ev.sc == sys_id(Sys::wait)) {
      if (live_pids > 1) live_pids -= 1;
    }
    if (limit_kill) {
      report.verdicts.push_back(FilterAction::kill());
      report.killed_at = i;
      break;
    }

    report.verdicts.push_back(action);
    report.enforced.events.push_back(ev);
  }

  return report;
}

}  // namespace gridward

#pragma once

// Shared test helpers: deterministic random model generators plus the
// independent reference implementations (oracles) the tests compare
// against. Oracles are written from the documented semantics, not from
// the library code paths they check.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "gridward/enforce.hpp"
#include "gridward/policy.hpp"
#include "gridward/prng.hpp"
#include "gridward/trace.hpp"

namespace testhelpers {

using gridward::ArgPredicate;
using gridward::ArgValue;
using gridward::FilterAction;
using gridward::FilterRule;
using gridward::Policy;
using gridward::SplitMix64;
using gridward::SyscallEvent;
using gridward::Trace;

inline const std::vector<std::string>& string_pool() {
  static const std::vector<std::string> pool = {
      "",
      "x",
      "/etc",
      "/etc/",
      "/etc/passwd",
      "/etc/passwd0",
      "/job/a/b",
      "/job/a",
      "/pilot/credentials/x509",
      "/data/run/file-01",
      "with space",
      "quote\"back\\slash",
      "/tmp/~probe",
  };
  return pool;
}

inline std::string random_string(SplitMix64& rng) {
  const auto& pool = string_pool();
  if (rng.next_below(2)) return pool[rng.next_below(pool.size())];
  std::string s;
  const std::size_t len = rng.next_below(24);
  for (std::size_t i = 0; i < len; ++i) {
    static const char chars[] =
        "abcdefghijklmnopqrstuvwxyz0123456789/._-\\\" ";
    s += chars[rng.next_below(sizeof(chars) - 1)];
  }
  return s;
}

inline ArgValue random_arg(SplitMix64& rng) {
  if (rng.next_below(2)) return std::int64_t(rng.next_range(-5, 20));
  return random_string(rng);
}

inline SyscallEvent random_event(SplitMix64& rng) {
  SyscallEvent ev;
  ev.t = std::int64_t(rng.next_below(1'000'000));
  ev.pid = 1 + std::int64_t(rng.next_below(30000));
  ev.sc = std::uint8_t(rng.next_below(gridward::kSyscallCount));
  const std::size_t nargs = rng.next_below(5);
  for (std::size_t i = 0; i < nargs; ++i) ev.args.push_back(random_arg(rng));
  ev.ret = rng.next_range(-64, 64);
  return ev;
}

inline Trace random_trace(SplitMix64& rng, std::size_t max_len,
                          bool label = false) {
  Trace trace;
  trace.meta.job_id = "t" + std::to_string(rng.next_below(100000));
  trace.meta.user = "grid01";
  if (label) trace.meta.profile_label = "reco";
  if (rng.next_below(2)) trace.meta.seed = rng.next();
  const std::size_t len = rng.next_below(max_len + 1);
  std::int64_t t = 0;
  for (std::size_t i = 0; i < len; ++i) {
    SyscallEvent ev = random_event(rng);
    t += std::int64_t(rng.next_below(100));  // ties allowed
    ev.t = t;
    trace.events.push_back(std::move(ev));
  }
  return trace;
}

inline FilterAction random_action(SplitMix64& rng) {
  switch (rng.next_below(4)) {
    case 0: return FilterAction::allow();
    case 1: return FilterAction::deny(std::uint8_t(1 + rng.next_below(133)));
    case 2: return FilterAction::kill();
    default: return FilterAction::log();
  }
}

inline Policy random_policy(SplitMix64& rng) {
  Policy p;
  p.name = "p" + std::to_string(rng.next_below(100000));
  p.default_action = random_action(rng);
  const std::size_t nrules = rng.next_below(7);
  for (std::size_t r = 0; r < nrules; ++r) {
    FilterRule rule;
    rule.action = random_action(rng);
    if (rng.next_below(6) == 0)
      rule.syscall = std::nullopt;
    else
      rule.syscall = std::uint8_t(rng.next_below(gridward::kSyscallCount));
    for (std::uint8_t k = 0; k < 4; ++k) {
      if (rng.next_below(4) != 0) continue;
      ArgPredicate pred;
      pred.index = k;
      switch (rng.next_below(3)) {
        case 0:
          pred.op = ArgPredicate::Op::EqInt;
          pred.value = std::int64_t(rng.next_range(-5, 20));
          break;
        case 1:
          pred.op = ArgPredicate::Op::EqStr;
          pred.value = string_pool()[rng.next_below(string_pool().size())];
          break;
        default:
          pred.op = ArgPredicate::Op::Prefix;
          pred.value = string_pool()[rng.next_below(string_pool().size())];
          break;
      }
      rule.predicates.push_back(std::move(pred));
    }
    p.rules.push_back(std::move(rule));
  }
  return p;
}

// ---------------------------------------------------------------- oracles

// First-match reference evaluator, written straight from the rule-list
// semantics with its own predicate logic.
inline FilterAction naive_evaluate(const Policy& policy,
                                   const SyscallEvent& ev) {
  for (const FilterRule& rule : policy.rules) {
    bool syscall_ok =
        !rule.syscall.has_value() || rule.syscall.value() == ev.sc;
    if (!syscall_ok) continue;
    bool all_hold = true;
    for (const ArgPredicate& pred : rule.predicates) {
      bool holds = false;
      if (pred.index < ev.args.size()) {
        const ArgValue& arg = ev.args[pred.index];
        if (pred.op == ArgPredicate::Op::EqInt) {
          holds = std::holds_alternative<std::int64_t>(arg) &&
                  std::get<std::int64_t>(arg) ==
                      std::get<std::int64_t>(pred.value);
        } else if (pred.op == ArgPredicate::Op::EqStr) {
          holds = std::holds_alternative<std::string>(arg) &&
                  std::get<std::string>(arg) ==
                      std::get<std::string>(pred.value);
        } else {
          if (std::holds_alternative<std::string>(arg)) {
            const std::string& s = std::get<std::string>(arg);
            const std::string& pre = std::get<std::string>(pred.value);
            holds = s.size() >= pre.size() &&
                    s.compare(0, pre.size(), pre) == 0;
          }
        }
      }
      if (!holds) {
        all_hold = false;
        break;
      }
    }
    if (!all_hold) continue;
    if (rule.action.kind == FilterAction::Kind::Log) continue;
    return rule.action;
  }
  return policy.default_action;
}

// Character-level reference emitter for the canonical trace format,
// built with nothing but manual escaping and sprintf-style integers.
inline std::string reference_render_trace(const Trace& trace) {
  auto esc = [](const std::string& s) {
    std::string out;
    for (unsigned char c : s) {
      if (c == '"') out += "\\\"";
      else if (c == '\\') out += "\\\\";
      else if (c == '\b') out += "\\b";
      else if (c == '\f') out += "\\f";
      else if (c == '\n') out += "\\n";
      else if (c == '\r') out += "\\r";
      else if (c == '\t') out += "\\t";
      else if (c < 0x20) {
        char buf[8];
        std::snprintf(buf, sizeof buf, "\\u%04x", c);
        out += buf;
      } else {
        out += char(c);
      }
    }
    return out;
  };
  std::string out;
  out += "{\"job\":\"" + esc(trace.meta.job_id) + "\",\"user\":\"" +
         esc(trace.meta.user) + "\",\"profile\":\"" +
         esc(trace.meta.profile_label ? *trace.meta.profile_label : "") +
         "\",\"seed\":" +
         std::to_string(trace.meta.seed ? *trace.meta.seed : 0) + "}\n";
  for (const SyscallEvent& ev : trace.events) {
    out += "{\"t\":" + std::to_string(ev.t) +
           ",\"pid\":" + std::to_string(ev.pid) + ",\"sc\":\"" +
           std::string(gridward::syscall_name(ev.sc)) + "\",\"args\":[";
    for (std::size_t i = 0; i < ev.args.size(); ++i) {
      if (i) out += ",";
      if (std::holds_alternative<std::int64_t>(ev.args[i]))
        out += std::to_string(std::get<std::int64_t>(ev.args[i]));
      else
        out += "\"" + esc(std::get<std::string>(ev.args[i])) + "\"";
    }
    out += "],\"ret\":" + std::to_string(ev.ret) + "}\n";
  }
  return out;
}

// Nested-loop stide oracle: the gram db is a plain list, membership is
// a linear scan, windows are materialized by index arithmetic.
struct StideOracleDb {
  int n;
  std::vector<std::vector<std::uint8_t>> grams;  // unique
};

inline StideOracleDb oracle_train_stide(const std::vector<Trace>& traces,
                                        int n) {
  StideOracleDb db;
  db.n = n;
  for (const Trace& trace : traces) {
    if (trace.events.size() < std::size_t(n)) continue;
    for (std::size_t i = 0; i + std::size_t(n) <= trace.events.size(); ++i) {
      std::vector<std::uint8_t> gram;
      for (int k = 0; k < n; ++k) gram.push_back(trace.events[i + k].sc);
      bool present = false;
      for (const auto& g : db.grams)
        if (g == gram) {
          present = true;
          break;
        }
      if (!present) db.grams.push_back(std::move(gram));
    }
  }
  return db;
}

inline double oracle_mismatch_rate(const StideOracleDb& db,
                                   const Trace& trace) {
  const std::size_t n = std::size_t(db.n);
  const std::size_t nwin = trace.events.size() - n + 1;
  std::size_t miss = 0;
  for (std::size_t i = 0; i < nwin; ++i) {
    std::vector<std::uint8_t> gram;
    for (std::size_t k = 0; k < n; ++k) gram.push_back(trace.events[i + k].sc);
    bool present = false;
    for (const auto& g : db.grams)
      if (g == gram) {
        present = true;
        break;
      }
    if (!present) ++miss;
  }
  return double(miss) / double(nwin);
}

// Independent byte-at-a-time FNV-1a 64.
inline std::uint64_t reference_fnv1a64(const std::vector<std::uint8_t>& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    hash = hash ^ bytes[i];
    hash = hash * 0x100000001b3ULL;
  }
  return hash;
}

// Brute-force enforcement oracle: replays the documented per-event
// pipeline (cpu charge, namespace, rules, resource effects) with plain
// counters and string reasons.
struct OracleEnforcement {
  std::optional<std::size_t> killed_at;
  std::vector<std::pair<std::size_t, std::string>> violations;
  std::size_t enforced_events = 0;
  std::int64_t cpu = 0;
};

inline OracleEnforcement oracle_enforce(const Policy& policy,
                                        const std::vector<std::string>& visible,
                                        std::int64_t cpu_ms,
                                        std::int64_t mem_bytes,
                                        std::int64_t max_pids,
                                        const Trace& trace) {
  OracleEnforcement out;
  std::int64_t mem = 0;
  std::int64_t live = 1;
  for (std::size_t i = 0; i < trace.events.size(); ++i) {
    const SyscallEvent& ev = trace.events[i];
    out.cpu += 1;
    if (out.cpu > cpu_ms) {
      out.violations.emplace_back(i, "cpu-limit");
      out.killed_at = i;
      return out;
    }
    const bool path_checked =
        ev.sc == gridward::sys_id(gridward::Sys::open) ||
        ev.sc == gridward::sys_id(gridward::Sys::stat) ||
        ev.sc == gridward::sys_id(gridward::Sys::access) ||
        ev.sc == gridward::sys_id(gridward::Sys::execve) ||
        ev.sc == gridward::sys_id(gridward::Sys::chmod) ||
        ev.sc == gridward::sys_id(gridward::Sys::chown) ||
        ev.sc == gridward::sys_id(gridward::Sys::getdents);
    if (path_checked && !ev.args.empty() &&
        std::holds_alternative<std::string>(ev.args[0])) {
      const std::string& path = std::get<std::string>(ev.args[0]);
      bool ok = false;
      for (const std::string& v : visible)
        if (path.size() >= v.size() && path.compare(0, v.size(), v) == 0)
          ok = true;
      if (!ok) {
        out.violations.emplace_back(i, "path-hidden");
        ++out.enforced_events;
        continue;
      }
    }
    FilterAction action = naive_evaluate(policy, ev);
    if (action.kind == FilterAction::Kind::Kill) {
      out.violations.emplace_back(i, "rule-kill");
      out.killed_at = i;
      return out;
    }
    if (action.kind == FilterAction::Kind::Deny) {
      out.violations.emplace_back(i, "rule-deny");
      ++out.enforced_events;
      continue;
    }
    if ((ev.sc == gridward::sys_id(gridward::Sys::mmap) ||
         ev.sc == gridward::sys_id(gridward::Sys::brk)) &&
        !ev.args.empty() &&
        std::holds_alternative<std::int64_t>(ev.args[0])) {
      mem += std::get<std::int64_t>(ev.args[0]);
      if (mem < 0) mem = 0;
      if (mem > mem_bytes) {
        out.violations.emplace_back(i, "mem-limit");
        out.killed_at = i;
        return out;
      }
    } else if ((ev.sc == gridward::sys_id(gridward::Sys::fork) ||
                ev.sc == gridward::sys_id(gridward::Sys::clone)) &&
               ev.ret >= 0) {
      live += 1;
      if (live > max_pids) {
        out.violations.emplace_back(i, "pid-limit");
        out.killed_at = i;
        return out;
      }
    } else if (ev.sc == gridward::sys_id(gridward::Sys::exit) ||
               ev.sc == gridward::sys_id(gridward::Sys::wait)) {
      if (live > 1) live -= 1;
    }
    ++out.enforced_events;
  }
  return out;
}

}  // namespace testhelpers

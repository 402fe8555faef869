#include <catch2/catch_amalgamated.hpp>

#include "gridward/enforce.hpp"
#include "gridward/policy_io.hpp"

#include "helpers.hpp"

using namespace gridward;
using testhelpers::oracle_enforce;
using testhelpers::random_policy;
using testhelpers::random_trace;

namespace {

Trace trace_of(std::vector<SyscallEvent> events) {
  Trace t;
  t.meta.job_id = "job";
  t.meta.user = "grid01";
  std::int64_t clock = 0;
  for (SyscallEvent& ev : events) {
    ev.t = clock++;
    if (ev.pid <= 0) ev.pid = 1;
    t.events.push_back(std::move(ev));
  }
  return t;
}

SyscallEvent ev_of(Sys s, std::vector<ArgValue> args = {},
                   std::int64_t ret = 0) {
  SyscallEvent ev;
  ev.sc = sys_id(s);
  ev.args = std::move(args);
  ev.ret = ret;
  return ev;
}

NamespaceConfig open_ns() {
  NamespaceConfig ns;
  ns.uid_map = {{0, 100000}};
  ns.visible_paths = {"/"};
  return ns;
}

ResourceLimits ample() { return {1'000'000, 1'000'000'000'000, 1'000'000}; }

}  // namespace

TEST_CASE("benign trace under a permissive policy is untouched") {
  Policy p = parse_policy("policy p\ndefault allow\n");
  Trace t = trace_of({ev_of(Sys::open, {std::string("/job/a")}),
                      ev_of(Sys::read, {std::int64_t{3}}),
                      ev_of(Sys::write, {std::int64_t{3}}),
                      ev_of(Sys::close, {std::int64_t{3}})});
  EnforcementReport rep = enforce(p, open_ns(), ample(), t);
  REQUIRE(rep.violations.empty());
  REQUIRE_FALSE(rep.killed_at.has_value());
  REQUIRE(rep.enforced == t);
  REQUIRE(rep.verdicts.size() == 4);
  REQUIRE(rep.cpu_used_ms == 4);
}

TEST_CASE("rule kill truncates at the matched index") {
  Policy p = parse_policy("policy p\ndefault allow\nkill ptrace\n");
  Trace t = trace_of({ev_of(Sys::read), ev_of(Sys::write), ev_of(Sys::ptrace),
                      ev_of(Sys::read)});
  EnforcementReport rep = enforce(p, open_ns(), ample(), t);
  REQUIRE(rep.killed_at == 2);
  REQUIRE(rep.enforced.events.size() == 2);
  REQUIRE(rep.violations.size() == 1);
  REQUIRE(rep.violations[0].event_index == 2);
  REQUIRE(rep.violations[0].reason == ViolationReason::RuleKill);
  REQUIRE(rep.verdicts.size() == 3);  // the killing event keeps its verdict
  REQUIRE(rep.verdicts[2] == FilterAction::kill());
}

TEST_CASE("ten clones against max_pids 5 die when the count would reach 6") {
  Policy p = parse_policy("policy p\ndefault allow\n");
  std::vector<SyscallEvent> events;
  for (int i = 0; i < 10; ++i) events.push_back(ev_of(Sys::clone, {}, 1));
  Trace t = trace_of(std::move(events));
  ResourceLimits limits{1'000'000, 1'000'000'000, 5};
  EnforcementReport rep = enforce(p, open_ns(), limits, t);
  REQUIRE(rep.killed_at == 4);  // live count 1 -> 6 on the fifth clone
  REQUIRE(rep.enforced.events.size() == 4);
  REQUIRE(rep.violations.size() == 1);
  REQUIRE(rep.violations[0].reason == ViolationReason::PidLimit);
  REQUIRE(rep.pid_peak == 6);
}

TEST_CASE("exit and wait release pids with a floor of one") {
  Policy p = parse_policy("policy p\ndefault allow\n");
  std::vector<SyscallEvent> events;
  for (int round = 0; round < 8; ++round) {
    events.push_back(ev_of(Sys::clone, {}, 1));
    events.push_back(ev_of(Sys::wait));
  }
  Trace t = trace_of(std::move(events));
  ResourceLimits limits{1'000'000, 1'000'000'000, 2};
  EnforcementReport rep = enforce(p, open_ns(), limits, t);
  REQUIRE_FALSE(rep.killed_at.has_value());  // count oscillates 1 <-> 2
}

TEST_CASE("hidden paths are denied with errno 13 and kept in the trace") {
  Policy p = parse_policy("policy p\ndefault allow\n");
  NamespaceConfig ns;
  ns.uid_map = {{0, 100000}};
  ns.visible_paths = {"/job"};
  Trace t = trace_of({ev_of(Sys::open, {std::string("/job/a/in.dat")}, 3),
                      ev_of(Sys::open, {std::string("/etc/passwd")}, 3),
                      ev_of(Sys::read, {std::int64_t{3}})});
  EnforcementReport rep = enforce(p, ns, ample(), t);
  REQUIRE_FALSE(rep.killed_at.has_value());
  REQUIRE(rep.enforced.events.size() == 3);
  REQUIRE(rep.violations.size() == 1);
  REQUIRE(rep.violations[0] ==
          Violation{1, ViolationReason::PathHidden});
  REQUIRE(rep.verdicts[1] == FilterAction::deny(13));
  REQUIRE(rep.enforced.events[1].ret == -13);
  REQUIRE(rep.enforced.events[0].ret == 3);  // visible path untouched
}

TEST_CASE("the namespace boundary is not bypassable by a permissive rule") {
  Policy p = parse_policy("policy p\ndefault kill\nallow open\n");
  NamespaceConfig ns;
  ns.uid_map = {{0, 100000}};
  ns.visible_paths = {"/job"};
  Trace t = trace_of({ev_of(Sys::open, {std::string("/etc/shadow")}, 3)});
  EnforcementReport rep = enforce(p, ns, ample(), t);
  REQUIRE(rep.verdicts[0] == FilterAction::deny(13));
  REQUIRE(rep.violations.size() == 1);
  REQUIRE(rep.violations[0].reason == ViolationReason::PathHidden);
}

TEST_CASE("rule deny rewrites ret and does not kill") {
  Policy p = parse_policy(
      "policy p\ndefault allow\ndeny 7 open if arg0 prefix \"/etc\"\n");
  Trace t = trace_of({ev_of(Sys::open, {std::string("/etc/hosts")}, 3),
                      ev_of(Sys::read, {std::int64_t{3}})});
  EnforcementReport rep = enforce(p, open_ns(), ample(), t);
  REQUIRE_FALSE(rep.killed_at.has_value());
  REQUIRE(rep.enforced.events[0].ret == -7);
  REQUIRE(rep.violations.size() == 1);
  REQUIRE(rep.violations[0].reason == ViolationReason::RuleDeny);
}

TEST_CASE("cpu budget kills at the first over-budget event") {
  Policy p = parse_policy("policy p\ndefault allow\n");
  Trace t = trace_of({ev_of(Sys::read), ev_of(Sys::read), ev_of(Sys::read),
                      ev_of(Sys::read), ev_of(Sys::read)});
  ResourceLimits limits{3, 1'000'000'000, 100};
  EnforcementReport rep = enforce(p, open_ns(), limits, t);
  REQUIRE(rep.killed_at == 3);
  REQUIRE(rep.enforced.events.size() == 3);
  REQUIRE(rep.cpu_used_ms == 4);  // the killing event is charged
  REQUIRE(rep.violations[0].reason == ViolationReason::CpuLimit);
}

TEST_CASE("mmap and brk accumulate toward the memory ceiling") {
  Policy p = parse_policy("policy p\ndefault allow\n");
  Trace t = trace_of({ev_of(Sys::mmap, {std::int64_t{4096}}),
                      ev_of(Sys::brk, {std::int64_t{4096}}),
                      ev_of(Sys::mmap, {std::int64_t{8192}})});
  ResourceLimits limits{1'000'000, 10000, 100};
  EnforcementReport rep = enforce(p, open_ns(), limits, t);
  REQUIRE(rep.killed_at == 2);  // 4096+4096+8192 > 10000
  REQUIRE(rep.violations[0].reason == ViolationReason::MemLimit);
  REQUIRE(rep.mem_peak_bytes == 16384);

  SECTION("denied allocations have no memory effect") {
    Policy deny_mmap = parse_policy("policy p\ndefault allow\ndeny 12 mmap\n");
    EnforcementReport rep2 = enforce(deny_mmap, open_ns(), limits, t);
    REQUIRE_FALSE(rep2.killed_at.has_value());
    REQUIRE(rep2.mem_peak_bytes == 4096);  // only the brk lands
  }
}

TEST_CASE("namespace and limit validation") {
  NamespaceConfig ns;
  ns.visible_paths = {"/job"};
  REQUIRE_THROWS_AS(validate_namespace(ns), InvalidArgument);  // no uid map
  ns.uid_map = {{0, 0}};
  REQUIRE_THROWS_AS(validate_namespace(ns), InvalidArgument);
  ns.uid_map = {{0, 999}};
  REQUIRE_THROWS_AS(validate_namespace(ns), InvalidArgument);
  ns.uid_map = {{0, 100000}, {5, 100005}};
  REQUIRE_NOTHROW(validate_namespace(ns));
  ns.visible_paths.clear();
  REQUIRE_THROWS_AS(validate_namespace(ns), InvalidArgument);

  REQUIRE_THROWS_AS(validate_limits({0, 1, 1}), InvalidArgument);
  REQUIRE_THROWS_AS(validate_limits({1, -1, 1}), InvalidArgument);
  REQUIRE_NOTHROW(validate_limits({1, 1, 1}));
}

TEST_CASE("enforcement agrees with the brute-force oracle on random input") {
  SplitMix64 rng(555);
  const std::vector<std::string> visible = {"/job", "/data"};
  NamespaceConfig ns;
  ns.uid_map = {{0, 100000}};
  ns.visible_paths = visible;
  for (int i = 0; i < 400; ++i) {
    Policy p = random_policy(rng);
    Trace t = random_trace(rng, 60);
    ResourceLimits limits{std::int64_t(1 + rng.next_below(80)),
                          std::int64_t(1 + rng.next_below(1 << 20)),
                          std::int64_t(1 + rng.next_below(12))};
    EnforcementReport rep = enforce(p, ns, limits, t);
    auto oracle = oracle_enforce(p, visible, limits.cpu_ms, limits.mem_bytes,
                                 limits.max_pids, t);
    REQUIRE(rep.killed_at == oracle.killed_at);
    REQUIRE(rep.enforced.events.size() == oracle.enforced_events);
    REQUIRE(rep.cpu_used_ms == oracle.cpu);
    REQUIRE(rep.violations.size() == oracle.violations.size());
    for (std::size_t v = 0; v < oracle.violations.size(); ++v) {
      REQUIRE(rep.violations[v].event_index == oracle.violations[v].first);
      REQUIRE(std::string(violation_reason_name(rep.violations[v].reason)) ==
              oracle.violations[v].second);
    }
  }
}

TEST_CASE("enforced events are a prefix modulo deny ret-rewrites") {
  SplitMix64 rng(808);
  NamespaceConfig ns;
  ns.uid_map = {{0, 100000}};
  ns.visible_paths = {"/job"};
  for (int i = 0; i < 200; ++i) {
    Policy p = random_policy(rng);
    Trace t = random_trace(rng, 40);
    ResourceLimits limits{std::int64_t(1 + rng.next_below(60)),
                          std::int64_t(1 + rng.next_below(1 << 22)),
                          std::int64_t(1 + rng.next_below(10))};
    EnforcementReport rep = enforce(p, ns, limits, t);
    REQUIRE(rep.enforced.events.size() <= t.events.size());
    if (rep.killed_at)
      REQUIRE(rep.enforced.events.size() == *rep.killed_at);
    REQUIRE(rep.cpu_used_ms ==
            std::int64_t(rep.verdicts.size()));  // 1 ms per processed event
    REQUIRE(rep.cpu_used_ms <= limits.cpu_ms + 1);
    for (std::size_t k = 0; k < rep.enforced.events.size(); ++k) {
      const SyscallEvent& orig = t.events[k];
      const SyscallEvent& enf = rep.enforced.events[k];
      REQUIRE(enf.t == orig.t);
      REQUIRE(enf.pid == orig.pid);
      REQUIRE(enf.sc == orig.sc);
      REQUIRE(enf.args == orig.args);
      if (rep.verdicts[k].kind == FilterAction::Kind::Deny)
        REQUIRE(enf.ret == -std::int64_t(rep.verdicts[k].deny_errno));
      else
        REQUIRE(enf.ret == orig.ret);
    }
  }
}

TEST_CASE("namespace soundness: no allowed open escapes the visible set") {
  SplitMix64 rng(909);
  NamespaceConfig ns;
  ns.uid_map = {{0, 100000}};
  ns.visible_paths = {"/job"};
  for (int i = 0; i < 200; ++i) {
    Policy p = random_policy(rng);
    Trace t = random_trace(rng, 40);
    EnforcementReport rep = enforce(p, ns, ample(), t);
    for (std::size_t k = 0; k < rep.enforced.events.size(); ++k) {
      const SyscallEvent& ev = rep.enforced.events[k];
      if (ev.sc != sys_id(Sys::open) || ev.args.empty() ||
          !is_str(ev.args[0]))
        continue;
      if (as_str(ev.args[0]).starts_with("/job")) continue;
      const FilterAction::Kind kind = rep.verdicts[k].kind;
      REQUIRE(kind == FilterAction::Kind::Deny);
    }
  }
}

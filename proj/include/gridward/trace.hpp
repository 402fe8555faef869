#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gridward/errors.hpp"
#include "gridward/syscalls.hpp"

namespace gridward {

inline constexpr std::size_t kMaxArgs = 4;
inline constexpr std::size_t kMaxArgStringBytes = 256;

// Tagged syscall argument: signed 64-bit integer or short text string.
using ArgValue = std::variant<std::int64_t, std::string>;

inline bool is_int(const ArgValue& v) { return v.index() == 0; }
inline bool is_str(const ArgValue& v) { return v.index() == 1; }
inline std::int64_t as_int(const ArgValue& v) { return std::get<0>(v); }
inline const std::string& as_str(const ArgValue& v) { return std::get<1>(v); }

struct SyscallEvent {
  std::int64_t t = 0;   // per-job clock, nanoseconds from 0, non-decreasing
  std::int64_t pid = 1; // positive
  std::uint8_t sc = 0;  // id into the 32-entry alphabet
  std::vector<ArgValue> args;  // at most kMaxArgs
  std::int64_t ret = 0;

  bool operator==(const SyscallEvent&) const = default;
};

struct JobMetadata {
  std::string job_id;
  std::string user;
  std::optional<std::string> profile_label;  // ground truth, simulator only
  std::optional<std::uint64_t> seed;

  bool operator==(const JobMetadata&) const = default;
};

struct Trace {
  JobMetadata meta;
  std::vector<SyscallEvent> events;

  bool operator==(const Trace&) const = default;
};

// Throws InvalidArgument on any structural violation. Parsed traces are
// validated line by line instead so errors carry line numbers.
inline void validate_trace(const Trace& trace) {
  if (trace.meta.job_id.empty()) throw InvalidArgument("empty job_id");
  std::int64_t prev_t = 0;
  bool first = true;
  for (const SyscallEvent& ev : trace.events) {
    if (ev.pid <= 0) throw InvalidArgument("non-positive pid");
    if (ev.sc >= kSyscallCount) throw InvalidArgument("syscall id out of range");
    if (ev.args.size() > kMaxArgs) throw InvalidArgument("more than 4 args");
    for (const ArgValue& a : ev.args) {
      if (is_str(a) && as_str(a).size() > kMaxArgStringBytes)
        throw InvalidArgument("string arg longer than 256 bytes");
    }
    if (!first && ev.t < prev_t)
      throw InvalidArgument("non-monotonic timestamps");
    prev_t = ev.t;
    first = false;
  }
}

inline std::vector<std::uint8_t> event_ids(const Trace& trace) {
  std::vector<std::uint8_t> ids;
  ids.reserve(trace.events.size());
  for (const SyscallEvent& ev : trace.events) ids.push_back(ev.sc);
  return ids;
}

// Overlapping n-grams of syscall ids, in trace order. Traces shorter
// than n yield zero windows.
inline std::vector<std::vector<std::uint8_t>> windows(const Trace& trace,
                                                      int n) {
  if (n < 1) throw InvalidArgument("window length must be >= 1");
  std::vector<std::vector<std::uint8_t>> out;
  const std::size_t len = trace.events.size();
  const std::size_t un = static_cast<std::size_t>(n);
  if (len < un) return out;
  out.reserve(len - un + 1);
  for (std::size_t i = 0; i + un <= len; ++i) {
    std::vector<std::uint8_t> w(un);
    for (std::size_t k = 0; k < un; ++k) w[k] = trace.events[i + k].sc;
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace gridward

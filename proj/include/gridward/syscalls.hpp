#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace gridward {

// The closed 32-entry syscall alphabet. Ids are dense and stable; the
// array order *is* the id assignment and must never be reordered.
inline constexpr std::array<std::string_view, 32> kSyscallNames = {
    "read",   "write",  "open",   "close",  "stat",    "mmap",
    "brk",    "ioctl",  "access", "pipe",   "dup",     "socket",
    "connect", "accept", "send",   "recv",  "bind",    "listen",
    "fork",   "clone",  "execve", "exit",   "wait",    "kill",
    "ptrace", "setuid", "setgid", "chmod",  "chown",   "mount",
    "unshare", "getdents"};

inline constexpr std::size_t kSyscallCount = kSyscallNames.size();

enum class Sys : std::uint8_t {
  read = 0,
  write,
  open,
  close,
  stat,
  mmap,
  brk,
  ioctl,
  access,
  pipe,
  dup,
  socket,
  connect,
  accept,
  send,
  recv,
  bind,
  listen,
  fork,
  clone,
  execve,
  exit,
  wait,
  kill,
  ptrace,
  setuid,
  setgid,
  chmod,
  chown,
  mount,
  unshare,
  getdents,
};

constexpr std::uint8_t sys_id(Sys s) { return static_cast<std::uint8_t>(s); }

constexpr std::string_view syscall_name(std::uint8_t id) {
  return kSyscallNames[id];
}

// Unknown names map to nullopt; the alphabet is closed and parsing an
// unknown name is always the caller's error to report.
inline std::optional<std::uint8_t> syscall_id(std::string_view name) {
  for (std::size_t i = 0; i < kSyscallCount; ++i) {
    if (kSyscallNames[i] == name) return static_cast<std::uint8_t>(i);
  }
  return std::nullopt;
}

}  // namespace gridward

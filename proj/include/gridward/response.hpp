#pragma once

#include <algorithm>
#include <cerrno>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <json.hpp>

#include "gridward/bundle.hpp"
#include "gridward/errors.hpp"

namespace gridward {

enum class ReactionAction : std::uint8_t { None, Alert, Suspend, Kill };

inline std::string_view reaction_action_name(ReactionAction a) {
  switch (a) {
    case ReactionAction::None: return "none";
    case ReactionAction::Alert: return "alert";
    case ReactionAction::Suspend: return "suspend";
    case ReactionAction::Kill: return "kill";
  }
  return "?";
}

// Graduated bands over the score-excess ratio r = max(score/threshold)
// across enabled detectors. Scale-free, so one policy serves detectors
// with incomparable score units.
struct ReactionPolicy {
  double warn_ratio = 1.5;
  double kill_ratio = 3.0;
};

inline void validate_reaction_policy(const ReactionPolicy& p) {
  if (!(1.0 < p.warn_ratio) || !(p.warn_ratio < p.kill_ratio))
    throw InvalidArgument("need 1 < warn_ratio < kill_ratio");
}

inline ReactionAction decide_action(const DetectionResult& result,
                                    const DetectorThresholds& thresholds,
                                    bool ocsvm_enabled,
                                    const ReactionPolicy& policy) {
  validate_reaction_policy(policy);
  if (!(thresholds.stide > 0.0) || !(thresholds.lfc > 0.0) ||
      (ocsvm_enabled && !(thresholds.ocsvm > 0.0)))
    throw InvalidArgument("reaction bands need strictly positive thresholds");
  double r = result.mismatch_rate / thresholds.stide;
  r = std::max(r, result.lfc_score / thresholds.lfc);
  if (ocsvm_enabled) r = std::max(r, result.ocsvm_score / thresholds.ocsvm);
  if (r <= 1.0) return ReactionAction::None;
  if (r <= policy.warn_ratio) return ReactionAction::Alert;
  if (r <= policy.kill_ratio) return ReactionAction::Suspend;
  return ReactionAction::Kill;
}

struct Alert {
  std::int64_t time = 0;  // trace-clock ns, deterministic
  std::string job_id;
  std::uint32_t worker = 0;
  ReactionAction action = ReactionAction::Alert;
  double stide_score = 0.0;
  double lfc_score = 0.0;
  double ocsvm_score = 0.0;
  DetectorThresholds thresholds;
  std::vector<std::vector<std::uint8_t>> evidence;
  std::string truth;  // ground-truth label when simulator-provided
};

// One JSONL line, LF appended by the sinks.
inline std::string alert_to_json(const Alert& alert) {
  nlohmann::ordered_json j;
  j["t"] = alert.time;
  j["job"] = alert.job_id;
  j["worker"] = alert.worker;
  j["action"] = std::string(reaction_action_name(alert.action));
  j["scores"] = {{"stide", alert.stide_score},
                 {"lfc", alert.lfc_score},
                 {"ocsvm", alert.ocsvm_score}};
  j["thresholds"] = {{"stide", alert.thresholds.stide},
                     {"lfc", alert.thresholds.lfc},
                     {"ocsvm", alert.thresholds.ocsvm}};
  nlohmann::ordered_json ev = nlohmann::ordered_json::array();
  for (const auto& gram : alert.evidence) {
    nlohmann::ordered_json ids = nlohmann::ordered_json::array();
    for (std::uint8_t id : gram) ids.push_back(id);
    ev.push_back(std::move(ids));
  }
  j["evidence"] = std::move(ev);
  j["truth"] = alert.truth;
  return j.dump();
}

inline Alert parse_alert(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed alert: ") + e.what());
  }
  Alert alert;
  try {
    alert.time = j.at("t").get<std::int64_t>();
    alert.job_id = j.at("job").get<std::string>();
    alert.worker = j.at("worker").get<std::uint32_t>();
    const std::string action = j.at("action").get<std::string>();
    if (action == "alert")
      alert.action = ReactionAction::Alert;
    else if (action == "suspend")
      alert.action = ReactionAction::Suspend;
    else if (action == "kill")
      alert.action = ReactionAction::Kill;
    else
      throw ParseError("bad alert action \"" + action + "\"");
    alert.stide_score = j.at("scores").at("stide").get<double>();
    alert.lfc_score = j.at("scores").at("lfc").get<double>();
    alert.ocsvm_score = j.at("scores").at("ocsvm").get<double>();
    alert.thresholds.stide = j.at("thresholds").at("stide").get<double>();
    alert.thresholds.lfc = j.at("thresholds").at("lfc").get<double>();
    alert.thresholds.ocsvm = j.at("thresholds").at("ocsvm").get<double>();
    for (const auto& gram : j.at("evidence")) {
      std::vector<std::uint8_t> ids;
      for (const auto& id : gram) ids.push_back(id.get<std::uint8_t>());
      alert.evidence.push_back(std::move(ids));
    }
    alert.truth = j.at("truth").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed alert: ") + e.what());
  }
  return alert;
}

// Cumulative per-sink counters. buffered is the current backlog size.
struct DeliveryRecord {
  std::uint64_t delivered = 0;
  std::uint64_t buffered = 0;
  std::uint64_t dropped = 0;
};

class AlertSink {
 public:
  virtual ~AlertSink() = default;
  // Takes one JSON line without trailing newline. Never throws.
  virtual DeliveryRecord emit(const std::string& line) = 0;
  virtual DeliveryRecord record() const = 0;
};

// Appends one LF-terminated line per alert with a single write() so
// concurrent emitters may interleave lines but never corrupt them.
class FileSink : public AlertSink {
 public:
  explicit FileSink(const std::string& path) {
    fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    if (fd_ < 0) throw IoError("cannot open alert file " + path);
  }
  ~FileSink() override {
    if (fd_ >= 0) ::close(fd_);
  }
  FileSink(const FileSink&) = delete;
  FileSink& operator=(const FileSink&) = delete;

  DeliveryRecord emit(const std::string& line) override {
    std::lock_guard lock(mu_);
    std::string buf = line + "\n";
    ssize_t n = ::write(fd_, buf.data(), buf.size());
    if (n == static_cast<ssize_t>(buf.size()))
      ++record_.delivered;
    else
      ++record_.dropped;
    return record_;
  }

  DeliveryRecord record() const override {
    std::lock_guard lock(mu_);
    return record_;
  }

 private:
  int fd_ = -1;
  mutable std::mutex mu_;
  DeliveryRecord record_;
};

inline constexpr std::size_t kTcpSinkBufferCap = 1000;

// Plain LF-delimited JSONL over TCP. Disconnects are tolerated by
// buffering up to kTcpSinkBufferCap lines, then dropping the oldest.
class TcpSink : public AlertSink {
 public:
  TcpSink(std::string host, std::uint16_t port, int connect_timeout_ms = 100)
      : host_(std::move(host)),
        port_(port),
        connect_timeout_ms_(connect_timeout_ms) {}

  ~TcpSink() override {
    if (fd_ >= 0) ::close(fd_);
  }
  TcpSink(const TcpSink&) = delete;
  TcpSink& operator=(const TcpSink&) = delete;

  DeliveryRecord emit(const std::string& line) override {
    std::lock_guard lock(mu_);
    backlog_.push_back(line + "\n");
    trim_backlog();
    flush_locked();
    record_.buffered = backlog_.size();
    return record_;
  }

  DeliveryRecord record() const override {
    std::lock_guard lock(mu_);
    return record_;
  }

  std::size_t pending() const {
    std::lock_guard lock(mu_);
    return backlog_.size();
  }

  std::string pending_front() const {
    std::lock_guard lock(mu_);
    return backlog_.empty() ? std::string() : backlog_.front();
  }

 private:
  void trim_backlog() {
    while (backlog_.size() > kTcpSinkBufferCap) {
      backlog_.pop_front();
      ++record_.dropped;
    }
  }

  void flush_locked() {
    if (fd_ < 0 && !connect_locked()) return;
    while (!backlog_.empty()) {
      const std::string& msg = backlog_.front();
      std::size_t off = 0;
      while (off < msg.size()) {
        ssize_t n = ::send(fd_, msg.data() + off, msg.size() - off,
                           MSG_NOSIGNAL);
        if (n <= 0) {
          ::close(fd_);
          fd_ = -1;
          return;  // keep the line buffered, retry on the next emit
        }
        off += static_cast<std::size_t>(n);
      }
      backlog_.pop_front();
      ++record_.delivered;
    }
  }

  bool connect_locked() {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const std::string port_str = std::to_string(port_);
    if (::getaddrinfo(host_.c_str(), port_str.c_str(), &hints, &res) != 0)
      return false;
    bool ok = false;
    for (addrinfo* ai = res; ai && !ok; ai = ai->ai_next) {
      int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_NONBLOCK,
                        ai->ai_protocol);
      if (fd < 0) continue;
      int rc = ::connect(fd, ai->ai_addr, ai->ai_addrlen);
      if (rc != 0 && errno == EINPROGRESS) {
        pollfd pfd{fd, POLLOUT, 0};
        if (::poll(&pfd, 1, connect_timeout_ms_) == 1) {
          int err = 0;
          socklen_t len = sizeof err;
          ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len);
          rc = err == 0 ? 0 : -1;
        } else {
          rc = -1;
        }
      }
      if (rc == 0) {
        fd_ = fd;
        ok = true;
      } else {
        ::close(fd);
      }
    }
    ::freeaddrinfo(res);
    return ok;
  }

  std::string host_;
  std::uint16_t port_;
  int connect_timeout_ms_;
  int fd_ = -1;
  mutable std::mutex mu_;
  std::deque<std::string> backlog_;
  DeliveryRecord record_;
};

// Renders once and fans out; sink failures end up in the per-sink
// records, never as exceptions.
inline std::vector<DeliveryRecord> emit_alert(
    const Alert& alert, std::span<const std::unique_ptr<AlertSink>> sinks) {
  const std::string line = alert_to_json(alert);
  std::vector<DeliveryRecord> records;
  records.reserve(sinks.size());
  for (const std::unique_ptr<AlertSink>& sink : sinks)
    records.push_back(sink->emit(line));
  return records;
}

}  // namespace gridward

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include "gridward/response.hpp"

using namespace gridward;

namespace {

DetectionResult result_of(double stide, double lfc, double ocsvm) {
  DetectionResult r;
  r.job_id = "w0-j0";
  r.mismatch_rate = stide;
  r.lfc_score = lfc;
  r.ocsvm_score = ocsvm;
  r.malicious = false;
  return r;
}

int action_rank(ReactionAction a) { return int(a); }

Alert sample_alert(ReactionAction action = ReactionAction::Kill) {
  Alert alert;
  alert.time = 123456;
  alert.job_id = "w2-j7";
  alert.worker = 2;
  alert.action = action;
  alert.stide_score = 0.42;
  alert.lfc_score = 0.8;
  alert.ocsvm_score = 0.0125;
  alert.thresholds = {0.01, 0.05, 0.001};
  alert.evidence = {{2, 0, 1, 3, 2}, {24, 25, 26, 20, 8}};
  alert.truth = "escape-privesc";
  return alert;
}

}  // namespace

TEST_CASE("decide_action follows the score-excess bands") {
  DetectorThresholds th{0.1, 0.2, 0.5};
  ReactionPolicy pol;  // warn 1.5, kill 3.0

  SECTION("scores at or under thresholds do nothing") {
    REQUIRE(decide_action(result_of(0.1, 0.2, 0.5), th, true, pol) ==
            ReactionAction::None);
    REQUIRE(decide_action(result_of(0.0, 0.0, -1.0), th, true, pol) ==
            ReactionAction::None);
  }
  SECTION("mismatch 0.5 over threshold 0.1 means r=5: kill") {
    REQUIRE(decide_action(result_of(0.5, 0.0, 0.0), th, true, pol) ==
            ReactionAction::Kill);
  }
  SECTION("r exactly at warn_ratio stays an alert") {
    REQUIRE(decide_action(result_of(0.15, 0.0, 0.0), th, true, pol) ==
            ReactionAction::Alert);  // r = 1.5 inclusive upper edge
  }
  SECTION("r exactly at kill_ratio stays a suspend") {
    REQUIRE(decide_action(result_of(0.3, 0.0, 0.0), th, true, pol) ==
            ReactionAction::Suspend);  // r = 3.0
  }
  SECTION("disabled ocsvm is ignored") {
    REQUIRE(decide_action(result_of(0.0, 0.0, 99.0), th, false, pol) ==
            ReactionAction::None);
  }
  SECTION("non-positive thresholds are rejected") {
    DetectorThresholds zero{0.0, 0.2, 0.5};
    REQUIRE_THROWS_AS(decide_action(result_of(0, 0, 0), zero, true, pol),
                      InvalidArgument);
  }
  SECTION("band ratios are validated") {
    REQUIRE_THROWS_AS(
        decide_action(result_of(0, 0, 0), th, true, ReactionPolicy{3.0, 1.5}),
        InvalidArgument);
    REQUIRE_THROWS_AS(
        decide_action(result_of(0, 0, 0), th, true, ReactionPolicy{1.0, 2.0}),
        InvalidArgument);
  }
}

TEST_CASE("raising any score never weakens the action") {
  SplitMix64 rng(777);
  ReactionPolicy pol;
  for (int i = 0; i < 500; ++i) {
    DetectorThresholds th{0.01 + rng.next_double(), 0.01 + rng.next_double(),
                          0.01 + rng.next_double()};
    DetectionResult r = result_of(rng.next_double() * 2.0,
                                  rng.next_double() * 2.0,
                                  rng.next_double() * 2.0);
    const int base = action_rank(decide_action(r, th, true, pol));
    DetectionResult bumped = r;
    switch (rng.next_below(3)) {
      case 0: bumped.mismatch_rate += rng.next_double(); break;
      case 1: bumped.lfc_score += rng.next_double(); break;
      default: bumped.ocsvm_score += rng.next_double(); break;
    }
    REQUIRE(action_rank(decide_action(bumped, th, true, pol)) >= base);
  }
}

TEST_CASE("kill decisions imply a malicious verdict") {
  SplitMix64 rng(888);
  ReactionPolicy pol;
  for (int i = 0; i < 500; ++i) {
    DetectorThresholds th{0.01 + rng.next_double(), 0.01 + rng.next_double(),
                          0.01 + rng.next_double()};
    DetectionResult r = result_of(rng.next_double() * 4.0,
                                  rng.next_double() * 4.0,
                                  rng.next_double() * 4.0);
    r.malicious = r.mismatch_rate > th.stide || r.lfc_score > th.lfc ||
                  r.ocsvm_score > th.ocsvm;
    if (decide_action(r, th, true, pol) == ReactionAction::Kill)
      REQUIRE(r.malicious);
  }
}

TEST_CASE("alerts round-trip through the parser") {
  const Alert alert = sample_alert();
  const std::string line = alert_to_json(alert);
  const Alert back = parse_alert(line);
  REQUIRE(back.time == alert.time);
  REQUIRE(back.job_id == alert.job_id);
  REQUIRE(back.worker == alert.worker);
  REQUIRE(back.action == alert.action);
  REQUIRE(back.stide_score == alert.stide_score);
  REQUIRE(back.lfc_score == alert.lfc_score);
  REQUIRE(back.ocsvm_score == alert.ocsvm_score);
  REQUIRE(back.thresholds.stide == alert.thresholds.stide);
  REQUIRE(back.evidence == alert.evidence);
  REQUIRE(back.truth == alert.truth);

  REQUIRE_THROWS_AS(parse_alert("{"), ParseError);
  REQUIRE_THROWS_AS(parse_alert("{\"t\":1}"), ParseError);
}

TEST_CASE("file sink appends one parseable line per alert") {
  const std::string path =
      (std::filesystem::temp_directory_path() / "gridward-alerts-test.jsonl")
          .string();
  std::remove(path.c_str());
  {
    std::vector<std::unique_ptr<AlertSink>> sinks;
    sinks.push_back(std::make_unique<FileSink>(path));
    for (int i = 0; i < 3; ++i) {
      auto records = emit_alert(sample_alert(), sinks);
      REQUIRE(records.size() == 1);
      REQUIRE(records[0].delivered == std::uint64_t(i + 1));
      REQUIRE(records[0].dropped == 0);
    }
  }
  std::ifstream in(path);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    Alert a = parse_alert(line);
    REQUIRE(a.action == ReactionAction::Kill);
    ++lines;
  }
  REQUIRE(lines == 3);
  std::remove(path.c_str());
}

TEST_CASE("tcp sink buffers while down and drops oldest past the cap") {
  // 127.0.0.1:1 refuses immediately; nothing listens there.
  TcpSink sink("127.0.0.1", 1, 50);

  SECTION("one alert buffers without drops") {
    DeliveryRecord rec = sink.emit(alert_to_json(sample_alert()));
    REQUIRE(rec.delivered == 0);
    REQUIRE(rec.buffered == 1);
    REQUIRE(rec.dropped == 0);
  }
  SECTION("1500 alerts drop the 500 oldest") {
    DeliveryRecord rec;
    for (int i = 0; i < 1500; ++i) {
      Alert a = sample_alert();
      a.time = i;
      rec = sink.emit(alert_to_json(a));
    }
    REQUIRE(rec.delivered == 0);
    REQUIRE(rec.buffered == 1000);
    REQUIRE(rec.dropped == 500);
    // oldest went first: the front of the backlog is alert #500
    const Alert front = parse_alert(sink.pending_front());
    REQUIRE(front.time == 500);
  }
}

TEST_CASE("tcp sink delivers to a live listener, oldest first") {
  int listener = ::socket(AF_INET, SOCK_STREAM, 0);
  REQUIRE(listener >= 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  REQUIRE(::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr) ==
          0);
  REQUIRE(::listen(listener, 4) == 0);
  socklen_t len = sizeof addr;
  REQUIRE(::getsockname(listener, reinterpret_cast<sockaddr*>(&addr), &len) ==
          0);
  const std::uint16_t port = ntohs(addr.sin_port);

  std::string received;
  std::thread server([&] {
    int conn = ::accept(listener, nullptr, nullptr);
    if (conn < 0) return;
    char buf[4096];
    ssize_t n;
    while ((n = ::read(conn, buf, sizeof buf)) > 0) {
      received.append(buf, std::size_t(n));
      if (received.find('\n') != std::string::npos &&
          received.find('\n', received.find('\n') + 1) != std::string::npos)
        break;
    }
    ::close(conn);
  });

  TcpSink sink("127.0.0.1", port, 200);
  Alert first = sample_alert();
  first.time = 1;
  Alert second = sample_alert();
  second.time = 2;
  DeliveryRecord rec = sink.emit(alert_to_json(first));
  rec = sink.emit(alert_to_json(second));
  server.join();
  ::close(listener);

  REQUIRE(rec.delivered == 2);
  REQUIRE(rec.buffered == 0);
  const std::size_t cut = received.find('\n');
  REQUIRE(cut != std::string::npos);
  REQUIRE(parse_alert(received.substr(0, cut)).time == 1);
}

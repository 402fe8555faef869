#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "gridward/errors.hpp"
#include "gridward/prng.hpp"
#include "gridward/profiles.hpp"
#include "gridward/trace.hpp"

namespace gridward {

inline constexpr std::string_view kGridUser = "grid01";

namespace detail {

inline std::string substitute_job(const std::string& tmpl,
                                  const std::string& job_id) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    std::size_t hit = tmpl.find("%JOB%", pos);
    if (hit == std::string::npos) {
      out.append(tmpl, pos, std::string::npos);
      break;
    }
    out.append(tmpl, pos, hit - pos);
    out += job_id;
    pos = hit + 5;
  }
  return out;
}

inline const std::vector<std::string>& default_pool(Sys sc) {
  static const std::vector<std::string> paths = {
      "/job/%JOB%/scratch/tmp-001", "/job/%JOB%/scratch/tmp-002",
      "/data/shared/cache.bin"};
  static const std::vector<std::string> addrs = {"192.168.0.10:1094"};
  switch (sc) {
    case Sys::connect:
    case Sys::bind:
      return addrs;
    default:
      return paths;
  }
}

inline std::string draw_pool_arg(const BehaviorProfile& prof, std::uint8_t sc,
                                 SplitMix64& rng, const std::string& job_id) {
  const std::vector<std::string>& pool =
      prof.arg0_pool[sc].empty() ? default_pool(static_cast<Sys>(sc))
                                 : prof.arg0_pool[sc];
  const std::string& pick = pool[rng.next_below(pool.size())];
  return substitute_job(pick, job_id);
}

// Argument and return synthesis per syscall. The draw sequence for a
// given syscall is fixed, which keeps whole traces a pure function of
// (profile, seed, len).
inline void fill_event(SyscallEvent& ev, const BehaviorProfile& prof,
                       SplitMix64& rng, const std::string& job_id) {
  auto fd = [&] { return std::int64_t(3 + rng.next_below(62)); };
  auto pid = [&] { return std::int64_t(2 + rng.next_below(32766)); };
  switch (static_cast<Sys>(ev.sc)) {
    case Sys::read:
    case Sys::write:
    case Sys::send:
    case Sys::recv: {
      ev.args.emplace_back(fd());
      std::int64_t n = 1 + std::int64_t(rng.next_below(65536));
      ev.args.emplace_back(n);
      ev.ret = n;
      break;
    }
    case Sys::close:
    case Sys::ioctl:
    case Sys::listen:
      ev.args.emplace_back(fd());
      ev.ret = 0;
      break;
    case Sys::dup:
    case Sys::accept:
      ev.args.emplace_back(fd());
      ev.ret = fd();
      break;
    case Sys::open:
      ev.args.emplace_back(draw_pool_arg(prof, ev.sc, rng, job_id));
      ev.ret = std::int64_t(3 + rng.next_below(253));
      break;
    case Sys::stat:
    case Sys::access:
    case Sys::execve:
    case Sys::getdents:
    case Sys::mount:
    case Sys::connect:
    case Sys::bind:
      ev.args.emplace_back(draw_pool_arg(prof, ev.sc, rng, job_id));
      ev.ret = 0;
      break;
    case Sys::chmod:
      ev.args.emplace_back(draw_pool_arg(prof, ev.sc, rng, job_id));
      ev.args.emplace_back(std::int64_t(rng.next_below(512)));
      ev.ret = 0;
      break;
    case Sys::chown:
      ev.args.emplace_back(draw_pool_arg(prof, ev.sc, rng, job_id));
      ev.args.emplace_back(std::int64_t(1000 + rng.next_below(1000)));
      ev.ret = 0;
      break;
    case Sys::mmap:
      ev.args.emplace_back(std::int64_t(4096 * (1 + rng.next_below(256))));
      ev.ret = 0;
      break;
    case Sys::brk:
      ev.args.emplace_back(std::int64_t(4096 * (1 + rng.next_below(32))));
      ev.ret = 0;
      break;
    case Sys::socket:
      ev.args.emplace_back(std::int64_t{2});  // AF_INET
      ev.ret = fd();
      break;
    case Sys::pipe:
      ev.ret = 0;
      break;
    case Sys::fork:
    case Sys::clone:
      ev.ret = pid();
      break;
    case Sys::exit:
      ev.args.emplace_back(std::int64_t{0});
      ev.ret = 0;
      break;
    case Sys::wait:
      ev.ret = pid();
      break;
    case Sys::kill:
      ev.args.emplace_back(pid());
      ev.args.emplace_back(std::int64_t(rng.next_below(2) ? 9 : 15));
      ev.ret = 0;
      break;
    case Sys::ptrace:
      ev.args.emplace_back(std::int64_t(rng.next_below(17)));
      ev.args.emplace_back(pid());
      ev.ret = 0;
      break;
    case Sys::setuid:
    case Sys::setgid:
      ev.args.emplace_back(std::int64_t{0});
      ev.ret = 0;
      break;
    case Sys::unshare:
      ev.args.emplace_back(std::int64_t{0x20000000});
      ev.ret = 0;
      break;
  }
}

}  // namespace detail

// Draws a trace of exactly `len` events from the profile's Markov
// chain. Deterministic in (profile, seed, len): same inputs, byte
// identical rendered output.
inline Trace generate_trace(const BehaviorProfile& prof, std::uint64_t seed,
                            std::size_t len, std::string job_id = "") {
  validate_profile(prof);
  Trace trace;
  if (job_id.empty()) job_id = "job-" + std::to_string(seed);
  trace.meta.job_id = job_id;
  trace.meta.user = std::string(kGridUser);
  trace.meta.profile_label = prof.name;
  trace.meta.seed = seed;

  SplitMix64 rng(seed);
  const std::int64_t job_pid = 1000 + std::int64_t(rng.next_below(9000));
  std::int64_t t = 0;
  std::uint8_t prev = 0;
  trace.events.reserve(len);
  for (std::size_t k = 0; k < len; ++k) {
    std::span<const double> row =
        k == 0 ? std::span<const double>(prof.initial)
               : std::span<const double>(prof.transition[prev]);
    std::uint8_t sc = static_cast<std::uint8_t>(pick_weighted(rng, row));
    SyscallEvent ev;
    ev.sc = sc;
    ev.t = t;
    ev.pid = job_pid;
    detail::fill_event(ev, prof, rng, job_id);
    trace.events.push_back(std::move(ev));
    t += 200 + std::int64_t(rng.next_below(800));
    prev = sc;
  }
  return trace;
}

struct SiteConfig {
  std::uint32_t workers = 1;
  std::uint32_t jobs_per_worker = 1;
  std::uint64_t seed = 1;
  std::uint32_t trace_len = 0;  // 0: use each profile's own len
  std::vector<std::pair<std::string, double>> mix;  // file order matters
};

inline void validate_site_config(const SiteConfig& cfg,
                                 const ProfileCatalog& catalog) {
  if (cfg.workers < 1) throw InvalidArgument("workers must be positive");
  if (cfg.jobs_per_worker < 1)
    throw InvalidArgument("jobs_per_worker must be positive");
  if (cfg.mix.empty()) throw InvalidArgument("mix must name a profile");
  double s = 0.0;
  for (const auto& [name, p] : cfg.mix) {
    catalog.require(name);
    if (p < 0.0) throw InvalidArgument("negative mix probability");
    s += p;
  }
  if (std::fabs(s - 1.0) > kProbSumTolerance)
    throw InvalidArgument("mix probabilities must sum to 1");
}

// Site config file: key=value lines, '#' comments.
// keys: workers, jobs_per_worker, seed, trace_len, mix.<profile>.
inline SiteConfig parse_site_config(std::string_view text) {
  SiteConfig cfg;
  std::size_t pos = 0, line_no = 0;
  std::vector<std::string> seen;
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
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t' ||
                             line.back() == '\r'))
      line.remove_suffix(1);
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t'))
      line.remove_prefix(1);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ParseError("expected key=value", line_no);
    std::string key(line.substr(0, eq));
    std::string value(line.substr(eq + 1));
    for (const std::string& s : seen)
      if (s == key) throw ParseError("duplicate key \"" + key + "\"", line_no);
    seen.push_back(key);
    try {
      if (key == "workers")
        cfg.workers = static_cast<std::uint32_t>(std::stoul(value));
      else if (key == "jobs_per_worker")
        cfg.jobs_per_worker = static_cast<std::uint32_t>(std::stoul(value));
      else if (key == "seed")
        cfg.seed = std::stoull(value);
      else if (key == "trace_len")
        cfg.trace_len = static_cast<std::uint32_t>(std::stoul(value));
      else if (key.starts_with("mix."))
        cfg.mix.emplace_back(key.substr(4), std::stod(value));
      else
        throw ParseError("unknown key \"" + key + "\"", line_no);
    } catch (const ParseError&) {
      throw;
    } catch (...) {
      throw ParseError("bad value for \"" + key + "\"", line_no);
    }
  }
  return cfg;
}

struct JobRecord {
  std::uint32_t worker = 0;
  std::uint32_t job = 0;
  Trace trace;
};

struct SiteResult {
  std::vector<JobRecord> jobs;        // ordered by (worker, job)
  std::vector<std::string> log_lines; // one per job, same order
};

// Generates workers x jobs_per_worker labeled traces. Job (w, j) runs
// on its own splitmix64 stream seeded with mix64(seed, w, j); the
// stream picks the profile from the mix, then yields the trace seed.
// Jobs are independent, so any thread count produces identical output.
inline SiteResult run_site(const SiteConfig& cfg,
                           const ProfileCatalog& catalog,
                           unsigned threads = 1) {
  validate_site_config(cfg, catalog);
  const std::size_t total =
      std::size_t(cfg.workers) * std::size_t(cfg.jobs_per_worker);
  std::vector<double> mix_probs;
  mix_probs.reserve(cfg.mix.size());
  for (const auto& [name, p] : cfg.mix) mix_probs.push_back(p);

  SiteResult result;
  result.jobs.resize(total);

  auto one_job = [&](std::size_t index) {
    const std::uint32_t w =
        static_cast<std::uint32_t>(index / cfg.jobs_per_worker);
    const std::uint32_t j =
        static_cast<std::uint32_t>(index % cfg.jobs_per_worker);
    SplitMix64 rng(mix64(cfg.seed, w, j));
    std::size_t pick = pick_weighted(rng, mix_probs);
    const BehaviorProfile& prof = catalog.require(cfg.mix[pick].first);
    std::uint64_t trace_seed = rng.next();
    std::size_t len = cfg.trace_len ? cfg.trace_len
                                    : static_cast<std::size_t>(prof.mean_len);
    std::string job_id = "w" + std::to_string(w) + "-j" + std::to_string(j);
    result.jobs[index] = {w, j, generate_trace(prof, trace_seed, len, job_id)};
  };

  if (threads <= 1 || total < 2) {
    for (std::size_t i = 0; i < total; ++i) one_job(i);
  } else {
    const unsigned n =
        static_cast<unsigned>(std::min<std::size_t>(threads, total));
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (unsigned tI = 0; tI < n; ++tI) {
      pool.emplace_back([&, tI] {
        for (std::size_t i = tI; i < total; i += n) one_job(i);
      });
    }
    for (std::thread& th : pool) th.join();
  }

  result.log_lines.reserve(total);
  for (const JobRecord& rec : result.jobs) {
    result.log_lines.push_back(
        "job=" + rec.trace.meta.job_id + " worker=" +
        std::to_string(rec.worker) + " profile=" +
        rec.trace.meta.profile_label.value_or("") + " seed=" +
        std::to_string(rec.trace.meta.seed.value_or(0)) + " events=" +
        std::to_string(rec.trace.events.size()));
  }
  return result;
}

}  // namespace gridward

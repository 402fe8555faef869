// gridward - worker-node sandbox policy enforcement and syscall-sequence
// intrusion detection over simulated Grid jobs.
//
// Exit codes: 0 success, 1 usage error, 2 input parse error, 3 runtime
// failure.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gridward/bench.hpp"
#include "gridward/builtin.hpp"
#include "gridward/bundle.hpp"
#include "gridward/enforce.hpp"
#include "gridward/errors.hpp"
#include "gridward/metrics.hpp"
#include "gridward/policy_io.hpp"
#include "gridward/response.hpp"
#include "gridward/simulate.hpp"
#include "gridward/trace_io.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string read_input_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw gridward::ParseError("cannot read " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  if (in.bad()) throw gridward::ParseError("cannot read " + path.string());
  return content;
}

// All artifacts land under a temp name first and are renamed into
// place, so a crash never leaves a torn file behind.
void write_file_atomic(const fs::path& path, std::string_view content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw gridward::IoError("cannot write " + tmp.string());
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    if (!out) throw gridward::IoError("cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec)
    throw gridward::IoError("cannot rename " + tmp.string() + " to " +
                            path.string());
}

std::vector<fs::path> list_trace_files(const fs::path& dir) {
  if (!fs::is_directory(dir))
    throw gridward::ParseError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw gridward::ParseError("no .jsonl traces in " + dir.string());
  return files;
}

gridward::Trace load_trace(const fs::path& path) {
  try {
    return gridward::parse_trace(read_input_file(path));
  } catch (const gridward::ParseError& e) {
    throw gridward::ParseError(path.string() + ": " + e.what());
  }
}

std::vector<gridward::Trace> load_traces(const std::vector<fs::path>& files) {
  std::vector<gridward::Trace> traces;
  traces.reserve(files.size());
  for (const fs::path& f : files) traces.push_back(load_trace(f));
  return traces;
}

gridward::ProfileCatalog load_catalog(const std::string& extra_dir) {
  gridward::ProfileCatalog catalog;
  for (const gridward::BehaviorProfile& p : gridward::builtin_catalog().all())
    catalog.add(p);
  if (!extra_dir.empty()) {
    if (!fs::is_directory(extra_dir))
      throw gridward::ParseError("not a directory: " + extra_dir);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(extra_dir))
      if (entry.is_regular_file() && entry.path().extension() == ".profile")
        files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const fs::path& f : files) {
      try {
        catalog.add(gridward::parse_profile(read_input_file(f)));
      } catch (const gridward::ParseError& e) {
        throw gridward::ParseError(f.string() + ": " + e.what());
      }
    }
  }
  return catalog;
}

gridward::Policy load_policy(const std::string& path) {
  if (path.empty()) return gridward::builtin_baseline_policy();
  try {
    return gridward::parse_policy(read_input_file(path));
  } catch (const gridward::ParseError& e) {
    throw gridward::ParseError(path + ": " + e.what());
  }
}

bool label_is_attack(const gridward::ProfileCatalog& catalog,
                     const std::string& label, const std::string& job_id) {
  const gridward::BehaviorProfile* p = catalog.find(label);
  if (!p)
    throw gridward::ParseError("job \"" + job_id +
                               "\" carries unknown profile label \"" + label +
                               "\"");
  return p->kind == gridward::BehaviorProfile::Kind::Attack;
}

std::uint32_t worker_of(const std::string& job_id) {
  if (job_id.size() < 2 || job_id[0] != 'w') return 0;
  std::uint32_t w = 0;
  std::size_t i = 1;
  while (i < job_id.size() && job_id[i] >= '0' && job_id[i] <= '9') {
    w = w * 10 + static_cast<std::uint32_t>(job_id[i] - '0');
    ++i;
  }
  return i > 1 && i < job_id.size() && job_id[i] == '-' ? w : 0;
}

// Deterministic parallel map: results land by index regardless of the
// schedule. The first exception wins and is rethrown after the join.
template <typename Fn>
void parallel_for(std::size_t total, unsigned threads, Fn fn) {
  if (threads <= 1 || total < 2) {
    for (std::size_t i = 0; i < total; ++i) fn(i);
    return;
  }
  const unsigned n =
      static_cast<unsigned>(std::min<std::size_t>(threads, total));
  std::mutex mu;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(n);
  for (unsigned t = 0; t < n; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < total; i += n) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (std::thread& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::optional<std::uint64_t> env_seed() {
  const char* env = std::getenv("GRIDWARD_SEED");
  if (!env || !*env) return std::nullopt;
  try {
    return std::stoull(env);
  } catch (...) {
    throw gridward::InvalidArgument("GRIDWARD_SEED is not an integer");
  }
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag,
                           std::optional<std::uint64_t> config_value,
                           std::uint64_t fallback) {
  if (flag) return *flag;
  if (auto env = env_seed()) return *env;
  if (config_value) return *config_value;
  return fallback;
}

ordered_json metrics_to_json(const gridward::MetricsReport& m) {
  ordered_json j;
  j["tp"] = m.tp;
  j["fp"] = m.fp;
  j["tn"] = m.tn;
  j["fn"] = m.fn;
  j["tpr"] = m.tpr;
  j["fpr"] = m.fpr;
  j["precision"] = m.precision;
  ordered_json per = ordered_json::object();
  for (const gridward::PerProfileTpr& p : m.per_profile) per[p.profile] = p.tpr;
  j["per_profile"] = std::move(per);
  return j;
}

std::string result_to_json_line(const gridward::DetectionResult& r,
                                const std::string& truth) {
  ordered_json j;
  j["job"] = r.job_id;
  j["mismatch"] = r.mismatch_rate;
  j["lfc"] = r.lfc_score;
  j["ocsvm"] = r.ocsvm_score;
  j["verdict"] = r.malicious ? "malicious" : "normal";
  j["truth"] = truth;
  ordered_json ev = ordered_json::array();
  for (const auto& gram : r.evidence) {
    ordered_json ids = ordered_json::array();
    for (std::uint8_t id : gram) ids.push_back(id);
    ev.push_back(std::move(ids));
  }
  j["evidence"] = std::move(ev);
  return j.dump();
}

std::string enforcement_to_json_line(const std::string& job_id,
                                     std::size_t input_events,
                                     const gridward::EnforcementReport& rep) {
  ordered_json j;
  j["job"] = job_id;
  j["events"] = input_events;
  j["enforced_events"] = rep.enforced.events.size();
  j["killed_at"] =
      rep.killed_at ? ordered_json(*rep.killed_at) : ordered_json(-1);
  j["cpu_ms"] = rep.cpu_used_ms;
  j["mem_peak"] = rep.mem_peak_bytes;
  j["pid_peak"] = rep.pid_peak;
  ordered_json viols = ordered_json::array();
  for (const gridward::Violation& v : rep.violations)
    viols.push_back(ordered_json::array(
        {v.event_index,
         std::string(gridward::violation_reason_name(v.reason))}));
  j["violations"] = std::move(viols);
  std::map<std::string, std::uint64_t> verdict_counts;
  for (const gridward::FilterAction& a : rep.verdicts) {
    switch (a.kind) {
      case gridward::FilterAction::Kind::Allow: ++verdict_counts["allow"]; break;
      case gridward::FilterAction::Kind::Deny: ++verdict_counts["deny"]; break;
      case gridward::FilterAction::Kind::Kill: ++verdict_counts["kill"]; break;
      case gridward::FilterAction::Kind::Log: ++verdict_counts["log"]; break;
    }
  }
  ordered_json vc = ordered_json::object();
  for (const auto& [k, v] : verdict_counts) vc[k] = v;
  j["verdicts"] = std::move(vc);
  return j.dump();
}

struct EnforceSettings {
  std::vector<std::string> visible_paths = {"/job/%JOB%", "/data", "/tmp",
                                            "/proc", "/usr", "/lib", "/etc"};
  std::vector<std::string> uid_map = {"0:100000"};
  std::int64_t cpu_ms = 60000;
  std::int64_t mem_bytes = 2147483648;
  std::int64_t max_pids = 64;
};

gridward::NamespaceConfig namespace_for_job(const EnforceSettings& settings,
                                            const std::string& job_id) {
  gridward::NamespaceConfig ns;
  for (const std::string& spec : settings.uid_map) {
    std::size_t colon = spec.find(':');
    if (colon == std::string::npos)
      throw gridward::InvalidArgument("uid map entries look like C:H");
    try {
      ns.uid_map.emplace_back(
          static_cast<std::uint32_t>(std::stoul(spec.substr(0, colon))),
          static_cast<std::uint32_t>(std::stoul(spec.substr(colon + 1))));
    } catch (const gridward::InvalidArgument&) {
      throw;
    } catch (...) {
      throw gridward::InvalidArgument("bad uid map entry \"" + spec + "\"");
    }
  }
  for (const std::string& p : settings.visible_paths)
    ns.visible_paths.push_back(gridward::detail::substitute_job(p, job_id));
  gridward::validate_namespace(ns);
  return ns;
}

gridward::ResourceLimits limits_of(const EnforceSettings& settings) {
  gridward::ResourceLimits limits{settings.cpu_ms, settings.mem_bytes,
                                  settings.max_pids};
  gridward::validate_limits(limits);
  return limits;
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
  std::string config;
  std::string out_dir;
  std::string profiles_dir;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
};

void cmd_simulate(const SimulateOptions& opt) {
  gridward::ProfileCatalog catalog = load_catalog(opt.profiles_dir);
  gridward::SiteConfig cfg;
  try {
    cfg = gridward::parse_site_config(read_input_file(opt.config));
  } catch (const gridward::ParseError& e) {
    throw gridward::ParseError(opt.config + ": " + e.what());
  }
  cfg.seed = resolve_seed(opt.seed, cfg.seed, 1);
  gridward::SiteResult site = gridward::run_site(cfg, catalog, opt.threads);

  fs::create_directories(opt.out_dir);
  for (const gridward::JobRecord& rec : site.jobs) {
    const fs::path path =
        fs::path(opt.out_dir) / (rec.trace.meta.job_id + ".jsonl");
    write_file_atomic(path, gridward::render_trace(rec.trace));
  }
  std::string log;
  for (const std::string& line : site.log_lines) {
    log += line;
    log += '\n';
  }
  write_file_atomic(fs::path(opt.out_dir) / "site.log", log);
  std::printf("simulate: wrote %zu traces to %s\n", site.jobs.size(),
              opt.out_dir.c_str());
}

// ------------------------------------------------------------------- train

struct TrainOptionsCli {
  std::string normal_dir;
  std::string out_model;
  std::string profiles_dir;
  gridward::TrainOptions train;
  std::optional<std::uint64_t> seed;
  bool no_ocsvm = false;
};

void cmd_train(const TrainOptionsCli& opt) {
  gridward::ProfileCatalog catalog = load_catalog(opt.profiles_dir);
  std::vector<fs::path> files = list_trace_files(opt.normal_dir);
  std::vector<gridward::Trace> traces = load_traces(files);
  for (const gridward::Trace& t : traces) {
    if (!t.meta.profile_label) continue;
    if (label_is_attack(catalog, *t.meta.profile_label, t.meta.job_id))
      throw gridward::InvalidArgument(
          "training set contains attack-labeled trace " + t.meta.job_id +
          " (" + *t.meta.profile_label + ")");
  }
  gridward::TrainOptions topt = opt.train;
  topt.seed = resolve_seed(opt.seed, std::nullopt, 1);
  topt.enable_ocsvm = !opt.no_ocsvm;
  gridward::DetectorBundle bundle = gridward::train_bundle(traces, topt);
  write_file_atomic(opt.out_model, gridward::render_model(bundle));
  std::printf("train: %zu traces, %zu grams (n=%d), thresholds stide=%g "
              "lfc=%g ocsvm=%g\n",
              traces.size(), bundle.db.grams.size(), bundle.db.n,
              bundle.thresholds.stide, bundle.thresholds.lfc,
              bundle.thresholds.ocsvm);
}

// ------------------------------------------------------------------- score

struct ScoreOptions {
  std::string model;
  std::string traces_dir;
  std::string report_path;
  std::string results_path;
  std::string profiles_dir;
  unsigned threads = 1;
};

void cmd_score(const ScoreOptions& opt) {
  gridward::ProfileCatalog catalog = load_catalog(opt.profiles_dir);
  gridward::DetectorBundle bundle;
  try {
    bundle = gridward::parse_model(read_input_file(opt.model));
  } catch (const gridward::ParseError& e) {
    throw gridward::ParseError(opt.model + ": " + e.what());
  }
  std::vector<fs::path> files = list_trace_files(opt.traces_dir);
  std::vector<gridward::Trace> traces = load_traces(files);
  std::vector<gridward::DetectionResult> results(traces.size());
  parallel_for(traces.size(), opt.threads, [&](std::size_t i) {
    try {
      results[i] = gridward::classify(traces[i], bundle);
    } catch (const gridward::InvalidArgument& e) {
      throw gridward::InvalidArgument(traces[i].meta.job_id + ": " + e.what());
    }
  });

  if (!opt.results_path.empty()) {
    std::string out;
    for (std::size_t i = 0; i < results.size(); ++i) {
      out += result_to_json_line(results[i],
                                 traces[i].meta.profile_label.value_or(""));
      out += '\n';
    }
    write_file_atomic(opt.results_path, out);
  }

  if (!opt.report_path.empty()) {
    std::vector<gridward::LabeledResult> labeled;
    labeled.reserve(results.size());
    for (std::size_t i = 0; i < results.size(); ++i) {
      if (!traces[i].meta.profile_label)
        throw gridward::InvalidArgument(
            "metrics need ground truth, but trace " + traces[i].meta.job_id +
            " has no profile label");
      const std::string& label = *traces[i].meta.profile_label;
      labeled.push_back({results[i], label,
                         label_is_attack(catalog, label,
                                         traces[i].meta.job_id)});
    }
    gridward::MetricsReport metrics = gridward::evaluate_metrics(labeled);
    write_file_atomic(opt.report_path, metrics_to_json(metrics).dump(2) + "\n");
    std::printf("score: %zu traces, tpr=%.4f fpr=%.4f\n", results.size(),
                metrics.tpr, metrics.fpr);
  } else {
    std::size_t flagged = 0;
    for (const gridward::DetectionResult& r : results)
      if (r.malicious) ++flagged;
    std::printf("score: %zu traces, %zu flagged malicious\n", results.size(),
                flagged);
  }
}

// ----------------------------------------------------------------- enforce

struct EnforceOptions {
  std::string policy_path;
  std::string traces_dir;
  std::string out_path;
  EnforceSettings settings;
  unsigned threads = 1;
};

void cmd_enforce(const EnforceOptions& opt) {
  gridward::Policy policy = load_policy(opt.policy_path);
  gridward::ResourceLimits limits = limits_of(opt.settings);
  std::vector<fs::path> files = list_trace_files(opt.traces_dir);
  std::vector<gridward::Trace> traces = load_traces(files);
  std::vector<std::string> lines(traces.size());
  parallel_for(traces.size(), opt.threads, [&](std::size_t i) {
    gridward::NamespaceConfig ns =
        namespace_for_job(opt.settings, traces[i].meta.job_id);
    gridward::EnforcementReport rep =
        gridward::enforce(policy, ns, limits, traces[i]);
    lines[i] = enforcement_to_json_line(traces[i].meta.job_id,
                                        traces[i].events.size(), rep);
  });
  std::string out;
  for (const std::string& line : lines) {
    out += line;
    out += '\n';
  }
  write_file_atomic(opt.out_path, out);
  std::printf("enforce: %zu traces -> %s\n", traces.size(),
              opt.out_path.c_str());
}

// --------------------------------------------------------------------- run

struct RunOptions {
  std::string config;
  std::string out_dir;
  std::string profiles_dir;
  std::string policy_path;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::uint32_t train_traces = 200;
  gridward::TrainOptions train;
  double warn_ratio = 1.5;
  double kill_ratio = 3.0;
  EnforceSettings settings;
  std::string tcp_sink;  // host:port
};

gridward::SiteConfig default_run_config() {
  gridward::SiteConfig cfg;
  cfg.workers = 4;
  cfg.jobs_per_worker = 25;
  cfg.trace_len = 500;
  cfg.mix = {{"reco", 0.30},          {"montecarlo", 0.30},
             {"merge", 0.24},         {"cryptominer", 0.04},
             {"credential-theft", 0.03}, {"dos-forkbomb", 0.03},
             {"job-tamper", 0.03},    {"escape-privesc", 0.03}};
  return cfg;
}

void cmd_run(const RunOptions& opt) {
  gridward::ProfileCatalog catalog = load_catalog(opt.profiles_dir);
  gridward::Policy policy = load_policy(opt.policy_path);
  gridward::ResourceLimits limits = limits_of(opt.settings);
  gridward::ReactionPolicy reaction{opt.warn_ratio, opt.kill_ratio};
  gridward::validate_reaction_policy(reaction);

  gridward::SiteConfig eval_cfg;
  if (opt.config.empty()) {
    eval_cfg = default_run_config();
  } else {
    try {
      eval_cfg = gridward::parse_site_config(read_input_file(opt.config));
    } catch (const gridward::ParseError& e) {
      throw gridward::ParseError(opt.config + ": " + e.what());
    }
  }
  eval_cfg.seed = resolve_seed(opt.seed, eval_cfg.seed, 1);

  // Training site: the normal slice of the eval mix, renormalized, on
  // its own seed stream.
  gridward::SiteConfig train_cfg;
  train_cfg.workers = 1;
  train_cfg.jobs_per_worker = opt.train_traces;
  train_cfg.trace_len = eval_cfg.trace_len;
  train_cfg.seed = gridward::splitmix64_once(eval_cfg.seed ^
                                             0x7261696E5F736574ULL);
  double normal_mass = 0.0;
  for (const auto& [name, p] : eval_cfg.mix) {
    if (catalog.require(name).kind == gridward::BehaviorProfile::Kind::Normal)
      normal_mass += p;
  }
  if (normal_mass <= 0.0)
    throw gridward::InvalidArgument(
        "run needs at least one normal profile in the mix");
  for (const auto& [name, p] : eval_cfg.mix) {
    if (catalog.require(name).kind == gridward::BehaviorProfile::Kind::Normal)
      train_cfg.mix.emplace_back(name, p / normal_mass);
  }

  fs::create_directories(fs::path(opt.out_dir) / "train");
  fs::create_directories(fs::path(opt.out_dir) / "eval");

  gridward::SiteResult train_site =
      gridward::run_site(train_cfg, catalog, opt.threads);
  std::map<std::string, std::uint64_t> train_by_profile;
  for (const gridward::JobRecord& rec : train_site.jobs) {
    ++train_by_profile[rec.trace.meta.profile_label.value_or("")];
    write_file_atomic(fs::path(opt.out_dir) / "train" /
                          (rec.trace.meta.job_id + ".jsonl"),
                      gridward::render_trace(rec.trace));
  }

  // Train over job-id order so `gridward train --normal out/train`
  // rebuilds the identical model.
  std::vector<gridward::Trace> train_traces;
  train_traces.reserve(train_site.jobs.size());
  for (const gridward::JobRecord& rec : train_site.jobs)
    train_traces.push_back(rec.trace);
  std::sort(train_traces.begin(), train_traces.end(),
            [](const gridward::Trace& a, const gridward::Trace& b) {
              return a.meta.job_id < b.meta.job_id;
            });
  gridward::TrainOptions topt = opt.train;
  topt.seed = train_cfg.seed;
  gridward::DetectorBundle bundle = gridward::train_bundle(train_traces, topt);
  write_file_atomic(fs::path(opt.out_dir) / "model.gim",
                    gridward::render_model(bundle));

  gridward::SiteResult eval_site =
      gridward::run_site(eval_cfg, catalog, opt.threads);
  for (const gridward::JobRecord& rec : eval_site.jobs)
    write_file_atomic(fs::path(opt.out_dir) / "eval" /
                          (rec.trace.meta.job_id + ".jsonl"),
                      gridward::render_trace(rec.trace));

  const std::size_t total = eval_site.jobs.size();
  std::vector<std::string> enforcement_lines(total);
  std::vector<gridward::EnforcementReport> reports(total);
  std::vector<gridward::DetectionResult> results(total);
  parallel_for(total, opt.threads, [&](std::size_t i) {
    const gridward::Trace& trace = eval_site.jobs[i].trace;
    gridward::NamespaceConfig ns =
        namespace_for_job(opt.settings, trace.meta.job_id);
    reports[i] = gridward::enforce(policy, ns, limits, trace);
    enforcement_lines[i] = enforcement_to_json_line(
        trace.meta.job_id, trace.events.size(), reports[i]);
    results[i] = gridward::classify(trace, bundle);
  });

  std::string enforcement_out;
  std::map<std::string, std::uint64_t> violations_by_reason;
  std::size_t killed_jobs = 0;
  for (std::size_t i = 0; i < total; ++i) {
    enforcement_out += enforcement_lines[i];
    enforcement_out += '\n';
    if (reports[i].killed_at) ++killed_jobs;
    for (const gridward::Violation& v : reports[i].violations)
      ++violations_by_reason[std::string(
          gridward::violation_reason_name(v.reason))];
  }
  write_file_atomic(fs::path(opt.out_dir) / "enforcement.jsonl",
                    enforcement_out);

  std::string results_out;
  std::vector<gridward::LabeledResult> labeled;
  labeled.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    const gridward::Trace& trace = eval_site.jobs[i].trace;
    const std::string label = trace.meta.profile_label.value_or("");
    results_out += result_to_json_line(results[i], label);
    results_out += '\n';
    labeled.push_back(
        {results[i], label, label_is_attack(catalog, label, trace.meta.job_id)});
  }
  write_file_atomic(fs::path(opt.out_dir) / "results.jsonl", results_out);
  gridward::MetricsReport metrics = gridward::evaluate_metrics(labeled);

  // Response: score-excess bands over sanitized thresholds (calibrated
  // thresholds can legitimately be 0; any positive score is then
  // unbounded excess).
  gridward::DetectorThresholds banded = bundle.thresholds;
  banded.stide = std::max(banded.stide, 1e-9);
  banded.lfc = std::max(banded.lfc, 1e-9);
  banded.ocsvm = std::max(banded.ocsvm, 1e-9);

  std::vector<std::unique_ptr<gridward::AlertSink>> sinks;
  sinks.push_back(std::make_unique<gridward::FileSink>(
      (fs::path(opt.out_dir) / "alerts.jsonl").string()));
  if (!opt.tcp_sink.empty()) {
    std::size_t colon = opt.tcp_sink.rfind(':');
    if (colon == std::string::npos)
      throw gridward::InvalidArgument("tcp sink looks like host:port");
    sinks.push_back(std::make_unique<gridward::TcpSink>(
        opt.tcp_sink.substr(0, colon),
        static_cast<std::uint16_t>(
            std::stoul(opt.tcp_sink.substr(colon + 1)))));
  }

  std::map<std::string, std::uint64_t> actions{
      {"none", 0}, {"alert", 0}, {"suspend", 0}, {"kill", 0}};
  std::vector<std::string> event_log = eval_site.log_lines;
  for (std::size_t i = 0; i < total; ++i) {
    const gridward::Trace& trace = eval_site.jobs[i].trace;
    gridward::ReactionAction action = gridward::decide_action(
        results[i], banded, bundle.ocsvm.has_value(), reaction);
    ++actions[std::string(gridward::reaction_action_name(action))];
    if (action == gridward::ReactionAction::None) continue;
    gridward::Alert alert;
    alert.time = trace.events.empty() ? 0 : trace.events.back().t;
    alert.job_id = trace.meta.job_id;
    alert.worker = eval_site.jobs[i].worker;
    alert.action = action;
    alert.stide_score = results[i].mismatch_rate;
    alert.lfc_score = results[i].lfc_score;
    alert.ocsvm_score = results[i].ocsvm_score;
    alert.thresholds = bundle.thresholds;
    alert.evidence = results[i].evidence;
    alert.truth = trace.meta.profile_label.value_or("");
    gridward::emit_alert(alert, sinks);
    event_log.push_back("action=" +
                        std::string(gridward::reaction_action_name(action)) +
                        " job=" + trace.meta.job_id);
  }
  std::string event_log_out;
  for (const std::string& line : event_log) {
    event_log_out += line;
    event_log_out += '\n';
  }
  write_file_atomic(fs::path(opt.out_dir) / "site-events.log", event_log_out);

  ordered_json summary;
  summary["seed"] = eval_cfg.seed;
  ordered_json train_j;
  train_j["traces"] = train_site.jobs.size();
  train_j["trace_len"] = train_cfg.trace_len;
  ordered_json train_prof = ordered_json::object();
  for (const auto& [name, count] : train_by_profile) train_prof[name] = count;
  train_j["by_profile"] = std::move(train_prof);
  summary["train"] = std::move(train_j);
  ordered_json model_j;
  model_j["n"] = bundle.db.n;
  model_j["D"] = bundle.featurizer.dims;
  model_j["grams"] = bundle.db.grams.size();
  model_j["trained_on"] = bundle.db.trained_on;
  model_j["thresholds"] = {{"stide", bundle.thresholds.stide},
                           {"lfc", bundle.thresholds.lfc},
                           {"ocsvm", bundle.thresholds.ocsvm}};
  model_j["target_fpr"] = bundle.target_fpr;
  summary["model"] = std::move(model_j);
  summary["detection"] = metrics_to_json(metrics);
  ordered_json enf;
  enf["jobs"] = total;
  enf["killed"] = killed_jobs;
  ordered_json by_reason = ordered_json::object();
  for (const auto& [k, v] : violations_by_reason) by_reason[k] = v;
  enf["violations_by_reason"] = std::move(by_reason);
  summary["enforcement"] = std::move(enf);
  ordered_json act = ordered_json::object();
  for (const auto& [k, v] : actions) act[k] = v;
  summary["alerts"] = std::move(act);
  ordered_json sink_j = ordered_json::array();
  for (const auto& sink : sinks) {
    gridward::DeliveryRecord rec = sink->record();
    sink_j.push_back({{"delivered", rec.delivered},
                      {"buffered", rec.buffered},
                      {"dropped", rec.dropped}});
  }
  summary["sinks"] = std::move(sink_j);
  write_file_atomic(fs::path(opt.out_dir) / "summary.json",
                    summary.dump(2) + "\n");

  std::printf("run: %zu eval jobs, tpr=%.4f fpr=%.4f, %zu killed by policy, "
              "%llu alerts\n",
              total, metrics.tpr, metrics.fpr, killed_jobs,
              static_cast<unsigned long long>(
                  actions["alert"] + actions["suspend"] + actions["kill"]));
}

// ------------------------------------------------------------------- bench

struct BenchOptions {
  std::string out_path;
};

void cmd_bench(const BenchOptions& opt) {
  gridward::BenchReport rep = gridward::run_bench();
  std::printf("policy_eval: %.0f events/s (%llu events in %.3f s)\n",
              rep.policy_events_per_sec,
              static_cast<unsigned long long>(rep.policy_events),
              rep.policy_seconds);
  std::printf("stide_score: %.0f windows/s (%llu windows in %.3f s)\n",
              rep.stide_windows_per_sec,
              static_cast<unsigned long long>(rep.stide_windows),
              rep.stide_seconds);
  if (!opt.out_path.empty()) {
    ordered_json j;
    j["policy_eval"] = {{"events", rep.policy_events},
                        {"seconds", rep.policy_seconds},
                        {"events_per_sec", rep.policy_events_per_sec}};
    j["stide_score"] = {{"windows", rep.stide_windows},
                        {"seconds", rep.stide_seconds},
                        {"windows_per_sec", rep.stide_windows_per_sec}};
    write_file_atomic(opt.out_path, j.dump(2) + "\n");
  }
}

// ------------------------------------------------------------------ report

struct ReportOptions {
  std::string results_path;
  std::string out_path;
  std::string profiles_dir;
};

void cmd_report(const ReportOptions& opt) {
  gridward::ProfileCatalog catalog = load_catalog(opt.profiles_dir);
  const std::string content = read_input_file(opt.results_path);
  std::vector<gridward::LabeledResult> labeled;
  std::size_t pos = 0, line_no = 0;
  while (pos < content.size()) {
    std::size_t eol = content.find('\n', pos);
    std::string_view line(content.data() + pos,
                          (eol == std::string::npos ? content.size() : eol) -
                              pos);
    pos = eol == std::string::npos ? content.size() : eol + 1;
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      gridward::LabeledResult lr;
      lr.result.job_id = j.at("job").get<std::string>();
      lr.result.mismatch_rate = j.at("mismatch").get<double>();
      lr.result.lfc_score = j.at("lfc").get<double>();
      lr.result.ocsvm_score = j.at("ocsvm").get<double>();
      lr.result.malicious = j.at("verdict").get<std::string>() == "malicious";
      lr.truth_label = j.at("truth").get<std::string>();
      if (lr.truth_label.empty())
        throw gridward::ParseError("result without ground truth",
                                   line_no);
      lr.truth_is_attack =
          label_is_attack(catalog, lr.truth_label, lr.result.job_id);
      labeled.push_back(std::move(lr));
    } catch (const nlohmann::json::exception& e) {
      throw gridward::ParseError(opt.results_path + ": line " +
                                 std::to_string(line_no) + ": " + e.what());
    }
  }
  gridward::MetricsReport metrics = gridward::evaluate_metrics(labeled);
  write_file_atomic(opt.out_path, metrics_to_json(metrics).dump(2) + "\n");
  std::printf("report: %zu results, tpr=%.4f fpr=%.4f\n", labeled.size(),
              metrics.tpr, metrics.fpr);
}

void add_enforce_settings(CLI::App* cmd, EnforceSettings& settings) {
  cmd->add_option("--visible-path", settings.visible_paths,
                  "namespace-visible path prefixes (%JOB% expands to the "
                  "job id)")
      ->delimiter(',');
  cmd->add_option("--uid-map", settings.uid_map,
                  "container:host uid pairs, e.g. 0:100000")
      ->delimiter(',');
  cmd->add_option("--cpu-ms", settings.cpu_ms, "cpu budget in ms");
  cmd->add_option("--mem-bytes", settings.mem_bytes, "memory ceiling");
  cmd->add_option("--max-pids", settings.max_pids, "process count ceiling");
}

void add_train_options(CLI::App* cmd, gridward::TrainOptions& train) {
  cmd->add_option("-n,--ngram", train.n, "window length")
      ->check(CLI::Range(1, gridward::kMaxNGramLen));
  cmd->add_option("--dims", train.dims,
                  "feature buckets, power of two in [1024,65536]");
  cmd->add_option("--nu", train.nu, "one-class margin fraction in (0,1)");
  cmd->add_option("--epochs", train.epochs, "training epochs");
  cmd->add_option("--lr", train.lr, "base learning rate");
  cmd->add_option("--target-fpr", train.target_fpr,
                  "calibration false-positive target in (0,1)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gridward — sandbox policies and syscall-sequence intrusion "
               "detection for Grid worker nodes"};
  app.require_subcommand(1);

  SimulateOptions sim;
  CLI::App* c_sim = app.add_subcommand(
      "simulate", "generate labeled job traces from a site config");
  c_sim->add_option("--config", sim.config, "site config file")->required();
  c_sim->add_option("--out", sim.out_dir, "output directory")->required();
  c_sim->add_option("--profiles", sim.profiles_dir,
                    "directory with extra .profile files");
  c_sim->add_option("--seed", sim.seed, "site seed (env GRIDWARD_SEED)");
  c_sim->add_option("--threads", sim.threads, "worker threads");
  c_sim->callback([&] { cmd_simulate(sim); });

  TrainOptionsCli train;
  CLI::App* c_train = app.add_subcommand(
      "train", "train the detector bundle on normal traces");
  c_train->add_option("--normal", train.normal_dir,
                      "directory of normal traces")
      ->required();
  c_train->add_option("--out", train.out_model, "model file to write")
      ->required();
  c_train->add_option("--profiles", train.profiles_dir,
                      "directory with extra .profile files");
  c_train->add_option("--seed", train.seed, "training seed (env GRIDWARD_SEED)");
  c_train->add_flag("--no-ocsvm", train.no_ocsvm,
                    "train the stide detector only");
  add_train_options(c_train, train.train);
  c_train->callback([&] { cmd_train(train); });

  ScoreOptions score;
  CLI::App* c_score = app.add_subcommand(
      "score", "classify traces with a trained model");
  c_score->add_option("--model", score.model, "model file")->required();
  c_score->add_option("--traces", score.traces_dir, "trace directory")
      ->required();
  c_score->add_option("--report", score.report_path,
                      "metrics JSON (needs labeled traces)");
  c_score->add_option("--results", score.results_path,
                      "per-trace results JSONL");
  c_score->add_option("--profiles", score.profiles_dir,
                      "directory with extra .profile files");
  c_score->add_option("--threads", score.threads, "worker threads");
  c_score->callback([&] { cmd_score(score); });

  EnforceOptions enforce;
  CLI::App* c_enforce = app.add_subcommand(
      "enforce", "run a policy over traces and report violations");
  c_enforce->add_option("--policy", enforce.policy_path,
                        "policy file (default: builtin baseline)");
  c_enforce->add_option("--traces", enforce.traces_dir, "trace directory")
      ->required();
  c_enforce->add_option("--out", enforce.out_path, "enforcement JSONL")
      ->required();
  c_enforce->add_option("--threads", enforce.threads, "worker threads");
  add_enforce_settings(c_enforce, enforce.settings);
  c_enforce->callback([&] { cmd_enforce(enforce); });

  RunOptions run;
  CLI::App* c_run = app.add_subcommand(
      "run", "end-to-end: simulate, train, enforce, score, respond");
  c_run->add_option("--config", run.config,
                    "eval site config (default: builtin demo site)");
  c_run->add_option("--out", run.out_dir, "output directory")->required();
  c_run->add_option("--profiles", run.profiles_dir,
                    "directory with extra .profile files");
  c_run->add_option("--policy", run.policy_path,
                    "policy file (default: builtin baseline)");
  c_run->add_option("--seed", run.seed, "site seed (env GRIDWARD_SEED)");
  c_run->add_option("--threads", run.threads, "worker threads");
  c_run->add_option("--train-traces", run.train_traces,
                    "normal traces to train on");
  c_run->add_option("--warn-ratio", run.warn_ratio,
                    "alert band upper edge (score-excess ratio)");
  c_run->add_option("--kill-ratio", run.kill_ratio,
                    "suspend band upper edge (score-excess ratio)");
  c_run->add_option("--tcp-sink", run.tcp_sink, "forward alerts to host:port");
  add_train_options(c_run, run.train);
  add_enforce_settings(c_run, run.settings);
  c_run->callback([&] { cmd_run(run); });

  BenchOptions bench;
  CLI::App* c_bench = app.add_subcommand(
      "bench", "single-threaded throughput of policy eval and stide scoring");
  c_bench->add_option("--out", bench.out_path, "write numbers as JSON");
  c_bench->callback([&] { cmd_bench(bench); });

  ReportOptions report;
  CLI::App* c_report = app.add_subcommand(
      "report", "recompute the metrics JSON from a results file");
  c_report->add_option("--results", report.results_path, "results JSONL")
      ->required();
  c_report->add_option("--out", report.out_path, "metrics JSON")->required();
  c_report->add_option("--profiles", report.profiles_dir,
                       "directory with extra .profile files");
  c_report->callback([&] { cmd_report(report); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const gridward::ParseError& e) {
    std::fprintf(stderr, "gridward: %s\n", e.what());
    return 2;
  } catch (const gridward::InvalidArgument& e) {
    std::fprintf(stderr, "gridward: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "gridward: %s\n", e.what());
    return 3;
  }
  return 0;
}

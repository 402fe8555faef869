#pragma once

#include <algorithm>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gridward/detector.hpp"
#include "gridward/errors.hpp"
#include "gridward/ocsvm.hpp"
#include "gridward/trace.hpp"

namespace gridward {

struct DetectorThresholds {
  double stide = 0.0;
  double lfc = 0.0;
  double ocsvm = 0.0;
};

// The trained detector set: stide db + hashed-feature one-class model,
// calibrated per-detector thresholds, combined by OR at classify time.
struct DetectorBundle {
  NGramDb db;
  HashedFeaturizer featurizer;
  std::optional<OneClassLinearModel> ocsvm;
  DetectorThresholds thresholds;
  double target_fpr = 0.01;
};

struct DetectionResult {
  std::string job_id;
  double mismatch_rate = 0.0;
  double lfc_score = 0.0;
  double ocsvm_score = 0.0;
  bool malicious = false;
  std::vector<std::vector<std::uint8_t>> evidence;
};

inline DetectionResult classify(const Trace& trace,
                                const DetectorBundle& bundle) {
  DetectionResult result;
  result.job_id = trace.meta.job_id;
  std::vector<std::uint8_t> ids = event_ids(trace);
  StideScore s = stide_score_ids(bundle.db, ids);
  result.mismatch_rate = s.mismatch_rate;
  result.lfc_score = s.lfc;
  result.evidence = std::move(s.evidence);
  if (bundle.ocsvm) {
    std::vector<double> x = featurize_ids(ids, bundle.featurizer);
    result.ocsvm_score = ocsvm_score(*bundle.ocsvm, x);
  }
  result.malicious = result.mismatch_rate > bundle.thresholds.stide ||
                     result.lfc_score > bundle.thresholds.lfc ||
                     (bundle.ocsvm &&
                      result.ocsvm_score > bundle.thresholds.ocsvm);
  return result;
}

struct TrainOptions {
  int n = 5;
  std::uint32_t dims = 4096;
  double nu = 0.1;
  int epochs = 30;
  double lr = 0.3;
  std::uint64_t seed = 1;
  double target_fpr = 0.01;
  bool enable_ocsvm = true;
};

// Trains on normal traces only. Every 4th trace is held out of fitting
// and used to calibrate the per-detector thresholds at target_fpr;
// calibrating on reconstruction scores of the fit set itself would pin
// every stide threshold at zero.
inline DetectorBundle train_bundle(std::span<const Trace> traces,
                                   const TrainOptions& opt) {
  if (!(opt.target_fpr > 0.0) || !(opt.target_fpr < 1.0))
    throw InvalidArgument("target_fpr must be in (0,1)");
  std::vector<Trace> fit;
  std::vector<const Trace*> calib;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    if (i % 4 == 3)
      calib.push_back(&traces[i]);
    else
      fit.push_back(traces[i]);
  }
  if (fit.empty() || calib.empty())
    throw InvalidArgument("training needs at least 4 normal traces (3-of-4 "
                          "fit / 1-of-4 calibration split)");

  DetectorBundle bundle;
  bundle.target_fpr = opt.target_fpr;
  bundle.db = train_stide(fit, opt.n);
  bundle.featurizer = HashedFeaturizer{opt.n, opt.dims};
  validate_featurizer(bundle.featurizer);

  if (opt.enable_ocsvm) {
    std::vector<std::vector<double>> xs;
    for (const Trace& trace : fit) {
      if (trace.events.size() < static_cast<std::size_t>(opt.n)) continue;
      xs.push_back(featurize(trace, bundle.featurizer));
    }
    bundle.ocsvm = train_ocsvm(xs, opt.nu, opt.epochs, opt.lr, opt.seed);
  }

  std::vector<double> stide_scores, lfc_scores, ocsvm_scores;
  for (const Trace* trace : calib) {
    if (trace->events.size() < static_cast<std::size_t>(opt.n)) continue;
    std::vector<std::uint8_t> ids = event_ids(*trace);
    StideScore s = stide_score_ids(bundle.db, ids);
    stide_scores.push_back(s.mismatch_rate);
    lfc_scores.push_back(s.lfc);
    if (bundle.ocsvm)
      ocsvm_scores.push_back(
          ocsvm_score(*bundle.ocsvm, featurize_ids(ids, bundle.featurizer)));
  }
  if (stide_scores.empty())
    throw InvalidArgument("no calibration trace yields windows");
  bundle.thresholds.stide = calibrate(stide_scores, opt.target_fpr);
  bundle.thresholds.lfc = calibrate(lfc_scores, opt.target_fpr);
  if (bundle.ocsvm)
    bundle.thresholds.ocsvm = calibrate(ocsvm_scores, opt.target_fpr);
  return bundle;
}

namespace detail {

inline std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

// Model file, text, versioned:
//   gridward-model v1 n=<n> D=<D>
//   [stide]    one gram per line, space-separated ids, sorted
//   [ocsvm]    nu, rho, then "idx value" lines for nonzero weights
//   [thresholds]  stide, lfc, ocsvm (when enabled), target_fpr
inline std::string render_model(const DetectorBundle& bundle) {
  std::string out = "gridward-model v1 n=" + std::to_string(bundle.db.n) +
                    " D=" + std::to_string(bundle.featurizer.dims) + "\n";
  out += "[stide]\n";
  std::vector<std::uint64_t> grams(bundle.db.grams.begin(),
                                   bundle.db.grams.end());
  std::sort(grams.begin(), grams.end());
  for (std::uint64_t g : grams) {
    std::vector<std::uint8_t> ids = unpack_gram(g, bundle.db.n);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(ids[i]);
    }
    out += '\n';
  }
  if (bundle.ocsvm) {
    out += "[ocsvm]\n";
    out += "nu " + detail::fmt17(bundle.ocsvm->nu) + "\n";
    out += "rho " + detail::fmt17(bundle.ocsvm->rho) + "\n";
    for (std::size_t i = 0; i < bundle.ocsvm->w.size(); ++i) {
      if (bundle.ocsvm->w[i] == 0.0) continue;
      out += std::to_string(i) + " " + detail::fmt17(bundle.ocsvm->w[i]) + "\n";
    }
  }
  out += "[thresholds]\n";
  out += "stide " + detail::fmt17(bundle.thresholds.stide) + "\n";
  out += "lfc " + detail::fmt17(bundle.thresholds.lfc) + "\n";
  if (bundle.ocsvm)
    out += "ocsvm " + detail::fmt17(bundle.thresholds.ocsvm) + "\n";
  out += "target_fpr " + detail::fmt17(bundle.target_fpr) + "\n";
  return out;
}

inline DetectorBundle parse_model(std::string_view text) {
  DetectorBundle bundle;
  bundle.db.grams.clear();
  bundle.db.trained_on = 0;

  enum class Section { Header, Stide, Ocsvm, Thresholds };
  Section section = Section::Header;
  bool have_ocsvm = false;
  bool have_stide = false, have_lfc = false, have_fpr = false;

  std::size_t pos = 0, line_no = 0;
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
    if (line.empty()) continue;

    if (section == Section::Header) {
      int n = 0;
      unsigned dims = 0;
      if (std::sscanf(std::string(line).c_str(), "gridward-model v1 n=%d D=%u",
                      &n, &dims) != 2)
        throw ParseError("bad model header", line_no);
      bundle.db.n = n;
      bundle.featurizer = HashedFeaturizer{n, dims};
      try {
        validate_ngram_len(n);
        validate_featurizer(bundle.featurizer);
      } catch (const InvalidArgument& e) {
        throw ParseError(std::string("bad model header: ") + e.what(),
                         line_no);
      }
      section = Section::Stide;
      continue;
    }
    if (line == "[stide]") continue;
    if (line == "[ocsvm]") {
      section = Section::Ocsvm;
      have_ocsvm = true;
      bundle.ocsvm = OneClassLinearModel{};
      bundle.ocsvm->w.assign(bundle.featurizer.dims, 0.0);
      continue;
    }
    if (line == "[thresholds]") {
      section = Section::Thresholds;
      continue;
    }

    if (section == Section::Stide) {
      std::vector<std::uint8_t> ids;
      std::size_t i = 0;
      const std::string s(line);
      while (i < s.size()) {
        while (i < s.size() && s[i] == ' ') ++i;
        if (i >= s.size()) break;
        char* end = nullptr;
        long v = std::strtol(s.c_str() + i, &end, 10);
        if (end == s.c_str() + i || v < 0 || v >= long(kSyscallCount))
          throw ParseError("bad gram id", line_no);
        ids.push_back(static_cast<std::uint8_t>(v));
        i = static_cast<std::size_t>(end - s.c_str());
      }
      if (ids.size() != static_cast<std::size_t>(bundle.db.n))
        throw ParseError("gram arity does not match n", line_no);
      bundle.db.grams.insert(pack_gram(ids));
      continue;
    }
    if (section == Section::Ocsvm) {
      const std::string s(line);
      std::size_t sp = s.find(' ');
      if (sp == std::string::npos)
        throw ParseError("bad ocsvm line", line_no);
      const std::string key = s.substr(0, sp);
      char* end = nullptr;
      double v = std::strtod(s.c_str() + sp + 1, &end);
      if (end == s.c_str() + sp + 1)
        throw ParseError("bad ocsvm value", line_no);
      if (key == "nu") {
        bundle.ocsvm->nu = v;
      } else if (key == "rho") {
        bundle.ocsvm->rho = v;
      } else {
        char* iend = nullptr;
        long idx = std::strtol(key.c_str(), &iend, 10);
        if (iend != key.c_str() + key.size() || idx < 0 ||
            idx >= long(bundle.featurizer.dims))
          throw ParseError("bad weight index", line_no);
        bundle.ocsvm->w[static_cast<std::size_t>(idx)] = v;
      }
      continue;
    }
    if (section == Section::Thresholds) {
      const std::string s(line);
      std::size_t sp = s.find(' ');
      if (sp == std::string::npos)
        throw ParseError("bad thresholds line", line_no);
      const std::string key = s.substr(0, sp);
      char* end = nullptr;
      double v = std::strtod(s.c_str() + sp + 1, &end);
      if (end == s.c_str() + sp + 1)
        throw ParseError("bad threshold value", line_no);
      if (key == "stide") {
        bundle.thresholds.stide = v;
        have_stide = true;
      } else if (key == "lfc") {
        bundle.thresholds.lfc = v;
        have_lfc = true;
      } else if (key == "ocsvm") {
        if (!have_ocsvm)
          throw ParseError("ocsvm threshold without [ocsvm] section", line_no);
        bundle.thresholds.ocsvm = v;
      } else if (key == "target_fpr") {
        bundle.target_fpr = v;
        have_fpr = true;
      } else {
        throw ParseError("unknown threshold \"" + key + "\"", line_no);
      }
      continue;
    }
    throw ParseError("unexpected line", line_no);
  }

  if (section != Section::Thresholds || !have_stide || !have_lfc || !have_fpr)
    throw ParseError("model file is missing sections", line_no);
  return bundle;
}

}  // namespace gridward

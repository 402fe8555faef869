#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "gridward/bundle.hpp"
#include "gridward/errors.hpp"

namespace gridward {

struct LabeledResult {
  DetectionResult result;
  std::string truth_label;
  bool truth_is_attack = false;
};

struct PerProfileTpr {
  std::string profile;
  std::uint64_t detected = 0;
  std::uint64_t total = 0;
  double tpr = 0.0;
};

struct MetricsReport {
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
  double tpr = 0.0;       // 0 when no attack traces
  double fpr = 0.0;       // 0 when no normal traces
  double precision = 0.0; // 0 when nothing was flagged
  std::vector<PerProfileTpr> per_profile;  // attack profiles, sorted by name
};

inline MetricsReport evaluate_metrics(std::span<const LabeledResult> results) {
  if (results.empty())
    throw InvalidArgument("evaluate_metrics needs at least one result");
  for (const LabeledResult& r : results)
    if (r.truth_label.empty())
      throw InvalidArgument("result for job \"" + r.result.job_id +
                            "\" has no ground-truth label");

  MetricsReport report;
  std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> by_profile;
  for (const LabeledResult& r : results) {
    if (r.truth_is_attack) {
      auto& [detected, total] = by_profile[r.truth_label];
      ++total;
      if (r.result.malicious) {
        ++report.tp;
        ++detected;
      } else {
        ++report.fn;
      }
    } else {
      if (r.result.malicious)
        ++report.fp;
      else
        ++report.tn;
    }
  }
  const std::uint64_t attacks = report.tp + report.fn;
  const std::uint64_t normals = report.fp + report.tn;
  const std::uint64_t flagged = report.tp + report.fp;
  if (attacks) report.tpr = double(report.tp) / double(attacks);
  if (normals) report.fpr = double(report.fp) / double(normals);
  if (flagged) report.precision = double(report.tp) / double(flagged);
  for (const auto& [name, counts] : by_profile) {
    PerProfileTpr p;
    p.profile = name;
    p.detected = counts.first;
    p.total = counts.second;
    p.tpr = counts.second ? double(counts.first) / double(counts.second) : 0.0;
    report.per_profile.push_back(std::move(p));
  }
  return report;
}

}  // namespace gridward

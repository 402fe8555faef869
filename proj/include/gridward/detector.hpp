#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <unordered_set>
#include <vector>

#include "gridward/errors.hpp"
#include "gridward/trace.hpp"

namespace gridward {

// Grams are packed 5 bits per id, first id in the most significant
// position, so numeric order on the packed word equals lexicographic
// order on the tuple.
inline constexpr int kMaxNGramLen = 12;

inline std::uint64_t pack_gram(std::span<const std::uint8_t> ids) {
  std::uint64_t v = 0;
  for (std::uint8_t id : ids) v = (v << 5) | (id & 0x1F);
  return v;
}

inline std::vector<std::uint8_t> unpack_gram(std::uint64_t packed, int n) {
  std::vector<std::uint8_t> ids(static_cast<std::size_t>(n));
  for (int i = n - 1; i >= 0; --i) {
    ids[static_cast<std::size_t>(i)] = packed & 0x1F;
    packed >>= 5;
  }
  return ids;
}

inline void validate_ngram_len(int n) {
  if (n < 1 || n > kMaxNGramLen)
    throw InvalidArgument("window length must be in [1," +
                          std::to_string(kMaxNGramLen) + "]");
}

// Database of n-grams observed in normal training traces.
struct NGramDb {
  int n = 5;
  std::unordered_set<std::uint64_t> grams;
  std::uint64_t trained_on = 0;  // total training windows, duplicates counted
};

inline NGramDb train_stide(std::span<const Trace> traces, int n) {
  validate_ngram_len(n);
  NGramDb db;
  db.n = n;
  const std::size_t un = static_cast<std::size_t>(n);
  for (const Trace& trace : traces) {
    const std::size_t len = trace.events.size();
    if (len < un) continue;
    std::uint64_t gram = 0;
    const std::uint64_t mask = (std::uint64_t{1} << (5 * un)) - 1;
    for (std::size_t i = 0; i < len; ++i) {
      gram = ((gram << 5) | (trace.events[i].sc & 0x1F)) & mask;
      if (i + 1 >= un) {
        db.grams.insert(gram);
        ++db.trained_on;
      }
    }
  }
  if (db.trained_on == 0)
    throw InvalidArgument("no training windows: every trace is shorter than "
                          "the window length");
  return db;
}

inline constexpr std::size_t kLfcFrame = 20;
inline constexpr std::size_t kMaxEvidence = 10;

struct StideScore {
  double mismatch_rate = 0.0;
  double lfc = 0.0;
  std::vector<std::vector<std::uint8_t>> evidence;  // most frequent unseen grams
};

// Low-level scorer over a syscall id sequence. Mismatch rate is the
// fraction of windows absent from the db; lfc is the worst mismatch
// density over sliding frames of kLfcFrame consecutive windows (frames
// at the tail shrink to the remaining window count).
inline StideScore stide_score_ids(const NGramDb& db,
                                  std::span<const std::uint8_t> ids) {
  const std::size_t un = static_cast<std::size_t>(db.n);
  if (ids.size() < un)
    throw InvalidArgument("trace yields no windows (shorter than n)");
  const std::size_t nwin = ids.size() - un + 1;

  std::vector<std::uint8_t> miss(nwin, 0);
  std::map<std::uint64_t, std::uint64_t> unseen_counts;
  std::uint64_t gram = 0;
  const std::uint64_t mask = (std::uint64_t{1} << (5 * un)) - 1;
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    gram = ((gram << 5) | (ids[i] & 0x1F)) & mask;
    if (i + 1 < un) continue;
    const std::size_t w = i + 1 - un;
    if (!db.grams.contains(gram)) {
      miss[w] = 1;
      ++mismatches;
      ++unseen_counts[gram];
    }
  }

  StideScore score;
  score.mismatch_rate =
      static_cast<double>(mismatches) / static_cast<double>(nwin);

  // Sliding-frame maximum via a prefix sum over the mismatch flags.
  std::vector<std::uint32_t> prefix(nwin + 1, 0);
  for (std::size_t i = 0; i < nwin; ++i)
    prefix[i + 1] = prefix[i] + miss[i];
  double lfc = 0.0;
  for (std::size_t s = 0; s < nwin; ++s) {
    const std::size_t len = std::min(kLfcFrame, nwin - s);
    const double frame = static_cast<double>(prefix[s + len] - prefix[s]) /
                         static_cast<double>(len);
    if (frame > lfc) lfc = frame;
  }
  score.lfc = lfc;

  std::vector<std::pair<std::uint64_t, std::uint64_t>> by_count(
      unseen_counts.begin(), unseen_counts.end());
  std::sort(by_count.begin(), by_count.end(),
            [](const auto& a, const auto& b) {
              if (a.second != b.second) return a.second > b.second;
              return a.first < b.first;
            });
  for (std::size_t i = 0; i < by_count.size() && i < kMaxEvidence; ++i)
    score.evidence.push_back(unpack_gram(by_count[i].first, db.n));
  return score;
}

inline StideScore stide_score(const NGramDb& db, const Trace& trace) {
  std::vector<std::uint8_t> ids = event_ids(trace);
  return stide_score_ids(db, ids);
}

// FNV-1a 64-bit over raw bytes.
inline std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  return h;
}

// Fixed-dimension input for the one-class model: windows are hashed to
// dims buckets (dims a power of two), counts L2-normalized.
struct HashedFeaturizer {
  int n = 5;
  std::uint32_t dims = 4096;
};

inline void validate_featurizer(const HashedFeaturizer& f) {
  validate_ngram_len(f.n);
  if (f.dims < 1024 || f.dims > 65536 || (f.dims & (f.dims - 1)) != 0)
    throw InvalidArgument("dims must be a power of two in [2^10, 2^16]");
}

inline std::vector<double> featurize_ids(std::span<const std::uint8_t> ids,
                                         const HashedFeaturizer& f) {
  validate_featurizer(f);
  const std::size_t un = static_cast<std::size_t>(f.n);
  if (ids.size() < un)
    throw InvalidArgument("trace yields no windows (shorter than n)");
  std::vector<double> x(f.dims, 0.0);
  for (std::size_t i = 0; i + un <= ids.size(); ++i) {
    const std::uint64_t h = fnv1a64(ids.subspan(i, un));
    x[h & (f.dims - 1)] += 1.0;
  }
  double norm2 = 0.0;
  for (double v : x) norm2 += v * v;
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& v : x) v *= inv;
  return x;
}

inline std::vector<double> featurize(const Trace& trace,
                                     const HashedFeaturizer& f) {
  std::vector<std::uint8_t> ids = event_ids(trace);
  return featurize_ids(ids, f);
}

// Empirical (1 - target_fpr) quantile by the nearest-rank rule: the
// ceil((1-fpr)*m)-th smallest score. Classifying the calibration set
// with score > threshold then flags at most target_fpr of it.
inline double calibrate(std::span<const double> normal_scores,
                        double target_fpr) {
  if (normal_scores.empty())
    throw InvalidArgument("calibrate needs at least one score");
  if (!(target_fpr > 0.0) || !(target_fpr < 1.0))
    throw InvalidArgument("target_fpr must be in (0,1)");
  std::vector<double> sorted(normal_scores.begin(), normal_scores.end());
  std::sort(sorted.begin(), sorted.end());
  const double m = static_cast<double>(sorted.size());
  // m - fpr*m instead of (1-fpr)*m: keeps ranks like ceil(0.9*100)
  // from creeping over the exact integer.
  auto rank = static_cast<std::size_t>(std::ceil(m - target_fpr * m));
  if (rank < 1) rank = 1;
  if (rank > sorted.size()) rank = sorted.size();
  return sorted[rank - 1];
}

}  // namespace gridward

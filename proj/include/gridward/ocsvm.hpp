#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "gridward/errors.hpp"
#include "gridward/prng.hpp"

namespace gridward {

// Linear one-class model over hashed window features.
//   J(w, rho) = 1/2 ||w||^2 + 1/(nu m) sum_i max(0, rho - w.x_i) - rho
// Anomaly score s(x) = rho - w.x, larger is more anomalous.
struct OneClassLinearModel {
  std::vector<double> w;
  double rho = 0.0;
  double nu = 0.1;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double ocsvm_score(const OneClassLinearModel& model,
                          std::span<const double> x) {
  if (x.size() != model.w.size())
    throw InvalidArgument("feature dimension mismatch");
  return model.rho - dot(model.w, x);
}

inline double ocsvm_objective(const OneClassLinearModel& model,
                              std::span<const std::vector<double>> xs) {
  double hinge = 0.0;
  for (const std::vector<double>& x : xs) {
    const double z = model.rho - dot(model.w, x);
    if (z > 0.0) hinge += z;
  }
  const double m = static_cast<double>(xs.size());
  return 0.5 * dot(model.w, model.w) + hinge / (model.nu * m) - model.rho;
}

// Full-batch subgradient of J at (w, rho); at hinge kinks the inactive
// branch is chosen (max(0,z) contributes 0 when z == 0).
inline void ocsvm_subgradient(const OneClassLinearModel& model,
                              std::span<const std::vector<double>> xs,
                              std::vector<double>& grad_w, double& grad_rho) {
  const double m = static_cast<double>(xs.size());
  const double coeff = 1.0 / (model.nu * m);
  grad_w = model.w;
  grad_rho = -1.0;
  for (const std::vector<double>& x : xs) {
    if (model.rho - dot(model.w, x) > 0.0) {
      for (std::size_t k = 0; k < grad_w.size(); ++k)
        grad_w[k] -= coeff * x[k];
      grad_rho += coeff;
    }
  }
}

// Subgradient descent with per-sample updates. Pass order is shuffled
// each epoch from the seeded stream, lr_t = lr / (1 + t/m) with t the
// global update index, and the returned parameters are the average of
// the final 10% of updates.
inline OneClassLinearModel train_ocsvm(
    std::span<const std::vector<double>> xs, double nu, int epochs, double lr,
    std::uint64_t seed) {
  if (xs.empty()) throw InvalidArgument("train_ocsvm needs training vectors");
  if (!(nu > 0.0) || !(nu < 1.0))
    throw InvalidArgument("nu must be in (0,1)");
  if (epochs < 1) throw InvalidArgument("epochs must be positive");
  if (!(lr > 0.0)) throw InvalidArgument("learning rate must be positive");
  const std::size_t dims = xs[0].size();
  for (const std::vector<double>& x : xs)
    if (x.size() != dims)
      throw InvalidArgument("inconsistent feature dimensions");

  OneClassLinearModel model;
  model.nu = nu;
  model.w.assign(dims, 0.0);
  model.rho = 0.0;

  const std::size_t m = xs.size();
  const std::size_t total = m * static_cast<std::size_t>(epochs);
  const std::size_t tail =
      std::max<std::size_t>(1, static_cast<std::size_t>(
                                   std::ceil(0.1 * static_cast<double>(total))));
  const std::size_t tail_start = total - tail;

  std::vector<double> w_sum(dims, 0.0);
  double rho_sum = 0.0;

  SplitMix64 rng(seed);
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});

  std::size_t t = 0;
  for (int e = 0; e < epochs; ++e) {
    shuffle(order, rng);
    for (std::size_t idx : order) {
      const std::vector<double>& x = xs[idx];
      const double lr_t =
          lr / (1.0 + static_cast<double>(t) / static_cast<double>(m));
      const bool active = model.rho - dot(model.w, x) > 0.0;
      const double scale = 1.0 - lr_t;
      const double add = active ? lr_t / nu : 0.0;
      for (std::size_t k = 0; k < dims; ++k)
        model.w[k] = scale * model.w[k] + add * x[k];
      model.rho -= lr_t * (active ? 1.0 / nu - 1.0 : -1.0);
      if (t >= tail_start) {
        for (std::size_t k = 0; k < dims; ++k) w_sum[k] += model.w[k];
        rho_sum += model.rho;
      }
      ++t;
    }
  }

  const double inv = 1.0 / static_cast<double>(tail);
  for (std::size_t k = 0; k < dims; ++k) model.w[k] = w_sum[k] * inv;
  model.rho = rho_sum * inv;
  return model;
}

}  // namespace gridward

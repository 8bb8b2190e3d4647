#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "midal/error.hpp"
#include "midal/image.hpp"
#include "midal/solver.hpp"

namespace midal {

struct EvalReport {
  double err = 0.0;  // ||x_hat - x||_2 / ||x||_2
  double mae = 0.0;  // ||x_hat - x||_1 / n
  double mse = 0.0;  // ||x_hat - x||_2^2 / n
};

inline EvalReport evaluate(const ImageGrid& estimate, const ImageGrid& truth) {
  require_same_shape(estimate.shape(), truth.shape(), "evaluate");
  double l1 = 0.0, l2 = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double diff = estimate[i] - truth[i];
    l1 += std::abs(diff);
    l2 += diff * diff;
    ref += truth[i] * truth[i];
  }
  if (ref == 0.0) throw InvalidArgument("evaluate: truth image is identically zero");
  const double n = static_cast<double>(truth.size());
  return {std::sqrt(l2 / ref), l1 / n, l2 / n};
}

struct SweepResult {
  double best_lambda = 0.0;
  std::vector<std::pair<double, EvalReport>> reports;  // in grid order
};

/// Solves once per grid value and keeps the lambda with the lowest MSE
/// against truth. Ties go to the smaller lambda. mu follows lambda unless
/// params.mu is set. Each point starts from a fresh solver state.
inline SweepResult lambda_sweep(const ImageGrid& noisy, const ImageGrid& truth,
                                const MidalParams& params, const std::vector<double>& grid) {
  if (grid.empty()) throw InvalidArgument("lambda_sweep: empty grid");
  for (double l : grid) {
    if (!(l > 0.0)) throw InvalidArgument("lambda_sweep: grid values must be positive");
  }
  require_same_shape(noisy.shape(), truth.shape(), "lambda_sweep");

  SweepResult out;
  out.reports.reserve(grid.size());
  for (double l : grid) {
    MidalParams p = params;
    p.lambda = l;
    try {
      const MidalResult r = midal_solve(noisy, p);
      out.reports.emplace_back(l, evaluate(r.estimate, truth));
    } catch (const std::exception& e) {
      throw std::runtime_error("lambda_sweep: lambda = " + std::to_string(l) + ": " + e.what());
    }
  }

  const std::pair<double, EvalReport>* best = nullptr;
  for (const auto& entry : out.reports) {
    if (best == nullptr || entry.second.mse < best->second.mse ||
        (entry.second.mse == best->second.mse && entry.first < best->first)) {
      best = &entry;
    }
  }
  out.best_lambda = best->first;
  return out;
}

}  // namespace midal

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "midal/io.hpp"
#include "midal/metrics.hpp"
#include "midal/phantom.hpp"
#include "midal/serialize.hpp"
#include "midal/solver.hpp"
#include "midal/speckle.hpp"

namespace midal {

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single value
};

inline MeanStd mean_std(const std::vector<double>& v) {
  MeanStd out;
  if (v.empty()) return out;
  for (double x : v) out.mean += x;
  out.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return out;
}

struct RunRecord {
  std::uint64_t seed = 0;
  EvalReport report;
  int iterations = 0;
  bool converged = false;
  double seconds = 0.0;
  double first_constraint_sq = 0.0;
  double final_constraint_sq = 0.0;
  double final_objective = 0.0;
};

struct ExperimentOutcome {
  ExperimentConfig config;
  std::vector<RunRecord> runs;  // ordered by seed
  std::optional<std::string> error;

  MeanStd err() const { return collect([](const RunRecord& r) { return r.report.err; }); }
  MeanStd mae() const { return collect([](const RunRecord& r) { return r.report.mae; }); }
  MeanStd iterations() const {
    return collect([](const RunRecord& r) { return static_cast<double>(r.iterations); });
  }
  MeanStd seconds() const { return collect([](const RunRecord& r) { return r.seconds; }); }

 private:
  template <typename F>
  MeanStd collect(F f) const {
    std::vector<double> v;
    for (const auto& r : runs) v.push_back(f(r));
    return mean_std(v);
  }
};

/// Clean reference image of an experiment, rescaled to [xmin, xmax].
inline ImageGrid load_clean_image(const ExperimentConfig& cfg,
                                  const std::filesystem::path& base_dir) {
  ImageGrid raw;
  constexpr std::string_view kPhantom = "phantom:";
  if (cfg.image.rfind(kPhantom, 0) == 0) {
    if (cfg.height == 0 || cfg.width == 0) {
      throw InvalidArgument("experiment '" + cfg.name + "': phantom needs height and width");
    }
    raw = make_phantom(cfg.image.substr(kPhantom.size()), cfg.height, cfg.width);
  } else {
    std::filesystem::path p = cfg.image;
    if (p.is_relative()) p = base_dir / p;
    raw = read_image(p);
    if ((cfg.height != 0 && raw.height() != cfg.height) ||
        (cfg.width != 0 && raw.width() != cfg.width)) {
      throw InvalidArgument("experiment '" + cfg.name + "': image is " + to_string(raw.shape()) +
                            ", config says " + std::to_string(cfg.height) + "x" +
                            std::to_string(cfg.width));
    }
  }
  return rescale_image(raw, cfg.xmin, cfg.xmax);
}

inline MidalParams solver_params(const ExperimentConfig& cfg) {
  MidalParams p;
  p.looks = cfg.looks;
  p.lambda = cfg.lambda;
  p.mu = cfg.mu;
  p.stop_exponent = cfg.stop_exponent;
  p.inner_iters = cfg.inner_iters;
  return p;
}

inline RunRecord run_single(const ImageGrid& clean, const ExperimentConfig& cfg,
                            std::uint64_t seed, const MidalParams& params) {
  const ImageGrid noisy = apply_speckle(clean, {cfg.looks, seed});
  const MidalResult res = midal_solve(noisy, params);
  RunRecord rec;
  rec.seed = seed;
  rec.report = evaluate(res.estimate, clean);
  rec.iterations = res.iterations;
  rec.converged = res.converged;
  const auto& tr = res.trace.records;
  rec.seconds = tr.empty() ? 0.0 : tr.back().seconds;
  rec.first_constraint_sq = tr.empty() ? 0.0 : tr.front().constraint_sq;
  rec.final_constraint_sq = tr.empty() ? 0.0 : tr.back().constraint_sq;
  rec.final_objective = tr.empty() ? 0.0 : tr.back().objective;
  return rec;
}

/// Runs seeds cfg.seed, cfg.seed + 1, ..., cfg.seed + n_seeds - 1. Failures
/// are captured in the outcome instead of propagating.
inline ExperimentOutcome run_experiment(const ExperimentConfig& cfg,
                                        const std::filesystem::path& base_dir, int n_seeds) {
  ExperimentOutcome out;
  out.config = cfg;
  try {
    const ImageGrid clean = load_clean_image(cfg, base_dir);
    const MidalParams params = solver_params(cfg);
    for (int s = 0; s < n_seeds; ++s) {
      out.runs.push_back(run_single(clean, cfg, cfg.seed + static_cast<std::uint64_t>(s), params));
    }
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

inline std::vector<ExperimentOutcome> run_benchmark(std::vector<ExperimentConfig> configs,
                                                    const std::filesystem::path& base_dir,
                                                    int n_seeds) {
  std::stable_sort(configs.begin(), configs.end(),
                   [](const auto& a, const auto& b) { return a.index < b.index; });
  std::vector<ExperimentOutcome> out;
  for (const auto& c : configs) out.push_back(run_experiment(c, base_dir, n_seeds));
  return out;
}

inline nlohmann::json benchmark_report_json(const std::vector<ExperimentOutcome>& outcomes,
                                            bool include_timing) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& o : outcomes) {
    nlohmann::json row;
    row["config"] = o.config;
    row["error"] = o.error ? nlohmann::json(*o.error) : nlohmann::json(nullptr);
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& r : o.runs) {
      nlohmann::json jr{{"seed", r.seed},
                        {"err", r.report.err},
                        {"mae", r.report.mae},
                        {"mse", r.report.mse},
                        {"iterations", r.iterations},
                        {"converged", r.converged},
                        {"first_constraint_sq", r.first_constraint_sq},
                        {"final_constraint_sq", r.final_constraint_sq},
                        {"final_objective", r.final_objective}};
      if (include_timing) jr["seconds"] = r.seconds;
      runs.push_back(jr);
    }
    row["runs"] = runs;
    const MeanStd err = o.err(), mae = o.mae(), it = o.iterations();
    nlohmann::json summary{{"err_mean", err.mean},        {"err_std", err.std},
                           {"mae_mean", mae.mean},        {"mae_std", mae.std},
                           {"iterations_mean", it.mean},  {"iterations_std", it.std}};
    if (include_timing) {
      const MeanStd sec = o.seconds();
      summary["seconds_mean"] = sec.mean;
      summary["seconds_std"] = sec.std;
    }
    row["summary"] = summary;
    rows.push_back(row);
  }
  return nlohmann::json{{"experiments", rows}};
}

inline std::string render_benchmark_table(const std::vector<ExperimentOutcome>& outcomes) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-4s %-28s %5s %6s  %-17s %-17s %-13s %-12s\n", "Exp",
                "Name", "M", "lambda", "Err", "MAE", "Iter", "Time[s]");
  os << line;
  for (const auto& o : outcomes) {
    if (o.error) {
      std::snprintf(line, sizeof line, "%-4d %-28s FAILED: ", o.config.index,
                    o.config.name.c_str());
      os << line << *o.error << "\n";
      continue;
    }
    const MeanStd err = o.err(), mae = o.mae(), it = o.iterations(), sec = o.seconds();
    std::snprintf(line, sizeof line,
                  "%-4d %-28s %5g %6g  %7.4f +- %6.4f %7.3f +- %6.3f %5.1f +- %4.1f %5.2f +- %4.2f\n",
                  o.config.index, o.config.name.c_str(), o.config.looks, o.config.lambda,
                  err.mean, err.std, mae.mean, mae.std, it.mean, it.std, sec.mean, sec.std);
    os << line;
  }
  return os.str();
}

}  // namespace midal

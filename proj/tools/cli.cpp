#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "midal/midal.hpp"

namespace midal::cli {
namespace {

namespace fs = std::filesystem;

struct SimulateArgs {
  std::string input, output, clean_output;
  double looks = 1.0;
  std::uint64_t seed = 0;
  double xmin = 0.0, xmax = 1.0;
};

struct DenoiseArgs {
  std::string input, output, trace_csv, trace_json, preview;
  double looks = 1.0, lambda = 1.0;
  std::optional<double> mu;
  int inner_iters = 20, stop_m = 4, max_outer = 500;
  double preview_exponent = 0.7;
};

struct BenchmarkArgs {
  std::string config, out, only;
  int seeds = 1;
  bool timing = false;
};

struct SweepArgs {
  std::string noisy, truth, grid, out;
  double looks = 1.0;
  std::optional<double> mu;
  int inner_iters = 20, stop_m = 4;
};

struct MetricsArgs {
  std::string estimate, truth;
};

fs::path default_clean_path(const fs::path& noisy) {
  fs::path p = noisy;
  p.replace_filename(noisy.stem().string() + "_clean" + noisy.extension().string());
  return p;
}

std::vector<double> parse_number_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) {
      throw InvalidArgument(std::string("bad ") + what + " entry '" + item + "'");
    }
    out.push_back(v);
  }
  return out;
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const SpeckleParams sp{a.looks, a.seed};
  validate(sp);
  const ImageGrid clean = rescale_image(read_image(a.input), a.xmin, a.xmax);
  const ImageGrid noisy = apply_speckle(clean, sp);
  const fs::path clean_path = a.clean_output.empty() ? default_clean_path(a.output) : fs::path(a.clean_output);
  write_pfm(clean, clean_path);
  write_pfm(noisy, a.output);

  // SNR of the realized noise field y / x.
  double s = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < noisy.size(); ++i) {
    const double n = noisy[i] / clean[i];
    s += n;
    s2 += n * n;
  }
  const double n = static_cast<double>(noisy.size());
  const double m = s / n;
  const double var = s2 / n - m * m;
  out << "clean: " << clean_path.string() << "\n"
      << "noisy: " << a.output << "\n"
      << std::setprecision(6) << "empirical_snr: " << m * m / var << " (looks " << a.looks << ")\n";
  return kExitOk;
}

int cmd_denoise(const DenoiseArgs& a, std::ostream& out) {
  MidalParams p;
  p.looks = a.looks;
  p.lambda = a.lambda;
  p.mu = a.mu;
  p.inner_iters = a.inner_iters;
  p.stop_exponent = a.stop_m;
  p.max_outer = a.max_outer;
  validate(p);

  const ImageGrid noisy = read_image(a.input);
  const MidalResult res = midal_solve(noisy, p);
  write_pfm(res.estimate, a.output);
  if (!a.trace_csv.empty()) write_trace_csv(res.trace, fs::path(a.trace_csv));
  if (!a.trace_json.empty()) write_json_file(nlohmann::json(res.trace), a.trace_json);
  if (!a.preview.empty()) {
    const double hi = *std::max_element(res.estimate.values().begin(), res.estimate.values().end());
    const PgmWriteOptions opt{0.0, hi, a.preview_exponent};
    write_pgm(res.estimate, a.preview, ImageFileFormat::kPgm8, opt);
  }

  const double final_constraint = res.trace.records.back().constraint_sq;
  out << "iterations: " << res.iterations << (res.converged ? " (converged)" : " (max_outer reached)")
      << "\n"
      << std::setprecision(6) << "lambda: " << p.lambda << "  mu: " << p.effective_mu() << "\n"
      << "final_constraint_sq: " << final_constraint << "\n";
  return kExitOk;
}

int cmd_benchmark(const BenchmarkArgs& a, std::ostream& out) {
  if (a.seeds < 1) throw InvalidArgument("--seeds must be >= 1");
  const fs::path config_path = a.config;
  std::vector<ExperimentConfig> configs = parse_experiments(read_json_file(config_path));
  if (!a.only.empty()) {
    const std::vector<double> keep = parse_number_list(a.only, "--only");
    std::erase_if(configs, [&](const ExperimentConfig& c) {
      return std::find(keep.begin(), keep.end(), static_cast<double>(c.index)) == keep.end();
    });
  }
  const auto outcomes = run_benchmark(configs, config_path.parent_path(), a.seeds);
  write_json_file(benchmark_report_json(outcomes, a.timing), a.out);
  out << render_benchmark_table(outcomes);
  return kExitOk;
}

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  std::vector<double> grid = parse_number_list(a.grid, "--grid");
  if (grid.empty()) throw InvalidArgument("--grid is empty");
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  MidalParams p;
  p.looks = a.looks;
  p.lambda = grid.front();
  p.mu = a.mu;
  p.inner_iters = a.inner_iters;
  p.stop_exponent = a.stop_m;
  validate(p);

  const ImageGrid noisy = read_image(a.noisy);
  const ImageGrid truth = read_image(a.truth);
  const SweepResult res = lambda_sweep(noisy, truth, p, grid);

  nlohmann::json reports = nlohmann::json::array();
  for (const auto& [lambda, rep] : res.reports) {
    nlohmann::json j = rep;
    j["lambda"] = lambda;
    reports.push_back(j);
  }
  write_json_file(nlohmann::json{{"best_lambda", res.best_lambda}, {"reports", reports}}, a.out);
  out << std::setprecision(6) << "best_lambda: " << res.best_lambda << "\n";
  return kExitOk;
}

int cmd_metrics(const MetricsArgs& a, std::ostream& out) {
  const EvalReport r = evaluate(read_image(a.estimate), read_image(a.truth));
  out << nlohmann::json(r).dump() << "\n";
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Total-variation denoising of images corrupted by multiplicative Gamma speckle"};
  app.name("midal");
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "rescale a clean image and corrupt it with M-look speckle");
  s->add_option("--input", sim.input, "clean image (PGM or PFM)")->required();
  s->add_option("--looks", sim.looks, "number of looks M (>= 1)")->required();
  s->add_option("--seed", sim.seed, "noise seed")->required();
  s->add_option("--xmin", sim.xmin, "rescaled minimum")->required();
  s->add_option("--xmax", sim.xmax, "rescaled maximum")->required();
  s->add_option("--output", sim.output, "noisy image (PFM)")->required();
  s->add_option("--clean-output", sim.clean_output, "rescaled clean image (PFM); default <output stem>_clean<ext>");

  DenoiseArgs den;
  auto* d = app.add_subcommand("denoise", "run the ADMM denoiser on a noisy image");
  d->add_option("--input", den.input, "noisy image (PFM or PGM)")->required();
  d->add_option("--looks", den.looks, "number of looks M")->required();
  d->add_option("--lambda", den.lambda, "regularization weight")->required();
  d->add_option("--mu", den.mu, "penalty parameter (default: lambda)");
  d->add_option("--inner-iters", den.inner_iters, "TV prox fixed-point iterations")->capture_default_str();
  d->add_option("--stop-m", den.stop_m, "stop when relative change <= 10^-m")->capture_default_str();
  d->add_option("--max-outer", den.max_outer, "outer iteration cap")->capture_default_str();
  d->add_option("--output", den.output, "estimate (PFM)")->required();
  d->add_option("--trace", den.trace_csv, "per-iteration trace (CSV)");
  d->add_option("--trace-json", den.trace_json, "per-iteration trace (JSON)");
  d->add_option("--preview", den.preview, "8-bit PGM preview of the estimate");
  d->add_option("--preview-exponent", den.preview_exponent, "display exponent for --preview")
      ->capture_default_str();

  BenchmarkArgs bench;
  auto* b = app.add_subcommand("benchmark", "run an experiment table over several noise seeds");
  b->add_option("--config", bench.config, "experiments JSON")->required();
  b->add_option("--out", bench.out, "report JSON")->required();
  b->add_option("--seeds", bench.seeds, "noise realizations per experiment")->capture_default_str();
  b->add_option("--only", bench.only, "comma-separated experiment indices to run");
  b->add_flag("--timing", bench.timing, "include wall-clock seconds in the report JSON");

  SweepArgs sw;
  auto* w = app.add_subcommand("sweep", "pick lambda by lowest MSE against the truth");
  w->add_option("--noisy", sw.noisy, "noisy image")->required();
  w->add_option("--truth", sw.truth, "clean image")->required();
  w->add_option("--looks", sw.looks, "number of looks M")->required();
  w->add_option("--grid", sw.grid, "comma-separated lambda values")->required();
  w->add_option("--out", sw.out, "report JSON")->required();
  w->add_option("--mu", sw.mu, "fixed penalty parameter (default: track lambda)");
  w->add_option("--inner-iters", sw.inner_iters, "TV prox fixed-point iterations")->capture_default_str();
  w->add_option("--stop-m", sw.stop_m, "stopping exponent m")->capture_default_str();

  MetricsArgs met;
  auto* m = app.add_subcommand("metrics", "print Err, MAE and MSE as JSON");
  m->add_option("--estimate", met.estimate, "estimated image")->required();
  m->add_option("--truth", met.truth, "reference image")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (s->parsed()) return cmd_simulate(sim, out);
    if (d->parsed()) return cmd_denoise(den, out);
    if (b->parsed()) return cmd_benchmark(bench, out);
    if (w->parsed()) return cmd_sweep(sw, out);
    if (m->parsed()) return cmd_metrics(met, out);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "error: invalid config: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace midal::cli

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "midal/error.hpp"
#include "midal/metrics.hpp"
#include "midal/solver.hpp"

namespace midal {

/// One experiment row: what image, how it is rescaled and corrupted, and the
/// solver settings. `image` is a file path (relative paths resolve against the
/// config file's directory) or "phantom:<name>" for a synthetic substitute.
struct ExperimentConfig {
  int index = 0;
  std::string name;
  std::string image;
  std::size_t height = 0;  // 0: take from the file
  std::size_t width = 0;
  double looks = 1.0;
  double xmin = 0.0;
  double xmax = 1.0;
  double lambda = 1.0;
  std::optional<double> mu;  // JSON "auto" or absent: mu = lambda
  int stop_exponent = 4;
  std::uint64_t seed = 1;
  int inner_iters = 20;
  bool substitute = false;  // image replaces one that is not available
  std::string note;
};

// All serialized objects are flat with snake_case keys.

inline void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  j = nlohmann::json{{"index", c.index},
                     {"name", c.name},
                     {"image", c.image},
                     {"height", c.height},
                     {"width", c.width},
                     {"looks", c.looks},
                     {"xmin", c.xmin},
                     {"xmax", c.xmax},
                     {"lambda", c.lambda},
                     {"mu", c.mu ? nlohmann::json(*c.mu) : nlohmann::json("auto")},
                     {"stop_exponent", c.stop_exponent},
                     {"seed", c.seed},
                     {"inner_iters", c.inner_iters},
                     {"substitute", c.substitute},
                     {"note", c.note}};
}

inline void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  j.at("name").get_to(c.name);
  j.at("image").get_to(c.image);
  j.at("looks").get_to(c.looks);
  j.at("xmin").get_to(c.xmin);
  j.at("xmax").get_to(c.xmax);
  j.at("lambda").get_to(c.lambda);
  c.index = j.value("index", 0);
  c.height = j.value("height", std::size_t{0});
  c.width = j.value("width", std::size_t{0});
  c.stop_exponent = j.value("stop_exponent", 4);
  c.seed = j.value("seed", std::uint64_t{1});
  c.inner_iters = j.value("inner_iters", 20);
  c.substitute = j.value("substitute", false);
  c.note = j.value("note", std::string{});
  c.mu.reset();
  if (j.contains("mu")) {
    const auto& m = j.at("mu");
    if (m.is_number()) {
      c.mu = m.get<double>();
    } else if (!(m.is_string() && m.get<std::string>() == "auto")) {
      throw InvalidArgument("experiment '" + c.name + "': mu must be a number or \"auto\"");
    }
  }
  if (!(c.xmin > 0.0 && c.xmax > c.xmin)) {
    throw InvalidArgument("experiment '" + c.name + "': need xmax > xmin > 0");
  }
}

inline void to_json(nlohmann::json& j, const EvalReport& r) {
  j = nlohmann::json{{"err", r.err}, {"mae", r.mae}, {"mse", r.mse}};
}

inline void from_json(const nlohmann::json& j, EvalReport& r) {
  j.at("err").get_to(r.err);
  j.at("mae").get_to(r.mae);
  j.at("mse").get_to(r.mse);
}

inline void to_json(nlohmann::json& j, const TraceRecord& r) {
  j = nlohmann::json{{"iter", r.iter},
                     {"objective", r.objective},
                     {"constraint_sq", r.constraint_sq},
                     {"rel_change", r.rel_change},
                     {"inner_iters_cum", r.inner_iters_cum},
                     {"seconds", r.seconds}};
}

inline void to_json(nlohmann::json& j, const SolveTrace& t) {
  j = nlohmann::json{
      {"looks", t.looks}, {"lambda", t.lambda}, {"mu", t.mu}, {"records", t.records}};
}

inline constexpr const char* kTraceCsvHeader =
    "iter,objective,constraint_sq,rel_change,inner_iters_cum,seconds";

/// One row per outer iteration, preceded by a `#` line with the solver
/// parameters.
inline void write_trace_csv(const SolveTrace& trace, std::ostream& out) {
  out << std::setprecision(17);
  out << "# looks=" << trace.looks << " lambda=" << trace.lambda << " mu=" << trace.mu << "\n";
  out << kTraceCsvHeader << "\n";
  for (const auto& r : trace.records) {
    out << r.iter << "," << r.objective << "," << r.constraint_sq << "," << r.rel_change << ","
        << r.inner_iters_cum << "," << r.seconds << "\n";
  }
}

inline void write_trace_csv(const SolveTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot create " + path.string());
  write_trace_csv(trace, out);
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
}

inline void write_json_file(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot create " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

/// Accepts {"experiments": [...]} or a bare array.
inline std::vector<ExperimentConfig> parse_experiments(const nlohmann::json& j) {
  const nlohmann::json& list = j.is_array() ? j : j.at("experiments");
  std::vector<ExperimentConfig> out;
  for (const auto& e : list) out.push_back(e.get<ExperimentConfig>());
  return out;
}

}  // namespace midal

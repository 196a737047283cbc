#pragma once

// Experiment configuration, the preset corpus and the end-to-end pipeline
// verify-module -> regularity -> truncation -> ladder -> search -> verdict.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cliffpen/critical.hpp"
#include "cliffpen/serialize.hpp"

namespace cliffpen {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& message)
      : std::runtime_error(stage + ": " + message), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct ExperimentConfig {
  std::string name;
  std::string kind = "reduction";  // or "su2-check"
  int rank = 1;
  int dim_v = 2;
  Matrix frame;    // rank x rank, columns are the frame vectors
  Matrix lattice;  // dim_v x dim_v, columns span the lattice
  std::optional<CliffordModule> module;
  std::vector<TrigTerm> terms;
  std::optional<double> truncation;  // explicit N; empty means auto
  int cutoff = 8;
  double fiber_tol = 1e-12;
  double gradient_tol = 1e-10;
  double neumann_tol = 1e-12;
  double q_max = 0.25;
  int max_fiber_iter = 200;
  int starts = 32;
  double fiber_radius = 1e-2;
  int max_newton_iter = 100;
  std::vector<double> ladder_multipliers{1.0, 2.0, 4.0};
  std::optional<int> ladder_cutoff;  // box for the ladder probes; defaults to cutoff
  std::uint64_t seed = 0;
  std::optional<bool> h_nondegenerate;
  std::array<double, 3> su2_weights{2.0, -1.0, -1.0};
};

/// Parses and validates; throws ConfigError naming the offending field.
ExperimentConfig config_from_json(const json& j);
/// Normalised form with every field present.
json config_to_json(const ExperimentConfig& c);

/// Named preset documents, in a fixed order.
std::vector<std::pair<std::string, json>> presets();
json preset(const std::string& name);

struct ResultBundle {
  json result;
  json records;
  std::string ladder_csv;
  std::string status;  // PASS or SHORTFALL
  int exit_code = 0;   // 0 PASS, 2 shortfall
};

/// Runs the pipeline on an ingested document (echoed verbatim in the result).
/// Stage failures throw StageError.
ResultBundle run_experiment(const json& source);

/// result.json, records.json and ladder.csv in dir (created if needed).
void write_bundle(const ResultBundle& bundle, const std::filesystem::path& dir);

/// Canonical text form: sorted keys, two-space indent, trailing newline.
std::string canonical_dump(const json& j);

json record_to_json(const CriticalRecord& r);

}  // namespace cliffpen

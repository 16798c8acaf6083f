#pragma once

// Named experiments behind the command-line front end. Each experiment
// evaluates a set of invariant checks and renders a deterministic report:
// no timings, fixed number formatting, fixed iteration order.

#include "metricspace/fields.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace metricspace {

struct ExperimentConfig {
  std::string experiment;
  std::string input;  // field file for the base metric; empty: generated fixture
  int n = 2;
  std::size_t points = 8;
  std::uint64_t seed = 7;
  double spread = 2.0;
  std::optional<double> p;
  std::optional<double> t_max;
  double dt = 1e-3;
  std::optional<double> tol;
  std::string mode = "collapse";  // completion: collapse | blowup
  int count = 0;                  // instances / pairs / planes; 0: experiment default
  std::string output;             // empty: stdout
  std::string format = "table";   // csv | table

  /// Throws InputError for unknown names, non-positive dt or tolerances.
  void validate() const;
};

/// Overrides fields of `base` with the keys present in a JSON config file
/// (keys: experiment, input, n, points, seed, spread, p, t_max, dt, tol,
/// mode, count, output, format).
ExperimentConfig merge_config_file(ExperimentConfig base, const std::string& path);

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
};

struct ExperimentResult {
  std::string report;
  std::vector<CheckResult> checks;
  bool passed() const;
};

/// Runs one experiment: geodesic, ode-compare, curvature, distance,
/// completion, duality, verify-all or generate-fixture.
ExperimentResult run(const ExperimentConfig& config);

const std::vector<std::string>& experiment_names();

/// Random initial data for geodesic comparisons. `kind` cycles through
/// generic data, purely conformal data (A = 0 everywhere), mixed A = 0 / A != 0
/// points, and strongly negative / positive mean trace a0.
struct GeodesicInstance {
  std::string kind;
  MetricField g0;
  TangentField h0;
};
GeodesicInstance make_geodesic_instance(int index, std::uint64_t seed, int n,
                                        std::size_t points);

/// Perturbation of g of relative size `amplitude` at the listed points:
/// g^{1/2} exp(amplitude S) g^{1/2} with S random symmetric.
MetricField perturbed_field(const MetricField& g, std::uint64_t seed, double amplitude,
                            const std::vector<std::size_t>& where);

}  // namespace metricspace

// metricspace: command-line front end for the experiments.
//
// Exit codes: 0 all checks passed, 1 an invariant check failed or a numerical
// routine did not converge, 2 bad input.

#include "metricspace/experiments.hpp"
#include "metricspace/linalg.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace ms = metricspace;

namespace {

struct Flags {
  std::string config;
  std::optional<double> p, t_max, dt, tol, spread;
  std::optional<std::uint64_t> seed;
  std::optional<int> n, count;
  std::optional<std::size_t> points;
  std::string input, output, format, mode;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON config file; its keys override the individual flags");
  sub->add_option("--p", f.p, "exponent p of the metric g_p");
  sub->add_option("--t-max", f.t_max, "integration end time");
  sub->add_option("--dt", f.dt, "RK4 step");
  sub->add_option("--tol", f.tol, "tolerance of the main check");
  sub->add_option("--seed", f.seed, "RNG seed");
  sub->add_option("--input", f.input, "metric field JSON file");
  sub->add_option("--output", f.output, "write the report here instead of stdout");
  sub->add_option("--format", f.format, "csv or table")->check(CLI::IsMember({"csv", "table"}));
  sub->add_option("--mode", f.mode, "completion: collapse or blowup");
  sub->add_option("--count", f.count, "number of instances, pairs or planes");
  sub->add_option("--n", f.n, "fiber dimension of generated fields");
  sub->add_option("--points", f.points, "number of points of generated fields");
  sub->add_option("--spread", f.spread, "eigenvalue spread of generated fields");
}

// Individual flags first, then the config file, whose keys win.
ms::ExperimentConfig build_config(const std::string& name, const Flags& f) {
  ms::ExperimentConfig cfg;
  cfg.experiment = name;
  if (f.p) cfg.p = f.p;
  if (f.t_max) cfg.t_max = f.t_max;
  if (f.dt) cfg.dt = *f.dt;
  if (f.tol) cfg.tol = f.tol;
  if (f.seed) cfg.seed = *f.seed;
  if (f.n) cfg.n = *f.n;
  if (f.points) cfg.points = *f.points;
  if (f.spread) cfg.spread = *f.spread;
  if (f.count) cfg.count = *f.count;
  if (!f.input.empty()) cfg.input = f.input;
  if (!f.output.empty()) cfg.output = f.output;
  if (!f.format.empty()) cfg.format = f.format;
  if (!f.mode.empty()) cfg.mode = f.mode;
  if (!f.config.empty()) cfg = ms::merge_config_file(cfg, f.config);
  cfg.experiment = name;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiments on the g_p family of metrics on a space of Riemannian metrics"};
  app.require_subcommand(1);
  Flags flags;
  for (const auto& name : ms::experiment_names()) {
    add_common(app.add_subcommand(name), flags);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const std::string name = app.get_subcommands().front()->get_name();

  try {
    const ms::ExperimentConfig cfg = build_config(name, flags);
    const ms::ExperimentResult res = ms::run(cfg);
    if (cfg.output.empty()) {
      std::cout << res.report;
    } else {
      std::ofstream out(cfg.output, std::ios::binary);
      if (!out) throw ms::InputError("cannot write " + cfg.output);
      out << res.report;
      if (!out) throw ms::InputError("failed writing " + cfg.output);
    }
    if (!res.passed()) {
      for (const auto& c : res.checks) {
        if (!c.pass) std::cerr << "check failed: " << c.name << "\n";
      }
      return 1;
    }
    return 0;
  } catch (const ms::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const ms::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 1;
  }
}

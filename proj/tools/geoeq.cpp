// geoeq: command-line front end for the two-region equilibrium toolkit.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "geoeq/errors.hpp"
#include "geoeq/report/commands.hpp"
#include "geoeq/report/config.hpp"
#include "geoeq/report/writer.hpp"

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kSolver = 3, kIo = 4 };

struct Flags {
  std::optional<double> sigma, phi, tau, theta, alpha, beta, eta, mu, min, max;
  std::vector<double> thetas;
  std::optional<std::string> penalty, param, out, format, config;
  std::optional<int> grid, steps;
  int threads = 1;
  std::string figure;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--sigma", f.sigma, "elasticity of substitution (> 1)");
  auto* phi = cmd->add_option("--phi", f.phi, "freeness of trade in (0,1)");
  cmd->add_option("--tau", f.tau, "iceberg cost (> 1); alternative to --phi")->excludes(phi);
  cmd->add_option("--theta", f.theta, "utility curvature (>= 0)");
  cmd->add_option("--alpha", f.alpha, "fixed input requirement");
  cmd->add_option("--beta", f.beta, "variable input requirement");
  cmd->add_option("--eta", f.eta, "utility scale");
  cmd->add_option("--penalty", f.penalty, "location penalty: logit or linear");
  cmd->add_option("--mu", f.mu, "penalty heterogeneity / slope");
  cmd->add_option("--grid", f.grid, "number of grid intervals in h");
  cmd->add_option("--out", f.out, "output directory (CSV to stdout when omitted)");
  cmd->add_option("--format", f.format, "comma list of csv,json,svg");
  cmd->add_option("--threads", f.threads, "worker threads for sweeps, 0 = all cores");
  cmd->add_option("--config", f.config, "JSON config file; flags take precedence");
}

void add_sweep(CLI::App* cmd, Flags& f) {
  cmd->add_option("--param", f.param, "swept parameter: phi or mu");
  cmd->add_option("--min", f.min, "lower end of the sweep");
  cmd->add_option("--max", f.max, "upper end of the sweep");
  cmd->add_option("--steps", f.steps, "number of sweep samples");
}

geoeq::report::RunConfig to_config(geoeq::report::Command command, const Flags& f) {
  geoeq::report::RunConfig c;
  c.command = command;
  c.figure = f.figure;
  c.sigma = f.sigma;
  c.phi = f.phi;
  c.tau = f.tau;
  c.theta = f.theta;
  c.thetas = f.thetas;
  c.alpha = f.alpha;
  c.beta = f.beta;
  c.eta = f.eta;
  c.penalty = f.penalty;
  c.mu = f.mu;
  c.grid = f.grid;
  c.min = f.min;
  c.max = f.max;
  c.steps = f.steps;
  c.threads = f.threads;
  c.out = f.out;
  if (f.param) c.param = geoeq::report::parse_sweep_parameter(*f.param);
  if (f.format) c.formats = geoeq::report::split_list(*f.format);
  if (f.config) {
    std::ifstream in(*f.config);
    if (!in) throw geoeq::IoError(*f.config, "cannot open config file");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw geoeq::ConfigError(*f.config + ": " + e.what());
    }
    geoeq::report::merge_config_file(c, j);
  }
  if (c.formats.empty()) c.formats = {"csv", "json", "svg"};
  return c;
}

int execute(const geoeq::report::RunConfig& c) {
  const auto artifacts = geoeq::report::run(c);
  if (!c.out) {
    if (!artifacts.tables.empty()) std::cout << geoeq::report::to_csv(artifacts.tables.front());
    return kOk;
  }
  for (const auto& path : geoeq::report::write_artifacts(artifacts, *c.out, c.formats)) {
    std::cerr << "wrote " << path.string() << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  using geoeq::report::Command;
  CLI::App app{"Equilibria, stability and bifurcations of a two-region core-periphery economy"};
  app.require_subcommand(1);
  Flags f;

  auto* shortrun = app.add_subcommand("shortrun", "short-run wage, prices and consumption over h");
  add_common(shortrun, f);
  auto* deltau = app.add_subcommand("deltau", "utility differential over h");
  add_common(deltau, f);
  deltau->add_option("--thetas", f.thetas, "comma list of theta values")->delimiter(',');
  auto* equilibria = app.add_subcommand("equilibria", "long-run equilibria and their stability");
  add_common(equilibria, f);
  auto* thresholds = app.add_subcommand("thresholds", "dispersion and agglomeration thresholds");
  add_common(thresholds, f);
  auto* sweep = app.add_subcommand("sweep", "trace equilibria along phi or mu");
  add_common(sweep, f);
  add_sweep(sweep, f);
  auto* figure = app.add_subcommand("figure", "reproduce fig1, fig2, fig5, fig6-left, fig6-right");
  add_common(figure, f);
  add_sweep(figure, f);
  figure->add_option("--thetas", f.thetas, "comma list of theta values (fig2)")->delimiter(',');
  figure->add_option("name", f.figure, "figure name")
      ->required()
      ->check(CLI::IsMember(geoeq::report::figure_names()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  Command command = Command::shortrun;
  if (*deltau) command = Command::deltau;
  if (*equilibria) command = Command::equilibria;
  if (*thresholds) command = Command::thresholds;
  if (*sweep) command = Command::sweep;
  if (*figure) command = Command::figure;

  try {
    return execute(to_config(command, f));
  } catch (const geoeq::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const geoeq::SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolver;
  } catch (const geoeq::SingularityError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolver;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolver;
  }
}

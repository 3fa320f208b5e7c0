#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "geoeq/dispersion.hpp"
#include "geoeq/errors.hpp"
#include "geoeq/model_core.hpp"
#include "geoeq/sweep.hpp"

namespace geoeq::report {

enum class Command { shortrun, deltau, equilibria, thresholds, sweep, figure };

inline std::string_view to_string(Command c) {
  switch (c) {
    case Command::shortrun: return "shortrun";
    case Command::deltau: return "deltau";
    case Command::equilibria: return "equilibria";
    case Command::thresholds: return "thresholds";
    case Command::sweep: return "sweep";
    case Command::figure: return "figure";
  }
  return "unknown";
}

inline const std::vector<std::string>& figure_names() {
  static const std::vector<std::string> names = {"fig1", "fig2", "fig5", "fig6-left",
                                                 "fig6-right"};
  return names;
}

/// Raw user input. Unset fields fall back to per-command defaults, which for
/// figure commands are the captioned parameter values.
struct RunConfig {
  Command command = Command::shortrun;
  std::string figure;

  std::optional<double> sigma;
  std::optional<double> phi;
  std::optional<double> tau;
  std::optional<double> theta;
  std::vector<double> thetas;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> eta;

  std::optional<std::string> penalty;
  std::optional<double> mu;

  std::optional<int> grid;
  std::optional<SweepParameter> param;
  std::optional<double> min;
  std::optional<double> max;
  std::optional<int> steps;

  /// 0 = one per core. Never changes results.
  int threads = 1;
  std::optional<std::string> out;
  std::vector<std::string> formats;
};

/// Defaults a command applies to unset model fields.
struct ModelDefaults {
  double sigma = 2.0;
  double phi = 0.5;
  double theta = 0.0;
};

inline SweepParameter parse_sweep_parameter(const std::string& s) {
  if (s == "phi") return SweepParameter::phi;
  if (s == "mu") return SweepParameter::mu;
  throw ConfigError("sweep parameter must be phi or mu, got '" + s + "'");
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline void validate(const RunConfig& c) {
  if (c.phi && c.tau) throw ConfigError("give either --phi or --tau, not both");
  if (c.grid && *c.grid < 2) throw ConfigError("grid must be >= 2");
  if (c.steps && *c.steps < 2) throw ConfigError("steps must be >= 2");
  if (c.min && c.max && !(*c.min < *c.max)) throw ConfigError("min must be < max");
  if (c.threads < 0) throw ConfigError("threads must be >= 0");
  if (c.penalty && *c.penalty != "logit" && *c.penalty != "linear") {
    throw ConfigError("penalty must be logit or linear, got '" + *c.penalty + "'");
  }
  for (const auto& f : c.formats) {
    if (f != "csv" && f != "json" && f != "svg") {
      throw ConfigError("unknown format '" + f + "' (expected csv, json, svg)");
    }
  }
  if (c.command == Command::figure) {
    const auto& names = figure_names();
    if (std::find(names.begin(), names.end(), c.figure) == names.end()) {
      throw ConfigError("unknown figure '" + c.figure + "'");
    }
  }
}

/// Fills fields still unset in `c` from a JSON config document; values
/// already present (from flags) win.
inline void merge_config_file(RunConfig& c, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  auto num = [&](const char* key, std::optional<double>& slot) {
    if (slot || !j.contains(key)) return;
    if (!j[key].is_number()) throw ConfigError(std::string("config key '") + key + "' must be a number");
    slot = j[key].get<double>();
  };
  auto integer = [&](const char* key, std::optional<int>& slot) {
    if (slot || !j.contains(key)) return;
    if (!j[key].is_number_integer()) {
      throw ConfigError(std::string("config key '") + key + "' must be an integer");
    }
    slot = j[key].get<int>();
  };
  try {
    num("sigma", c.sigma);
    if (!c.phi && !c.tau) {
      num("phi", c.phi);
      num("tau", c.tau);
    }
    num("theta", c.theta);
    num("alpha", c.alpha);
    num("beta", c.beta);
    num("eta", c.eta);
    num("mu", c.mu);
    num("min", c.min);
    num("max", c.max);
    integer("grid", c.grid);
    integer("steps", c.steps);
    if (c.thetas.empty() && j.contains("thetas")) c.thetas = j["thetas"].get<std::vector<double>>();
    if (!c.penalty && j.contains("penalty")) c.penalty = j["penalty"].get<std::string>();
    if (!c.param && j.contains("param")) c.param = parse_sweep_parameter(j["param"].get<std::string>());
    if (!c.out && j.contains("out")) c.out = j["out"].get<std::string>();
    if (c.formats.empty() && j.contains("format")) c.formats = split_list(j["format"].get<std::string>());
    if (c.figure.empty() && j.contains("figure")) c.figure = j["figure"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config file: ") + e.what());
  }
}

inline ModelParams resolve_params(const RunConfig& c, const ModelDefaults& d) {
  const double sigma = c.sigma.value_or(d.sigma);
  const double theta = c.theta.value_or(d.theta);
  ModelParams p;
  if (c.tau) {
    p = ModelParams::from_tau(sigma, *c.tau, theta);
  } else {
    p = ModelParams::normalized(sigma, c.phi.value_or(d.phi), theta);
  }
  if (c.alpha) p.alpha = *c.alpha;
  if (c.beta) p.beta = *c.beta;
  if (c.eta) p.eta = *c.eta;
  p.validate();
  return p;
}

inline PenaltySpec resolve_penalty(const RunConfig& c, double default_mu = 0.2) {
  const std::string kind = c.penalty.value_or("logit");
  const double mu = c.mu.value_or(default_mu);
  return kind == "linear" ? PenaltySpec::linear(mu) : PenaltySpec::logit(mu);
}

/// Echo of the resolved model, penalty and grid for JSON output.
inline nlohmann::ordered_json echo(const ModelParams& p, const PenaltySpec& spec) {
  nlohmann::ordered_json j;
  j["sigma"] = p.sigma;
  j["phi"] = p.phi;
  j["tau"] = p.tau();
  j["theta"] = p.theta;
  j["alpha"] = p.alpha;
  j["beta"] = p.beta;
  j["eta"] = p.eta;
  j["normalized"] = p.is_normalized();
  j["penalty"] = spec.name();
  if (auto mu = spec.mu()) j["mu"] = *mu;
  return j;
}

}  // namespace geoeq::report

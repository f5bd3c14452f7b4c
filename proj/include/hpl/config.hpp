#pragma once

// JSON (de)serialization for the domain types and the experiment
// configuration, plus content fingerprints for manifests and cache keys.

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hpl/covariance.hpp"
#include "hpl/errors.hpp"
#include "hpl/hermite.hpp"
#include "hpl/pathgen.hpp"
#include "hpl/rng.hpp"
#include "hpl/trig.hpp"

namespace hpl {

using json = nlohmann::json;

// --- noise model: [{"D": .., "alpha": .., "kappa": ..}, ...] ---------------

inline json to_json(const NoiseModel& model) {
  json out = json::array();
  for (const auto& c : model.components)
    out.push_back({{"D", c.weight}, {"alpha", c.alpha}, {"kappa", c.kappa}});
  return out;
}

inline NoiseModel noise_model_from_json(const json& j) {
  if (!j.is_array()) throw config_error("noise: expected an array");
  NoiseModel model;
  for (const auto& item : j) {
    NoiseComponent c;
    c.weight = item.at("D").get<double>();
    c.alpha = item.at("alpha").get<double>();
    c.kappa = item.at("kappa").get<double>();
    model.components.push_back(c);
  }
  validate(model);
  return model;
}

// --- signal parameters ------------------------------------------------------

inline json to_json(const TrigParams& theta) {
  json harmonics = json::array();
  for (const auto& h : theta.harmonics)
    harmonics.push_back({{"A", h.a}, {"B", h.b}, {"phi", h.phi}});
  return {{"harmonics", harmonics},
          {"phi_lower", theta.phi_lower},
          {"phi_upper", theta.phi_upper}};
}

inline TrigParams trig_params_from_json(const json& j) {
  TrigParams theta;
  theta.phi_lower = j.value("phi_lower", 0.0);
  theta.phi_upper = j.value("phi_upper", 1.0);
  for (const auto& item : j.at("harmonics")) {
    Harmonic h;
    h.a = item.at("A").get<double>();
    h.b = item.at("B").get<double>();
    h.phi = item.at("phi").get<double>();
    theta.harmonics.push_back(h);
  }
  validate(theta);
  return theta;
}

// --- transforms: "H1".."H4" or {"coefficients": [C_1, C_2, ...]} -----------

inline json to_json(const TransformSpec& spec) {
  switch (spec.kind) {
    case TransformKind::kH1: return "H1";
    case TransformKind::kH2: return "H2";
    case TransformKind::kH3: return "H3";
    case TransformKind::kH4: return "H4";
    case TransformKind::kGeneral: break;
  }
  return {{"coefficients", spec.coefficients}};
}

inline TransformSpec transform_from_json(const json& j) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name.size() == 2 && name[0] == 'H' && name[1] >= '1' && name[1] <= '4')
      return builtin_transform(name[1] - '0');
    throw config_error("transform: unknown case \"" + name + "\"");
  }
  if (j.is_object() && j.contains("coefficients")) {
    TransformSpec spec;
    spec.kind = TransformKind::kGeneral;
    spec.coefficients = j.at("coefficients").get<std::vector<double>>();
    std::size_t rank = 0;
    for (std::size_t k = 1; k <= spec.coefficients.size() && rank == 0; ++k)
      if (std::fabs(spec.coefficients[k - 1]) > kRankTolerance) rank = k;
    if (rank == 0)
      throw degenerate_error("transform: all coefficients are zero");
    spec.rank = rank;
    return spec;
  }
  throw config_error("transform: expected \"H1\"..\"H4\" or coefficients");
}

// --- generation hints -------------------------------------------------------

inline json to_json(const PathGenOptions& gen) {
  const char* route = gen.route == PathRoute::kCholesky    ? "cholesky"
                      : gen.route == PathRoute::kCirculant ? "circulant"
                                                           : "auto";
  return {{"route", route},
          {"cholesky_max", gen.cholesky_max},
          {"nugget", gen.nugget},
          {"padding_factor", gen.padding_factor},
          {"clip_tolerance", gen.clip_tolerance}};
}

inline PathGenOptions pathgen_options_from_json(const json& j) {
  PathGenOptions gen;
  const std::string route = j.value("route", "auto");
  if (route == "cholesky") {
    gen.route = PathRoute::kCholesky;
  } else if (route == "circulant") {
    gen.route = PathRoute::kCirculant;
  } else if (route == "auto") {
    gen.route = PathRoute::kAuto;
  } else {
    throw config_error("generation.route: unknown value \"" + route + "\"");
  }
  gen.cholesky_max = j.value("cholesky_max", std::size_t{8192});
  gen.nugget = j.value("nugget", 0.0);
  gen.padding_factor = j.value("padding_factor", 2);
  gen.clip_tolerance = j.value("clip_tolerance", 1e-8);
  return gen;
}

// --- experiment configuration ----------------------------------------------

enum class ExperimentMode { kZetaNormality, kLseVarianceSweep, kLseNormality };

inline const char* mode_name(ExperimentMode mode) {
  switch (mode) {
    case ExperimentMode::kZetaNormality: return "zeta_normality";
    case ExperimentMode::kLseVarianceSweep: return "lse_variance_sweep";
    case ExperimentMode::kLseNormality: return "lse_normality";
  }
  return "zeta_normality";
}

struct ExperimentConfig {
  ExperimentMode mode = ExperimentMode::kZetaNormality;
  TrigParams theta;
  NoiseModel noise_template;           // alpha overridden per sweep value
  std::vector<std::string> cases;      // e.g. {"H1", "H2", "H3", "H4"}
  std::vector<double> alphas;          // sweep values; empty = template as-is
  std::vector<std::size_t> t_values;
  int replications_per_set = 200;
  int n_sets = 20;
  double significance = 0.01;
  std::uint64_t seed = 1;
  PathGenOptions generation;
};

inline void validate(const ExperimentConfig& config) {
  validate(config.theta);
  validate(config.noise_template);
  if (config.replications_per_set < 2)
    throw config_error("experiment: replications_per_set must be >= 2");
  if (config.n_sets < 1) throw config_error("experiment: n_sets must be >= 1");
  if (!(config.significance > 0.0 && config.significance < 1.0))
    throw config_error("experiment: significance must be in (0, 1)");
  if (config.t_values.empty())
    throw config_error("experiment: T_values must be nonempty");
  for (std::size_t i = 1; i < config.t_values.size(); ++i)
    if (config.t_values[i] <= config.t_values[i - 1])
      throw config_error("experiment: T_values must be strictly increasing");
  if (config.cases.empty())
    throw config_error("experiment: cases must be nonempty");
  for (const auto& name : config.cases)
    transform_from_json(json(name));  // validates the names
  for (double a : config.alphas)
    if (!(a > 0.0)) throw config_error("experiment: alphas must be > 0");
}

inline json to_json(const ExperimentConfig& config) {
  return {{"mode", mode_name(config.mode)},
          {"theta", to_json(config.theta)},
          {"noise", to_json(config.noise_template)},
          {"cases", config.cases},
          {"alphas", config.alphas},
          {"T_values", config.t_values},
          {"replications_per_set", config.replications_per_set},
          {"n_sets", config.n_sets},
          {"significance", config.significance},
          {"seed", config.seed},
          {"generation", to_json(config.generation)}};
}

inline ExperimentConfig experiment_config_from_json(const json& j) {
  ExperimentConfig config;
  const std::string mode = j.value("mode", "zeta_normality");
  if (mode == "zeta_normality") {
    config.mode = ExperimentMode::kZetaNormality;
  } else if (mode == "lse_variance_sweep") {
    config.mode = ExperimentMode::kLseVarianceSweep;
  } else if (mode == "lse_normality") {
    config.mode = ExperimentMode::kLseNormality;
  } else {
    throw config_error("experiment.mode: unknown value \"" + mode + "\"");
  }
  config.theta = trig_params_from_json(j.at("theta"));
  config.noise_template = noise_model_from_json(j.at("noise"));
  config.cases = j.value("cases", std::vector<std::string>{"H1"});
  config.alphas = j.value("alphas", std::vector<double>{});
  config.t_values = j.at("T_values").get<std::vector<std::size_t>>();
  config.replications_per_set = j.value("replications_per_set", 200);
  config.n_sets = j.value("n_sets", 20);
  config.significance = j.value("significance", 0.01);
  config.seed = j.value("seed", std::uint64_t{1});
  if (j.contains("generation"))
    config.generation = pathgen_options_from_json(j.at("generation"));
  validate(config);
  return config;
}

/// Model for one sweep value: the template with every component's decay
/// exponent replaced.
inline NoiseModel model_for_alpha(const NoiseModel& tmpl, double alpha) {
  NoiseModel model = tmpl;
  for (auto& c : model.components) c.alpha = alpha;
  return model;
}

/// Stable content hash of the full configuration.
inline std::uint64_t fingerprint(const ExperimentConfig& config) {
  std::uint64_t h = 0x65787063u;  // arbitrary domain separator
  h = hash_combine(h, static_cast<std::uint64_t>(config.mode));
  h = hash_combine(h, fingerprint(config.theta));
  h = hash_combine(h, fingerprint(config.noise_template));
  for (const auto& name : config.cases)
    for (char ch : name) h = hash_combine(h, static_cast<std::uint64_t>(ch));
  for (double a : config.alphas) h = hash_combine(h, double_bits(a));
  for (std::size_t t : config.t_values) h = hash_combine(h, t);
  h = hash_combine(h, static_cast<std::uint64_t>(config.replications_per_set));
  h = hash_combine(h, static_cast<std::uint64_t>(config.n_sets));
  h = hash_combine(h, double_bits(config.significance));
  h = hash_combine(h, config.seed);
  h = hash_combine(h, static_cast<std::uint64_t>(config.generation.route));
  h = hash_combine(h, config.generation.cholesky_max);
  h = hash_combine(h, double_bits(config.generation.nugget));
  h = hash_combine(h, static_cast<std::uint64_t>(config.generation.padding_factor));
  h = hash_combine(h, double_bits(config.generation.clip_tolerance));
  return h;
}

}  // namespace hpl

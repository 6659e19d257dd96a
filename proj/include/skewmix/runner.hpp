#pragma once

// Config-driven experiment runner behind the command line tool.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include <json.hpp>

#include "skewmix/symbolic_model.hpp"
#include "skewmix/thermo.hpp"

namespace skewmix {

struct Experiment {
  ExpandingModel model;
  RoofFunction roof;
  Potential potential;
  HolonomyCocycle cocycle;
  nlohmann::json config;
};

/// Builds the model objects from a validated config.
Experiment build_experiment(const nlohmann::json& config);

struct RunRequest {
  std::string subcommand;
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool deterministic = false;

  std::optional<int> irrep;     // SO2 frequency or twice the SU2 spin
  std::optional<double> im_z;
  std::optional<int> iterations;
  std::optional<std::string> out;
  std::optional<int> depth;
  std::optional<int> pasts;     // past length
  std::optional<int> grid;
  std::optional<int> k;
  std::optional<double> tmax;
  std::optional<std::uint64_t> samples;
};

/// Exit status: 0 success, 1 numerical check failure, 2 config or usage error.
int run(const RunRequest& request, std::ostream& log);

std::string version_string();

}  // namespace skewmix

// SPDX-License-Identifier: Apache-2.0

#ifndef CBMOR_SCENARIO_HPP
#define CBMOR_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cbmor/coupled.hpp"
#include "cbmor/sampler.hpp"

namespace cbmor {

/// Declarative description of a run, as read from a config file. build()
/// turns it into the assembled CoupledScenario.
struct Scenario {
  struct Substructure {
    std::string name;
    Mesh mesh;
    NeoHookeMaterial material;
  };

  struct RomConfig {
    std::vector<std::pair<int, std::string>> basis_files;  // sub, path
    int internal_modes = -1;
    int interface_modes = -1;
    bool interface_reduction = true;
  };

  struct SamplerSetup {
    int sampled_sub = 0;
    SamplerConfig config;
    BcParametrization parametrization;
  };

  std::vector<Substructure> subs;
  std::vector<InterfaceSpec> interfaces;
  std::vector<LoadCase> loads;
  std::string model = "fom";
  int load_steps = 1;
  SolveOptions solver;
  std::optional<CurveProbe> curve;
  std::optional<RomConfig> rom;
  std::optional<double> penalty_epsilon;
  std::optional<SamplerSetup> sampler;
  std::uint64_t seed = 0;
  std::string output;

  int index_of(const std::string& name) const;
  CoupledScenario build() const;
};

/// Parses and validates the JSON config; every violation is reported, not
/// just the first. Relative file references resolve against the config
/// file's directory.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& json_text,
                        const std::string& base_dir);

}  // namespace cbmor

#endif

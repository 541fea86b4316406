#pragma once

#include <json.hpp>
#include <string>

#include "hypermoment/solver.hpp"
#include "hypermoment/state.hpp"

namespace hypermoment::cli {

// State schema:
//   {"D": 2, "M": 3, "rho": 1.0, "u": [0, 0], "p": [[1, 0], [0, 1]],
//    "f": {"3,0": 0.1, "1,2": -0.02}}
// "theta": <scalar> may replace "p" (p = rho theta I). Coefficients not listed
// in "f" are zero. D and M may be omitted when the caller supplies defaults
// (dim/max_order > 0), as for the states inside a simulation config.
MomentState state_from_json(const nlohmann::json& j, int dim = 0, int max_order = 0);
nlohmann::json state_to_json(const MomentState& state);

struct SimulationSetup {
  SimulationConfig config;
  MomentState left{1, 2};
  MomentState right{1, 2};
  KineticConfig kinetic;
};

// Simulation schema:
//   {"D": 1, "M": 3, "t_end": 0.1, "cfl": 0.5, "output_interval": 0,
//    "x_interface": 0, "path_points": 4, "spectral_check": true,
//    "grid": {"nx": 100, "x_min": -1, "x_max": 1, "boundary": "copy"},
//    "collision": {"model": "bgk", "nu": 0, "prandtl": 1},
//    "left": <state>, "right": <state>,
//    "kinetic": {"velocity_points": 64, "width": 6, "clip_tolerance": 1e-8}}
SimulationSetup simulation_from_json(const nlohmann::json& j);

// Reads and parses a JSON file; DomainError on I/O or syntax errors.
nlohmann::json read_json_file(const std::string& path);

// CSV number text: 12 significant digits, so golden files survive round-off.
std::string number(double v);

}  // namespace hypermoment::cli

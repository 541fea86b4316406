#pragma once

#include <string>
#include <vector>

#include "hypermoment/state.hpp"

namespace hypermoment {

enum class Boundary { Copy, Periodic };

struct Grid1D {
  int nx = 100;
  double x_min = -1.0;
  double x_max = 1.0;
  Boundary boundary = Boundary::Copy;

  double dx() const { return (x_max - x_min) / nx; }
  double center(int i) const { return x_min + (i + 0.5) * dx(); }
  void validate() const;
};

struct SimulationConfig {
  int dim = 1;
  int max_order = 3;
  Grid1D grid;
  double cfl = 0.5;
  double t_end = 0.1;
  CollisionModel collision;
  double output_interval = 0.0;  // 0: initial and final snapshots only
  double x_interface = 0.0;      // Riemann data: left state for x < x_interface
  int path_points = 4;           // Gauss-Legendre nodes along each interface path
  bool spectral_check = true;    // compare the CFL bound with a numeric spectrum each step

  void validate() const;
};

// Macroscopic fields per cell. theta is the scalar temperature tr(p)/(D rho);
// q1 is the x1 heat flux (zero for M = 2).
struct Snapshot {
  double t = 0.0;
  std::vector<double> x, rho, u1, p11, theta, q1;
};

Snapshot snapshot_of(const std::vector<MomentState>& cells, const Grid1D& grid, double t);

// |u1| + c_max sqrt(theta_11), c_max the largest root of He_{M+1}.
double max_wave_speed(const MomentState& state);
double stable_time_step(const std::vector<MomentState>& cells, const SimulationConfig& config);

// One transport step (path-conservative Rusanov on the conserved moments)
// followed by the relaxation source. Throws DomainError when dt exceeds the
// CFL bound and AdmissibilityError (with the cell index) on loss of
// admissibility.
std::vector<MomentState> step(const std::vector<MomentState>& cells, double dt, const SimulationConfig& config);

struct SimulationResult {
  std::vector<Snapshot> snapshots;
  std::vector<MomentState> final_cells;
  int steps = 0;
};

SimulationResult simulate(const SimulationConfig& config, const std::vector<MomentState>& initial);
SimulationResult simulate(const SimulationConfig& config, const MomentState& left, const MomentState& right);

std::vector<MomentState> riemann_initial_data(const SimulationConfig& config, const MomentState& left,
                                              const MomentState& right);

// Discrete-velocity BGK reference for D = 1.
struct KineticConfig {
  int velocity_points = 64;
  double width = 6.0;  // half-width of the velocity grid in units of sqrt(theta_max)
  double clip_tolerance = 1e-8;  // a half-width of 6 clips about 2e-9
};

struct KineticResult {
  std::vector<Snapshot> snapshots;
  std::vector<double> velocities;
  double clipped_mass_fraction = 0.0;
  std::vector<std::string> warnings;
  int steps = 0;
};

KineticResult kinetic_reference(const SimulationConfig& config, const MomentState& left, const MomentState& right,
                                const KineticConfig& kinetic = {});

// L1 distance between two density profiles on the same grid, times dx.
double l1_density_distance(const Snapshot& a, const Snapshot& b, double dx);

}  // namespace hypermoment

#include "hypermoment/solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "hypermoment/assembly.hpp"
#include "hypermoment/errors.hpp"
#include "hypermoment/hermite.hpp"
#include "hypermoment/parallel.hpp"
#include "hypermoment/spectral.hpp"

namespace hypermoment {

namespace {

double largest_root(int n) {
  static std::mutex guard;
  static std::map<int, double> cache;
  std::lock_guard<std::mutex> lock(guard);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, hermite_roots(n).back()).first;
  return it->second;
}

std::size_t neighbour(long i, int nx, Boundary b) {
  if (b == Boundary::Periodic) return static_cast<std::size_t>(((i % nx) + nx) % nx);
  return static_cast<std::size_t>(std::clamp<long>(i, 0, nx - 1));
}

// Advances the conserved moments of one cell through the relaxation source
// with explicit Euler sub-steps no longer than 0.5 / nu.
void relax(Eigen::VectorXd& F, double dt, const SimulationConfig& cfg) {
  const double nu = cfg.collision.nu;
  if (nu == 0.0) return;
  const int D = cfg.dim;
  const double b = cfg.collision.mixing();
  double left = dt;
  while (left > 0.0) {
    const double h = std::min(left, 0.5 / nu);
    const MomentState s = from_conserved(F, D, cfg.max_order);
    const Eigen::MatrixXd target = b * s.theta_matrix() +
        (1.0 - b) * s.scalar_temperature() * Eigen::MatrixXd::Identity(D, D);
    const Eigen::VectorXd Fg = to_conserved(gaussian_state(D, cfg.max_order, s.rho(), s.velocity(), target));
    F += h * nu * (Fg - F);
    left -= h;
  }
}

// Maxwellian exp(a + b v + c v^2) on the velocity grid whose discrete mass,
// momentum and energy equal those of `f`, so that relaxation conserves them
// exactly. Newton iteration from the continuous Maxwellian.
std::vector<double> discrete_maxwellian(const double* f, const std::vector<double>& v, double dv) {
  const std::size_t nv = v.size();
  Eigen::Vector3d target = Eigen::Vector3d::Zero();
  for (std::size_t k = 0; k < nv; ++k) target += f[k] * dv * Eigen::Vector3d(1.0, v[k], v[k] * v[k]);
  const double rho = target(0), u = target(1) / rho, th = target(2) / rho - u * u;
  if (!(rho > 0.0 && th > 0.0)) throw AdmissibilityError("kinetic cell has no positive temperature", th);
  Eigen::Vector3d par(std::log(rho / std::sqrt(2.0 * M_PI * th)) - u * u / (2.0 * th), u / th, -0.5 / th);
  std::vector<double> m(nv);
  for (int it = 0; it < 20; ++it) {
    Eigen::Vector3d mom = Eigen::Vector3d::Zero();
    Eigen::Matrix3d jac = Eigen::Matrix3d::Zero();
    for (std::size_t k = 0; k < nv; ++k) {
      const Eigen::Vector3d phi(1.0, v[k], v[k] * v[k]);
      m[k] = std::exp(par.dot(phi));
      mom += m[k] * dv * phi;
      jac += m[k] * dv * phi * phi.transpose();
    }
    const Eigen::Vector3d delta = jac.ldlt().solve(target - mom);
    par += delta;
    if (delta.cwiseAbs().maxCoeff() < 1e-15 * (1.0 + par.cwiseAbs().maxCoeff())) break;
  }
  for (std::size_t k = 0; k < nv; ++k) m[k] = std::exp(par(0) + par(1) * v[k] + par(2) * v[k] * v[k]);
  return m;
}

double schedule_next(double t, double interval, double t_end) {
  if (interval <= 0.0) return t_end;
  const double k = std::floor(t / interval + 1e-9) + 1.0;
  return std::min(t_end, k * interval);
}

}  // namespace

void Grid1D::validate() const {
  if (nx < 4) throw DomainError("grid needs at least 4 cells");
  if (!(x_max > x_min)) throw DomainError("grid bounds must satisfy x_min < x_max");
}

void SimulationConfig::validate() const {
  if (dim < 1 || dim > 6) throw DomainError("D must lie in 1..6");
  if (max_order < 2) throw DomainError("M must be at least 2");
  grid.validate();
  if (!(cfl > 0.0 && cfl <= 1.0)) throw DomainError("CFL number must lie in (0, 1]");
  if (!(t_end > 0.0)) throw DomainError("t_end must be positive");
  if (!(output_interval >= 0.0)) throw DomainError("output interval must be non-negative");
  if (path_points < 1) throw DomainError("path quadrature needs at least one point");
  collision.validate();
}

Snapshot snapshot_of(const std::vector<MomentState>& cells, const Grid1D& grid, double t) {
  Snapshot s;
  s.t = t;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const MomentState& c = cells[i];
    s.x.push_back(grid.center(static_cast<int>(i)));
    s.rho.push_back(c.rho());
    s.u1.push_back(c.u(0));
    s.p11.push_back(c.p(0, 0));
    s.theta.push_back(c.scalar_temperature());
    s.q1.push_back(c.max_order() >= 3 ? heat_flux(c)(0) : 0.0);
  }
  return s;
}

double max_wave_speed(const MomentState& state) {
  return std::abs(state.u(0)) + largest_root(state.max_order() + 1) * std::sqrt(state.theta(0, 0));
}

double stable_time_step(const std::vector<MomentState>& cells, const SimulationConfig& config) {
  double smax = 0.0;
  for (const auto& c : cells) smax = std::max(smax, max_wave_speed(c));
  return config.cfl * config.grid.dx() / smax;
}

std::vector<MomentState> step(const std::vector<MomentState>& cells, double dt, const SimulationConfig& cfg) {
  const int nx = cfg.grid.nx;
  if (static_cast<int>(cells.size()) != nx) throw DomainError("cell count does not match the grid");
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  const double dt_max = stable_time_step(cells, cfg);
  if (dt > dt_max * (1.0 + 1e-12)) {
    throw DomainError("time step " + std::to_string(dt) + " violates the CFL bound " + std::to_string(dt_max));
  }
  const int D = cfg.dim, M = cfg.max_order;
  const double dx = cfg.grid.dx();

  std::vector<Eigen::VectorXd> F(cells.size());
  std::vector<double> speed(cells.size());
  std::size_t fastest = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    F[i] = to_conserved(cells[i]);
    speed[i] = max_wave_speed(cells[i]);
    if (speed[i] > speed[fastest]) fastest = i;
  }

  if (cfg.spectral_check) {
    const MomentState& c = cells[fastest];
    const long n = static_cast<long>(c.size());
    const Eigen::MatrixXd sys = c.u(0) * Eigen::MatrixXd::Identity(n, n) + assemble_regularized(c, 0).a;
    const double numeric = numeric_spectrum(sys).eigenvalues.cwiseAbs().maxCoeff();
    if (numeric > speed[fastest] * (1.0 + 1e-8) + 1e-12) {
      throw NumericalError("closed-form wave speed underestimates the spectrum in cell " + std::to_string(fastest));
    }
  }

  // Fluctuations at interface k, between cells k - 1 and k.
  std::vector<Eigen::VectorXd> minus(static_cast<std::size_t>(nx) + 1), plus(static_cast<std::size_t>(nx) + 1);
  parallel_for(static_cast<std::size_t>(nx) + 1, [&](std::size_t k) {
    const std::size_t l = neighbour(static_cast<long>(k) - 1, nx, cfg.grid.boundary);
    const std::size_t r = neighbour(static_cast<long>(k), nx, cfg.grid.boundary);
    const Eigen::VectorXd jump = F[r] - F[l];
    const Eigen::VectorXd fl = l == r ? Eigen::VectorXd::Zero(jump.size()).eval()
                                      : path_fluctuation(F[l], F[r], D, M, cfg.path_points);
    const double s = std::max(speed[l], speed[r]);
    minus[k] = 0.5 * (fl - s * jump);
    plus[k] = 0.5 * (fl + s * jump);
  });

  std::vector<MomentState> out(cells);
  parallel_for(cells.size(), [&](std::size_t i) {
    Eigen::VectorXd Fi = F[i] - dt / dx * (plus[i] + minus[i + 1]);
    try {
      relax(Fi, dt, cfg);
      out[i] = from_conserved(Fi, D, M);
    } catch (const AdmissibilityError& e) {
      throw AdmissibilityError("cell " + std::to_string(i) + " lost admissibility: " + e.what(), e.min_eigenvalue(),
                               static_cast<long>(i));
    }
  });
  return out;
}

std::vector<MomentState> riemann_initial_data(const SimulationConfig& config, const MomentState& left,
                                              const MomentState& right) {
  config.validate();
  for (const MomentState* s : {&left, &right}) {
    if (s->dim() != config.dim || s->max_order() != config.max_order) {
      throw DomainError("Riemann data do not match the configured D and M");
    }
    validate(*s);
  }
  std::vector<MomentState> cells;
  cells.reserve(static_cast<std::size_t>(config.grid.nx));
  for (int i = 0; i < config.grid.nx; ++i) cells.push_back(config.grid.center(i) < config.x_interface ? left : right);
  return cells;
}

SimulationResult simulate(const SimulationConfig& config, const std::vector<MomentState>& initial) {
  config.validate();
  SimulationResult res;
  std::vector<MomentState> cells = initial;
  for (const auto& c : cells) validate(c);
  double t = 0.0;
  res.snapshots.push_back(snapshot_of(cells, config.grid, t));
  double next = schedule_next(t, config.output_interval, config.t_end);
  while (t < config.t_end) {
    double dt = stable_time_step(cells, config);
    bool hit = false;
    if (t + dt >= next - 1e-12 * config.t_end) {
      dt = next - t;
      hit = true;
    }
    cells = step(cells, dt, config);
    ++res.steps;
    if (hit) {
      t = next;
      res.snapshots.push_back(snapshot_of(cells, config.grid, t));
      next = schedule_next(t, config.output_interval, config.t_end);
    } else {
      t += dt;
    }
  }
  res.final_cells = std::move(cells);
  return res;
}

SimulationResult simulate(const SimulationConfig& config, const MomentState& left, const MomentState& right) {
  return simulate(config, riemann_initial_data(config, left, right));
}

KineticResult kinetic_reference(const SimulationConfig& config, const MomentState& left, const MomentState& right,
                                const KineticConfig& kin) {
  config.validate();
  if (config.dim != 1) throw DomainError("the kinetic reference is one-dimensional");
  if (kin.velocity_points < 48 || kin.width < 6.0) {
    throw DomainError("the kinetic reference needs at least 48 velocities and a half-width of 6");
  }
  const std::vector<MomentState> init = riemann_initial_data(config, left, right);
  const int nx = config.grid.nx;
  const int nv = kin.velocity_points;
  const double dx = config.grid.dx();

  const double th_max = std::max(left.theta(0, 0), right.theta(0, 0));
  const double lo = std::min(left.u(0), right.u(0)) - kin.width * std::sqrt(th_max);
  const double hi = std::max(left.u(0), right.u(0)) + kin.width * std::sqrt(th_max);
  const double dv = (hi - lo) / nv;
  KineticResult res;
  for (int k = 0; k < nv; ++k) res.velocities.push_back(lo + (k + 0.5) * dv);
  const std::vector<double>& v = res.velocities;

  // Mass of the Gaussian part of each state that falls outside the grid.
  for (const MomentState* s : {&left, &right}) {
    const double sd = std::sqrt(2.0 * s->theta(0, 0));
    const double outside = 0.5 * std::erfc((s->u(0) - lo) / sd) + 0.5 * std::erfc((hi - s->u(0)) / sd);
    res.clipped_mass_fraction = std::max(res.clipped_mass_fraction, outside);
  }
  if (res.clipped_mass_fraction > kin.clip_tolerance) {
    res.warnings.push_back("velocity grid clips a mass fraction of " + std::to_string(res.clipped_mass_fraction));
  }

  // f(x_i, v_k), row-major in cells.
  std::vector<double> f(static_cast<std::size_t>(nx) * static_cast<std::size_t>(nv));
  auto at = [&](int i, int k) -> double& { return f[static_cast<std::size_t>(i) * static_cast<std::size_t>(nv) + static_cast<std::size_t>(k)]; };
  for (int i = 0; i < nx; ++i) {
    const MomentState& s = init[static_cast<std::size_t>(i)];
    const double th = s.theta(0, 0), u = s.u(0);
    for (int k = 0; k < nv; ++k) {
      const double c = v[static_cast<std::size_t>(k)] - u;
      double poly = 0.0;
      for (int j = 0; j <= s.max_order(); ++j) poly += s.f(MultiIndex{j}) * hermite(j, th, c);
      at(i, k) = poly * std::exp(-c * c / (2.0 * th)) / std::sqrt(2.0 * M_PI * th);
    }
  }

  struct Moments {
    double rho, u, p, q;
  };
  auto moments = [&](int i) {
    double m0 = 0, m1 = 0;
    for (int k = 0; k < nv; ++k) {
      m0 += at(i, k);
      m1 += at(i, k) * v[static_cast<std::size_t>(k)];
    }
    const double u = m1 / m0;
    double p = 0, q = 0;
    for (int k = 0; k < nv; ++k) {
      const double c = v[static_cast<std::size_t>(k)] - u;
      p += at(i, k) * c * c;
      q += 0.5 * at(i, k) * c * c * c;
    }
    return Moments{m0 * dv, u, p * dv, q * dv};
  };
  auto snapshot = [&](double t) {
    Snapshot s;
    s.t = t;
    for (int i = 0; i < nx; ++i) {
      const Moments m = moments(i);
      s.x.push_back(config.grid.center(i));
      s.rho.push_back(m.rho);
      s.u1.push_back(m.u);
      s.p11.push_back(m.p);
      s.theta.push_back(m.p / m.rho);
      s.q1.push_back(m.q);
    }
    return s;
  };

  const double vmax = std::max(std::abs(lo), std::abs(hi));
  const double dt_stable = config.cfl * dx / vmax;
  double t = 0.0;
  res.snapshots.push_back(snapshot(t));
  double next = schedule_next(t, config.output_interval, config.t_end);
  std::vector<double> fn(f.size());
  while (t < config.t_end) {
    double dt = dt_stable;
    bool hit = false;
    if (t + dt >= next - 1e-12 * config.t_end) {
      dt = next - t;
      hit = true;
    }
    const double ratio = dt / dx;
    parallel_for(static_cast<std::size_t>(nx), [&](std::size_t ii) {
      const int i = static_cast<int>(ii);
      const int il = static_cast<int>(neighbour(i - 1, nx, config.grid.boundary));
      const int ir = static_cast<int>(neighbour(i + 1, nx, config.grid.boundary));
      for (int k = 0; k < nv; ++k) {
        const double vk = v[static_cast<std::size_t>(k)];
        const double upwind = vk > 0.0 ? vk * (at(i, k) - at(il, k)) : vk * (at(ir, k) - at(i, k));
        fn[ii * static_cast<std::size_t>(nv) + static_cast<std::size_t>(k)] = at(i, k) - ratio * upwind;
      }
    });
    f.swap(fn);
    if (config.collision.nu > 0.0) {
      const double decay = std::exp(-config.collision.nu * dt);
      parallel_for(static_cast<std::size_t>(nx), [&](std::size_t ii) {
        const int i = static_cast<int>(ii);
        const std::vector<double> target = discrete_maxwellian(&at(i, 0), v, dv);
        for (int k = 0; k < nv; ++k) {
          const double mk = target[static_cast<std::size_t>(k)];
          at(i, k) = mk + (at(i, k) - mk) * decay;
        }
      });
    }
    ++res.steps;
    if (hit) {
      t = next;
      res.snapshots.push_back(snapshot(t));
      next = schedule_next(t, config.output_interval, config.t_end);
    } else {
      t += dt;
    }
  }
  return res;
}

double l1_density_distance(const Snapshot& a, const Snapshot& b, double dx) {
  if (a.rho.size() != b.rho.size()) throw DomainError("profiles live on different grids");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.rho.size(); ++i) acc += std::abs(a.rho[i] - b.rho[i]);
  return acc * dx;
}

}  // namespace hypermoment

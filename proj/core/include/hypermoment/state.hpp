#pragma once

#include <Eigen/Dense>
#include <memory>

#include "hypermoment/index.hpp"

namespace hypermoment {

enum class CollisionKind { BGK, ESBGK };

struct CollisionModel {
  double nu = 0.0;  // collision frequency
  CollisionKind kind = CollisionKind::BGK;
  double prandtl = 1.0;  // only used by ES-BGK

  // Mixing weight between the pressure tensor and the isotropic part of the
  // target covariance: 0 for BGK, 1 - 1/Pr for ES-BGK (must lie in [-1/2, 1]).
  double mixing() const;
  void validate() const;
};

// Moment vector w in rank order: density, velocity, p_ij / (1 + delta_ij) at
// the second-order slots, and expansion coefficients f_alpha for
// 3 <= |alpha| <= M. The coefficients of order 0..2 are pinned by
// construction (f_0 = rho, first and second order vanish).
class MomentState {
 public:
  MomentState(int dim, int max_order);
  MomentState(std::shared_ptr<const IndexSet> set, Eigen::VectorXd w);

  int dim() const { return set_->dim(); }
  int max_order() const { return set_->max_order(); }
  std::size_t size() const { return set_->size(); }
  const IndexSet& indices() const { return *set_; }
  const std::shared_ptr<const IndexSet>& index_set_ptr() const { return set_; }

  const Eigen::VectorXd& w() const { return w_; }
  Eigen::VectorXd& w() { return w_; }

  double rho() const { return w_(0); }
  void set_rho(double v) { w_(0) = v; }
  double u(int i) const { return w_(1 + i); }
  void set_u(int i, double v) { w_(1 + i) = v; }
  Eigen::VectorXd velocity() const;

  double p(int i, int j) const;
  void set_p(int i, int j, double v);
  Eigen::MatrixXd pressure() const;
  double theta(int i, int j) const { return p(i, j) / rho(); }
  Eigen::MatrixXd theta_matrix() const { return pressure() / rho(); }
  double scalar_temperature() const;  // trace(p) / (D rho)

  // Expansion coefficient with the pinned values and Grad closure applied:
  // f_0 = rho, zero for orders 1, 2, above M, and for void indices.
  double f(const MultiIndex& alpha) const;
  void set_f(const MultiIndex& alpha, double v);

  std::size_t slot_of_p(int i, int j) const;
  std::size_t slot_of(const MultiIndex& alpha) const;

 private:
  std::shared_ptr<const IndexSet> set_;
  Eigen::VectorXd w_;
};

MomentState equilibrium(int dim, int max_order, double rho, const Eigen::VectorXd& u, double theta);
// Gaussian state with an arbitrary covariance and no higher coefficients.
MomentState gaussian_state(int dim, int max_order, double rho, const Eigen::VectorXd& u,
                           const Eigen::MatrixXd& theta);

// q_i = 2 f_{3e_i} + sum_d f_{e_i+2e_d}; needs M >= 3.
Eigen::VectorXd heat_flux(const MomentState& state);

// F_alpha = (1/alpha!) int xi^alpha f dxi for |alpha| <= order (default M).
// Orders above M use the Grad closure f = 0. Indexed by index_set(D, order).
Eigen::VectorXd to_conserved(const MomentState& state, int order = -1);
MomentState from_conserved(const Eigen::VectorXd& conserved, int dim, int max_order);

// Expansion coefficients of the collision target in the basis of `state`,
// indexed like w (slot 0 holds rho, second order slots hold G_{e_i+e_j}).
Eigen::VectorXd collision_coefficients(const MomentState& state, const CollisionModel& model);

bool is_admissible(const MomentState& state, double rel_tol = 1e-12);
// Throws AdmissibilityError when rho <= 0 or the temperature tensor is not SPD.
void validate(const MomentState& state);

// Basis-agnostic conversions. `coeffs` are expansion coefficients over
// `coeff_set` in the Hermite functions centred at u with covariance theta.
Eigen::VectorXd raw_moments(const IndexSet& coeff_set, const Eigen::VectorXd& coeffs,
                            const Eigen::VectorXd& u, const Eigen::MatrixXd& theta, int order);
// Inverse of raw_moments for coefficient order == moment order.
Eigen::VectorXd expansion_coefficients(const IndexSet& moment_set, const Eigen::VectorXd& moments,
                                       const Eigen::VectorXd& u, const Eigen::MatrixXd& theta);

}  // namespace hypermoment

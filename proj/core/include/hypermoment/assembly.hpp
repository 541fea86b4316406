#pragma once

#include <Eigen/Dense>

#include "hypermoment/state.hpp"

namespace hypermoment {

// Coefficient matrix of the quasi-linear system in direction d, written in the
// frame moving with u_d (the convective u_d I part is left out).
struct CoefficientMatrix {
  Eigen::MatrixXd a;
  int direction = 0;  // 0-based; -1 for a combined direction
  bool regularized = false;
};

CoefficientMatrix assemble(const MomentState& state, int direction);
// Applies the top-order correction; a no-op on an already regularized matrix.
CoefficientMatrix regularize(const CoefficientMatrix& m, const MomentState& state);
CoefficientMatrix assemble_regularized(const MomentState& state, int direction);
// sum_d n_d A^(d) for a unit vector n.
CoefficientMatrix directional(const MomentState& state, const Eigen::VectorXd& n,
                              bool regularized = true);

// Collision right-hand side of the quasi-linear system, in w coordinates.
Eigen::VectorXd source(const MomentState& state, const CollisionModel& model);

struct StructuralReport {
  double max_abs_diagonal = 0.0;
  int max_upper_per_row = 0;         // strictly upper nonzeros in one row
  double velocity_sensitivity = 0.0;  // max |A(u) - A(u + shift)|
  bool block_lower_triangular = false;
  double max_above_blocks = 0.0;      // largest entry above the block diagonal
};

// Checks the sparsity claims. Block structure is only meaningful for x_1.
StructuralReport structural_report(const CoefficientMatrix& m, const MomentState& state,
                                   double zero_tol = 0.0);

// Permutes rows and columns into tail-block order.
Eigen::MatrixXd to_block_order(const Eigen::MatrixXd& a, int dim, int max_order);

// ---- Conservative form in the x_1 direction --------------------------------
// In the conserved variables F the system reads dF/dt + Gamma(F) dF/dx = 0.
// Rows with |alpha| < M are conservation laws with flux (alpha_1 + 1) F_{alpha+e_1};
// top-order rows carry an extra nonconservative product.

// Flux (alpha_1 + 1) F_{alpha+e_1} for every slot, with the Grad closure for
// order M + 1.
Eigen::VectorXd conservative_flux(const MomentState& state);

// int_0^1 Gamma(Phi) dPhi/dnu dnu along the straight line from F_left to
// F_right, evaluated with a Gauss-Legendre rule of `points` nodes.
Eigen::VectorXd path_fluctuation(const Eigen::VectorXd& F_left, const Eigen::VectorXd& F_right,
                                 int dim, int max_order, int points);

}  // namespace hypermoment

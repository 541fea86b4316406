#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hypermoment/state.hpp"

namespace hypermoment {

// One characteristic field of the regularized system in direction n:
// eigenvalue c * sqrt(n^T Theta n), c the root_index-th (1-based, ascending)
// root of He_family_m. multiplicity counts equal eigenvalue values.
struct SpectrumEntry {
  double eigenvalue = 0.0;
  int multiplicity = 0;
  int family_m = 0;
  int root_index = 0;
};

// Closed-form spectrum of the regularized matrix, one entry per slot, sorted
// by eigenvalue. Without a direction the x_1 matrix is meant.
std::vector<SpectrumEntry> spectrum_regularized(const MomentState& state);
std::vector<SpectrumEntry> spectrum_regularized(const MomentState& state, const Eigen::VectorXd& n);

// Ascending coefficients of det(lambda I - B) for the unregularized tail-zero
// block: theta^{M+1} He_{M+1}(lambda) - (M+1)!/rho (lambda f_M + (lambda^2 - theta) f_{M-1} / 2).
Eigen::VectorXd charpoly_1d_unregularized(const MomentState& state);

struct NumericSpectrum {
  Eigen::VectorXcd eigenvalues;  // sorted by real part
  double max_imag = 0.0;
};
NumericSpectrum numeric_spectrum(const Eigen::MatrixXd& a);

struct NonHyperbolicWitness {
  MomentState state;
  double coefficient = 0.0;  // value of f_{M e_1}
  double max_imag = 0.0;
};
// Smallest f_{M e_1} on a geometric scan (rho = 1, u = 0, Theta = I) at which
// the unregularized x_1 matrix has |Im lambda| > min_imag.
NonHyperbolicWitness find_nonhyperbolic_state(int dim, int max_order, double min_imag = 1e-3);

// Eigenvector of the diagonal block with tail order `tail_order` for one of
// its eigenvalues, in block-local order, first entry 1.
Eigen::VectorXd block_eigenvector(int tail_order, double lambda, const MomentState& state);

struct Prolongation {
  Eigen::VectorXd vector;  // natural slot order
  bool closed_form = true;
  std::string note;
};
// Extends a block eigenvector of the block with tail alpha.tail() to an
// eigenvector of the full regularized x_1 matrix, with zeros on every earlier
// block. lambda = 0 uses the explicit g-coordinate recursion; otherwise the
// later blocks are solved one by one.
Prolongation prolong(const Eigen::VectorXd& block_vector, const MultiIndex& alpha, double lambda,
                     const MomentState& state);

struct EigenDecomposition {
  Eigen::VectorXd eigenvalues;   // one per column
  std::vector<int> family_m;     // 0 when the numeric fallback was used
  std::vector<int> root_index;
  Eigen::MatrixXd vectors;       // columns, natural slot order, head entry 1
  double residual = 0.0;         // |A R - R L|_inf / |A|_inf with unit-max columns
  double condition = 0.0;        // sigma_max / sigma_min of the column-normalized R
  long rank = 0;
  bool closed_form = true;
  bool diagonalizable = true;
  std::string note;
};
EigenDecomposition full_eigendecomposition(const MomentState& state);

// Largest deviation, relative to the spectral radius, between the closed-form
// spectrum c sqrt(n^T Theta n) and the numeric eigenvalues of sum_d n_d A^(d).
double rotation_spectrum_check(const MomentState& state, const Eigen::VectorXd& n);

// Map to and from the material-derivative coordinates
// g_alpha = dw-change of f_alpha + sum_i f_{alpha-e_i} du_i + 1/2 sum_ij f_{alpha-e_i-e_j} dtheta_ij.
Eigen::VectorXd to_material(const MomentState& state, const Eigen::VectorXd& dw);
Eigen::VectorXd from_material(const MomentState& state, const Eigen::VectorXd& g);

}  // namespace hypermoment

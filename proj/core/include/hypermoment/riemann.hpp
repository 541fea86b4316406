#pragma once

#include <Eigen/Dense>
#include <string>

#include "hypermoment/index.hpp"
#include "hypermoment/state.hpp"

namespace hypermoment {

enum class FieldNature { GenuinelyNonlinear, LinearlyDegenerate };
enum class WaveKind { Rarefaction, Contact, Shock };

std::string to_string(FieldNature n);
std::string to_string(WaveKind k);

// Characteristic field of the x1-split system: lambda = u1 + c sqrt(theta_11),
// c the root_index-th root of He_family_m. `block_head` (alpha_1 = 0) names the
// diagonal block whose eigenvector generates the field; its order is
// M + 1 - family_m.
struct CharField {
  double c = 0.0;
  int family_m = 0;
  int root_index = 0;
  MultiIndex block_head;
  FieldNature nature = FieldNature::LinearlyDegenerate;
};

// Throws DomainError when c sqrt(theta_11) is not in the closed-form spectrum.
CharField classify_field(const MomentState& state, double c, double tol = 1e-9);
// Field of the root_index-th root (1-based, ascending) of He_{M+1}.
CharField top_family_field(const MomentState& state, int root_index);

double field_eigenvalue(const MomentState& state, const CharField& field);

// Right eigenvector of u1 I + A_tilde for the field. Scaled so that the density
// entry equals rho when it is nonzero, otherwise so that the block head is 1.
Eigen::VectorXd field_eigenvector(const MomentState& state, const CharField& field);

// grad_w lambda . R with lambda = u1 + c sqrt(2 w_{2e1} / rho), by central
// differences, and the value predicted from the density entry of R.
struct NonlinearityCheck {
  double numeric = 0.0;
  double predicted = 0.0;
};
NonlinearityCheck nonlinearity_check(const MomentState& state, const CharField& field);

struct RarefactionResult {
  MomentState state{1, 2};
  // Largest relative gap between the integrated and closed-form (rho, u1, p11).
  double closed_form_gap = 0.0;
  bool unit_speed_limit = false;  // c^2 = 1: the velocity formula uses its limit
};
// Follows dw/dzeta = R(w) from state0. Density, u1 and p11 are taken from the
// closed forms, the remaining components from an adaptive Dormand-Prince run.
RarefactionResult rarefaction_curve(const MomentState& state0, const CharField& field, double zeta,
                                    double tol = 1e-11);

struct ContactVerdict {
  bool ok = false;
  double velocity_gap = 0.0;
  double pressure_gap = 0.0;
  double eigenvalue_gap = 0.0;
};
ContactVerdict contact_check(const MomentState& left, const MomentState& right, const CharField& field,
                             double tol = 1e-10);

struct ShockReport {
  double conservative_residual = 0.0;     // max |S dF - d(flux)| over |alpha| < M
  double nonconservative_residual = 0.0;  // top rows along the linear path
  double lambda_left = 0.0;
  double lambda_right = 0.0;
  bool entropy_ok = false;  // lambda_left > S > lambda_right
  double density_pressure_product = 0.0;  // (rho_L - rho_R)(p11_L - p11_R)
};
ShockReport shock_check(const Eigen::VectorXd& F_left, const Eigen::VectorXd& F_right, double speed,
                        const CharField& field, int dim, int max_order, int path_points = 32);

// Speed from mass balance: (rho_L u_L - rho_R u_R) / (rho_L - rho_R).
double mass_balance_speed(const MomentState& left, const MomentState& right);

struct HugoniotResult {
  MomentState right{1, 2};
  double speed = 0.0;
  double residual = 0.0;
  int iterations = 0;
};
// Solves the generalized Rankine-Hugoniot condition for the state behind a
// jump from `left` in the given field, with the right density prescribed.
// Newton iteration starting from the integral curve; throws NumericalError
// on failure to converge.
HugoniotResult hugoniot_state(const MomentState& left, const CharField& field, double rho_right,
                              int path_points = 32, double tol = 1e-12);

struct ElementaryWave {
  WaveKind kind = WaveKind::Contact;
  MomentState left{1, 2};
  MomentState right{1, 2};
  double speed_left = 0.0;   // shock speed, or the eigenvalue at the left edge
  double speed_right = 0.0;  // equal to speed_left for shocks and contacts
  CharField field;
};

struct TableVerdict {
  bool ok = false;
  std::string expected;  // the relation the table prescribes
  double velocity_jump = 0.0;  // u1_R - u1_L
  double pressure_jump = 0.0;  // p11_R - p11_L
};
TableVerdict wave_table_check(const ElementaryWave& wave, double rel_tol = 1e-10);

}  // namespace hypermoment

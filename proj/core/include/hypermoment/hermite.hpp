#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hypermoment/index.hpp"

namespace hypermoment {

// One-dimensional Hermite polynomials with variance theta, orthogonal under the
// Gaussian of variance theta: He_{n+1} = (x He_n - n He_{n-1}) / theta.
double hermite(int n, double theta, double x);

// Monic rescaling theta^n He_n = theta^{n/2} He_n(x / sqrt(theta)).
// Recurrence H_{n+1} = x H_n - n theta H_{n-1}. Characteristic polynomials of
// the moment blocks are written in terms of these.
double hermite_monic(int n, double theta, double x);

// Roots of the standard (theta = 1) polynomial He_n in ascending order,
// exactly symmetric, with an exact zero for odd n.
std::vector<double> hermite_roots(int n);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss rule for the standard normal density; weights sum to one.
QuadratureRule gauss_hermite(int points);
// Gauss-Legendre rule on [a, b].
QuadratureRule gauss_legendre(int points, double a = -1.0, double b = 1.0);

// Symmetric positive definite covariance together with its inverse and
// Cholesky factor. Defines the weight and the generalized Hermite family.
class CovarianceBasis {
 public:
  explicit CovarianceBasis(const Eigen::MatrixXd& theta);

  int dim() const { return static_cast<int>(theta_.rows()); }
  const Eigen::MatrixXd& theta() const { return theta_; }
  const Eigen::MatrixXd& inverse() const { return inverse_; }
  const Eigen::MatrixXd& cholesky() const { return lower_; }
  double determinant() const { return det_; }

  double weight(const Eigen::VectorXd& x) const;

 private:
  Eigen::MatrixXd theta_;
  Eigen::MatrixXd inverse_;
  Eigen::MatrixXd lower_;
  double det_;
};

// Values He_beta(x) for every beta in `set`, indexed by slot.
std::vector<double> hermite_table(const IndexSet& set, const CovarianceBasis& basis,
                                  const Eigen::VectorXd& x);
double hermite_eval(const MultiIndex& alpha, const CovarianceBasis& basis, const Eigen::VectorXd& x);
// Hermite function: weight times polynomial.
double hermite_function(const MultiIndex& alpha, const CovarianceBasis& basis,
                        const Eigen::VectorXd& x);

// Tensor Gauss-Hermite rule mapped through the Cholesky factor; integrates
// g(x) w(x) dx exactly for polynomial g of degree < 2 * points per axis.
class TensorQuadrature {
 public:
  TensorQuadrature(const CovarianceBasis& basis, int points_per_axis);

  std::size_t size() const { return weights_.size(); }
  const Eigen::VectorXd& node(std::size_t k) const { return nodes_[k]; }
  double weight(std::size_t k) const { return weights_[k]; }
  double integrate(const std::function<double(const Eigen::VectorXd&)>& g) const;

 private:
  std::vector<Eigen::VectorXd> nodes_;
  std::vector<double> weights_;
};

// int He_alpha He_beta w dx by quadrature.
double quasi_orthogonality(const MultiIndex& alpha, const MultiIndex& beta,
                           const CovarianceBasis& basis);
// Expected value: zero unless |alpha| = |beta|, in which case the value is the
// D-fold Hermite pairing sum computed from the covariance (see tests).
double quasi_orthogonality_expected(const MultiIndex& alpha, const MultiIndex& beta,
                                    const CovarianceBasis& basis);

// int w(x - a) He_alpha(x - a) x^beta dx, equal to alpha! delta when |alpha| = |beta|.
double integral_relation(const MultiIndex& alpha, const MultiIndex& beta,
                         const CovarianceBasis& basis, const Eigen::VectorXd& shift);

struct RootPair {
  int m = 0;
  int n = 0;
  double root = 0.0;      // root of He_m
  double distance = 0.0;  // relative distance to the nearest root of He_n
};

struct CommonZeroReport {
  int n_max = 0;
  double tolerance = 0.0;
  std::vector<RootPair> violations;  // nonzero roots shared within tolerance
  std::vector<RootPair> closest;     // the nearest cross-degree pairs, ascending
};

// Scans He_1..He_{n_max} for nonzero roots shared by different degrees.
CommonZeroReport common_zero_scan(int n_max, double rel_tol = 1e-9, std::size_t keep_closest = 10);

// Numerical verification of the Hermite identities on random anisotropic
// bases: recurrences, parity, interlacing, derivative relations,
// quasi-orthogonality, the integral relation and the common-zero scan.
struct IdentityCheck {
  std::string name;
  double error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};
std::vector<IdentityCheck> hermite_identity_checks(int max_dim = 3, int max_order = 6, int conjecture_n_max = 200,
                                                   std::uint64_t seed = 1);

}  // namespace hypermoment

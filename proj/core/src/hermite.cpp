#include "hypermoment/hermite.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <random>

#include "hypermoment/errors.hpp"

namespace hypermoment {

double hermite(int n, double theta, double x) {
  if (n < 0) return 0.0;
  if (!(theta > 0.0)) throw DomainError("hermite: theta must be positive");
  double prev = 0.0;
  double cur = 1.0;
  for (int k = 0; k < n; ++k) {
    const double next = (x * cur - k * prev) / theta;
    prev = cur;
    cur = next;
  }
  return cur;
}

double hermite_monic(int n, double theta, double x) {
  if (n < 0) return 0.0;
  double prev = 0.0;
  double cur = 1.0;
  for (int k = 0; k < n; ++k) {
    const double next = x * cur - k * theta * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

namespace {

// Orthonormal recurrence h_{k+1} = (x h_k - sqrt(k) h_{k-1}) / sqrt(k+1); stays
// in floating point range for the degrees the conjecture scan needs.
void orthonormal_hermite(int n, double x, double& value, double& derivative) {
  double prev = 0.0;
  double cur = 1.0;
  for (int k = 0; k < n; ++k) {
    const double next = (x * cur - std::sqrt(static_cast<double>(k)) * prev) /
                        std::sqrt(static_cast<double>(k + 1));
    prev = cur;
    cur = next;
  }
  value = cur;
  derivative = std::sqrt(static_cast<double>(n)) * prev;
}

// Golub-Welsch on a symmetric tridiagonal Jacobi matrix.
void golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& off, Eigen::VectorXd& nodes,
                  Eigen::VectorXd& first_components) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw NumericalError("tridiagonal eigensolver failed");
  nodes = solver.eigenvalues();
  first_components = solver.eigenvectors().row(0).transpose();
}

}  // namespace

std::vector<double> hermite_roots(int n) {
  if (n < 1) return {};
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd off(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) off(k - 1) = std::sqrt(static_cast<double>(k));
  Eigen::VectorXd nodes;
  Eigen::VectorXd first;
  if (n == 1) {
    nodes = Eigen::VectorXd::Zero(1);
  } else {
    golub_welsch(diag, off, nodes, first);
  }
  std::vector<double> roots(nodes.data(), nodes.data() + n);
  std::sort(roots.begin(), roots.end());
  for (double& r : roots) {
    for (int it = 0; it < 3; ++it) {  // Newton polish
      double v = 0.0;
      double dv = 0.0;
      orthonormal_hermite(n, r, v, dv);
      if (dv == 0.0) break;
      r -= v / dv;
    }
  }
  for (int i = 0; i < n / 2; ++i) {
    const double a = 0.5 * (roots[n - 1 - i] - roots[i]);
    roots[i] = -a;
    roots[n - 1 - i] = a;
  }
  if (n % 2 == 1) roots[n / 2] = 0.0;
  return roots;
}

QuadratureRule gauss_hermite(int points) {
  if (points < 1) throw DomainError("gauss_hermite: need at least one point");
  QuadratureRule rule;
  if (points == 1) {
    rule.nodes = {0.0};
    rule.weights = {1.0};
    return rule;
  }
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(points);
  Eigen::VectorXd off(points - 1);
  for (int k = 1; k < points; ++k) off(k - 1) = std::sqrt(static_cast<double>(k));
  Eigen::VectorXd nodes;
  Eigen::VectorXd first;
  golub_welsch(diag, off, nodes, first);
  for (int k = 0; k < points; ++k) {
    rule.nodes.push_back(nodes(k));
    rule.weights.push_back(first(k) * first(k));
  }
  return rule;
}

QuadratureRule gauss_legendre(int points, double a, double b) {
  if (points < 1) throw DomainError("gauss_legendre: need at least one point");
  QuadratureRule rule;
  Eigen::VectorXd nodes = Eigen::VectorXd::Zero(1);
  Eigen::VectorXd first = Eigen::VectorXd::Ones(1);
  if (points > 1) {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(points);
    Eigen::VectorXd off(points - 1);
    for (int k = 1; k < points; ++k) off(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
    golub_welsch(diag, off, nodes, first);
  }
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  for (int k = 0; k < points; ++k) {
    rule.nodes.push_back(mid + half * nodes(k));
    rule.weights.push_back(2.0 * half * first(k) * first(k));
  }
  return rule;
}

CovarianceBasis::CovarianceBasis(const Eigen::MatrixXd& theta) : theta_(theta) {
  if (theta.rows() != theta.cols() || theta.rows() < 1) {
    throw DomainError("covariance must be a non-empty square matrix");
  }
  if ((theta - theta.transpose()).cwiseAbs().maxCoeff() > 1e-12 * theta.cwiseAbs().maxCoeff()) {
    throw DomainError("covariance must be symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(theta);
  if (llt.info() != Eigen::Success) {
    const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(theta).eigenvalues()(0);
    throw AdmissibilityError("covariance is not positive definite", min_eig);
  }
  lower_ = llt.matrixL();
  inverse_ = llt.solve(Eigen::MatrixXd::Identity(theta.rows(), theta.cols()));
  det_ = std::pow(lower_.diagonal().prod(), 2);
}

double CovarianceBasis::weight(const Eigen::VectorXd& x) const {
  const double q = x.dot(inverse_ * x);
  const double norm = std::pow(2.0 * std::numbers::pi, 0.5 * dim()) * std::sqrt(det_);
  return std::exp(-0.5 * q) / norm;
}

std::vector<double> hermite_table(const IndexSet& set, const CovarianceBasis& basis,
                                  const Eigen::VectorXd& x) {
  const int D = set.dim();
  if (basis.dim() != D || x.size() != D) throw DomainError("hermite_table: dimension mismatch");
  const Eigen::VectorXd X = basis.inverse() * x;
  const Eigen::MatrixXd& inv = basis.inverse();
  std::vector<double> he(set.size(), 0.0);
  he[0] = 1.0;
  // He_{a+e_i} = X_i He_a - sum_j inv_ij a_j He_{a-e_j}
  for (std::size_t k = 1; k < set.size(); ++k) {
    const MultiIndex& beta = set.at(k);
    int i = 0;
    while (beta[i] == 0) ++i;
    const MultiIndex a = beta.shifted(i, -1);
    double v = X(i) * he[static_cast<std::size_t>(set.slot(a))];
    for (int j = 0; j < D; ++j) {
      if (a[j] > 0) v -= inv(i, j) * a[j] * he[static_cast<std::size_t>(set.slot(a.shifted(j, -1)))];
    }
    he[k] = v;
  }
  return he;
}

double hermite_eval(const MultiIndex& alpha, const CovarianceBasis& basis, const Eigen::VectorXd& x) {
  if (alpha.is_void()) return 0.0;
  const auto set = index_set(alpha.dim(), alpha.order());
  return hermite_table(*set, basis, x)[static_cast<std::size_t>(set->slot(alpha))];
}

double hermite_function(const MultiIndex& alpha, const CovarianceBasis& basis,
                        const Eigen::VectorXd& x) {
  return basis.weight(x) * hermite_eval(alpha, basis, x);
}

TensorQuadrature::TensorQuadrature(const CovarianceBasis& basis, int points_per_axis) {
  const int D = basis.dim();
  const QuadratureRule rule = gauss_hermite(points_per_axis);
  const std::size_t n = rule.nodes.size();
  std::vector<std::size_t> digit(static_cast<std::size_t>(D), 0);
  Eigen::VectorXd z(D);
  while (true) {
    double w = 1.0;
    for (int d = 0; d < D; ++d) {
      z(d) = rule.nodes[digit[static_cast<std::size_t>(d)]];
      w *= rule.weights[digit[static_cast<std::size_t>(d)]];
    }
    nodes_.push_back(basis.cholesky() * z);
    weights_.push_back(w);
    int d = 0;
    while (d < D && ++digit[static_cast<std::size_t>(d)] == n) digit[static_cast<std::size_t>(d++)] = 0;
    if (d == D) break;
  }
}

double TensorQuadrature::integrate(const std::function<double(const Eigen::VectorXd&)>& g) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < nodes_.size(); ++k) sum += weights_[k] * g(nodes_[k]);
  return sum;
}

double quasi_orthogonality(const MultiIndex& alpha, const MultiIndex& beta,
                           const CovarianceBasis& basis) {
  const int order = std::max(alpha.order(), beta.order());
  const auto set = index_set(basis.dim(), order);
  const TensorQuadrature quad(basis, order + 4);
  const auto a = static_cast<std::size_t>(set->slot(alpha));
  const auto b = static_cast<std::size_t>(set->slot(beta));
  return quad.integrate([&](const Eigen::VectorXd& x) {
    const auto he = hermite_table(*set, basis, x);
    return he[a] * he[b];
  });
}

double quasi_orthogonality_expected(const MultiIndex& alpha, const MultiIndex& beta,
                                    const CovarianceBasis& basis) {
  if (alpha.order() != beta.order()) return 0.0;
  // He_beta = (inv x)^beta + lower order, and He_alpha integrates monomials of
  // its own degree to alpha! delta. Expand (inv x)^beta and read off x^alpha.
  const int D = basis.dim();
  std::map<std::vector<int>, double> poly{{std::vector<int>(static_cast<std::size_t>(D), 0), 1.0}};
  for (int i = 0; i < D; ++i) {
    for (int rep = 0; rep < beta[i]; ++rep) {
      std::map<std::vector<int>, double> next;
      for (const auto& [mono, c] : poly) {
        for (int j = 0; j < D; ++j) {
          auto m = mono;
          m[static_cast<std::size_t>(j)] += 1;
          next[m] += c * basis.inverse()(i, j);
        }
      }
      poly = std::move(next);
    }
  }
  std::vector<int> key(static_cast<std::size_t>(D));
  for (int i = 0; i < D; ++i) key[static_cast<std::size_t>(i)] = alpha[i];
  auto it = poly.find(key);
  return it == poly.end() ? 0.0 : it->second * alpha.factorial();
}

double integral_relation(const MultiIndex& alpha, const MultiIndex& beta,
                         const CovarianceBasis& basis, const Eigen::VectorXd& shift) {
  const int order = std::max(alpha.order(), beta.order());
  const auto set = index_set(basis.dim(), alpha.order());
  const TensorQuadrature quad(basis, order + 4);
  const auto a = static_cast<std::size_t>(set->slot(alpha));
  // substitute y = x - shift
  return quad.integrate([&](const Eigen::VectorXd& y) {
    double mono = 1.0;
    for (int d = 0; d < basis.dim(); ++d) mono *= std::pow(y(d) + shift(d), beta[d]);
    return hermite_table(*set, basis, y)[a] * mono;
  });
}

CommonZeroReport common_zero_scan(int n_max, double rel_tol, std::size_t keep_closest) {
  CommonZeroReport report;
  report.n_max = n_max;
  report.tolerance = rel_tol;
  struct Entry {
    double root;
    int degree;
  };
  std::vector<Entry> all;
  for (int n = 2; n <= n_max; ++n) {
    for (double r : hermite_roots(n)) {
      if (r > 0.0) all.push_back({r, n});
    }
  }
  std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) { return a.root < b.root; });
  // The globally closest cross-degree pair is always adjacent after sorting.
  std::vector<RootPair> pairs;
  for (std::size_t k = 0; k + 1 < all.size(); ++k) {
    const Entry& a = all[k];
    const Entry& b = all[k + 1];
    if (a.degree == b.degree) continue;
    RootPair p;
    p.m = std::min(a.degree, b.degree);
    p.n = std::max(a.degree, b.degree);
    p.root = a.degree == p.m ? a.root : b.root;
    p.distance = (b.root - a.root) / b.root;
    if (p.distance <= rel_tol) report.violations.push_back(p);
    pairs.push_back(p);
  }
  const std::size_t keep = std::min(keep_closest, pairs.size());
  std::partial_sort(pairs.begin(), pairs.begin() + static_cast<long>(keep), pairs.end(),
                    [](const RootPair& a, const RootPair& b) { return a.distance < b.distance; });
  report.closest.assign(pairs.begin(), pairs.begin() + static_cast<long>(keep));
  return report;
}

namespace {

Eigen::MatrixXd random_covariance(int D, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Eigen::MatrixXd g(D, D);
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) g(i, j) = uni(rng);
  return g * g.transpose() / D + 0.5 * Eigen::MatrixXd::Identity(D, D);
}

std::string scientific(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(3) << v;
  return os.str();
}

IdentityCheck make_check(std::string name, double error, double tol, std::string detail = {}) {
  return {std::move(name), error, tol, error <= tol, std::move(detail)};
}

}  // namespace

std::vector<IdentityCheck> hermite_identity_checks(int max_dim, int max_order, int conjecture_n_max,
                                                   std::uint64_t seed) {
  if (max_dim < 1 || max_dim > 6 || max_order < 1) throw DomainError("identity checks need 1 <= D <= 6 and order >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<IdentityCheck> out;

  // One-dimensional recurrence and parity, n <= 30, x in [-10, 10].
  double rec = 0.0, par = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const double x = 10.0 * uni(rng), th = 1.25 + 0.75 * uni(rng);
    for (int n = 1; n < 30; ++n) {
      const double next = hermite(n + 1, th, x), a = x * hermite(n, th, x) / th, b = n * hermite(n - 1, th, x) / th;
      rec = std::max(rec, std::abs(next - (a - b)) / std::max({std::abs(next), std::abs(a), std::abs(b), 1e-300}));
      const double h = hermite(n, th, x);
      par = std::max(par, std::abs(hermite(n, th, -x) - (n % 2 ? -h : h)) / std::max(1.0, std::abs(h)));
    }
  }
  out.push_back(make_check("recurrence_1d", rec, 1e-10, "n <= 30, x in [-10, 10]"));
  out.push_back(make_check("parity_1d", par, 1e-12));

  int interlace_failures = 0;
  for (int n = 1; n < 60; ++n) {
    const auto lo = hermite_roots(n), hi = hermite_roots(n + 1);
    for (std::size_t k = 0; k < lo.size(); ++k) {
      if (!(hi[k] < lo[k] && lo[k] < hi[k + 1])) ++interlace_failures;
    }
  }
  out.push_back(make_check("interlacing", interlace_failures, 0.0, "He_n and He_{n+1}, n < 60"));

  double three_term = 0.0, order_gap = 0.0, fun_deriv = 0.0, quasi = 0.0, integral = 0.0;
  for (int D = 1; D <= max_dim; ++D) {
    const CovarianceBasis basis(random_covariance(D, rng));
    const auto set = index_set(D, max_order + 1);
    const auto inner = index_set(D, max_order);
    Eigen::VectorXd x(D), shift(D);
    for (int d = 0; d < D; ++d) {
      x(d) = 0.8 * uni(rng);
      shift(d) = 0.5 * uni(rng);
    }
    const auto he = hermite_table(*set, basis, x);
    for (std::size_t s = 0; s < inner->size(); ++s) {
      const MultiIndex& a = inner->at(s);
      for (int d = 0; d < D; ++d) {
        double rhs = 0.0, scale = std::abs(x(d) * he[s]);
        for (int j = 0; j < D; ++j) {
          const double t = basis.theta()(d, j) * he[static_cast<std::size_t>(set->slot(a.shifted(j)))];
          rhs += t;
          scale = std::max(scale, std::abs(t));
        }
        const long lower = set->slot(a.shifted(d, -1));
        if (lower >= 0) rhs += a[d] * he[static_cast<std::size_t>(lower)];
        three_term = std::max(three_term, std::abs(x(d) * he[s] - rhs) / std::max(1.0, scale));

        // derivative: second-order convergence of central differences
        double analytic = 0.0;
        for (int j = 0; j < D; ++j) {
          const long lj = set->slot(a.shifted(j, -1));
          if (lj >= 0) analytic += basis.inverse()(d, j) * a[j] * he[static_cast<std::size_t>(lj)];
        }
        double err[2];
        int k = 0;
        for (double h : {2e-2, 1e-2}) {
          Eigen::VectorXd xp = x, xm = x;
          xp(d) += h;
          xm(d) -= h;
          const double fd = (hermite_table(*inner, basis, xp)[s] - hermite_table(*inner, basis, xm)[s]) / (2.0 * h);
          err[k++] = std::abs(fd - analytic);
        }
        if (err[0] > 1e-8) order_gap = std::max(order_gap, std::abs(std::log2(err[0] / err[1]) - 2.0));

        const double h = 1e-5;
        Eigen::VectorXd xp = x, xm = x;
        xp(d) += h;
        xm(d) -= h;
        const double fd = (hermite_function(a, basis, xp) - hermite_function(a, basis, xm)) / (2.0 * h);
        const double want = -hermite_function(a.shifted(d), basis, x);
        fun_deriv = std::max(fun_deriv, std::abs(fd - want) / std::max(1.0, std::abs(want)));
      }
    }

    // Gram matrices by one tensor quadrature per basis.
    const TensorQuadrature quad(basis, max_order + 4);
    const long n = static_cast<long>(inner->size());
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n), mixed = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t q = 0; q < quad.size(); ++q) {
      const Eigen::VectorXd& y = quad.node(q);
      const auto t = hermite_table(*inner, basis, y);
      Eigen::VectorXd hv(n), mono(n);
      for (long r = 0; r < n; ++r) {
        hv(r) = t[static_cast<std::size_t>(r)];
        const MultiIndex& b = inner->at(static_cast<std::size_t>(r));
        double m = 1.0;
        for (int d = 0; d < D; ++d) m *= std::pow(y(d) + shift(d), b[d]);
        mono(r) = m;
      }
      gram += quad.weight(q) * hv * hv.transpose();
      mixed += quad.weight(q) * hv * mono.transpose();
    }
    for (long r = 0; r < n; ++r) {
      const MultiIndex& a = inner->at(static_cast<std::size_t>(r));
      for (long c = 0; c < n; ++c) {
        const MultiIndex& b = inner->at(static_cast<std::size_t>(c));
        const double want = quasi_orthogonality_expected(a, b, basis);
        quasi = std::max(quasi, std::abs(gram(r, c) - want) / std::max(1.0, std::abs(want)));
        if (a.order() == b.order()) {
          const double rel = (a == b) ? a.factorial() : 0.0;
          integral = std::max(integral, std::abs(mixed(r, c) - rel) / a.factorial());
        }
      }
    }
  }
  const std::string scope = "D <= " + std::to_string(max_dim) + ", |alpha| <= " + std::to_string(max_order);
  out.push_back(make_check("three_term_relation", three_term, 1e-10, scope));
  out.push_back(make_check("derivative_relation_order", order_gap, 0.1, scope + ", central differences O(h^2)"));
  out.push_back(make_check("hermite_function_derivative", fun_deriv, 1e-6, scope));
  out.push_back(make_check("quasi_orthogonality", quasi, 1e-9, scope));
  out.push_back(make_check("integral_relation", integral, 1e-9, scope));

  if (conjecture_n_max >= 2) {
    const CommonZeroReport rep = common_zero_scan(conjecture_n_max, 1e-9, 1);
    std::string detail = "n <= " + std::to_string(conjecture_n_max);
    if (!rep.closest.empty()) {
      detail += ", closest pair (" + std::to_string(rep.closest.front().m) + "," + std::to_string(rep.closest.front().n) +
                ") at relative distance " + scientific(rep.closest.front().distance);
    }
    out.push_back(make_check("common_zero_scan", static_cast<double>(rep.violations.size()), 0.0, detail));
  }
  return out;
}

}  // namespace hypermoment

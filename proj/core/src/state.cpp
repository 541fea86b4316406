#include "hypermoment/state.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "hypermoment/errors.hpp"

namespace hypermoment {

double CollisionModel::mixing() const {
  return kind == CollisionKind::BGK ? 0.0 : 1.0 - 1.0 / prandtl;
}

void CollisionModel::validate() const {
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw DomainError("collision frequency must be >= 0");
  if (kind == CollisionKind::ESBGK) {
    if (!(prandtl > 0.0)) throw DomainError("Prandtl number must be positive");
    const double b = mixing();
    if (b < -0.5 || b > 1.0) {
      throw DomainError("ES-BGK needs 1 - 1/Pr in [-1/2, 1], got " + std::to_string(b));
    }
  }
}

MomentState::MomentState(int dim, int max_order) {
  if (dim < 1 || dim > kMaxDim) throw DomainError("state dimension must be in [1, 6]");
  if (max_order < 2) throw DomainError("moment order M must be >= 2");
  set_ = index_set(dim, max_order);
  w_ = Eigen::VectorXd::Zero(static_cast<long>(set_->size()));
}

MomentState::MomentState(std::shared_ptr<const IndexSet> set, Eigen::VectorXd w)
    : set_(std::move(set)), w_(std::move(w)) {
  if (!set_) throw DomainError("null index set");
  if (set_->max_order() < 2) throw DomainError("moment order M must be >= 2");
  if (static_cast<std::size_t>(w_.size()) != set_->size()) {
    throw DomainError("moment vector has length " + std::to_string(w_.size()) + ", expected " +
                      std::to_string(set_->size()));
  }
}

Eigen::VectorXd MomentState::velocity() const { return w_.segment(1, dim()); }

std::size_t MomentState::slot_of_p(int i, int j) const {
  MultiIndex a = MultiIndex::unit(dim(), i);
  a[j] += 1;
  return static_cast<std::size_t>(set_->slot(a));
}

std::size_t MomentState::slot_of(const MultiIndex& alpha) const {
  const long s = set_->slot(alpha);
  if (s < 0) throw DomainError("index " + alpha.to_string() + " is not a slot of this state");
  return static_cast<std::size_t>(s);
}

double MomentState::p(int i, int j) const {
  return (i == j ? 2.0 : 1.0) * w_(static_cast<long>(slot_of_p(i, j)));
}

void MomentState::set_p(int i, int j, double v) {
  w_(static_cast<long>(slot_of_p(i, j))) = v / (i == j ? 2.0 : 1.0);
}

Eigen::MatrixXd MomentState::pressure() const {
  const int D = dim();
  Eigen::MatrixXd P(D, D);
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) P(i, j) = p(i, j);
  return P;
}

double MomentState::scalar_temperature() const { return pressure().trace() / (dim() * rho()); }

double MomentState::f(const MultiIndex& alpha) const {
  if (alpha.is_void()) return 0.0;
  const int n = alpha.order();
  if (n == 0) return rho();
  if (n <= 2 || n > max_order()) return 0.0;
  return w_(set_->slot(alpha));
}

void MomentState::set_f(const MultiIndex& alpha, double v) {
  const int n = alpha.order();
  if (alpha.is_void() || n < 3 || n > max_order()) {
    throw DomainError("f_" + alpha.to_string() + " is not a free coefficient");
  }
  w_(set_->slot(alpha)) = v;
}

MomentState gaussian_state(int dim, int max_order, double rho, const Eigen::VectorXd& u,
                           const Eigen::MatrixXd& theta) {
  if (u.size() != dim || theta.rows() != dim || theta.cols() != dim) {
    throw DomainError("gaussian_state: dimension mismatch");
  }
  MomentState s(dim, max_order);
  s.set_rho(rho);
  for (int i = 0; i < dim; ++i) s.set_u(i, u(i));
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) s.set_p(i, j, rho * theta(i, j));
  return s;
}

MomentState equilibrium(int dim, int max_order, double rho, const Eigen::VectorXd& u, double theta) {
  return gaussian_state(dim, max_order, rho, u, theta * Eigen::MatrixXd::Identity(dim, dim));
}

Eigen::VectorXd heat_flux(const MomentState& state) {
  if (state.max_order() < 3) throw DomainError("heat flux needs M >= 3");
  const int D = state.dim();
  Eigen::VectorXd q(D);
  for (int i = 0; i < D; ++i) {
    MultiIndex a(D);
    a[i] = 3;
    double v = 2.0 * state.f(a);
    for (int d = 0; d < D; ++d) {
      MultiIndex b = MultiIndex::unit(D, i);
      b[d] += 2;
      v += state.f(b);
    }
    q(i) = v;
  }
  return q;
}

Eigen::VectorXd raw_moments(const IndexSet& coeff_set, const Eigen::VectorXd& coeffs,
                            const Eigen::VectorXd& u, const Eigen::MatrixXd& theta, int order) {
  const int D = coeff_set.dim();
  const auto set = index_set(D, order);
  const std::size_t N = set->size();
  // Multiplying sum_b c_b H_b(xi - u) by xi_i maps the coefficients through
  //   (S_i c)_g = u_i c_g + sum_j theta_ji c_{g-e_j} + (g_i + 1) c_{g+e_i},
  // and only H_0 has a nonzero integral, so F_a = [S^a c]_0 / a!.
  // v[a] = S^a c is only needed up to order (order - |a|).
  std::vector<Eigen::VectorXd> v(N);
  v[0] = Eigen::VectorXd::Zero(static_cast<long>(N));
  const std::size_t copy = std::min(N, coeff_set.size());
  v[0].head(static_cast<long>(copy)) = coeffs.head(static_cast<long>(copy));
  Eigen::VectorXd out(static_cast<long>(N));
  out(0) = v[0](0);
  for (std::size_t s = 1; s < N; ++s) {
    const MultiIndex& a = set->at(s);
    int i = 0;
    while (a[i] == 0) ++i;
    const Eigen::VectorXd& parent = v[static_cast<std::size_t>(set->slot(a.shifted(i, -1)))];
    const std::size_t len = static_cast<std::size_t>(cardinality(D, order - a.order()));
    Eigen::VectorXd child(static_cast<long>(len));
    for (std::size_t g = 0; g < len; ++g) {
      const MultiIndex& gamma = set->at(g);
      double val = u(i) * parent(static_cast<long>(g));
      for (int j = 0; j < D; ++j) {
        if (gamma[j] > 0) val += theta(j, i) * parent(set->slot(gamma.shifted(j, -1)));
      }
      val += (gamma[i] + 1) * parent(set->slot(gamma.shifted(i, 1)));
      child(static_cast<long>(g)) = val;
    }
    out(static_cast<long>(s)) = child(0) / a.factorial();
    v[s] = std::move(child);
  }
  return out;
}

Eigen::VectorXd expansion_coefficients(const IndexSet& moment_set, const Eigen::VectorXd& moments,
                                       const Eigen::VectorXd& u, const Eigen::MatrixXd& theta) {
  // F = L c with L unit lower triangular by order: the coefficient of order n
  // is F_n minus what the lower orders already contribute.
  const int K = moment_set.max_order();
  const std::size_t N = moment_set.size();
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<long>(N));
  for (int n = 0; n <= K; ++n) {
    const std::size_t begin = moment_set.order_begin(n);
    const std::size_t end = moment_set.order_begin(n + 1);
    Eigen::VectorXd partial = n == 0 ? Eigen::VectorXd::Zero(static_cast<long>(end))
                                     : raw_moments(moment_set, c, u, theta, n);
    for (std::size_t s = begin; s < end; ++s) {
      c(static_cast<long>(s)) = moments(static_cast<long>(s)) - partial(static_cast<long>(s));
    }
  }
  return c;
}

Eigen::VectorXd to_conserved(const MomentState& state, int order) {
  if (order < 0) order = state.max_order();
  validate(state);
  Eigen::VectorXd c = state.w();
  c(0) = state.rho();
  const std::size_t third = state.indices().order_begin(3);
  c.segment(1, static_cast<long>(third) - 1).setZero();
  return raw_moments(state.indices(), c, state.velocity(), state.theta_matrix(), order);
}

MomentState from_conserved(const Eigen::VectorXd& F, int dim, int max_order) {
  MomentState s(dim, max_order);
  if (static_cast<std::size_t>(F.size()) != s.size()) {
    throw DomainError("conserved vector has length " + std::to_string(F.size()) + ", expected " +
                      std::to_string(s.size()));
  }
  const double rho = F(0);
  if (!(rho > 0.0)) throw AdmissibilityError("non-positive density", rho);
  s.set_rho(rho);
  for (int i = 0; i < dim; ++i) s.set_u(i, F(1 + i) / rho);
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) {
      MultiIndex a = MultiIndex::unit(dim, i);
      a[j] += 1;
      const double Fij = F(s.indices().slot(a));
      s.set_p(i, j, (i == j ? 2.0 : 1.0) * Fij - F(1 + i) * F(1 + j) / rho);
    }
  }
  validate(s);
  if (max_order >= 3) {
    const Eigen::VectorXd c = expansion_coefficients(s.indices(), F, s.velocity(), s.theta_matrix());
    const std::size_t third = s.indices().order_begin(3);
    s.w().tail(static_cast<long>(s.size() - third)) = c.tail(static_cast<long>(s.size() - third));
  }
  return s;
}

Eigen::VectorXd collision_coefficients(const MomentState& state, const CollisionModel& model) {
  model.validate();
  validate(state);
  const int D = state.dim();
  const double b = model.mixing();
  const Eigen::MatrixXd theta = state.theta_matrix();
  const Eigen::MatrixXd target =
      b * theta + (1.0 - b) * state.scalar_temperature() * Eigen::MatrixXd::Identity(D, D);
  const auto single = index_set(D, 0);
  Eigen::VectorXd c0(1);
  c0(0) = state.rho();
  const Eigen::VectorXd F = raw_moments(*single, c0, state.velocity(), target, state.max_order());
  Eigen::VectorXd g = expansion_coefficients(state.indices(), F, state.velocity(), theta);
  g(0) = state.rho();
  g.segment(1, D).setZero();
  return g;
}

bool is_admissible(const MomentState& state, double rel_tol) {
  if (!(state.rho() > 0.0) || !state.w().allFinite()) return false;
  const Eigen::MatrixXd P = state.pressure();
  const double scale = std::max(P.trace(), 0.0);
  if (!(scale > 0.0)) return false;
  const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(P).eigenvalues()(0);
  return min_eig > rel_tol * scale;
}

void validate(const MomentState& state) {
  if (!state.w().allFinite()) throw AdmissibilityError("state has non-finite entries", NAN);
  if (!(state.rho() > 0.0)) throw AdmissibilityError("non-positive density", state.rho());
  if (!is_admissible(state)) {
    const double min_eig =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(state.theta_matrix()).eigenvalues()(0);
    throw AdmissibilityError(
        "temperature tensor is not positive definite (min eigenvalue " + std::to_string(min_eig) + ")",
        min_eig);
  }
}

}  // namespace hypermoment

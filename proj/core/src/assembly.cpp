#include "hypermoment/assembly.hpp"

#include <cmath>

#include "hypermoment/errors.hpp"
#include "hypermoment/hermite.hpp"

namespace hypermoment {

namespace {

double delta(int i, int j) { return i == j ? 1.0 : 0.0; }

MultiIndex pair_index(int D, int i, int j) {
  MultiIndex a = MultiIndex::unit(D, i);
  a[j] += 1;
  return a;
}

void check_direction(const MomentState& s, int d) {
  if (d < 0 || d >= s.dim()) {
    throw DomainError("direction " + std::to_string(d + 1) + " outside 1.." + std::to_string(s.dim()));
  }
}

// Adds `v` at (row, slot of beta) when beta is a slot; terms whose index is
// void or above M are dropped (Grad closure).
struct Writer {
  Eigen::MatrixXd& a;
  const IndexSet& set;
  void add(long row, const MultiIndex& beta, double v) {
    const long col = set.slot(beta);
    if (col >= 0 && v != 0.0) a(row, col) += v;
  }
};

}  // namespace

CoefficientMatrix assemble(const MomentState& s, int d) {
  check_direction(s, d);
  validate(s);
  const int D = s.dim();
  const int M = s.max_order();
  const IndexSet& set = s.indices();
  const double rho = s.rho();
  const Eigen::MatrixXd P = s.pressure();
  const Eigen::MatrixXd T = P / rho;
  CoefficientMatrix out;
  out.direction = d;
  out.a = Eigen::MatrixXd::Zero(static_cast<long>(s.size()), static_cast<long>(s.size()));
  Writer W{out.a, set};
  const MultiIndex ed = MultiIndex::unit(D, d);

  // mass
  W.add(0, ed, rho);
  // momentum: du_i + (1/rho) dp_id
  for (int i = 0; i < D; ++i) W.add(1 + i, pair_index(D, i, d), (1.0 + delta(i, d)) / rho);
  // pressure rows, stored as p_ij / (1 + delta_ij)
  for (int i = 0; i < D; ++i) {
    for (int j = i; j < D; ++j) {
      const long row = set.slot(pair_index(D, i, j));
      const double scale = 1.0 / (1.0 + delta(i, j));
      W.add(row, ed, P(i, j) * scale);
      W.add(row, MultiIndex::unit(D, j), P(i, d) * scale);
      W.add(row, MultiIndex::unit(D, i), P(j, d) * scale);
      MultiIndex third = pair_index(D, i, j).shifted(d);
      W.add(row, third, third.factorial() * scale);
    }
  }
  // expansion coefficients 3 <= |alpha| <= M
  for (std::size_t r = set.order_begin(3); r < set.size(); ++r) {
    const MultiIndex& alpha = set.at(r);
    const long row = static_cast<long>(r);
    const int ad1 = alpha[d] + 1;
    for (int k = 0; k < D; ++k) {
      const MultiIndex lower = alpha.shifted(k, -1);
      if (!lower.is_void() && lower.order() >= 3) W.add(row, lower, T(d, k));
    }
    if (alpha.order() < M) W.add(row, alpha.shifted(d), ad1);
    for (int i = 0; i < D; ++i) {
      for (int j = 0; j < D; ++j) {
        const MultiIndex aij = alpha.shifted(i, -1).shifted(j, -1);
        double C = ad1 * s.f(aij.shifted(d));
        for (int k = 0; k < D; ++k) C += T(k, d) * s.f(aij.shifted(k, -1));
        const double c = C / (2.0 * rho);
        W.add(row, pair_index(D, i, j), c * (1.0 + delta(i, j)));
        out.a(row, 0) -= c * T(i, j);
        // nonconservative coupling to the heat-flux-like third moments
        const MultiIndex third = pair_index(D, i, j).shifted(d);
        W.add(row, third, -0.5 * third.factorial() * s.f(aij) / rho);
      }
      W.add(row, MultiIndex::unit(D, i), ad1 * s.f(alpha.shifted(i, -1).shifted(d)));
      W.add(row, pair_index(D, i, d), -(1.0 + delta(i, d)) * s.f(alpha.shifted(i, -1)) / rho);
    }
  }
  return out;
}

CoefficientMatrix regularize(const CoefficientMatrix& m, const MomentState& s) {
  if (m.regularized) return m;
  if (m.direction < 0) throw DomainError("regularize needs a single-direction matrix");
  const int d = m.direction;
  const int D = s.dim();
  const int M = s.max_order();
  const IndexSet& set = s.indices();
  const double rho = s.rho();
  const Eigen::MatrixXd T = s.theta_matrix();
  CoefficientMatrix out = m;
  out.regularized = true;
  Writer W{out.a, set};
  // Remove, in the top-order rows, every term that the closure f_{alpha+e_d} = 0
  // hides inside the derivative of the order M+1 coefficient.
  for (std::size_t r = set.order_begin(M); r < set.size(); ++r) {
    const MultiIndex& alpha = set.at(r);
    const long row = static_cast<long>(r);
    const MultiIndex up = alpha.shifted(d);
    const int ad1 = alpha[d] + 1;
    for (int i = 0; i < D; ++i) {
      W.add(row, MultiIndex::unit(D, i), -ad1 * s.f(up.shifted(i, -1)));
      for (int j = 0; j < D; ++j) {
        const double c = ad1 * s.f(up.shifted(i, -1).shifted(j, -1)) / (2.0 * rho);
        out.a(row, 0) += c * T(i, j);
        W.add(row, pair_index(D, i, j), -c * (1.0 + delta(i, j)));
      }
    }
  }
  return out;
}

CoefficientMatrix assemble_regularized(const MomentState& state, int direction) {
  return regularize(assemble(state, direction), state);
}

CoefficientMatrix directional(const MomentState& state, const Eigen::VectorXd& n, bool regularized) {
  if (n.size() != state.dim()) throw DomainError("direction vector has wrong dimension");
  const double norm = n.norm();
  if (!(std::abs(norm - 1.0) <= 1e-10)) throw DomainError("direction vector must have unit length");
  CoefficientMatrix out;
  out.direction = -1;
  out.regularized = regularized;
  out.a = Eigen::MatrixXd::Zero(static_cast<long>(state.size()), static_cast<long>(state.size()));
  for (int d = 0; d < state.dim(); ++d) {
    if (n(d) == 0.0) continue;
    const auto m = regularized ? assemble_regularized(state, d) : assemble(state, d);
    out.a += n(d) * m.a;
  }
  return out;
}

Eigen::VectorXd source(const MomentState& s, const CollisionModel& model) {
  const Eigen::VectorXd G = collision_coefficients(s, model);
  const int D = s.dim();
  const IndexSet& set = s.indices();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<long>(s.size()));
  if (model.nu == 0.0) return out;
  const double nu = model.nu;
  for (std::size_t r = set.order_begin(2); r < set.order_begin(3); ++r) out(static_cast<long>(r)) = nu * G(static_cast<long>(r));
  // The moving basis turns the relaxation of the temperature tensor into an
  // extra term for the higher coefficients.
  for (std::size_t r = set.order_begin(3); r < set.size(); ++r) {
    const MultiIndex& alpha = set.at(r);
    double v = G(static_cast<long>(r)) - s.f(alpha);
    for (int i = 0; i < D; ++i) {
      for (int j = i; j < D; ++j) {
        v -= G(set.slot(pair_index(D, i, j))) * s.f(alpha.shifted(i, -1).shifted(j, -1)) / s.rho();
      }
    }
    out(static_cast<long>(r)) = nu * v;
  }
  return out;
}

Eigen::MatrixXd to_block_order(const Eigen::MatrixXd& a, int dim, int max_order) {
  const BlockPermutation perm(dim, max_order);
  const long n = a.rows();
  Eigen::MatrixXd out(n, n);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j)
      out(i, j) = a(static_cast<long>(perm.natural(static_cast<std::size_t>(i))),
                    static_cast<long>(perm.natural(static_cast<std::size_t>(j))));
  return out;
}

StructuralReport structural_report(const CoefficientMatrix& m, const MomentState& state,
                                   double zero_tol) {
  StructuralReport rep;
  const long n = m.a.rows();
  rep.max_abs_diagonal = m.a.diagonal().cwiseAbs().maxCoeff();
  for (long i = 0; i < n; ++i) {
    int count = 0;
    for (long j = i + 1; j < n; ++j) count += std::abs(m.a(i, j)) > zero_tol;
    rep.max_upper_per_row = std::max(rep.max_upper_per_row, count);
  }
  if (m.direction >= 0) {
    MomentState shifted = state;
    for (int i = 0; i < state.dim(); ++i) shifted.set_u(i, state.u(i) + 1.75 + 0.5 * i);
    auto other = assemble(shifted, m.direction);
    if (m.regularized) other = regularize(other, shifted);
    rep.velocity_sensitivity = (other.a - m.a).cwiseAbs().maxCoeff();
  }
  if (m.direction == 0) {
    const BlockPermutation perm(state.dim(), state.max_order());
    const Eigen::MatrixXd b = to_block_order(m.a, state.dim(), state.max_order());
    for (long i = 0; i < n; ++i) {
      const auto bi = perm.block_of_position(static_cast<std::size_t>(i));
      for (long j = 0; j < n; ++j) {
        if (perm.block_of_position(static_cast<std::size_t>(j)) > bi) {
          rep.max_above_blocks = std::max(rep.max_above_blocks, std::abs(b(i, j)));
        }
      }
    }
    rep.block_lower_triangular = rep.max_above_blocks <= zero_tol;
  }
  return rep;
}

Eigen::VectorXd conservative_flux(const MomentState& state) {
  const int D = state.dim();
  const int M = state.max_order();
  const Eigen::VectorXd Fx = to_conserved(state, M + 1);
  const auto ext = index_set(D, M + 1);
  const IndexSet& set = state.indices();
  Eigen::VectorXd flux(static_cast<long>(set.size()));
  for (std::size_t r = 0; r < set.size(); ++r) {
    const MultiIndex& alpha = set.at(r);
    flux(static_cast<long>(r)) = (alpha[0] + 1) * Fx(ext->slot(alpha.shifted(0)));
  }
  return flux;
}

Eigen::VectorXd path_fluctuation(const Eigen::VectorXd& FL, const Eigen::VectorXd& FR, int dim,
                                 int max_order, int points) {
  const auto set = index_set(dim, max_order);
  const int D = dim;
  const int M = max_order;
  const Eigen::VectorXd dF = FR - FL;
  const MomentState left = from_conserved(FL, D, M);
  const MomentState right = from_conserved(FR, D, M);
  const Eigen::VectorXd flux_jump = conservative_flux(right) - conservative_flux(left);
  Eigen::VectorXd out = flux_jump;
  const std::size_t top = set->order_begin(M);
  if (top >= set->size()) return out;

  // Nonconservative products of the top rows, integrated along the path.
  const QuadratureRule rule = gauss_legendre(points, 0.0, 1.0);
  Eigen::VectorXd integral = Eigen::VectorXd::Zero(static_cast<long>(set->size() - top));
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const Eigen::VectorXd Phi = FL + rule.nodes[q] * dF;
    const MomentState s = from_conserved(Phi, D, M);
    const double rho = s.rho();
    const double drho = dF(0);
    Eigen::VectorXd du(D);
    for (int i = 0; i < D; ++i) du(i) = (dF(1 + i) - s.u(i) * drho) / rho;
    Eigen::MatrixXd dp(D, D);
    for (int i = 0; i < D; ++i) {
      for (int j = 0; j < D; ++j) {
        const double Fij = dF(set->slot(pair_index(D, i, j)));
        dp(i, j) = (1.0 + delta(i, j)) * Fij - (dF(1 + i) * Phi(1 + j) + Phi(1 + i) * dF(1 + j)) / rho +
                   Phi(1 + i) * Phi(1 + j) * drho / (rho * rho);
      }
    }
    const Eigen::MatrixXd T = s.theta_matrix();
    for (std::size_t r = top; r < set->size(); ++r) {
      const MultiIndex up = set->at(r).shifted(0);
      double v = 0.0;
      for (int i = 0; i < D; ++i) {
        v += s.f(up.shifted(i, -1)) * du(i);
        for (int j = 0; j < D; ++j) {
          v += s.f(up.shifted(i, -1).shifted(j, -1)) / (2.0 * rho) * (dp(i, j) - T(i, j) * drho);
        }
      }
      integral(static_cast<long>(r - top)) += rule.weights[q] * v;
    }
  }
  for (std::size_t r = top; r < set->size(); ++r) {
    out(static_cast<long>(r)) -= (set->at(r)[0] + 1) * integral(static_cast<long>(r - top));
  }
  return out;
}

}  // namespace hypermoment

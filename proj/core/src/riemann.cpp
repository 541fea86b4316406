#include "hypermoment/riemann.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <vector>

#include "hypermoment/assembly.hpp"
#include "hypermoment/errors.hpp"
#include "hypermoment/hermite.hpp"
#include "hypermoment/spectral.hpp"

namespace hypermoment {

namespace {

long p11_slot(const MomentState& s) { return static_cast<long>(s.slot_of_p(0, 0)); }

// (exp(y) - 1) / y, continuous at y = 0.
double expm1_ratio(double y) { return y == 0.0 ? 1.0 : std::expm1(y) / y; }

int sign_with_tol(double v, double tol) { return v > tol ? 1 : (v < -tol ? -1 : 0); }

MultiIndex first_head_of_order(const IndexSet& set, int order) {
  for (std::size_t r = set.order_begin(order); r < set.size(); ++r) {
    const MultiIndex& a = set.at(r);
    if (a.order() == order && a[0] == 0) return a;
  }
  throw DomainError("no block of order " + std::to_string(order));
}

}  // namespace

std::string to_string(FieldNature n) {
  return n == FieldNature::GenuinelyNonlinear ? "genuinely_nonlinear" : "linearly_degenerate";
}

std::string to_string(WaveKind k) {
  switch (k) {
    case WaveKind::Rarefaction: return "rarefaction";
    case WaveKind::Shock: return "shock";
    default: return "contact";
  }
}

CharField classify_field(const MomentState& state, double c, double tol) {
  validate(state);
  const int D = state.dim();
  const int M = state.max_order();
  // Families available in x1: He_{M+1} from the tail-zero block, and He_m for
  // m <= M from blocks with nonzero tail when D >= 2.
  const int lowest = D == 1 ? M + 1 : 1;
  for (int m = M + 1; m >= lowest; --m) {
    const std::vector<double> roots = hermite_roots(m);
    for (std::size_t k = 0; k < roots.size(); ++k) {
      if (std::abs(roots[k] - c) > tol * std::max(1.0, std::abs(c))) continue;
      CharField f;
      f.c = roots[k];
      f.family_m = m;
      f.root_index = static_cast<int>(k) + 1;
      f.block_head = first_head_of_order(state.indices(), M + 1 - m);
      f.nature = (m == M + 1 && f.c != 0.0) ? FieldNature::GenuinelyNonlinear : FieldNature::LinearlyDegenerate;
      return f;
    }
  }
  throw DomainError("c = " + std::to_string(c) + " is not a characteristic speed of this system");
}

CharField top_family_field(const MomentState& state, int root_index) {
  const int M = state.max_order();
  if (root_index < 1 || root_index > M + 1) throw DomainError("root index outside 1..M+1");
  return classify_field(state, hermite_roots(M + 1)[static_cast<std::size_t>(root_index - 1)]);
}

double field_eigenvalue(const MomentState& state, const CharField& field) {
  return state.u(0) + field.c * std::sqrt(state.theta(0, 0));
}

Eigen::VectorXd field_eigenvector(const MomentState& state, const CharField& field) {
  const double lambda = field.c * std::sqrt(state.theta(0, 0));
  const Eigen::VectorXd bv = block_eigenvector(field.block_head.order(), lambda, state);
  Eigen::VectorXd v = prolong(bv, field.block_head, lambda, state).vector;
  if (v(0) != 0.0) v *= state.rho() / v(0);
  return v;
}

NonlinearityCheck nonlinearity_check(const MomentState& state, const CharField& field) {
  const Eigen::VectorXd R = field_eigenvector(state, field);
  const long ps = p11_slot(state);
  auto lambda_of = [&](double rho, double u1, double half_p11) {
    return u1 + field.c * std::sqrt(2.0 * half_p11 / rho);
  };
  const double rho = state.rho(), u1 = state.u(0), hp = state.w()(ps);
  const double hr = 1e-6 * rho, hu = 1e-6 * std::max(1.0, std::abs(u1)), hh = 1e-6 * hp;
  const double d_rho = (lambda_of(rho + hr, u1, hp) - lambda_of(rho - hr, u1, hp)) / (2 * hr);
  const double d_u = (lambda_of(rho, u1 + hu, hp) - lambda_of(rho, u1 - hu, hp)) / (2 * hu);
  const double d_p = (lambda_of(rho, u1, hp + hh) - lambda_of(rho, u1, hp - hh)) / (2 * hh);
  NonlinearityCheck out;
  out.numeric = d_rho * R(0) + d_u * R(1) + d_p * R(ps);
  const double c = field.c;
  out.predicted = (c * c + 1.0) * std::sqrt(state.theta(0, 0)) / (2.0 * rho) * c * R(0);
  return out;
}

RarefactionResult rarefaction_curve(const MomentState& state0, const CharField& field, double zeta,
                                    double tol) {
  validate(state0);
  const auto set = state0.index_set_ptr();
  const long n = static_cast<long>(state0.size());
  const bool density_moves = field_eigenvector(state0, field)(0) != 0.0;

  using Vec = std::vector<double>;
  Vec w(state0.w().data(), state0.w().data() + n);
  auto rhs = [&](const Vec& x, Vec& dxdz, double) {
    const MomentState s(set, Eigen::Map<const Eigen::VectorXd>(x.data(), n));
    const Eigen::VectorXd r = field_eigenvector(s, field);
    dxdz.assign(r.data(), r.data() + n);
  };
  if (zeta != 0.0) {
    namespace odeint = boost::numeric::odeint;
    auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_dopri5<Vec>());
    odeint::integrate_adaptive(stepper, rhs, w, 0.0, zeta, zeta / 64.0);
  }

  RarefactionResult out;
  out.state = MomentState(set, Eigen::Map<const Eigen::VectorXd>(w.data(), n));
  const long ps = p11_slot(state0);
  double rho = state0.rho(), u1 = state0.u(0), p11 = state0.p(0, 0);
  if (density_moves) {
    const double c = field.c;
    const double theta0 = state0.theta(0, 0);
    const double y = 0.5 * (c * c - 1.0) * zeta;
    out.unit_speed_limit = std::abs(c * c - 1.0) < 1e-8;
    rho = state0.rho() * std::exp(zeta);
    u1 = state0.u(0) + c * std::sqrt(theta0) * zeta * expm1_ratio(y);
    p11 = state0.p(0, 0) * std::exp(c * c * zeta);
  }
  const double uscale = std::max({1.0, std::abs(u1), std::sqrt(p11 / rho)});
  out.closed_form_gap = std::max({std::abs(out.state.rho() - rho) / rho, std::abs(out.state.u(0) - u1) / uscale,
                                  std::abs(out.state.p(0, 0) - p11) / p11});
  out.state.w()(0) = rho;
  out.state.w()(1) = u1;
  out.state.w()(ps) = 0.5 * p11;
  validate(out.state);
  return out;
}

ContactVerdict contact_check(const MomentState& left, const MomentState& right, const CharField& field,
                             double tol) {
  ContactVerdict v;
  v.velocity_gap = std::abs(right.u(0) - left.u(0));
  v.pressure_gap = std::abs(right.p(0, 0) - left.p(0, 0));
  v.eigenvalue_gap = std::abs(field_eigenvalue(right, field) - field_eigenvalue(left, field));
  const double uscale = std::max({1.0, std::abs(left.u(0)), std::abs(right.u(0)), std::sqrt(left.theta(0, 0))});
  const double pscale = std::max(left.p(0, 0), right.p(0, 0));
  v.ok = v.velocity_gap <= tol * uscale && v.pressure_gap <= tol * pscale && v.eigenvalue_gap <= tol * uscale;
  return v;
}

ShockReport shock_check(const Eigen::VectorXd& FL, const Eigen::VectorXd& FR, double speed,
                        const CharField& field, int dim, int max_order, int path_points) {
  const MomentState left = from_conserved(FL, dim, max_order);
  const MomentState right = from_conserved(FR, dim, max_order);
  const Eigen::VectorXd res = speed * (FR - FL) - path_fluctuation(FL, FR, dim, max_order, path_points);
  const std::size_t top = left.indices().order_begin(max_order);
  ShockReport rep;
  rep.conservative_residual = res.head(static_cast<long>(top)).cwiseAbs().maxCoeff();
  if (top < left.size()) rep.nonconservative_residual = res.tail(res.size() - static_cast<long>(top)).cwiseAbs().maxCoeff();
  rep.lambda_left = field_eigenvalue(left, field);
  rep.lambda_right = field_eigenvalue(right, field);
  rep.entropy_ok = rep.lambda_left > speed && speed > rep.lambda_right;
  rep.density_pressure_product = (left.rho() - right.rho()) * (left.p(0, 0) - right.p(0, 0));
  return rep;
}

double mass_balance_speed(const MomentState& left, const MomentState& right) {
  const double drho = left.rho() - right.rho();
  if (drho == 0.0) throw DomainError("equal densities admit no shock");
  return (left.rho() * left.u(0) - right.rho() * right.u(0)) / drho;
}

HugoniotResult hugoniot_state(const MomentState& left, const CharField& field, double rho_right,
                              int path_points, double tol) {
  if (field.nature != FieldNature::GenuinelyNonlinear) throw DomainError("shocks need a genuinely nonlinear field");
  if (!(rho_right > 0.0) || rho_right == left.rho()) throw DomainError("right density must be positive and differ from the left");
  const int D = left.dim();
  const int M = left.max_order();
  const long n = static_cast<long>(left.size());
  const Eigen::VectorXd FL = to_conserved(left);

  const MomentState guess = rarefaction_curve(left, field, std::log(rho_right / left.rho())).state;
  Eigen::VectorXd x(n + 1);
  x.head(n) = to_conserved(guess);
  x(n) = 0.5 * (field_eigenvalue(left, field) + field_eigenvalue(guess, field));

  auto residual = [&](const Eigen::VectorXd& y) {
    Eigen::VectorXd r(n + 1);
    const Eigen::VectorXd FR = y.head(n);
    r.head(n) = y(n) * (FR - FL) - path_fluctuation(FL, FR, D, M, path_points);
    r(n) = FR(0) - rho_right;
    return r;
  };
  const double scale = 1.0 + FL.cwiseAbs().maxCoeff();
  Eigen::VectorXd r = residual(x);
  HugoniotResult out;
  for (int it = 1; it <= 60; ++it) {
    Eigen::MatrixXd J(n + 1, n + 1);
    for (long k = 0; k <= n; ++k) {
      const double h = 1e-7 * std::max(1.0, std::abs(x(k)));
      Eigen::VectorXd xp = x, xm = x;
      xp(k) += h;
      xm(k) -= h;
      J.col(k) = (residual(xp) - residual(xm)) / (2.0 * h);
    }
    const Eigen::VectorXd step = J.fullPivLu().solve(-r);
    double damping = 1.0;
    bool accepted = false;
    for (int tries = 0; tries < 30 && !accepted; ++tries, damping *= 0.5) {
      try {
        const Eigen::VectorXd trial = x + damping * step;
        const Eigen::VectorXd rt = residual(trial);
        if (rt.norm() < r.norm() || rt.cwiseAbs().maxCoeff() <= tol * scale) {
          x = trial;
          r = rt;
          accepted = true;
        }
      } catch (const DomainError&) {
        // inadmissible trial state; shrink the step
      }
    }
    out.iterations = it;
    if (!accepted) break;
    if (r.cwiseAbs().maxCoeff() <= tol * scale) {
      out.right = from_conserved(x.head(n), D, M);
      out.speed = x(n);
      out.residual = r.cwiseAbs().maxCoeff();
      return out;
    }
  }
  throw NumericalError("Hugoniot iteration did not converge (residual " + std::to_string(r.cwiseAbs().maxCoeff()) + ")");
}

TableVerdict wave_table_check(const ElementaryWave& wave, double rel_tol) {
  TableVerdict v;
  const MomentState& L = wave.left;
  const MomentState& R = wave.right;
  v.velocity_jump = R.u(0) - L.u(0);
  v.pressure_jump = R.p(0, 0) - L.p(0, 0);
  const double uscale = std::max({1.0, std::abs(L.u(0)), std::abs(R.u(0)), std::sqrt(L.theta(0, 0)),
                                  std::sqrt(R.theta(0, 0))});
  const double pscale = std::max(L.p(0, 0), R.p(0, 0));
  const int su = sign_with_tol(v.velocity_jump, rel_tol * uscale);
  const int sp = sign_with_tol(v.pressure_jump, rel_tol * pscale);
  const double c = wave.field.c;
  switch (wave.kind) {
    case WaveKind::Rarefaction:
      if (c > 0.0) {
        v.expected = "u1_L < u1_R, p11_L < p11_R";
        v.ok = su > 0 && sp > 0;
      } else if (c < 0.0) {
        v.expected = "u1_L < u1_R, p11_L > p11_R";
        v.ok = su > 0 && sp < 0;
      } else {
        v.expected = "rarefaction requires c != 0";
      }
      break;
    case WaveKind::Shock:
      if (c > 0.0) {
        v.expected = "u1_L > u1_R, p11_L > p11_R";
        v.ok = su < 0 && sp < 0;
      } else if (c < 0.0) {
        v.expected = "u1_L > u1_R, p11_L < p11_R";
        v.ok = su < 0 && sp > 0;
      } else {
        v.expected = "shock requires c != 0";
      }
      break;
    case WaveKind::Contact:
      v.expected = "u1_L = u1_R, p11_L = p11_R";
      v.ok = su == 0 && sp == 0;
      break;
  }
  return v;
}

}  // namespace hypermoment

#include "reference.hpp"

#include <cmath>
#include <stdexcept>

#include "hypermoment/index.hpp"

namespace hypermoment::testing {

namespace {

MultiIndex pair_index(int D, int i, int j) {
  MultiIndex a = MultiIndex::unit(D, i);
  a[j] += 1;
  return a;
}

// Row vector giving dtheta_ij in terms of dw.
Eigen::RowVectorXd dtheta_row(const MomentState& s, int i, int j) {
  Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(static_cast<long>(s.size()));
  const double rho = s.rho();
  r(s.indices().slot(pair_index(s.dim(), i, j))) += (i == j ? 2.0 : 1.0) / rho;
  r(0) -= s.theta(i, j) / rho;
  return r;
}

// sum_i f_{beta-e_i} du_i + 1/2 sum_ij f_{beta-e_i-e_j} dtheta_ij as a row on dw.
Eigen::RowVectorXd basis_motion_row(const MomentState& s, const MultiIndex& beta) {
  const int D = s.dim();
  Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(static_cast<long>(s.size()));
  for (int i = 0; i < D; ++i) {
    r(1 + i) += s.f(beta.shifted(i, -1));
    for (int j = 0; j < D; ++j) {
      const double c = s.f(beta.shifted(i, -1).shifted(j, -1));
      if (c != 0.0) r += 0.5 * c * dtheta_row(s, i, j);
    }
  }
  return r;
}

}  // namespace

Eigen::MatrixXd material_map(const MomentState& s) {
  const IndexSet& set = s.indices();
  const long n = static_cast<long>(s.size());
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t r = 0; r < set.size(); ++r) {
    const MultiIndex& a = set.at(r);
    Eigen::RowVectorXd row = basis_motion_row(s, a);
    // df_alpha itself: density at order 0, nothing at orders 1 and 2
    if (a.order() == 0 || a.order() >= 3) row(static_cast<long>(r)) += 1.0;
    T.row(static_cast<long>(r)) = row;
  }
  return T;
}

Eigen::MatrixXd reference_matrix(const MomentState& s, int d, bool regularized) {
  const IndexSet& set = s.indices();
  const int D = s.dim();
  const int M = s.max_order();
  const long n = static_cast<long>(s.size());
  const Eigen::MatrixXd T = material_map(s);
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t r = 0; r < set.size(); ++r) {
    const MultiIndex& a = set.at(r);
    for (int k = 0; k < D; ++k) {
      const long c = set.slot(a.shifted(k, -1));
      if (c >= 0) K(static_cast<long>(r), c) += s.theta(d, k);
    }
    if (a.order() < M) {
      K(static_cast<long>(r), set.slot(a.shifted(d))) += a[d] + 1;
    } else if (!regularized) {
      // g_{alpha+e_d} of order M+1 keeps only its basis-motion part
      E.row(static_cast<long>(r)) += (a[d] + 1) * basis_motion_row(s, a.shifted(d));
    }
  }
  return T.lu().solve(K * T + E);
}

MomentState random_state(std::mt19937_64& rng, int D, int M, double scale) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double rho = 0.5 + 1.5 * uni(rng);
  Eigen::VectorXd u(D);
  for (int i = 0; i < D; ++i) u(i) = 2.0 * uni(rng) - 1.0;
  Eigen::MatrixXd G(D, D);
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) G(i, j) = gauss(rng);
  const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(G).householderQ();
  Eigen::VectorXd lam(D);
  for (int i = 0; i < D; ++i) lam(i) = 0.5 + 1.5 * uni(rng);
  const Eigen::MatrixXd theta = Q * lam.asDiagonal() * Q.transpose();
  MomentState s = gaussian_state(D, M, rho, u, 0.5 * (theta + theta.transpose()));
  const double tbar = lam.mean();
  const IndexSet& set = s.indices();
  for (std::size_t r = set.order_begin(3); r < set.size(); ++r) {
    const int order = set.at(r).order();
    s.w()(static_cast<long>(r)) = scale * rho * std::pow(tbar, 0.5 * order) * (2.0 * uni(rng) - 1.0);
  }
  return s;
}

Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& fn,
                            const Eigen::VectorXd& x, double rel_step) {
  const Eigen::VectorXd f0 = fn(x);
  Eigen::MatrixXd J(f0.size(), x.size());
  for (long k = 0; k < x.size(); ++k) {
    const double h = rel_step * std::max(1.0, std::abs(x(k)));
    Eigen::VectorXd xp = x, xm = x;
    xp(k) += h;
    xm(k) -= h;
    J.col(k) = (fn(xp) - fn(xm)) / (2.0 * h);
  }
  return J;
}

// ---- exact Euler Riemann solver -------------------------------------------

namespace {

double sound(const EulerState& s, double g) { return std::sqrt(g * s.p / s.rho); }

// Pressure function and derivative for one side.
void pressure_fn(double p, const EulerState& k, double g, double& f, double& df) {
  const double c = sound(k, g);
  if (p > k.p) {
    const double A = 2.0 / ((g + 1.0) * k.rho);
    const double B = (g - 1.0) / (g + 1.0) * k.p;
    const double sq = std::sqrt(A / (p + B));
    f = (p - k.p) * sq;
    df = sq * (1.0 - 0.5 * (p - k.p) / (p + B));
  } else {
    const double pr = p / k.p;
    f = 2.0 * c / (g - 1.0) * (std::pow(pr, (g - 1.0) / (2.0 * g)) - 1.0);
    df = 1.0 / (k.rho * c) * std::pow(pr, -(g + 1.0) / (2.0 * g));
  }
}

}  // namespace

ExactEuler::ExactEuler(EulerState left, EulerState right, double gamma) : l_(left), r_(right), g_(gamma) {
  double p = 0.5 * (l_.p + r_.p);
  for (int it = 0; it < 200; ++it) {
    double fl, dfl, fr, dfr;
    pressure_fn(p, l_, g_, fl, dfl);
    pressure_fn(p, r_, g_, fr, dfr);
    const double F = fl + fr + (r_.u - l_.u);
    double next = p - F / (dfl + dfr);
    if (next < 1e-14) next = 1e-14;
    const double change = std::abs(next - p) / (0.5 * (next + p));
    p = next;
    if (change < 1e-15) break;
  }
  double fl, dfl, fr, dfr;
  pressure_fn(p, l_, g_, fl, dfl);
  pressure_fn(p, r_, g_, fr, dfr);
  p_star_ = p;
  u_star_ = 0.5 * (l_.u + r_.u) + 0.5 * (fr - fl);
}

EulerState ExactEuler::sample(double xi) const {
  const double g = g_;
  const double G1 = (g - 1.0) / (g + 1.0);
  if (xi <= u_star_) {
    const double c = sound(l_, g);
    if (p_star_ > l_.p) {
      const double S = l_.u - c * std::sqrt((g + 1.0) / (2.0 * g) * p_star_ / l_.p + (g - 1.0) / (2.0 * g));
      if (xi <= S) return l_;
      const double pr = p_star_ / l_.p;
      return {l_.rho * (pr + G1) / (G1 * pr + 1.0), u_star_, p_star_};
    }
    const double head = l_.u - c;
    const double c_star = c * std::pow(p_star_ / l_.p, (g - 1.0) / (2.0 * g));
    const double tail = u_star_ - c_star;
    if (xi <= head) return l_;
    if (xi >= tail) return {l_.rho * std::pow(p_star_ / l_.p, 1.0 / g), u_star_, p_star_};
    const double u = 2.0 / (g + 1.0) * (c + 0.5 * (g - 1.0) * l_.u + xi);
    const double cf = 2.0 / (g + 1.0) * (c + 0.5 * (g - 1.0) * (l_.u - xi));
    const double rho = l_.rho * std::pow(cf / c, 2.0 / (g - 1.0));
    return {rho, u, l_.p * std::pow(cf / c, 2.0 * g / (g - 1.0))};
  }
  const double c = sound(r_, g);
  if (p_star_ > r_.p) {
    const double S = r_.u + c * std::sqrt((g + 1.0) / (2.0 * g) * p_star_ / r_.p + (g - 1.0) / (2.0 * g));
    if (xi >= S) return r_;
    const double pr = p_star_ / r_.p;
    return {r_.rho * (pr + G1) / (G1 * pr + 1.0), u_star_, p_star_};
  }
  const double head = r_.u + c;
  const double c_star = c * std::pow(p_star_ / r_.p, (g - 1.0) / (2.0 * g));
  const double tail = u_star_ + c_star;
  if (xi >= head) return r_;
  if (xi <= tail) return {r_.rho * std::pow(p_star_ / r_.p, 1.0 / g), u_star_, p_star_};
  const double u = 2.0 / (g + 1.0) * (-c + 0.5 * (g - 1.0) * r_.u + xi);
  const double cf = 2.0 / (g + 1.0) * (c - 0.5 * (g - 1.0) * (r_.u - xi));
  const double rho = r_.rho * std::pow(cf / c, 2.0 / (g - 1.0));
  return {rho, u, r_.p * std::pow(cf / c, 2.0 * g / (g - 1.0))};
}

EulerShock euler_shock(EulerState pre, double ratio, int family, double g) {
  const double G1 = (g - 1.0) / (g + 1.0);
  const double c = sound(pre, g);
  const double p_post = ratio * pre.p;
  const double rho_post = pre.rho * (ratio + G1) / (G1 * ratio + 1.0);
  const double A = 2.0 / ((g + 1.0) * pre.rho);
  const double B = G1 * pre.p;
  const double jump = (p_post - pre.p) * std::sqrt(A / (p_post + B));
  const double mach = std::sqrt((g + 1.0) / (2.0 * g) * ratio + (g - 1.0) / (2.0 * g));
  EulerShock out{};
  if (family > 0) {
    out.right = pre;
    out.left = {rho_post, pre.u + jump, p_post};
    out.speed = pre.u + c * mach;
  } else {
    out.left = pre;
    out.right = {rho_post, pre.u - jump, p_post};
    out.speed = pre.u - c * mach;
  }
  return out;
}

// ---- Dormand-Prince 5(4) ----------------------------------------------------

Eigen::VectorXd integrate_ode(const std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>& f,
                              Eigen::VectorXd y, double t0, double t1, double tol) {
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                      a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                      e6 = 22.0 / 525, e7 = -1.0 / 40;
  const double span = t1 - t0;
  if (span == 0.0) return y;
  const double dir = span > 0 ? 1.0 : -1.0;
  double h = 0.01 * span;
  double t = t0;
  int guard = 0;
  while (dir * (t1 - t) > 0) {
    if (++guard > 1000000) throw std::runtime_error("integrate_ode: too many steps");
    if (dir * (t + h - t1) > 0) h = t1 - t;
    const Eigen::VectorXd k1 = f(t, y);
    const Eigen::VectorXd k2 = f(t + c2 * h, y + h * a21 * k1);
    const Eigen::VectorXd k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    const Eigen::VectorXd k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Eigen::VectorXd k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Eigen::VectorXd k6 = f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Eigen::VectorXd y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Eigen::VectorXd k7 = f(t + h, y5);
    const Eigen::VectorXd err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double en = 0.0;
    for (long i = 0; i < y.size(); ++i) {
      en = std::max(en, std::abs(err(i)) / (tol * (1.0 + std::max(std::abs(y(i)), std::abs(y5(i))))));
    }
    if (en <= 1.0) {
      t += h;
      y = y5;
    }
    const double factor = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
    h *= factor;
  }
  return y;
}

}  // namespace hypermoment::testing

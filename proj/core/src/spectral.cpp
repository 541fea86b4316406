#include "hypermoment/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

#include "hypermoment/assembly.hpp"
#include "hypermoment/errors.hpp"
#include "hypermoment/hermite.hpp"

namespace hypermoment {

namespace {

const std::vector<double>& cached_roots(int n) {
  static std::mutex mutex;
  static std::map<int, std::vector<double>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, hermite_roots(n)).first;
  return it->second;
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

MultiIndex axis_power(int D, int k) {
  MultiIndex a(D);
  a[0] = k;
  return a;
}

double max_norm(const Eigen::MatrixXd& a) { return a.cwiseAbs().rowwise().sum().maxCoeff(); }

std::vector<SpectrumEntry> closed_spectrum(const MomentState& s, double theta_nn) {
  const IndexSet& set = s.indices();
  const int M = s.max_order();
  const double scale = std::sqrt(theta_nn);
  std::vector<SpectrumEntry> out;
  out.reserve(set.size());
  for (const MultiIndex& a : set.indices()) {
    SpectrumEntry e;
    e.family_m = M + 1 - (a.order() - a[0]);
    e.root_index = a[0] + 1;
    e.eigenvalue = scale * cached_roots(e.family_m)[static_cast<std::size_t>(a[0])];
    out.push_back(e);
  }
  std::sort(out.begin(), out.end(), [](const SpectrumEntry& x, const SpectrumEntry& y) {
    if (x.eigenvalue != y.eigenvalue) return x.eigenvalue < y.eigenvalue;
    if (x.family_m != y.family_m) return x.family_m < y.family_m;
    return x.root_index < y.root_index;
  });
  const double tol = 1e-12 * scale * std::max(1.0, std::abs(out.back().eigenvalue / scale));
  for (auto& e : out) {
    e.multiplicity = static_cast<int>(std::count_if(out.begin(), out.end(), [&](const SpectrumEntry& o) {
      return std::abs(o.eigenvalue - e.eigenvalue) <= tol;
    }));
  }
  return out;
}

}  // namespace

std::vector<SpectrumEntry> spectrum_regularized(const MomentState& state) {
  validate(state);
  return closed_spectrum(state, state.theta(0, 0));
}

std::vector<SpectrumEntry> spectrum_regularized(const MomentState& state, const Eigen::VectorXd& n) {
  validate(state);
  if (n.size() != state.dim() || !(n.norm() > 0.0)) throw DomainError("bad direction vector");
  const Eigen::VectorXd unit = n / n.norm();
  return closed_spectrum(state, unit.dot(state.theta_matrix() * unit));
}

Eigen::VectorXd charpoly_1d_unregularized(const MomentState& state) {
  validate(state);
  const int M = state.max_order();
  const int D = state.dim();
  const double theta = state.theta(0, 0);
  // monic H_{n+1} = x H_n - n theta H_{n-1}
  Eigen::VectorXd prev = Eigen::VectorXd::Zero(M + 2);
  Eigen::VectorXd cur = Eigen::VectorXd::Zero(M + 2);
  cur(0) = 1.0;
  for (int n = 0; n <= M; ++n) {
    Eigen::VectorXd next = Eigen::VectorXd::Zero(M + 2);
    next.tail(M + 1) = cur.head(M + 1);
    next -= n * theta * prev;
    prev = cur;
    cur = next;
  }
  // f enters relative to the density; the printed form assumes rho = 1.
  const double fac = factorial(M + 1) / state.rho();
  const double fM = state.f(axis_power(D, M));
  const double fM1 = state.f(axis_power(D, M - 1));
  cur(1) -= fac * fM;
  cur(2) -= fac * fM1 / 2.0;
  cur(0) += fac * theta * fM1 / 2.0;
  return cur;
}

NumericSpectrum numeric_spectrum(const Eigen::MatrixXd& a) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, false);
  if (solver.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
  NumericSpectrum out;
  out.eigenvalues = solver.eigenvalues();
  std::sort(out.eigenvalues.data(), out.eigenvalues.data() + out.eigenvalues.size(),
            [](const std::complex<double>& x, const std::complex<double>& y) {
              return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
            });
  for (long k = 0; k < out.eigenvalues.size(); ++k) {
    out.max_imag = std::max(out.max_imag, std::abs(out.eigenvalues(k).imag()));
  }
  return out;
}

NonHyperbolicWitness find_nonhyperbolic_state(int dim, int max_order, double min_imag) {
  if (max_order < 3) throw DomainError("the Grad system with M = 2 is always hyperbolic");
  MomentState s = equilibrium(dim, max_order, 1.0, Eigen::VectorXd::Zero(dim), 1.0);
  const MultiIndex top = axis_power(dim, max_order);
  for (double c = 1e-3; c < 1e3; c *= 1.05) {
    s.set_f(top, c);
    const double im = numeric_spectrum(assemble(s, 0).a).max_imag;
    if (im > min_imag) return {s, c, im};
  }
  throw NumericalError("no complex eigenvalues found on the scan");
}

Eigen::VectorXd block_eigenvector(int t, double lambda, const MomentState& s) {
  const int M = s.max_order();
  const int D = s.dim();
  if (t < 0 || t > M || (D == 1 && t > 0)) throw DomainError("no block with tail order " + std::to_string(t));
  const int n = M + 1 - t;
  const double rho = s.rho();
  const double theta = s.theta(0, 0);
  auto H = [&](int k) { return hermite_monic(k, theta, lambda) / factorial(k); };
  auto f = [&](int k) { return k < 0 ? 0.0 : s.f(axis_power(D, k)); };
  Eigen::VectorXd r(n);
  r(0) = 1.0;
  for (int k = 2; k <= n; ++k) {  // 1-based entry k
    double v = 0.0;
    switch (t) {
      case 0:
        if (k == 2) {
          v = lambda / rho;
        } else if (k == 3) {
          v = lambda * lambda / 2.0;
        } else {
          v = H(k - 1) - lambda * f(k - 2) / rho -
              hermite_monic(2, theta, lambda) * f(k - 3) / (2.0 * rho);
        }
        break;
      case 1:
        v = k == 2 ? rho * lambda : rho * H(k - 1) - f(k - 1) - lambda * f(k - 2);
        break;
      case 2:
        v = H(k - 1) - f(k - 1) / rho;
        break;
      default:
        v = H(k - 1);
    }
    r(k - 1) = v;
  }
  return r;
}

Eigen::VectorXd to_material(const MomentState& s, const Eigen::VectorXd& dw) {
  const IndexSet& set = s.indices();
  const int D = s.dim();
  const double rho = s.rho();
  Eigen::MatrixXd dtheta(D, D);
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j)
      dtheta(i, j) = ((i == j ? 2.0 : 1.0) * dw(static_cast<long>(s.slot_of_p(i, j))) - s.theta(i, j) * dw(0)) / rho;
  Eigen::VectorXd g(dw.size());
  g(0) = dw(0);
  for (int i = 0; i < D; ++i) g(1 + i) = rho * dw(1 + i);
  for (int i = 0; i < D; ++i)
    for (int j = i; j < D; ++j) g(static_cast<long>(s.slot_of_p(i, j))) = (i == j ? 0.5 : 1.0) * rho * dtheta(i, j);
  for (std::size_t r = set.order_begin(3); r < set.size(); ++r) {
    const MultiIndex& a = set.at(r);
    double v = dw(static_cast<long>(r));
    for (int i = 0; i < D; ++i) {
      v += s.f(a.shifted(i, -1)) * dw(1 + i);
      for (int j = 0; j < D; ++j) v += 0.5 * s.f(a.shifted(i, -1).shifted(j, -1)) * dtheta(i, j);
    }
    g(static_cast<long>(r)) = v;
  }
  return g;
}

Eigen::VectorXd from_material(const MomentState& s, const Eigen::VectorXd& g) {
  const IndexSet& set = s.indices();
  const int D = s.dim();
  const double rho = s.rho();
  Eigen::VectorXd dw(g.size());
  dw(0) = g(0);
  for (int i = 0; i < D; ++i) dw(1 + i) = g(1 + i) / rho;
  Eigen::MatrixXd dtheta(D, D);
  for (int i = 0; i < D; ++i) {
    for (int j = i; j < D; ++j) {
      const long slot = static_cast<long>(s.slot_of_p(i, j));
      dtheta(i, j) = dtheta(j, i) = (i == j ? 2.0 : 1.0) * g(slot) / rho;
      const double dp = rho * dtheta(i, j) + s.theta(i, j) * g(0);
      dw(slot) = dp / (i == j ? 2.0 : 1.0);
    }
  }
  for (std::size_t r = set.order_begin(3); r < set.size(); ++r) {
    const MultiIndex& a = set.at(r);
    double v = g(static_cast<long>(r));
    for (int i = 0; i < D; ++i) {
      v -= s.f(a.shifted(i, -1)) * dw(1 + i);
      for (int j = 0; j < D; ++j) v -= 0.5 * s.f(a.shifted(i, -1).shifted(j, -1)) * dtheta(i, j);
    }
    dw(static_cast<long>(r)) = v;
  }
  return dw;
}

namespace {

// lambda = 0: in g coordinates the regularized x_1 matrix acts as
//   (K g)_b = sum_k theta_1k g_{b-e_k} + (b_1 + 1) g_{b+e_1}   (|b| < M),
// so a null vector starting at the block head follows
//   g_b = -(1/b_1) sum_k theta_1k g_{b-e_1-e_k}.
// Parity keeps the top rows consistent whenever the block has odd size.
Eigen::VectorXd zero_eigenvector(const MultiIndex& alpha, const MomentState& s) {
  const IndexSet& set = s.indices();
  const int D = s.dim();
  MultiIndex head = alpha;
  head[0] = 0;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<long>(set.size()));
  g(set.slot(head)) = 1.0;
  for (std::size_t r = 1; r < set.size(); ++r) {
    const MultiIndex& b = set.at(r);
    if (b[0] == 0) continue;
    double v = 0.0;
    for (int k = 0; k < D; ++k) {
      const long c = set.slot(b.shifted(0, -1).shifted(k, -1));
      if (c >= 0) v += s.theta(0, k) * g(c);
    }
    g(static_cast<long>(r)) = -v / b[0];
  }
  return from_material(s, g);
}

}  // namespace

Prolongation prolong(const Eigen::VectorXd& block_vector, const MultiIndex& alpha, double lambda,
                     const MomentState& s) {
  const int D = s.dim();
  const int M = s.max_order();
  const BlockPermutation perm(D, M);
  const IndexSet& set = s.indices();
  const long head_slot = [&] {
    MultiIndex h = alpha;
    h[0] = 0;
    return set.slot(h);
  }();
  if (head_slot < 0) throw DomainError("index " + alpha.to_string() + " is not a slot");
  const std::size_t b0 = perm.block_of_position(perm.permuted(static_cast<std::size_t>(head_slot)));
  const auto& blocks = perm.blocks();
  if (static_cast<std::size_t>(block_vector.size()) != blocks[b0].size) {
    throw DomainError("block vector has the wrong length");
  }
  const double sqrt_theta = std::sqrt(s.theta(0, 0));
  Prolongation out;

  if (std::abs(lambda) <= 1e-13 * sqrt_theta) {
    out.vector = zero_eigenvector(alpha, s);
    out.vector *= block_vector(0) / out.vector(head_slot);
    return out;
  }

  const Eigen::MatrixXd A = to_block_order(assemble_regularized(s, 0).a, D, M);
  const long n = A.rows();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  x.segment(static_cast<long>(blocks[b0].start), block_vector.size()) = block_vector;
  const double c = lambda / sqrt_theta;
  const double scale_A = max_norm(A);
  for (std::size_t b = b0 + 1; b < blocks.size(); ++b) {
    const long start = static_cast<long>(blocks[b].start);
    const long size = static_cast<long>(blocks[b].size);
    const Eigen::VectorXd rhs = -A.block(start, 0, size, start) * x.head(start);
    Eigen::MatrixXd B = A.block(start, start, size, size);
    B.diagonal().array() -= lambda;
    const bool singular = size == static_cast<long>(blocks[b0].size) ||
                          std::abs(hermite(static_cast<int>(size), 1.0, c)) < 1e-10;
    if (!singular) {
      x.segment(start, size) = B.partialPivLu().solve(rhs);
      continue;
    }
    // Lower Hessenberg with nonzero superdiagonal: march down from x_0 = 0 and
    // require the last row to be satisfied.
    Eigen::VectorXd y = Eigen::VectorXd::Zero(size);
    for (long k = 0; k + 1 < size; ++k) {
      const double acc = rhs(k) - B.row(k).head(k + 1).dot(y.head(k + 1));
      y(k + 1) = acc / B(k, k + 1);
    }
    const double residual = rhs(size - 1) - B.row(size - 1).dot(y);
    const double scale = rhs.cwiseAbs().maxCoeff() + scale_A * (1.0 + y.cwiseAbs().maxCoeff());
    if (std::abs(residual) > 1e-9 * scale) {
      out.closed_form = false;
      out.note = "inconsistent singular block system (residual " + std::to_string(residual) + ")";
    }
    x.segment(start, size) = y;
  }
  out.vector = Eigen::VectorXd(n);
  for (long pos = 0; pos < n; ++pos) out.vector(static_cast<long>(perm.natural(static_cast<std::size_t>(pos)))) = x(pos);
  return out;
}

namespace {

void finish_metrics(EigenDecomposition& e, const Eigen::MatrixXd& A) {
  Eigen::MatrixXd Rn = e.vectors;
  for (long k = 0; k < Rn.cols(); ++k) Rn.col(k) /= Rn.col(k).cwiseAbs().maxCoeff();
  const double normA = std::max(max_norm(A), std::numeric_limits<double>::min());
  e.residual = max_norm(A * Rn - Rn * e.eigenvalues.asDiagonal()) / normA;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Rn);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  e.condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  e.rank = (sv.array() > 1e-12 * smax * static_cast<double>(sv.size())).count();
}

}  // namespace

EigenDecomposition full_eigendecomposition(const MomentState& s) {
  validate(s);
  const IndexSet& set = s.indices();
  const int M = s.max_order();
  const Eigen::MatrixXd A = assemble_regularized(s, 0).a;
  const long n = A.rows();
  const double sqrt_theta = std::sqrt(s.theta(0, 0));

  std::vector<long> order(static_cast<std::size_t>(n));
  std::vector<double> lam(static_cast<std::size_t>(n));
  std::vector<int> fam(static_cast<std::size_t>(n)), idx(static_cast<std::size_t>(n));
  for (long r = 0; r < n; ++r) {
    const MultiIndex& a = set.at(static_cast<std::size_t>(r));
    fam[r] = M + 1 - (a.order() - a[0]);
    idx[r] = a[0] + 1;
    lam[r] = sqrt_theta * cached_roots(fam[r])[static_cast<std::size_t>(a[0])];
  }
  std::iota(order.begin(), order.end(), 0L);
  std::stable_sort(order.begin(), order.end(), [&](long x, long y) {
    return lam[x] != lam[y] ? lam[x] < lam[y] : fam[x] < fam[y];
  });

  EigenDecomposition e;
  e.eigenvalues.resize(n);
  e.vectors.resize(n, n);
  for (long k = 0; k < n; ++k) {
    const long r = order[static_cast<std::size_t>(k)];
    const MultiIndex& a = set.at(static_cast<std::size_t>(r));
    const int t = a.order() - a[0];
    const Eigen::VectorXd bv = block_eigenvector(t, lam[r], s);
    const Prolongation p = prolong(bv, a, lam[r], s);
    if (!p.closed_form) {
      e.closed_form = false;
      e.note = p.note;
    }
    e.eigenvalues(k) = lam[r];
    e.family_m.push_back(fam[r]);
    e.root_index.push_back(idx[r]);
    e.vectors.col(k) = p.vector;
  }
  finish_metrics(e, A);
  if (e.closed_form && e.residual <= 1e-6 && e.rank == n) return e;

  // Numeric fallback.
  EigenDecomposition fb;
  fb.closed_form = false;
  fb.note = e.note.empty() ? "closed form residual " + std::to_string(e.residual) : e.note;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(A, true);
  if (solver.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
  const Eigen::VectorXcd ev = solver.eigenvalues();
  const Eigen::MatrixXcd V = solver.eigenvectors();
  double max_imag = 0.0;
  for (long k = 0; k < n; ++k) max_imag = std::max(max_imag, std::abs(ev(k).imag()));
  fb.eigenvalues = ev.real();
  fb.vectors = V.real();
  fb.family_m.assign(static_cast<std::size_t>(n), 0);
  fb.root_index.assign(static_cast<std::size_t>(n), 0);
  finish_metrics(fb, A);
  fb.diagonalizable = max_imag <= 1e-6 * (1.0 + fb.eigenvalues.cwiseAbs().maxCoeff()) && fb.rank == n;
  return fb;
}

double rotation_spectrum_check(const MomentState& state, const Eigen::VectorXd& n) {
  const auto closed = spectrum_regularized(state, n);
  const NumericSpectrum num = numeric_spectrum(directional(state, n).a);
  double scale = 0.0;
  for (const auto& c : closed) scale = std::max(scale, std::abs(c.eigenvalue));
  double dev = num.max_imag;
  for (std::size_t k = 0; k < closed.size(); ++k) {
    dev = std::max(dev, std::abs(num.eigenvalues(static_cast<long>(k)).real() - closed[k].eigenvalue));
  }
  return dev / scale;
}

}  // namespace hypermoment

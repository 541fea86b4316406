#include <doctest.h>

#include <random>

#include "hypermoment/assembly.hpp"
#include "hypermoment/errors.hpp"
#include "hypermoment/state.hpp"
#include "support/reference.hpp"

using namespace hypermoment;
using hypermoment::testing::reference_matrix;
using hypermoment::testing::random_state;

namespace {

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

MomentState sample_d2m3() {
  Eigen::Vector2d u(0.3, -0.2);
  Eigen::Matrix2d theta;
  theta << 1.2, 0.3, 0.3, 0.8;
  MomentState s = gaussian_state(2, 3, 1.4, u, theta);
  s.set_f({3, 0}, 0.11);
  s.set_f({2, 1}, -0.07);
  s.set_f({1, 2}, 0.05);
  s.set_f({0, 3}, 0.02);
  return s;
}

}  // namespace

TEST_CASE("D=2, M=3 matrix matches the worked example entry by entry") {
  const MomentState s = sample_d2m3();
  const double rho = s.rho();
  const double p11 = s.p(0, 0), p12 = s.p(0, 1), p22 = s.p(1, 1);
  const double t11 = p11 / rho, t12 = p12 / rho, t22 = p22 / rho;
  const double f30 = 0.11, f21 = -0.07, f12 = 0.05, f03 = 0.02;
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(10, 10);
  expected(0, 1) = rho;
  expected(1, 3) = 2.0 / rho;
  expected(2, 4) = 1.0 / rho;
  expected(3, 1) = 1.5 * p11;
  expected(3, 6) = 3.0;
  expected(4, 1) = 2.0 * p12;
  expected(4, 2) = p11;
  expected(4, 7) = 2.0;
  expected(5, 1) = 0.5 * p22;
  expected(5, 2) = p12;
  expected(5, 8) = 1.0;
  expected.row(6) << -t11 * t11 / 2, 4 * f30, 0, t11, 0, 0, 0, 0, 0, 0;
  expected.row(7) << -1.5 * t11 * t12, 3 * f21, 3 * f30, t12, t11, 0, 0, 0, 0, 0;
  expected.row(8) << -t11 * t22 / 2 - t12 * t12, 2 * f12, 2 * f21, 0, t12, t11, 0, 0, 0, 0;
  expected.row(9) << -t22 * t12 / 2, f03, f12, 0, 0, t12, 0, 0, 0, 0;
  const auto A = assemble(s, 0);
  CHECK(max_abs(A.a - expected) < 1e-13);
}

TEST_CASE("assembled matrices agree with the material-derivative reference") {
  std::mt19937_64 rng(7);
  for (int D = 1; D <= 3; ++D) {
    for (int M = 2; M <= (D == 3 ? 5 : 7); ++M) {
      for (int rep = 0; rep < 3; ++rep) {
        const MomentState s = random_state(rng, D, M);
        for (int d = 0; d < D; ++d) {
          for (bool reg : {false, true}) {
            const auto A = reg ? assemble_regularized(s, d) : assemble(s, d);
            const Eigen::MatrixXd R = reference_matrix(s, d, reg);
            INFO("D=" << D << " M=" << M << " d=" << d << " reg=" << reg);
            CHECK(max_abs(A.a - R) < 1e-11 * (1.0 + max_abs(R)));
          }
        }
      }
    }
  }
}

TEST_CASE("structural properties of the x1 matrix") {
  std::mt19937_64 rng(21);
  for (int D = 1; D <= 3; ++D) {
    for (int M = 3; M <= (D == 3 ? 4 : 6); ++M) {
      const MomentState s = random_state(rng, D, M);
      for (const bool reg : {false, true}) {
        const CoefficientMatrix m = reg ? assemble_regularized(s, 0) : assemble(s, 0);
        const StructuralReport rep = structural_report(m, s);
        CHECK(rep.max_abs_diagonal == 0.0);
        CHECK(rep.velocity_sensitivity == 0.0);
        CHECK(rep.max_upper_per_row <= 1);
        CHECK(rep.block_lower_triangular);
        CHECK(rep.max_above_blocks == 0.0);
      }
    }
  }
}

TEST_CASE("the only strictly upper entry of a row sits at alpha + e1") {
  std::mt19937_64 rng(22);
  const MomentState s = random_state(rng, 2, 8);
  const Eigen::MatrixXd a = assemble(s, 0).a;
  const IndexSet& set = s.indices();
  for (std::size_t r = 0; r < set.size(); ++r) {
    const long target = set.slot(set.at(r).shifted(0));
    for (std::size_t c = r + 1; c < set.size(); ++c) {
      const double v = a(static_cast<long>(r), static_cast<long>(c));
      if (static_cast<long>(c) == target) {
        CHECK(v != 0.0);
      } else {
        CHECK(v == 0.0);
      }
    }
  }
}

TEST_CASE("directional matrices") {
  std::mt19937_64 rng(23);
  const MomentState s = random_state(rng, 2, 4);
  Eigen::Vector2d e2(0.0, 1.0);
  CHECK(max_abs(directional(s, e2).a - assemble_regularized(s, 1).a) == 0.0);
  Eigen::Vector2d n(0.6, 0.8);
  const Eigen::MatrixXd combo = 0.6 * assemble_regularized(s, 0).a + 0.8 * assemble_regularized(s, 1).a;
  CHECK(max_abs(directional(s, n).a - combo) < 1e-14);
  CHECK_THROWS_AS(directional(s, Eigen::Vector2d(1.0, 1.0)), DomainError);
  CHECK_THROWS_AS(assemble(s, 2), DomainError);
}

TEST_CASE("relaxation source: conservation, fixed point and deviator decay") {
  std::mt19937_64 rng(24);
  for (int D = 1; D <= 3; ++D) {
    const MomentState s = random_state(rng, D, 4);
    const CollisionModel model{1.3, CollisionKind::ESBGK, 2.0 / 3.0};
    const Eigen::VectorXd src = source(s, model);
    for (int k = 0; k <= D; ++k) CHECK(src(k) == 0.0);
    double trace = 0.0;
    for (int i = 0; i < D; ++i) trace += 2.0 * src(static_cast<long>(s.slot_of_p(i, i)));
    CHECK(std::abs(trace) < 1e-14);
    // deviator relaxes at nu (1 - b)
    const double b = model.mixing();
    const double pbar = s.pressure().trace() / D;
    for (int i = 0; i < D; ++i) {
      for (int j = 0; j < D; ++j) {
        const double dp = (1.0 + (i == j)) * src(static_cast<long>(s.slot_of_p(i, j)));
        const double dev = s.p(i, j) - (i == j ? pbar : 0.0);
        CHECK(dp == doctest::Approx(-model.nu * (1.0 - b) * dev).epsilon(1e-12).scale(1.0));
      }
    }
  }
  Eigen::VectorXd u(2);
  u << 0.3, 0.1;
  const MomentState eq = equilibrium(2, 5, 1.2, u, 0.7);
  CHECK(source(eq, {4.0, CollisionKind::BGK, 1.0}).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("conservative rows of the fluctuation are flux differences") {
  std::mt19937_64 rng(25);
  for (int D = 1; D <= 2; ++D) {
    const int M = 4;
    const MomentState a = random_state(rng, D, M);
    const MomentState b = random_state(rng, D, M);
    const Eigen::VectorXd FL = to_conserved(a), FR = to_conserved(b);
    const Eigen::VectorXd fl = path_fluctuation(FL, FR, D, M, 4);
    const Eigen::VectorXd jump = conservative_flux(b) - conservative_flux(a);
    const std::size_t top = a.indices().order_begin(M);
    for (std::size_t r = 0; r < top; ++r)
      CHECK(fl(static_cast<long>(r)) == doctest::Approx(jump(static_cast<long>(r))).epsilon(1e-13));
    CHECK(path_fluctuation(FL, FL, D, M, 4).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("small-jump fluctuation is the regularized matrix in conserved variables") {
  std::mt19937_64 rng(26);
  for (int D = 1; D <= 2; ++D) {
    for (int M = 2; M <= 5; ++M) {
      const MomentState s = random_state(rng, D, M);
      auto conserved = [&](const Eigen::VectorXd& w) { return to_conserved(MomentState(s.index_set_ptr(), w)); };
      const Eigen::MatrixXd J = hypermoment::testing::fd_jacobian(conserved, s.w());
      const long n = static_cast<long>(s.size());
      const Eigen::MatrixXd system = s.u(0) * Eigen::MatrixXd::Identity(n, n) + assemble_regularized(s, 0).a;
      const Eigen::MatrixXd gamma = J * system * J.inverse();
      std::uniform_real_distribution<double> uni(-1.0, 1.0);
      Eigen::VectorXd dir(n);
      for (long k = 0; k < n; ++k) dir(k) = uni(rng);
      const Eigen::VectorXd F = to_conserved(s);
      const double eps = 1e-6;
      const Eigen::VectorXd fl = (path_fluctuation(F - eps * dir, F + eps * dir, D, M, 3)) / (2.0 * eps);
      const Eigen::VectorXd want = gamma * dir;
      CHECK((fl - want).cwiseAbs().maxCoeff() < 1e-5 * (1.0 + want.cwiseAbs().maxCoeff()));
    }
  }
}

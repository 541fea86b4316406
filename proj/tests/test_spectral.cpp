#include <doctest.h>

#include <map>
#include <random>

#include "hypermoment/assembly.hpp"
#include "hypermoment/errors.hpp"
#include "hypermoment/hermite.hpp"
#include "hypermoment/spectral.hpp"
#include "reference.hpp"

using namespace hypermoment;
using hypermoment::testing::random_state;

namespace {

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

double poly_eval(const Eigen::VectorXd& c, double x) {
  double v = 0.0;
  for (long k = c.size() - 1; k >= 0; --k) v = v * x + c(k);
  return v;
}

}  // namespace

TEST_CASE("closed-form block eigenvectors solve every diagonal block") {
  std::mt19937_64 rng(11);
  for (int D = 1; D <= 3; ++D) {
    for (int M = 3; M <= (D == 3 ? 5 : 7); ++M) {
      const MomentState s = random_state(rng, D, M);
      const Eigen::MatrixXd A = to_block_order(assemble_regularized(s, 0).a, D, M);
      const BlockPermutation perm(D, M);
      for (const auto& b : perm.blocks()) {
        const long start = static_cast<long>(b.start), size = static_cast<long>(b.size);
        const Eigen::MatrixXd B = A.block(start, start, size, size);
        for (double c : hermite_roots(static_cast<int>(size))) {
          const double lambda = c * std::sqrt(s.theta(0, 0));
          const Eigen::VectorXd r = block_eigenvector(b.tail_order, lambda, s);
          INFO("D=" << D << " M=" << M << " tail order " << b.tail_order << " lambda " << lambda);
          CHECK(r(0) == 1.0);
          CHECK((B * r - lambda * r).cwiseAbs().maxCoeff() <
                1e-10 * (1.0 + max_abs(B)) * (1.0 + r.cwiseAbs().maxCoeff()));
        }
      }
    }
  }
}

TEST_CASE("diagonal blocks depend only on the tail order") {
  std::mt19937_64 rng(12);
  const MomentState s = random_state(rng, 3, 5);
  const Eigen::MatrixXd A = to_block_order(assemble_regularized(s, 0).a, 3, 5);
  const BlockPermutation perm(3, 5);
  std::map<int, Eigen::MatrixXd> first;
  for (const auto& b : perm.blocks()) {
    const Eigen::MatrixXd B = A.block(static_cast<long>(b.start), static_cast<long>(b.start),
                                      static_cast<long>(b.size), static_cast<long>(b.size));
    auto [it, fresh] = first.emplace(b.tail_order, B);
    if (!fresh) CHECK(max_abs(it->second - B) < 1e-13 * (1.0 + max_abs(B)));
  }
}

TEST_CASE("unregularized characteristic polynomial matches the determinant") {
  std::mt19937_64 rng(13);
  for (int M = 3; M <= 7; ++M) {
    for (int D = 1; D <= 2; ++D) {
      const MomentState s = random_state(rng, D, M, 0.3);
      const Eigen::MatrixXd A = to_block_order(assemble(s, 0).a, D, M);
      const Eigen::MatrixXd B = A.topLeftCorner(M + 1, M + 1);
      const Eigen::VectorXd c = charpoly_1d_unregularized(s);
      for (double x : {-2.1, -0.4, 0.0, 0.7, 1.9}) {
        const Eigen::MatrixXd L = x * Eigen::MatrixXd::Identity(M + 1, M + 1) - B;
        const double det = L.partialPivLu().determinant();
        INFO("M=" << M << " D=" << D << " x=" << x);
        CHECK(poly_eval(c, x) == doctest::Approx(det).epsilon(1e-9).scale(1.0));
      }
    }
  }
}

TEST_CASE("M=3 characteristic polynomial at the unit Maxwellian") {
  MomentState s = equilibrium(1, 3, 1.0, Eigen::VectorXd::Zero(1), 1.0);
  s.set_f({3}, 0.25);
  const Eigen::VectorXd c = charpoly_1d_unregularized(s);
  CHECK(c(0) == doctest::Approx(3.0));
  CHECK(c(1) == doctest::Approx(-24.0 * 0.25));
  CHECK(c(2) == doctest::Approx(-6.0));
  CHECK(c(3) == doctest::Approx(0.0));
  CHECK(c(4) == doctest::Approx(1.0));
}

TEST_CASE("regularized spectrum: families, multiplicities and the numeric check") {
  SUBCASE("D=1, M=3 gives the roots of He_4") {
    const MomentState s = equilibrium(1, 3, 1.3, Eigen::VectorXd::Constant(1, 0.2), 0.7);
    const auto sp = spectrum_regularized(s);
    const auto roots = hermite_roots(4);
    REQUIRE(sp.size() == 4);
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(sp[k].eigenvalue == doctest::Approx(roots[k] * std::sqrt(0.7)).epsilon(1e-14));
      CHECK(sp[k].family_m == 4);
      CHECK(sp[k].multiplicity == 1);
    }
  }
  SUBCASE("D=2, M=3 has one field per root of He_1..He_4") {
    const MomentState s = equilibrium(2, 3, 1.0, Eigen::VectorXd::Zero(2), 1.0);
    const auto sp = spectrum_regularized(s);
    REQUIRE(sp.size() == 10);
    std::map<int, int> per_family;
    for (const auto& e : sp) per_family[e.family_m] += 1;
    for (int m = 1; m <= 4; ++m) CHECK(per_family[m] == m);
    // zero is a root of He_1 and He_3
    int zeros = 0;
    for (const auto& e : sp) zeros += e.eigenvalue == 0.0;
    CHECK(zeros == 2);
    for (const auto& e : sp) {
      if (e.eigenvalue == 0.0) CHECK(e.multiplicity == 2);
    }
  }
  SUBCASE("D=3 multiplicities count tails") {
    const MomentState s = equilibrium(3, 4, 1.0, Eigen::VectorXd::Zero(3), 1.0);
    const auto sp = spectrum_regularized(s);
    std::map<int, int> per_family;
    for (const auto& e : sp) per_family[e.family_m] += 1;
    // tails of order t in N^2: t + 1 of them, each with m = 5 - t roots
    for (int m = 1; m <= 5; ++m) CHECK(per_family[m] == m * (5 - m + 1));
  }
}

TEST_CASE("closed-form spectrum agrees with the numeric eigenvalues") {
  std::mt19937_64 rng(14);
  for (int D = 1; D <= 3; ++D) {
    for (int M = 2; M <= (D == 3 ? 4 : 6); ++M) {
      for (int rep = 0; rep < 3; ++rep) {
        const MomentState s = random_state(rng, D, M);
        const auto sp = spectrum_regularized(s);
        const NumericSpectrum num = numeric_spectrum(assemble_regularized(s, 0).a);
        double scale = 0.0;
        for (const auto& e : sp) scale = std::max(scale, std::abs(e.eigenvalue));
        INFO("D=" << D << " M=" << M);
        CHECK(num.max_imag < 1e-8 * scale);
        for (std::size_t k = 0; k < sp.size(); ++k) {
          CHECK(std::abs(num.eigenvalues(static_cast<long>(k)).real() - sp[k].eigenvalue) < 1e-8 * scale);
        }
      }
    }
  }
}

TEST_CASE("full eigendecomposition is closed form, accurate and of full rank") {
  std::mt19937_64 rng(15);
  for (int D = 1; D <= 3; ++D) {
    for (int M = 2; M <= (D == 3 ? 4 : 6); ++M) {
      for (int rep = 0; rep < 2; ++rep) {
        const MomentState s = random_state(rng, D, M);
        const EigenDecomposition e = full_eigendecomposition(s);
        INFO("D=" << D << " M=" << M << " note: " << e.note);
        CHECK(e.closed_form);
        CHECK(e.residual < 1e-8);
        CHECK(e.rank == static_cast<long>(s.size()));
      }
    }
  }
}

TEST_CASE("prolongations are proper and zero-eigenvalue vectors are null vectors") {
  std::mt19937_64 rng(16);
  const MomentState s = random_state(rng, 2, 5);
  const Eigen::MatrixXd A = assemble_regularized(s, 0).a;
  const BlockPermutation perm(2, 5);
  const IndexSet& set = s.indices();
  for (std::size_t slot = 0; slot < set.size(); ++slot) {
    const MultiIndex& a = set.at(slot);
    const int t = a.order() - a[0];
    const int m = 6 - t;
    const double lambda = std::sqrt(s.theta(0, 0)) * hermite_roots(m)[static_cast<std::size_t>(a[0])];
    const Eigen::VectorXd bv = block_eigenvector(t, lambda, s);
    const Prolongation p = prolong(bv, a, lambda, s);
    CHECK(p.closed_form);
    CHECK((A * p.vector - lambda * p.vector).cwiseAbs().maxCoeff() <
          1e-9 * max_abs(A) * p.vector.cwiseAbs().maxCoeff());
    const std::size_t pos = perm.permuted(slot);
    const auto& blk = perm.blocks()[perm.block_of_position(pos)];
    for (std::size_t q = 0; q < blk.start; ++q) CHECK(p.vector(static_cast<long>(perm.natural(q))) == 0.0);
    // the block part is the block eigenvector
    for (std::size_t q = 0; q < blk.size; ++q) {
      CHECK(p.vector(static_cast<long>(perm.natural(blk.start + q))) ==
            doctest::Approx(bv(static_cast<long>(q))).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("density component of an eigenvector: nonzero exactly on the He_{M+1} family") {
  std::mt19937_64 rng(17);
  for (int D = 2; D <= 3; ++D) {
    const int M = D == 2 ? 5 : 4;
    const MomentState s = random_state(rng, D, M);
    const EigenDecomposition e = full_eigendecomposition(s);
    for (long k = 0; k < e.eigenvalues.size(); ++k) {
      const bool nonzero_top = e.family_m[static_cast<std::size_t>(k)] == M + 1 && e.eigenvalues(k) != 0.0;
      if (e.eigenvalues(k) == 0.0) continue;
      if (nonzero_top) {
        CHECK(std::abs(e.vectors(0, k)) > 1e-3);
      } else {
        CHECK(e.vectors(0, k) == 0.0);
      }
    }
  }
}

TEST_CASE("material coordinates round trip") {
  std::mt19937_64 rng(18);
  const MomentState s = random_state(rng, 3, 4);
  const Eigen::VectorXd dw = Eigen::VectorXd::Random(static_cast<long>(s.size()));
  const Eigen::VectorXd g = to_material(s, dw);
  CHECK((from_material(s, g) - dw).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((hypermoment::testing::material_map(s) * dw - g).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("rotational invariance of the regularized spectrum") {
  Eigen::Vector2d u(0.1, 0.2);
  Eigen::Matrix2d theta;
  theta << 1.5, 0.4, 0.4, 0.6;
  MomentState s = gaussian_state(2, 4, 1.2, u, theta);
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> uni(-0.05, 0.05);
  for (std::size_t r = s.indices().order_begin(3); r < s.size(); ++r) s.w()(static_cast<long>(r)) = uni(rng);
  for (int k = 0; k < 8; ++k) {
    const double phi = 2.0 * M_PI * k / 8.0 + 0.1;
    Eigen::Vector2d n(std::cos(phi), std::sin(phi));
    CHECK(rotation_spectrum_check(s, n) < 1e-8);
  }
}

TEST_CASE("a non-hyperbolic state exists for the unregularized system") {
  const NonHyperbolicWitness w = find_nonhyperbolic_state(1, 3, 1e-3);
  CHECK(w.max_imag > 1e-3);
  const NumericSpectrum reg = numeric_spectrum(assemble_regularized(w.state, 0).a);
  CHECK(reg.max_imag == 0.0);
  CHECK_THROWS_AS(find_nonhyperbolic_state(1, 2), DomainError);
}

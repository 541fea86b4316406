#include <doctest.h>

#include <cmath>
#include <random>

#include "hypermoment/assembly.hpp"
#include "hypermoment/errors.hpp"
#include "hypermoment/hermite.hpp"
#include "hypermoment/riemann.hpp"
#include "hypermoment/spectral.hpp"
#include "support/reference.hpp"

using namespace hypermoment;
using hypermoment::testing::random_state;

namespace {

MomentState euler_state(const hypermoment::testing::EulerState& e) {
  Eigen::VectorXd u(1);
  u << e.u;
  return equilibrium(1, 2, e.rho, u, e.p / e.rho);
}

double lambda_at(const MomentState& s, const CharField& f) { return field_eigenvalue(s, f); }

}  // namespace

TEST_CASE("field classification") {
  std::mt19937_64 rng(31);
  const MomentState s1 = random_state(rng, 1, 4);
  CHECK(classify_field(s1, 0.0).nature == FieldNature::LinearlyDegenerate);
  const double top = hermite_roots(5).back();
  const CharField gn = classify_field(s1, top);
  CHECK(gn.nature == FieldNature::GenuinelyNonlinear);
  CHECK(gn.family_m == 5);
  CHECK(gn.root_index == 5);
  CHECK_THROWS_AS(classify_field(s1, 0.5), DomainError);

  const MomentState s2 = random_state(rng, 2, 4);
  const CharField lower = classify_field(s2, hermite_roots(3).back());  // He_3 root, not He_5
  CHECK(lower.family_m == 3);
  CHECK(lower.nature == FieldNature::LinearlyDegenerate);
  CHECK(lower.block_head == MultiIndex{0, 2});
  CHECK(classify_field(s2, hermite_roots(5).front()).nature == FieldNature::GenuinelyNonlinear);
}

TEST_CASE("field eigenvectors are eigenvectors of u1 I + A") {
  std::mt19937_64 rng(32);
  for (int D = 1; D <= 3; ++D) {
    const int M = D == 3 ? 4 : 5;
    const MomentState s = random_state(rng, D, M);
    const long n = static_cast<long>(s.size());
    const Eigen::MatrixXd sys = s.u(0) * Eigen::MatrixXd::Identity(n, n) + assemble_regularized(s, 0).a;
    const int lowest = D == 1 ? M + 1 : 1;
    for (int m = lowest; m <= M + 1; ++m) {
      for (double c : hermite_roots(m)) {
        const CharField f = classify_field(s, c);
        if (f.family_m != m) continue;  // shared roots are reported on the top family
        const Eigen::VectorXd R = field_eigenvector(s, f);
        const double lam = lambda_at(s, f);
        CHECK((sys * R - lam * R).cwiseAbs().maxCoeff() < 1e-9 * sys.cwiseAbs().maxCoeff() * R.cwiseAbs().maxCoeff());
        const NonlinearityCheck nc = nonlinearity_check(s, f);
        CHECK(std::abs(nc.numeric - nc.predicted) < 1e-7 * std::max(1.0, std::abs(nc.predicted)));
        if (f.nature == FieldNature::LinearlyDegenerate) {
          CHECK(nc.predicted == 0.0);
        } else {
          CHECK(std::abs(nc.predicted) > 1e-3);
          CHECK(R(0) == doctest::Approx(s.rho()));
          CHECK(R(1) == doctest::Approx(f.c * std::sqrt(s.theta(0, 0))));
          CHECK(R(static_cast<long>(s.slot_of_p(0, 0))) == doctest::Approx(0.5 * f.c * f.c * s.p(0, 0)));
        }
      }
    }
  }
}

TEST_CASE("rarefaction curves: closed forms against an independent integration") {
  std::mt19937_64 rng(33);
  for (int D = 1; D <= 2; ++D) {
    for (int M = 2; M <= (D == 1 ? 6 : 4); ++M) {
      const MomentState s0 = random_state(rng, D, M);
      for (int j : {1, M + 1}) {
        const CharField f = top_family_field(s0, j);
        CHECK(rarefaction_curve(s0, f, 0.0).state.w() == s0.w());
        for (double zeta : {-0.5, 0.3, 0.5}) {
          const RarefactionResult r = rarefaction_curve(s0, f, zeta);
          CHECK(r.closed_form_gap < 1e-6);
          auto rhs = [&](double, const Eigen::VectorXd& w) {
            return field_eigenvector(MomentState(s0.index_set_ptr(), w), f);
          };
          const Eigen::VectorXd ref = hypermoment::testing::integrate_ode(rhs, s0.w(), 0.0, zeta, 1e-12);
          CHECK((r.state.w() - ref).cwiseAbs().maxCoeff() < 1e-6 * (1.0 + ref.cwiseAbs().maxCoeff()));
        }
      }
    }
  }
}

TEST_CASE("eigenvalue is monotone along a rarefaction curve with the sign of c zeta") {
  std::mt19937_64 rng(34);
  const MomentState s0 = random_state(rng, 2, 4);
  for (int j = 1; j <= 5; ++j) {
    const CharField f = top_family_field(s0, j);
    if (f.nature != FieldNature::GenuinelyNonlinear) continue;
    for (double dir : {-1.0, 1.0}) {
      double last = lambda_at(s0, f);
      for (int k = 1; k <= 8; ++k) {
        const double zeta = dir * 0.05 * k;
        const double lam = lambda_at(rarefaction_curve(s0, f, zeta, 1e-10).state, f);
        CHECK((lam - last) * f.c * dir > 0.0);
        last = lam;
      }
    }
  }
}

TEST_CASE("rarefaction waves satisfy the table") {
  std::mt19937_64 rng(35);
  for (int M = 2; M <= 5; ++M) {
    const MomentState s0 = random_state(rng, 1, M);
    for (int j = 1; j <= M + 1; ++j) {
      const CharField f = top_family_field(s0, j);
      if (f.nature != FieldNature::GenuinelyNonlinear) continue;
      ElementaryWave wave;
      wave.kind = WaveKind::Rarefaction;
      wave.field = f;
      wave.left = s0;
      wave.right = rarefaction_curve(s0, f, f.c > 0 ? 0.2 : -0.2).state;
      wave.speed_left = lambda_at(wave.left, f);
      wave.speed_right = lambda_at(wave.right, f);
      CHECK(wave.speed_left < wave.speed_right);
      CHECK(wave_table_check(wave).ok);
      // the reversed orientation is a compression, not a rarefaction
      std::swap(wave.left, wave.right);
      CHECK_FALSE(wave_table_check(wave).ok);
    }
  }
}

TEST_CASE("contact discontinuities") {
  std::mt19937_64 rng(36);
  const MomentState s = random_state(rng, 1, 4);
  const CharField zero = classify_field(s, 0.0);
  CHECK(contact_check(s, s, zero).ok);
  MomentState denser = s;
  denser.set_rho(1.3 * s.rho());
  denser.set_p(0, 0, s.p(0, 0));
  CHECK(contact_check(s, denser, zero).ok);
  MomentState faster = s;
  faster.set_u(0, s.u(0) + 0.1);
  CHECK_FALSE(contact_check(s, faster, zero).ok);

  // linearly degenerate field with c != 0: the integral curve leaves rho, u1, p11 fixed
  const MomentState s2 = random_state(rng, 2, 4);
  const CharField f = classify_field(s2, hermite_roots(4).back());
  REQUIRE(f.nature == FieldNature::LinearlyDegenerate);
  CHECK(field_eigenvector(s2, f)(0) == 0.0);
  const RarefactionResult r = rarefaction_curve(s2, f, 0.4);
  CHECK(r.closed_form_gap < 1e-10);
  CHECK((r.state.w() - s2.w()).cwiseAbs().maxCoeff() > 1e-3);
  CHECK(contact_check(s2, r.state, f).ok);
  ElementaryWave wave;
  wave.kind = WaveKind::Contact;
  wave.field = f;
  wave.left = s2;
  wave.right = r.state;
  CHECK(wave_table_check(wave).ok);
}

TEST_CASE("equal densities admit no shock") {
  std::mt19937_64 rng(37);
  const MomentState a = random_state(rng, 1, 3);
  MomentState b = a;
  b.set_u(0, a.u(0) + 0.2);
  CHECK_THROWS_AS(mass_balance_speed(a, b), DomainError);
  const CharField f = top_family_field(a, 4);
  for (double S : {-2.0, 0.0, 0.7, 3.0}) {
    const ShockReport rep = shock_check(to_conserved(a), to_conserved(b), S, f, 1, 3);
    CHECK(rep.conservative_residual > 0.1 * a.rho());
  }
}

TEST_CASE("Euler-limit shocks satisfy the jump conditions and the table") {
  const double gamma = 3.0;
  for (const int family : {-1, 1}) {
    for (const double ratio : {1.5, 3.0, 10.0}) {
      const auto sh = hypermoment::testing::euler_shock({1.0, 0.2, 1.0}, ratio, family, gamma);
      const MomentState L = euler_state(sh.left), R = euler_state(sh.right);
      const CharField f = top_family_field(L, family > 0 ? 3 : 1);
      REQUIRE(f.nature == FieldNature::GenuinelyNonlinear);
      const ShockReport rep = shock_check(to_conserved(L), to_conserved(R), sh.speed, f, 1, 2);
      CHECK(rep.conservative_residual < 1e-10);
      CHECK(rep.nonconservative_residual < 1e-10);
      CHECK(rep.entropy_ok);
      CHECK(rep.density_pressure_product > 0.0);
      CHECK(mass_balance_speed(L, R) == doctest::Approx(sh.speed).epsilon(1e-12));
      ElementaryWave wave;
      wave.kind = WaveKind::Shock;
      wave.field = f;
      wave.left = L;
      wave.right = R;
      wave.speed_left = wave.speed_right = sh.speed;
      CHECK(wave_table_check(wave).ok);
    }
  }
}

TEST_CASE("Hugoniot states of the moment system") {
  std::mt19937_64 rng(38);
  struct Case {
    int D, M;
  };
  for (const Case cs : {Case{1, 2}, Case{1, 3}, Case{1, 4}, Case{1, 5}, Case{2, 3}}) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(cs.D);
    u(0) = 0.1;
    MomentState left = equilibrium(cs.D, cs.M, 1.0, u, 1.0);
    // a little non-equilibrium on the left
    if (cs.M >= 3) left.set_f(MultiIndex::unit(cs.D, 0).shifted(0, 2), 0.02);
    for (const int j : {1, cs.M + 1}) {
      const CharField f = top_family_field(left, j);
      const double rho_right = f.c > 0 ? 0.8 : 1.25;  // compressive orientation
      const HugoniotResult h = hugoniot_state(left, f, rho_right, 32, 1e-12);
      const Eigen::VectorXd FL = to_conserved(left), FR = to_conserved(h.right);
      const ShockReport rep = shock_check(FL, FR, h.speed, f, cs.D, cs.M, 32);
      CHECK(rep.conservative_residual < 1e-10);
      CHECK(rep.nonconservative_residual < 1e-10);
      CHECK(rep.entropy_ok);
      CHECK(rep.density_pressure_product > 0.0);
      CHECK(h.speed == doctest::Approx(mass_balance_speed(left, h.right)).epsilon(1e-9));
      ElementaryWave wave;
      wave.kind = WaveKind::Shock;
      wave.field = f;
      wave.left = left;
      wave.right = h.right;
      wave.speed_left = wave.speed_right = h.speed;
      CHECK(wave_table_check(wave).ok);
      // conservative rows do not depend on the path quadrature
      const ShockReport coarse = shock_check(FL, FR, h.speed, f, cs.D, cs.M, 2);
      CHECK(std::abs(coarse.conservative_residual - rep.conservative_residual) < 1e-12);
    }
  }
}

TEST_CASE("top-row path residual converges as the quadrature is refined") {
  std::mt19937_64 rng(39);
  const MomentState a = random_state(rng, 1, 4, 0.2);
  const MomentState b = random_state(rng, 1, 4, 0.2);
  const Eigen::VectorXd FL = to_conserved(a), FR = to_conserved(b);
  const Eigen::VectorXd ref = path_fluctuation(FL, FR, 1, 4, 64);
  double last = 1e300;
  for (int pts : {1, 2, 4, 8}) {
    const double err = (path_fluctuation(FL, FR, 1, 4, pts) - ref).cwiseAbs().maxCoeff();
    CHECK(err <= last);
    last = err;
  }
  CHECK(last < 1e-10);
}

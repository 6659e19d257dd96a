#include <doctest.h>

#include <cmath>
#include <numbers>

#include "skewmix/accessibility.hpp"
#include "skewmix/dolgopyat.hpp"

using namespace skewmix;
using cd = std::complex<double>;

TEST_CASE("bump profile is C^1 with the right plateau and support") {
  const double w = 0.2;
  CHECK(bump_profile(0.0, w) == 1.0);
  CHECK(bump_profile(0.1, w) == doctest::Approx(1.0));
  CHECK(bump_profile(0.2, w) == 0.0);
  CHECK(bump_profile(0.25, w) == 0.0);
  const double h = 1e-7;
  for (double d : {0.1 + 2e-7, 0.2 - 2e-7}) {
    const double slope = (bump_profile(d + h, w) - bump_profile(d - h, w)) / (2 * h);
    CHECK(std::abs(slope) < 1e-3);
  }
  for (double d = 0.101; d < 0.2; d += 0.01) {
    CHECK(bump_profile(d, w) < 1.0);
    CHECK(bump_profile(d, w) > 0.0);
    CHECK(bump_profile(d + 0.001, w) <= bump_profile(d, w));
  }
}

TEST_CASE("dolgopyat factor and its cap") {
  CHECK(dolgopyat_factor(0.5, 0.1, 9.0, 1.0) == doctest::Approx(std::pow(0.5 * 0.1 * 10.0, 2) / 2048));
  CHECK(dolgopyat_factor(10.0, 1.0, 100.0, 3.0) == 0.25);
}

TEST_CASE("dolgopyat step on the accessible benchmark") {
  const auto m = ExpandingModel::doubling();
  const auto pot = Potential::constant(0);
  const auto st = rpf_solve(m, pot, 512);
  const auto coc = HolonomyCocycle::so2_angle(TrigSeries{0, {}, {1.0}});
  TwistedOperator op(m, st, pot, RoofFunction::standard(), coc, cd(st.pressure, 10.0), Irrep::so2(1));
  const auto cert = nli_certificate(m, coc, Irrep::so2(1), st.grid.points());
  REQUIRE(cert.eps_min > 0);
  const auto phi = Observable::scalar(Irrep::so2(1), st.grid, [](double u) { return std::polar(0.5, 2 * M_PI * u); });
  const Eigen::VectorXd control = Eigen::VectorXd::Ones(512);
  const auto plan = plan_dolgopyat(op, measured_class_constant(phi, control, st.grid), cert.eps_min, 8);
  CHECK(plan.delta <= 0.125);
  CHECK(plan.C * plan.delta <= dichotomy_constant(1.0) * (1 + 1e-12));
  const auto step = dolgopyat_step(op, phi, control, plan, cert.mask);
  CHECK(step.accepted);
  CHECK(step.domination_margin >= -1e-10);
  CHECK(step.l2_ratio < 1.0);
  CHECK(step.bumped > 0);
  CHECK(step.class_lipschitz <= plan.C * (1 + 1e-9));
}

TEST_CASE("mask size must match the grid") {
  const auto m = ExpandingModel::doubling();
  const auto pot = Potential::constant(0);
  const auto st = rpf_solve(m, pot, 128);
  TwistedOperator op(m, st, pot, RoofFunction::standard(), HolonomyCocycle::trivial(GroupKind::SO2),
                     cd(st.pressure, 1.0), Irrep::so2(1));
  const auto phi = Observable::scalar(Irrep::so2(1), st.grid, [](double) { return cd(0.5, 0); });
  DolgopyatParams p;
  p.delta = 0.05;
  p.eps = 0.1;
  p.C = 1.0;
  CHECK_THROWS(dolgopyat_step(op, phi, Eigen::VectorXd::Ones(128), p, std::vector<bool>(64, true)));
}

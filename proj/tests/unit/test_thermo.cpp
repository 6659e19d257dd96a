#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "skewmix/errors.hpp"
#include "skewmix/thermo.hpp"

using namespace skewmix;
constexpr double two_pi = 2.0 * std::numbers::pi;

// Oracle: leading eigenvalue of the Fourier matrix 2 I_{2m-k}(0.5) (or
// 3 I_{3m-k}(0.5) for tripling), |m|, |k| <= 60, computed with scipy.
constexpr double kDoublingHalfCos = 0.773494333730521;
constexpr double kDoublingUnitCos = 1.066665029853468;
constexpr double kTriplingHalfCos = 1.161403513799240;

TEST_CASE("pressure matches the Fourier-matrix oracle") {
  const auto m2 = ExpandingModel::doubling();
  CHECK(rpf_solve(m2, Potential::smooth(TrigSeries{0, {0.5}, {}}), 4096).pressure ==
        doctest::Approx(kDoublingHalfCos).epsilon(1e-11));
  CHECK(rpf_solve(m2, Potential::smooth(TrigSeries{0, {1.0}, {}}), 2048).pressure ==
        doctest::Approx(kDoublingUnitCos).epsilon(1e-10));
  CHECK(rpf_solve(ExpandingModel::tripling(), Potential::smooth(TrigSeries{0, {0.5}, {}}), 1024).pressure ==
        doctest::Approx(kTriplingHalfCos).epsilon(1e-10));
}

TEST_CASE("constant potential shifts the pressure") {
  const auto st = rpf_solve(ExpandingModel::doubling(), Potential::constant(0.25), 256);
  CHECK(st.pressure == doctest::Approx(std::log(2.0) + 0.25).epsilon(1e-12));
  CHECK((st.eigenfunction.array() - 1.0).abs().maxCoeff() < 1e-10);
}

TEST_CASE("grid size must be a power of two") {
  CHECK_THROWS(rpf_solve(ExpandingModel::doubling(), Potential::constant(0), 100));
  CHECK_THROWS(rpf_solve(ExpandingModel::doubling(), Potential::constant(0), 32));
}

TEST_CASE("eigen-data normalisation") {
  const auto st = rpf_solve(ExpandingModel::doubling(), Potential::smooth(TrigSeries{0, {0.5}, {}}), 512);
  CHECK(st.eigenfunction.mean() == doctest::Approx(1.0));
  CHECK(st.measure.sum() == doctest::Approx(1.0));
  CHECK(st.measure.minCoeff() > 0);
  CHECK(st.residual < 1e-11);
}

TEST_CASE("normalised operator fixes constants and preserves the measure") {
  const auto m = ExpandingModel::doubling();
  const auto pot = Potential::smooth(TrigSeries{0, {0.5}, {0.2}});
  const auto st = rpf_solve(m, pot, 1024);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(1024);
  CHECK((apply_normalised(m, pot, st, one) - one).cwiseAbs().maxCoeff() < 1e-10);
  Eigen::VectorXd f(1024);
  for (int j = 0; j < 1024; ++j) f[j] = std::sin(two_pi * st.grid.point(j)) + 0.3 * std::cos(6 * M_PI * st.grid.point(j));
  CHECK(std::abs(st.integrate(apply_normalised(m, pot, st, f)) - st.integrate(f)) < 1e-8);
}

TEST_CASE("normalised weight is conformal") {
  const auto m = ExpandingModel::doubling();
  const auto pot = Potential::smooth(TrigSeries{0, {0.5}, {}});
  const auto st = rpf_solve(m, pot, 1024);
  NormalizedWeight w(m, st, pot, RoofFunction::standard(), st.pressure);
  for (double u : {0.0, 0.123, 0.5, 0.987}) {
    std::complex<double> s = 0;
    for (int i = 0; i < 2; ++i) s += std::exp(w.at(m.branch_inverse(i, u), u));
    CHECK(std::abs(s - 1.0) < 1e-10);
  }
}

TEST_CASE("strip check") {
  CHECK_NOTHROW(check_strip({0.5, 100.0}, 0.7));
  CHECK_THROWS_AS(check_strip({2.0, 0.0}, 0.7), DomainError);
}

TEST_CASE("uniform measure on the doubling map") {
  const auto st = rpf_solve(ExpandingModel::doubling(), Potential::constant(0), 1024);
  CHECK(ball_measure(st, 0.3, 0.1) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(ball_measure(st, 0.02, 0.05) == doctest::Approx(0.1).epsilon(1e-12));
  const auto rep = doubling_check(st, {2.0}, {1.0 / 16, 1.0 / 64});
  CHECK(rep.max_ratio == doctest::Approx(2.0).epsilon(1e-9));
  CHECK_FALSE(rep.unbounded_growth);
}

TEST_CASE("sampled Hoelder norm of sqrt|u - 1/2|") {
  // sup = sqrt(1/2), seminorm 1 attained at u = 1/2.
  const double n = sampled_holder_norm([](double u) { return std::sqrt(std::abs(u - 0.5)); }, 0.5, 1024);
  CHECK(n == doctest::Approx(1.0 + std::sqrt(0.5)).epsilon(1e-3));
}

TEST_CASE("mollification of a smooth potential converges quickly") {
  const auto pot = Potential::smooth(TrigSeries{0, {0.5}, {}});
  const auto rep = smooth_potential(pot, 1e4);
  CHECK(rep.width == doctest::Approx(1e-2));
  CHECK(rep.sup_error < 1e-3);
}

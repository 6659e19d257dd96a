#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "skewmix/accessibility.hpp"
#include "skewmix/correlation.hpp"
#include "skewmix/lemmas.hpp"
#include "skewmix/transfer.hpp"

using namespace skewmix;
using cd = std::complex<double>;
constexpr double two_pi = 2.0 * std::numbers::pi;

namespace {

AlgebraElement random_algebra(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> nd;
  return AlgebraElement::su2(scale * nd(rng), scale * nd(rng), scale * nd(rng));
}

TrigSeries random_series(std::mt19937_64& rng, int modes, double scale) {
  std::normal_distribution<double> nd;
  TrigSeries s;
  for (int k = 0; k < modes; ++k) {
    s.cos_coeffs.push_back(scale * nd(rng) / (k + 1));
    s.sin_coeffs.push_back(scale * nd(rng) / (k + 1));
  }
  return s;
}

}  // namespace

TEST_CASE("property: exp and log are inverse below the cut locus") {
  std::mt19937_64 rng(101);
  for (int k = 0; k < 200; ++k) {
    const auto x = random_algebra(rng, 0.8);
    if (x.norm() > 6.0) continue;
    CHECK((group::log(group::exp(x)).coords - x.coords).norm() < 1e-10);
  }
}

TEST_CASE("property: Ad is an orthogonal homomorphism preserving the bracket") {
  std::mt19937_64 rng(102);
  for (int k = 0; k < 100; ++k) {
    const auto g = group::haar_sample(GroupKind::SU2, rng);
    const auto h = group::haar_sample(GroupKind::SU2, rng);
    const Eigen::MatrixXd ag = group::adjoint_matrix(g);
    CHECK((ag.transpose() * ag - Eigen::Matrix3d::Identity()).norm() < 1e-12);
    CHECK((group::adjoint_matrix(g * h) - ag * group::adjoint_matrix(h)).norm() < 1e-12);
    const auto x = random_algebra(rng, 1.0), y = random_algebra(rng, 1.0);
    const auto lhs = group::adjoint(g, group::bracket(x, y));
    const auto rhs = group::bracket(group::adjoint(g, x), group::adjoint(g, y));
    CHECK((lhs.coords - rhs.coords).norm() < 1e-12);
  }
}

TEST_CASE("property: irreps are unitary homomorphisms") {
  std::mt19937_64 rng(103);
  for (int two_j = 1; two_j <= 6; ++two_j) {
    const Irrep rho = Irrep::su2_twice_spin(two_j);
    for (int k = 0; k < 10; ++k) {
      const auto g = group::haar_sample(GroupKind::SU2, rng);
      const auto h = group::haar_sample(GroupKind::SU2, rng);
      const Eigen::MatrixXcd rg = irrep_matrix(rho, g);
      CHECK((rg * rg.adjoint() - Eigen::MatrixXcd::Identity(rho.dim(), rho.dim())).norm() < 1e-11);
      CHECK((irrep_matrix(rho, g * h) - rg * irrep_matrix(rho, h)).norm() < 1e-11);
    }
  }
}

TEST_CASE("property: Parseval on SU2") {
  std::mt19937_64 rng(104);
  const auto quad = HaarQuadrature::euler(12, 12, 24);
  for (int k = 0; k < 5; ++k) {
    const auto a = random_algebra(rng, 1.0);
    const auto samples = quad.sample([&](const GroupElement& g) {
      const auto& q = g.quaternion();
      return cd(q[0] * a.coords[0] + q[1] * q[2] * a.coords[1] + q[3] * q[3] * q[0] * a.coords[2], 0.0);
    });
    const auto pw = peter_weyl(quad, samples, 6);
    CHECK(pw.captured_norm == doctest::Approx(pw.l2_norm).epsilon(1e-10));
  }
}

TEST_CASE("property: flow is additive in time") {
  std::mt19937_64 rng(105);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto m = ExpandingModel::doubling();
  const auto roof = RoofFunction::standard();
  const auto c = HolonomyCocycle::su2_exp(TrigSeries{0, {0.7}, {}}, TrigSeries{0, {}, {0.5}}, TrigSeries{});
  for (int k = 0; k < 50; ++k) {
    SuspensionPoint p;
    p.u = unit(rng);
    p.s = unit(rng) * roof(p.u);
    p.g = group::haar_sample(GroupKind::SU2, rng);
    const double s = 3.0 * unit(rng), t = 3.0 * unit(rng);
    const auto a = flow(flow(p, s, m, roof, c), t, m, roof, c);
    const auto b = flow(p, s + t, m, roof, c);
    CHECK(std::abs(a.u - b.u) < 1e-9);
    CHECK(std::abs(a.s - b.s) < 1e-9);
    CHECK((a.g.quaternion() - b.g.quaternion()).norm() < 1e-9);
  }
}

TEST_CASE("property: holonomy products split along a past") {
  std::mt19937_64 rng(106);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto m = ExpandingModel::from_lengths({0.3, 0.7});
  const auto c = HolonomyCocycle::su2_exp(random_series(rng, 2, 0.5), random_series(rng, 2, 0.5), random_series(rng, 2, 0.5));
  for (int k = 0; k < 30; ++k) {
    ConsistentPast p;
    for (int j = 0; j < 7; ++j) p.branches.push_back(unit(rng) < 0.5 ? 0 : 1);
    const double u = unit(rng);
    const int split = 1 + static_cast<int>(unit(rng) * 5);
    const auto whole = holonomy_product(m, c, p, u);
    const auto first = holonomy_product(m, c, p.head(split), u);
    const auto rest = holonomy_product(m, c, p.tail(split), p.head(split).point(m, u));
    CHECK((whole.quaternion() - (first * rest).quaternion()).norm() < 1e-12);
  }
}

TEST_CASE("property: conformality for random potentials") {
  std::mt19937_64 rng(107);
  const auto m = ExpandingModel::tripling();
  for (int k = 0; k < 5; ++k) {
    const auto pot = Potential::smooth(random_series(rng, 3, 0.3));
    const auto st = rpf_solve(m, pot, 512);
    NormalizedWeight w(m, st, pot, RoofFunction::standard(), st.pressure);
    for (int j = 0; j < 512; j += 37) {
      const double u = st.grid.point(j);
      cd s = 0;
      for (int i = 0; i < 3; ++i) s += std::exp(w.at(m.branch_inverse(i, u), u));
      CHECK(std::abs(s - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("property: twisted operator is dominated by its modulus") {
  std::mt19937_64 rng(108);
  const auto m = ExpandingModel::doubling();
  const auto pot = Potential::smooth(TrigSeries{0, {0.5}, {}});
  const auto st = rpf_solve(m, pot, 256);
  const auto c = HolonomyCocycle::so2_angle(TrigSeries{0, {}, {1.0}});
  for (double im : {0.0, 3.0, 30.0}) {
    TwistedOperator op(m, st, pot, RoofFunction::standard(), c, cd(st.pressure, im), Irrep::so2(2));
    const auto s = random_series(rng, 3, 1.0);
    const auto phi = Observable::scalar(Irrep::so2(2), st.grid, [&](double u) { return cd(s.value(u), 0.3); });
    const Eigen::VectorXd bound = op.apply_modulus(phi.pointwise_norms());
    const Eigen::VectorXd got = op.apply(phi).pointwise_norms();
    CHECK(((got - bound).array() <= 1e-8).all());
  }
}

TEST_CASE("property: cancellation bound on random separated pairs") {
  std::mt19937_64 rng(109);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < 2000; ++k) {
    const double eps = 0.05 + 1.9 * unit(rng);
    const auto [v, w] = random_separated_pair(rng, 4, eps);
    CHECK((v / v.norm() - w / w.norm()).norm() >= eps);
    CHECK(cancellation_bound(v, w, eps).holds);
  }
}

TEST_CASE("property: dichotomy fixtures meet the hypotheses and never violate") {
  std::mt19937_64 rng(110);
  const auto m = ExpandingModel::doubling();
  const PeriodicGrid grid(512);
  int upper = 0, lower = 0;
  for (int k = 0; k < 100; ++k) {
    const auto c = random_dichotomy_case(rng, grid, m);
    const auto rep = dichotomy_check(c.phi, c.control, grid, m, c.C, c.delta, c.past, c.center);
    CHECK_FALSE(rep.precondition_breach);
    CHECK(rep.outcome != Dichotomy::Violation);
    CHECK(rep.pullback_lipschitz <= rep.lipschitz_bound);
    upper += rep.outcome == Dichotomy::Upper;
    lower += rep.outcome == Dichotomy::Lower;
  }
  CHECK(upper > 0);
  CHECK(lower > 0);
}

TEST_CASE("property: Haar averaging kills fibre-only observables") {
  const auto m = ExpandingModel::doubling();
  const auto roof = RoofFunction::standard();
  const auto c = HolonomyCocycle::so2_angle(TrigSeries{0, {}, {1.0}});
  const auto st = rpf_solve(m, Potential::constant(0), 256);
  auto fibre = product_observable(TrigSeries{1.0, {0.5}, {}}, GroupKind::SO2, 1);
  SuspensionObservable base;
  base.value = [&](double u, const GroupElement&, double) { return std::cos(two_pi * u) / roof(u); };
  base.c1_norm = 10.0;
  const auto quad = HaarQuadrature::circle(32);
  certify_mean_zero(fibre, st, roof, quad);
  certify_mean_zero(base, st, roof, quad);
  CorrelationSetup setup;
  setup.observables = {fibre, base};
  for (int i = 0; i <= 8; ++i) setup.time_points.push_back({0.5 * i});
  setup.samples = 40000;
  const auto s = correlate(m, roof, c, st, setup);
  for (std::size_t i = 0; i < s.beta.size(); ++i) CHECK(std::abs(s.beta[i]) <= 4.0 * s.std_error[i] + 1e-12);
}

TEST_CASE("property: transitivity spaces are gauge-equivariant") {
  const auto m = ExpandingModel::doubling();
  const auto c = HolonomyCocycle::su2_exp(TrigSeries{}, TrigSeries{}, TrigSeries{0, {}, {1.0}});
  const Gauge g = constant_gauge(group::exp(AlgebraElement::su2(0.3, -0.5, 0.9)));
  TransitivityOptions opt;
  opt.depth = 40;
  const auto rep = gauge_equivariance(m, c, g, {0.1, 0.45, 0.8}, opt);
  CHECK(rep.max_distance < 1e-6);
}

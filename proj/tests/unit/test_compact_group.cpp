#include <doctest.h>

#include <cmath>
#include <numbers>

#include "skewmix/compact_group.hpp"
#include "skewmix/errors.hpp"

using namespace skewmix;
using cd = std::complex<double>;

TEST_CASE("so2 arithmetic") {
  const auto g = GroupElement::rotation(1.0);
  const auto h = GroupElement::rotation(5.5);
  CHECK((g * h).angle() == doctest::Approx(6.5 - 2 * std::numbers::pi));
  CHECK(group::inverse(g).angle() == doctest::Approx(2 * std::numbers::pi - 1.0));
  CHECK(group::log(h).coords[0] == doctest::Approx(5.5 - 2 * std::numbers::pi));
  CHECK(group::exp(AlgebraElement::so2(0.3)).angle() == doctest::Approx(0.3));
}

TEST_CASE("su2 matrix agrees with the quaternion product") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const auto g = group::haar_sample(GroupKind::SU2, rng);
    const auto h = group::haar_sample(GroupKind::SU2, rng);
    const Eigen::Matrix2cd prod = g.su2_matrix() * h.su2_matrix();
    CHECK((prod - (g * h).su2_matrix()).norm() < 1e-13);
    CHECK((g.su2_matrix().adjoint() * g.su2_matrix() - Eigen::Matrix2cd::Identity()).norm() < 1e-13);
  }
}

TEST_CASE("su2 exp rotates by |X| under Ad") {
  const auto x = AlgebraElement::su2(0.0, 0.0, 0.7);
  const auto g = group::exp(x);
  const Eigen::MatrixXd ad = group::adjoint_matrix(g);
  // Ad_g is a rotation by 0.7 about the third axis.
  CHECK(ad(0, 0) == doctest::Approx(std::cos(0.7)));
  CHECK(ad(2, 2) == doctest::Approx(1.0));
  CHECK(std::abs(ad(1, 0)) == doctest::Approx(std::sin(0.7)));
}

TEST_CASE("su2 log at -I is a domain error") {
  const auto minus = GroupElement::from_quaternion(Eigen::Vector4d(-1, 0, 0, 0));
  CHECK_THROWS_AS(group::log(minus), DomainError);
}

TEST_CASE("bracket is the cross product in the su2 basis") {
  const auto e1 = AlgebraElement::su2(1, 0, 0);
  const auto e2 = AlgebraElement::su2(0, 1, 0);
  const auto b = group::bracket(e1, e2);
  CHECK(b.coords[2] == doctest::Approx(1.0));
  CHECK(std::abs(b.coords[0]) < 1e-15);
}

TEST_CASE("representation norms") {
  CHECK(rep_norm(Irrep::so2(-3)) == 3.0);
  CHECK(rep_norm(Irrep::su2_twice_spin(3)) == 1.5);
  CHECK(rep_norm_on_mesh(Irrep::su2_twice_spin(4), 200) == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("spin-1/2 irrep is the defining representation up to conjugation") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 10; ++k) {
    const auto g = group::haar_sample(GroupKind::SU2, rng);
    const cd a = irrep_matrix(Irrep::su2_twice_spin(1), g).trace();
    const cd b = g.su2_matrix().trace();
    CHECK(std::abs(a - b) < 1e-12);
  }
}

TEST_CASE("spin-1 character is 1 + 2 cos(theta)") {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 10; ++k) {
    const auto g = group::haar_sample(GroupKind::SU2, rng);
    const double theta = 2.0 * std::acos(std::clamp(g.quaternion()[0], -1.0, 1.0));
    const cd chi = irrep_matrix(Irrep::su2_twice_spin(2), g).trace();
    CHECK(chi.real() == doctest::Approx(1.0 + 2.0 * std::cos(theta)).epsilon(1e-12));
    CHECK(std::abs(chi.imag()) < 1e-12);
  }
}

TEST_CASE("derived representation matches the derivative of irrep_matrix") {
  const Irrep rho = Irrep::su2_twice_spin(3);
  const auto x = AlgebraElement::su2(0.3, -0.4, 0.5);
  const double h = 1e-6;
  const Eigen::MatrixXcd fd =
      (irrep_matrix(rho, group::exp(x * h)) - irrep_matrix(rho, group::exp(x * (-h)))) / (2 * h);
  CHECK((fd - derived_rep(rho, x)).norm() < 1e-8);
}

TEST_CASE("Peter-Weyl on the circle recovers Bessel coefficients") {
  // exp(a cos theta) = I_0(a) + 2 sum I_n(a) cos(n theta)
  const double a = 0.8;
  const auto quad = HaarQuadrature::circle(64);
  const auto samples = quad.sample([&](const GroupElement& g) { return cd(std::exp(a * std::cos(g.angle())), 0); });
  const auto pw = peter_weyl(quad, samples, 8);
  for (const auto& iv : pw.components) {
    const int n = std::abs(iv.irrep.label);
    CHECK(iv.coefficients(0, 0).real() == doctest::Approx(std::cyl_bessel_i(n, a)).epsilon(1e-12));
  }
  CHECK(pw.truncated == false);
}

TEST_CASE("Peter-Weyl on SU2 isolates a character") {
  const auto quad = HaarQuadrature::euler(8, 8, 16);
  const Irrep spin1 = Irrep::su2_twice_spin(2);
  const auto samples = quad.sample([&](const GroupElement& g) { return irrep_matrix(spin1, g).trace(); });
  const auto pw = peter_weyl(quad, samples, 4);
  for (const auto& iv : pw.components) {
    if (iv.irrep == spin1) {
      CHECK(iv.l2_norm() == doctest::Approx(1.0).epsilon(1e-12));
    } else {
      CHECK(iv.l2_norm() < 1e-12);
    }
  }
  CHECK(pw.l2_norm == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("reconstruct inverts the decomposition for band-limited functions") {
  const auto quad = HaarQuadrature::euler(8, 8, 16);
  auto f = [](const GroupElement& g) {
    const auto& q = g.quaternion();
    return cd(q[0] * q[0] - 0.3 * q[1] + q[2] * q[3], 0.0);
  };
  const auto samples = quad.sample(f);
  const auto pw = peter_weyl(quad, samples, 4);
  std::mt19937_64 rng(9);
  for (int k = 0; k < 5; ++k) {
    const auto g = group::haar_sample(GroupKind::SU2, rng);
    CHECK(std::abs(reconstruct(pw.components, g) - f(g)) < 1e-12);
  }
}

TEST_CASE("C^n norm of a circle character") {
  const auto quad = HaarQuadrature::circle(128);
  auto f = [](const GroupElement& g) { return std::cos(3 * g.angle()); };
  CHECK(cn_norm(f, 0, quad) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(cn_norm(f, 1, quad) == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(cn_norm(f, 2, quad) == doctest::Approx(13.0).epsilon(1e-4));
}

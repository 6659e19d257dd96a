#include "skewmix/dolgopyat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "skewmix/errors.hpp"

namespace skewmix {

using cd = std::complex<double>;

namespace {

double circle_distance(double a, double b) {
  const double d = std::abs(a - b);
  return std::min(d, 1.0 - d);
}

struct Term {
  cd weight;
  double modulus = 0.0;
  double modulus_at_p = 0.0;
  Eigen::VectorXcd twisted;  // rho(Hol) phi(preimage), flattened
  double control = 0.0;
};

}  // namespace

double dolgopyat_factor(double eps, double delta, double im_z, double rep_norm) {
  const double q = eps * delta * (1.0 + std::abs(im_z)) * rep_norm;
  return std::min(q * q / 2048.0, 0.25);
}

double bump_profile(double d, double w) {
  if (d <= 0.5 * w) return 1.0;
  if (d >= w) return 0.0;
  const double t = 2.0 * d / w - 1.0;
  return std::exp(1.0 + 1.0 / (t * t - 1.0));
}

double measured_class_constant(const Observable& phi, const Eigen::VectorXd& control, const PeriodicGrid& grid) {
  const Eigen::VectorXd dlog = grid.derivative(control.array().log().matrix());
  const Eigen::VectorXd dphi = derivative_norms(phi, grid);
  return std::max(dlog.cwiseAbs().maxCoeff(), (dphi.array() / control.array()).maxCoeff());
}

double budget_constant(const TwistedOperator& op, int n) {
  const auto& b = op.model().bounds();
  const double scale = (1.0 + std::abs(op.z().imag())) * op.rep_norm();
  if (scale <= 0.0) return std::numeric_limits<double>::infinity();
  const BudgetReport parts = uniform_c_budget(op, 0.0, n);
  return 1.1 * (parts.weight_term + parts.holonomy_term) / (scale * (1.0 - 1.0 / (b.f * std::pow(b.kappa, n))));
}

DolgopyatParams plan_dolgopyat(const TwistedOperator& op, double C, double eps, int cap) {
  const auto& b = op.model().bounds();
  int n_trunc = 1;
  while (n_trunc < cap &&
         2.0 * op.cocycle().c1_norm / (b.f * (b.kappa - 1.0) * std::pow(b.kappa, n_trunc)) > eps / 2.0) {
    ++n_trunc;
  }
  DolgopyatParams p;
  p.C = std::max(C, budget_constant(op, n_trunc));
  p.eps = eps;
  p.delta = std::min(dichotomy_constant(b.f) / p.C, 0.125);
  const auto n0 = choose_step_depth(op, p.C, eps, cap);
  p.n0 = n0 ? *n0 : cap;
  return p;
}

DolgopyatStep dolgopyat_step(const TwistedOperator& op, const Observable& phi, const Eigen::VectorXd& control,
                             const DolgopyatParams& params, const std::vector<bool>& lni_mask) {
  const auto& grid = op.grid();
  const auto& state = op.state();
  const int n = grid.size();
  if (static_cast<int>(lni_mask.size()) != n) throw std::invalid_argument("mask size differs from grid");
  if (!(phi.irrep == op.irrep())) throw IrrepMismatch("observable irrep does not match operator irrep");
  if (!(params.s > 0.0 && params.s < 1.0)) throw std::invalid_argument("shrink factor must lie in (0, 1)");

  DolgopyatStep out;
  const int d = phi.dim();
  const int cols = static_cast<int>(phi.values.cols());
  const double shift = op.z().real() - state.pressure;

  // Path terms at every grid point.
  const auto pasts = enumerate_pasts(op.model(), params.n0);
  const int np = static_cast<int>(pasts.size());
  std::vector<std::vector<Term>> terms(n);
  for (int j = 0; j < n; ++j) {
    const double u = grid.point(j);
    const auto pt = op.path_terms(u, params.n0);
    terms[j].resize(np);
    for (int p = 0; p < np; ++p) {
      Term& t = terms[j][p];
      const Stencil s = grid.stencil(pt[p].preimage);
      Eigen::RowVectorXcd row = Eigen::RowVectorXcd::Zero(cols);
      for (int k = 0; k < 4; ++k) row += s.weight[k] * phi.values.row(s.index[k]);
      const Eigen::Map<const Eigen::MatrixXcd> blk(row.data(), d, phi.multiplicity);
      const Eigen::MatrixXcd tw = pt[p].twist * blk;
      t.twisted = Eigen::Map<const Eigen::VectorXcd>(tw.data(), cols);
      t.weight = pt[p].weight;
      t.modulus = std::abs(t.weight);
      t.modulus_at_p =
          shift == 0.0 ? t.modulus : t.modulus * std::exp(shift * birkhoff_roof(op.model(), op.roof(), pt[p].past, u));
      t.control = std::max(grid.interpolate(control, s), 0.0);
    }
  }

  const double root_d = std::sqrt(static_cast<double>(d));
  out.phi_next = phi;
  Eigen::VectorXd base(n), base_p(n);
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(cols);
    double b = 0.0, bp = 0.0;
    for (const auto& t : terms[j]) {
      acc += t.weight * t.twisted;
      b += t.modulus * t.control;
      bp += t.modulus_at_p * t.control;
    }
    out.phi_next.values.row(j) = acc.transpose();
    base[j] = b;
    base_p[j] = bp;
  }

  // Balls inside the certified set, centres 2 delta apart.
  const double delta = params.delta;
  out.factor = op.irrep().trivial() ? 0.0 : dolgopyat_factor(params.eps, delta, op.z().imag(), op.rep_norm());
  double lni = 0.0;
  for (int j = 0; j < n; ++j) {
    if (lni_mask[j]) lni += state.measure[j];
  }
  out.lni_measure = lni;

  Eigen::VectorXd reduction = Eigen::VectorXd::Zero(n), reduction_p = Eigen::VectorXd::Zero(n);
  if (out.factor > 0.0) {
    const int reach = static_cast<int>(std::ceil(delta / grid.step()));
    for (int j = 0; j < n; ++j) {
      const double x = grid.point(j);
      if (!lni_mask[j]) continue;
      bool inside = true;
      for (int k = -reach; k <= reach && inside; ++k) {
        const int jj = ((j + k) % n + n) % n;
        if (circle_distance(grid.point(jj), x) <= delta) inside = lni_mask[jj];
      }
      if (!inside) continue;
      bool apart = true;
      for (double c : out.centers) apart = apart && circle_distance(c, x) >= 2.0 * delta;
      if (!apart) continue;
      out.centers.push_back(x);
    }
    out.balls = static_cast<int>(out.centers.size());
    const double c = out.factor;
    const double w = params.s * delta;
    for (double y : out.centers) {
      std::vector<int> ball;
      for (int k = -reach; k <= reach; ++k) {
        const int jj = ((static_cast<int>(std::lround(y * n)) + k) % n + n) % n;
        if (circle_distance(grid.point(jj), y) < w) ball.push_back(jj);
      }
      if (ball.empty()) continue;
      int chosen = -1;
      for (int p1 = 0; p1 < np && chosen < 0; ++p1) {
        for (int p2 = 0; p2 < np && chosen < 0; ++p2) {
          if (p1 == p2) continue;
          bool ok = true;
          for (int jj : ball) {
            const Term& a = terms[jj][p1];
            const Term& b = terms[jj][p2];
            const double lhs = (a.weight * a.twisted + b.weight * b.twisted).norm() / root_d;
            const double rhs = (1.0 - c) * a.modulus * a.control + b.modulus * b.control;
            if (!(lhs <= rhs)) {
              ok = false;
              break;
            }
          }
          if (ok) chosen = p1;
        }
      }
      if (chosen < 0) continue;
      ++out.bumped;
      for (int jj : ball) {
        const double eta = c * bump_profile(circle_distance(grid.point(jj), y), w);
        const Term& a = terms[jj][chosen];
        reduction[jj] += eta * a.modulus * a.control;
        reduction_p[jj] += eta * a.modulus_at_p * a.control;
      }
    }
  }
  out.control_next = base - reduction;
  const Eigen::VectorXd control_p = base_p - reduction_p;

  // Pointwise domination.
  out.accepted = true;
  out.domination_margin = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    const double lhs = out.phi_next.norm_at(j);
    const double rhs = out.control_next[j];
    const double margin = rhs > 0 ? (rhs - lhs) / rhs : -std::numeric_limits<double>::infinity();
    if (margin < out.domination_margin) {
      out.domination_margin = margin;
      if (margin < -1e-10 && out.accepted) {
        out.accepted = false;
        out.reason = "domination fails";
        out.witness = grid.point(j);
      }
    }
  }

  double num = 0.0, den = 0.0;
  for (int j = 0; j < n; ++j) {
    num += state.measure[j] * control_p[j] * control_p[j];
    den += state.measure[j] * control[j] * control[j];
  }
  out.l2_ratio = std::sqrt(num / den);
  out.bound = 1.0 - params.r * out.factor * lni;
  if (out.factor > 0.0 && lni > 0.0) out.r_implied = (1.0 - out.l2_ratio) / (out.factor * lni);

  if ((out.control_next.array() > 0.0).all()) {
    out.class_lipschitz = grid.derivative(out.control_next.array().log().matrix()).cwiseAbs().maxCoeff();
    out.derivative_ratio = (derivative_norms(out.phi_next, grid).array() / out.control_next.array()).maxCoeff();
  } else {
    out.accepted = false;
    out.reason = "control function lost positivity";
  }
  return out;
}

}  // namespace skewmix

#include "skewmix/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "skewmix/errors.hpp"

namespace skewmix {

using cd = std::complex<double>;

// ---------------------------------------------------------------------------
// Observable

Eigen::MatrixXcd Observable::block(int j) const {
  const int d = dim();
  Eigen::MatrixXcd b(d, multiplicity);
  for (int c = 0; c < multiplicity; ++c) {
    for (int r = 0; r < d; ++r) b(r, c) = values(j, c * d + r);
  }
  return b;
}

void Observable::set_block(int j, const Eigen::MatrixXcd& b) {
  const int d = dim();
  for (int c = 0; c < multiplicity; ++c) {
    for (int r = 0; r < d; ++r) values(j, c * d + r) = b(r, c);
  }
}

double Observable::norm_at(int j) const {
  return values.row(j).norm() / std::sqrt(static_cast<double>(dim()));
}

Eigen::VectorXd Observable::pointwise_norms() const {
  Eigen::VectorXd out(values.rows());
  for (Eigen::Index j = 0; j < values.rows(); ++j) out[j] = norm_at(static_cast<int>(j));
  return out;
}

Observable Observable::from_function(const Irrep& rho, const PeriodicGrid& grid, int multiplicity,
                                     const std::function<Eigen::MatrixXcd(double)>& f) {
  Observable o;
  o.irrep = rho;
  o.multiplicity = multiplicity;
  o.values.resize(grid.size(), rho.dim() * multiplicity);
  for (int j = 0; j < grid.size(); ++j) o.set_block(j, f(grid.point(j)));
  return o;
}

Observable Observable::scalar(const Irrep& rho, const PeriodicGrid& grid,
                              const std::function<cd(double)>& f) {
  if (rho.dim() != 1) throw std::invalid_argument("scalar observable needs a one-dimensional irrep");
  Observable o;
  o.irrep = rho;
  o.values.resize(grid.size(), 1);
  for (int j = 0; j < grid.size(); ++j) o.values(j, 0) = f(grid.point(j));
  return o;
}

double l2_norm(const Observable& phi, const EquilibriumState& state) {
  double acc = 0.0;
  for (int j = 0; j < state.grid.size(); ++j) acc += state.measure[j] * std::pow(phi.norm_at(j), 2);
  return std::sqrt(acc);
}

Eigen::VectorXd derivative_norms(const Observable& phi, const PeriodicGrid& grid) {
  const Eigen::MatrixXcd d = grid.derivative_rows(phi.values);
  Eigen::VectorXd out(grid.size());
  const double s = std::sqrt(static_cast<double>(phi.dim()));
  for (int j = 0; j < grid.size(); ++j) out[j] = d.row(j).norm() / s;
  return out;
}

double c1_norm(const Observable& phi, const PeriodicGrid& grid) {
  return phi.pointwise_norms().maxCoeff() + derivative_norms(phi, grid).maxCoeff();
}

// ---------------------------------------------------------------------------
// TwistedOperator

TwistedOperator::TwistedOperator(const ExpandingModel& model, const EquilibriumState& state,
                                 Potential potential, RoofFunction roof, HolonomyCocycle cocycle,
                                 cd z, Irrep rho)
    : model_(&model),
      state_(&state),
      potential_(std::move(potential)),
      roof_(std::move(roof)),
      cocycle_(std::move(cocycle)),
      rho_(rho),
      weight_(model, state, potential_, roof_, z) {
  if (rho.kind != cocycle_.kind) throw IrrepMismatch("irrep and cocycle live on different groups");
  const auto& grid = state.grid;
  legs_.reserve(static_cast<std::size_t>(grid.size()) * model.branch_count());
  for (int j = 0; j < grid.size(); ++j) {
    const double u = grid.point(j);
    for (int i = 0; i < model.branch_count(); ++i) {
      const double v = model.branch_inverse(i, u);
      Leg leg;
      leg.stencil = grid.stencil(v);
      leg.weight = std::exp(weight_.at(v, u));
      leg.modulus = std::abs(leg.weight);
      leg.twist = irrep_matrix(rho_, cocycle_(v));
      legs_.push_back(std::move(leg));
    }
  }
}

Observable TwistedOperator::apply(const Observable& phi) const {
  if (!(phi.irrep == rho_)) throw IrrepMismatch("observable irrep " + phi.irrep.name() +
                                                " does not match operator irrep " + rho_.name());
  const auto& grid = state_->grid;
  const int d = rho_.dim();
  const int m = phi.multiplicity;
  const int branches = model_->branch_count();
  Observable out = phi;
  Eigen::RowVectorXcd row(d * m);
  Eigen::MatrixXcd acc(d, m);
  for (int j = 0; j < grid.size(); ++j) {
    acc.setZero();
    for (int i = 0; i < branches; ++i) {
      const Leg& leg = legs_[static_cast<std::size_t>(j) * branches + i];
      row.setZero();
      for (int k = 0; k < 4; ++k) row += leg.stencil.weight[k] * phi.values.row(leg.stencil.index[k]);
      const Eigen::Map<const Eigen::MatrixXcd> blk(row.data(), d, m);
      if (d == 1) {
        acc += (leg.weight * leg.twist(0, 0)) * blk;
      } else {
        acc += leg.weight * (leg.twist * blk);
      }
    }
    out.values.row(j) = Eigen::Map<const Eigen::RowVectorXcd>(acc.data(), d * m);
  }
  return out;
}

std::vector<PathTerm> TwistedOperator::path_terms(double u, int n) const {
  std::vector<PathTerm> out;
  for (auto& past : enumerate_pasts(*model_, n)) {
    PathTerm t;
    t.preimage = past.point(*model_, u);
    t.weight = std::exp(weight_.along(past, u));
    t.twist = irrep_matrix(rho_, holonomy_product(*model_, cocycle_, past, u));
    t.past = std::move(past);
    out.push_back(std::move(t));
  }
  return out;
}

Observable TwistedOperator::apply_n(const Observable& phi, int n) const {
  if (!(phi.irrep == rho_)) throw IrrepMismatch("observable irrep does not match operator irrep");
  const auto& grid = state_->grid;
  const int d = rho_.dim();
  const int m = phi.multiplicity;
  Observable out = phi;
  Eigen::RowVectorXcd row(d * m);
  for (int j = 0; j < grid.size(); ++j) {
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(d, m);
    for (const auto& t : path_terms(grid.point(j), n)) {
      const Stencil s = grid.stencil(t.preimage);
      row.setZero();
      for (int k = 0; k < 4; ++k) row += s.weight[k] * phi.values.row(s.index[k]);
      const Eigen::Map<const Eigen::MatrixXcd> blk(row.data(), d, m);
      acc += t.weight * (t.twist * blk);
    }
    out.values.row(j) = Eigen::Map<const Eigen::RowVectorXcd>(acc.data(), d * m);
  }
  return out;
}

Eigen::VectorXd TwistedOperator::apply_modulus(const Eigen::VectorXd& f) const {
  const auto& grid = state_->grid;
  const int branches = model_->branch_count();
  Eigen::VectorXd out(grid.size());
  for (int j = 0; j < grid.size(); ++j) {
    double acc = 0.0;
    for (int i = 0; i < branches; ++i) {
      const Leg& leg = legs_[static_cast<std::size_t>(j) * branches + i];
      acc += leg.modulus * grid.interpolate(f, leg.stencil);
    }
    out[j] = acc;
  }
  return out;
}

Eigen::VectorXd TwistedOperator::apply_modulus_n(const Eigen::VectorXd& f, int n) const {
  Eigen::VectorXd x = f;
  for (int k = 0; k < n; ++k) x = apply_modulus(x);
  return x;
}

// ---------------------------------------------------------------------------
// trajectories

std::vector<NormSample> iterate_norms(const TwistedOperator& op, const Observable& phi, int steps) {
  std::vector<NormSample> out;
  Observable x = phi;
  double log_scale = 0.0;
  const auto& grid = op.grid();
  for (int n = 0; n <= steps; ++n) {
    if (n > 0) x = op.apply(x);
    NormSample s;
    s.n = n;
    const double l2 = l2_norm(x, op.state());
    const double c1 = c1_norm(x, grid);
    s.log_l2 = l2 > 0 ? std::log(l2) + log_scale : -std::numeric_limits<double>::infinity();
    s.log_c1 = c1 > 0 ? std::log(c1) + log_scale : -std::numeric_limits<double>::infinity();
    s.l2_norm = std::exp(s.log_l2);
    s.c1_norm = std::exp(s.log_c1);
    out.push_back(s);
    if (!(l2 > 0)) {
      // identically zero from here on
      for (int k = n + 1; k <= steps; ++k) out.push_back({k, 0.0, 0.0, s.log_l2, s.log_c1});
      break;
    }
    x.values /= l2;
    log_scale += std::log(l2);
  }
  return out;
}

RateFit fit_rate(const std::vector<double>& log_norms, int first, int last) {
  if (first < 0 || last >= static_cast<int>(log_norms.size()) || last <= first) {
    throw std::invalid_argument("fit_rate: bad index range");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (int n = first; n <= last; ++n) {
    const double y = log_norms[n];
    if (!std::isfinite(y)) continue;
    sx += n;
    sy += y;
    sxx += static_cast<double>(n) * n;
    sxy += n * y;
    ++cnt;
  }
  RateFit fit;
  if (cnt < 2) {
    // collapsed to zero: treat as perfect contraction
    fit.rate = 0.0;
    fit.prefactor = 0.0;
    return fit;
  }
  const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  const double icept = (sy - slope * sx) / cnt;
  fit.rate = std::exp(slope);
  fit.prefactor = std::exp(icept);
  if (fit.rate >= 1.0 - 1e-6) {
    fit.no_contraction = true;
    fit.rate = std::max(fit.rate, 1.0);
  }
  return fit;
}

ContractionReport contraction_rate(const TwistedOperator& op, const std::vector<Observable>& family,
                                   int steps) {
  if (family.empty()) throw std::invalid_argument("contraction_rate: empty family");
  ContractionReport rep;
  for (const auto& phi : family) {
    auto traj = iterate_norms(op, phi, steps);
    std::vector<double> logs;
    for (const auto& s : traj) logs.push_back(s.log_l2);
    RateFit fit = fit_rate(logs, steps / 2, steps);
    const double c1 = traj.front().c1_norm;
    if (c1 > 0) fit.prefactor /= c1;
    rep.rate = std::max(rep.rate, fit.rate);
    rep.prefactor = std::max(rep.prefactor, fit.prefactor);
    rep.no_contraction = rep.no_contraction || fit.no_contraction;
    rep.members.push_back(fit);
    rep.trajectories.push_back(std::move(traj));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// lemma-level checks

KClassReport k_class_check(const Eigen::VectorXd& control, const PeriodicGrid& grid, double C) {
  if ((control.array() <= 0.0).any()) throw DomainError("control function must be positive");
  const Eigen::VectorXd d = grid.derivative(control.array().log().matrix());
  KClassReport rep;
  Eigen::Index arg = 0;
  rep.lipschitz = d.cwiseAbs().maxCoeff(&arg);
  rep.witness = grid.point(static_cast<int>(arg));
  rep.pass = rep.lipschitz <= C * (1.0 + 1e-9);
  return rep;
}

double dichotomy_constant(double f) {
  // Newton for x e^x = 1/8.
  double x = 0.1;
  for (int i = 0; i < 50; ++i) x -= (x * std::exp(x) - 0.125) / ((1.0 + x) * std::exp(x));
  return 0.5 * x * f;
}

std::string to_string(Dichotomy d) {
  switch (d) {
    case Dichotomy::Upper:
      return "UPPER";
    case Dichotomy::Lower:
      return "LOWER";
    default:
      return "VIOLATION";
  }
}

DichotomyReport dichotomy_check(const Observable& phi, const Eigen::VectorXd& control,
                                const PeriodicGrid& grid, const ExpandingModel& model, double C,
                                double delta, const ConsistentPast& past, double center) {
  DichotomyReport rep;
  const Eigen::VectorXd norms = phi.pointwise_norms();
  const Eigen::VectorXd dnorms = derivative_norms(phi, grid);
  const double A = dichotomy_constant(model.bounds().f);
  auto breach = [&](const std::string& what, double where) {
    if (!rep.precondition_breach) {
      rep.precondition_breach = true;
      rep.breach = what;
      rep.witness = where;
    }
  };
  if (C * delta > A * (1.0 + 1e-12)) breach("C * delta exceeds the dichotomy constant", center);
  for (int j = 0; j < grid.size(); ++j) {
    if (!(control[j] > 0.0)) breach("control function not positive", grid.point(j));
    if (!(norms[j] < control[j])) breach("|phi| >= Phi", grid.point(j));
    if (!(dnorms[j] < C * control[j] * 1.1)) breach("|d phi| >= C Phi", grid.point(j));
  }
  const KClassReport k = k_class_check(control, grid, C);
  if (!(k.lipschitz <= 1.1 * C)) breach("Phi not in the K_C class", k.witness);

  const auto& b = model.bounds();
  rep.min_ratio = std::numeric_limits<double>::infinity();
  rep.max_ratio = 0.0;
  std::vector<std::pair<double, Eigen::MatrixXcd>> unit;  // (u, normalised pullback)
  for (int j = 0; j < grid.size(); ++j) {
    const double u = grid.point(j);
    double dist = std::abs(u - center);
    dist = std::min(dist, 1.0 - dist);
    if (dist > delta) continue;
    const double x = past.point(model, u);
    const Stencil s = grid.stencil(x);
    Eigen::RowVectorXcd row = Eigen::RowVectorXcd::Zero(phi.values.cols());
    for (int k2 = 0; k2 < 4; ++k2) row += s.weight[k2] * phi.values.row(s.index[k2]);
    const double nv = row.norm() / std::sqrt(static_cast<double>(phi.dim()));
    const double ratio = nv / grid.interpolate(control, s);
    rep.min_ratio = std::min(rep.min_ratio, ratio);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    if (nv > 0) unit.emplace_back(u, row / (nv * std::sqrt(static_cast<double>(phi.dim()))));
  }
  if (rep.max_ratio <= 0.75) {
    rep.outcome = Dichotomy::Upper;
  } else if (rep.min_ratio >= 0.25) {
    rep.outcome = Dichotomy::Lower;
  } else {
    rep.outcome = Dichotomy::Violation;
  }
  for (std::size_t k2 = 1; k2 < unit.size(); ++k2) {
    double du = unit[k2].first - unit[k2 - 1].first;
    if (du < 0) du += 1.0;
    if (du > 2.0 * grid.step()) continue;
    rep.pullback_lipschitz = std::max(rep.pullback_lipschitz, (unit[k2].second - unit[k2 - 1].second).norm() / du);
  }
  rep.lipschitz_bound = 8.0 * C / (b.f * std::pow(b.kappa, past.depth()));
  return rep;
}

CancellationReport cancellation_bound(Eigen::VectorXcd v, Eigen::VectorXcd w, double eps) {
  CancellationReport rep;
  if (v.norm() > w.norm()) {
    std::swap(v, w);
    rep.swapped = true;
  }
  const double nv = v.norm(), nw = w.norm();
  if (nv > 0 && nw > 0) rep.separated = (v / nv - w / nw).norm() >= eps * (1 - 1e-12);
  rep.sum_norm = (v + w).norm();
  rep.bound = (1.0 - eps * eps / 4.0) * nv + nw;
  rep.holds = rep.sum_norm <= rep.bound * (1 + 1e-12);
  rep.uncorrected_bound = (1.0 - eps * eps / 2.0) * nv + nw;
  rep.uncorrected_holds = rep.sum_norm <= rep.uncorrected_bound * (1 + 1e-12);
  return rep;
}

BudgetReport uniform_c_budget(const TwistedOperator& op, double C, int n, double alpha_c1) {
  const auto& b = op.model().bounds();
  BudgetReport rep;
  rep.n = n;
  rep.C = C;
  const double scale = (1.0 + std::abs(op.z().imag())) * op.rep_norm();
  rep.weight_term = alpha_c1 / (b.f * (b.kappa - 1.0));
  rep.holonomy_term = op.rep_norm() * op.cocycle().c1_norm / (b.f * (b.kappa - 1.0));
  rep.memory_term = C * scale / (b.f * std::pow(b.kappa, n));
  rep.rhs = C * scale;
  rep.margin = rep.rhs - (rep.weight_term + rep.holonomy_term + rep.memory_term);
  rep.pass = rep.margin > 0.0;
  return rep;
}

BudgetReport uniform_c_budget(const TwistedOperator& op, double C, int n) {
  return uniform_c_budget(op, C, n, op.weight().c1_norm());
}

std::optional<int> choose_step_depth(const TwistedOperator& op, double C, double eps, int cap) {
  const auto& b = op.model().bounds();
  const double alpha_c1 = op.weight().c1_norm();
  for (int n = 1; n <= cap; ++n) {
    const bool budget = uniform_c_budget(op, C, n, alpha_c1).pass;
    const double trunc = 2.0 * op.cocycle().c1_norm / (b.f * (b.kappa - 1.0) * std::pow(b.kappa, n));
    if (budget && trunc <= eps / 2.0) return n;
  }
  return std::nullopt;
}

}  // namespace skewmix

#include "skewmix/accessibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "skewmix/errors.hpp"

namespace skewmix {

using cd = std::complex<double>;

ConsistentPast extend_past(const ConsistentPast& prefix, int depth) {
  ConsistentPast p;
  p.branches.assign(depth, 0);
  for (int k = 0; k < std::min(depth, prefix.depth()); ++k) p.branches[k] = prefix.branches[k];
  return p;
}

SymbolicHolonomy symbolic_holonomy(const ExpandingModel& model, const HolonomyCocycle& cocycle, double x,
                                   double y, int depth, const ConsistentPast& prefix) {
  if (model.branch_of(x) != model.branch_of(y)) {
    throw DomainError("symbolic holonomy needs both points in the same cylinder");
  }
  const ConsistentPast past = extend_past(prefix, depth);
  SymbolicHolonomy h;
  h.x = x;
  h.y = y;
  h.depth = depth;
  h.value = holonomy_product(model, cocycle, past, y) * group::inverse(holonomy_product(model, cocycle, past, x));
  const auto& b = model.bounds();
  h.error_bound = cocycle.c1_norm * std::abs(x - y) / (b.f * (b.kappa - 1.0) * std::pow(b.kappa, depth));
  return h;
}

AlgebraElement infinitesimal_holonomy(const ExpandingModel& model, const HolonomyCocycle& cocycle,
                                      double x, const ConsistentPast& prefix, int depth) {
  const ConsistentPast past = extend_past(prefix, depth);
  AlgebraElement acc = AlgebraElement::zero(cocycle.kind);
  GroupElement prod = GroupElement::identity(cocycle.kind);
  double u = x;
  double slope = 1.0;
  for (int i : past.branches) {
    slope *= model.branch_derivative(i, u);
    u = model.branch_inverse(i, u);
    acc += group::adjoint(prod, cocycle.derivative(u)) * slope;
    prod = prod * cocycle(u);
  }
  return acc;
}

TransitivityGroup span_of(GroupKind kind, double x, std::vector<AlgebraElement> generators,
                          double relative_tolerance, double absolute_floor) {
  TransitivityGroup tg;
  tg.x = x;
  const int dim = algebra_dim(kind);
  tg.generators = std::move(generators);
  if (tg.generators.empty()) {
    tg.basis.resize(dim, 0);
    return tg;
  }
  Eigen::MatrixXd m(dim, tg.generators.size());
  for (std::size_t k = 0; k < tg.generators.size(); ++k) m.col(k) = tg.generators[k].coords.head(dim);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  const double largest = s.size() ? s[0] : 0.0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    tg.singular_values.push_back(s[k]);
    if (s[k] > relative_tolerance * largest && s[k] > absolute_floor) ++tg.dimension;
  }
  tg.basis = svd.matrixU().leftCols(tg.dimension);
  return tg;
}

TransitivityGroup transitivity_group(const ExpandingModel& model, const HolonomyCocycle& cocycle, double x,
                                     const TransitivityOptions& opt) {
  if (opt.past_budget < 2) throw std::invalid_argument("past budget must be at least 2");
  auto pasts = enumerate_pasts(model, opt.past_length);
  if (static_cast<int>(pasts.size()) > opt.past_budget) pasts.resize(opt.past_budget);
  std::vector<AlgebraElement> xs;
  for (const auto& p : pasts) xs.push_back(infinitesimal_holonomy(model, cocycle, x, p, opt.depth));
  std::vector<AlgebraElement> diffs;
  for (std::size_t k = 1; k < xs.size(); ++k) diffs.push_back(xs[k] - xs[0]);
  const double floor = 1e-10 * std::max(1.0, cocycle.c1_norm);
  return span_of(cocycle.kind, x, std::move(diffs), opt.relative_tolerance, floor);
}

std::vector<Eigen::VectorXcd> unit_vector_mesh(int d, int count) {
  std::vector<Eigen::VectorXcd> out;
  if (d == 1) {
    out.push_back(Eigen::VectorXcd::Ones(1));
    return out;
  }
  if (d == 2) {
    for (const auto& p : sphere_mesh(count)) {
      const double theta = std::acos(std::clamp(p[2], -1.0, 1.0));
      const double phi = std::atan2(p[1], p[0]);
      Eigen::VectorXcd v(2);
      v << std::cos(0.5 * theta), std::polar(std::sin(0.5 * theta), phi);
      out.push_back(v);
    }
    return out;
  }
  for (int k = 0; k < d; ++k) out.push_back(Eigen::VectorXcd::Unit(d, k));
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> n(0.0, 1.0);
  while (static_cast<int>(out.size()) < count) {
    Eigen::VectorXcd v(d);
    for (int k = 0; k < d; ++k) v[k] = cd(n(rng), n(rng));
    out.push_back(v.normalized());
  }
  return out;
}

NliCertificate nli_certificate(const ExpandingModel& model, const HolonomyCocycle& cocycle, const Irrep& rho,
                               const std::vector<double>& region, const NliOptions& opt) {
  if (rho.kind != cocycle.kind) throw IrrepMismatch("irrep and cocycle live on different groups");
  NliCertificate cert;
  cert.points = region;
  const double norm = rep_norm(rho);
  const auto probes = unit_vector_mesh(rho.dim(), opt.vector_mesh);
  const auto pasts = enumerate_pasts(model, opt.past_length);
  const int full = algebra_dim(cocycle.kind);
  int usable = 0;
  for (double x : region) {
    const TransitivityGroup tg = transitivity_group(model, cocycle, x, opt.transitivity);
    cert.dimension.push_back(tg.dimension);
    double eps = 0.0;
    if (tg.dimension == full && norm > 0) {
      std::vector<AlgebraElement> xs;
      for (const auto& p : pasts) xs.push_back(infinitesimal_holonomy(model, cocycle, x, p, opt.depth));
      std::vector<Eigen::MatrixXcd> actions;
      for (std::size_t a = 0; a < xs.size(); ++a) {
        for (std::size_t b = a + 1; b < xs.size(); ++b) actions.push_back(derived_rep(rho, xs[a] - xs[b]));
      }
      eps = std::numeric_limits<double>::infinity();
      for (const auto& v : probes) {
        double best = 0.0;
        for (const auto& act : actions) best = std::max(best, (act * v).norm());
        eps = std::min(eps, best / norm);
      }
    } else {
      cert.degenerate_locus.push_back(x);
    }
    cert.eps_measured.push_back(eps);
    const bool ok = tg.dimension == full && eps > opt.requested_eps && eps > 0.0;
    cert.mask.push_back(ok);
    if (ok) {
      cert.eps_min = usable == 0 ? eps : std::min(cert.eps_min, eps);
      ++usable;
    }
  }
  cert.coverage = region.empty() ? 0.0 : static_cast<double>(usable) / region.size();
  cert.refused = cert.degenerate_locus.size() == region.size();
  cert.pass = !cert.refused && cert.coverage >= opt.coverage;
  return cert;
}

// ---------------------------------------------------------------------------

Gauge constant_gauge(const GroupElement& g0) {
  const GroupKind kind = g0.kind();
  return {[g0](double) { return g0; }, [kind](double) { return AlgebraElement::zero(kind); }};
}

HolonomyCocycle gauge_transform(const ExpandingModel& model, const HolonomyCocycle& cocycle, const Gauge& gauge) {
  const ExpandingModel m = model;
  auto value = [m, cocycle, gauge](double u) {
    return gauge.value(m.sigma(u)) * cocycle(u) * group::inverse(gauge.value(u));
  };
  auto derivative = [m, cocycle, gauge](double u) {
    const int i = m.branch_of(u);
    const double su = m.sigma(u);
    const double speed = 1.0 / m.branch_derivative(i, su);
    const GroupElement a = gauge.value(su);
    const GroupElement ab = a * cocycle(u);
    const GroupElement ginv = group::inverse(gauge.value(u));
    return gauge.derivative(su) * speed + group::adjoint(a, cocycle.derivative(u)) -
           group::adjoint(ab * ginv, gauge.derivative(u));
  };
  HolonomyCocycle out = HolonomyCocycle::make(cocycle.kind, cocycle.name + "_gauged", value, derivative);
  return out;
}

double grassmann_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.cols() != b.cols()) return 1.0;
  if (a.cols() == 0) return 0.0;
  const Eigen::MatrixXd pa = a * a.transpose();
  const Eigen::MatrixXd pb = b * b.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pa - pb);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

EquivarianceReport gauge_equivariance(const ExpandingModel& model, const HolonomyCocycle& cocycle,
                                      const Gauge& gauge, const std::vector<double>& points,
                                      const TransitivityOptions& opt) {
  EquivarianceReport rep;
  const HolonomyCocycle gauged = gauge_transform(model, cocycle, gauge);
  for (double x : points) {
    const TransitivityGroup before = transitivity_group(model, cocycle, x, opt);
    const TransitivityGroup after = transitivity_group(model, gauged, x, opt);
    EquivarianceEntry e;
    e.x = x;
    e.dimension_before = before.dimension;
    e.dimension_after = after.dimension;
    Eigen::MatrixXd moved = before.basis;
    if (moved.cols() > 0) {
      moved = group::adjoint_matrix(gauge.value(x)) * before.basis;
    }
    e.distance = grassmann_distance(moved, after.basis);
    rep.max_distance = std::max(rep.max_distance, e.distance);
    rep.entries.push_back(e);
  }
  return rep;
}

}  // namespace skewmix

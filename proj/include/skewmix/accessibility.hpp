#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "skewmix/compact_group.hpp"
#include "skewmix/symbolic_model.hpp"

namespace skewmix {

struct SymbolicHolonomy {
  double x = 0.0;
  double y = 0.0;
  int depth = 0;
  GroupElement value = GroupElement::identity(GroupKind::SO2);
  double error_bound = 0.0;
};

/// Extend a branch prefix with zeros (or truncate) to the given depth.
ConsistentPast extend_past(const ConsistentPast& prefix, int depth);

/// Hol^(n)(v^(n) y) Hol^(n)(v^(n) x)^{-1} along a shared past.
SymbolicHolonomy symbolic_holonomy(const ExpandingModel& model, const HolonomyCocycle& cocycle, double x,
                                   double y, int depth, const ConsistentPast& prefix = {});

/// d/du of the truncated holonomy at u = x, right-trivialised.
AlgebraElement infinitesimal_holonomy(const ExpandingModel& model, const HolonomyCocycle& cocycle,
                                      double x, const ConsistentPast& prefix, int depth);

struct TransitivityGroup {
  double x = 0.0;
  std::vector<AlgebraElement> generators;
  Eigen::MatrixXd basis;  // algebra_dim x dimension, orthonormal columns
  int dimension = 0;
  std::vector<double> singular_values;
};

struct TransitivityOptions {
  int depth = 20;
  int past_length = 6;
  int past_budget = 64;
  double relative_tolerance = 1e-7;
};

TransitivityGroup transitivity_group(const ExpandingModel& model, const HolonomyCocycle& cocycle, double x,
                                     const TransitivityOptions& opt = {});

/// Span of the given vectors with the same rank rule.
TransitivityGroup span_of(GroupKind kind, double x, std::vector<AlgebraElement> generators,
                          double relative_tolerance, double absolute_floor);

struct NliOptions {
  int depth = 20;
  int past_length = 4;
  int vector_mesh = 80;
  double requested_eps = 0.0;
  double coverage = 0.95;
  TransitivityOptions transitivity{};
};

struct NliCertificate {
  std::vector<double> points;
  std::vector<double> eps_measured;
  std::vector<int> dimension;
  std::vector<bool> mask;  // eps_measured > requested (and > 0)
  std::vector<double> degenerate_locus;
  double coverage = 0.0;
  double eps_min = 0.0;  // min over masked points
  bool refused = false;
  bool pass = false;
};

/// Unit vectors in C^d used to probe d rho: a sphere mesh for d = 2, seeded
/// random vectors plus the standard basis otherwise.
std::vector<Eigen::VectorXcd> unit_vector_mesh(int d, int count);

NliCertificate nli_certificate(const ExpandingModel& model, const HolonomyCocycle& cocycle, const Irrep& rho,
                               const std::vector<double>& region, const NliOptions& opt = {});

/// C^1 gauge g : circle -> G with right-trivialised derivative.
struct Gauge {
  std::function<GroupElement(double)> value;
  std::function<AlgebraElement(double)> derivative;
};

Gauge constant_gauge(const GroupElement& g0);

/// Hol_g(u) = g(sigma u) Hol(u) g(u)^{-1}.
HolonomyCocycle gauge_transform(const ExpandingModel& model, const HolonomyCocycle& cocycle, const Gauge& gauge);

/// Spectral norm of the difference of orthogonal projectors (1 when ranks differ).
double grassmann_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

struct EquivarianceEntry {
  double x = 0.0;
  int dimension_before = 0;
  int dimension_after = 0;
  double distance = 0.0;
};

struct EquivarianceReport {
  std::vector<EquivarianceEntry> entries;
  double max_distance = 0.0;
};

EquivarianceReport gauge_equivariance(const ExpandingModel& model, const HolonomyCocycle& cocycle,
                                      const Gauge& gauge, const std::vector<double>& points,
                                      const TransitivityOptions& opt = {});

}  // namespace skewmix

#pragma once

// One-sided expanding model on the circle, roof function, holonomy cocycle
// and the suspension flow built from them.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "skewmix/compact_group.hpp"

namespace skewmix {

/// c0 + sum_k a_k cos(2 pi k u) + b_k sin(2 pi k u), k = 1, 2, ...
struct TrigSeries {
  double constant = 0.0;
  std::vector<double> cos_coeffs;
  std::vector<double> sin_coeffs;

  double value(double u) const;
  double derivative(double u) const;
  /// Analytic bounds: sup |f - c0| <= sum |a_k| + |b_k|, sup |f'| <= sum 2 pi k (|a_k| + |b_k|).
  double oscillation_bound() const;
  double derivative_bound() const;
  bool is_constant() const;
};

struct ExpansionBounds {
  double f = 1.0;
  double kappa = 2.0;
  double b = 1.0;
  double K = 2.0;
};

/// Full-branch piecewise-affine expanding map. Branch i maps
/// [c_i, c_i + l_i) onto [0, 1), so its inverse is u -> c_i + l_i u.
class ExpandingModel {
 public:
  static ExpandingModel doubling();
  static ExpandingModel tripling();
  static ExpandingModel from_lengths(std::vector<double> lengths, std::string name = "table");

  const std::string& name() const { return name_; }
  int branch_count() const { return static_cast<int>(lengths_.size()); }
  double branch_inverse(int i, double u) const { return offsets_[i] + lengths_[i] * u; }
  /// Derivative of the inverse branch (constant for affine branches).
  double branch_derivative(int i, double /*u*/) const { return lengths_[i]; }
  int branch_of(double u) const;
  double sigma(double u) const;
  const ExpansionBounds& bounds() const { return bounds_; }
  const std::vector<double>& lengths() const { return lengths_; }

 private:
  std::string name_;
  std::vector<double> lengths_;
  std::vector<double> offsets_;
  ExpansionBounds bounds_;
};

class RoofFunction {
 public:
  explicit RoofFunction(TrigSeries series);
  static RoofFunction constant(double c);
  /// tau(u) = 1 + 0.3 cos(2 pi u).
  static RoofFunction standard();

  double operator()(double u) const { return series_.value(u); }
  double derivative(double u) const { return series_.derivative(u); }
  double tau_min() const { return tau_min_; }
  double tau_max() const { return series_.constant + series_.oscillation_bound(); }
  double c1_norm() const { return c1_norm_; }
  const TrigSeries& series() const { return series_; }

 private:
  TrigSeries series_;
  double tau_min_;
  double c1_norm_;
};

/// hol : [0,1) -> G, with its right-trivialised derivative (d hol) hol^{-1}.
struct HolonomyCocycle {
  GroupKind kind = GroupKind::SO2;
  std::string name;
  std::function<GroupElement(double)> value;
  std::function<AlgebraElement(double)> derivative;
  /// Sampled sup of the derivative norm, with a 5% margin.
  double c1_norm = 0.0;

  GroupElement operator()(double u) const { return value(u); }

  static HolonomyCocycle make(GroupKind kind, std::string name,
                              std::function<GroupElement(double)> value,
                              std::function<AlgebraElement(double)> derivative);
  static HolonomyCocycle trivial(GroupKind kind);
  static HolonomyCocycle constant(const GroupElement& g);
  /// Rotation by angle(u).
  static HolonomyCocycle so2_angle(TrigSeries angle);
  /// Rotation by 2 pi k u (continuous on the circle for integer k).
  static HolonomyCocycle so2_winding(int k);
  /// exp(x(u) e_1 + y(u) e_2 + z(u) e_3).
  static HolonomyCocycle su2_exp(TrigSeries x, TrigSeries y, TrigSeries z);
};

/// Right-trivialised derivative of exp at a in direction b, for su(2) in the
/// cross-product bracket: d/dt exp(a + t b) exp(a)^{-1} at t = 0.
Eigen::Vector3d su2_dexp(const Eigen::Vector3d& a, const Eigen::Vector3d& b);

struct ConsistentPast {
  std::vector<int> branches;

  int depth() const { return static_cast<int>(branches.size()); }
  /// v^(depth)(u).
  double point(const ExpandingModel& model, double u) const;
  /// [v^(1)(u), ..., v^(depth)(u)].
  std::vector<double> trajectory(const ExpandingModel& model, double u) const;
  /// d/du v^(depth)(u).
  double contraction(const ExpandingModel& model, double u) const;
  /// The past (i_{from+1}, ..., i_depth).
  ConsistentPast tail(int from) const;
  ConsistentPast head(int count) const;
};

constexpr std::uint64_t kDefaultPastLimit = std::uint64_t{1} << 22;

std::vector<ConsistentPast> enumerate_pasts(const ExpandingModel& model, int depth,
                                            std::uint64_t limit = kDefaultPastLimit);

/// hol(v^(1) u) hol(v^(2) u) ... hol(v^(n) u).
GroupElement holonomy_product(const ExpandingModel& model, const HolonomyCocycle& cocycle,
                              const ConsistentPast& past, double u);

/// sum_{j=1..n} tau(v^(j) u).
double birkhoff_roof(const ExpandingModel& model, const RoofFunction& roof,
                     const ConsistentPast& past, double u);

struct SuspensionPoint {
  double u = 0.0;
  double s = 0.0;
  GroupElement g = GroupElement::identity(GroupKind::SO2);
};

/// Flow for time t >= 0 with exact roof crossings.
SuspensionPoint flow(const SuspensionPoint& p, double t, const ExpandingModel& model,
                     const RoofFunction& roof, const HolonomyCocycle& cocycle);

/// Number of roof crossings flow(p, t) performs.
int crossing_count(const SuspensionPoint& p, double t, const ExpandingModel& model,
                   const RoofFunction& roof);

}  // namespace skewmix

#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "skewmix/transfer.hpp"

namespace skewmix {

struct DolgopyatParams {
  double delta = 0.0;  // ball radius
  double eps = 0.0;    // non-integrability constant
  double s = 0.5;      // shrink factor for the cancellation ball
  int n0 = 1;          // step depth
  double r = 0.0;      // measure-fraction constant (reported against)
  double C = 0.0;      // class constant used to size delta
};

/// (eps delta (1 + |Im z|) ||rho||)^2 / 2048, capped at 1/4.
double dolgopyat_factor(double eps, double delta, double im_z, double rep_norm);

/// C^1 radial profile: 1 on d <= w/2, exp(1 + 1/(t^2 - 1)) with
/// t = 2d/w - 1 on w/2 < d < w, 0 beyond.
double bump_profile(double d, double w);

struct DolgopyatStep {
  Observable phi_next;
  Eigen::VectorXd control_next;
  bool accepted = false;
  std::string reason;
  double witness = 0.0;
  double factor = 0.0;  // c
  int balls = 0;
  int bumped = 0;
  std::vector<double> centers;
  double lni_measure = 0.0;
  double l2_ratio = 1.0;  // ||L^{n0}_{P,0}(beta Phi)|| / ||Phi||
  double bound = 1.0;     // 1 - r c nu(U_lni)
  double r_implied = 0.0;
  double domination_margin = 0.0;  // min_j (Phi'_j - ||phi'_j||) / Phi'_j
  double class_lipschitz = 0.0;    // Lipschitz constant of log Phi'
  double derivative_ratio = 0.0;   // sup ||d phi'|| / Phi'
};

/// Largest sampled value of max(|d log Phi|, ||d phi|| / Phi).
double measured_class_constant(const Observable& phi, const Eigen::VectorXd& control, const PeriodicGrid& grid);

/// Smallest C passing the budget at depth n, times 1.1.
double budget_constant(const TwistedOperator& op, int n);

/// C is raised to the budget constant at the truncation depth; then
/// delta = A / C (capped at 1/8) and n0 comes from the budget.
DolgopyatParams plan_dolgopyat(const TwistedOperator& op, double C, double eps, int cap = 25);

DolgopyatStep dolgopyat_step(const TwistedOperator& op, const Observable& phi, const Eigen::VectorXd& control,
                             const DolgopyatParams& params, const std::vector<bool>& lni_mask);

}  // namespace skewmix

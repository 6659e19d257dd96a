#pragma once

// Twisted transfer operators acting on V^rho-valued observables over the
// base grid, norm trajectories, and the lemma-level checks used in the
// contraction argument.

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "skewmix/compact_group.hpp"
#include "skewmix/grid.hpp"
#include "skewmix/symbolic_model.hpp"
#include "skewmix/thermo.hpp"

namespace skewmix {

/// Grid of d x m blocks, one row per grid point (column-major flattening).
/// rho acts on the left of each block.
struct Observable {
  Irrep irrep;
  int multiplicity = 1;
  Eigen::MatrixXcd values;

  int dim() const { return irrep.dim(); }
  Eigen::MatrixXcd block(int j) const;
  void set_block(int j, const Eigen::MatrixXcd& b);
  /// Frobenius norm / sqrt(dim) at grid point j.
  double norm_at(int j) const;
  Eigen::VectorXd pointwise_norms() const;

  static Observable from_function(const Irrep& rho, const PeriodicGrid& grid, int multiplicity,
                                  const std::function<Eigen::MatrixXcd(double)>& f);
  static Observable scalar(const Irrep& rho, const PeriodicGrid& grid,
                           const std::function<std::complex<double>(double)>& f);
};

double l2_norm(const Observable& phi, const EquilibriumState& state);
/// sup of the pointwise norm plus sup of the centered-difference derivative norm.
double c1_norm(const Observable& phi, const PeriodicGrid& grid);
/// sup_j ||phi'(u_j)|| by centered differences.
Eigen::VectorXd derivative_norms(const Observable& phi, const PeriodicGrid& grid);

/// One term of the n-step operator at a point: weight e^{alpha^(n)}, twist
/// rho(Hol^(n)) and the preimage v^(n)(u).
struct PathTerm {
  ConsistentPast past;
  double preimage = 0.0;
  std::complex<double> weight;
  Eigen::MatrixXcd twist;
};

class TwistedOperator {
 public:
  TwistedOperator(const ExpandingModel& model, const EquilibriumState& state, Potential potential,
                  RoofFunction roof, HolonomyCocycle cocycle, std::complex<double> z, Irrep rho);

  const ExpandingModel& model() const { return *model_; }
  const EquilibriumState& state() const { return *state_; }
  const PeriodicGrid& grid() const { return state_->grid; }
  const NormalizedWeight& weight() const { return weight_; }
  const HolonomyCocycle& cocycle() const { return cocycle_; }
  const RoofFunction& roof() const { return roof_; }
  const Potential& potential() const { return potential_; }
  const Irrep& irrep() const { return rho_; }
  std::complex<double> z() const { return weight_.z(); }
  double rep_norm() const { return skewmix::rep_norm(rho_); }

  Observable apply(const Observable& phi) const;
  /// n-step operator evaluated directly over depth-n pasts.
  Observable apply_n(const Observable& phi, int n) const;
  std::vector<PathTerm> path_terms(double u, int n) const;

  /// Untwisted real operator with weights |e^{alpha_z}| (= L_{Re z, 0}).
  Eigen::VectorXd apply_modulus(const Eigen::VectorXd& f) const;
  Eigen::VectorXd apply_modulus_n(const Eigen::VectorXd& f, int n) const;

 private:
  struct Leg {
    Stencil stencil;
    std::complex<double> weight;
    double modulus;
    Eigen::MatrixXcd twist;
  };
  const ExpandingModel* model_;
  const EquilibriumState* state_;
  Potential potential_;
  RoofFunction roof_;
  HolonomyCocycle cocycle_;
  Irrep rho_;
  NormalizedWeight weight_;
  std::vector<Leg> legs_;  // grid point major, branch minor
};

struct NormSample {
  int n = 0;
  double l2_norm = 0.0;
  double c1_norm = 0.0;
  double log_l2 = 0.0;
  double log_c1 = 0.0;
};

/// Norm trajectory of L^n phi, n = 0..steps. The iterate is renormalised at
/// every step; log-norms carry the accumulated scale.
std::vector<NormSample> iterate_norms(const TwistedOperator& op, const Observable& phi, int steps);

struct RateFit {
  double rate = 0.0;
  double prefactor = 0.0;
  bool no_contraction = false;
};

/// Least squares of log-norm against n over n in [first, last].
RateFit fit_rate(const std::vector<double>& log_norms, int first, int last);

struct ContractionReport {
  double rate = 0.0;       // max over the family
  double prefactor = 0.0;  // max over the family, relative to ||phi||_{C^1}
  bool no_contraction = false;
  std::vector<RateFit> members;
  std::vector<std::vector<NormSample>> trajectories;
};

ContractionReport contraction_rate(const TwistedOperator& op, const std::vector<Observable>& family,
                                   int steps);

struct KClassReport {
  double lipschitz = 0.0;
  bool pass = false;
  double witness = 0.0;
};

KClassReport k_class_check(const Eigen::VectorXd& control, const PeriodicGrid& grid, double C);

/// Constant A with C delta <= A in the dichotomy: A = x f / 2 where x e^x = 1/8.
double dichotomy_constant(double f);

enum class Dichotomy { Upper, Lower, Violation };
std::string to_string(Dichotomy d);

struct DichotomyReport {
  Dichotomy outcome = Dichotomy::Violation;
  bool precondition_breach = false;
  std::string breach;
  double witness = 0.0;
  double min_ratio = 0.0;  // min of ||phi o v|| / Phi o v over the ball
  double max_ratio = 0.0;
  /// Lipschitz constant of phi o v / ||phi o v|| on the ball (meaningful when LOWER).
  double pullback_lipschitz = 0.0;
  double lipschitz_bound = 0.0;
};

DichotomyReport dichotomy_check(const Observable& phi, const Eigen::VectorXd& control,
                                const PeriodicGrid& grid, const ExpandingModel& model, double C,
                                double delta, const ConsistentPast& past, double center);

struct CancellationReport {
  double bound = 0.0;
  bool holds = false;
  bool swapped = false;
  bool separated = true;
  double sum_norm = 0.0;
  double uncorrected_bound = 0.0;
  bool uncorrected_holds = false;
};

CancellationReport cancellation_bound(Eigen::VectorXcd v, Eigen::VectorXcd w, double eps);

struct BudgetReport {
  int n = 0;
  double C = 0.0;
  double weight_term = 0.0;
  double holonomy_term = 0.0;
  double memory_term = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool pass = false;
};

BudgetReport uniform_c_budget(const TwistedOperator& op, double C, int n, double alpha_c1);
BudgetReport uniform_c_budget(const TwistedOperator& op, double C, int n);

/// Smallest n <= cap passing the budget and the holonomy truncation bound
/// 2 ||Hol||_{C^1} / (f (kappa - 1) kappa^n) <= eps / 2.
std::optional<int> choose_step_depth(const TwistedOperator& op, double C, double eps, int cap = 25);

}  // namespace skewmix

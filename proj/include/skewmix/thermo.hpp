#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "skewmix/grid.hpp"
#include "skewmix/symbolic_model.hpp"

namespace skewmix {

enum class Regularity { C1, Holder };

/// Potential on the base circle. `norm` is the C^1 norm for C1 potentials
/// and sup + Hoelder seminorm for Hoelder ones.
struct Potential {
  std::function<double(double)> value;
  Regularity regularity = Regularity::C1;
  double holder_exponent = 1.0;
  double norm = 0.0;
  std::string name;

  double operator()(double u) const { return value(u); }
  Eigen::VectorXd sample(const PeriodicGrid& grid) const;

  static Potential smooth(TrigSeries series, std::string name = "trig");
  static Potential constant(double c);
  static Potential holder(std::function<double(double)> f, double exponent, std::string name = "holder");
};

/// sup|f| + sup_{x != y} |f(x) - f(y)| / d(x, y)^alpha on an n-point circle grid.
double sampled_holder_norm(const std::function<double(double)>& f, double exponent, int n);

struct EquilibriumState {
  PeriodicGrid grid{64};
  double pressure = 0.0;
  /// Right eigenfunction of the unnormalised operator, grid mean 1.
  Eigen::VectorXd eigenfunction;
  /// Gibbs weights on the grid (left fixed vector of the normalised operator), sum 1.
  Eigen::VectorXd measure;
  double residual = 0.0;
  int iterations = 0;
  std::vector<double> residual_history;

  double eigenfunction_at(double u) const { return grid.interpolate(eigenfunction, u); }
  /// Sum of measure weights times values.
  double integrate(const Eigen::VectorXd& values) const { return measure.dot(values); }
};

struct RpfOptions {
  double tolerance = 1e-12;
  int max_iterations = 100000;
};

/// Unnormalised operator (M f)(u_j) = sum_i e^{potential(v_i u_j)} f(v_i u_j)
/// with cubic interpolation at the preimages.
Eigen::SparseMatrix<double, Eigen::RowMajor> unnormalised_operator(const ExpandingModel& model,
                                                                   const Potential& potential,
                                                                   const PeriodicGrid& grid);

EquilibriumState rpf_solve(const ExpandingModel& model, const Potential& potential, int grid_size,
                           const RpfOptions& options = {});

/// The normalised weight alpha_z evaluated at a preimage u' of u:
/// potential(u') - (z - P) tau(u') + log h(u') - log h(u) - P.
class NormalizedWeight {
 public:
  NormalizedWeight(const ExpandingModel& model, const EquilibriumState& state, Potential potential,
                   RoofFunction roof, std::complex<double> z);

  std::complex<double> z() const { return z_; }
  std::complex<double> at(double preimage, double image) const;
  std::complex<double> operator()(double preimage) const;

  struct Parts {
    double potential = 0.0;
    std::complex<double> roof_term;
    double eigen_term = 0.0;
    double pressure = 0.0;
  };
  Parts parts(double preimage, double image) const;

  /// Sum of one-step weights along a past (h-terms telescoped).
  std::complex<double> along(const ConsistentPast& past, double u) const;

  /// sup|alpha| + sup|alpha'| on the grid, real part at Re z plus |Im z| sup|tau| terms.
  double c1_norm() const;

 private:
  const ExpandingModel* model_;
  const EquilibriumState* state_;
  Potential potential_;
  RoofFunction roof_;
  std::complex<double> z_;
};

/// Throws DomainError unless |Re z - P| < 1.
void check_strip(std::complex<double> z, double pressure);

/// Apply the normalised real operator L_{P,0} to grid values.
Eigen::VectorXd apply_normalised(const ExpandingModel& model, const Potential& potential,
                                 const EquilibriumState& state, const Eigen::VectorXd& f);

struct DoublingEntry {
  double k = 0.0;
  double r = 0.0;
  bool resolved = false;
  double max_ratio = 0.0;
  double worst_center = 0.0;
};

struct DoublingReport {
  std::vector<DoublingEntry> entries;
  double max_ratio = 0.0;
  bool unbounded_growth = false;
};

DoublingReport doubling_check(const EquilibriumState& state, const std::vector<double>& ratios,
                              const std::vector<double>& radii);

/// Measure of the closed arc [x - r, x + r] with the weights spread uniformly over cells.
double ball_measure(const EquilibriumState& state, double x, double r);

struct SmoothingReport {
  Potential smoothed;
  double width = 0.0;
  double sup_error = 0.0;
  double error_bound = 0.0;
  double c1_norm = 0.0;
};

/// Mollify with the kernel (1 - (y/w)^2)^2 on [-w, w], w = b^{-1/2}.
SmoothingReport smooth_potential(const Potential& potential, double b, int fine_grid = 1 << 14);

}  // namespace skewmix

#pragma once

// Correlation functions on the suspension by Monte Carlo, exponential fits,
// fibre-time Laplace transforms and the kernel integral behind the k-fold
// convolution bound.

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "skewmix/compact_group.hpp"
#include "skewmix/symbolic_model.hpp"
#include "skewmix/thermo.hpp"

namespace skewmix {

struct SuspensionObservable {
  std::function<double(double u, const GroupElement& g, double s)> value;
  double c1_norm = 0.0;
  bool mean_zero = false;
  double measured_mean = 0.0;
  std::string name;

  double operator()(double u, const GroupElement& g, double s) const { return value(u, g, s); }
};

/// base(u) * chi(g), chi = cos(k angle) on SO2 or the real spin-j character on SU2
/// divided by its dimension. The mean is measured against the suspension measure.
SuspensionObservable product_observable(const TrigSeries& base, GroupKind kind, int label);

/// Mean of phi against nu^u x Haar x dt on {0 <= t < tau(u)}, normalised to mass 1.
double suspension_mean(const SuspensionObservable& phi, const EquilibriumState& state, const RoofFunction& roof,
                       const HaarQuadrature& quad, int time_nodes = 16);

/// Measure the mean and set the flag when |mean| <= 1e-6 ||phi||_{C^1}.
void certify_mean_zero(SuspensionObservable& phi, const EquilibriumState& state, const RoofFunction& roof,
                       const HaarQuadrature& quad);

struct CorrelationSeries {
  std::vector<double> times;  // max_j t_j
  std::vector<double> beta;
  std::vector<double> std_error;
  std::uint64_t samples = 0;
};

struct CorrelationSetup {
  /// phi_0, ..., phi_k.
  std::vector<SuspensionObservable> observables;
  /// One row of k times per series point; rows must have increasing maxima.
  std::vector<std::vector<double>> time_points;
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 1;
  int shards = 16;
  int batches_per_shard = 8;
  int threads = 1;
};

CorrelationSeries correlate(const ExpandingModel& model, const RoofFunction& roof, const HolonomyCocycle& cocycle,
                            const EquilibriumState& state, const CorrelationSetup& setup);

struct DecayFit {
  double rate = 0.0;
  double prefactor = 0.0;
  double r_squared = 0.0;
  bool no_decay = false;
  std::vector<double> used_times;
  std::vector<double> excluded_times;
};

/// Weighted least squares of log|beta| on t; points with |beta| < 2 stderr are excluded.
DecayFit fit_decay_rate(const CorrelationSeries& series);

/// int_0^{tau(u)} phi(u, g, t) e^{-xi t} dt, for -1/k < Re xi < 0.
std::complex<double> hat_transform(const SuspensionObservable& phi, std::complex<double> xi, double u,
                                   const GroupElement& g, const RoofFunction& roof, int k = 1);

struct MajorantComponent {
  double rate = 0.0;       // contraction rate r(rho)
  double prefactor = 1.0;  // C(rho)
  double hat_norm = 0.0;   // ||hat phi_0^rho||
};

struct MajorantReport {
  double value = 0.0;
  double tail = 0.0;
  bool certifying = true;
};

/// k! sum_rho sum_{n=1..n_max} C ||hat phi_0^rho|| r^n prod_i ||hat phi_i||, with the
/// geometric tail beyond n_max.
MajorantReport laplace_majorant(const std::vector<MajorantComponent>& components,
                                const std::vector<double>& fibre_norms, int n_max, int k);

/// int (1 + |x + y|)^{-a} (1 + |y|)^{-1} dy.
double kernel_integral(double x, double a, double tolerance = 1e-10);

struct KernelFit {
  double exponent = 0.0;
  std::vector<double> xs;
  std::vector<double> values;
};

/// Fit f(x) ~ (1 + x)^{-p} over the grid for a = 0.5 - eps.
KernelFit kernel_integral_check(double eps, const std::vector<double>& xs);
KernelFit kernel_decay_fit(double a, const std::vector<double>& xs);

std::vector<double> log_spaced(double lo, double hi, int count);

}  // namespace skewmix

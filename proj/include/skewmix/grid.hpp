#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

namespace skewmix {

/// Four-point Lagrange stencil on a periodic grid.
struct Stencil {
  std::array<int, 4> index{};
  std::array<double, 4> weight{};
  /// Weights for the derivative of the cubic interpolant at the same point.
  std::array<double, 4> slope{};
};

/// Uniform periodic grid u_i = i / n on the circle [0, 1).
class PeriodicGrid {
 public:
  explicit PeriodicGrid(int n);

  int size() const { return n_; }
  double step() const { return 1.0 / n_; }
  double point(int i) const { return static_cast<double>(i) / n_; }
  std::vector<double> points() const;

  Stencil stencil(double x) const;

  template <class Vec>
  auto interpolate(const Vec& values, const Stencil& s) const {
    auto acc = s.weight[0] * values[s.index[0]];
    for (int k = 1; k < 4; ++k) acc += s.weight[k] * values[s.index[k]];
    return acc;
  }

  double interpolate(const Eigen::VectorXd& values, double x) const;
  double interpolate_slope(const Eigen::VectorXd& values, double x) const;

  /// Periodic centered difference with step h = grid step.
  Eigen::VectorXd derivative(const Eigen::VectorXd& values) const;
  Eigen::MatrixXcd derivative_rows(const Eigen::MatrixXcd& values) const;

 private:
  int n_;
};

/// Reduce x to [0, 1).
double wrap_unit(double x);

}  // namespace skewmix

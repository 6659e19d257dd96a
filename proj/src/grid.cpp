#include "skewmix/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace skewmix {

double wrap_unit(double x) {
  double r = x - std::floor(x);
  if (r >= 1.0) r = 0.0;
  return r;
}

PeriodicGrid::PeriodicGrid(int n) : n_(n) {
  if (n < 4) throw std::invalid_argument("grid needs at least 4 points");
}

std::vector<double> PeriodicGrid::points() const {
  std::vector<double> out(n_);
  for (int i = 0; i < n_; ++i) out[i] = point(i);
  return out;
}

Stencil PeriodicGrid::stencil(double x) const {
  const double y = wrap_unit(x) * n_;
  int i0 = static_cast<int>(std::floor(y));
  double t = y - i0;
  if (i0 >= n_) {
    i0 -= n_;
  }
  Stencil s;
  for (int k = 0; k < 4; ++k) s.index[k] = ((i0 - 1 + k) % n_ + n_) % n_;
  // Nodes at -1, 0, 1, 2 relative to i0.
  s.weight[0] = -t * (t - 1) * (t - 2) / 6.0;
  s.weight[1] = (t + 1) * (t - 1) * (t - 2) / 2.0;
  s.weight[2] = -(t + 1) * t * (t - 2) / 2.0;
  s.weight[3] = (t + 1) * t * (t - 1) / 6.0;
  const double n = static_cast<double>(n_);
  s.slope[0] = -n * (3 * t * t - 6 * t + 2) / 6.0;
  s.slope[1] = n * (3 * t * t - 4 * t - 1) / 2.0;
  s.slope[2] = -n * (3 * t * t - 2 * t - 2) / 2.0;
  s.slope[3] = n * (3 * t * t - 1) / 6.0;
  return s;
}

double PeriodicGrid::interpolate(const Eigen::VectorXd& values, double x) const {
  return interpolate(values, stencil(x));
}

double PeriodicGrid::interpolate_slope(const Eigen::VectorXd& values, double x) const {
  const Stencil s = stencil(x);
  double acc = 0.0;
  for (int k = 0; k < 4; ++k) acc += s.slope[k] * values[s.index[k]];
  return acc;
}

Eigen::VectorXd PeriodicGrid::derivative(const Eigen::VectorXd& values) const {
  Eigen::VectorXd d(n_);
  for (int i = 0; i < n_; ++i) {
    d[i] = (values[(i + 1) % n_] - values[(i - 1 + n_) % n_]) * (0.5 * n_);
  }
  return d;
}

Eigen::MatrixXcd PeriodicGrid::derivative_rows(const Eigen::MatrixXcd& values) const {
  Eigen::MatrixXcd d(values.rows(), values.cols());
  for (int i = 0; i < n_; ++i) {
    d.row(i) = (values.row((i + 1) % n_) - values.row((i - 1 + n_) % n_)) * (0.5 * n_);
  }
  return d;
}

}  // namespace skewmix

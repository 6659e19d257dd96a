#include "skewmix/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "skewmix/errors.hpp"

namespace skewmix {

using cd = std::complex<double>;

Eigen::VectorXd Potential::sample(const PeriodicGrid& grid) const {
  Eigen::VectorXd v(grid.size());
  for (int i = 0; i < grid.size(); ++i) v[i] = value(grid.point(i));
  return v;
}

Potential Potential::smooth(TrigSeries series, std::string name) {
  Potential p;
  p.name = std::move(name);
  p.regularity = Regularity::C1;
  p.norm = std::abs(series.constant) + series.oscillation_bound() + series.derivative_bound();
  p.value = [s = std::move(series)](double u) { return s.value(u); };
  return p;
}

Potential Potential::constant(double c) { return smooth(TrigSeries{c, {}, {}}, "constant"); }

Potential Potential::holder(std::function<double(double)> f, double exponent, std::string name) {
  Potential p;
  p.name = std::move(name);
  p.regularity = Regularity::Holder;
  p.holder_exponent = exponent;
  p.norm = sampled_holder_norm(f, exponent, 1024);
  p.value = std::move(f);
  return p;
}

double sampled_holder_norm(const std::function<double(double)>& f, double exponent, int n) {
  std::vector<double> v(n);
  double sup = 0.0;
  for (int i = 0; i < n; ++i) {
    v[i] = f(static_cast<double>(i) / n);
    sup = std::max(sup, std::abs(v[i]));
  }
  double semi = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const int k = std::min(j - i, n - (j - i));
      const double d = static_cast<double>(k) / n;
      semi = std::max(semi, std::abs(v[i] - v[j]) / std::pow(d, exponent));
    }
  }
  return sup + semi;
}

// ---------------------------------------------------------------------------

Eigen::SparseMatrix<double, Eigen::RowMajor> unnormalised_operator(const ExpandingModel& model,
                                                                   const Potential& potential,
                                                                   const PeriodicGrid& grid) {
  std::vector<Eigen::Triplet<double>> trips;
  const int n = grid.size();
  trips.reserve(static_cast<std::size_t>(n) * model.branch_count() * 4);
  for (int j = 0; j < n; ++j) {
    const double u = grid.point(j);
    for (int i = 0; i < model.branch_count(); ++i) {
      const double v = model.branch_inverse(i, u);
      const double w = std::exp(potential(v));
      const Stencil s = grid.stencil(v);
      for (int k = 0; k < 4; ++k) trips.emplace_back(j, s.index[k], w * s.weight[k]);
    }
  }
  Eigen::SparseMatrix<double, Eigen::RowMajor> m(n, n);
  m.setFromTriplets(trips.begin(), trips.end());
  m.prune(0.0);
  return m;
}

namespace {

// Power iteration for the leading eigenpair; returns (lambda, vector with mean 1).
template <class Apply>
std::pair<double, Eigen::VectorXd> power_iterate(Apply apply, int n, const RpfOptions& opt,
                                                 std::vector<double>& history) {
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
  double lambda = 0.0;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    Eigen::VectorXd y = apply(x);
    const double next = y.mean() / x.mean();
    y /= y.mean();
    const double res = (y - x).cwiseAbs().maxCoeff();
    history.push_back(res);
    x = std::move(y);
    const bool settled = std::abs(next - lambda) <= opt.tolerance * std::abs(next);
    lambda = next;
    if (res <= opt.tolerance && settled) return {lambda, x};
  }
  throw ConvergenceError("power iteration did not converge", history);
}

}  // namespace

EquilibriumState rpf_solve(const ExpandingModel& model, const Potential& potential, int grid_size,
                           const RpfOptions& options) {
  if (grid_size < 64 || (grid_size & (grid_size - 1)) != 0) {
    throw std::invalid_argument("grid size must be a power of two >= 64");
  }
  EquilibriumState st;
  st.grid = PeriodicGrid(grid_size);
  const auto m = unnormalised_operator(model, potential, st.grid);
  const Eigen::SparseMatrix<double, Eigen::RowMajor> mt = m.transpose();

  auto [lambda, h] = power_iterate([&](const Eigen::VectorXd& x) { return Eigen::VectorXd(m * x); },
                                   grid_size, options, st.residual_history);
  if ((h.array() <= 0.0).any()) {
    throw ConvergenceError("eigenfunction is not positive", st.residual_history);
  }
  st.iterations = static_cast<int>(st.residual_history.size());
  std::vector<double> left_history;
  auto [lambda_left, mu] = power_iterate(
      [&](const Eigen::VectorXd& x) { return Eigen::VectorXd(mt * x); }, grid_size, options, left_history);
  (void)lambda_left;

  st.pressure = std::log(lambda);
  st.eigenfunction = h;
  st.measure = mu.cwiseProduct(h);
  st.measure /= st.measure.sum();
  const Eigen::VectorXd mh = m * h;
  st.residual = (mh - lambda * h).cwiseAbs().maxCoeff() / h.cwiseAbs().maxCoeff();
  return st;
}

// ---------------------------------------------------------------------------

void check_strip(cd z, double pressure) {
  if (!(std::abs(z.real() - pressure) < 1.0)) {
    throw DomainError("Re z must satisfy |Re z - P| < 1");
  }
}

NormalizedWeight::NormalizedWeight(const ExpandingModel& model, const EquilibriumState& state,
                                   Potential potential, RoofFunction roof, cd z)
    : model_(&model), state_(&state), potential_(std::move(potential)), roof_(std::move(roof)), z_(z) {
  check_strip(z, state.pressure);
}

NormalizedWeight::Parts NormalizedWeight::parts(double preimage, double image) const {
  Parts p;
  p.potential = potential_(preimage);
  p.roof_term = -(z_ - state_->pressure) * roof_(preimage);
  p.eigen_term = std::log(state_->eigenfunction_at(preimage)) - std::log(state_->eigenfunction_at(image));
  p.pressure = -state_->pressure;
  return p;
}

cd NormalizedWeight::at(double preimage, double image) const {
  const Parts p = parts(preimage, image);
  return p.potential + p.roof_term + p.eigen_term + p.pressure;
}

cd NormalizedWeight::operator()(double preimage) const { return at(preimage, model_->sigma(preimage)); }

cd NormalizedWeight::along(const ConsistentPast& past, double u) const {
  cd acc = 0.0;
  double x = u;
  for (int i : past.branches) {
    const double y = model_->branch_inverse(i, x);
    acc += potential_(y) - (z_ - state_->pressure) * roof_(y) - state_->pressure;
    x = y;
  }
  acc += std::log(state_->eigenfunction_at(x)) - std::log(state_->eigenfunction_at(u));
  return acc;
}

double NormalizedWeight::c1_norm() const {
  const auto& grid = state_->grid;
  const double h = 1e-6;
  double sup = 0.0, slope = 0.0;
  for (int j = 0; j < grid.size(); ++j) {
    const double u = grid.point(j);
    for (int i = 0; i < model_->branch_count(); ++i) {
      const double v = model_->branch_inverse(i, u);
      const double l = model_->branch_derivative(i, u);
      sup = std::max(sup, std::abs(at(v, u)));
      const double up = std::min(u + h, 1.0 - 1e-15);
      const double dn = std::max(u - h, 0.0);
      const cd d = (at(model_->branch_inverse(i, up), up) - at(model_->branch_inverse(i, dn), dn)) /
                   ((up - dn) * l);
      slope = std::max(slope, std::abs(d));
    }
  }
  return sup + slope;
}

Eigen::VectorXd apply_normalised(const ExpandingModel& model, const Potential& potential,
                                 const EquilibriumState& state, const Eigen::VectorXd& f) {
  const auto& grid = state.grid;
  const Eigen::VectorXd hf = state.eigenfunction.cwiseProduct(f);
  const double scale = std::exp(-state.pressure);
  Eigen::VectorXd out(grid.size());
  for (int j = 0; j < grid.size(); ++j) {
    const double u = grid.point(j);
    double acc = 0.0;
    for (int i = 0; i < model.branch_count(); ++i) {
      const double v = model.branch_inverse(i, u);
      acc += std::exp(potential(v)) * grid.interpolate(hf, grid.stencil(v));
    }
    out[j] = scale * acc / state.eigenfunction[j];
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

Eigen::VectorXd measure_prefix(const EquilibriumState& state) {
  const int n = state.grid.size();
  Eigen::VectorXd prefix(n + 1);
  prefix[0] = 0.0;
  for (int j = 0; j < n; ++j) prefix[j + 1] = prefix[j] + state.measure[j];
  return prefix;
}

// Mass of the arc [x - r, x + r]; cell j carries its weight uniformly over
// [(j - 1/2) h, (j + 1/2) h).
double arc_measure(const EquilibriumState& state, const Eigen::VectorXd& prefix, double x, double r) {
  if (2.0 * r >= 1.0) return 1.0;
  const int n = state.grid.size();
  auto cumulative = [&](double y) {
    const double c = y / state.grid.step() + 0.5;
    const double fl = std::floor(c);
    const long whole = static_cast<long>(fl);
    long q = whole / n;
    long rem = whole % n;
    if (rem < 0) {
      rem += n;
      --q;
    }
    return static_cast<double>(q) + prefix[rem] + (c - fl) * state.measure[rem];
  };
  return cumulative(x + r) - cumulative(x - r);
}

}  // namespace

double ball_measure(const EquilibriumState& state, double x, double r) {
  return arc_measure(state, measure_prefix(state), x, r);
}

DoublingReport doubling_check(const EquilibriumState& state, const std::vector<double>& ratios,
                              const std::vector<double>& radii) {
  DoublingReport rep;
  const auto& grid = state.grid;
  const int n = grid.size();
  const Eigen::VectorXd prefix = measure_prefix(state);

  for (double k : ratios) {
    std::vector<double> series;
    for (double r : radii) {
      DoublingEntry e;
      e.k = k;
      e.r = r;
      e.resolved = r >= 2.0 * grid.step();
      if (e.resolved) {
        for (int j = 0; j < n; ++j) {
          const double x = grid.point(j);
          const double ratio = arc_measure(state, prefix, x, k * r) / arc_measure(state, prefix, x, r);
          if (ratio > e.max_ratio) {
            e.max_ratio = ratio;
            e.worst_center = x;
          }
        }
        rep.max_ratio = std::max(rep.max_ratio, e.max_ratio);
        series.push_back(e.max_ratio);
      }
      rep.entries.push_back(e);
    }
    // Growth across shrinking radii (radii are expected in decreasing order).
    if (series.size() >= 3) {
      bool increasing = true;
      for (std::size_t i = 1; i < series.size(); ++i) {
        increasing = increasing && series[i] > series[i - 1] * (1 + 1e-3);
      }
      if (increasing && series.back() > 2.0 * series.front()) rep.unbounded_growth = true;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------

SmoothingReport smooth_potential(const Potential& potential, double b, int fine_grid) {
  if (b < 1.0) throw std::invalid_argument("smoothing parameter b must be >= 1");
  SmoothingReport rep;
  rep.width = 1.0 / std::sqrt(b);
  const int n = fine_grid;
  const double h = 1.0 / n;
  Eigen::VectorXd raw(n);
  for (int i = 0; i < n; ++i) raw[i] = potential(i * h);

  const int half = static_cast<int>(std::floor(rep.width / h));
  std::vector<double> kern(2 * half + 1), dkern(2 * half + 1);
  double mass = 0.0;
  for (int m = -half; m <= half; ++m) {
    const double y = m * h / rep.width;
    const double q = 1.0 - y * y;
    kern[m + half] = q * q;
    dkern[m + half] = -4.0 * y * q / rep.width;
    mass += kern[m + half];
  }
  Eigen::VectorXd smooth(n), slope(n);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0, dacc = 0.0;
    for (int m = -half; m <= half; ++m) {
      const double v = raw[((i - m) % n + n) % n];
      acc += kern[m + half] * v;
      dacc += dkern[m + half] * v;
    }
    smooth[i] = acc / mass;
    slope[i] = dacc / mass;
  }

  rep.sup_error = (smooth - raw).cwiseAbs().maxCoeff();
  if (potential.regularity == Regularity::Holder) {
    rep.error_bound = potential.norm * std::pow(1.0 / b, potential.holder_exponent / 2.0);
  } else {
    rep.error_bound = potential.norm / std::sqrt(b);
  }
  rep.c1_norm = smooth.cwiseAbs().maxCoeff() + slope.cwiseAbs().maxCoeff();

  auto grid = std::make_shared<PeriodicGrid>(n);
  auto values = std::make_shared<Eigen::VectorXd>(smooth);
  rep.smoothed.value = [grid, values](double u) { return grid->interpolate(*values, u); };
  rep.smoothed.regularity = Regularity::C1;
  rep.smoothed.norm = rep.c1_norm;
  rep.smoothed.name = potential.name + "_smoothed";
  return rep;
}

}  // namespace skewmix

#include "skewmix/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "skewmix/errors.hpp"

namespace skewmix {

using cd = std::complex<double>;

// ---------------------------------------------------------------------------
// observables

SuspensionObservable product_observable(const TrigSeries& base, GroupKind kind, int label) {
  SuspensionObservable phi;
  const double base_c1 = std::abs(base.constant) + base.oscillation_bound() + base.derivative_bound();
  if (kind == GroupKind::SO2) {
    phi.value = [base, label](double u, const GroupElement& g, double) {
      return base.value(u) * std::cos(label * g.angle());
    };
    phi.c1_norm = base_c1 * (1.0 + std::abs(label));
    phi.name = "base*cos(" + std::to_string(label) + " angle)";
  } else {
    const Irrep rho = Irrep::su2_twice_spin(label);
    phi.value = [base, rho](double u, const GroupElement& g, double) {
      return base.value(u) * irrep_matrix(rho, g).trace().real() / rho.dim();
    };
    phi.c1_norm = base_c1 * (1.0 + rho.spin());
    phi.name = "base*chi_" + rho.name();
  }
  return phi;
}

double suspension_mean(const SuspensionObservable& phi, const EquilibriumState& state, const RoofFunction& roof,
                       const HaarQuadrature& quad, int time_nodes) {
  std::vector<double> x, w;
  {
    // Gauss-Legendre on [0, 1] from the Jacobi matrix.
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(time_nodes, time_nodes);
    for (int k = 1; k < time_nodes; ++k) {
      const double b = k / std::sqrt(4.0 * k * k - 1.0);
      jac(k, k - 1) = jac(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
    for (int k = 0; k < time_nodes; ++k) {
      x.push_back(0.5 * (es.eigenvalues()[k] + 1.0));
      w.push_back(es.eigenvectors()(0, k) * es.eigenvectors()(0, k));
    }
  }
  double total = 0.0, mass = 0.0;
  const auto& grid = state.grid;
  for (int j = 0; j < grid.size(); ++j) {
    const double u = grid.point(j);
    const double tau = roof(u);
    double acc = 0.0;
    for (std::size_t q = 0; q < quad.size(); ++q) {
      double inner = 0.0;
      for (int k = 0; k < time_nodes; ++k) inner += w[k] * phi(u, quad.nodes()[q], tau * x[k]);
      acc += quad.weights()[q] * inner * tau;
    }
    total += state.measure[j] * acc;
    mass += state.measure[j] * tau;
  }
  return total / mass;
}

void certify_mean_zero(SuspensionObservable& phi, const EquilibriumState& state, const RoofFunction& roof,
                       const HaarQuadrature& quad) {
  phi.measured_mean = suspension_mean(phi, state, roof, quad);
  phi.mean_zero = std::abs(phi.measured_mean) <= 1e-6 * std::max(phi.c1_norm, 1e-300);
}

// ---------------------------------------------------------------------------
// Monte Carlo

namespace {

struct ShardResult {
  std::vector<std::vector<double>> batch_means;  // [batch][row]
};

ShardResult run_shard(const ExpandingModel& model, const RoofFunction& roof, const HolonomyCocycle& cocycle,
                      const EquilibriumState& state, const CorrelationSetup& setup,
                      const std::vector<double>& distinct, const std::vector<std::vector<int>>& index,
                      double tau_bar, std::uint64_t count, int shard) {
  std::seed_seq seq{static_cast<std::uint64_t>(setup.seed), static_cast<std::uint64_t>(shard), std::uint64_t{0x9e37}};
  std::mt19937_64 rng(seq);
  std::discrete_distribution<int> cell(state.measure.data(), state.measure.data() + state.measure.size());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto& grid = state.grid;
  const std::size_t rows = setup.time_points.size();
  const int batches = setup.batches_per_shard;
  ShardResult res;
  res.batch_means.assign(batches, std::vector<double>(rows, 0.0));
  std::vector<SuspensionPoint> path(distinct.size());
  for (int b = 0; b < batches; ++b) {
    const std::uint64_t lo = count * b / batches;
    const std::uint64_t hi = count * (b + 1) / batches;
    std::vector<double>& acc = res.batch_means[b];
    for (std::uint64_t k = lo; k < hi; ++k) {
      const int j = cell(rng);
      const double u = wrap_unit(grid.point(j) + (unit(rng) - 0.5) * grid.step());
      SuspensionPoint p;
      p.u = u;
      p.g = group::haar_sample(cocycle.kind, rng);
      const double tau = roof(u);
      p.s = unit(rng) * tau;
      if (p.s >= tau) p.s = 0.0;
      const double weight = tau / tau_bar;
      const double head = weight * setup.observables[0](p.u, p.g, p.s);
      double last = 0.0;
      SuspensionPoint q = p;
      for (std::size_t m = 0; m < distinct.size(); ++m) {
        q = flow(q, distinct[m] - last, model, roof, cocycle);
        last = distinct[m];
        path[m] = q;
      }
      for (std::size_t r = 0; r < rows; ++r) {
        double prod = head;
        for (std::size_t i = 0; i < index[r].size(); ++i) {
          const SuspensionPoint& x = path[index[r][i]];
          prod *= setup.observables[i + 1](x.u, x.g, x.s);
        }
        acc[r] += prod;
      }
    }
    const double n = static_cast<double>(hi - lo);
    for (double& a : acc) a = n > 0 ? a / n : 0.0;
  }
  return res;
}

}  // namespace

CorrelationSeries correlate(const ExpandingModel& model, const RoofFunction& roof, const HolonomyCocycle& cocycle,
                            const EquilibriumState& state, const CorrelationSetup& setup) {
  if (setup.observables.size() < 2) throw std::invalid_argument("need phi_0 and at least one more observable");
  for (const auto& o : setup.observables) {
    if (!o.mean_zero) throw DomainError("observable '" + o.name + "' is not certified mean zero");
  }
  if (setup.samples < 1000) throw std::invalid_argument("at least 10^3 samples are required");
  const std::size_t k = setup.observables.size() - 1;
  std::vector<double> distinct;
  for (const auto& row : setup.time_points) {
    if (row.size() != k) throw std::invalid_argument("each time row needs one entry per observable");
    for (double t : row) {
      if (t < 0) throw DomainError("times must be non-negative");
      distinct.push_back(t);
    }
  }
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<std::vector<int>> index;
  CorrelationSeries series;
  for (const auto& row : setup.time_points) {
    std::vector<int> idx;
    for (double t : row) {
      idx.push_back(static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), t) - distinct.begin()));
    }
    index.push_back(std::move(idx));
    const double tmax = *std::max_element(row.begin(), row.end());
    if (!series.times.empty() && tmax <= series.times.back()) {
      throw std::invalid_argument("series times must be strictly increasing");
    }
    series.times.push_back(tmax);
  }

  double tau_bar = 0.0;
  for (int j = 0; j < state.grid.size(); ++j) tau_bar += state.measure[j] * roof(state.grid.point(j));

  const int shards = std::max(1, setup.shards);
  std::vector<ShardResult> results(shards);
  auto work = [&](int s) {
    const std::uint64_t lo = setup.samples * s / shards;
    const std::uint64_t hi = setup.samples * (s + 1) / shards;
    results[s] = run_shard(model, roof, cocycle, state, setup, distinct, index, tau_bar, hi - lo, s);
  };
  const int threads = std::clamp(setup.threads, 1, shards);
  if (threads == 1) {
    for (int s = 0; s < shards; ++s) work(s);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (int s = t; s < shards; s += threads) work(s);
      });
    }
    for (auto& th : pool) th.join();
  }

  const std::size_t rows = setup.time_points.size();
  series.beta.assign(rows, 0.0);
  series.std_error.assign(rows, 0.0);
  series.samples = setup.samples;
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<double> means;
    for (const auto& res : results) {
      for (const auto& b : res.batch_means) means.push_back(b[r]);
    }
    double mean = 0.0;
    for (double m : means) mean += m;
    mean /= means.size();
    double var = 0.0;
    for (double m : means) var += (m - mean) * (m - mean);
    var /= (means.size() - 1);
    series.beta[r] = mean;
    series.std_error[r] = std::sqrt(var / means.size());
  }
  return series;
}

// ---------------------------------------------------------------------------
// fitting

DecayFit fit_decay_rate(const CorrelationSeries& series) {
  DecayFit fit;
  std::vector<double> t, y, w;
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    const double b = std::abs(series.beta[i]);
    const double se = i < series.std_error.size() ? series.std_error[i] : 0.0;
    if (!(b > 0.0) || b < 2.0 * se) {
      fit.excluded_times.push_back(series.times[i]);
      continue;
    }
    t.push_back(series.times[i]);
    y.push_back(std::log(b));
    w.push_back(se > 0 ? (b / se) * (b / se) : 1.0);
    fit.used_times.push_back(series.times[i]);
  }
  if (t.size() < 6) throw InsufficientSignal("fewer than 6 points above the noise floor");
  double sw = 0, st = 0, sy = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    sw += w[i];
    st += w[i] * t[i];
    sy += w[i] * y[i];
  }
  const double tm = st / sw, ym = sy / sw;
  double stt = 0, sty = 0, syy = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    stt += w[i] * (t[i] - tm) * (t[i] - tm);
    sty += w[i] * (t[i] - tm) * (y[i] - ym);
    syy += w[i] * (y[i] - ym) * (y[i] - ym);
  }
  const double slope = sty / stt;
  const double icept = ym - slope * tm;
  double sse = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double e = y[i] - (icept + slope * t[i]);
    sse += w[i] * e * e;
  }
  fit.rate = std::exp(slope);
  fit.prefactor = std::exp(icept);
  fit.r_squared = syy > 0 ? 1.0 - sse / syy : 0.0;
  fit.no_decay = fit.rate >= 1.0;
  return fit;
}

// ---------------------------------------------------------------------------
// Laplace transforms

cd hat_transform(const SuspensionObservable& phi, cd xi, double u, const GroupElement& g, const RoofFunction& roof,
                 int k) {
  if (!(xi.real() < 0.0 && xi.real() > -1.0 / k)) throw DomainError("hat transform needs -1/k < Re xi < 0");
  const double tau = roof(u);
  const int panels = std::max(4, static_cast<int>(std::ceil((std::abs(xi.imag()) + 1.0) * tau)));
  const double h = tau / panels;
  cd total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = p * h;
    auto re = [&](double t) { return (phi(u, g, t) * std::exp(-xi * t)).real(); };
    auto im = [&](double t) { return (phi(u, g, t) * std::exp(-xi * t)).imag(); };
    const double r = boost::math::quadrature::gauss<double, 20>::integrate(re, a, a + h);
    const double i = boost::math::quadrature::gauss<double, 20>::integrate(im, a, a + h);
    total += cd(r, i);
  }
  return total;
}

MajorantReport laplace_majorant(const std::vector<MajorantComponent>& components,
                                const std::vector<double>& fibre_norms, int n_max, int k) {
  MajorantReport rep;
  double fact = 1.0;
  for (int i = 2; i <= k; ++i) fact *= i;
  double prod = 1.0;
  for (double v : fibre_norms) prod *= v;
  for (const auto& c : components) {
    const double amp = c.prefactor * c.hat_norm * prod;
    if (amp == 0.0) continue;
    if (c.rate >= 1.0) {
      rep.certifying = false;
      rep.value = std::numeric_limits<double>::infinity();
      rep.tail = std::numeric_limits<double>::infinity();
      return rep;
    }
    double rn = 1.0;
    for (int n = 1; n <= n_max; ++n) {
      rn *= c.rate;
      rep.value += fact * amp * rn;
    }
    rep.tail += fact * amp * rn * c.rate / (1.0 - c.rate);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// kernel integral

double kernel_integral(double x, double a, double tolerance) {
  x = std::abs(x);
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  std::vector<double> trace;
  double total = 0.0;
  auto piece = [&](auto f, double lo, double hi) {
    double err = 0.0;
    const double v = GK::integrate(f, lo, hi, 20, tolerance, &err);
    trace.push_back(err);
    if (!(err <= 100.0 * tolerance * std::max(1.0, std::abs(v)))) {
      throw ConvergenceError("kernel integral did not converge", trace);
    }
    total += v;
  };
  const double inf = std::numeric_limits<double>::infinity();
  // y >= 0, with y = e^t - 1.
  piece([&](double t) { return std::exp(-a * t) * std::pow(1.0 + x * std::exp(-t), -a); }, 0.0, inf);
  // -x/2 <= y <= 0, w = -y = e^t - 1.
  piece([&](double t) { return std::pow(2.0 + x - std::exp(t), -a); }, 0.0, std::log1p(0.5 * x));
  // -x <= y <= -x/2, v = x + y = e^t - 1.
  piece([&](double t) { const double v = std::expm1(t); return std::pow(1.0 + v, 1.0 - a) / (1.0 + x - v); },
        0.0, std::log1p(0.5 * x));
  // y <= -x, v = -(x + y) = e^t - 1.
  piece([&](double t) { return std::exp(-a * t) / (1.0 + x * std::exp(-t)); }, 0.0, inf);
  return total;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(lo * std::pow(hi / lo, count == 1 ? 0.0 : double(i) / (count - 1)));
  return out;
}

KernelFit kernel_decay_fit(double a, const std::vector<double>& xs) {
  KernelFit fit;
  fit.xs = xs;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double x : xs) {
    const double f = kernel_integral(x, a);
    fit.values.push_back(f);
    const double lx = std::log1p(x), ly = std::log(f);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(xs.size());
  fit.exponent = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
  return fit;
}

KernelFit kernel_integral_check(double eps, const std::vector<double>& xs) {
  if (!(eps > 0.0 && eps < 0.1)) throw DomainError("kernel check needs 0 < eps < 0.1");
  return kernel_decay_fit(0.5 - eps, xs);
}

}  // namespace skewmix

#include "skewmix/lemmas.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "skewmix/accessibility.hpp"
#include "skewmix/correlation.hpp"
#include "skewmix/dolgopyat.hpp"

namespace skewmix {

using cd = std::complex<double>;
constexpr double two_pi = 2.0 * std::numbers::pi;

namespace {

struct RandomTrig {
  std::vector<double> a, b;
  double phase = 0.0;

  double value(double u) const {
    double s = 0.0;
    for (std::size_t m = 0; m < a.size(); ++m) {
      s += a[m] * std::cos(two_pi * (m + 1) * u) + b[m] * std::sin(two_pi * (m + 1) * u);
    }
    return s;
  }
  double sup() const {
    double s = 0.0;
    for (std::size_t m = 0; m < a.size(); ++m) s += std::abs(a[m]) + std::abs(b[m]);
    return s;
  }
  double slope() const {
    double s = 0.0;
    for (std::size_t m = 0; m < a.size(); ++m) s += two_pi * (m + 1) * (std::abs(a[m]) + std::abs(b[m]));
    return s;
  }
};

RandomTrig random_trig(std::mt19937_64& rng, int modes) {
  std::normal_distribution<double> nd;
  RandomTrig t;
  for (int m = 0; m < modes; ++m) {
    t.a.push_back(nd(rng) / (m + 1));
    t.b.push_back(nd(rng) / (m + 1));
  }
  return t;
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

DichotomyCase random_dichotomy_case(std::mt19937_64& rng, const PeriodicGrid& grid, const ExpandingModel& model,
                                    int max_depth) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  DichotomyCase c;
  c.C = std::exp(std::log(1.0) + unit(rng) * std::log(50.0));
  c.delta = dichotomy_constant(model.bounds().f) / c.C;
  c.center = unit(rng);
  const int depth = static_cast<int>(unit(rng) * (max_depth + 1)) % (max_depth + 1);
  for (int k = 0; k < depth; ++k) {
    c.past.branches.push_back(static_cast<int>(unit(rng) * model.branch_count()) % model.branch_count());
  }

  const RandomTrig logc = random_trig(rng, 3);
  const double log_scale = 0.5 * c.C / logc.slope();
  const double amplitude = 0.5 + 1.5 * unit(rng);
  const RandomTrig mod = random_trig(rng, 3);
  const double mod_scale = std::min(0.45 / mod.sup(), 0.3 * c.C / mod.slope());
  const double centre = 0.1 + 0.8 * unit(rng);
  const double mod_amp = std::min(centre, 1.0 - centre) / 0.5 * mod_scale * 0.99;
  const double freq = 1.0 + std::floor(3.0 * unit(rng));
  const double twist = 0.1 * c.C / (two_pi * freq) * unit(rng);

  c.control.resize(grid.size());
  for (int j = 0; j < grid.size(); ++j) c.control[j] = amplitude * std::exp(log_scale * logc.value(grid.point(j)));
  c.phi = Observable::scalar(Irrep::so2(1), grid, [&](double u) {
    const double size = amplitude * std::exp(log_scale * logc.value(u)) * (centre + mod_amp * mod.value(u));
    return std::polar(size, twist * std::sin(two_pi * freq * u));
  });
  return c;
}

std::pair<Eigen::VectorXcd, Eigen::VectorXcd> random_separated_pair(std::mt19937_64& rng, int dim, double eps) {
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&] {
    Eigen::VectorXcd v(dim);
    for (int k = 0; k < dim; ++k) v[k] = cd(nd(rng), nd(rng));
    return v;
  };
  while (true) {
    Eigen::VectorXcd v = draw(), w = draw();
    v *= std::exp(2.0 * nd(rng)) / v.norm();
    w *= std::exp(2.0 * nd(rng)) / w.norm();
    // Half the draws are pushed towards the separation boundary.
    if (unit(rng) < 0.5) {
      const Eigen::VectorXcd vn = v / v.norm();
      Eigen::VectorXcd dir = w / w.norm() - vn;
      if (dir.norm() == 0) continue;
      const double target = eps * (1.0 + 0.05 * unit(rng));
      Eigen::VectorXcd wn = vn + dir / dir.norm() * target;
      for (int it = 0; it < 50; ++it) {
        wn /= wn.norm();
        const double sep = (wn - vn).norm();
        if (std::abs(sep - target) < 1e-12) break;
        wn = vn + (wn - vn) * (target / sep);
      }
      w = wn / wn.norm() * w.norm();
    }
    if ((v / v.norm() - w / w.norm()).norm() >= eps) return {v, w};
  }
}

double su2_test_function(const GroupElement& g) {
  const auto q = g.quaternion();
  return std::exp(0.8 * q[0] + 0.3 * q[1] - 0.2 * q[3]);
}

std::vector<LemmaCheck> run_lemma_suite(const ExpandingModel& model, const RoofFunction& roof,
                                        const HolonomyCocycle& cocycle, const Potential& potential,
                                        const LemmaSuiteOptions& opt) {
  std::vector<LemmaCheck> out;
  std::mt19937_64 rng(opt.seed);
  const auto state = rpf_solve(model, potential, opt.grid);

  {
    int violations = 0, breaches = 0;
    double lip = 0.0;
    std::string vw, bw, lw;
    for (int k = 0; k < opt.dichotomy_cases; ++k) {
      const auto c = random_dichotomy_case(rng, state.grid, model);
      const auto rep = dichotomy_check(c.phi, c.control, state.grid, model, c.C, c.delta, c.past, c.center);
      if (rep.outcome == Dichotomy::Violation) {
        if (violations++ == 0) vw = "case " + std::to_string(k) + " center " + fmt_double(c.center);
      }
      if (rep.precondition_breach) {
        if (breaches++ == 0) bw = rep.breach + " at " + fmt_double(rep.witness);
      }
      const double ratio = rep.pullback_lipschitz / rep.lipschitz_bound;
      if (ratio > lip) {
        lip = ratio;
        lw = "case " + std::to_string(k) + " C " + fmt_double(c.C);
      }
    }
    out.push_back({"dichotomy_violations", double(violations), 0.0, violations == 0, vw});
    out.push_back({"dichotomy_hypothesis_breaches", double(breaches), 0.0, breaches == 0, bw});
    out.push_back({"lipschitz_propagation", lip, 1.0, lip <= 1.0, lw});
  }

  {
    int violations = 0;
    std::string w;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < opt.cancellation_pairs; ++k) {
      const double eps = 0.05 + 1.9 * unit(rng);
      const auto [v, wv] = random_separated_pair(rng, 4, eps);
      const auto rep = cancellation_bound(v, wv, eps);
      if (!rep.holds && violations++ == 0) w = "pair " + std::to_string(k) + " eps " + fmt_double(eps);
    }
    out.push_back({"cancellation_corrected_violations", double(violations), 0.0, violations == 0, w});
    Eigen::VectorXcd v(2), wv(2);
    v << 1.0, 0.0;
    wv << 0.0, 1.0;
    const auto rep = cancellation_bound(v, wv, std::sqrt(2.0));
    const double excess = rep.sum_norm - rep.uncorrected_bound;
    out.push_back({"cancellation_erratum_witness", excess, 0.0, excess > 0 && rep.holds, "v=(1,0) w=(0,1)"});
  }

  {
    const Irrep rho = cocycle.kind == GroupKind::SO2 ? Irrep::so2(1) : Irrep::su2_twice_spin(1);
    TwistedOperator op(model, state, potential, roof, cocycle, {state.pressure, opt.im_z}, rho);
    std::vector<double> region = state.grid.points();
    NliOptions nopt;
    const auto cert = nli_certificate(model, cocycle, rho, region, nopt);
    if (cert.refused || !(cert.eps_min > 0)) {
      out.push_back({"uniform_c_budget", 0.0, 0.0, false, "no accessibility certificate"});
    } else {
      const auto plan = plan_dolgopyat(op, 1.0, cert.eps_min, opt.depth_cap);
      const auto rep = uniform_c_budget(op, plan.C, plan.n0);
      out.push_back({"uniform_c_budget", rep.margin, 0.0, rep.pass,
                     "C " + fmt_double(plan.C) + " n " + std::to_string(plan.n0)});
    }
  }

  {
    const auto fit = kernel_integral_check(0.05, log_spaced(1e6, 1e12, 25));
    out.push_back({"kernel_integral_exponent", fit.exponent, 0.35, fit.exponent >= 0.35, "eps 0.05 x in [1e6,1e12]"});
  }

  {
    const auto quad = HaarQuadrature::euler(32, 32, 64);
    const auto rep = fourier_decay_check(su2_test_function, 2, 12, quad);
    // Casimir bound: ||rho||^2 <= j(j+1) and ||Delta phi|| <= 3 ||phi||_{C^2}.
    out.push_back({"fourier_decay_su2_n2", rep.max_ratio, 3.0, rep.max_ratio <= 3.0, "j <= 6"});
  }

  {
    const auto holder = Potential::holder([](double u) { return std::sqrt(std::abs(u - 0.5)); }, 0.5, "sqrt");
    double previous = std::numeric_limits<double>::infinity();
    for (double b : {10.0, 100.0, 1000.0}) {
      const auto rep = smooth_potential(holder, b);
      const std::string tag = "b=" + fmt_double(b);
      out.push_back({"mollification_sup_error_" + tag, rep.sup_error, rep.error_bound,
                     rep.sup_error <= rep.error_bound, tag});
      const double scaled = rep.c1_norm / std::sqrt(b);
      if (std::isfinite(previous)) {
        out.push_back({"mollification_c1_over_sqrt_b_" + tag, scaled, previous, scaled <= previous, tag});
      }
      previous = scaled;
    }
  }
  return out;
}

}  // namespace skewmix

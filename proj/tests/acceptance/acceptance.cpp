// One line per acceptance criterion. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "skewmix/accessibility.hpp"
#include "skewmix/correlation.hpp"
#include "skewmix/dolgopyat.hpp"
#include "skewmix/errors.hpp"
#include "skewmix/lemmas.hpp"
#include "skewmix/transfer.hpp"

using namespace skewmix;
using cd = std::complex<double>;
constexpr double two_pi = 2.0 * std::numbers::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& title, double time_limit, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (time_limit > 0 && secs > time_limit) {
    o.pass = false;
    o.detail += " | over time limit " + std::to_string(time_limit) + " s";
  }
  std::printf("[%s] %2d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str(), secs);
  std::fflush(stdout);
  failures += !o.pass;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const ExpandingModel kDoubling = ExpandingModel::doubling();
const TrigSeries kHalfCos{0.0, {0.5}, {}};
const TrigSeries kSinAngle{0.0, {}, {1.0}};

HolonomyCocycle su2_benchmark() {
  return HolonomyCocycle::su2_exp(TrigSeries{0, {0.7}, {}}, TrigSeries{0, {}, {0.5}}, TrigSeries{});
}

TrigSeries random_series(std::mt19937_64& rng, int modes) {
  std::normal_distribution<double> nd;
  TrigSeries s;
  s.constant = nd(rng);
  for (int k = 0; k < modes; ++k) {
    s.cos_coeffs.push_back(nd(rng) / (k + 1));
    s.sin_coeffs.push_back(nd(rng) / (k + 1));
  }
  return s;
}

// Criterion 15 observables and series; shared with the determinism check.
struct CorrelationRun {
  CorrelationSeries series;
  std::string csv;
};

CorrelationRun correlation_run(int k, std::uint64_t seed) {
  const auto roof = RoofFunction::standard();
  const auto cocycle = HolonomyCocycle::so2_angle(kSinAngle);
  const auto state = rpf_solve(kDoubling, Potential::constant(0), 1024);
  const auto quad = HaarQuadrature::circle(64);
  auto make = [&](int label) {
    auto phi = product_observable(TrigSeries{1.0, {}, {}}, GroupKind::SO2, label);
    certify_mean_zero(phi, state, roof, quad);
    return phi;
  };
  CorrelationSetup setup;
  setup.observables = k == 1 ? std::vector{make(1), make(1)} : std::vector{make(2), make(1), make(1)};
  for (int i = 0; i <= 40; ++i) {
    const double t = 0.5 * i;
    setup.time_points.push_back(k == 1 ? std::vector{t} : std::vector{0.5 * t, t});
  }
  setup.samples = 1000000;
  setup.seed = seed;
  CorrelationRun run;
  run.series = correlate(kDoubling, roof, cocycle, state, setup);
  run.csv = "t,beta,stderr\n";
  for (std::size_t i = 0; i < run.series.times.size(); ++i) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", run.series.times[i], run.series.beta[i],
                  run.series.std_error[i]);
    run.csv += buf;
  }
  return run;
}

}  // namespace

int main() {
  criterion(1, "RPF exactness", 1.0, [] {
    const auto st = rpf_solve(kDoubling, Potential::constant(0), 4096);
    const double dp = std::abs(st.pressure - std::log(2.0));
    const double dh = (st.eigenfunction.array() - 1.0).abs().maxCoeff();
    const double dn = (st.measure.array() * 4096.0 - 1.0).abs().maxCoeff();
    return Outcome{dp <= 1e-10 && dh <= 1e-8 && dn <= 1e-8,
                   fmt("|P-log2|=%.2e", dp) + fmt(" |h-1|=%.2e", dh) + fmt(" |nu-uniform|=%.2e", dn)};
  });

  criterion(2, "Duality of the normalised operator", 5.0, [] {
    const auto pot = Potential::smooth(kHalfCos);
    const auto st = rpf_solve(kDoubling, pot, 1024);
    std::mt19937_64 rng(2);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const auto s = random_series(rng, 8);
      Eigen::VectorXd f(1024), df(1024);
      for (int j = 0; j < 1024; ++j) {
        f[j] = s.value(st.grid.point(j));
        df[j] = s.derivative(st.grid.point(j));
      }
      const double c1 = f.cwiseAbs().maxCoeff() + df.cwiseAbs().maxCoeff();
      const double gap = std::abs(st.integrate(apply_normalised(kDoubling, pot, st, f)) - st.integrate(f));
      worst = std::max(worst, gap / c1);
    }
    return Outcome{worst <= 1e-6, fmt("max |int L phi - int phi| / ||phi||_C1 = %.2e", worst)};
  });

  criterion(3, "Conformality of the normalised weight", 0.0, [] {
    double worst = 0.0;
    for (const auto& pot : {Potential::constant(0), Potential::smooth(kHalfCos)}) {
      const auto st = rpf_solve(kDoubling, pot, 4096);
      NormalizedWeight w(kDoubling, st, pot, RoofFunction::standard(), st.pressure);
      for (int j = 0; j < 4096; ++j) {
        const double u = st.grid.point(j);
        cd s = 0;
        for (int i = 0; i < 2; ++i) s += std::exp(w.at(kDoubling.branch_inverse(i, u), u));
        worst = std::max(worst, std::abs(s - 1.0));
      }
    }
    return Outcome{worst <= 1e-8, fmt("max |sum e^alpha - 1| = %.2e over 2 x 4096 points", worst)};
  });

  criterion(4, "Twisted contraction on the accessible SO2 benchmark", 120.0, [] {
    const auto pot = Potential::constant(0);
    const auto st = rpf_solve(kDoubling, pot, 1024);
    const auto coc = HolonomyCocycle::so2_angle(kSinAngle);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> nd;
    double worst_rate = 0.0, worst_ratio = 0.0;
    bool ok = true;
    for (int n = 1; n <= 4; ++n) {
      for (double im : {0.0, 1.0, 10.0, 100.0}) {
        TwistedOperator op(kDoubling, st, pot, RoofFunction::standard(), coc, cd(st.pressure, im), Irrep::so2(n));
        std::vector<Observable> family;
        for (int k = 0; k < 5; ++k) {
          double a[4];
          for (double& x : a) x = nd(rng);
          family.push_back(Observable::scalar(Irrep::so2(n), st.grid, [&](double u) {
            return cd(1 + 0.3 * a[0] * std::cos(two_pi * u) + 0.3 * a[1] * std::sin(two_pi * u),
                      0.3 * a[2] * std::cos(2 * two_pi * u) + 0.2 * a[3]);
          }));
        }
        const auto rep = contraction_rate(op, family, 40);
        for (const auto& traj : rep.trajectories) {
          worst_ratio = std::max(worst_ratio, traj[40].l2_norm / traj[0].c1_norm);
        }
        worst_rate = std::max(worst_rate, rep.rate);
        ok = ok && rep.rate < 0.999 && !rep.no_contraction;
      }
    }
    ok = ok && worst_ratio <= 0.1;
    return Outcome{ok, fmt("max rate %.4f", worst_rate) + fmt(", max ||L^40 phi||_L2/||phi||_C1 = %.2e", worst_ratio)};
  });

  criterion(5, "Negative control without accessibility", 5.0, [] {
    const auto pot = Potential::constant(0);
    const auto st = rpf_solve(kDoubling, pot, 1024);
    TwistedOperator op(kDoubling, st, pot, RoofFunction::standard(), HolonomyCocycle::trivial(GroupKind::SO2),
                       st.pressure, Irrep::so2(1));
    const auto one = Observable::scalar(Irrep::so2(1), st.grid, [](double) { return cd(1.0, 0.0); });
    const auto traj = iterate_norms(op, one, 40);
    const double ratio = traj[40].l2_norm / traj[0].l2_norm;
    return Outcome{ratio >= 0.5, fmt("||L^40 1|| / ||1|| = %.6f", ratio)};
  });

  criterion(6, "Degenerate affine-angle cocycle", 0.0, [] {
    const auto coc = HolonomyCocycle::so2_winding(1);
    int zero = 0;
    for (int j = 0; j < 256; ++j) zero += transitivity_group(kDoubling, coc, j / 256.0).dimension == 0;
    return Outcome{zero == 256, std::to_string(zero) + "/256 points with dimension 0"};
  });

  criterion(7, "Accessibility certificates", 60.0, [] {
    std::vector<double> pts;
    for (int j = 0; j < 256; ++j) pts.push_back(j / 256.0);
    NliOptions opt;
    opt.depth = 20;
    opt.transitivity.depth = 20;
    opt.transitivity.past_length = 6;
    const auto so2 = nli_certificate(kDoubling, HolonomyCocycle::so2_angle(kSinAngle), Irrep::so2(1), pts, opt);
    int good = 0;
    for (std::size_t j = 0; j < pts.size(); ++j) good += so2.dimension[j] == 1 && so2.eps_measured[j] > 0;
    const auto su2 = su2_benchmark();
    int full = 0;
    for (double x : pts) full += transitivity_group(kDoubling, su2, x, opt.transitivity).dimension == 3;
    const bool ok = good >= 0.99 * 256 && full >= 0.95 * 256;
    return Outcome{ok, "SO2 " + std::to_string(good) + "/256 with dim 1 and eps > 0, SU2 " + std::to_string(full) +
                           "/256 with dim 3"};
  });

  criterion(8, "Ad-equivariance under gauge changes", 0.0, [] {
    const auto su2 = su2_benchmark();
    const auto g1 = constant_gauge(group::exp(AlgebraElement::su2(0.3, -0.5, 0.9)));
    const auto c2 = HolonomyCocycle::su2_exp(TrigSeries{0, {0.4}, {}}, TrigSeries{0, {}, {0.3}}, TrigSeries{0.1, {0.2}, {0.2}});
    const auto c3 = HolonomyCocycle::su2_exp(TrigSeries{0.5, {}, {0.2, 0.1}}, TrigSeries{-0.2, {0.3}, {}}, TrigSeries{0, {0.0, 0.25}, {}});
    const std::vector<Gauge> gauges{g1, Gauge{c2.value, c2.derivative}, Gauge{c3.value, c3.derivative}};
    TransitivityOptions opt;
    opt.depth = 40;
    double worst = 0.0;
    for (const auto& g : gauges) {
      worst = std::max(worst, gauge_equivariance(kDoubling, su2, g, {0.1, 0.23, 0.37, 0.61, 0.88}, opt).max_distance);
    }
    return Outcome{worst <= 1e-6, fmt("max Grassmann distance %.2e over 3 gauges x 5 points", worst)};
  });

  criterion(9, "Dolgopyat step soundness over 10 steps", 0.0, [] {
    const auto pot = Potential::constant(0);
    const auto st = rpf_solve(kDoubling, pot, 1024);
    const auto coc = HolonomyCocycle::so2_angle(kSinAngle);
    TwistedOperator op(kDoubling, st, pot, RoofFunction::standard(), coc, cd(st.pressure, 10.0), Irrep::so2(1));
    const auto cert = nli_certificate(kDoubling, coc, Irrep::so2(1), st.grid.points());
    auto phi = Observable::scalar(Irrep::so2(1), st.grid, [](double u) { return std::polar(0.5, two_pi * u); });
    Eigen::VectorXd control = Eigen::VectorXd::Ones(1024);
    bool ok = true;
    double worst_ratio = 0.0, worst_margin = 1.0;
    std::string why;
    for (int step = 0; step < 10; ++step) {
      const double C = 1.1 * measured_class_constant(phi, control, st.grid);
      const auto plan = plan_dolgopyat(op, C, cert.eps_min, 8);
      const auto r = dolgopyat_step(op, phi, control, plan, cert.mask);
      worst_ratio = std::max(worst_ratio, r.l2_ratio);
      worst_margin = std::min(worst_margin, r.domination_margin);
      if (!r.accepted || r.domination_margin < -1e-10 || !(r.l2_ratio < 1.0 - 1e-6)) {
        ok = false;
        if (why.empty()) why = " step " + std::to_string(step) + ": " + r.reason;
      }
      phi = r.phi_next;
      control = r.control_next;
    }
    return Outcome{ok, fmt("max L2 ratio 1 - %.3e", 1.0 - worst_ratio) + fmt(", min domination margin %.3e", worst_margin) + why};
  });

  criterion(10, "Cancellation lemma with erratum witness", 0.0, [] {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int violations = 0;
    for (int k = 0; k < 100000; ++k) {
      const double eps = 0.05 + 1.9 * unit(rng);
      const auto [v, w] = random_separated_pair(rng, 4, eps);
      violations += !cancellation_bound(v, w, eps).holds;
    }
    Eigen::VectorXcd v(2), w(2);
    v << 1.0, 0.0;
    w << 0.0, 1.0;
    const auto witness = cancellation_bound(v, w, std::sqrt(2.0));
    const bool ok = violations == 0 && !witness.uncorrected_holds && witness.holds;
    return Outcome{ok, std::to_string(violations) + " violations of the corrected bound in 1e5 pairs; witness " +
                           fmt("|v+w| = %.4f", witness.sum_norm) + fmt(" > %.4f", witness.uncorrected_bound)};
  });

  criterion(11, "Dichotomy on randomized pairs", 0.0, [] {
    std::mt19937_64 rng(11);
    const PeriodicGrid grid(1024);
    int violations = 0, breaches = 0, upper = 0, lower = 0;
    for (int k = 0; k < 1000; ++k) {
      const auto c = random_dichotomy_case(rng, grid, kDoubling);
      const auto rep = dichotomy_check(c.phi, c.control, grid, kDoubling, c.C, c.delta, c.past, c.center);
      violations += rep.outcome == Dichotomy::Violation;
      breaches += rep.precondition_breach;
      upper += rep.outcome == Dichotomy::Upper;
      lower += rep.outcome == Dichotomy::Lower;
    }
    return Outcome{violations == 0 && breaches == 0,
                   std::to_string(violations) + " violations, " + std::to_string(breaches) + " hypothesis breaches (" +
                       std::to_string(upper) + " upper, " + std::to_string(lower) + " lower)"};
  });

  criterion(12, "Fourier decay on SU2", 0.0, [] {
    const auto quad = HaarQuadrature::euler(32, 32, 64);
    const auto rep = fourier_decay_check(su2_test_function, 2, 12, quad);
    const double recorded = 3.0;
    return Outcome{rep.max_ratio <= recorded,
                   fmt("max ||rho||^2 ||phi^rho|| / ||phi||_C2 = %.3e", rep.max_ratio) + fmt(" <= %.1f for j <= 6", recorded)};
  });

  criterion(13, "Kernel integral decay exponent", 30.0, [] {
    const auto fit = kernel_integral_check(0.05, log_spaced(10.0, 1e4, 25));
    return Outcome{fit.exponent >= 0.35, fmt("fitted exponent %.4f (need >= 0.35)", fit.exponent)};
  });

  criterion(14, "Mollification of a 1/2-Hoelder potential", 0.0, [] {
    const auto pot = Potential::holder([](double u) { return std::sqrt(std::abs(u - 0.5)); }, 0.5, "sqrt");
    bool ok = true;
    double previous = std::numeric_limits<double>::infinity();
    std::string detail;
    for (double b : {10.0, 100.0, 1000.0}) {
      const auto rep = smooth_potential(pot, b);
      const double scaled = rep.c1_norm / std::sqrt(b);
      ok = ok && rep.sup_error <= pot.norm * std::pow(b, -0.25) && scaled <= previous;
      previous = scaled;
      detail += fmt(" b=%g:", b) + fmt(" err %.3f", rep.sup_error) + fmt(" <= %.3f", pot.norm * std::pow(b, -0.25)) +
                fmt(", C1/sqrt(b) %.3f", scaled);
    }
    return Outcome{ok, detail};
  });

  std::string first_csv;
  criterion(15, "Correlation decay by Monte Carlo", 120.0, [&] {
    const auto run1 = correlation_run(1, 1);
    first_csv = run1.csv;
    const auto fit1 = fit_decay_rate(run1.series);
    // Operator rate per unit time on the same character, over the Im z sweep.
    const auto pot = Potential::constant(0);
    const auto st = rpf_solve(kDoubling, pot, 1024);
    const auto roof = RoofFunction::standard();
    double mean_roof = 0.0;
    for (int j = 0; j < 1024; ++j) mean_roof += st.measure[j] * roof(st.grid.point(j));
    double op_rate = 0.0;
    for (double im : {0.0, 1.0, 10.0, 100.0}) {
      TwistedOperator op(kDoubling, st, pot, roof, HolonomyCocycle::so2_angle(kSinAngle), cd(st.pressure, im),
                         Irrep::so2(1));
      const auto one = Observable::scalar(Irrep::so2(1), st.grid, [](double) { return cd(1.0, 0.0); });
      op_rate = std::max(op_rate, contraction_rate(op, {one}, 40).rate);
    }
    op_rate = std::pow(op_rate, 1.0 / mean_roof);
    const auto run2 = correlation_run(2, 1);
    const auto fit2 = fit_decay_rate(run2.series);
    const bool ok = fit1.r_squared >= 0.9 && !fit1.no_decay && fit1.rate <= 3.0 * op_rate && fit2.r_squared >= 0.8 &&
                    !fit2.no_decay;
    return Outcome{ok, fmt("beta_1 rate %.4f", fit1.rate) + fmt(" R^2 %.4f", fit1.r_squared) +
                           fmt(", operator rate %.4f", op_rate) + fmt("; beta_2 rate %.4f", fit2.rate) +
                           fmt(" R^2 %.4f", fit2.r_squared)};
  });

  criterion(16, "Determinism of the correlation CSV", 0.0, [&] {
    const auto again = correlation_run(1, 1);
    const bool same = !first_csv.empty() && again.csv == first_csv;
    return Outcome{same, same ? "byte-identical CSV for seed 1" : "CSV differs between runs"};
  });

  std::printf("%d of 16 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

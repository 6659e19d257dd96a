#include "skewmix/runner.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "skewmix/accessibility.hpp"
#include "skewmix/config.hpp"
#include "skewmix/correlation.hpp"
#include "skewmix/errors.hpp"
#include "skewmix/lemmas.hpp"
#include "skewmix/transfer.hpp"

namespace skewmix {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

TrigSeries series_from(const json& node) {
  TrigSeries s;
  s.constant = node["constant"].get<double>();
  s.cos_coeffs = node["cos"].get<std::vector<double>>();
  s.sin_coeffs = node["sin"].get<std::vector<double>>();
  return s;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string hex(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

Irrep irrep_from(GroupKind kind, int label) {
  return kind == GroupKind::SO2 ? Irrep::so2(label) : Irrep::su2_twice_spin(label);
}

class Outputs {
 public:
  Outputs(fs::path dir, const json& config, std::string subcommand, bool deterministic)
      : dir_(std::move(dir)), config_(config), subcommand_(std::move(subcommand)), deterministic_(deterministic) {
    fs::create_directories(dir_);
  }

  fs::path path(const std::optional<std::string>& requested, const std::string& fallback) const {
    if (!requested) return dir_ / fallback;
    fs::path p(*requested);
    return p.is_absolute() ? p : dir_ / p;
  }

  void write(const fs::path& p, const std::string& body) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << body;
    if (!out) throw std::runtime_error("cannot write " + p.string());
    files_.push_back(p.lexically_relative(dir_).string());
  }

  void manifest() {
    json m;
    m["subcommand"] = subcommand_;
    m["config_hash"] = hex(config_hash(config_));
    m["seed"] = config_["run"]["seed"];
    m["threads"] = config_["run"]["threads"];
    m["deterministic"] = deterministic_;
    m["versions"] = {{"skewmix", version_string()},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                   std::to_string(EIGEN_MINOR_VERSION)},
                     {"boost", std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000)},
                     {"compiler", __VERSION__}};
    m["outputs"] = files_;
    m["config"] = config_;
    if (!deterministic_) {
      m["started_unix"] = std::chrono::duration_cast<std::chrono::seconds>(
                              std::chrono::system_clock::now().time_since_epoch())
                              .count();
    }
    std::ofstream out(dir_ / (subcommand_ + ".manifest.json"), std::ios::binary);
    out << m.dump(2) << "\n";
  }

 private:
  fs::path dir_;
  json config_;
  std::string subcommand_;
  bool deterministic_;
  std::vector<std::string> files_;
};

int cmd_pressure(const Experiment& ex, Outputs& out, const RunRequest& req) {
  const auto& cfg = ex.config;
  RpfOptions opt;
  opt.tolerance = cfg["thermo"]["tol"];
  const auto st = rpf_solve(ex.model, ex.potential, cfg["thermo"]["grid"], opt);
  json rep;
  rep["pressure"] = st.pressure;
  rep["residual"] = st.residual;
  rep["iterations"] = st.iterations;
  rep["grid"] = st.grid.size();
  rep["eigenfunction_min"] = st.eigenfunction.minCoeff();
  rep["eigenfunction_max"] = st.eigenfunction.maxCoeff();
  rep["model"] = ex.model.name();
  rep["potential"] = ex.potential.name;
  out.write(out.path(req.out, "pressure.json"), rep.dump(2) + "\n");
  std::string csv = "u,eigenfunction,measure\n";
  for (int j = 0; j < st.grid.size(); ++j) {
    csv += num(st.grid.point(j)) + "," + num(st.eigenfunction[j]) + "," + num(st.measure[j]) + "\n";
  }
  out.write(out.path(std::nullopt, "equilibrium.csv"), csv);
  return 0;
}

int cmd_spectrum(const Experiment& ex, Outputs& out, const RunRequest& req, std::ostream& log) {
  const auto& cfg = ex.config;
  const auto st = rpf_solve(ex.model, ex.potential, req.grid.value_or(cfg["thermo"]["grid"].get<int>()));
  const int label = req.irrep.value_or(1);
  const Irrep rho = irrep_from(ex.cocycle.kind, label);
  const double im = req.im_z.value_or(0.0);
  const int iters = req.iterations.value_or(cfg["transfer"]["iterations"].get<int>());
  TwistedOperator op(ex.model, st, ex.potential, ex.roof, ex.cocycle, {st.pressure, im}, rho);
  const auto phi = Observable::from_function(rho, st.grid, rho.dim(), [&](double u) {
    const std::complex<double> s(1.0 + 0.5 * std::cos(2 * M_PI * u), 0.25 * std::sin(4 * M_PI * u));
    return Eigen::MatrixXcd(s * Eigen::MatrixXcd::Identity(rho.dim(), rho.dim()));
  });
  const auto traj = iterate_norms(op, phi, iters);
  std::string csv = "n,l2_norm,c1_norm\n";
  std::vector<double> logs;
  for (const auto& s : traj) {
    csv += std::to_string(s.n) + "," + num(std::exp(s.log_l2)) + "," + num(std::exp(s.log_c1)) + "\n";
    logs.push_back(s.log_l2);
  }
  out.write(out.path(req.out, "spectrum.csv"), csv);
  const auto fit = fit_rate(logs, iters / 2, iters);
  json rep = {{"irrep", rho.name()}, {"im_z", im}, {"pressure", st.pressure}, {"rate", fit.rate},
              {"prefactor", fit.prefactor}, {"no_contraction", fit.no_contraction}, {"iterations", iters}};
  out.write(out.path(std::nullopt, "spectrum.json"), rep.dump(2) + "\n");
  if (fit.no_contraction) log << "spectrum: no contraction for " << rho.name() << " (rate " << fit.rate << ")\n";
  return 0;
}

int cmd_access(const Experiment& ex, Outputs& out, const RunRequest& req) {
  const auto& cfg = ex.config["access"];
  NliOptions opt;
  opt.depth = req.depth.value_or(cfg["depth"].get<int>());
  opt.past_length = req.pasts.value_or(4);
  opt.vector_mesh = cfg["vector_mesh"];
  opt.coverage = cfg["coverage"];
  opt.transitivity.depth = opt.depth;
  opt.transitivity.past_length = req.pasts.value_or(cfg["past_length"].get<int>());
  const int n = req.grid.value_or(cfg["points"].get<int>());
  std::vector<double> region;
  for (int j = 0; j < n; ++j) region.push_back(static_cast<double>(j) / n);
  const Irrep rho = irrep_from(ex.cocycle.kind, req.irrep.value_or(1));
  const auto cert = nli_certificate(ex.model, ex.cocycle, rho, region, opt);
  json rep;
  rep["irrep"] = rho.name();
  rep["cocycle"] = ex.cocycle.name;
  rep["algebra_dimension"] = algebra_dim(ex.cocycle.kind);
  rep["coverage"] = cert.coverage;
  rep["eps_min"] = cert.eps_min;
  rep["refused"] = cert.refused;
  rep["pass"] = cert.pass;
  rep["degenerate_locus"] = cert.degenerate_locus;
  json pts = json::array();
  for (std::size_t j = 0; j < cert.points.size(); ++j) {
    pts.push_back({{"x", cert.points[j]}, {"dimension", cert.dimension[j]}, {"eps", cert.eps_measured[j]},
                   {"accessible", static_cast<bool>(cert.mask[j])}});
  }
  rep["points"] = pts;
  out.write(out.path(req.out, "access.json"), rep.dump(2) + "\n");
  return 0;
}

int cmd_correlate(const Experiment& ex, Outputs& out, const RunRequest& req, std::ostream& log) {
  const auto& cfg = ex.config;
  const auto st = rpf_solve(ex.model, ex.potential, cfg["thermo"]["grid"]);
  const int k = req.k.value_or(cfg["correlate"]["k"].get<int>());
  if (k < 1 || k > 2) throw ConfigError("correlate.k", "only k = 1 and k = 2 are supported");
  const double tmax = req.tmax.value_or(cfg["correlate"]["tmax"].get<double>());
  const double dt = cfg["correlate"]["dt"];
  const GroupKind kind = ex.cocycle.kind;
  const HaarQuadrature quad = kind == GroupKind::SO2 ? HaarQuadrature::circle(64) : HaarQuadrature::euler(8, 8, 16);
  const TrigSeries base{1.0, {}, {}};
  auto make = [&](int label) {
    auto phi = product_observable(base, kind, label);
    certify_mean_zero(phi, st, ex.roof, quad);
    return phi;
  };
  CorrelationSetup setup;
  if (k == 1) {
    setup.observables = {make(1), make(1)};
  } else {
    setup.observables = {make(2), make(1), make(1)};
  }
  const int steps = static_cast<int>(std::floor(tmax / dt + 1e-9));
  for (int i = 0; i <= steps; ++i) {
    const double t = i * dt;
    if (k == 1) {
      setup.time_points.push_back({t});
    } else {
      setup.time_points.push_back({0.5 * t, t});
    }
  }
  setup.samples = req.samples.value_or(cfg["correlate"]["samples"].get<std::uint64_t>());
  setup.seed = cfg["run"]["seed"];
  setup.shards = cfg["correlate"]["shards"];
  setup.batches_per_shard = cfg["correlate"]["batches"];
  setup.threads = cfg["run"]["threads"];
  const auto series = correlate(ex.model, ex.roof, ex.cocycle, st, setup);
  std::string csv = "t,beta,stderr\n";
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    csv += num(series.times[i]) + "," + num(series.beta[i]) + "," + num(series.std_error[i]) + "\n";
  }
  out.write(out.path(req.out, "correlation.csv"), csv);
  json rep = {{"k", k}, {"samples", setup.samples}, {"seed", setup.seed}};
  try {
    const auto fit = fit_decay_rate(series);
    rep["rate"] = fit.rate;
    rep["prefactor"] = fit.prefactor;
    rep["r_squared"] = fit.r_squared;
    rep["no_decay"] = fit.no_decay;
    rep["used_points"] = fit.used_times.size();
  } catch (const InsufficientSignal& e) {
    rep["fit_error"] = e.what();
    log << "correlate: " << e.what() << "\n";
  }
  out.write(out.path(std::nullopt, "correlation_fit.json"), rep.dump(2) + "\n");
  return 0;
}

int cmd_verify(const Experiment& ex, Outputs& out, const RunRequest& req, std::ostream& log) {
  LemmaSuiteOptions opt;
  opt.seed = ex.config["run"]["seed"];
  opt.grid = req.grid.value_or(ex.config["thermo"]["grid"].get<int>());
  opt.im_z = req.im_z.value_or(ex.config["dolgopyat"]["im_z"].get<double>());
  opt.depth_cap = ex.config["dolgopyat"]["depth_cap"];
  const auto checks = run_lemma_suite(ex.model, ex.roof, ex.cocycle, ex.potential, opt);
  std::string csv = "check_name,value,bound,pass\n";
  bool ok = true;
  json failures = json::array();
  for (const auto& c : checks) {
    csv += c.name + "," + num(c.value) + "," + num(c.bound) + "," + (c.pass ? "true" : "false") + "\n";
    if (!c.pass) {
      ok = false;
      failures.push_back({{"check", c.name}, {"value", c.value}, {"bound", c.bound}, {"witness", c.witness}});
    }
  }
  out.write(out.path(req.out, "lemmas.csv"), csv);
  if (!ok) {
    log << "verify-lemmas: failures " << failures.dump() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

std::string version_string() { return "0.1.0"; }

Experiment build_experiment(const json& config) {
  const std::string kind = config["model"]["kind"];
  ExpandingModel model = kind == "doubling"   ? ExpandingModel::doubling()
                         : kind == "tripling" ? ExpandingModel::tripling()
                                              : ExpandingModel::from_lengths(config["model"]["lengths"]);
  RoofFunction roof(series_from(config["roof"]));
  const TrigSeries pot = series_from(config["potential"]);
  Potential potential = pot.is_constant() ? Potential::constant(pot.constant) : Potential::smooth(pot);
  const auto& c = config["cocycle"];
  const GroupKind group = group_kind_from_string(c["group"]);
  const std::string ck = c["kind"];
  HolonomyCocycle cocycle = ck == "angle"     ? HolonomyCocycle::so2_angle(series_from(c["angle"]))
                            : ck == "winding" ? HolonomyCocycle::so2_winding(c["winding"])
                            : ck == "trivial" ? HolonomyCocycle::trivial(group)
                                              : HolonomyCocycle::su2_exp(series_from(c["x"]), series_from(c["y"]),
                                                                         series_from(c["z"]));
  return Experiment{std::move(model), std::move(roof), std::move(potential), std::move(cocycle), config};
}

int run(const RunRequest& req, std::ostream& log) {
  json config;
  try {
    config = load_config(req.config_path);
    if (req.seed) config["run"]["seed"] = *req.seed;
    if (req.threads) config["run"]["threads"] = *req.threads;
    if (req.deterministic) config["run"]["deterministic"] = true;
    if (req.out_dir) config["run"]["out_dir"] = *req.out_dir;
    config = validate_config(config);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return 2;
  }
  const bool deterministic = config["run"]["deterministic"];
  if (deterministic) config["run"]["threads"] = 1;

  try {
    const Experiment ex = build_experiment(config);
    Outputs out(config["run"]["out_dir"].get<std::string>(), config, req.subcommand, deterministic);
    int status = 2;
    if (req.subcommand == "pressure") {
      status = cmd_pressure(ex, out, req);
    } else if (req.subcommand == "spectrum") {
      status = cmd_spectrum(ex, out, req, log);
    } else if (req.subcommand == "access") {
      status = cmd_access(ex, out, req);
    } else if (req.subcommand == "correlate") {
      status = cmd_correlate(ex, out, req, log);
    } else if (req.subcommand == "verify-lemmas") {
      status = cmd_verify(ex, out, req, log);
    } else {
      log << "unknown subcommand " << req.subcommand << "\n";
      return 2;
    }
    out.manifest();
    return status;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ConvergenceError& e) {
    log << "convergence failure: " << e.what() << " after " << e.residual_history.size() << " iterations\n";
    return 1;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace skewmix

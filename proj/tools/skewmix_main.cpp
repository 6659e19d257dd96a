#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "skewmix/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Twisted transfer operators and mixing of compact group extensions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", skewmix::version_string());

  skewmix::RunRequest req;
  std::string out_dir;
  std::uint64_t seed = 0;
  int threads = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", req.config_path, "TOML or JSON config")->required();
    sub->add_option("--out-dir", out_dir, "directory for outputs and the manifest");
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--deterministic", req.deterministic, "fixed shard order, single thread, no timestamps");
    sub->add_option("--out", req.out, "output file, relative to --out-dir");
  };

  auto* pressure = app.add_subcommand("pressure", "pressure, eigenfunction and equilibrium measure");
  common(pressure);

  auto* spectrum = app.add_subcommand("spectrum", "norm trajectory of the twisted operator");
  common(spectrum);
  spectrum->add_option("--irrep", req.irrep, "SO2 frequency or twice the SU2 spin");
  spectrum->add_option("--im-z", req.im_z, "imaginary part of z");
  spectrum->add_option("--iters", req.iterations, "iterations");
  spectrum->add_option("--grid", req.grid, "grid size");

  auto* access = app.add_subcommand("access", "transitivity and non-integrability certificate");
  common(access);
  access->add_option("--irrep", req.irrep, "SO2 frequency or twice the SU2 spin");
  access->add_option("--depth", req.depth, "truncation depth");
  access->add_option("--pasts", req.pasts, "past length");
  access->add_option("--grid", req.grid, "number of base points");

  auto* correlate = app.add_subcommand("correlate", "Monte Carlo correlation series");
  common(correlate);
  correlate->add_option("--k", req.k, "order of the correlation (1 or 2)");
  correlate->add_option("--tmax", req.tmax, "largest time");
  correlate->add_option("--samples", req.samples, "Monte Carlo samples");

  auto* verify = app.add_subcommand("verify-lemmas", "numerical checks of the supporting estimates");
  common(verify);
  verify->add_option("--grid", req.grid, "grid size");
  verify->add_option("--im-z", req.im_z, "imaginary part of z for the budget check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  req.subcommand = app.get_subcommands().front()->get_name();
  auto* sub = app.get_subcommands().front();
  if (sub->count("--out-dir")) req.out_dir = out_dir;
  if (sub->count("--seed")) req.seed = seed;
  if (sub->count("--threads")) req.threads = threads;
  return skewmix::run(req, std::cerr);
}

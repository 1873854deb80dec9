#include <functional>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "opsize/experiments.hpp"

namespace {

using opsize::ExperimentConfig;

struct Flags {
  std::string config_path;
  std::string preset;
  std::string out_dir;
  opsize::u64 seed = 0;
  opsize::i64 samples = 0;
  int threads = 0;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config_path, "experiment config file");
  sub->add_option("--preset", f.preset,
                  "named parameter set: fig2-chaotic, fig2-integrable, fig5-xxz, fig6-ising");
  sub->add_option("--seed", f.seed, "master seed");
  sub->add_option("--samples", f.samples, "number of sampled initial states");
  sub->add_option("--out", f.out_dir, "output directory");
  sub->add_option("--threads", f.threads, "worker threads");
}

ExperimentConfig assemble(const CLI::App* sub, const Flags& f) {
  ExperimentConfig cfg;
  if (sub->count("--preset")) cfg = opsize::preset_config(f.preset);
  if (sub->count("--config")) opsize::apply_config_file(cfg, f.config_path);
  if (sub->count("--seed")) cfg.seed = f.seed;
  if (sub->count("--samples")) cfg.samples = f.samples;
  if (sub->count("--out")) cfg.out_dir = f.out_dir;
  if (sub->count("--threads")) cfg.threads = f.threads;
  cfg.finalize();
  cfg.validate();
  return cfg;
}

}

int main(int argc, char** argv) {
  CLI::App app{"operator size distributions and state-ensemble variances for qudit chains"};
  app.require_subcommand(1);

  Flags flags;
  bool inject_fault = false;

  CLI::App* size_dist = app.add_subcommand(
      "size-dist", "size distribution of the evolved observable over a time grid");
  CLI::App* variance = app.add_subcommand(
      "variance", "sampled quench expectations against the exact variance curve");
  CLI::App* region = app.add_subcommand(
      "region", "region-restricted variances and the reconstructed distribution");
  CLI::App* otoc = app.add_subcommand(
      "otoc", "response variance between two local probes at separated times");
  CLI::App* selftest =
      app.add_subcommand("selftest", "run the built-in identity checks");
  for (CLI::App* sub : {size_dist, variance, region, otoc, selftest})
    add_common(sub, flags);
  selftest->add_flag("--inject-fault", inject_fault)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(selftest)) {
      opsize::SelftestOptions opt;
      if (selftest->count("--seed")) opt.seed = flags.seed;
      opt.inject_transform_fault = inject_fault;
      const std::string out = selftest->count("--out") ? flags.out_dir : "out";
      return opsize::run_selftest_cmd(opt, out, std::cout);
    }
    using Runner = std::function<void(const ExperimentConfig&, std::ostream&)>;
    const CLI::App* sub = nullptr;
    Runner runner;
    if (app.got_subcommand(size_dist)) {
      sub = size_dist;
      runner = opsize::run_size_dist;
    } else if (app.got_subcommand(variance)) {
      sub = variance;
      runner = opsize::run_variance;
    } else if (app.got_subcommand(region)) {
      sub = region;
      runner = opsize::run_region;
    } else {
      sub = otoc;
      runner = opsize::run_otoc;
    }
    runner(assemble(sub, flags), std::cout);
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
}

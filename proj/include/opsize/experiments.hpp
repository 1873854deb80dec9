#pragma once

#include <filesystem>
#include <ostream>

#include <json.hpp>

#include "opsize/config.hpp"
#include "opsize/csv.hpp"
#include "opsize/selftest.hpp"
#include "opsize/shots.hpp"

namespace opsize {

namespace detail {

inline std::string out_path(const ExperimentConfig& cfg, const char* name) {
  std::filesystem::create_directories(cfg.out_dir);
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

inline CsvMeta meta_for(const ExperimentConfig& cfg, const char* command) {
  return {command, cfg.config_hash(), cfg.seed};
}

inline nlohmann::ordered_json summary_head(const ExperimentConfig& cfg,
                                           const char* command) {
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["command"] = command;
  j["config"] = cfg.config_hash();
  j["seed"] = cfg.seed;
  j["sites"] = cfg.chain.n_sites;
  j["local_dim"] = cfg.chain.local_dim;
  return j;
}

inline void write_json(const ExperimentConfig& cfg, const char* name,
                       const nlohmann::ordered_json& j) {
  std::ofstream out(out_path(cfg, name));
  if (!out) throw std::runtime_error(std::string("cannot open ") + name + " for writing");
  out << j.dump(2) << "\n";
}

// One sample set at one time point, honoring the configured noise source.
inline QuenchSamples draw_samples(const ExperimentConfig& cfg, const DenseOperator& o_t,
                                  double t) {
  if (cfg.prep_error > 0.0) {
    const PrepSampling prep{{cfg.prep_error}, cfg.prep_reps, PrepShotNorm::raw};
    return mc_variance_prepared(o_t, cfg.ensemble_spec(), prep, static_cast<int>(cfg.samples), cfg.threads,
                                kDefaultBootstrapResamples, t);
  }
  if (cfg.shots > 0) {
    const EnsembleSpec e = cfg.ensemble_spec();
    std::vector<double> values(static_cast<size_t>(cfg.samples));
    parallel_for(cfg.samples, cfg.threads, [&](i64 i) {
      const StateVector psi = sample_initial_state(cfg.chain, e, static_cast<u64>(i));
      const ShotPlan plan{cfg.shots,
                          derive_stream_seed(e.master_seed, static_cast<u64>(i), kShotSlot)};
      values[static_cast<size_t>(i)] = shot_noise_expectation(o_t, psi, plan).mean;
    });
    return finish_samples(values, t, e.master_seed, kDefaultBootstrapResamples);
  }
  return mc_variance(o_t, cfg.ensemble_spec(), static_cast<int>(cfg.samples), cfg.threads,
                     kDefaultBootstrapResamples, t);
}

}

// Evolves the observable over the time grid and tabulates its size
// distribution next to the fully scrambled baseline.
inline void run_size_dist(const ExperimentConfig& cfg, std::ostream& log) {
  const SiteBasis basis = site_basis(cfg.chain.local_dim);
  const DenseOperator o0 = string_to_matrix(cfg.observable(), basis);
  const auto spectral = eigendecompose(build_xyz(cfg.model));
  const std::vector<double> times = cfg.times.resolve();
  const SizeDistribution baseline = random_baseline(cfg.chain);

  std::vector<SizeDistribution> dists(times.size());
  parallel_for(static_cast<i64>(times.size()), cfg.threads, [&](i64 i) {
    const DenseOperator o_t =
        evolve_operator(o0, *spectral, times[static_cast<size_t>(i)]);
    dists[static_cast<size_t>(i)] = size_distribution(decompose(o_t));
  });

  const CsvMeta meta = detail::meta_for(cfg, "size-dist");
  CsvWriter sizes(detail::out_path(cfg, "sizes.csv"), {"t", "l", "p_l"}, meta);
  CsvWriter colormap(detail::out_path(cfg, "colormap.csv"), {"t", "l", "weight"}, meta);
  CsvWriter base(detail::out_path(cfg, "baseline.csv"), {"l", "p_l"}, meta);
  nlohmann::ordered_json summary = detail::summary_head(cfg, "size-dist");
  summary["points"] = nlohmann::ordered_json::array();

  for (int l = 0; l <= cfg.chain.n_sites; ++l)
    base.row({fmt_int(l), fmt_double(baseline.p[static_cast<size_t>(l)])});

  for (size_t i = 0; i < times.size(); ++i) {
    const SizeDistribution& p = dists[i];
    const SizeDistribution cond = condition_min_size(p, 1);
    double mean_size = 0.0;
    for (int l = 0; l <= cfg.chain.n_sites; ++l) {
      sizes.row({fmt_double(times[i]), fmt_int(l),
                 fmt_double(p.p[static_cast<size_t>(l)])});
      if (l >= 1)
        colormap.row({fmt_double(times[i]), fmt_int(l),
                      fmt_double(cond.p[static_cast<size_t>(l)])});
      mean_size += l * p.p[static_cast<size_t>(l)];
    }
    nlohmann::ordered_json point;
    point["t"] = times[i];
    point["mean_size"] = mean_size;
    point["tv_to_baseline"] = tv_distance(p, baseline);
    point["exact_variance"] = exact_variance(p);
    summary["points"].push_back(point);
  }
  detail::write_json(cfg, "summary.json", summary);
  log << "size-dist: wrote sizes.csv, colormap.csv, baseline.csv, summary.json to "
      << cfg.out_dir << "\n";
}

// Tracks sampled quench expectations against the exact variance curve.
inline void run_variance(const ExperimentConfig& cfg, std::ostream& log) {
  if (cfg.prep_error > 0.0 && cfg.shots > 0)
    throw std::invalid_argument(
        "variance: prep_error and shots cannot be combined in one run");
  if (cfg.prep_error > 0.0 && cfg.ensemble != EnsembleChoice::haar_product)
    throw std::invalid_argument("variance: prep_error needs the haar_product ensemble");
  if (cfg.samples < 2) throw std::invalid_argument("variance: needs at least 2 samples");

  const SiteBasis basis = site_basis(cfg.chain.local_dim);
  const DenseOperator o0 = string_to_matrix(cfg.observable(), basis);
  const auto spectral = eigendecompose(build_xyz(cfg.model));
  const std::vector<double> times = cfg.times.resolve();

  const CsvMeta meta = detail::meta_for(cfg, "variance");
  CsvWriter csv(detail::out_path(cfg, "variance.csv"), {"t", "kind", "value", "err"},
                meta);
  nlohmann::ordered_json summary = detail::summary_head(cfg, "variance");
  summary["samples"] = cfg.samples;
  summary["ensemble"] = ensemble_name(cfg.ensemble);
  summary["prep_error"] = cfg.prep_error;
  summary["shots"] = cfg.shots;
  summary["points"] = nlohmann::ordered_json::array();

  const i64 spaghetti = std::min<i64>(cfg.trajectories, cfg.samples);
  for (const double t : times) {
    const DenseOperator o_t = evolve_operator(o0, *spectral, t);
    const QuenchSamples q = detail::draw_samples(cfg, o_t, t);
    const double exact =
        exact_variance(size_distribution(decompose(o_t)), {cfg.prep_error});
    const double lo = q.bootstrap_quantile(0.005), hi = q.bootstrap_quantile(0.995);

    for (i64 i = 0; i < spaghetti; ++i) {
      char kind[24];
      std::snprintf(kind, sizeof(kind), "sample_%04lld", static_cast<long long>(i));
      csv.row({fmt_double(t), kind, fmt_double(q.values[static_cast<size_t>(i)]),
               fmt_double(0.0)});
    }
    csv.row({fmt_double(t), "mc_mean", fmt_double(q.mean),
             fmt_double(std::sqrt(q.variance / static_cast<double>(q.sample_count)))});
    csv.row({fmt_double(t), "mc_variance", fmt_double(q.variance),
             fmt_double(q.stderr_of_variance)});
    csv.row({fmt_double(t), "band_lo99", fmt_double(lo), fmt_double(0.0)});
    csv.row({fmt_double(t), "band_hi99", fmt_double(hi), fmt_double(0.0)});
    csv.row({fmt_double(t), "exact_variance", fmt_double(exact), fmt_double(0.0)});

    nlohmann::ordered_json point;
    point["t"] = t;
    point["mean"] = q.mean;
    point["variance"] = q.variance;
    point["stderr"] = q.stderr_of_variance;
    point["band_lo99"] = lo;
    point["band_hi99"] = hi;
    point["exact_variance"] = exact;
    summary["points"].push_back(point);
  }
  detail::write_json(cfg, "summary.json", summary);
  log << "variance: wrote variance.csv, summary.json to " << cfg.out_dir << "\n";
}

// Region-restricted variances for every subset of the chosen region, the
// distribution value they reconstruct, and the direct value to check against.
inline void run_region(const ExperimentConfig& cfg, std::ostream& log) {
  if (cfg.region_sites.empty())
    throw std::invalid_argument("region: region.sites must name at least one site");
  if (cfg.region_sampled && cfg.ensemble != EnsembleChoice::haar_product)
    throw std::invalid_argument(
        "region: sampled subsets need the haar_product ensemble");
  if (cfg.region_sampled && cfg.samples < 2)
    throw std::invalid_argument("region: sampling needs at least 2 samples");

  const SiteBasis basis = site_basis(cfg.chain.local_dim);
  const DenseOperator o0 = string_to_matrix(cfg.observable(), basis);
  const auto spectral = eigendecompose(build_xyz(cfg.model));
  const std::vector<double> times = cfg.times.resolve();
  const u32 region = cfg.region_mask();
  const int d = cfg.chain.local_dim;

  const CsvMeta meta = detail::meta_for(cfg, "region");
  CsvWriter csv(detail::out_path(cfg, "region.csv"),
                {"t", "mask", "kind", "value", "err"}, meta);
  nlohmann::ordered_json summary = detail::summary_head(cfg, "region");
  summary["region_mask"] = region;
  summary["points"] = nlohmann::ordered_json::array();

  for (const double t : times) {
    const DenseOperator o_t = evolve_operator(o0, *spectral, t);
    const RegionDistribution r = region_distribution(decompose(o_t));

    std::unordered_map<u32, double> exact, sampled;
    for (u32 q = 0;; q = (q - region) & region) {
      exact[q] = region_variance_exact(r, q);
      csv.row({fmt_double(t), fmt_int(q), "exact_subset", fmt_double(exact[q]),
               fmt_double(0.0)});
      if (cfg.region_sampled) {
        const QuenchSamples mc =
            mc_region_variance(o_t, q, cfg.ensemble_spec(), static_cast<int>(cfg.samples), cfg.threads,
                               kDefaultBootstrapResamples, t);
        sampled[q] = mc.variance;
        csv.row({fmt_double(t), fmt_int(q), "mc_subset", fmt_double(mc.variance),
                 fmt_double(mc.stderr_of_variance)});
      }
      if (q == region) break;
    }

    const double recovered = recover_region_value(exact, region, d);
    const double direct = r.p[region];
    csv.row({fmt_double(t), fmt_int(region), "recovered_exact", fmt_double(recovered),
             fmt_double(0.0)});
    csv.row({fmt_double(t), fmt_int(region), "direct", fmt_double(direct),
             fmt_double(0.0)});

    nlohmann::ordered_json point;
    point["t"] = t;
    point["recovered_exact"] = recovered;
    point["direct"] = direct;
    if (cfg.region_sampled) {
      const double recovered_mc = recover_region_value(sampled, region, d);
      csv.row({fmt_double(t), fmt_int(region), "recovered_mc", fmt_double(recovered_mc),
               fmt_double(0.0)});
      point["recovered_mc"] = recovered_mc;
    }
    summary["points"].push_back(point);
  }
  detail::write_json(cfg, "summary.json", summary);
  log << "region: wrote region.csv, summary.json to " << cfg.out_dir << "\n";
}

// Variance of the linear response across global random states, swept over the
// later time with the earlier one held fixed.
inline void run_otoc(const ExperimentConfig& cfg, std::ostream& log) {
  if (cfg.samples < 2) throw std::invalid_argument("otoc: needs at least 2 samples");
  cfg.chain.require_operator_side("otoc");

  const SiteBasis basis = site_basis(cfg.chain.local_dim);
  const DenseOperator w =
      string_to_matrix(PauliString::single_site(cfg.chain, cfg.w_site - 1, cfg.w_letter),
                       basis);
  const DenseOperator v =
      string_to_matrix(PauliString::single_site(cfg.chain, cfg.v_site - 1, cfg.v_letter),
                       basis);
  const auto spectral = eigendecompose(build_xyz(cfg.model));
  const std::vector<double> times = cfg.times.resolve();

  const CsvMeta meta = detail::meta_for(cfg, "otoc");
  CsvWriter csv(detail::out_path(cfg, "otoc.csv"), {"t2", "kind", "value", "err"}, meta);
  nlohmann::ordered_json summary = detail::summary_head(cfg, "otoc");
  summary["t1"] = cfg.t1;
  summary["samples"] = cfg.samples;
  summary["points"] = nlohmann::ordered_json::array();

  for (const double t2 : times) {
    const ResponsePair rp{w, v, spectral, cfg.t1, t2};
    const double exact = exact_otoc(rp);
    const QuenchSamples q = mc_otoc_variance(rp, static_cast<int>(cfg.samples), cfg.seed, cfg.threads,
                                             kDefaultBootstrapResamples);
    csv.row({fmt_double(t2), "exact", fmt_double(exact), fmt_double(0.0)});
    csv.row({fmt_double(t2), "mc_variance", fmt_double(q.variance),
             fmt_double(q.stderr_of_variance)});
    csv.row({fmt_double(t2), "mc_mean", fmt_double(q.mean),
             fmt_double(std::sqrt(q.variance / static_cast<double>(q.sample_count)))});

    nlohmann::ordered_json point;
    point["t2"] = t2;
    point["exact"] = exact;
    point["variance"] = q.variance;
    point["stderr"] = q.stderr_of_variance;
    summary["points"].push_back(point);
  }
  detail::write_json(cfg, "summary.json", summary);
  log << "otoc: wrote otoc.csv, summary.json to " << cfg.out_dir << "\n";
}

// Prints one line per identity check and writes the machine-readable report.
inline int run_selftest_cmd(const SelftestOptions& opt, const std::string& out_dir,
                            std::ostream& log) {
  const std::vector<CheckResult> results = run_selftest(opt);
  std::filesystem::create_directories(out_dir);

  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["command"] = "selftest";
  j["seed"] = opt.seed;
  j["checks"] = nlohmann::ordered_json::array();
  for (const CheckResult& r : results) {
    nlohmann::ordered_json check;
    check["name"] = r.name;
    check["residual"] = r.residual;
    check["threshold"] = r.threshold;
    check["pass"] = r.pass;
    j["checks"].push_back(check);
    log << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << " residual=" << fmt_double(r.residual)
        << " threshold=" << fmt_double(r.threshold) << "\n";
  }
  const bool ok = all_pass(results);
  j["pass"] = ok;
  std::ofstream out((std::filesystem::path(out_dir) / "selftest.json").string());
  if (!out) throw std::runtime_error("cannot open selftest.json for writing");
  out << j.dump(2) << "\n";
  log << (ok ? "selftest: all checks passed" : "selftest: checks FAILED") << "\n";
  return ok ? 0 : 2;
}

}

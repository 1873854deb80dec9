#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "opsize/experiments.hpp"
#include "opsize/otoc.hpp"

using namespace opsize;

namespace {

namespace fs = std::filesystem;

int failures = 0;
std::chrono::steady_clock::time_point t_start;

void begin() { t_start = std::chrono::steady_clock::now(); }

void report(const char* name, bool pass, const std::string& detail) {
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  std::printf("[%s] %s (%s; %.1f s)\n", pass ? "PASS" : "FAIL", name, detail.c_str(),
              secs);
  std::fflush(stdout);
  if (!pass) ++failures;
}

DenseOperator site_x(const ChainSpec& chain, int site) {
  return string_to_matrix(PauliString::single_site(chain, site, 1), site_basis(2));
}

std::shared_ptr<const SpectralData> chaotic_spectral(const ChainSpec& chain) {
  SpinChainParams p;
  p.chain = chain;
  p.jz = 1.0;
  p.hx = 1.05;
  p.hz = 0.5;
  return eigendecompose(build_xyz(p));
}

void c1_transform_oracle() {
  begin();
  double worst = 0.0;
  RngStream stream(101);
  for (int n = 1; n <= 4; ++n) {
    const ChainSpec chain{n, 2};
    for (int rep = 0; rep < 3; ++rep) {
      const DenseOperator o = random_hermitian(chain, stream);
      const CoefficientTable fast = decompose(o);
      const CoefficientTable slow = decompose_oracle(o);
      for (size_t s = 0; s < fast.values.size(); ++s)
        worst = std::max(worst, std::abs(fast.values[s] - slow.values[s]));
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  std::ostringstream d;
  d << "max residual " << worst << " over N=1..4";
  report("C1 transform-oracle equivalence", worst < 1e-10 && secs < 10.0, d.str());
}

void c2_central_identity() {
  begin();
  int within = 0, total = 0;
  RngStream stream(202);
  for (int rep = 0; rep < 20; ++rep) {
    const ChainSpec chain{3, 2};
    const DenseOperator o = random_hermitian(chain, stream);
    const double exact = exact_variance(size_distribution(decompose(o)));
    const QuenchSamples q =
        mc_variance(o, haar_product_ensemble(2000 + static_cast<u64>(rep)), 10000);
    ++total;
    if (std::abs(q.variance - exact) < 4.0 * q.stderr_of_variance) ++within;
  }
  for (int n : {4, 6}) {
    const ChainSpec chain{n, 2};
    const auto spectral = chaotic_spectral(chain);
    const DenseOperator o0 = site_x(chain, n / 2 - 1);
    for (int i = 0; i < 10; ++i) {
      const double t = 0.5 * (i + 1);
      const DenseOperator o_t = evolve_operator(o0, *spectral, t);
      const double exact = exact_variance(size_distribution(decompose(o_t)));
      const QuenchSamples q = mc_variance(
          o_t, haar_product_ensemble(3000 + static_cast<u64>(10 * n + i)), 10000);
      ++total;
      if (std::abs(q.variance - exact) < 4.0 * q.stderr_of_variance) ++within;
    }
  }

  double worst_two_path = 0.0;
  RngStream stream2(203);
  for (int n = 1; n <= 3; ++n) {
    const DenseOperator o = random_hermitian(ChainSpec{n, 2}, stream2);
    worst_two_path = std::max(
        worst_two_path, std::abs(exact_variance(size_distribution(decompose(o))) -
                                 exact_variance_doubled(o)));
  }

  std::ostringstream d;
  d << within << "/" << total << " within 4 stderr; two-path residual " << worst_two_path;
  report("C2 central identity",
         within >= (total * 95 + 99) / 100 && worst_two_path < 1e-10, d.str());
}

void c3_random_baseline() {
  begin();
  const ChainSpec chain{6, 2};
  RngStream stream(10);
  const DenseOperator o = random_hermitian(chain, stream);
  const SizeDistribution p = condition_min_size(size_distribution(decompose(o)), 1);
  const SizeDistribution base = condition_min_size(random_baseline(chain), 1);
  const double tv = tv_distance(p, base);

  const QuenchSamples q = mc_variance(o, haar_product_ensemble(10000), 1000);
  const double rel = std::abs(q.variance - 1.0 / 64.0) / (1.0 / 64.0);

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  std::ostringstream d;
  d << "TV " << tv << " (< 0.02); variance off by " << 100.0 * rel << "% (< 10%)";
  report("C3 random-operator baseline", tv < 0.02 && rel < 0.1 && secs < 60.0, d.str());
}

void c4_scrambling_signature() {
  begin();
  double tv_chaotic = 0.0, tv_integrable = 0.0;
  for (const char* preset : {"fig2-chaotic", "fig2-integrable"}) {
    ExperimentConfig cfg = preset_config(preset);
    cfg.finalize();
    const DenseOperator o0 = string_to_matrix(cfg.observable(), site_basis(2));
    const auto spectral = eigendecompose(build_xyz(cfg.model));
    const DenseOperator o_t = evolve_operator(o0, *spectral, 10.0);
    const double tv =
        tv_distance(size_distribution(decompose(o_t)), random_baseline(cfg.chain));
    (std::string(preset) == "fig2-chaotic" ? tv_chaotic : tv_integrable) = tv;
  }
  std::ostringstream d;
  d << "chaotic TV " << tv_chaotic << " (< 0.1), integrable TV " << tv_integrable
    << " (> 0.2)";
  report("C4 scrambling signature", tv_chaotic < 0.1 && tv_integrable > 0.2, d.str());
}

void c5_statistical_tracking() {
  begin();
  int covered = 0, total = 0;
  for (const char* preset : {"fig5-xxz", "fig6-ising"}) {
    ExperimentConfig cfg = preset_config(preset);
    cfg.finalize();
    const DenseOperator o0 = string_to_matrix(cfg.observable(), site_basis(2));
    const auto spectral = eigendecompose(build_xyz(cfg.model));
    for (int i = 0; i < 50; ++i) {
      const double t = 10.0 * i / 49.0;
      const DenseOperator o_t = evolve_operator(o0, *spectral, t);
      const double exact = exact_variance(size_distribution(decompose(o_t)));
      const QuenchSamples q = mc_variance(
          o_t, haar_product_ensemble(5000 + static_cast<u64>(i)), 100);
      ++total;
      if (q.bootstrap_quantile(0.005) <= exact && exact <= q.bootstrap_quantile(0.995))
        ++covered;
    }
  }
  std::ostringstream d;
  d << covered << "/" << total << " points inside the 99% band";
  report("C5 sampled-curve tracking", covered * 10 >= total * 9, d.str());
}

void c6_design_sufficiency() {
  begin();
  const TwoDesignReport design = verify_2design(pauli6_states(), 2);
  const double residual =
      std::max(design.first_moment_residual, design.second_moment_residual);

  const ChainSpec chain{4, 2};
  const DenseOperator o_t = evolve_operator(site_x(chain, 1), *chaotic_spectral(chain), 2.0);
  const QuenchSamples haar = mc_variance(o_t, haar_product_ensemble(6001), 10000);
  const QuenchSamples p6 = mc_variance(o_t, pauli6_ensemble(6002), 10000);
  const double gap = std::abs(haar.variance - p6.variance);
  const double combined = 4.0 * std::sqrt(haar.stderr_of_variance * haar.stderr_of_variance +
                                          p6.stderr_of_variance * p6.stderr_of_variance);
  std::ostringstream d;
  d << "residual " << residual << "; |haar - design| " << gap << " vs " << combined;
  report("C6 2-design sufficiency", design.pass && residual < 1e-10 && gap < combined,
         d.str());
}

void c7_preparation_error() {
  begin();
  const ChainSpec chain{4, 2};
  const DenseOperator o_t = evolve_operator(site_x(chain, 1), *chaotic_spectral(chain), 1.5);
  const SizeDistribution p = size_distribution(decompose(o_t));
  bool ok = true;
  std::ostringstream d;
  for (double eps : {0.1, 0.3}) {
    const double closed = exact_variance(p, {eps});
    const PrepSampling prep{{eps}, 512, PrepShotNorm::raw};
    const QuenchSamples q =
        mc_variance_prepared(o_t, haar_product_ensemble(7000 + u64(eps * 10)), prep, 10000);
    const bool within = std::abs(q.variance - closed) < 4.0 * q.stderr_of_variance;
    ok = ok && within;
    d << "eps " << eps << ": |" << q.variance << " - " << closed << "| vs 4x"
      << q.stderr_of_variance << (eps < 0.2 ? "; " : "");
  }
  report("C7 preparation error", ok, d.str());
}

void c8_region_recovery() {
  begin();
  const ChainSpec chain{4, 2};
  RngStream stream(808);
  const DenseOperator o = random_hermitian(chain, stream);
  const RegionDistribution r = region_distribution(decompose(o));
  std::unordered_map<u32, double> vars;
  for (u32 q = 0; q < 16; ++q) vars[q] = region_variance_exact(r, q);
  double worst = 0.0;
  for (u32 region = 0; region < 16; ++region)
    worst = std::max(worst,
                     std::abs(recover_region_value(vars, region, 2) - r.p[region]));
  std::ostringstream d;
  d << "max recovery error " << worst << " over all 16 regions";
  report("C8 region recovery", worst < 1e-8, d.str());
}

void c9_otoc_identity() {
  begin();
  bool ok = true;
  std::ostringstream d;
  RngStream stream(909);
  for (int n : {2, 4}) {
    const ChainSpec chain{n, 2};
    const DenseOperator h = random_hermitian(chain, stream);
    const auto spectral = eigendecompose(h);
    const SiteBasis basis = site_basis(2);
    const DenseOperator w = string_to_matrix(PauliString::single_site(chain, 0, 1), basis);
    const DenseOperator v =
        string_to_matrix(PauliString::single_site(chain, n - 1, 3), basis);
    const double t1 = 0.3;
    int within = 0;
    for (int i = 0; i < 10; ++i) {
      const ResponsePair rp{w, v, spectral, t1, t1 + 0.25 * i};
      const QuenchSamples q =
          mc_otoc_variance(rp, 10000, 9000 + static_cast<u64>(10 * n + i));
      if (std::abs(q.variance - exact_otoc(rp)) < 4.0 * q.stderr_of_variance) ++within;
    }
    const ResponsePair acausal{w, v, spectral, t1, 0.0};
    const bool zero = exact_otoc(acausal) == 0.0 &&
                      mc_otoc_variance(acausal, 100, 1).variance == 0.0;
    ok = ok && within == 10 && zero;
    d << "N=" << n << ": " << within << "/10 within 4 stderr; ";
  }

  const ChainSpec one{1, 2};
  SpinChainParams frozen;
  frozen.chain = one;
  const SiteBasis basis = site_basis(2);
  const ResponsePair qubit{string_to_matrix(PauliString(one, {1}), basis),
                           string_to_matrix(PauliString(one, {3}), basis),
                           eigendecompose(build_xyz(frozen)), 0.0, 0.0};
  const double frozen_residual = std::abs(exact_otoc(qubit) - 4.0 / 3.0);
  ok = ok && frozen_residual < 1e-12;
  d << "frozen-qubit residual " << frozen_residual;
  report("C9 response-variance identity", ok, d.str());
}

void c10_shot_noise_scaling() {
  begin();
  const ChainSpec chain{2, 2};
  RngStream stream(1010);
  const StateVector psi = sample_haar_state(chain, stream);
  const DenseOperator o = site_x(chain, 0);

  std::vector<double> log_k, log_sd;
  for (const i64 k : {i64{100}, i64{1000}, i64{10000}}) {
    std::vector<double> means;
    for (int rep = 0; rep < 100; ++rep) {
      const ShotPlan plan{k, derive_stream_seed(9090, static_cast<u64>(k),
                                                static_cast<u64>(rep))};
      means.push_back(shot_noise_expectation(o, psi, plan).mean);
    }
    double mean = 0.0;
    for (double v : means) mean += v;
    mean /= means.size();
    double var = 0.0;
    for (double v : means) var += (v - mean) * (v - mean);
    var /= (means.size() - 1);
    log_k.push_back(std::log(static_cast<double>(k)));
    log_sd.push_back(0.5 * std::log(var));
  }
  double xm = 0.0, ym = 0.0;
  for (size_t i = 0; i < 3; ++i) {
    xm += log_k[i];
    ym += log_sd[i];
  }
  xm /= 3;
  ym /= 3;
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < 3; ++i) {
    num += (log_k[i] - xm) * (log_sd[i] - ym);
    den += (log_k[i] - xm) * (log_k[i] - xm);
  }
  const double slope = num / den;
  std::ostringstream d;
  d << "log-log slope " << slope << " (target -0.5 +/- 0.05)";
  report("C10 shot-noise scaling", std::abs(slope + 0.5) < 0.05, d.str());
}

int run_cli(const std::string& bin, const std::string& args) {
  const std::string cmd = "\"" + bin + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return status == -1 ? -1 : WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void c11_reproducibility() {
  begin();
  const char* bin = std::getenv("OPSIZE_CLI_PATH");
#ifdef OPSIZE_CLI_PATH
  if (!bin) bin = OPSIZE_CLI_PATH;
#endif
  if (!bin) {
    report("C11 reproducibility", false, "OPSIZE_CLI_PATH not set");
    return;
  }
  const fs::path root = fs::temp_directory_path() / "opsize_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path ini = root / "run.ini";
  std::ofstream(ini) << "[chain]\nsites = 3\n[model]\njz = 1.0\nhx = 1.05\nhz = 0.5\n"
                        "[observable]\nsites = 2\nletters = x\n[times]\nlist = 0.0, 1.0\n"
                        "[region]\nsites = 1,2\n[run]\nsamples = 100\nseed = 42\n";

  const std::vector<std::pair<std::string, std::string>> runs = {
      {"size-dist", "sizes.csv"},
      {"variance", "variance.csv"},
      {"region", "region.csv"},
      {"otoc", "otoc.csv"}};
  bool ok = true;
  std::ostringstream d;
  for (const auto& [cmd, file] : runs) {
    const fs::path a = root / (cmd + "_a"), b = root / (cmd + "_b");
    const std::string base = cmd + " --config " + ini.string();
    if (run_cli(bin, base + " --out " + a.string()) != 0 ||
        run_cli(bin, base + " --out " + b.string() + " --threads 3") != 0) {
      ok = false;
      d << cmd << " failed to run; ";
      continue;
    }
    const bool same = !slurp(a / file).empty() && slurp(a / file) == slurp(b / file);
    ok = ok && same;
    d << cmd << (same ? " identical" : " DIFFERS") << (cmd == "otoc" ? "" : "; ");
  }
  report("C11 reproducibility", ok, d.str());
}

}

int main() {
  std::printf("acceptance checks, one line per criterion:\n");
  c1_transform_oracle();
  c2_central_identity();
  c3_random_baseline();
  c4_scrambling_signature();
  c5_statistical_tracking();
  c6_design_sufficiency();
  c7_preparation_error();
  c8_region_recovery();
  c9_otoc_identity();
  c10_shot_noise_scaling();
  c11_reproducibility();
  if (failures == 0) {
    std::printf("acceptance: all 11 criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criteria FAILED\n", failures);
  return 1;
}

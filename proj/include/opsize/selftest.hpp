#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "opsize/decompose.hpp"
#include "opsize/otoc.hpp"
#include "opsize/quench.hpp"

namespace opsize {

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct SelftestOptions {
  u64 seed = 1;
  // test hook: flips one coefficient sign so the transform check must fail
  bool inject_transform_fault = false;
};

namespace detail {

inline CheckResult checked(const std::string& name, double residual, double threshold) {
  return {name, residual, threshold, residual <= threshold};
}

}

// Runs the cross-validation suite at small sizes: every identity the library
// is built on, each reduced to a residual against an independent path.
inline std::vector<CheckResult> run_selftest(const SelftestOptions& opt = {}) {
  std::vector<CheckResult> results;
  RngStream stream(opt.seed);

  {
    double worst = 0.0;
    for (int d : {2, 3}) {
      const SiteBasis basis = site_basis(d);
      Matrix sum = Matrix::Zero(d * d, d * d);
      for (int a = 1; a < d * d; ++a) {
        const Matrix& s = basis.letter(a);
        sum += kron(s, s);
      }
      const Matrix target =
          double(d) * swap_operator(d) - Matrix::Identity(d * d, d * d);
      worst = std::max(worst, (sum - target).cwiseAbs().maxCoeff());
    }
    results.push_back(detail::checked("completeness", worst, 1e-12));
  }

  {
    double worst = 0.0;
    for (int d : {2, 3}) {
      const SiteBasis basis = site_basis(d);
      for (int a = 1; a < d * d; ++a)
        for (int b = 1; b < d * d; ++b) {
          const cxd g = (basis.letter(a).adjoint() * basis.letter(b)).trace() / double(d);
          worst = std::max(worst, std::abs(g - (a == b ? 1.0 : 0.0)));
        }
    }
    results.push_back(detail::checked("basis_orthonormality", worst, 1e-12));
  }

  const ChainSpec chain{3, 2};
  const DenseOperator o = random_hermitian(chain, stream);
  CoefficientTable fast = decompose(o);
  const CoefficientTable slow = decompose_oracle(o);

  {
    if (opt.inject_transform_fault) {
      for (double& v : fast.values)
        if (std::abs(v) > 0.05) {
          v = -v;
          break;
        }
    }
    double worst = 0.0;
    for (size_t s = 0; s < fast.values.size(); ++s)
      worst = std::max(worst, std::abs(fast.values[s] - slow.values[s]));
    results.push_back(detail::checked("transform_vs_oracle", worst, 1e-10));
  }

  results.push_back(detail::checked("parseval", std::abs(slow.norm2 - 1.0), 1e-9));

  {
    const double via_sizes = exact_variance(size_distribution(slow));
    const double via_doubled = exact_variance_doubled(o);
    results.push_back(
        detail::checked("variance_two_path", std::abs(via_sizes - via_doubled), 1e-10));
  }

  {
    const TwoDesignReport report = verify_2design(pauli6_states(), 2);
    results.push_back(detail::checked(
        "pauli6_2design",
        std::max(report.first_moment_residual, report.second_moment_residual), 1e-10));
  }

  {
    const RegionDistribution r = region_distribution(slow);
    std::unordered_map<u32, double> vars;
    for (u32 q = 0; q <= chain.full_mask(); ++q) vars[q] = region_variance_exact(r, q);
    double worst = 0.0;
    for (u32 region = 0; region <= chain.full_mask(); ++region)
      worst = std::max(worst,
                       std::abs(recover_region_value(vars, region, 2) - r.p[region]));
    results.push_back(detail::checked("region_recovery", worst, 1e-8));
  }

  {
    const ChainSpec one{1, 2};
    const SiteBasis basis = site_basis(2);
    SpinChainParams frozen;
    frozen.chain = one;
    const auto spectral = eigendecompose(build_xyz(frozen));
    const ResponsePair rp{string_to_matrix(PauliString(one, {1}), basis),
                          string_to_matrix(PauliString(one, {3}), basis), spectral, 0.0,
                          0.0};
    const ResponsePair acausal{rp.w, rp.v, spectral, 1.0, 0.0};
    const double residual =
        std::max(std::abs(exact_otoc(rp) - 4.0 / 3.0), std::abs(exact_otoc(acausal)));
    results.push_back(detail::checked("otoc_identity", residual, 1e-12));
  }

  {
    const QuenchSamples q =
        mc_variance(o, haar_product_ensemble(derive_stream_seed(opt.seed, 1, 0)), 4000);
    const double exact = exact_variance(size_distribution(slow));
    const double z = std::abs(q.variance - exact) / q.stderr_of_variance;
    results.push_back(detail::checked("mc_identity_zscore", z, 5.0));
  }

  return results;
}

inline bool all_pass(const std::vector<CheckResult>& results) {
  for (const CheckResult& r : results)
    if (!r.pass) return false;
  return true;
}

}

#include <catch2/catch_amalgamated.hpp>

#include "opsize/hamiltonian.hpp"
#include "opsize/otoc.hpp"

using namespace opsize;

namespace {

DenseOperator site_op(const ChainSpec& chain, int site, int letter) {
  return string_to_matrix(PauliString::single_site(chain, site, letter), site_basis(2));
}

ResponsePair free_qubit_pair(double t1, double t2) {
  const ChainSpec chain{1, 2};
  SpinChainParams params;
  params.chain = chain;
  const auto spectral = eigendecompose(build_xyz(params));
  return ResponsePair{site_op(chain, 0, 1), site_op(chain, 0, 3), spectral, t1, t2};
}

ResponsePair chaotic_pair(int n_sites, double t1, double t2) {
  const ChainSpec chain{n_sites, 2};
  SpinChainParams params;
  params.chain = chain;
  params.jz = 1.0;
  params.hx = 1.05;
  params.hz = 0.5;
  const auto spectral = eigendecompose(build_xyz(params));
  return ResponsePair{site_op(chain, 0, 1), site_op(chain, n_sites - 1, 3), spectral, t1, t2};
}

}

TEST_CASE("acausal orderings give exactly zero", "[otoc]") {
  const ResponsePair rp = free_qubit_pair(2.0, 1.0);
  CHECK_FALSE(rp.causal());
  CHECK(exact_otoc(rp) == 0.0);

  RngStream stream(11);
  const StateVector psi{rp.w.chain, sample_haar_vector(2, stream)};
  CHECK(response(rp, psi) == 0.0);

  const QuenchSamples q = mc_otoc_variance(rp, 200, 12);
  CHECK(q.variance == 0.0);
  for (double v : q.values) CHECK(v == 0.0);
}

TEST_CASE("equal times count as causal", "[otoc]") {
  const ResponsePair rp = free_qubit_pair(0.7, 0.7);
  CHECK(rp.causal());
  CHECK(exact_otoc(rp) > 0.0);
}

TEST_CASE("a frozen qubit reproduces the commutator by hand", "[otoc]") {
  const ResponsePair rp = free_qubit_pair(0.0, 0.0);
  // -i[X, Z] = -2 Y
  const DenseOperator minus_two_y =
      DenseOperator{rp.w.chain, -2.0 * site_op(rp.w.chain, 0, 2).mat, true, true};
  const DenseOperator k = response_kernel(rp);
  CHECK((k.mat - minus_two_y.mat).cwiseAbs().maxCoeff() < 1e-14);

  // tr(K^2) / (D (D+1)) with tr(K^2) = 8
  CHECK(std::abs(exact_otoc(rp) - 4.0 / 3.0) < 1e-12);

  Vector up(2);
  up << 1.0, 0.0;
  CHECK(std::abs(response(rp, StateVector{rp.w.chain, up})) < 1e-14);

  const QuenchSamples q = mc_otoc_variance(rp, 50000, 21);
  CHECK(std::abs(q.mean) < 4.0 * std::sqrt(q.variance / q.sample_count));
  CHECK(std::abs(q.variance - 4.0 / 3.0) < 4.0 * q.stderr_of_variance);
}

TEST_CASE("commuting probes have no response", "[otoc]") {
  const ChainSpec chain{2, 2};
  SpinChainParams params;
  params.chain = chain;
  const auto spectral = eigendecompose(build_xyz(params));
  const ResponsePair rp{site_op(chain, 0, 3), site_op(chain, 1, 3), spectral, 0.0, 1.0};
  CHECK(exact_otoc(rp) < 1e-24);
  CHECK(response_kernel(rp).mat.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("response variance is invariant under shifting both times", "[otoc]") {
  const double base = exact_otoc(chaotic_pair(3, 0.4, 1.6));
  const double shifted = exact_otoc(chaotic_pair(3, 0.4 + 2.3, 1.6 + 2.3));
  CHECK(base > 0.0);
  CHECK(std::abs(base - shifted) < 1e-9);
}

TEST_CASE("sampled response variance matches the trace formula", "[otoc]") {
  const ResponsePair rp = chaotic_pair(2, 0.3, 1.1);
  const double exact = exact_otoc(rp);
  const QuenchSamples q = mc_otoc_variance(rp, 40000, 31);
  CHECK(q.variance >= 0.0);
  CHECK(std::abs(q.variance - exact) < 4.0 * q.stderr_of_variance);

  const QuenchSamples again = mc_otoc_variance(rp, 40000, 31, 4);
  REQUIRE(again.values.size() == q.values.size());
  for (size_t i = 0; i < q.values.size(); ++i) REQUIRE(q.values[i] == again.values[i]);
}

TEST_CASE("response pairs validate their inputs", "[otoc]") {
  const ChainSpec chain{2, 2};
  SpinChainParams params;
  params.chain = chain;
  const auto spectral = eigendecompose(build_xyz(params));
  const ChainSpec other{3, 2};
  ResponsePair mismatched{site_op(other, 0, 1), site_op(chain, 1, 3), spectral, 0.0, 1.0};
  CHECK_THROWS_AS(mismatched.validate(), std::invalid_argument);
}

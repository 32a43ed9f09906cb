#include <doctest.h>

#include <cmath>
#include <random>

#include "stablepoly/convolution.hpp"
#include "stablepoly/errors.hpp"
#include "stablepoly/polymer_engine.hpp"

using namespace stablepoly;

namespace {

Box reach_box(const JumpKernel& k, int n) {
  Box b = k.bounding_box();
  for (int i = 0; i < b.dim; ++i) {
    b.lo[i] = std::min<std::int64_t>(0, b.lo[i]) * n;
    b.hi[i] = std::max<std::int64_t>(0, b.hi[i]) * n;
  }
  return b;
}

JumpKernel random_kernel(std::mt19937_64& rng, int d) {
  std::uniform_int_distribution<int> coord(-2, 2), count(2, 5);
  std::uniform_real_distribution<double> w(0.1, 1.0);
  std::vector<Site> sites;
  const int m = count(rng);
  while (static_cast<int>(sites.size()) < m) {
    Site s{coord(rng), d > 1 ? coord(rng) : 0, 0};
    if (std::find(sites.begin(), sites.end(), s) == sites.end()) sites.push_back(s);
  }
  std::vector<double> p;
  double tot = 0;
  for (int i = 0; i < m; ++i) tot += p.emplace_back(w(rng));
  for (double& v : p) v /= tot;
  return JumpKernel(d, sites, p);
}

}  // namespace

TEST_SUITE("polymer_engine") {
  TEST_CASE("transfer recursion matches path enumeration") {
    std::mt19937_64 rng(2024);
    for (int rep = 0; rep < 12; ++rep) {
      const int d = 1 + rep % 2;
      const auto k = random_kernel(rng, d);
      const auto env = rep % 3 == 0 ? EnvironmentModel::bernoulli(0.4) : EnvironmentModel::gaussian(0.0, 1.0);
      const int n = 1 + rep % 5;
      RunConfig cfg(k, env);
      cfg.beta = rep % 4 == 0 ? 0.0 : 1.3;
      cfg.n_steps = n;
      cfg.base_seed = 100 + rep;
      cfg.window = WindowPolicy::fixed(reach_box(k, n));
      cfg.record.snapshot_times = {n};
      const auto diag = run_polymer(cfg);
      const auto e = enumerate_Z(k, sample_field(env, cfg.base_seed, 1, n + 1, reach_box(k, n)), cfg.beta, n);
      CHECK(diag.logZ(n) == doctest::Approx(std::log(e.Z)).epsilon(1e-11));
      const auto& s = diag.snapshots.front();
      for (std::size_t i = 0; i < s.prob.size(); ++i) {
        const auto it = e.endpoint.find(s.window.site(i));
        CHECK(s.prob[i] == doctest::Approx(it == e.endpoint.end() ? 0.0 : it->second).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("overlap and favourite mass satisfy J^2 <= I <= J") {
    RunConfig cfg(build_power_law_kernel(1, 0.7, 30), EnvironmentModel::gaussian(0.0, 1.0));
    cfg.beta = 1.5;
    cfg.n_steps = 150;
    cfg.base_seed = 4;
    const auto d = run_polymer(cfg);
    for (std::size_t i = 0; i < d.I.size(); ++i) {
      CHECK(d.J[i] * d.J[i] <= d.I[i] * (1 + 1e-12));
      CHECK(d.I[i] <= d.J[i] * (1 + 1e-12));
    }
  }

  TEST_CASE("zero temperature gives the free walk") {
    RunConfig cfg(build_power_law_kernel(1, 0.5, 40), EnvironmentModel::gaussian(0.0, 1.0));
    cfg.n_steps = 60;
    const auto d = run_polymer(cfg);
    for (double v : d.logW) CHECK(std::abs(v) <= cfg.window.leak_budget);
  }

  TEST_CASE("transform and direct convolution routes agree") {
    RunConfig cfg(build_power_law_kernel(1, 0.5, 60), EnvironmentModel::gaussian(0.0, 1.0));
    cfg.beta = 0.8;
    cfg.n_steps = 40;
    cfg.base_seed = 9;
    cfg.convolution = ConvolutionMode::naive;
    const auto a = run_polymer(cfg);
    cfg.convolution = ConvolutionMode::fft;
    const auto b = run_polymer(cfg);
    CHECK(b.fft_steps > 0);
    for (std::size_t i = 0; i < a.logW.size(); ++i) CHECK(b.logW[i] == doctest::Approx(a.logW[i]).epsilon(1e-9));
  }

  TEST_CASE("direct and transform layer convolution agree in 2d") {
    const auto k = build_power_law_kernel(2, 1.2, 6);
    DenseLayer in;
    in.box = Box{2, {-20, -15, 0}, {25, 18, 0}};
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < in.box.volume(); ++i) in.values.push_back(u(rng));
    DenseLayer a, b;
    LayerConvolver(k, ConvolutionMode::naive).apply(in, a);
    LayerConvolver(k, ConvolutionMode::fft).apply(in, b);
    REQUIRE(a.box == b.box);
    for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(b.values[i] == doctest::Approx(a.values[i]).epsilon(1e-10));
  }

  TEST_CASE("replicas do not depend on the worker count") {
    RunConfig cfg(build_power_law_kernel(1, 0.5, 30), EnvironmentModel::bernoulli(0.5));
    cfg.beta = 1.0;
    cfg.n_steps = 30;
    cfg.base_seed = 77;
    const auto a = run_replicas(cfg, 6, 1), b = run_replicas(cfg, 6, 3);
    for (std::size_t r = 0; r < 6; ++r) {
      CHECK(a[r].logW == b[r].logW);
      CHECK(a[r].seed == replica_seed(77, r));
    }
    CHECK(a[0].logW != a[1].logW);
  }

  TEST_CASE("pair moment recursion") {
    const auto nn = build_nn_kernel(1);
    const double g = 0.8;
    CHECK(pair_moment_exact(nn, g, 1) == doctest::Approx(0.5 + 0.5 * std::exp(g)));
    for (const auto& k : {nn, build_power_law_kernel(1, 0.5, 2), build_nn_kernel(2)})
      for (int n = 1; n <= 3; ++n) CHECK(pair_moment_exact(k, g, n) == doctest::Approx(pair_moment_enumerate(k, g, n)));
  }

  TEST_CASE("small fixed windows flag leakage") {
    RunConfig cfg(build_power_law_kernel(1, 0.5, 20), EnvironmentModel::gaussian(0.0, 1.0));
    cfg.n_steps = 10;
    cfg.window = WindowPolicy::fixed(Box{1, {-5, 0, 0}, {5, 0, 0}});
    const auto d = run_polymer(cfg);
    CHECK(d.leak_flagged);
    CHECK(d.leak_flag_step >= 1);
  }

  TEST_CASE("configuration checks") {
    RunConfig cfg(build_nn_kernel(1), EnvironmentModel::gaussian(0.0, 1.0));
    cfg.n_steps = 0;
    CHECK_THROWS_AS(run_polymer(cfg), InvalidArgument);
    cfg.n_steps = 5;
    cfg.beta = -1;
    CHECK_THROWS_AS(run_polymer(cfg), InvalidArgument);
    cfg.beta = 1;
    cfg.record.snapshot_times = {6};
    CHECK_THROWS_AS(run_polymer(cfg), InvalidArgument);
    cfg.record.snapshot_times = {};
    CHECK_THROWS_AS(free_energy_estimate(run_polymer(cfg)), DiagnosticError);
    CHECK_THROWS_AS(enumerate_Z(build_power_law_kernel(1, 0.5, 10), FieldSlab{}, 1.0, 12), ResourceError);
  }

  TEST_CASE("strong disorder in one dimension") {
    RunConfig cfg(build_nn_kernel(1), EnvironmentModel::gaussian(0.0, 1.0));
    cfg.beta = 3.0;
    cfg.n_steps = 600;
    cfg.base_seed = 5;
    const auto d = run_polymer(cfg);
    const auto fe = free_energy_estimate(d);
    CHECK(fe.p_hat < fe.lambda);
    CHECK(d.J_cesaro.back() > 0.1);
    const auto r = localization_ratio(d);
    CHECK(r.last_half_min > 0.0);
  }
}

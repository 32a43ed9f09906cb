#include <doctest.h>

#include <cmath>
#include <numbers>

#include "stablepoly/errors.hpp"
#include "stablepoly/walk_analysis.hpp"

using namespace stablepoly;

namespace {
double central_binomial_over_4n(int n) {
  double r = 1.0;
  for (int k = 1; k <= n; ++k) r *= (n + k) / (4.0 * k);
  return r;
}
}  // namespace

TEST_SUITE("walk_analysis") {
  TEST_CASE("difference law of the nearest-neighbour walk") {
    const DifferenceWalk w(build_nn_kernel(1));
    const auto& ds = w.diff_support();
    CHECK(ds.size() == 3);
    CHECK(ds.prob_at({0, 0, 0}) == doctest::Approx(0.5));
    CHECK(ds.prob_at({2, 0, 0}) == doctest::Approx(0.25));
    for (double z : {0.2, 1.1, 2.9}) {
      CHECK(difference_char_fn(w, std::span<const double>(&z, 1)) == doctest::Approx(std::cos(z) * std::cos(z)));
      CHECK(one_minus_difference_char_fn(w, std::span<const double>(&z, 1)) ==
            doctest::Approx(std::sin(z) * std::sin(z)));
    }
  }

  TEST_CASE("periodic points come from the support-difference lattice") {
    CHECK(periodic_points(build_nn_kernel(1)).size() == 2);
    CHECK(periodic_points(build_nn_kernel(2)).size() == 2);
    CHECK(periodic_points(build_power_law_kernel(1, 0.5, 5)).size() == 1);
    CHECK(periodic_points(JumpKernel(1, {{-3, 0, 0}, {3, 0, 0}}, {0.5, 0.5})).size() == 6);
  }

  TEST_CASE("transience classes") {
    CHECK(classify_transience(build_nn_kernel(1)) == Transience::recurrent);
    CHECK(classify_transience(build_nn_kernel(2)) == Transience::borderline);
    CHECK(classify_transience(build_nn_kernel(3)) == Transience::transient);
    CHECK(classify_transience(build_power_law_kernel(1, 0.5, 50)) == Transience::transient);
    CHECK(classify_transience(build_power_law_kernel(1, 1.0, 50)) == Transience::borderline);
    CHECK(classify_transience(build_power_law_kernel(1, 1.5, 50)) == Transience::recurrent);
    CHECK(classify_transience(build_power_law_kernel(2, 1.0, 20)) == Transience::transient);
  }

  TEST_CASE("simple cubic lattice Green function") {
    const DifferenceWalk w(build_nn_kernel(3));
    // Watson's integral for the simple cubic lattice.
    CHECK(green_function(w) == doctest::Approx(1.516386).epsilon(1e-3));
  }

  TEST_CASE("recurrent walks are flagged infinite") {
    const DifferenceWalk w(build_nn_kernel(1));
    const auto cf = chung_fuchs_integral(w);
    CHECK(cf.integral.infinite);
    CHECK(cf.fit.alpha == doctest::Approx(2.0).epsilon(0.02));
    CHECK_THROWS_AS(green_function(w), UnsupportedCase);
    CHECK_THROWS_AS(return_probability(w, ReturnMethod::green_quadrature), UnsupportedCase);
  }

  TEST_CASE("torus return probabilities are exact convolution powers") {
    const DifferenceWalk w(build_nn_kernel(1));
    const std::vector<std::int64_t> ns{1, 2, 3, 5, 10};
    const auto r = torus_return_probabilities(w, 64, ns);
    for (std::size_t i = 0; i < ns.size(); ++i)
      CHECK(r[i] == doctest::Approx(central_binomial_over_4n(static_cast<int>(ns[i]))).epsilon(1e-12));
  }

  TEST_CASE("geometric moment closed form") {
    CHECK(exp_moment_Ninfty(0.3, 0.0).value == doctest::Approx(1.0));
    CHECK(exp_moment_Ninfty(0.3, 0.5).value == doctest::Approx(0.7 / (1 - 0.3 * std::exp(0.5))));
    CHECK(exp_moment_Ninfty(0.3, std::log(1 / 0.3)).infinite);
    CHECK_THROWS_AS(exp_moment_Ninfty(1.0, 0.1), InvalidArgument);
  }

  TEST_CASE("meeting counts are reproducible across worker counts") {
    const DifferenceWalk w(build_power_law_kernel(1, 0.5, 100));
    const auto a = meeting_counts(w, 7, 200, 500, 1);
    const auto b = meeting_counts(w, 7, 200, 500, 4);
    CHECK(a == b);
    const auto c = meeting_counts(w, 8, 200, 500, 4);
    CHECK(a != c);
  }

  TEST_CASE("monte carlo and quadrature return probabilities agree") {
    const DifferenceWalk w(build_nn_kernel(3));
    ReturnParams p;
    p.horizon = 2000;
    p.samples = 20000;
    p.seed = 3;
    const auto g = return_probability(w, ReturnMethod::green_quadrature, p);
    const auto mc = return_probability(w, ReturnMethod::monte_carlo, p);
    CHECK(g.pi > 0.0);
    CHECK(g.pi < 1.0);
    CHECK(mc.std_error > 0.0);
    // MC undercounts late returns; the fitted tail bound covers the gap.
    const double tail = mc.detail["tail_bound"].get<double>();
    CHECK(mc.pi <= g.pi + 4 * mc.std_error);
    CHECK(mc.pi + tail + 4 * mc.std_error >= g.pi);
  }

  TEST_CASE("quadrature and series Green functions agree in 2d") {
    const DifferenceWalk w(build_power_law_kernel(2, 1.0, 100));
    const double gq = green_function(w);
    const auto gs = green_series(w);
    REQUIRE_FALSE(gs.G.infinite);
    CHECK(std::abs(gq - gs.G.value) / gq < 0.01);
  }
}

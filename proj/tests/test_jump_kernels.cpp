#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "stablepoly/errors.hpp"
#include "stablepoly/jump_kernels.hpp"

using namespace stablepoly;

TEST_SUITE("jump_kernels") {
  TEST_CASE("nearest-neighbour kernels are uniform on the 2d unit vectors") {
    for (int d = 1; d <= 3; ++d) {
      const auto k = build_nn_kernel(d);
      CHECK(k.size() == static_cast<std::size_t>(2 * d));
      CHECK(kernel_entropy(k) == doctest::Approx(std::log(2.0 * d)).epsilon(1e-15));
      CHECK(k.is_symmetric());
      CHECK(k.alpha() == 2.0);
    }
  }

  TEST_CASE("four-site power law has the closed-form normalization") {
    const auto k = build_power_law_kernel(1, 0.5, 2);
    REQUIRE(k.size() == 4);
    const double w2 = std::pow(2.0, -1.5);
    const double p1 = 1.0 / (2.0 * (1.0 + w2));
    CHECK(k.prob_at({1, 0, 0}) == doctest::Approx(p1).epsilon(1e-15));
    CHECK(k.prob_at({-1, 0, 0}) == doctest::Approx(p1).epsilon(1e-15));
    CHECK(k.prob_at({2, 0, 0}) == doctest::Approx(p1 * w2).epsilon(1e-15));
    CHECK(k.prob_at({0, 0, 0}) == 0.0);
    CHECK(k.prob_at({3, 0, 0}) == 0.0);
  }

  TEST_CASE("2d cutoff is a sup-norm box with euclidean weights") {
    const auto k = build_power_law_kernel(2, 1.0, 2);
    REQUIRE(k.size() == 24);
    const double axis = k.prob_at({1, 0, 0});
    CHECK(k.prob_at({-1, 1, 0}) == doctest::Approx(axis * std::pow(2.0, -1.5)));
    CHECK(k.prob_at({0, -2, 0}) == doctest::Approx(axis * std::pow(2.0, -3.0)));
    CHECK(k.prob_at({2, 2, 0}) == doctest::Approx(axis * std::pow(8.0, -1.5)));
    CHECK(k.prob_at({2, 1, 0}) == doctest::Approx(axis * std::pow(5.0, -1.5)));
    const double total = 4 * (1 + std::pow(2.0, -1.5) + std::pow(2.0, -3.0) + std::pow(8.0, -1.5)) + 8 * std::pow(5.0, -1.5);
    CHECK(axis == doctest::Approx(1.0 / total));
  }

  TEST_CASE("support is sorted, normalized and symmetric") {
    const auto k = build_power_law_kernel(2, 1.3, 15);
    double s = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) {
      s += k.prob(i);
      if (i > 0) CHECK(k.site(i - 1) < k.site(i));
      const Site x = k.site(i);
      CHECK(k.prob_at({-x[0], -x[1], 0}) == k.prob(i));
      CHECK(k.find(x) == i);
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(k.max_radius() == 15);
  }

  TEST_CASE("asymmetric kernels report a mean and centre their norming") {
    JumpKernel k(1, {{-1, 0, 0}, {2, 0, 0}}, {0.5, 0.5}, 2.0, std::nullopt);
    CHECK_FALSE(k.is_symmetric());
    CHECK(k.mean()[0] == doctest::Approx(0.5));
    const auto nm = norming(k, 16);
    CHECK(nm.a_n == doctest::Approx(4.0));
    CHECK(nm.b_n[0] == doctest::Approx(8.0));
  }

  TEST_CASE("invalid kernels are rejected") {
    CHECK_THROWS_AS(JumpKernel(1, {{1, 0, 0}}, {0.5}), InvalidArgument);
    CHECK_THROWS_AS(JumpKernel(1, {{1, 0, 0}, {-1, 0, 0}}, {1.5, -0.5}), InvalidArgument);
    CHECK_THROWS_AS(JumpKernel(1, {{1, 0, 0}, {1, 0, 0}}, {0.5, 0.5}), InvalidArgument);
    CHECK_THROWS_AS(build_power_law_kernel(1, 2.0, 10), InvalidArgument);
    CHECK_THROWS_AS(build_power_law_kernel(1, 0.5, 0), InvalidArgument);
    CHECK_THROWS_AS(build_power_law_kernel(4, 0.5, 3), InvalidArgument);
    CHECK_THROWS_AS(build_power_law_kernel(3, 0.5, 1000), ResourceError);
  }

  TEST_CASE("sampler frequencies match the kernel") {
    const auto k = build_power_law_kernel(1, 0.5, 20);
    JumpSampler s(k);
    Rng rng = make_rng(11, 0);
    const int draws = 400'000;
    std::vector<double> counts(k.size(), 0.0);
    for (int i = 0; i < draws; ++i) counts[s.sample_index(rng)] += 1.0;
    double chi2 = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) {
      const double e = draws * k.prob(i);
      chi2 += (counts[i] - e) * (counts[i] - e) / e;
    }
    // 39 degrees of freedom; 0.999 quantile is about 72.
    CHECK(chi2 < 72.0);
  }

  TEST_CASE("two-tier sampler reaches the tail table") {
    const auto k = build_power_law_kernel(1, 0.5, 200'000);
    JumpSampler s(k);
    Rng rng = make_rng(5, 1);
    double exact = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i)
      if (std::abs(k.coord(i, 0)) > 50'000) exact += k.prob(i);
    const int draws = 200'000;
    int far = 0;
    for (int i = 0; i < draws; ++i)
      if (std::abs(s(rng)[0]) > 50'000) ++far;
    const double se = std::sqrt(exact * (1 - exact) / draws);
    CHECK(std::abs(far / double(draws) - exact) < 5 * se);
  }

  TEST_CASE("tail exponent is recovered and refused for short supports") {
    const auto tp = tail_profile(build_power_law_kernel(1, 0.5, 100'000));
    CHECK(tp.alpha_hat == doctest::Approx(0.5).epsilon(0.1));
    CHECK(tp.p_star == doctest::Approx(0.5));
    CHECK(tail_profile(build_power_law_kernel(2, 1.2, 1000)).alpha_hat == doctest::Approx(1.2).epsilon(0.1));
    CHECK_THROWS_AS(tail_profile(build_nn_kernel(1)), DiagnosticError);
  }

  TEST_CASE("tail masses decrease from one") {
    const auto t = tail_masses(build_power_law_kernel(1, 0.5, 1000));
    REQUIRE(!t.empty());
    CHECK(t.front().second == doctest::Approx(1.0));
    for (std::size_t i = 1; i < t.size(); ++i) CHECK(t[i].second <= t[i - 1].second);
  }

  TEST_CASE("characteristic function") {
    const auto nn = build_nn_kernel(1);
    for (double z : {0.0, 0.3, 1.7, std::numbers::pi}) {
      CHECK(char_fn(nn, std::span<const double>(&z, 1)).real() == doctest::Approx(std::cos(z)));
      CHECK(one_minus_re_char_fn(nn, std::span<const double>(&z, 1)) == doctest::Approx(1.0 - std::cos(z)));
    }
    const auto k = build_power_law_kernel(2, 0.8, 30);
    const double z0[2] = {0.0, 0.0};
    CHECK(char_fn(k, z0).real() == doctest::Approx(1.0));
    const double z[2] = {1e-7, 2e-7};
    const double small = one_minus_re_char_fn(k, z);
    CHECK(small > 0.0);
    CHECK(small < 1e-10);
  }

  TEST_CASE("fitted limit") {
    const auto g1 = fitted_limit(build_nn_kernel(1));
    CHECK(g1.alpha == 2.0);
    CHECK((*g1.covariance)(0, 0) == doctest::Approx(1.0));
    const auto g2 = fitted_limit(build_nn_kernel(2));
    CHECK((*g2.covariance)(0, 0) == doctest::Approx(0.5));
    CHECK((*g2.covariance)(0, 1) == doctest::Approx(0.0));
    const auto s = fitted_limit(build_power_law_kernel(2, 0.9, 200));
    CHECK(s.alpha == 0.9);
    REQUIRE(s.spherical);
    CHECK(check_full_dimension(s));
    // Symmetric kernel: symmetric spherical part.
    const double a[2] = {1.0, 0.0}, b[2] = {-1.0, 0.0};
    CHECK(s.spherical->mass_at(a) == doctest::Approx(s.spherical->mass_at(b)));
  }

  TEST_CASE("json round trip") {
    const auto k = build_power_law_kernel(2, 1.1, 6);
    const auto back = kernel_from_json(to_json(k));
    REQUIRE(back.size() == k.size());
    for (std::size_t i = 0; i < k.size(); ++i) {
      CHECK(back.site(i) == k.site(i));
      CHECK(back.prob(i) == k.prob(i));
    }
    CHECK(back.alpha() == k.alpha());
    CHECK(back.trunc_radius() == k.trunc_radius());
  }
}

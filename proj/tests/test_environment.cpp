#include <doctest.h>

#include <cmath>

#include "stablepoly/environment.hpp"
#include "stablepoly/errors.hpp"

using namespace stablepoly;

TEST_SUITE("environment") {
  TEST_CASE("log-moment generating functions") {
    const auto g = EnvironmentModel::gaussian(0.0, 1.0);
    const auto g2 = EnvironmentModel::gaussian(0.3, 2.0);
    const auto b = EnvironmentModel::bernoulli(0.5);
    const auto t = EnvironmentModel::table({-1.0, 1.0}, {0.5, 0.5});
    for (double beta : {0.0, 0.25, 1.0, 3.0}) {
      CHECK(lambda(g, beta) == doctest::Approx(beta * beta / 2));
      CHECK(lambda(g2, beta) == doctest::Approx(0.3 * beta + 2.0 * beta * beta));
      CHECK(gamma1(g, beta) == doctest::Approx(beta * beta));
      CHECK(gamma1(g2, beta) == doctest::Approx(4.0 * beta * beta));
      CHECK(lambda(b, beta) == doctest::Approx(std::log(0.5 + 0.5 * std::exp(beta))));
      CHECK(lambda(t, beta) == doctest::Approx(std::log(std::cosh(beta))));
    }
  }

  TEST_CASE("bernoulli gamma1 saturates at ln(1/rho)") {
    const auto b = EnvironmentModel::bernoulli(0.5);
    CHECK(gamma1(b, 20.0) < std::log(2.0));
    CHECK(gamma1(b, 20.0) == doctest::Approx(std::log(2.0)).epsilon(1e-8));
    for (double beta = 0.5; beta < 30; beta += 0.5) CHECK(gamma1(b, beta) > gamma1(b, beta - 0.5));
  }

  TEST_CASE("derivative matches finite differences") {
    for (const auto& env : {EnvironmentModel::gaussian(0.1, 0.7), EnvironmentModel::bernoulli(0.2),
                            EnvironmentModel::table({-2.0, 0.0, 3.0}, {0.2, 0.5, 0.3})})
      for (double beta : {0.1, 1.0, 2.5}) {
        const double h = 1e-5;
        const double fd = (lambda(env, beta + h) - lambda(env, beta - h)) / (2 * h);
        CHECK(lambda_prime(env, beta) == doctest::Approx(fd).epsilon(1e-7));
      }
  }

  TEST_CASE("normal quantile") {
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
    CHECK(normal_quantile(1e-10) == doctest::Approx(-6.361340902404056).epsilon(1e-12));
    for (double p : {1e-6, 0.01, 0.3}) CHECK(normal_quantile(p) == doctest::Approx(-normal_quantile(1 - p)));
  }

  TEST_CASE("field values are a pure function of (seed, n, x)") {
    const auto g = EnvironmentModel::gaussian(0.0, 1.0);
    const Site x{3, -7, 0};
    CHECK(field_value(g, 42, 5, x) == field_value(g, 42, 5, x));
    CHECK(field_value(g, 42, 5, x) != field_value(g, 43, 5, x));
    CHECK(field_value(g, 42, 5, x) != field_value(g, 42, 6, x));
    CHECK(field_value(g, 42, 5, x) != field_value(g, 42, 5, Site{3, -6, 0}));
    CHECK(field_value_at(g, counter_prefix(42, 5), x) == field_value(g, 42, 5, x));
  }

  TEST_CASE("field moments") {
    const auto g = EnvironmentModel::gaussian(0.0, 1.0);
    const auto b = EnvironmentModel::bernoulli(0.3);
    const int m = 200'000;
    double s = 0, s2 = 0, ones = 0;
    for (int i = 0; i < m; ++i) {
      const double v = field_value(g, 9, 1, Site{i, 0, 0});
      s += v;
      s2 += v * v;
      ones += field_value(b, 9, 1, Site{i, 0, 0});
    }
    CHECK(std::abs(s / m) < 5.0 / std::sqrt(m));
    CHECK(std::abs(s2 / m - 1.0) < 5.0 * std::sqrt(2.0 / m));
    CHECK(std::abs(ones / m - 0.3) < 5.0 * std::sqrt(0.21 / m));
  }

  TEST_CASE("slabs agree with pointwise values and respect the budget") {
    const auto g = EnvironmentModel::gaussian(0.0, 1.0);
    const Box w{2, {-3, -2, 0}, {4, 1, 0}};
    const auto slab = sample_field(g, 17, 2, 6, w);
    for (std::int64_t n = 2; n < 6; ++n)
      for (std::size_t i = 0; i < w.volume(); ++i) CHECK(slab.at(n, w.site(i)) == field_value(g, 17, n, w.site(i)));
    CHECK_THROWS_AS(sample_field(g, 17, 1, 100, w, 10), ResourceError);
  }

  TEST_CASE("invalid laws and json round trip") {
    CHECK_THROWS_AS(EnvironmentModel::gaussian(0.0, -1.0), InvalidArgument);
    CHECK_THROWS_AS(EnvironmentModel::bernoulli(1.0), InvalidArgument);
    CHECK_THROWS_AS(EnvironmentModel::table({1.0, 2.0}, {0.5, 0.6}), InvalidArgument);
    CHECK_THROWS_AS(environment_from_json(nlohmann::json{{"kind", "cauchy"}}), InvalidArgument);
    for (const auto& env : {EnvironmentModel::gaussian(0.2, 1.5), EnvironmentModel::bernoulli(0.4),
                            EnvironmentModel::table({-1.0, 2.0}, {0.25, 0.75})}) {
      const auto back = environment_from_json(to_json(env));
      CHECK(back.describe() == env.describe());
      CHECK(lambda(back, 1.3) == lambda(env, 1.3));
    }
  }
}

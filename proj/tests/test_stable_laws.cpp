#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "stablepoly/errors.hpp"
#include "stablepoly/stable_laws.hpp"

using namespace stablepoly;

namespace {

StableExponent symmetric_1d(double alpha, double mass) {
  StableExponent e;
  e.alpha = alpha;
  e.tau = {0.0};
  e.spherical = SphericalMeasure(1, {1.0, -1.0}, {mass, mass});
  return e;
}

}  // namespace

TEST_SUITE("stable_laws") {
  TEST_CASE("gaussian exponent is minus half the quadratic form") {
    StableExponent e;
    e.alpha = 2.0;
    e.tau = {0.0, 0.0};
    e.covariance = Eigen::MatrixXd::Identity(2, 2);
    const double z[2] = {1.0, 2.0};
    const auto psi = eval_exponent(e, z);
    CHECK(psi.real() == doctest::Approx(-2.5));
    CHECK(psi.imag() == 0.0);
  }

  TEST_CASE("symmetric spherical part gives a real exponent") {
    const auto e = symmetric_1d(0.5, 1.0);
    for (double z : {-3.0, -0.1, 0.7, 5.0}) {
      const auto psi = eval_exponent(e, std::span<const double>(&z, 1));
      CHECK(psi.real() == doctest::Approx(-2.0 * std::pow(std::abs(z), 0.5)));
      CHECK(std::abs(psi.imag()) < 1e-14);
    }
  }

  TEST_CASE("alpha = 1 carries the logarithmic skew term") {
    StableExponent e;
    e.alpha = 1.0;
    e.tau = {0.0};
    e.spherical = SphericalMeasure(1, {1.0}, {1.0});
    const double z = 2.0;
    const auto psi = eval_exponent(e, std::span<const double>(&z, 1));
    CHECK(psi.real() == doctest::Approx(-2.0));
    CHECK(psi.imag() == doctest::Approx(-(2.0 / std::numbers::pi) * 2.0 * std::log(2.0)));
  }

  TEST_CASE("exponent is homogeneous of degree alpha without drift") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double alpha : {0.3, 0.8, 1.5, 1.9}) {
      const double s = std::sqrt(0.5);
      StableExponent e;
      e.alpha = alpha;
      e.tau = {0.0, 0.0};
      e.spherical = SphericalMeasure(2, {1.0, 0.0, s, s, 0.0, -1.0}, {0.3, 1.0, 0.6});
      for (int k = 0; k < 20; ++k) {
        const double z[2] = {u(rng), u(rng)};
        const double t = 0.1 + 3.0 * (u(rng) + 1.0);
        const double tz[2] = {t * z[0], t * z[1]};
        const auto a = eval_exponent(e, tz), b = std::pow(t, alpha) * eval_exponent(e, z);
        CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
      }
    }
  }

  TEST_CASE("drift enters as i tau.z") {
    StableExponent e;
    e.alpha = 2.0;
    e.tau = {0.5};
    e.covariance = Eigen::MatrixXd::Zero(1, 1);
    const double z = 3.0;
    CHECK(eval_exponent(e, std::span<const double>(&z, 1)).imag() == doctest::Approx(1.5));
  }

  TEST_CASE("symmetrize doubles the mass and is even") {
    const double s = std::sqrt(0.5);
    SphericalMeasure m(2, {1.0, 0.0, s, s}, {2.0, 1.0});
    const auto sym = symmetrize(m);
    CHECK(sym.total_mass() == doctest::Approx(2.0 * m.total_mass()));
    const double a[2] = {s, s}, b[2] = {-s, -s};
    CHECK(sym.mass_at(a) == doctest::Approx(sym.mass_at(b)));
    CHECK(sym.mass_at(a) == doctest::Approx(1.0));
  }

  TEST_CASE("full dimension detects degenerate spherical parts") {
    StableExponent e;
    e.alpha = 1.2;
    e.tau = {0.0, 0.0};
    e.spherical = SphericalMeasure(2, {1.0, 0.0, -1.0, 0.0}, {1.0, 1.0});
    CHECK_FALSE(check_full_dimension(e));
    e.spherical = SphericalMeasure(2, {1.0, 0.0, -1.0, 0.0, 0.0, 1.0}, {1.0, 1.0, 0.2});
    CHECK(check_full_dimension(e));
    StableExponent g;
    g.alpha = 2.0;
    g.tau = {0.0, 0.0};
    g.covariance = Eigen::MatrixXd::Zero(2, 2);
    (*g.covariance)(0, 0) = 1.0;
    CHECK_FALSE(check_full_dimension(g));
  }

  TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS_AS(SphericalMeasure(2, {1.0, 1.0}, {1.0}), InvalidArgument);
    CHECK_THROWS_AS(SphericalMeasure(1, {1.0}, {-1.0}), InvalidArgument);
    auto e = symmetric_1d(2.5, 1.0);
    CHECK_THROWS_AS(e.validate(), InvalidArgument);
    e = symmetric_1d(0.0, 1.0);
    CHECK_THROWS_AS(e.validate(), InvalidArgument);
    StableExponent g;
    g.alpha = 2.0;
    g.tau = {0.0};
    CHECK_THROWS_AS(g.validate(), InvalidArgument);
  }

  TEST_CASE("json round trip preserves the exponent") {
    const auto e = symmetric_1d(0.7, 0.4);
    const auto back = stable_exponent_from_json(to_json(e));
    for (double z : {-2.0, 0.5, 4.0})
      CHECK(eval_exponent(back, std::span<const double>(&z, 1)) == eval_exponent(e, std::span<const double>(&z, 1)));
  }
}

#include <doctest.h>

#include <cmath>

#include "stablepoly/errors.hpp"
#include "stablepoly/phase_diagram.hpp"

using namespace stablepoly;

namespace {
ReturnEstimate fixed_pi(double v, ReturnMethod m = ReturnMethod::green_quadrature, double se = 0.0) {
  ReturnEstimate e;
  e.pi = v;
  e.method = m;
  e.std_error = se;
  return e;
}
}  // namespace

TEST_SUITE("phase_diagram") {
  const auto gauss = EnvironmentModel::gaussian(0.0, 1.0);

  TEST_CASE("strong condition margin") {
    const auto c = check_KP(gauss, 3.0, build_nn_kernel(1));
    CHECK(c.holds);
    CHECK(c.margin == doctest::Approx(4.5 - std::log(2.0)));
    CHECK_FALSE(check_KP(gauss, 0.5, build_nn_kernel(1)).holds);
  }

  TEST_CASE("weak condition margin and refusals") {
    const auto c0 = check_L2(gauss, 0.0, fixed_pi(0.2));
    CHECK(c0.holds);
    CHECK(c0.margin == doctest::Approx(std::log(5.0)));
    CHECK(check_L2(gauss, 1.0, fixed_pi(0.2)).margin == doctest::Approx(std::log(5.0) - 1.0));
    CHECK(check_L2(gauss, 0.1, fixed_pi(0.2), Transience::borderline).refused);
    CHECK_FALSE(check_L2(gauss, 0.1, fixed_pi(0.2), Transience::recurrent).holds);
    // Monte-Carlo estimates are taken at pi + 2 stderr.
    const auto mc = check_L2(gauss, 0.0, fixed_pi(0.2, ReturnMethod::monte_carlo, 0.05));
    CHECK(mc.margin == doctest::Approx(std::log(1.0 / 0.3)));
  }

  TEST_CASE("fractional moment bound never exceeds lambda") {
    const auto k = build_power_law_kernel(1, 0.5, 200);
    const PowerSum sums(k);
    for (double beta : {0.0, 0.5, 1.5, 3.0, 6.0}) {
      const auto b = fractional_moment_bound(gauss, beta, sums);
      CHECK(b.bound <= lambda(gauss, beta));
      CHECK(b.theta_star > 0.0);
      CHECK(b.theta_star <= 1.0);
    }
    CHECK_FALSE(fractional_moment_bound(gauss, 0.0, sums).below_lambda);
    const auto nn = fractional_moment_bound(gauss, 3.0, build_nn_kernel(1));
    CHECK(nn.below_lambda);
    // Closed form for the nearest-neighbour kernel: min (theta^2 9/2 + (1 - theta) ln 2) / theta.
    const double th = std::sqrt(2.0 * std::log(2.0) / 9.0);
    CHECK(nn.bound == doctest::Approx((4.5 * th * th + (1 - th) * std::log(2.0)) / th).epsilon(1e-9));
    CHECK(nn.theta_star == doctest::Approx(th).epsilon(1e-5));
  }

  TEST_CASE("power sums group equal probabilities") {
    const auto k = build_power_law_kernel(2, 1.0, 30);
    const PowerSum s(k);
    for (double th : {0.2, 0.7, 1.0}) {
      double direct = 0.0;
      for (double p : k.probs()) direct += std::pow(p, th);
      CHECK(s(th) == doctest::Approx(std::log(direct)).epsilon(1e-12));
    }
  }

  TEST_CASE("gaussian scan has a weak interval, a gap and a strong ray") {
    const auto k = build_power_law_kernel(1, 0.5, 100);
    std::vector<double> betas;
    for (int i = 0; i <= 40; ++i) betas.push_back(0.1 * i);
    ScanOptions opt;
    opt.pi = fixed_pi(0.3);
    const auto s = scan(betas, k, gauss, opt);
    REQUIRE(s.l2_max_beta);
    REQUIRE(s.kp_min_beta);
    CHECK(*s.l2_max_beta < *s.kp_min_beta);
    CHECK(s.points.front().verdict == Verdict::weak_sufficient);
    CHECK(s.points.back().verdict == Verdict::strong_sufficient);
    bool gap = false;
    for (const auto& p : s.points) gap = gap || p.verdict == Verdict::gap;
    CHECK(gap);
  }

  TEST_CASE("bernoulli disorder with rho above pi is weak at every beta") {
    const auto s = scan({0.5, 1, 2, 5, 20, 100}, build_power_law_kernel(1, 0.5, 100), EnvironmentModel::bernoulli(0.5),
                        {.pi = fixed_pi(0.3)});
    for (const auto& p : s.points) CHECK(p.verdict == Verdict::weak_sufficient);
  }

  TEST_CASE("borderline kernels are refused below the strong condition") {
    const auto s = scan({0.1, 5.0}, build_nn_kernel(2), gauss);
    CHECK(s.transience == Transience::borderline);
    CHECK(s.points[0].verdict == Verdict::borderline_refused);
    CHECK(s.points[1].verdict == Verdict::strong_sufficient);
  }

  TEST_CASE("attached simulations") {
    ScanOptions opt;
    opt.pi = fixed_pi(0.3);
    opt.attach_betas = {0.0, 0.5};
    opt.attach_replicas = 6;
    opt.attach_steps = 120;
    const auto s = scan({0.0, 0.5}, build_power_law_kernel(1, 0.5, 20), gauss, opt);
    REQUIRE(s.attachments.size() == 2);
    CHECK(s.attachments[0].second_moment.mean_W == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(s.attachments[1].free_energy.p_hat <= lambda(gauss, 0.5) + 3 * s.attachments[1].free_energy.std_error);
  }

  TEST_CASE("run classification") {
    RunConfig cfg(build_nn_kernel(1), gauss);
    cfg.beta = 3.0;
    cfg.n_steps = 200;
    CHECK(classify_run(run_polymer(cfg)) == RunClass::inconclusive);
    cfg.n_steps = 1000;
    CHECK(classify_run(run_polymer(cfg)) == RunClass::localized_consistent);
    RunConfig free(build_power_law_kernel(1, 0.5, 300), gauss);
    free.n_steps = 600;
    CHECK(classify_run(run_polymer(free)) == RunClass::delocalized_consistent);
  }

  TEST_CASE("scaling check is exact at zero temperature") {
    ScalingOptions opt;
    opt.n_list = {10, 30};
    opt.replicas = 4;
    const auto rep = scaling_check(build_power_law_kernel(1, 0.5, 30), gauss, 0.0, opt);
    CHECK(rep.rows.size() == 2 * default_test_functions().size());
    for (const auto& r : rep.rows) {
      CHECK(r.deviation == 0.0);
      CHECK(r.std == 0.0);
    }
    for (double ks : rep.kolmogorov) CHECK(ks == 0.0);
  }

  TEST_CASE("default test functions") {
    const auto g = default_test_functions();
    CHECK(g.size() == 7);
    CHECK(g.back().g(0.0) == doctest::Approx(0.5));
    CHECK(g.front().g(0.0) == doctest::Approx(1.0));
  }
}

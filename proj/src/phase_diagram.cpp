#include "stablepoly/phase_diagram.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "stablepoly/errors.hpp"

namespace stablepoly {

namespace {

double ols_slope(const std::vector<double>& y, std::size_t from, std::size_t to, double* se = nullptr) {
  const double m = static_cast<double>(to - from);
  double sx = 0, sy = 0;
  for (std::size_t i = from; i < to; ++i) {
    sx += static_cast<double>(i);
    sy += y[i];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = from; i < to; ++i) {
    const double dx = static_cast<double>(i) - mx;
    sxx += dx * dx;
    sxy += dx * (y[i] - my);
  }
  const double b = sxy / sxx;
  if (se) {
    double rss = 0;
    for (std::size_t i = from; i < to; ++i) {
      const double r = y[i] - my - b * (static_cast<double>(i) - mx);
      rss += r * r;
    }
    *se = m > 2 ? std::sqrt(rss / (m - 2) / sxx) : INFINITY;
  }
  return b;
}

bool monotone_family(const EnvironmentModel& env) { return env.kind() != EnvKind::table; }

}  // namespace

ConditionCheck check_L2(const EnvironmentModel& env, double beta, const ReturnEstimate& pi, Transience transience) {
  require(beta >= 0.0, "check_L2: beta must be non-negative");
  ConditionCheck c;
  if (transience != Transience::transient) {
    c.refused = true;
    c.note = "refused: kernel is " + to_string(transience);
    return c;
  }
  double p = pi.pi;
  if (pi.method == ReturnMethod::monte_carlo) p += 2.0 * pi.std_error;
  if (!(p > 0.0)) throw InvalidArgument("check_L2: return probability must be positive");
  if (p >= 1.0) {
    c.margin = -gamma1(env, beta);
    c.note = "return probability bound reaches 1";
    return c;
  }
  c.margin = std::log(1.0 / p) - gamma1(env, beta);
  c.holds = c.margin > 0.0;
  return c;
}

ConditionCheck check_KP(const EnvironmentModel& env, double beta, const JumpKernel& kernel) {
  require(beta >= 0.0, "check_KP: beta must be non-negative");
  ConditionCheck c;
  c.margin = beta * lambda_prime(env, beta) - lambda(env, beta) - kernel_entropy(kernel);
  c.holds = c.margin > 0.0;
  return c;
}

PowerSum::PowerSum(const JumpKernel& kernel) {
  std::vector<double> p(kernel.probs().begin(), kernel.probs().end());
  std::sort(p.begin(), p.end());
  for (std::size_t i = 0; i < p.size();) {
    std::size_t j = i;
    while (j < p.size() && p[j] == p[i]) ++j;
    if (p[i] > 0.0) {
      log_p_.push_back(std::log(p[i]));
      mult_.push_back(static_cast<double>(j - i));
    }
    i = j;
  }
}

double PowerSum::operator()(double theta) const {
  double s = 0.0;
  for (std::size_t i = 0; i < log_p_.size(); ++i) s += mult_[i] * std::exp(theta * log_p_[i]);
  return std::log(s);
}

FractionalBound fractional_moment_bound(const EnvironmentModel& env, double beta, const PowerSum& sums,
                                        int grid_points) {
  require(beta >= 0.0, "fractional moment: beta must be non-negative");
  require(grid_points >= 2, "fractional moment: need at least 2 grid points");
  const auto f = [&](double th) { return (lambda(env, beta * th) + sums(th)) / th; };
  FractionalBound out;
  out.lambda = lambda(env, beta);
  out.bound = out.lambda;
  out.theta_star = 1.0;
  int best = -1;
  double best_v = INFINITY;
  const double h = 1.0 / grid_points;
  for (int i = 0; i < grid_points; ++i) {
    const double th = (i + 0.5) * h;
    const double v = f(th);
    if (v < best_v) {
      best_v = v;
      best = i;
    }
  }
  double lo = std::max(1e-6, (best - 0.5) * h), hi = std::min(1.0, (best + 1.5) * h);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
  double fa = f(a), fb = f(b);
  for (int it = 0; it < 40; ++it) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - g * (hi - lo);
      fa = f(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + g * (hi - lo);
      fb = f(b);
    }
  }
  double th = fa < fb ? a : b, v = std::min(fa, fb);
  if (best_v < v) {
    v = best_v;
    th = (best + 0.5) * h;
  }
  if (v < out.bound) {
    out.bound = v;
    out.theta_star = th;
  }
  out.below_lambda = out.bound < out.lambda - 1e-12 * std::max(1.0, std::abs(out.lambda));
  return out;
}

FractionalBound fractional_moment_bound(const EnvironmentModel& env, double beta, const JumpKernel& kernel,
                                        int grid_points) {
  return fractional_moment_bound(env, beta, PowerSum(kernel), grid_points);
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::weak_sufficient: return "weak_sufficient";
    case Verdict::strong_sufficient: return "strong_sufficient";
    case Verdict::gap: return "gap";
    case Verdict::borderline_refused: return "borderline_refused";
  }
  return "?";
}

ScanResult scan(const std::vector<double>& beta_grid, const JumpKernel& kernel, const EnvironmentModel& env,
                const ScanOptions& options) {
  require(!beta_grid.empty(), "scan: empty beta grid");
  for (double b : beta_grid) require(b >= 0.0 && std::isfinite(b), "scan: beta values must be finite and >= 0");
  ScanResult res;
  res.transience = classify_transience(kernel);
  if (options.pi) {
    res.pi = *options.pi;
  } else if (res.transience == Transience::transient) {
    res.pi = return_probability(DifferenceWalk(kernel), ReturnMethod::green_quadrature, options.pi_params);
  } else {
    res.pi.pi = 1.0;
    res.pi.detail = {{"note", "not transient"}};
  }
  const PowerSum sums(kernel);
  for (double beta : beta_grid) {
    PhasePoint pt;
    pt.beta = beta;
    pt.kernel_id = options.kernel_id;
    pt.env_id = env.describe();
    pt.pi = res.pi;
    pt.gamma1 = gamma1(env, beta);
    const auto l2 = check_L2(env, beta, res.pi, res.transience);
    const auto kp = check_KP(env, beta, kernel);
    const auto fm = fractional_moment_bound(env, beta, sums, options.theta_grid);
    pt.l2_margin = l2.margin;
    pt.kp_margin = kp.margin;
    pt.fm_bound = fm.bound;
    pt.theta_star = fm.theta_star;
    if (l2.holds && kp.holds)
      throw AssertionFailure("scan: weak and strong sufficient conditions both hold at beta=" + std::to_string(beta));
    if (res.transience == Transience::borderline && !kp.holds)
      pt.verdict = Verdict::borderline_refused;
    else if (l2.holds)
      pt.verdict = Verdict::weak_sufficient;
    else if (kp.holds)
      pt.verdict = Verdict::strong_sufficient;
    else
      pt.verdict = Verdict::gap;
    if (l2.holds) res.l2_max_beta = std::max(res.l2_max_beta.value_or(beta), beta);
    if (kp.holds) res.kp_min_beta = std::min(res.kp_min_beta.value_or(beta), beta);
    res.points.push_back(std::move(pt));
  }
  if (monotone_family(env)) {
    std::vector<const PhasePoint*> sorted;
    for (const auto& p : res.points) sorted.push_back(&p);
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->beta < b->beta; });
    bool seen_l2_fail = false, seen_kp = false;
    for (const auto* p : sorted) {
      const bool l2 = p->verdict == Verdict::weak_sufficient;
      const bool kp = p->verdict == Verdict::strong_sufficient;
      if (l2 && seen_l2_fail) throw AssertionFailure("scan: weak condition region is not an interval from 0");
      if (!kp && seen_kp) throw AssertionFailure("scan: strong condition region is not a ray");
      if (!l2) seen_l2_fail = true;
      if (kp) seen_kp = true;
    }
  }
  for (double beta : options.attach_betas) {
    RunConfig cfg(options.sim_kernel ? *options.sim_kernel : kernel, env);
    cfg.beta = beta;
    cfg.n_steps = options.attach_steps;
    cfg.base_seed = derive_seed(options.seed, static_cast<std::uint64_t>(std::llround(beta * 1e6)));
    cfg.record.argmax = false;
    const auto reps = run_replicas(cfg, options.attach_replicas, options.workers);
    Attachment a;
    a.beta = beta;
    const double m = static_cast<double>(reps.size());
    std::vector<double> w2;
    for (const auto& r : reps) {
      const double w = std::exp(r.logW.back());
      a.second_moment.W.push_back(w);
      w2.push_back(w * w);
    }
    const auto mean_se = [m](const std::vector<double>& v, double& mean, double& se) {
      mean = 0;
      for (double x : v) mean += x;
      mean /= m;
      double var = 0;
      for (double x : v) var += (x - mean) * (x - mean);
      se = m > 1 ? std::sqrt(var / (m - 1) / m) : 0.0;
    };
    mean_se(w2, a.second_moment.mean, a.second_moment.std_error);
    mean_se(a.second_moment.W, a.second_moment.mean_W, a.second_moment.std_error_W);
    if (options.attach_steps >= 100) a.free_energy = free_energy_estimate(reps);
    res.attachments.push_back(std::move(a));
  }
  return res;
}

std::string to_string(RunClass c) {
  switch (c) {
    case RunClass::delocalized_consistent: return "delocalized_consistent";
    case RunClass::localized_consistent: return "localized_consistent";
    case RunClass::inconclusive: return "inconclusive";
  }
  return "?";
}

RunClass classify_run(const RunDiagnostics& diag, const ClassifyThresholds& t) {
  const std::size_t n = diag.logW.size();
  if (static_cast<std::int64_t>(n) < t.min_steps || n < 4) return RunClass::inconclusive;
  const std::size_t from = n / 2;
  double jm = 0.0;
  for (std::size_t i = from; i < n; ++i) jm += diag.J[i];
  jm /= static_cast<double>(n - from);
  double se = 0.0;
  const double b = ols_slope(diag.logW, from, n, &se);
  const auto [lo, hi] = std::minmax_element(diag.logW.begin() + static_cast<std::ptrdiff_t>(from), diag.logW.end());
  const double range = *hi - *lo;
  if (jm > t.tau_loc && b + 2.576 * se < 0.0) return RunClass::localized_consistent;
  if (jm < t.tau_del && range < t.logw_range_cap) return RunClass::delocalized_consistent;
  return RunClass::inconclusive;
}

std::vector<TestFunction> default_test_functions() {
  std::vector<TestFunction> out;
  for (double t : {0.5, 1.0, 2.0}) {
    out.push_back({"cos" + std::to_string(t).substr(0, 3), [t](double x) { return std::cos(t * x); }});
    out.push_back({"sin" + std::to_string(t).substr(0, 3), [t](double x) { return std::sin(t * x); }});
  }
  out.push_back({"step0", [](double x) { return 1.0 / (1.0 + std::exp(x / 0.25)); }});
  return out;
}

namespace {

const EndpointSnapshot& snapshot_at(const RunDiagnostics& d, std::int64_t n) {
  for (const auto& s : d.snapshots)
    if (s.n == n) return s;
  throw InvalidArgument("scaling: run has no snapshot at n=" + std::to_string(n));
}

// First-coordinate marginal of a snapshot.
std::map<std::int64_t, double> marginal(const EndpointSnapshot& s) {
  std::map<std::int64_t, double> m;
  for (std::size_t i = 0; i < s.prob.size(); ++i)
    if (s.prob[i] > 0.0) m[s.window.site(i)[0]] += s.prob[i];
  return m;
}

double integrate(const std::map<std::int64_t, double>& m, const std::function<double(double)>& g, double a,
                 double b) {
  double s = 0.0;
  for (const auto& [x, p] : m) s += p * g((static_cast<double>(x) - b) / a);
  return s;
}

}  // namespace

ScalingReport scaling_report(const JumpKernel& kernel, const std::vector<RunDiagnostics>& replicas,
                             const RunDiagnostics& reference, const std::vector<std::int64_t>& n_list,
                             const std::vector<TestFunction>& g_set_in) {
  require(!replicas.empty(), "scaling: no replicas");
  require(!n_list.empty(), "scaling: empty n list");
  const auto g_set = g_set_in.empty() ? default_test_functions() : g_set_in;
  ScalingReport rep;
  rep.n_values = n_list;
  for (const auto& g : g_set) rep.g_ids.push_back(g.id);
  const double m = static_cast<double>(replicas.size());
  for (std::int64_t n : n_list) {
    const Norming nm = norming(kernel, n);
    const double a = nm.a_n, b = nm.b_n.empty() ? 0.0 : nm.b_n[0];
    const auto ref = marginal(snapshot_at(reference, n));
    std::vector<std::map<std::int64_t, double>> margs;
    for (const auto& r : replicas) margs.push_back(marginal(snapshot_at(r, n)));
    for (const auto& g : g_set) {
      std::vector<double> v;
      for (const auto& mg : margs) v.push_back(integrate(mg, g.g, a, b));
      // Offsets from the first value keep identical replicas exactly equal to it.
      double mean = 0.0;
      for (double x : v) mean += x - v[0];
      mean = v[0] + mean / m;
      double var = 0.0;
      for (double x : v) var += (x - mean) * (x - mean);
      ScalingRow row;
      row.n = n;
      row.g_id = g.id;
      row.mean = mean;
      row.std = m > 1 ? std::sqrt(var / (m - 1)) : 0.0;
      row.nu_n = integrate(ref, g.g, a, b);
      row.deviation = std::abs(row.mean - row.nu_n);
      rep.rows.push_back(row);
    }
    std::map<std::int64_t, double> avg;
    for (const auto& mg : margs)
      for (const auto& [x, p] : mg) avg[x] += p / m;
    for (const auto& [x, p] : ref) avg.try_emplace(x, 0.0);
    double fa = 0.0, fr = 0.0, ks = 0.0;
    for (const auto& [x, p] : avg) {
      fa += p;
      const auto it = ref.find(x);
      if (it != ref.end()) fr += it->second;
      ks = std::max(ks, std::abs(fa - fr));
    }
    rep.kolmogorov.push_back(ks);
  }
  return rep;
}

ScalingReport scaling_check(const JumpKernel& kernel, const EnvironmentModel& env, double beta,
                            const ScalingOptions& options) {
  require(options.replicas >= 2, "scaling: need at least 2 replicas");
  require(!options.n_list.empty(), "scaling: empty n list");
  for (std::int64_t n : options.n_list) require(n >= 1, "scaling: n values must be positive");
  bool l2 = true;
  std::string note;
  if (options.pi) {
    const auto c = check_L2(env, beta, *options.pi, classify_transience(kernel));
    l2 = c.holds;
    if (!l2) note = "weak-disorder condition does not hold at this beta; convergence is not expected";
  }
  RunConfig cfg(kernel, env);
  cfg.beta = beta;
  cfg.n_steps = *std::max_element(options.n_list.begin(), options.n_list.end());
  cfg.base_seed = options.seed;
  cfg.record.argmax = false;
  cfg.record.snapshot_times = options.n_list;
  const auto reps = run_replicas(cfg, options.replicas, options.workers);
  RunConfig ref_cfg = cfg;
  ref_cfg.beta = 0.0;
  const auto ref = run_polymer(ref_cfg);
  auto rep = scaling_report(kernel, reps, ref, options.n_list, options.g_set);
  rep.l2_holds = l2;
  rep.note = note;
  return rep;
}

}  // namespace stablepoly

#include "stablepoly/polymer_engine.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "stablepoly/errors.hpp"
#include "stablepoly/parallel.hpp"
#include "stablepoly/walk_analysis.hpp"

namespace stablepoly {

namespace {

constexpr double kChainTol = 1e-12;

// Visits the sites of `box` in storage order, keeping the coordinates in an
// odometer instead of dividing indices.
template <class F>
void for_each_site(const Box& box, F&& f) {
  const std::size_t vol = box.volume();
  Site x = box.lo;
  const int last = box.dim - 1;
  for (std::size_t i = 0; i < vol; ++i) {
    f(i, x);
    for (int a = last; a >= 0; --a) {
      if (++x[a] <= box.hi[a]) break;
      x[a] = box.lo[a];
    }
  }
}

double sub_box_sum(const std::vector<double>& values, const Box& full, const Box& sub) {
  const int d = full.dim;
  const auto row = static_cast<std::size_t>(sub.extent(d - 1));
  const std::size_t rows = sub.volume() / row;
  double s = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* p = values.data() + full.index(sub.site(r * row));
    for (std::size_t i = 0; i < row; ++i) s += p[i];
  }
  return s;
}

std::vector<double> extract(const std::vector<double>& values, const Box& full, const Box& sub) {
  const int d = full.dim;
  std::vector<double> out(sub.volume());
  const auto row = static_cast<std::size_t>(sub.extent(d - 1));
  const std::size_t rows = sub.volume() / row;
  for (std::size_t r = 0; r < rows; ++r)
    std::copy_n(values.data() + full.index(sub.site(r * row)), row, out.data() + r * row);
  return out;
}

Box face(const Box& b, int axis, bool high) {
  Box f = b;
  if (high)
    f.lo[axis] = b.hi[axis];
  else
    f.hi[axis] = b.lo[axis];
  return f;
}

// Peels boundary slices of `box` while their cumulative mass stays within
// `allowance`; returns the peeled mass.
double trim_window(const std::vector<double>& values, const Box& full, Box& box, double allowance) {
  double peeled = 0.0;
  std::array<std::array<double, 2>, 3> face_mass{};
  std::array<std::array<bool, 2>, 3> stale{};
  for (auto& s : stale) s = {true, true};
  for (;;) {
    int best_axis = -1;
    bool best_high = false;
    double best = INFINITY;
    for (int a = 0; a < box.dim; ++a) {
      if (box.extent(a) <= 1) continue;
      for (int h = 0; h < 2; ++h) {
        if (stale[a][h]) {
          face_mass[a][h] = sub_box_sum(values, full, face(box, a, h == 1));
          stale[a][h] = false;
        }
        if (face_mass[a][h] < best) {
          best = face_mass[a][h];
          best_axis = a;
          best_high = h == 1;
        }
      }
    }
    if (best_axis < 0 || peeled + best > allowance) break;
    peeled += best;
    if (best_high)
      --box.hi[best_axis];
    else
      ++box.lo[best_axis];
    // Faces along other axes shrank; the opposite face on this axis did not.
    for (int a = 0; a < box.dim; ++a)
      if (a != best_axis) stale[a] = {true, true};
    stale[best_axis][best_high ? 1 : 0] = true;
  }
  return peeled;
}

}  // namespace

void RunConfig::validate() const {
  require(std::isfinite(beta) && beta >= 0.0, "run config: beta must be finite and >= 0");
  require(n_steps >= 1, "run config: n_steps must be >= 1");
  require(window.leak_budget > 0.0 && window.leak_budget < 1.0, "run config: leak_budget must lie in (0, 1)");
  require(window.margin_factor >= 1.0, "run config: margin_factor must be >= 1");
  if (window.kind == WindowPolicy::Kind::fixed) {
    require(window.box.dim == kernel.dim(), "run config: fixed window dimension mismatch");
    require(window.box.contains(Site{0, 0, 0}), "run config: fixed window must contain the origin");
  }
  for (auto t : record.snapshot_times) require(t >= 1 && t <= n_steps, "run config: snapshot time out of range");
  require(window_budget >= 1, "run config: window budget must be positive");
}

RunDiagnostics run_polymer(const RunConfig& cfg) {
  cfg.validate();
  const int d = cfg.kernel.dim();
  RunDiagnostics diag;
  diag.beta = cfg.beta;
  diag.lambda = lambda(cfg.env, cfg.beta);
  diag.seed = cfg.base_seed;
  const auto steps = static_cast<std::size_t>(cfg.n_steps);
  diag.logW.reserve(steps);
  diag.I.reserve(steps);
  diag.J.reserve(steps);
  diag.J_cesaro.reserve(steps);
  diag.leak_logmass.reserve(steps);
  const std::set<std::int64_t> snap(cfg.record.snapshot_times.begin(), cfg.record.snapshot_times.end());

  LayerConvolver conv(cfg.kernel, cfg.convolution);
  DenseLayer cur{Box::single(d, Site{0, 0, 0}), {1.0}};
  DenseLayer next;
  std::vector<double> expo;
  double log_scale = 0.0;
  double leak_total = 0.0;
  double j_sum = 0.0;
  const bool adaptive = cfg.window.kind == WindowPolicy::Kind::adaptive;
  const double step_budget = cfg.window.leak_budget / static_cast<double>(cfg.n_steps);

  for (std::int64_t n = 1; n <= cfg.n_steps; ++n) {
    const Box grown = cur.box.sum(cfg.kernel.bounding_box());
    if (grown.volume() > cfg.window_budget)
      throw ResourceError("run: window of " + std::to_string(grown.volume()) + " sites at step " + std::to_string(n) +
                          " exceeds the budget of " + std::to_string(cfg.window_budget));
    const double clamped = conv.apply(cur, next);
    if (conv.last_route() == ConvolutionMode::fft) ++diag.fft_steps;
    diag.max_window_volume = std::max(diag.max_window_volume, next.box.volume());

    // Predictive law mu_{n-1}(omega_n = .) is next / sum(next).
    double sum = 0.0, sum2 = 0.0, peak = -1.0;
    std::size_t peak_at = 0;
    for (std::size_t i = 0; i < next.values.size(); ++i) {
      const double v = next.values[i];
      sum += v;
      sum2 += v * v;
      if (v > peak) {
        peak = v;
        peak_at = i;
      }
    }
    if (!(sum > 0.0)) throw AssertionFailure("run: layer mass vanished at step " + std::to_string(n));
    const double I = sum2 / (sum * sum);
    const double J = peak / sum;
    if (J * J > I * (1.0 + kChainTol) || I > J * (1.0 + kChainTol))
      throw AssertionFailure("run: overlap chain J^2 <= I <= J violated at step " + std::to_string(n));
    double leaked = clamped / sum;
    if (cfg.record.argmax) diag.argmax.push_back(next.box.site(peak_at));

    if (!adaptive) {
      const Box inside = next.box.intersect(cfg.window.box);
      if (inside != next.box) {
        const double kept = inside.empty() ? 0.0 : sub_box_sum(next.values, next.box, inside);
        leaked += std::max(0.0, sum - kept) / sum;
        if (inside.empty()) throw AssertionFailure("run: fixed window lost all mass at step " + std::to_string(n));
        next.values = extract(next.values, next.box, inside);
        next.box = inside;
      }
    }

    // Disorder factor exp(beta eta(n, x) - lambda), shifted by its maximum.
    expo.assign(next.values.size(), -INFINITY);
    double emax = -INFINITY;
    if (cfg.beta != 0.0) {
      const std::uint64_t prefix = counter_prefix(cfg.base_seed, n);
      for_each_site(next.box, [&](std::size_t i, const Site& x) {
        if (next.values[i] == 0.0) return;
        const double e = cfg.beta * field_value_at(cfg.env, prefix, x) - diag.lambda;
        expo[i] = e;
        emax = std::max(emax, e);
      });
      for (std::size_t i = 0; i < next.values.size(); ++i)
        if (next.values[i] != 0.0) next.values[i] *= std::exp(expo[i] - emax);
      log_scale += emax;
    }
    double total = 0.0;
    for (double v : next.values) total += v;

    if (adaptive) {
      Box kept = next.box;
      const double peeled = trim_window(next.values, next.box, kept, step_budget * total);
      if (kept != next.box) {
        leaked += peeled / total;
        total -= peeled;
        next.values = extract(next.values, next.box, kept);
        next.box = kept;
      }
    }

    double m = 0.0;
    for (double v : next.values) m = std::max(m, v);
    const double inv = 1.0 / m;
    for (double& v : next.values) v *= inv;
    log_scale += std::log(m);
    total = 0.0;
    for (double v : next.values) total += v;

    leak_total += leaked;
    if (leak_total > cfg.window.leak_budget && !diag.leak_flagged) {
      diag.leak_flagged = true;
      diag.leak_flag_step = n;
    }
    diag.clamped_mass += clamped / sum;
    j_sum += J;
    diag.logW.push_back(log_scale + std::log(total));
    diag.I.push_back(I);
    diag.J.push_back(J);
    diag.J_cesaro.push_back(j_sum / static_cast<double>(n));
    diag.leak_logmass.push_back(leak_total > 0.0 ? std::log(leak_total) : -INFINITY);

    if (snap.count(n)) {
      EndpointSnapshot s;
      s.n = n;
      s.window = next.box;
      s.prob = next.values;
      for (double& v : s.prob) v /= total;
      diag.snapshots.push_back(std::move(s));
    }
    std::swap(cur, next);
  }
  if (cfg.record.final_layer) {
    LayerState st;
    st.time = cfg.n_steps;
    st.window = cur.box;
    st.logw.resize(cur.values.size());
    for (std::size_t i = 0; i < cur.values.size(); ++i)
      st.logw[i] = cur.values[i] > 0.0 ? std::log(cur.values[i]) + log_scale : -INFINITY;
    st.leaked_logmass = leak_total > 0.0 ? std::log(leak_total) : -INFINITY;
    diag.final_layer = std::move(st);
  }
  return diag;
}

// ---------------------------------------------------------------- oracles

EnumerationResult enumerate_Z(const JumpKernel& kernel, const FieldSlab& field, double beta, int n) {
  require(n >= 1, "enumerate_Z: n must be >= 1");
  const double paths = std::pow(static_cast<double>(kernel.size()), n);
  if (paths > kEnumerationBudget)
    throw ResourceError("enumerate_Z: " + std::to_string(static_cast<std::uint64_t>(paths)) + " paths exceed the budget");
  Box reach = Box::single(kernel.dim(), Site{0, 0, 0});
  for (int t = 0; t < n; ++t) reach = reach.sum(kernel.bounding_box());
  require(field.window.dim == kernel.dim() && field.window.intersect(reach) == reach,
          "enumerate_Z: field window does not cover the reachable sites");
  require(field.t0 <= 1 && field.t1 > n, "enumerate_Z: field time range does not cover 1..n");

  EnumerationResult res;
  double z_prev = 0.0;
  auto rec = [&](auto&& self, int t, const Site& x, double w) -> void {
    for (std::size_t k = 0; k < kernel.size(); ++k) {
      const Site y = x + kernel.site(k);
      const double wq = w * kernel.prob(k);
      const double wf = wq * std::exp(beta * field.at(t + 1, y));
      if (t + 1 == n) {
        res.predictive[y] += wq;
        res.endpoint[y] += wf;
        res.Z += wf;
        z_prev += wq;
      } else {
        self(self, t + 1, y, wf);
      }
    }
  };
  rec(rec, 0, Site{0, 0, 0}, 1.0);
  for (auto& [x, p] : res.endpoint) p /= res.Z;
  for (auto& [x, p] : res.predictive) p /= z_prev;
  return res;
}

double pair_moment_exact(const JumpKernel& kernel, double gamma1, int n) {
  require(n >= 0, "pair moment: n must be >= 0");
  require(std::isfinite(gamma1), "pair moment: gamma1 must be finite");
  if (n == 0) return 1.0;
  DifferenceWalk walk(kernel);
  const JumpKernel& diff = walk.diff_support();
  Box reach = Box::single(kernel.dim(), Site{0, 0, 0});
  for (int t = 0; t < n; ++t) reach = reach.sum(diff.bounding_box());
  if (reach.volume() > (std::size_t{1} << 26))
    throw ResourceError("pair moment: transfer window of " + std::to_string(reach.volume()) + " sites is too large");
  LayerConvolver conv(diff, ConvolutionMode::naive);
  DenseLayer cur{Box::single(kernel.dim(), Site{0, 0, 0}), {1.0}}, next;
  const double boost = std::exp(gamma1);
  for (int t = 1; t <= n; ++t) {
    conv.apply(cur, next);
    next.values[next.box.index(Site{0, 0, 0})] *= boost;
    std::swap(cur, next);
  }
  double s = 0.0;
  for (double v : cur.values) s += v;
  return s;
}

double pair_moment_enumerate(const JumpKernel& kernel, double gamma1, int n) {
  require(n >= 0, "pair moment: n must be >= 0");
  const double pairs = std::pow(static_cast<double>(kernel.size()), 2.0 * n);
  if (pairs > 1e8)
    throw ResourceError("pair moment: " + std::to_string(static_cast<std::uint64_t>(pairs)) + " path pairs exceed the budget");
  const double boost = std::exp(gamma1);
  auto rec = [&](auto&& self, int t, const Site& diff, double w) -> double {
    if (t == n) return w;
    double acc = 0.0;
    for (std::size_t a = 0; a < kernel.size(); ++a)
      for (std::size_t b = 0; b < kernel.size(); ++b) {
        const Site y = diff + kernel.site(a) - kernel.site(b);
        const bool meet = y[0] == 0 && y[1] == 0 && y[2] == 0;
        acc += self(self, t + 1, y, w * kernel.prob(a) * kernel.prob(b) * (meet ? boost : 1.0));
      }
    return acc;
  };
  return rec(rec, 0, Site{0, 0, 0}, 1.0);
}

std::uint64_t replica_seed(std::uint64_t base_seed, std::size_t replica) { return derive_seed(base_seed, replica); }

std::vector<RunDiagnostics> run_replicas(const RunConfig& cfg, std::size_t replicas, int workers) {
  cfg.validate();
  std::vector<RunDiagnostics> out(replicas);
  parallel_for(replicas, workers, [&](std::size_t r) {
    RunConfig c = cfg;
    c.base_seed = replica_seed(cfg.base_seed, r);
    out[r] = run_polymer(c);
  });
  return out;
}

MomentEstimate second_moment_mc(const RunConfig& cfg, std::size_t replicas, int workers) {
  require(replicas >= 2, "second moment: need at least two replicas");
  cfg.validate();
  MomentEstimate est;
  est.W.assign(replicas, 0.0);
  RunConfig lean = cfg;
  lean.record = RecordFlags{false, false, {}};
  parallel_for(replicas, workers, [&](std::size_t r) {
    RunConfig c = lean;
    c.base_seed = replica_seed(cfg.base_seed, r);
    est.W[r] = std::exp(run_polymer(c).logW.back());
  });
  const double m = static_cast<double>(replicas);
  double s1 = 0.0, s2 = 0.0;
  for (double w : est.W) {
    s1 += w;
    s2 += w * w;
  }
  est.mean_W = s1 / m;
  est.mean = s2 / m;
  double v1 = 0.0, v2 = 0.0;
  for (double w : est.W) {
    v1 += (w - est.mean_W) * (w - est.mean_W);
    v2 += (w * w - est.mean) * (w * w - est.mean);
  }
  est.std_error_W = std::sqrt(v1 / (m - 1.0) / m);
  est.std_error = std::sqrt(v2 / (m - 1.0) / m);
  return est;
}

namespace {

double slope(const std::vector<double>& y, std::size_t from, std::size_t to) {
  // Least squares of y[i] on i over [from, to).
  const double k = static_cast<double>(to - from);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = from; i < to; ++i) {
    mx += static_cast<double>(i);
    my += y[i];
  }
  mx /= k;
  my /= k;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = from; i < to; ++i) {
    sxy += (static_cast<double>(i) - mx) * (y[i] - my);
    sxx += (static_cast<double>(i) - mx) * (static_cast<double>(i) - mx);
  }
  return sxy / sxx;
}

}  // namespace

FreeEnergy free_energy_estimate(const RunDiagnostics& diag) {
  const std::size_t n = diag.logW.size();
  if (n < 100) throw DiagnosticError("free energy: need at least 100 steps, got " + std::to_string(n));
  const std::size_t from = n / 2;
  FreeEnergy fe;
  fe.lambda = diag.lambda;
  fe.p_hat = diag.lambda + slope(diag.logW, from, n);
  constexpr int kBlocks = 4;
  const std::size_t len = (n - from) / kBlocks;
  std::vector<double> bs;
  for (int b = 0; b < kBlocks; ++b) bs.push_back(slope(diag.logW, from + b * len, from + (b + 1) * len));
  double mean = 0.0;
  for (double v : bs) mean += v;
  mean /= kBlocks;
  double var = 0.0;
  for (double v : bs) var += (v - mean) * (v - mean);
  fe.std_error = std::sqrt(var / (kBlocks - 1) / kBlocks);
  fe.annealed_gap = fe.lambda - fe.p_hat;
  return fe;
}

FreeEnergy free_energy_estimate(const std::vector<RunDiagnostics>& replicas) {
  require(!replicas.empty(), "free energy: no replicas");
  if (replicas.size() == 1) return free_energy_estimate(replicas.front());
  std::vector<double> ps;
  for (const auto& r : replicas) ps.push_back(free_energy_estimate(r).p_hat);
  const double m = static_cast<double>(ps.size());
  double mean = 0.0;
  for (double p : ps) mean += p;
  mean /= m;
  double var = 0.0;
  for (double p : ps) var += (p - mean) * (p - mean);
  FreeEnergy fe;
  fe.lambda = replicas.front().lambda;
  fe.p_hat = mean;
  fe.std_error = std::sqrt(var / (m - 1.0) / m);
  fe.annealed_gap = fe.lambda - fe.p_hat;
  return fe;
}

RatioSeries localization_ratio(const RunDiagnostics& diag) {
  RatioSeries out;
  double cum = 0.0;
  for (std::size_t i = 0; i < diag.logW.size(); ++i) {
    cum += diag.I[i];
    require(cum > 0.0, "localization ratio: overlap sum must be positive");
    out.ratio.push_back(-diag.logW[i] / cum);
  }
  const std::size_t from = out.ratio.size() / 2;
  out.last_half_min = INFINITY;
  out.last_half_max = -INFINITY;
  for (std::size_t i = from; i < out.ratio.size(); ++i) {
    out.last_half_min = std::min(out.last_half_min, out.ratio[i]);
    out.last_half_max = std::max(out.last_half_max, out.ratio[i]);
  }
  return out;
}

nlohmann::json to_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["beta"] = cfg.beta;
  j["n_steps"] = cfg.n_steps;
  j["seed"] = cfg.base_seed;
  j["environment"] = to_json(cfg.env);
  j["kernel"] = {{"dim", cfg.kernel.dim()},
                 {"alpha", cfg.kernel.alpha() ? nlohmann::json(*cfg.kernel.alpha()) : nlohmann::json(nullptr)},
                 {"R", cfg.kernel.trunc_radius() ? nlohmann::json(*cfg.kernel.trunc_radius()) : nlohmann::json(nullptr)},
                 {"support_size", cfg.kernel.size()}};
  nlohmann::json w;
  w["kind"] = cfg.window.kind == WindowPolicy::Kind::fixed ? "fixed" : "adaptive";
  w["leak_budget"] = cfg.window.leak_budget;
  if (cfg.window.kind == WindowPolicy::Kind::fixed) {
    std::vector<std::int64_t> lo(cfg.window.box.lo.begin(), cfg.window.box.lo.begin() + cfg.window.box.dim);
    std::vector<std::int64_t> hi(cfg.window.box.hi.begin(), cfg.window.box.hi.begin() + cfg.window.box.dim);
    w["lo"] = lo;
    w["hi"] = hi;
  } else {
    w["margin_factor"] = cfg.window.margin_factor;
  }
  j["window"] = w;
  j["convolution"] = cfg.convolution == ConvolutionMode::naive ? "naive"
                     : cfg.convolution == ConvolutionMode::fft ? "fft"
                                                               : "auto";
  j["snapshot_times"] = cfg.record.snapshot_times;
  return j;
}

}  // namespace stablepoly

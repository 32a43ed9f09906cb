#include "stablepoly/walk_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>

#include "stablepoly/environment.hpp"
#include "stablepoly/errors.hpp"
#include "stablepoly/fft.hpp"
#include "stablepoly/parallel.hpp"

namespace stablepoly {

struct DifferenceWalk::Cache {
  std::once_flag diff_once;
  std::optional<JumpKernel> diff;
  std::once_flag sampler_once;
  std::optional<JumpSampler> sampler;
};

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kFitRadii = 8;
constexpr std::int64_t kMaxLatticeIndex = 64;

double sphere_area(int d) {
  switch (d) {
    case 1: return 2.0;
    case 2: return 2.0 * kPi;
    default: return 4.0 * kPi;
  }
}

// Smooth radial cutoff: 1 on [0, rho/2], 0 beyond rho.
double cutoff_weight(double r, double rho) {
  if (r <= 0.5 * rho) return 1.0;
  if (r >= rho) return 0.0;
  const double s = (r - 0.5 * rho) / (0.5 * rho);
  const double a = std::exp(-1.0 / (1.0 - s));
  const double b = std::exp(-1.0 / s);
  return a / (a + b);
}

// Integral over R^d of cutoff(|z|) / (c |z|^alpha).
double model_integral(int d, double alpha, double c, double rho) {
  const double p = d - alpha;
  // r = rho t^{1/p} turns r^{p-1} dr into rho^p / p dt.
  constexpr int kNodes = 4000;
  double acc = 0.0;
  for (int i = 0; i < kNodes; ++i) {
    const double t = (i + 0.5) / kNodes;
    acc += cutoff_weight(rho * std::pow(t, 1.0 / p), rho);
  }
  acc /= kNodes;
  return sphere_area(d) / c * std::pow(rho, p) / p * acc;
}

double wrap_angle(double v) {
  v = std::fmod(v + kPi, 2.0 * kPi);
  if (v < 0.0) v += 2.0 * kPi;
  return v - kPi;
}

struct Neumaier {
  double sum = 0.0, comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

// |q^|^2 on the grid z_j = offset + 2 pi j / n per axis, j = 0..n-1.
// `half_shift` selects the midpoint grid (offset -pi + pi/n) instead of 2 pi j / n.
std::vector<double> phi_on_grid(const JumpKernel& k, int n, bool half_shift) {
  const int d = k.dim();
  std::vector<int> dims(static_cast<std::size_t>(d), n);
  ComplexDft dft(dims, +1);
  auto* f = dft.data();
  const std::int64_t nn = n;
  for (std::size_t i = 0; i < k.size(); ++i) {
    std::size_t idx = 0;
    std::int64_t phase = 0;  // in units of pi / n, modulo 2n
    for (int a = 0; a < d; ++a) {
      const std::int64_t x = k.coord(i, a);
      idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(((x % nn) + nn) % nn);
      if (half_shift) phase = (phase + ((x % (2 * nn)) * (1 - nn)) % (2 * nn)) % (2 * nn);
    }
    const double theta = kPi * static_cast<double>(phase) / static_cast<double>(n);
    f[idx] += k.prob(i) * std::complex<double>(std::cos(theta), std::sin(theta));
  }
  dft.execute();
  std::vector<double> phi(dft.size());
  for (std::size_t j = 0; j < phi.size(); ++j) phi[j] = std::norm(f[j]);
  return phi;
}

std::int64_t next_pow2(std::int64_t v) {
  std::int64_t p = 1;
  while (p < v) p <<= 1;
  return p;
}

std::int64_t default_torus(const JumpKernel& k) {
  switch (k.dim()) {
    case 1: return std::clamp<std::int64_t>(next_pow2(8 * k.max_radius()), 1 << 14, 1 << 22);
    case 2: return 2048;
    default: return 256;
  }
}

std::int64_t default_terms(int d) {
  switch (d) {
    case 1: return 1000;
    case 2: return 500;
    default: return 2000;
  }
}

double tail_exponent_of(const JumpKernel& k) { return k.dim() / k.alpha().value_or(2.0); }

}  // namespace

DifferenceWalk::DifferenceWalk(JumpKernel kernel) : kernel_(std::move(kernel)), cache_(std::make_shared<Cache>()) {}

const JumpKernel& DifferenceWalk::diff_support(std::size_t budget) const {
  const double pairs = static_cast<double>(kernel_.size()) * static_cast<double>(kernel_.size());
  if (!cache_->diff && pairs > static_cast<double>(budget))
    throw ResourceError("difference support needs " + std::to_string(static_cast<std::uint64_t>(pairs)) +
                        " pair evaluations, budget is " + std::to_string(budget));
  std::call_once(cache_->diff_once, [&] {
    std::map<Site, double> acc;
    for (std::size_t i = 0; i < kernel_.size(); ++i)
      for (std::size_t j = 0; j < kernel_.size(); ++j)
        acc[kernel_.site(i) - kernel_.site(j)] += kernel_.prob(i) * kernel_.prob(j);
    std::vector<Site> sites;
    std::vector<double> probs;
    double total = 0.0;
    for (const auto& [s, p] : acc) total += p;
    for (const auto& [s, p] : acc) {
      sites.push_back(s);
      probs.push_back(p / total);
    }
    // Symmetrize exactly: the two halves of the double sum round differently.
    for (std::size_t i = 0, j = probs.size() - 1; i < j; ++i, --j) probs[i] = probs[j] = 0.5 * (probs[i] + probs[j]);
    std::optional<std::int64_t> radius;
    if (kernel_.trunc_radius()) radius = 2 * *kernel_.trunc_radius();
    cache_->diff.emplace(kernel_.dim(), sites, std::move(probs), kernel_.alpha(), radius, kernel_.scale_c());
  });
  return *cache_->diff;
}

const JumpSampler& DifferenceWalk::sampler() const {
  std::call_once(cache_->sampler_once, [&] { cache_->sampler.emplace(kernel_); });
  return *cache_->sampler;
}

double difference_char_fn(const DifferenceWalk& walk, std::span<const double> z) {
  return std::norm(char_fn(walk.kernel(), z));
}

double one_minus_difference_char_fn(const DifferenceWalk& walk, std::span<const double> z) {
  const double a = one_minus_re_char_fn(walk.kernel(), z);
  double b = 0.0;
  if (!walk.kernel().is_symmetric()) b = char_fn(walk.kernel(), z).imag();
  return a * (2.0 - a) - b * b;
}

// ---------------------------------------------------------------- lattice

std::vector<Point> periodic_points(const JumpKernel& k) {
  const int d = k.dim();
  // Upper-triangular integer basis of the lattice spanned by x_i - x_0,
  // maintained in Hermite normal form.
  using Row = std::array<__int128, 3>;
  std::array<Row, 3> basis{};
  auto pivots_product = [&] {
    __int128 det = 1;
    for (int a = 0; a < d; ++a) det *= basis[a][a];
    return det;
  };
  auto reduce_above = [&] {
    for (int r = 0; r < d; ++r)
      for (int c = r + 1; c < d; ++c) {
        if (basis[c][c] == 0) continue;
        __int128 q = basis[r][c] / basis[c][c];
        if (basis[r][c] - q * basis[c][c] < 0) --q;
        for (int t = 0; t < d; ++t) basis[r][t] -= q * basis[c][t];
      }
  };
  const Site x0 = k.site(0);
  for (std::size_t i = 1; i < k.size(); ++i) {
    const Site diff = k.site(i) - x0;
    Row v{diff[0], diff[1], diff[2]};
    for (int c = 0; c < d; ++c) {
      if (v[c] == 0) continue;
      if (basis[c][c] == 0) {
        if (v[c] < 0)
          for (auto& e : v) e = -e;
        basis[c] = v;
        break;
      }
      // Extended Euclid on column c between basis row c and v.
      __int128 a = basis[c][c], b = v[c];
      __int128 s0 = 1, s1 = 0, t0 = 0, t1 = 1;
      while (b != 0) {
        const __int128 q = a / b;
        std::tie(a, b) = std::make_pair(b, a - q * b);
        std::tie(s0, s1) = std::make_pair(s1, s0 - q * s1);
        std::tie(t0, t1) = std::make_pair(t1, t0 - q * t1);
      }
      if (a < 0) {
        a = -a;
        s0 = -s0;
        t0 = -t0;
      }
      const __int128 bc = basis[c][c] / a, vc = v[c] / a;
      Row merged{}, rest{};
      for (int t = 0; t < d; ++t) {
        merged[t] = s0 * basis[c][t] + t0 * v[t];
        rest[t] = bc * v[t] - vc * basis[c][t];
      }
      basis[c] = merged;
      v = rest;
    }
    reduce_above();
    bool full = true;
    for (int a = 0; a < d; ++a) full = full && basis[a][a] != 0;
    if (full && pivots_product() == 1) break;
  }
  for (int a = 0; a < d; ++a)
    if (basis[a][a] == 0) throw UnsupportedCase("difference walk does not span Z^d (support lies in a proper sublattice coset of lower rank)");
  const auto det = static_cast<std::int64_t>(pivots_product());
  if (det > kMaxLatticeIndex)
    throw UnsupportedCase("difference lattice has index " + std::to_string(det) + " (limit " +
                          std::to_string(kMaxLatticeIndex) + ")");
  std::vector<Point> out;
  std::array<std::int64_t, 3> j{0, 0, 0};
  const std::int64_t count = static_cast<std::int64_t>(std::pow(det, d));
  for (std::int64_t m = 0; m < count; ++m) {
    std::int64_t rem = m;
    for (int a = d - 1; a >= 0; --a) {
      j[a] = rem % det;
      rem /= det;
    }
    bool member = true;
    for (int r = 0; r < d && member; ++r) {
      __int128 dot = 0;
      for (int a = 0; a < d; ++a) dot += basis[r][a] * j[a];
      member = dot % det == 0;
    }
    if (!member) continue;
    Point p{0.0, 0.0, 0.0};
    for (int a = 0; a < d; ++a) p[a] = wrap_angle(2.0 * kPi * static_cast<double>(j[a]) / static_cast<double>(det));
    out.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------- quadrature

int default_quadrature_points(int dim) {
  switch (dim) {
    case 1: return 4096;
    case 2: return 512;
    default: return 128;
  }
}

LocalFit fit_local_exponent(const DifferenceWalk& walk, double h, int directions, std::uint64_t seed) {
  require(h > 0.0, "local fit: step must be positive");
  const int d = walk.kernel().dim();
  const auto du = static_cast<std::size_t>(d);
  std::vector<std::vector<double>> dirs;
  if (d == 1) {
    dirs.push_back({1.0});
  } else {
    Rng rng = make_rng(seed, 0x10ca1);
    for (int k = 0; k < std::max(1, directions); ++k) {
      std::vector<double> u(du);
      double norm = 0.0;
      for (auto& c : u) {
        c = normal_quantile(to_open_unit(rng()));
        norm += c * c;
      }
      for (auto& c : u) c /= std::sqrt(norm);
      dirs.push_back(std::move(u));
    }
  }
  std::vector<double> xs, ys;
  std::string trace;
  bool monotone = true;
  for (const auto& u : dirs) {
    double prev = -INFINITY;
    for (int i = 0; i < kFitRadii; ++i) {
      const double r = h * std::pow(16.0, static_cast<double>(i) / (kFitRadii - 1));
      std::vector<double> z(du);
      for (std::size_t a = 0; a < du; ++a) z[a] = r * u[a];
      const double gap = one_minus_difference_char_fn(walk, z);
      trace += " (" + std::to_string(r) + ", " + std::to_string(gap) + ")";
      if (!(gap > 0.0) || gap <= prev) monotone = false;
      prev = gap;
      if (gap > 0.0) {
        xs.push_back(std::log(r));
        ys.push_back(std::log(gap));
      }
    }
  }
  if (!monotone) throw DiagnosticError("local exponent fit: 1 - phi is not increasing near 0:" + trace);
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / double(xs.size());
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / double(ys.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  LocalFit fit;
  fit.h = h;
  fit.alpha = sxy / sxx;
  fit.c = std::exp(my - fit.alpha * mx);
  for (std::size_t i = 0; i < xs.size(); ++i) fit.residuals.push_back(ys[i] - (std::log(fit.c) + fit.alpha * xs[i]));
  return fit;
}

ChungFuchsResult chung_fuchs_integral(const DifferenceWalk& walk, const QuadratureSpec& grid) {
  const JumpKernel& k = walk.kernel();
  const int d = k.dim();
  int n = grid.points_per_axis > 0 ? grid.points_per_axis : default_quadrature_points(d);
  require(n >= 64, "chung-fuchs: at least 64 points per axis are required");
  const auto singular = periodic_points(k);
  // Keep every singular point off the midpoint grid.
  auto on_grid = [&](int m) {
    const double hg = 2.0 * kPi / m;
    for (const auto& p : singular) {
      bool all = true;
      for (int a = 0; a < d; ++a) {
        const double u = (p[a] + kPi) / hg - 0.5;
        all = all && std::abs(u - std::round(u)) < 1e-9;
      }
      if (all) return true;
    }
    return false;
  };
  while (on_grid(n)) ++n;
  const double hg = 2.0 * kPi / n;

  ChungFuchsResult res;
  res.points_per_axis = n;
  res.singular_points = singular.size();
  res.fit = fit_local_exponent(walk, hg, grid.fit_directions, grid.seed);
  if (res.fit.alpha >= d - grid.divergence_tolerance) {
    res.integral = MaybeInfinite::inf();
    return res;
  }

  double min_sep = 2.0 * kPi;
  for (std::size_t i = 0; i < singular.size(); ++i)
    for (std::size_t j = i + 1; j < singular.size(); ++j) {
      double s = 0.0;
      for (int a = 0; a < d; ++a) {
        const double t = wrap_angle(singular[i][a] - singular[j][a]);
        s += t * t;
      }
      min_sep = std::min(min_sep, std::sqrt(s));
    }
  const double rho = std::min({16.0 * hg, 0.45 * min_sep, 0.5 * kPi});
  res.cutoff = rho;

  const auto phi = phi_on_grid(k, n, true);
  Neumaier acc;
  for (double v : phi) {
    const double gap = 1.0 - v;
    if (!(gap > 0.0)) throw DiagnosticError("chung-fuchs: phi reaches 1 at a grid point away from the singular set");
    acc.add(1.0 / gap);
  }
  // Subtract the model around each singular point (torus distance).
  const auto span = static_cast<std::int64_t>(std::ceil(rho / hg)) + 1;
  for (const auto& p : singular) {
    std::array<std::int64_t, 3> centre{0, 0, 0};
    for (int a = 0; a < d; ++a) centre[a] = static_cast<std::int64_t>(std::floor((p[a] + kPi) / hg));
    std::array<std::int64_t, 3> off{0, 0, 0};
    const std::int64_t lo = -span, hi = span;
    std::array<std::int64_t, 3> lim{hi, d >= 2 ? hi : 0, d >= 3 ? hi : 0};
    std::array<std::int64_t, 3> start{lo, d >= 2 ? lo : 0, d >= 3 ? lo : 0};
    for (off[0] = start[0]; off[0] <= lim[0]; ++off[0])
      for (off[1] = start[1]; off[1] <= lim[1]; ++off[1])
        for (off[2] = start[2]; off[2] <= lim[2]; ++off[2]) {
          double r2 = 0.0;
          for (int a = 0; a < d; ++a) {
            const std::int64_t j = centre[a] + off[a];
            const double z = -kPi + (static_cast<double>(j) + 0.5) * hg;
            const double t = wrap_angle(z - p[a]);
            r2 += t * t;
          }
          const double r = std::sqrt(r2);
          const double w = cutoff_weight(r, rho);
          if (w > 0.0) acc.add(-w / (res.fit.c * std::pow(r, res.fit.alpha)));
        }
  }
  res.grid_part = acc.value() * std::pow(hg, d);
  res.model_part = static_cast<double>(singular.size()) * model_integral(d, res.fit.alpha, res.fit.c, rho);
  res.integral = MaybeInfinite::finite(res.grid_part + res.model_part);
  return res;
}

double green_function(const DifferenceWalk& walk, const QuadratureSpec& grid) {
  const auto cf = chung_fuchs_integral(walk, grid);
  if (cf.integral.infinite)
    throw UnsupportedCase("green function: the difference walk is recurrent (Chung-Fuchs integral diverges, fitted exponent " +
                          std::to_string(cf.fit.alpha) + ")");
  return cf.integral.value / std::pow(2.0 * kPi, walk.kernel().dim());
}

// ---------------------------------------------------------------- series

namespace {

std::vector<double> torus_phi(const JumpKernel& k, std::int64_t torus) {
  require(torus >= 2, "torus side must be >= 2");
  require(std::pow(static_cast<double>(torus), k.dim()) <= static_cast<double>(std::size_t{1} << 26),
          "torus too large");
  return phi_on_grid(k, static_cast<int>(torus), false);
}

double mean_power(const std::vector<double>& phi, std::int64_t n) {
  Neumaier acc;
  for (double v : phi) acc.add(n == 0 ? 1.0 : std::pow(v, static_cast<double>(n)));
  return acc.value() / static_cast<double>(phi.size());
}

}  // namespace

std::vector<double> torus_return_probabilities(const DifferenceWalk& walk, std::int64_t torus,
                                               const std::vector<std::int64_t>& ns) {
  const auto phi = torus_phi(walk.kernel(), torus);
  std::vector<double> out;
  for (auto n : ns) {
    require(n >= 0, "return probability: n must be >= 0");
    out.push_back(mean_power(phi, n));
  }
  return out;
}

SeriesGreen green_series(const DifferenceWalk& walk, const SeriesSpec& spec) {
  const JumpKernel& k = walk.kernel();
  SeriesGreen out;
  out.torus = spec.torus > 0 ? spec.torus : default_torus(k);
  out.terms = spec.terms > 0 ? spec.terms : default_terms(k.dim());
  require(out.terms >= 16, "green series: at least 16 terms are required");
  const auto phi = torus_phi(k, out.torus);
  const double big_n = static_cast<double>(out.terms);
  Neumaier acc;
  for (double v : phi) {
    const double gap = 1.0 - v;
    if (gap <= 1e-15) {
      acc.add(big_n + 1.0);
    } else if (v <= 0.0) {
      acc.add(1.0);
    } else {
      // (1 - v^{N+1}) / (1 - v)
      acc.add(-std::expm1((big_n + 1.0) * std::log(v)) / gap);
    }
  }
  out.partial = acc.value() / static_cast<double>(phi.size());
  const double p = tail_exponent_of(k);
  out.tail_exponent = p;
  if (p <= 1.0) {
    out.tail = MaybeInfinite::inf();
    out.G = MaybeInfinite::inf();
    return out;
  }
  constexpr int kTailPoints = 16;
  double num = 0.0, den = 0.0;
  std::int64_t last = -1;
  for (int i = 0; i < kTailPoints; ++i) {
    const auto n = static_cast<std::int64_t>(std::llround(0.5 * big_n * std::pow(2.0, static_cast<double>(i) / (kTailPoints - 1))));
    if (n == last) continue;
    last = n;
    const double r = mean_power(phi, n);
    const double basis = std::pow(static_cast<double>(n), -p);
    num += r * basis;
    den += basis * basis;
  }
  out.tail_c = num / den;
  out.tail = MaybeInfinite::finite(out.tail_c * std::pow(big_n + 0.5, 1.0 - p) / (p - 1.0));
  out.G = MaybeInfinite::finite(out.partial + out.tail.value);
  return out;
}

// ---------------------------------------------------------------- Monte Carlo

std::int64_t meeting_count(const DifferenceWalk& walk, Rng& rng, std::int64_t horizon) {
  if (horizon <= 0) return 0;
  const JumpSampler& s = walk.sampler();
  const JumpKernel& k = walk.kernel();
  std::int64_t count = 0;
  if (k.dim() == 1) {
    std::int64_t pos = 0;
    for (std::int64_t t = 0; t < horizon; ++t) {
      pos += k.coord(s.sample_index(rng), 0);
      pos -= k.coord(s.sample_index(rng), 0);
      count += pos == 0;
    }
    return count;
  }
  Site pos{0, 0, 0};
  for (std::int64_t t = 0; t < horizon; ++t) {
    const std::size_t a = s.sample_index(rng);
    const std::size_t b = s.sample_index(rng);
    for (int ax = 0; ax < k.dim(); ++ax) pos[ax] += k.coord(a, ax) - k.coord(b, ax);
    count += pos[0] == 0 && pos[1] == 0 && pos[2] == 0;
  }
  return count;
}

std::vector<std::int64_t> meeting_counts(const DifferenceWalk& walk, std::uint64_t seed, std::int64_t horizon,
                                         std::int64_t paths, int workers) {
  require(paths >= 0, "meeting counts: path count must be >= 0");
  walk.sampler();
  std::vector<std::int64_t> out(static_cast<std::size_t>(paths), 0);
  parallel_for(out.size(), workers, [&](std::size_t i) {
    Rng rng = make_rng(seed, i);
    out[i] = meeting_count(walk, rng, horizon);
  });
  return out;
}

std::string to_string(ReturnMethod m) {
  return m == ReturnMethod::green_quadrature ? "green_quadrature" : "monte_carlo";
}

ReturnEstimate return_probability(const DifferenceWalk& walk, ReturnMethod method, const ReturnParams& params) {
  ReturnEstimate est;
  est.method = method;
  const int d = walk.kernel().dim();
  if (method == ReturnMethod::green_quadrature) {
    const auto cf = chung_fuchs_integral(walk, params.grid);
    if (cf.integral.infinite)
      throw UnsupportedCase("return probability: the difference walk is recurrent (fitted exponent " +
                            std::to_string(cf.fit.alpha) + " >= d); pi = 1");
    const double g = cf.integral.value / std::pow(2.0 * kPi, d);
    est.pi = 1.0 - 1.0 / g;
    est.std_error = 0.0;
    est.detail = {{"G", g},
                  {"cf_integral", cf.integral.value},
                  {"points_per_axis", cf.points_per_axis},
                  {"singular_points", cf.singular_points},
                  {"alpha_fit", cf.fit.alpha},
                  {"c_fit", cf.fit.c},
                  {"cutoff", cf.cutoff}};
    return est;
  }
  require(params.samples >= 1 && params.horizon >= 1, "return probability: need samples >= 1 and horizon >= 1");
  const auto counts = meeting_counts(walk, params.seed, params.horizon, params.samples, params.workers);
  const auto hits = std::count_if(counts.begin(), counts.end(), [](std::int64_t c) { return c > 0; });
  const double m = static_cast<double>(params.samples);
  est.pi = static_cast<double>(hits) / m;
  est.std_error = std::sqrt(est.pi * (1.0 - est.pi) / m);
  est.detail = {{"horizon", params.horizon},
                {"samples", params.samples},
                {"seed", params.seed},
                {"caveat", "finite horizon: the estimate undercounts returns after the horizon"}};
  // Expected returns after T under the fitted local model: sum_{n > T} K n^{-d/alpha}.
  try {
    const auto fit = fit_local_exponent(walk, 2.0 * kPi / default_quadrature_points(d), params.grid.fit_directions,
                                        params.grid.seed);
    if (fit.alpha < d - params.grid.divergence_tolerance) {
      const double p = d / fit.alpha;
      const double kconst = sphere_area(d) * std::tgamma(p) / (fit.alpha * std::pow(fit.c, p) * std::pow(2.0 * kPi, d));
      est.detail["tail_bound"] = kconst * std::pow(static_cast<double>(params.horizon) + 0.5, 1.0 - p) / (p - 1.0);
    } else {
      est.detail["tail_bound"] = nullptr;
    }
  } catch (const DiagnosticError&) {
    est.detail["tail_bound"] = nullptr;
  }
  return est;
}

MaybeInfinite exp_moment_Ninfty(double pi, double gamma) {
  require(pi >= 0.0 && pi < 1.0, "exp moment: pi must lie in [0, 1)");
  require(std::isfinite(gamma), "exp moment: gamma must be finite");
  if (pi == 0.0) return MaybeInfinite::finite(1.0);
  if (gamma >= std::log(1.0 / pi)) return MaybeInfinite::inf();
  return MaybeInfinite::finite((1.0 - pi) / (1.0 - pi * std::exp(gamma)));
}

std::string to_string(Transience t) {
  switch (t) {
    case Transience::transient: return "transient";
    case Transience::recurrent: return "recurrent";
    case Transience::borderline: return "borderline";
  }
  return "?";
}

Transience classify_transience(const JumpKernel& kernel) {
  if (!kernel.alpha()) throw InvalidArgument("classify transience: kernel has no alpha");
  const double alpha = *kernel.alpha();
  const int d = kernel.dim();
  if (!check_full_dimension(fitted_limit(kernel)))
    throw InvalidArgument("classify transience: the limit law is degenerate (lower-dimensional)");
  if (std::abs(alpha - d) <= 1e-9) return Transience::borderline;
  if (d >= 3) return Transience::transient;
  if (alpha > d) return Transience::recurrent;
  return Transience::transient;
}

}  // namespace stablepoly

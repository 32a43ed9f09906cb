#include "stablepoly/jump_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "stablepoly/errors.hpp"

namespace stablepoly {
namespace {

constexpr double kSumTol = 1e-12;
constexpr double kSymTol = 1e-12;
constexpr std::size_t kHeadSize = std::size_t{1} << 16;
constexpr std::size_t kMaxShellAtoms = 4096;

// Compensated accumulator; the large kernels hold ~10^7 terms.
struct NeumaierSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

std::int64_t isqrt(std::int64_t v) {
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

std::int64_t squared_norm_at(const JumpKernel& k, std::size_t i) {
  std::int64_t s = 0;
  for (int a = 0; a < k.dim(); ++a) s += k.coord(i, a) * k.coord(i, a);
  return s;
}

// tail[r] = P(|x|_2 >= r) for r = 0 .. max floor norm + 1.
std::vector<double> euclidean_tail(const JumpKernel& k) {
  std::vector<double> bucket;
  for (std::size_t i = 0; i < k.size(); ++i) {
    const auto r = static_cast<std::size_t>(isqrt(squared_norm_at(k, i)));
    if (r >= bucket.size()) bucket.resize(r + 1, 0.0);
    bucket[r] += k.prob(i);
  }
  std::vector<double> tail(bucket.size() + 1, 0.0);
  NeumaierSum acc;
  for (std::size_t r = bucket.size(); r-- > 0;) {
    acc.add(bucket[r]);
    tail[r] = acc.value();
  }
  return tail;
}

bool lex_less(const std::int32_t* a, const std::int32_t* b, int dim) {
  return std::lexicographical_compare(a, a + dim, b, b + dim);
}

}  // namespace

std::shared_ptr<const JumpKernel::Data> JumpKernel::validate_and_pack(Data data) {
  const int d = data.dim;
  require(d >= 1 && d <= kMaxDim, "kernel: dimension must be 1, 2 or 3");
  const std::size_t n = data.probs.size();
  const auto du = static_cast<std::size_t>(d);
  require(data.coords.size() == n * du, "kernel: site/probability size mismatch");
  require(n >= 2, "kernel: support must contain at least two sites");
  NeumaierSum total;
  for (double p : data.probs) {
    require(std::isfinite(p) && p > 0.0, "kernel: probabilities must be positive and finite");
    total.add(p);
  }
  require(std::abs(total.value() - 1.0) <= kSumTol, "kernel: probabilities must sum to 1");
  if (data.alpha) require(*data.alpha > 0.0 && *data.alpha <= 2.0, "kernel: alpha must lie in (0, 2]");
  if (data.trunc_radius) require(*data.trunc_radius >= 1, "kernel: truncation radius must be positive");
  require(data.scale_c > 0.0 && std::isfinite(data.scale_c), "kernel: scale_c must be positive");

  bool sorted = true;
  for (std::size_t i = 1; i < n && sorted; ++i)
    sorted = lex_less(&data.coords[(i - 1) * du], &data.coords[i * du], d);
  if (!sorted) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return lex_less(&data.coords[a * du], &data.coords[b * du], d);
    });
    std::vector<std::int32_t> coords(n * du);
    std::vector<double> probs(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::copy_n(&data.coords[order[i] * du], du, &coords[i * du]);
      probs[i] = data.probs[order[i]];
    }
    for (std::size_t i = 1; i < n; ++i)
      require(lex_less(&coords[(i - 1) * du], &coords[i * du], d), "kernel: repeated site");
    data.coords = std::move(coords);
    data.probs = std::move(probs);
  }

  bool symmetric = true;
  for (std::size_t i = 0, j = n - 1; i <= j && symmetric; ++i, --j) {
    for (std::size_t a = 0; a < du; ++a)
      if (data.coords[i * du + a] != -data.coords[j * du + a]) symmetric = false;
    const double pi = data.probs[i], pj = data.probs[j];
    if (std::abs(pi - pj) > kSymTol * std::max(pi, pj)) symmetric = false;
    if (j == 0) break;
  }
  data.symmetric = symmetric;
  if (data.alpha && *data.alpha < 2.0)
    require(symmetric, "kernel: alpha < 2 requires a symmetric kernel");

  data.bbox.dim = d;
  data.bbox.lo = {0, 0, 0};
  data.bbox.hi = {0, 0, 0};
  data.mean.assign(du, 0.0);
  for (std::size_t a = 0; a < du; ++a) {
    data.bbox.lo[a] = std::numeric_limits<std::int64_t>::max();
    data.bbox.hi[a] = std::numeric_limits<std::int64_t>::min();
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < du; ++a) {
      const std::int64_t c = data.coords[i * du + a];
      data.bbox.lo[a] = std::min(data.bbox.lo[a], c);
      data.bbox.hi[a] = std::max(data.bbox.hi[a], c);
      data.mean[a] += data.probs[i] * static_cast<double>(c);
    }
  if (symmetric) std::fill(data.mean.begin(), data.mean.end(), 0.0);
  return std::make_shared<const Data>(std::move(data));
}

JumpKernel::JumpKernel(int dim, const std::vector<Site>& sites, std::vector<double> probs,
                       std::optional<double> alpha, std::optional<std::int64_t> trunc_radius, double scale_c) {
  require(dim >= 1 && dim <= kMaxDim, "kernel: dimension must be 1, 2 or 3");
  Data data;
  data.dim = dim;
  data.coords.reserve(sites.size() * static_cast<std::size_t>(dim));
  for (const Site& s : sites)
    for (int a = 0; a < kMaxDim; ++a) {
      if (a >= dim) {
        require(s[a] == 0, "kernel: site has coordinates beyond the kernel dimension");
        continue;
      }
      require(s[a] >= std::numeric_limits<std::int32_t>::min() && s[a] <= std::numeric_limits<std::int32_t>::max(),
              "kernel: site coordinate out of range");
      data.coords.push_back(static_cast<std::int32_t>(s[a]));
    }
  data.probs = std::move(probs);
  data.alpha = alpha;
  data.trunc_radius = trunc_radius;
  data.scale_c = scale_c;
  data_ = validate_and_pack(std::move(data));
}

JumpKernel JumpKernel::from_packed(int dim, std::vector<std::int32_t> coords, std::vector<double> probs,
                                   std::optional<double> alpha, std::optional<std::int64_t> trunc_radius,
                                   double scale_c) {
  Data data;
  data.dim = dim;
  data.coords = std::move(coords);
  data.probs = std::move(probs);
  data.alpha = alpha;
  data.trunc_radius = trunc_radius;
  data.scale_c = scale_c;
  return JumpKernel(validate_and_pack(std::move(data)));
}

Site JumpKernel::site(std::size_t i) const {
  Site s{0, 0, 0};
  for (int a = 0; a < dim(); ++a) s[a] = coord(i, a);
  return s;
}

std::size_t JumpKernel::find(const Site& x) const {
  const int d = dim();
  std::array<std::int32_t, kMaxDim> key{};
  for (int a = 0; a < d; ++a) {
    if (x[a] < std::numeric_limits<std::int32_t>::min() || x[a] > std::numeric_limits<std::int32_t>::max())
      return size();
    key[a] = static_cast<std::int32_t>(x[a]);
  }
  for (int a = d; a < kMaxDim; ++a)
    if (x[a] != 0) return size();
  std::size_t lo = 0, hi = size();
  const auto du = static_cast<std::size_t>(d);
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (lex_less(&data_->coords[mid * du], key.data(), d))
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo < size() && std::equal(key.data(), key.data() + d, &data_->coords[lo * du])) return lo;
  return size();
}

double JumpKernel::prob_at(const Site& x) const {
  const std::size_t i = find(x);
  return i < size() ? prob(i) : 0.0;
}

std::int64_t JumpKernel::max_radius() const {
  std::int64_t r = 0;
  for (int a = 0; a < dim(); ++a)
    r = std::max({r, -data_->bbox.lo[a], data_->bbox.hi[a]});
  return r;
}

JumpKernel build_power_law_kernel(int dim, double alpha, std::int64_t radius, std::size_t site_budget) {
  require(dim >= 1 && dim <= kMaxDim, "power-law kernel: dimension must be 1, 2 or 3");
  require(alpha > 0.0 && alpha < 2.0, "power-law kernel: alpha must lie in (0, 2)");
  require(radius >= 2, "power-law kernel: radius must be >= 2");
  require(radius <= std::numeric_limits<std::int32_t>::max() / 2, "power-law kernel: radius out of range");
  const double side = 2.0 * static_cast<double>(radius) + 1.0;
  const double needed = std::pow(side, dim) - 1.0;
  if (needed > static_cast<double>(site_budget))
    throw ResourceError("power-law kernel needs " + std::to_string(static_cast<std::uint64_t>(needed)) +
                        " sites, budget is " + std::to_string(site_budget));
  const auto n = static_cast<std::size_t>(needed);
  const auto du = static_cast<std::size_t>(dim);
  std::vector<std::int32_t> coords;
  std::vector<double> probs;
  coords.reserve(n * du);
  probs.reserve(n);
  const double expo = -0.5 * (dim + alpha);
  const auto r = static_cast<std::int32_t>(radius);
  const std::int32_t r1 = dim >= 2 ? r : 0;
  const std::int32_t r2 = dim >= 3 ? r : 0;
  NeumaierSum total;
  for (std::int32_t x0 = -r; x0 <= r; ++x0)
    for (std::int32_t x1 = -r1; x1 <= r1; ++x1)
      for (std::int32_t x2 = -r2; x2 <= r2; ++x2) {
        const double sq = double(x0) * x0 + double(x1) * x1 + double(x2) * x2;
        if (sq == 0.0) continue;
        const double w = std::pow(sq, expo);
        coords.push_back(x0);
        if (dim >= 2) coords.push_back(x1);
        if (dim >= 3) coords.push_back(x2);
        probs.push_back(w);
        total.add(w);
      }
  const double z = total.value();
  for (double& p : probs) p /= z;
  return JumpKernel::from_packed(dim, std::move(coords), std::move(probs), alpha, radius);
}

JumpKernel build_nn_kernel(int dim) {
  require(dim >= 1 && dim <= kMaxDim, "nearest-neighbour kernel: dimension must be 1, 2 or 3");
  std::vector<Site> sites;
  for (int a = 0; a < dim; ++a) {
    Site s{0, 0, 0};
    s[a] = 1;
    sites.push_back(s);
    sites.push_back(-s);
  }
  std::vector<double> probs(sites.size(), 1.0 / static_cast<double>(sites.size()));
  return JumpKernel(dim, sites, std::move(probs), 2.0, 1);
}

double kernel_entropy(const JumpKernel& kernel) {
  NeumaierSum h;
  for (double p : kernel.probs()) h.add(-p * std::log(p));
  return std::max(0.0, h.value());
}

// ---------------------------------------------------------------- sampler

JumpSampler::AliasTable JumpSampler::AliasTable::build(const std::vector<std::uint32_t>& members,
                                                       std::span<const double> probs) {
  AliasTable t;
  const std::size_t m = members.size();
  if (m == 0) return t;
  t.member = members;
  t.threshold.assign(m, 1.0);
  t.alias.resize(m);
  std::iota(t.alias.begin(), t.alias.end(), std::uint32_t{0});
  NeumaierSum total;
  for (auto i : members) total.add(probs[i]);
  const double scale = static_cast<double>(m) / total.value();
  std::vector<double> w(m);
  std::vector<std::uint32_t> small, large;
  for (std::size_t s = 0; s < m; ++s) {
    w[s] = probs[members[s]] * scale;
    (w[s] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(s));
  }
  // Vose's construction.
  while (!small.empty() && !large.empty()) {
    const auto s = small.back();
    small.pop_back();
    const auto l = large.back();
    t.threshold[s] = w[s];
    t.alias[s] = l;
    w[l] = (w[l] + w[s]) - 1.0;
    if (w[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  return t;
}

std::size_t JumpSampler::AliasTable::draw(std::uint64_t bits) const {
  const auto prod = static_cast<unsigned __int128>(bits) * member.size();
  const auto slot = static_cast<std::size_t>(prod >> 64);
  const double frac = to_open_unit(static_cast<std::uint64_t>(prod));
  return member[frac < threshold[slot] ? slot : alias[slot]];
}

JumpSampler::JumpSampler(const JumpKernel& kernel) : kernel_(kernel) {
  const std::size_t n = kernel.size();
  require(n < std::numeric_limits<std::uint32_t>::max(), "sampler: support too large");
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), std::uint32_t{0});
  const auto probs = kernel.probs();
  if (n <= kHeadSize) {
    head_ = AliasTable::build(order, probs);
    head_mass_ = 1.0;
    return;
  }
  std::nth_element(order.begin(), order.begin() + kHeadSize, order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return probs[a] > probs[b] || (probs[a] == probs[b] && a < b);
  });
  std::vector<std::uint32_t> head(order.begin(), order.begin() + kHeadSize);
  std::vector<std::uint32_t> tail(order.begin() + kHeadSize, order.end());
  std::sort(head.begin(), head.end());
  std::sort(tail.begin(), tail.end());
  NeumaierSum hm, tm;
  for (auto i : head) hm.add(probs[i]);
  for (auto i : tail) tm.add(probs[i]);
  head_mass_ = hm.value() / (hm.value() + tm.value());
  head_ = AliasTable::build(head, probs);
  tail_ = AliasTable::build(tail, probs);
}

std::size_t JumpSampler::sample_index(Rng& rng) const {
  if (tail_.member.empty()) return head_.draw(rng());
  const double u = to_open_unit(rng());
  return u < head_mass_ ? head_.draw(rng()) : tail_.draw(rng());
}

Site sample_jump(const JumpSampler& sampler, Rng& rng) { return sampler(rng); }

// ---------------------------------------------------------------- tails

TailProfile tail_profile(const JumpKernel& kernel) {
  TailProfile out;
  const std::int64_t big_r = kernel.trunc_radius().value_or(kernel.max_radius());
  out.max_radius = big_r;
  const double rr = static_cast<double>(big_r);
  const auto lo = static_cast<std::int64_t>(std::ceil(std::pow(rr, 0.3)));
  const auto hi = std::min(static_cast<std::int64_t>(std::floor(std::pow(rr, 0.9))), (big_r + 1) / 2);
  constexpr int kGrid = 40;
  std::vector<std::int64_t> radii;
  if (hi >= lo) {
    for (int k = 0; k < kGrid; ++k) {
      const double t = kGrid == 1 ? 0.0 : static_cast<double>(k) / (kGrid - 1);
      const auto r = static_cast<std::int64_t>(std::llround(std::exp(std::log(double(lo)) * (1 - t) +
                                                                     std::log(double(hi)) * t)));
      if (radii.empty() || r != radii.back()) radii.push_back(std::clamp(r, lo, hi));
    }
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  }
  if (radii.size() < 5)
    throw DiagnosticError("tail profile: only " + std::to_string(radii.size()) +
                          " radii in the fit window (kernel radius " + std::to_string(big_r) + ")");
  const auto tail = euclidean_tail(kernel);
  auto tail_at = [&](std::int64_t r) {
    return static_cast<std::size_t>(r) < tail.size() ? tail[static_cast<std::size_t>(r)] : 0.0;
  };
  std::vector<double> xs, ys;
  for (auto r : radii) {
    const double shell = tail_at(r) - tail_at(2 * r);
    if (shell <= 0.0) continue;
    xs.push_back(std::log(double(r)));
    ys.push_back(std::log(shell));
  }
  if (xs.size() < 5) throw DiagnosticError("tail profile: fewer than 5 radii carry tail mass");
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / double(xs.size());
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / double(ys.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  out.alpha_hat = -sxy / sxx;
  out.fit_radii = std::move(radii);

  if (kernel.dim() == 1) {
    const auto r0 = std::max<std::int64_t>(1, std::llround(std::sqrt(rr)));
    double right = 0.0, left = 0.0;
    for (std::size_t i = 0; i < kernel.size(); ++i) {
      const auto x = kernel.coord(i, 0);
      if (x >= r0) right += kernel.prob(i);
      if (x <= -r0) left += kernel.prob(i);
    }
    if (right + left > 0.0) {
      out.p_star = right / (right + left);
      out.q_star = 1.0 - out.p_star;
    }
  }
  return out;
}

std::vector<std::pair<std::int64_t, double>> tail_masses(const JumpKernel& kernel) {
  const auto tail = euclidean_tail(kernel);
  std::vector<std::pair<std::int64_t, double>> out;
  const auto last = static_cast<std::int64_t>(tail.size()) - 1;
  std::int64_t r = 1;
  while (r <= last) {
    out.emplace_back(r, tail[static_cast<std::size_t>(r)]);
    r = r < 100 ? r + 1 : std::max(r + 1, static_cast<std::int64_t>(std::floor(double(r) * 1.02)));
  }
  if (out.empty() || out.back().first != last) out.emplace_back(last, tail[static_cast<std::size_t>(last)]);
  return out;
}

std::complex<double> char_fn(const JumpKernel& kernel, std::span<const double> z) {
  require(z.size() == static_cast<std::size_t>(kernel.dim()), "char_fn: dimension mismatch");
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < kernel.size(); ++i) {
    double t = 0.0;
    for (int a = 0; a < kernel.dim(); ++a) t += z[static_cast<std::size_t>(a)] * static_cast<double>(kernel.coord(i, a));
    re += kernel.prob(i) * std::cos(t);
    im += kernel.prob(i) * std::sin(t);
  }
  if (kernel.is_symmetric()) im = 0.0;
  return {re, im};
}

double one_minus_re_char_fn(const JumpKernel& kernel, std::span<const double> z) {
  require(z.size() == static_cast<std::size_t>(kernel.dim()), "char_fn: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < kernel.size(); ++i) {
    double t = 0.0;
    for (int a = 0; a < kernel.dim(); ++a) t += z[static_cast<std::size_t>(a)] * static_cast<double>(kernel.coord(i, a));
    const double s = std::sin(0.5 * t);
    acc += kernel.prob(i) * 2.0 * s * s;
  }
  return acc;
}

// ---------------------------------------------------------------- norming

NormingSequence norming_sequence(const JumpKernel& kernel) {
  if (!kernel.alpha()) throw InvalidArgument("norming: kernel has no alpha");
  return {*kernel.alpha(), kernel.scale_c(), kernel.is_symmetric() ? Centering::zero : Centering::mean};
}

Norming norming(const JumpKernel& kernel, std::int64_t n) {
  require(n >= 1, "norming: n must be >= 1");
  const NormingSequence seq = norming_sequence(kernel);
  Norming out;
  out.a_n = seq.scale_c * std::pow(static_cast<double>(n), 1.0 / seq.alpha);
  out.b_n.assign(static_cast<std::size_t>(kernel.dim()), 0.0);
  if (seq.centering == Centering::mean) {
    const auto mean = kernel.mean();
    const bool drift = std::any_of(mean.begin(), mean.end(), [](double m) { return std::abs(m) > 1e-15; });
    if (seq.alpha <= 1.0 && drift)
      throw UnsupportedCase("norming: centering of an asymmetric kernel with alpha <= 1 is not supported");
    for (std::size_t a = 0; a < out.b_n.size(); ++a) out.b_n[a] = static_cast<double>(n) * mean[a];
  }
  return out;
}

StableExponent fitted_limit(const JumpKernel& kernel) {
  if (!kernel.alpha()) throw InvalidArgument("fitted limit: kernel has no alpha");
  const double alpha = *kernel.alpha();
  const int d = kernel.dim();
  const auto du = static_cast<std::size_t>(d);
  StableExponent e;
  e.alpha = alpha;
  e.tau.assign(du, 0.0);
  if (alpha >= 2.0) {
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
    const auto mean = kernel.mean();
    for (std::size_t i = 0; i < kernel.size(); ++i)
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
          cov(a, b) += kernel.prob(i) * (double(kernel.coord(i, a)) - mean[std::size_t(a)]) *
                       (double(kernel.coord(i, b)) - mean[std::size_t(b)]);
    e.covariance = cov;
    return e;
  }
  // Directions of the outermost shell (distinct by construction), weighted by q.
  const std::int64_t rmax = kernel.max_radius();
  std::vector<std::size_t> shell;
  for (std::size_t i = 0; i < kernel.size(); ++i) {
    std::int64_t s = 0;
    for (int a = 0; a < d; ++a) s = std::max(s, std::abs(kernel.coord(i, a)));
    if (s == rmax) shell.push_back(i);
  }
  if (shell.size() > kMaxShellAtoms) {
    // Keep x and -x together: the shell list is lexicographic, so its reversal pairs them.
    const std::size_t half = kMaxShellAtoms / 2;
    std::vector<std::size_t> kept;
    for (std::size_t k = 0; k < half; ++k) kept.push_back(shell[k * (shell.size() / 2) / half]);
    for (std::size_t k = half; k-- > 0;) kept.push_back(shell[shell.size() - 1 - k * (shell.size() / 2) / half]);
    shell = std::move(kept);
  }
  std::vector<double> dirs, masses;
  for (auto i : shell) {
    const double norm = std::sqrt(static_cast<double>(squared_norm_at(kernel, i)));
    for (int a = 0; a < d; ++a) dirs.push_back(double(kernel.coord(i, a)) / norm);
    masses.push_back(kernel.prob(i));
  }
  // Scale so that Re psi matches -(1 - Re q^) at u = R^{-1/2} along e_1.
  const double u = 1.0 / std::sqrt(static_cast<double>(std::max<std::int64_t>(rmax, 4)));
  std::vector<double> z(du, 0.0);
  z[0] = u;
  const double target = one_minus_re_char_fn(kernel, z) / std::pow(u, alpha) / std::pow(kernel.scale_c(), alpha);
  double unit = 0.0;
  for (std::size_t k = 0; k < masses.size(); ++k) unit += masses[k] * std::pow(std::abs(dirs[k * du]), alpha);
  if (unit <= 0.0) throw DiagnosticError("fitted limit: outer shell has no mass along the first axis");
  for (double& m : masses) m *= target / unit;
  e.spherical = SphericalMeasure(d, std::move(dirs), std::move(masses));
  return e;
}

// ---------------------------------------------------------------- json

nlohmann::json to_json(const JumpKernel& kernel) {
  nlohmann::json j;
  j["dim"] = kernel.dim();
  j["alpha"] = kernel.alpha() ? nlohmann::json(*kernel.alpha()) : nlohmann::json(nullptr);
  j["R"] = kernel.trunc_radius() ? nlohmann::json(*kernel.trunc_radius()) : nlohmann::json(nullptr);
  j["scale_c"] = kernel.scale_c();
  j["weight_norm"] = "l2";
  j["cutoff_norm"] = "linf";
  auto& support = j["support"] = nlohmann::json::array();
  for (std::size_t i = 0; i < kernel.size(); ++i) {
    std::vector<std::int64_t> x;
    for (int a = 0; a < kernel.dim(); ++a) x.push_back(kernel.coord(i, a));
    support.push_back({{"x", x}, {"p", kernel.prob(i)}});
  }
  return j;
}

JumpKernel kernel_from_json(const nlohmann::json& j) {
  try {
    const int d = j.at("dim").get<int>();
    std::optional<double> alpha;
    std::optional<std::int64_t> radius;
    if (j.contains("alpha") && !j["alpha"].is_null()) alpha = j["alpha"].get<double>();
    if (j.contains("R") && !j["R"].is_null()) radius = j["R"].get<std::int64_t>();
    const double scale_c = j.value("scale_c", 1.0);
    std::vector<Site> sites;
    std::vector<double> probs;
    for (const auto& e : j.at("support")) {
      const auto x = e.at("x").get<std::vector<std::int64_t>>();
      require(x.size() == static_cast<std::size_t>(d), "kernel json: site dimension mismatch");
      Site s{0, 0, 0};
      std::copy(x.begin(), x.end(), s.begin());
      sites.push_back(s);
      probs.push_back(e.at("p").get<double>());
    }
    return JumpKernel(d, sites, std::move(probs), alpha, radius, scale_c);
  } catch (const nlohmann::json::exception& ex) {
    throw InvalidArgument(std::string("kernel json: ") + ex.what());
  }
}

}  // namespace stablepoly

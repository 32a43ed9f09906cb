#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "stablepoly/jump_kernels.hpp"
#include "stablepoly/random.hpp"

namespace stablepoly {

/// A value that may be +infinity, kept as an explicit flag.
struct MaybeInfinite {
  bool infinite = false;
  double value = 0.0;
  static MaybeInfinite inf() { return {true, 0.0}; }
  static MaybeInfinite finite(double v) { return {false, v}; }
};

/// omega - omega~ for two independent walks with jump law q.
class DifferenceWalk {
 public:
  explicit DifferenceWalk(JumpKernel kernel);

  const JumpKernel& kernel() const { return kernel_; }
  /// Law of a single step of the difference walk (autocorrelation of q).
  /// Built on first use; ResourceError when |supp q|^2 exceeds `budget`.
  const JumpKernel& diff_support(std::size_t budget = 100'000'000) const;
  const JumpSampler& sampler() const;

 private:
  struct Cache;
  JumpKernel kernel_;
  std::shared_ptr<Cache> cache_;
};

/// |q^(z)|^2.
double difference_char_fn(const DifferenceWalk& walk, std::span<const double> z);
/// 1 - |q^(z)|^2 with the 1 - Re q^ factor summed without cancellation.
double one_minus_difference_char_fn(const DifferenceWalk& walk, std::span<const double> z);

using Point = std::array<double, 3>;

/// Points of [-pi, pi)^d where the difference characteristic function equals 1:
/// 2 pi times the dual of the lattice generated by the support differences.
std::vector<Point> periodic_points(const JumpKernel& kernel);

struct QuadratureSpec {
  int points_per_axis = 0;  // 0 selects the per-dimension default
  int fit_directions = 8;
  std::uint64_t seed = 1;
  /// Exponent fits at or above d - tolerance are reported as divergent.
  double divergence_tolerance = 0.05;
};

int default_quadrature_points(int dim);

/// 1 - phi(z) ~ c |z|^alpha near every point where phi = 1.
struct LocalFit {
  double alpha = 0.0;
  double c = 0.0;
  double h = 0.0;
  std::vector<double> residuals;
};

/// Regression of ln(1 - phi) on ln|z| over |z| in [h, 16 h] along random directions.
LocalFit fit_local_exponent(const DifferenceWalk& walk, double h, int directions, std::uint64_t seed);

struct ChungFuchsResult {
  MaybeInfinite integral;
  LocalFit fit;
  int points_per_axis = 0;
  std::size_t singular_points = 1;
  double cutoff = 0.0;
  double model_part = 0.0;
  double grid_part = 0.0;
};

/// Integral of 1 / (1 - phi) over [-pi, pi)^d: midpoint grid for the
/// remainder after subtracting a fitted c |z - h|^-alpha model around each
/// singular point h, whose integral is done radially.
ChungFuchsResult chung_fuchs_integral(const DifferenceWalk& walk, const QuadratureSpec& grid = {});

/// G = (2 pi)^-d times the Chung-Fuchs integral; UnsupportedCase when infinite.
double green_function(const DifferenceWalk& walk, const QuadratureSpec& grid = {});

struct SeriesSpec {
  std::int64_t torus = 0;  // 0 selects the per-dimension default
  std::int64_t terms = 0;  // 0 selects the per-dimension default
};

struct SeriesGreen {
  MaybeInfinite G;
  double partial = 0.0;  // sum_{n <= N} r_n
  MaybeInfinite tail;
  double tail_c = 0.0;
  double tail_exponent = 0.0;
  std::int64_t torus = 0;
  std::int64_t terms = 0;
};

/// Sum of r_n = P(S_n = 0) computed on a periodic box of side L (exact
/// convolution powers of the folded kernel) up to N, plus a fitted
/// c n^{-d/alpha} tail.
SeriesGreen green_series(const DifferenceWalk& walk, const SeriesSpec& spec = {});

/// r_n on the periodic box for the requested n.
std::vector<double> torus_return_probabilities(const DifferenceWalk& walk, std::int64_t torus,
                                               const std::vector<std::int64_t>& ns);

enum class ReturnMethod { green_quadrature, monte_carlo };
std::string to_string(ReturnMethod m);

struct ReturnEstimate {
  double pi = 1.0;
  ReturnMethod method = ReturnMethod::green_quadrature;
  double std_error = 0.0;
  nlohmann::json detail;
};

struct ReturnParams {
  QuadratureSpec grid;
  std::int64_t horizon = 10'000;
  std::int64_t samples = 100'000;
  std::uint64_t seed = 1;
  int workers = 0;
};

ReturnEstimate return_probability(const DifferenceWalk& walk, ReturnMethod method, const ReturnParams& params = {});

/// #{1 <= t <= horizon : S_t = 0} along one simulated path.
std::int64_t meeting_count(const DifferenceWalk& walk, Rng& rng, std::int64_t horizon);

/// Meeting counts of `paths` independent paths; path i uses stream i of `seed`.
std::vector<std::int64_t> meeting_counts(const DifferenceWalk& walk, std::uint64_t seed, std::int64_t horizon,
                                         std::int64_t paths, int workers = 0);

/// E exp(gamma N_inf) for N_inf geometric with parameter pi.
MaybeInfinite exp_moment_Ninfty(double pi, double gamma);

enum class Transience { transient, recurrent, borderline };
std::string to_string(Transience t);
Transience classify_transience(const JumpKernel& kernel);

}  // namespace stablepoly

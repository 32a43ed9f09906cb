#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "stablepoly/lattice.hpp"
#include "stablepoly/random.hpp"
#include "stablepoly/stable_laws.hpp"

namespace stablepoly {

/// Default cap on the number of support sites a builder may allocate.
inline constexpr std::size_t kDefaultKernelSiteBudget = 30'000'000;

/// Finite-support probability mass function q on Z^d (d <= 3).
///
/// Immutable; copies share the underlying storage. Sites are kept in
/// lexicographic order, which makes x -> -x the reversal of the order for a
/// symmetric support.
class JumpKernel {
 public:
  JumpKernel(int dim, const std::vector<Site>& sites, std::vector<double> probs,
             std::optional<double> alpha = std::nullopt, std::optional<std::int64_t> trunc_radius = std::nullopt,
             double scale_c = 1.0);

  /// Packed constructor: `coords` is dim-strided int32 storage.
  static JumpKernel from_packed(int dim, std::vector<std::int32_t> coords, std::vector<double> probs,
                                std::optional<double> alpha, std::optional<std::int64_t> trunc_radius,
                                double scale_c = 1.0);

  int dim() const { return data_->dim; }
  std::size_t size() const { return data_->probs.size(); }
  Site site(std::size_t i) const;
  std::int64_t coord(std::size_t i, int axis) const {
    return data_->coords[i * static_cast<std::size_t>(data_->dim) + static_cast<std::size_t>(axis)];
  }
  double prob(std::size_t i) const { return data_->probs[i]; }
  std::span<const double> probs() const { return data_->probs; }
  /// Index of `x` in the support, or size() when absent.
  std::size_t find(const Site& x) const;
  double prob_at(const Site& x) const;

  std::optional<double> alpha() const { return data_->alpha; }
  std::optional<std::int64_t> trunc_radius() const { return data_->trunc_radius; }
  double scale_c() const { return data_->scale_c; }
  bool is_symmetric() const { return data_->symmetric; }
  /// Smallest box containing the support.
  const Box& bounding_box() const { return data_->bbox; }
  std::span<const double> mean() const { return data_->mean; }
  /// Largest sup-norm over the support.
  std::int64_t max_radius() const;

 private:
  struct Data {
    int dim = 1;
    std::vector<std::int32_t> coords;
    std::vector<double> probs;
    std::optional<double> alpha;
    std::optional<std::int64_t> trunc_radius;
    double scale_c = 1.0;
    bool symmetric = false;
    Box bbox;
    std::vector<double> mean;
  };
  explicit JumpKernel(std::shared_ptr<const Data> data) : data_(std::move(data)) {}
  static std::shared_ptr<const Data> validate_and_pack(Data data);

  std::shared_ptr<const Data> data_;
};

/// Tail exponent fit and (d = 1) asymmetry fractions.
struct TailProfile {
  double alpha_hat = 0.0;
  double p_star = 0.5;
  double q_star = 0.5;
  std::int64_t max_radius = 0;
  std::vector<std::int64_t> fit_radii;
};

enum class Centering { zero, mean };

/// a_n = scale_c * n^{1/alpha}; centering is "zero" for symmetric kernels.
struct NormingSequence {
  double alpha = 2.0;
  double scale_c = 1.0;
  Centering centering = Centering::zero;
};

struct Norming {
  double a_n = 1.0;
  std::vector<double> b_n;
};

/// Symmetric power law on {1 <= |x|_inf <= R}, q(x) proportional to |x|_2^{-d-alpha}.
JumpKernel build_power_law_kernel(int dim, double alpha, std::int64_t radius,
                                  std::size_t site_budget = kDefaultKernelSiteBudget);
/// Uniform on the 2d unit vectors.
JumpKernel build_nn_kernel(int dim);

double kernel_entropy(const JumpKernel& kernel);

/// O(1) sampler over the support: alias tables for the heaviest sites and for
/// the remainder, so that most draws touch a small cache-resident table.
class JumpSampler {
 public:
  explicit JumpSampler(const JumpKernel& kernel);
  std::size_t sample_index(Rng& rng) const;
  Site operator()(Rng& rng) const { return kernel_.site(sample_index(rng)); }
  const JumpKernel& kernel() const { return kernel_; }

 private:
  struct AliasTable {
    std::vector<double> threshold;
    std::vector<std::uint32_t> alias;
    std::vector<std::uint32_t> member;  // table slot -> kernel index
    std::size_t draw(std::uint64_t bits) const;
    static AliasTable build(const std::vector<std::uint32_t>& members, std::span<const double> probs);
  };
  JumpKernel kernel_;
  double head_mass_ = 1.0;
  AliasTable head_;
  AliasTable tail_;
};

Site sample_jump(const JumpSampler& sampler, Rng& rng);

/// Tail exponent from dyadic shell masses P(r <= |x|_2 < 2r) over
/// r in [R^0.3, min(R^0.9, (R+1)/2)], plus right/left tail fractions at
/// r = round(R^0.5) in d = 1. Throws DiagnosticError with fewer than 5 radii.
TailProfile tail_profile(const JumpKernel& kernel);

/// P(|x|_2 >= r) at integer radii r >= 1 (all radii up to 100, log-spaced beyond).
std::vector<std::pair<std::int64_t, double>> tail_masses(const JumpKernel& kernel);

std::complex<double> char_fn(const JumpKernel& kernel, std::span<const double> z);
/// 1 - Re q^(z), summed as 2 q(x) sin^2(z.x / 2) so it stays accurate near z = 0.
double one_minus_re_char_fn(const JumpKernel& kernel, std::span<const double> z);

NormingSequence norming_sequence(const JumpKernel& kernel);
Norming norming(const JumpKernel& kernel, std::int64_t n);

/// Limit law attached to the kernel: covariance for alpha = 2, otherwise an
/// atomic spherical part on the directions of the outermost support shell
/// scaled to match n (1 - Re q^(z / a_n)) at a reference point.
StableExponent fitted_limit(const JumpKernel& kernel);

nlohmann::json to_json(const JumpKernel& kernel);
JumpKernel kernel_from_json(const nlohmann::json& j);

}  // namespace stablepoly

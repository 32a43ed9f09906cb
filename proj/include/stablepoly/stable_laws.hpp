#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace stablepoly {

/// Finite atomic measure on the unit sphere S^{d-1}.
///
/// Directions are unit vectors (within 1e-12), pairwise distinct, with
/// nonnegative masses of positive total.
class SphericalMeasure {
 public:
  /// `directions` is dim-strided: atom i occupies [i*dim, (i+1)*dim).
  SphericalMeasure(int dim, std::vector<double> directions, std::vector<double> masses);

  int dim() const { return dim_; }
  std::size_t size() const { return masses_.size(); }
  std::span<const double> direction(std::size_t i) const {
    return {directions_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  double mass(std::size_t i) const { return masses_[i]; }
  double total_mass() const;

  /// Mass of the atom at `direction`, zero when there is none.
  double mass_at(std::span<const double> direction) const;

 private:
  int dim_;
  std::vector<double> directions_;
  std::vector<double> masses_;
};

/// Parameters of an alpha-stable limit law: exponent alpha, translate tau and
/// either the spherical part (alpha < 2) or the covariance (alpha = 2).
struct StableExponent {
  double alpha = 2.0;
  std::vector<double> tau;
  std::optional<SphericalMeasure> spherical;
  std::optional<Eigen::MatrixXd> covariance;

  int dim() const { return static_cast<int>(tau.size()); }
  /// Throws InvalidArgument when the invariants do not hold.
  void validate() const;
};

/// Characteristic exponent psi(z), so that E exp(i z.S) = exp(psi(z)).
std::complex<double> eval_exponent(const StableExponent& exponent, std::span<const double> z);

/// sigma'(B) = sigma(B) + sigma(-B).
SphericalMeasure symmetrize(const SphericalMeasure& measure);

/// True when the limit law is not supported on a proper subspace.
bool check_full_dimension(const StableExponent& exponent);

nlohmann::json to_json(const StableExponent& exponent);
StableExponent stable_exponent_from_json(const nlohmann::json& j);

}  // namespace stablepoly

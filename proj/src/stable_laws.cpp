#include "stablepoly/stable_laws.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "stablepoly/errors.hpp"

namespace stablepoly {
namespace {

constexpr double kUnitTol = 1e-12;
constexpr double kDistinctTol = 1e-12;
constexpr double kRankTol = 1e-10;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

bool close(std::span<const double> a, std::span<const double> b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > kDistinctTol) return false;
  return true;
}

// Atom order used for distinctness checks and merging.
std::vector<std::size_t> lexicographic_order(int dim, const std::vector<double>& dirs, std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto d = static_cast<std::size_t>(dim);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(dirs.begin() + a * d, dirs.begin() + (a + 1) * d,
                                        dirs.begin() + b * d, dirs.begin() + (b + 1) * d);
  });
  return order;
}

}  // namespace

SphericalMeasure::SphericalMeasure(int dim, std::vector<double> directions, std::vector<double> masses)
    : dim_(dim), directions_(std::move(directions)), masses_(std::move(masses)) {
  require(dim >= 1, "spherical measure: dimension must be >= 1");
  const auto d = static_cast<std::size_t>(dim);
  require(directions_.size() == masses_.size() * d, "spherical measure: direction/mass size mismatch");
  require(!masses_.empty(), "spherical measure: no atoms");
  for (std::size_t i = 0; i < masses_.size(); ++i) {
    require(std::isfinite(masses_[i]) && masses_[i] >= 0.0, "spherical measure: negative or non-finite mass");
    const auto dir = direction(i);
    require(std::abs(std::sqrt(dot(dir, dir)) - 1.0) <= kUnitTol, "spherical measure: direction is not a unit vector");
  }
  require(total_mass() > 0.0, "spherical measure: total mass must be positive");
  const auto order = lexicographic_order(dim_, directions_, masses_.size());
  for (std::size_t k = 1; k < order.size(); ++k)
    require(!close(direction(order[k - 1]), direction(order[k])), "spherical measure: repeated direction");
}

double SphericalMeasure::total_mass() const {
  return std::accumulate(masses_.begin(), masses_.end(), 0.0);
}

double SphericalMeasure::mass_at(std::span<const double> dir) const {
  for (std::size_t i = 0; i < size(); ++i)
    if (close(direction(i), dir)) return masses_[i];
  return 0.0;
}

void StableExponent::validate() const {
  require(alpha > 0.0 && alpha <= 2.0, "stable exponent: alpha must lie in (0, 2]");
  const int d = dim();
  require(d >= 1, "stable exponent: tau must be nonempty");
  for (double t : tau) require(std::isfinite(t), "stable exponent: tau must be finite");
  if (alpha < 2.0) {
    require(spherical.has_value() && !covariance.has_value(),
            "stable exponent: alpha < 2 needs a spherical measure and no covariance");
    require(spherical->dim() == d, "stable exponent: spherical measure dimension mismatch");
  } else {
    require(covariance.has_value() && !spherical.has_value(),
            "stable exponent: alpha = 2 needs a covariance and no spherical measure");
    const auto& a = *covariance;
    require(a.rows() == d && a.cols() == d, "stable exponent: covariance must be d x d");
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    require((a - a.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale, "stable exponent: covariance not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
    require(eig.eigenvalues().minCoeff() >= -1e-12 * scale, "stable exponent: covariance not positive semidefinite");
  }
}

std::complex<double> eval_exponent(const StableExponent& exponent, std::span<const double> z) {
  exponent.validate();
  require(z.size() == exponent.tau.size(), "eval_exponent: dimension mismatch");
  for (double v : z) require(std::isfinite(v), "eval_exponent: z must be finite");

  using namespace std::complex_literals;
  const std::complex<double> drift = 1i * dot(exponent.tau, z);
  if (exponent.alpha == 2.0) {
    Eigen::Map<const Eigen::VectorXd> zv(z.data(), static_cast<Eigen::Index>(z.size()));
    return drift - 0.5 * zv.dot(*exponent.covariance * zv);
  }

  const auto& sigma = *exponent.spherical;
  const double alpha = exponent.alpha;
  std::complex<double> integral = 0.0;
  if (alpha == 1.0) {
    for (std::size_t i = 0; i < sigma.size(); ++i) {
      const double u = dot(z, sigma.direction(i));
      // u ln|u| -> 0 as u -> 0.
      const double log_term = u == 0.0 ? 0.0 : u * std::log(std::abs(u));
      integral += sigma.mass(i) * (std::abs(u) + 1i * (2.0 / std::numbers::pi) * log_term);
    }
  } else {
    const double skew = std::tan(std::numbers::pi * alpha / 2.0);
    for (std::size_t i = 0; i < sigma.size(); ++i) {
      const double u = dot(z, sigma.direction(i));
      const double sgn = (u > 0.0) - (u < 0.0);
      integral += sigma.mass(i) * std::pow(std::abs(u), alpha) * (1.0 - 1i * skew * sgn);
    }
  }
  return drift - integral;
}

SphericalMeasure symmetrize(const SphericalMeasure& measure) {
  const int dim = measure.dim();
  const auto d = static_cast<std::size_t>(dim);
  const std::size_t n = measure.size();
  std::vector<double> dirs;
  std::vector<double> masses;
  dirs.reserve(2 * n * d);
  masses.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto dir = measure.direction(i);
    dirs.insert(dirs.end(), dir.begin(), dir.end());
    masses.push_back(measure.mass(i));
    for (double v : dir) dirs.push_back(v == 0.0 ? 0.0 : -v);
    masses.push_back(measure.mass(i));
  }
  const auto order = lexicographic_order(dim, dirs, masses.size());
  std::vector<double> out_dirs;
  std::vector<double> out_masses;
  for (std::size_t idx : order) {
    std::span<const double> dir{dirs.data() + idx * d, d};
    if (!out_masses.empty() && close(std::span<const double>{out_dirs.data() + out_dirs.size() - d, d}, dir)) {
      out_masses.back() += masses[idx];
    } else {
      out_dirs.insert(out_dirs.end(), dir.begin(), dir.end());
      out_masses.push_back(masses[idx]);
    }
  }
  return SphericalMeasure(dim, std::move(out_dirs), std::move(out_masses));
}

bool check_full_dimension(const StableExponent& exponent) {
  exponent.validate();
  const int d = exponent.dim();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(d, d);
  if (exponent.alpha < 2.0) {
    const auto& sigma = *exponent.spherical;
    for (std::size_t i = 0; i < sigma.size(); ++i) {
      if (sigma.mass(i) <= 0.0) continue;  // zero-mass atoms are not in the support
      const auto dir = sigma.direction(i);
      Eigen::Map<const Eigen::VectorXd> v(dir.data(), d);
      gram += v * v.transpose();
    }
  } else {
    gram = *exponent.covariance * exponent.covariance->transpose();
  }
  // Singular values of the spanning set are square roots of the Gram eigenvalues.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const Eigen::VectorXd sv = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const double top = sv.maxCoeff();
  if (top <= 0.0) return false;
  return (sv.array() > kRankTol * top).count() == d;
}

nlohmann::json to_json(const StableExponent& exponent) {
  nlohmann::json j;
  j["alpha"] = exponent.alpha;
  j["tau"] = exponent.tau;
  if (exponent.spherical) {
    auto atoms = nlohmann::json::array();
    for (std::size_t i = 0; i < exponent.spherical->size(); ++i) {
      const auto dir = exponent.spherical->direction(i);
      atoms.push_back({{"dir", std::vector<double>(dir.begin(), dir.end())}, {"mass", exponent.spherical->mass(i)}});
    }
    j["spherical"] = atoms;
  } else {
    j["spherical"] = nullptr;
  }
  if (exponent.covariance) {
    auto rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < exponent.covariance->rows(); ++r) {
      std::vector<double> row(static_cast<std::size_t>(exponent.covariance->cols()));
      for (Eigen::Index c = 0; c < exponent.covariance->cols(); ++c) row[static_cast<std::size_t>(c)] = (*exponent.covariance)(r, c);
      rows.push_back(row);
    }
    j["covariance"] = rows;
  } else {
    j["covariance"] = nullptr;
  }
  return j;
}

StableExponent stable_exponent_from_json(const nlohmann::json& j) {
  try {
    StableExponent e;
    e.alpha = j.at("alpha").get<double>();
    e.tau = j.at("tau").get<std::vector<double>>();
    const int d = static_cast<int>(e.tau.size());
    if (j.contains("spherical") && !j.at("spherical").is_null()) {
      std::vector<double> dirs;
      std::vector<double> masses;
      for (const auto& atom : j.at("spherical")) {
        const auto dir = atom.at("dir").get<std::vector<double>>();
        require(static_cast<int>(dir.size()) == d, "stable exponent JSON: direction dimension mismatch");
        dirs.insert(dirs.end(), dir.begin(), dir.end());
        masses.push_back(atom.at("mass").get<double>());
      }
      e.spherical.emplace(d, std::move(dirs), std::move(masses));
    }
    if (j.contains("covariance") && !j.at("covariance").is_null()) {
      const auto rows = j.at("covariance").get<std::vector<std::vector<double>>>();
      Eigen::MatrixXd a(static_cast<Eigen::Index>(rows.size()), d);
      for (std::size_t r = 0; r < rows.size(); ++r) {
        require(static_cast<int>(rows[r].size()) == d, "stable exponent JSON: covariance row length mismatch");
        for (int c = 0; c < d; ++c) a(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
      }
      e.covariance = std::move(a);
    }
    e.validate();
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw InvalidArgument(std::string("stable exponent JSON: ") + ex.what());
  }
}

}  // namespace stablepoly

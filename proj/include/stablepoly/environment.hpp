#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "stablepoly/lattice.hpp"
#include "stablepoly/random.hpp"

namespace stablepoly {

enum class EnvKind { gaussian, bernoulli, table };

/// Law of the i.i.d. site disorder eta(n, x).
class EnvironmentModel {
 public:
  static EnvironmentModel gaussian(double mean, double sd);
  static EnvironmentModel bernoulli(double rho);
  static EnvironmentModel table(std::vector<double> values, std::vector<double> probs);

  EnvKind kind() const { return kind_; }
  double mean_param() const { return mean_; }
  double sd() const { return sd_; }
  double rho() const { return rho_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& probs() const { return probs_; }

  /// Draw from the law given a uniform u in (0, 1).
  double quantile(double u) const;
  std::string describe() const;

 private:
  EnvKind kind_ = EnvKind::gaussian;
  double mean_ = 0.0;
  double sd_ = 1.0;
  double rho_ = 0.5;
  std::vector<double> values_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
};

double lambda(const EnvironmentModel& env, double beta);
double lambda_prime(const EnvironmentModel& env, double beta);
/// lambda(2 beta) - 2 lambda(beta).
double gamma1(const EnvironmentModel& env, double beta);

/// Standard normal quantile (Wichura, AS 241), relative accuracy ~1e-16.
double normal_quantile(double p);

/// eta(n, x) as a pure function of (seed, n, x).
inline double field_value(const EnvironmentModel& env, std::uint64_t seed, std::int64_t n, const Site& x) {
  return env.quantile(to_open_unit(counter_hash(seed, n, x)));
}
/// Same value, with the (seed, n) part of the hash precomputed.
inline double field_value_at(const EnvironmentModel& env, std::uint64_t prefix, const Site& x) {
  return env.quantile(to_open_unit(counter_hash_at(prefix, x)));
}

inline constexpr std::size_t kDefaultFieldBudget = std::size_t{1} << 27;

/// Dense block of disorder values over [t0, t1) x window.
struct FieldSlab {
  std::int64_t t0 = 0;
  std::int64_t t1 = 0;
  Box window;
  std::vector<double> values;  // time-major, then window order
  std::uint64_t base_seed = 0;
  std::string slab_id;

  double at(std::int64_t n, const Site& x) const {
    return values[static_cast<std::size_t>(n - t0) * window.volume() + window.index(x)];
  }
};

FieldSlab sample_field(const EnvironmentModel& env, std::uint64_t base_seed, std::int64_t t0, std::int64_t t1,
                       const Box& window, std::size_t budget = kDefaultFieldBudget);

nlohmann::json to_json(const EnvironmentModel& env);
EnvironmentModel environment_from_json(const nlohmann::json& j);

}  // namespace stablepoly

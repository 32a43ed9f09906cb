#include "stablepoly/environment.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "stablepoly/errors.hpp"

namespace stablepoly {

EnvironmentModel EnvironmentModel::gaussian(double mean, double sd) {
  require(std::isfinite(mean), "gaussian environment: mean must be finite");
  require(std::isfinite(sd) && sd > 0.0, "gaussian environment: sd must be positive");
  EnvironmentModel e;
  e.kind_ = EnvKind::gaussian;
  e.mean_ = mean;
  e.sd_ = sd;
  return e;
}

EnvironmentModel EnvironmentModel::bernoulli(double rho) {
  require(rho > 0.0 && rho < 1.0, "bernoulli environment: rho must lie in (0, 1)");
  EnvironmentModel e;
  e.kind_ = EnvKind::bernoulli;
  e.rho_ = rho;
  return e;
}

EnvironmentModel EnvironmentModel::table(std::vector<double> values, std::vector<double> probs) {
  require(values.size() == probs.size(), "table environment: values/probs size mismatch");
  double total = 0.0;
  std::set<double> distinct;
  for (std::size_t i = 0; i < values.size(); ++i) {
    require(std::isfinite(values[i]), "table environment: values must be finite");
    require(std::isfinite(probs[i]) && probs[i] > 0.0, "table environment: probs must be positive");
    total += probs[i];
    distinct.insert(values[i]);
  }
  require(std::abs(total - 1.0) <= 1e-12, "table environment: probs must sum to 1");
  require(distinct.size() >= 2, "table environment: need at least two distinct values");
  EnvironmentModel e;
  e.kind_ = EnvKind::table;
  e.values_ = std::move(values);
  e.probs_ = std::move(probs);
  double c = 0.0;
  for (double p : e.probs_) e.cumulative_.push_back(c += p);
  return e;
}

double EnvironmentModel::quantile(double u) const {
  switch (kind_) {
    case EnvKind::gaussian:
      return mean_ + sd_ * normal_quantile(u);
    case EnvKind::bernoulli:
      return u < rho_ ? 1.0 : 0.0;
    case EnvKind::table: {
      const double scaled = u * cumulative_.back();
      auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), scaled);
      if (it == cumulative_.end()) --it;
      return values_[static_cast<std::size_t>(it - cumulative_.begin())];
    }
  }
  return 0.0;
}

std::string EnvironmentModel::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case EnvKind::gaussian: os << "gaussian(" << mean_ << "," << sd_ << ")"; break;
    case EnvKind::bernoulli: os << "bernoulli(" << rho_ << ")"; break;
    case EnvKind::table: os << "table(" << values_.size() << " values)"; break;
  }
  return os.str();
}

namespace {

// ln sum p_i e^{beta v_i} and the tilted mean, shifted by the largest exponent.
std::pair<double, double> table_cgf(const std::vector<double>& v, const std::vector<double>& p, double beta) {
  double m = -INFINITY;
  for (double x : v) m = std::max(m, beta * x);
  double s = 0.0, sv = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double w = p[i] * std::exp(beta * v[i] - m);
    s += w;
    sv += w * v[i];
  }
  return {m + std::log(s), sv / s};
}

}  // namespace

double lambda(const EnvironmentModel& env, double beta) {
  switch (env.kind()) {
    case EnvKind::gaussian:
      return env.mean_param() * beta + 0.5 * env.sd() * env.sd() * beta * beta;
    case EnvKind::bernoulli: {
      const double r = env.rho();
      // ln(r e^b + 1 - r), arranged to avoid overflow and cancellation.
      if (beta > 0.0) return beta + std::log(r + (1.0 - r) * std::exp(-beta));
      return std::log1p(r * std::expm1(beta));
    }
    case EnvKind::table:
      return table_cgf(env.values(), env.probs(), beta).first;
  }
  return 0.0;
}

double lambda_prime(const EnvironmentModel& env, double beta) {
  switch (env.kind()) {
    case EnvKind::gaussian:
      return env.mean_param() + env.sd() * env.sd() * beta;
    case EnvKind::bernoulli: {
      const double r = env.rho();
      if (beta > 0.0) return r / (r + (1.0 - r) * std::exp(-beta));
      const double e = std::exp(beta);
      return r * e / (r * e + 1.0 - r);
    }
    case EnvKind::table:
      return table_cgf(env.values(), env.probs(), beta).second;
  }
  return 0.0;
}

double gamma1(const EnvironmentModel& env, double beta) {
  if (env.kind() == EnvKind::gaussian) return env.sd() * env.sd() * beta * beta;
  return std::max(0.0, lambda(env, 2.0 * beta) - 2.0 * lambda(env, beta));
}

double normal_quantile(double p) {
  require(p > 0.0 && p < 1.0, "normal quantile: p must lie in (0, 1)");
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2509.0809287301226727 * r + 33430.575583588128105) * r + 67265.770927008700853) * r +
                45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((5226.495278852545925 * r + 28729.085735721942674) * r + 39307.89580009271061) * r +
                21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
               1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
            4.6303378461565452959) * r + 1.42343711074968357734) /
          (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
               0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
            2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
               0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
            5.4637849111641143699) * r + 6.6579046435011037772) /
          (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
               7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
            0.59983220655588793769) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

FieldSlab sample_field(const EnvironmentModel& env, std::uint64_t base_seed, std::int64_t t0, std::int64_t t1,
                       const Box& window, std::size_t budget) {
  require(t1 > t0, "sample_field: empty time range");
  require(!window.empty(), "sample_field: empty window");
  const double cells = static_cast<double>(t1 - t0) * static_cast<double>(window.volume());
  if (cells > static_cast<double>(budget))
    throw ResourceError("sample_field: slab needs " + std::to_string(static_cast<std::uint64_t>(cells)) +
                        " values, budget is " + std::to_string(budget));
  FieldSlab slab;
  slab.t0 = t0;
  slab.t1 = t1;
  slab.window = window;
  slab.base_seed = base_seed;
  slab.slab_id = "t[" + std::to_string(t0) + "," + std::to_string(t1) + ")x" + to_string(window.lo, window.dim) +
                 ".." + to_string(window.hi, window.dim);
  const std::size_t vol = window.volume();
  slab.values.resize(static_cast<std::size_t>(t1 - t0) * vol);
  for (std::int64_t n = t0; n < t1; ++n)
    for (std::size_t i = 0; i < vol; ++i)
      slab.values[static_cast<std::size_t>(n - t0) * vol + i] = field_value(env, base_seed, n, window.site(i));
  return slab;
}

nlohmann::json to_json(const EnvironmentModel& env) {
  switch (env.kind()) {
    case EnvKind::gaussian:
      return {{"kind", "gaussian"}, {"mean", env.mean_param()}, {"sd", env.sd()}};
    case EnvKind::bernoulli:
      return {{"kind", "bernoulli"}, {"rho", env.rho()}};
    case EnvKind::table:
      return {{"kind", "table"}, {"values", env.values()}, {"probs", env.probs()}};
  }
  return {};
}

EnvironmentModel environment_from_json(const nlohmann::json& j) {
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "gaussian") return EnvironmentModel::gaussian(j.value("mean", 0.0), j.value("sd", 1.0));
    if (kind == "bernoulli") return EnvironmentModel::bernoulli(j.at("rho").get<double>());
    if (kind == "table")
      return EnvironmentModel::table(j.at("values").get<std::vector<double>>(),
                                     j.at("probs").get<std::vector<double>>());
    throw InvalidArgument("environment json: unknown kind '" + kind + "'");
  } catch (const nlohmann::json::exception& ex) {
    throw InvalidArgument(std::string("environment json: ") + ex.what());
  }
}

}  // namespace stablepoly

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include <json.hpp>

#include "stablepoly/convolution.hpp"
#include "stablepoly/environment.hpp"
#include "stablepoly/jump_kernels.hpp"
#include "stablepoly/lattice.hpp"

namespace stablepoly {

struct WindowPolicy {
  enum class Kind { fixed, adaptive };
  Kind kind = Kind::adaptive;
  Box box;                     // fixed only
  double margin_factor = 1.5;  // adaptive only
  double leak_budget = 1e-9;

  static WindowPolicy fixed(const Box& b, double leak_budget = 1e-9) { return {Kind::fixed, b, 1.5, leak_budget}; }
  static WindowPolicy adaptive(double margin_factor = 1.5, double leak_budget = 1e-9) {
    return {Kind::adaptive, Box{}, margin_factor, leak_budget};
  }
};

struct RecordFlags {
  bool argmax = true;
  bool final_layer = false;
  std::vector<std::int64_t> snapshot_times;
};

struct RunConfig {
  double beta = 0.0;
  std::int64_t n_steps = 1;
  JumpKernel kernel;
  EnvironmentModel env;
  std::uint64_t base_seed = 0;
  WindowPolicy window;
  RecordFlags record;
  ConvolutionMode convolution = ConvolutionMode::automatic;
  std::size_t window_budget = std::size_t{1} << 26;  // sites

  RunConfig(JumpKernel k, EnvironmentModel e) : kernel(std::move(k)), env(std::move(e)) {}
  void validate() const;
};

/// Point-to-site weights at time n, normalized by e^{-n lambda(beta)}, so
/// that sum_x exp(logw(x)) = W_n. Zero weight is -infinity.
struct LayerState {
  std::int64_t time = 0;
  Box window;
  std::vector<double> logw;
  double leaked_logmass = -INFINITY;
};

/// mu_n(omega_n = .) on a box.
struct EndpointSnapshot {
  std::int64_t n = 0;
  Box window;
  std::vector<double> prob;
};

struct RunDiagnostics {
  double beta = 0.0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> logW;       // index n-1 holds log W_n
  std::vector<double> I;          // overlap of the time-n predictive law
  std::vector<double> J;          // its largest atom
  std::vector<double> J_cesaro;
  std::vector<double> leak_logmass;
  std::vector<Site> argmax;
  std::vector<EndpointSnapshot> snapshots;
  std::optional<LayerState> final_layer;
  bool leak_flagged = false;
  std::int64_t leak_flag_step = -1;
  double clamped_mass = 0.0;
  std::size_t max_window_volume = 0;
  std::size_t fft_steps = 0;

  std::int64_t steps() const { return static_cast<std::int64_t>(logW.size()); }
  double logZ(std::int64_t n) const { return logW[static_cast<std::size_t>(n - 1)] + static_cast<double>(n) * lambda; }
};

RunDiagnostics run_polymer(const RunConfig& cfg);

struct EnumerationResult {
  double Z = 0.0;
  std::map<Site, double> endpoint;    // mu_n(omega_n = x)
  std::map<Site, double> predictive;  // mu_{n-1}(omega_n = x)
};

inline constexpr double kEnumerationBudget = 1e7;

/// Brute force over all |supp|^n paths; Z_n is not normalized by e^{-n lambda}.
EnumerationResult enumerate_Z(const JumpKernel& kernel, const FieldSlab& field, double beta, int n);

/// P^{(x)2}[exp(gamma1 N_n)] by a transfer recursion on the difference walk.
double pair_moment_exact(const JumpKernel& kernel, double gamma1, int n);
/// Same quantity by enumerating all pairs of paths (|supp|^{2n} <= 1e8).
double pair_moment_enumerate(const JumpKernel& kernel, double gamma1, int n);

/// Replica r uses environment seed derive_seed(cfg.base_seed, r).
std::uint64_t replica_seed(std::uint64_t base_seed, std::size_t replica);
std::vector<RunDiagnostics> run_replicas(const RunConfig& cfg, std::size_t replicas, int workers = 0);

struct MomentEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  double mean_W = 0.0;
  double std_error_W = 0.0;
  std::vector<double> W;  // per replica W_n
};

MomentEstimate second_moment_mc(const RunConfig& cfg, std::size_t replicas, int workers = 0);

struct FreeEnergy {
  double p_hat = 0.0;
  double std_error = 0.0;
  double lambda = 0.0;
  double annealed_gap = 0.0;  // lambda - p_hat
};

/// Slope of ln Z_n over the last half of a run; the error comes from the
/// spread of block slopes (single run) or of replica slopes.
FreeEnergy free_energy_estimate(const RunDiagnostics& diag);
FreeEnergy free_energy_estimate(const std::vector<RunDiagnostics>& replicas);

struct RatioSeries {
  std::vector<double> ratio;  // (-ln W_n) / sum_{k<=n} I_k
  double last_half_min = 0.0;
  double last_half_max = 0.0;
};

RatioSeries localization_ratio(const RunDiagnostics& diag);

nlohmann::json to_json(const RunConfig& cfg);

}  // namespace stablepoly

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stablepoly/environment.hpp"
#include "stablepoly/jump_kernels.hpp"
#include "stablepoly/polymer_engine.hpp"
#include "stablepoly/walk_analysis.hpp"

namespace stablepoly {

struct ConditionCheck {
  bool holds = false;
  double margin = 0.0;
  bool refused = false;
  std::string note;
};

/// ln(1/pi) - gamma1(beta) > 0, with pi + 2 stderr for Monte-Carlo estimates.
/// Refused (never true) unless the kernel is transient.
ConditionCheck check_L2(const EnvironmentModel& env, double beta, const ReturnEstimate& pi,
                        Transience transience = Transience::transient);

/// beta lambda'(beta) - lambda(beta) - entropy(q) > 0.
ConditionCheck check_KP(const EnvironmentModel& env, double beta, const JumpKernel& kernel);

/// theta -> ln sum_x q(x)^theta, with equal probabilities grouped.
class PowerSum {
 public:
  explicit PowerSum(const JumpKernel& kernel);
  double operator()(double theta) const;

 private:
  std::vector<double> log_p_;
  std::vector<double> mult_;
};

struct FractionalBound {
  double bound = 0.0;
  double theta_star = 1.0;
  bool below_lambda = false;  // strict certificate bound < lambda(beta)
  double lambda = 0.0;
};

/// min over theta in (0, 1) of [lambda(beta theta) + ln sum q^theta] / theta,
/// with the theta -> 1 limit lambda(beta) as the cap.
FractionalBound fractional_moment_bound(const EnvironmentModel& env, double beta, const PowerSum& sums,
                                        int grid_points = 64);
FractionalBound fractional_moment_bound(const EnvironmentModel& env, double beta, const JumpKernel& kernel,
                                        int grid_points = 64);

enum class Verdict { weak_sufficient, strong_sufficient, gap, borderline_refused };
std::string to_string(Verdict v);

struct PhasePoint {
  double beta = 0.0;
  std::string kernel_id;
  std::string env_id;
  ReturnEstimate pi;
  double gamma1 = 0.0;
  double l2_margin = 0.0;
  double kp_margin = 0.0;
  double fm_bound = 0.0;
  double theta_star = 1.0;
  Verdict verdict = Verdict::gap;
};

struct Attachment {
  double beta = 0.0;
  MomentEstimate second_moment;
  FreeEnergy free_energy;
};

struct ScanOptions {
  std::optional<ReturnEstimate> pi;  // computed from the kernel when absent
  ReturnParams pi_params;
  int theta_grid = 64;
  /// Simulations attached at these beta values (with `sim_kernel` when set).
  std::vector<double> attach_betas;
  std::optional<JumpKernel> sim_kernel;
  std::size_t attach_replicas = 20;
  std::int64_t attach_steps = 200;
  std::uint64_t seed = 1;
  int workers = 0;
  std::string kernel_id = "kernel";
};

struct ScanResult {
  std::vector<PhasePoint> points;
  Transience transience = Transience::transient;
  ReturnEstimate pi;
  std::optional<double> l2_max_beta;  // largest grid beta where L2 holds
  std::optional<double> kp_min_beta;  // smallest grid beta where KP holds
  std::vector<Attachment> attachments;
};

ScanResult scan(const std::vector<double>& beta_grid, const JumpKernel& kernel, const EnvironmentModel& env,
                const ScanOptions& options = {});

enum class RunClass { delocalized_consistent, localized_consistent, inconclusive };
std::string to_string(RunClass c);

struct ClassifyThresholds {
  double tau_loc = 0.01;
  double tau_del = 0.001;
  double logw_range_cap = 3.0;
  std::int64_t min_steps = 500;
};

RunClass classify_run(const RunDiagnostics& diag, const ClassifyThresholds& thresholds = {});

struct TestFunction {
  std::string id;
  std::function<double(double)> g;
};

/// cos(t x), sin(t x) for t in {0.5, 1, 2}, and a smoothed 1[x <= 0].
std::vector<TestFunction> default_test_functions();

struct ScalingRow {
  std::int64_t n = 0;
  std::string g_id;
  double mean = 0.0;
  double std = 0.0;
  double nu_n = 0.0;
  double deviation = 0.0;
};

struct ScalingReport {
  std::vector<std::int64_t> n_values;
  std::vector<std::string> g_ids;
  std::vector<ScalingRow> rows;
  std::vector<double> kolmogorov;  // per n, first coordinate
  bool l2_holds = true;
  std::string note;
};

struct ScalingOptions {
  std::vector<std::int64_t> n_list{100, 400, 800};
  std::vector<TestFunction> g_set;  // empty selects the defaults
  std::size_t replicas = 200;
  std::uint64_t seed = 1;
  int workers = 0;
  std::optional<ReturnEstimate> pi;  // for the L2 warning
};

/// Test functions act on the first coordinate of (omega_n - b_n) / a_n.
ScalingReport scaling_check(const JumpKernel& kernel, const EnvironmentModel& env, double beta,
                            const ScalingOptions& options);

/// Same report computed from already finished runs (snapshots at every n in
/// n_list) and a beta = 0 reference run.
ScalingReport scaling_report(const JumpKernel& kernel, const std::vector<RunDiagnostics>& replicas,
                             const RunDiagnostics& reference, const std::vector<std::int64_t>& n_list,
                             const std::vector<TestFunction>& g_set);

}  // namespace stablepoly

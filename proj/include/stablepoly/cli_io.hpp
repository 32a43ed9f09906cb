#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "stablepoly/environment.hpp"
#include "stablepoly/jump_kernels.hpp"
#include "stablepoly/polymer_engine.hpp"

namespace stablepoly {

enum ExitCode : int { kExitOk = 0, kExitInvalid = 1, kExitResource = 2, kExitAssertion = 3 };

struct CliConfig {
  std::string subcommand;
  std::filesystem::path config_path;
  std::filesystem::path out_dir = "out";
  std::uint64_t base_seed = 1;
  bool seed_given = false;
  int workers = 0;
  bool force = false;
  std::vector<std::string> overrides;  // key.path=value
};

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

/// Sets a dotted key; the value is parsed as JSON when possible, else kept as a string.
void apply_override(nlohmann::json& cfg, const std::string& assignment);

nlohmann::json load_experiment(const CliConfig& cli);

JumpKernel kernel_from_config(const nlohmann::json& j);
EnvironmentModel environment_from_config(const nlohmann::json& j);
RunConfig run_config_from(const nlohmann::json& experiment, std::uint64_t seed);
std::vector<double> beta_grid_from(const nlohmann::json& j);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

/// Parses argv and runs one subcommand; returns the process exit code.
int run_cli(int argc, char** argv);
int run_cli(const std::vector<std::string>& args);

/// Subcommand drivers. Each writes into cli.out_dir and returns the paths it wrote.
std::vector<std::filesystem::path> cmd_kernel(const CliConfig& cli, const nlohmann::json& exp);
std::vector<std::filesystem::path> cmd_pi(const CliConfig& cli, const nlohmann::json& exp);
std::vector<std::filesystem::path> cmd_conditions(const CliConfig& cli, const nlohmann::json& exp);
std::vector<std::filesystem::path> cmd_run(const CliConfig& cli, const nlohmann::json& exp);
std::vector<std::filesystem::path> cmd_scan(const CliConfig& cli, const nlohmann::json& exp);
std::vector<std::filesystem::path> cmd_scaling(const CliConfig& cli, const nlohmann::json& exp);
std::vector<std::filesystem::path> cmd_oracle(const CliConfig& cli, const nlohmann::json& exp);

}  // namespace stablepoly

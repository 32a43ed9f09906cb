#include "stablepoly/cli_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "stablepoly/convolution.hpp"
#include "stablepoly/errors.hpp"
#include "stablepoly/phase_diagram.hpp"
#include "stablepoly/walk_analysis.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace stablepoly {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void apply_override(json& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw InvalidArgument("override '" + assignment + "' is not key=value");
  const std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  json* node = &cfg;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw InvalidArgument("override key '" + key + "' has an empty component");
    if (!node->is_object()) {
      if (!node->is_null()) throw InvalidArgument("override key '" + key + "' descends into a non-object");
      *node = json::object();
    }
    node = &(*node)[part];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  *node = std::move(value);
}

json load_experiment(const CliConfig& cli) {
  json exp = json::object();
  if (!cli.config_path.empty()) {
    std::ifstream in(cli.config_path);
    if (!in) throw InvalidArgument("cannot read config " + cli.config_path.string());
    exp = json::parse(in, nullptr, false);
    if (exp.is_discarded() || !exp.is_object())
      throw InvalidArgument("config " + cli.config_path.string() + " is not a JSON object");
  }
  for (const auto& o : cli.overrides) apply_override(exp, o);
  if (cli.seed_given) exp["seed"] = cli.base_seed;
  return exp;
}

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& ex) {
    throw InvalidArgument(std::string("config key '") + key + "': " + ex.what());
  }
}

std::uint64_t seed_of(const json& exp) { return get_or<std::uint64_t>(exp, "seed", 1); }

}  // namespace

JumpKernel kernel_from_config(const json& j) {
  if (!j.is_object()) throw InvalidArgument("config: 'kernel' must be an object");
  if (j.contains("support")) return kernel_from_json(j);
  const auto type = get_or<std::string>(j, "type", "power_law");
  const int dim = get_or<int>(j, "dim", 1);
  if (type == "nn") return build_nn_kernel(dim);
  if (type == "power_law")
    return build_power_law_kernel(dim, get_or<double>(j, "alpha", 0.5), get_or<std::int64_t>(j, "R", 100));
  if (type == "file") {
    std::ifstream in(get_or<std::string>(j, "path", ""));
    if (!in) throw InvalidArgument("config: cannot read kernel file");
    const json k = json::parse(in, nullptr, false);
    if (k.is_discarded()) throw InvalidArgument("config: kernel file is not JSON");
    return kernel_from_json(k);
  }
  throw InvalidArgument("config: unknown kernel type '" + type + "'");
}

EnvironmentModel environment_from_config(const json& j) {
  if (j.is_null()) return EnvironmentModel::gaussian(0.0, 1.0);
  return environment_from_json(j);
}

RunConfig run_config_from(const json& exp, std::uint64_t seed) {
  RunConfig cfg(kernel_from_config(exp.value("kernel", json::object())),
                environment_from_config(exp.value("environment", json())));
  cfg.beta = get_or<double>(exp, "beta", 0.0);
  cfg.n_steps = get_or<std::int64_t>(exp, "n_steps", 100);
  cfg.base_seed = seed;
  const json w = exp.value("window", json::object());
  const auto kind = get_or<std::string>(w, "kind", "adaptive");
  if (kind == "fixed") {
    const auto lo = get_or<std::vector<std::int64_t>>(w, "lo", {});
    const auto hi = get_or<std::vector<std::int64_t>>(w, "hi", {});
    if (lo.size() != static_cast<std::size_t>(cfg.kernel.dim()) || hi.size() != lo.size())
      throw InvalidArgument("config: fixed window needs lo/hi of the kernel dimension");
    Box b;
    b.dim = cfg.kernel.dim();
    for (int i = 0; i < b.dim; ++i) {
      b.lo[i] = lo[i];
      b.hi[i] = hi[i];
    }
    cfg.window = WindowPolicy::fixed(b, get_or<double>(w, "leak_budget", 1e-9));
  } else if (kind == "adaptive") {
    cfg.window = WindowPolicy::adaptive(get_or<double>(w, "margin_factor", 1.5), get_or<double>(w, "leak_budget", 1e-9));
  } else {
    throw InvalidArgument("config: unknown window kind '" + kind + "'");
  }
  const auto conv = get_or<std::string>(exp, "convolution", "auto");
  if (conv == "auto") cfg.convolution = ConvolutionMode::automatic;
  else if (conv == "naive") cfg.convolution = ConvolutionMode::naive;
  else if (conv == "fft") cfg.convolution = ConvolutionMode::fft;
  else throw InvalidArgument("config: unknown convolution mode '" + conv + "'");
  cfg.record.snapshot_times = get_or<std::vector<std::int64_t>>(exp, "snapshot_times", {});
  cfg.record.argmax = get_or<bool>(exp, "record_argmax", true);
  cfg.validate();
  return cfg;
}

std::vector<double> beta_grid_from(const json& j) {
  if (j.is_array()) return j.get<std::vector<double>>();
  if (j.is_object()) {
    const double from = get_or<double>(j, "from", 0.0), to = get_or<double>(j, "to", 3.0);
    const int count = get_or<int>(j, "count", 31);
    if (count < 1 || !(to >= from)) throw InvalidArgument("config: beta range needs count >= 1 and to >= from");
    std::vector<double> out;
    for (int i = 0; i < count; ++i) out.push_back(count == 1 ? from : from + (to - from) * i / (count - 1));
    return out;
  }
  throw InvalidArgument("config: 'betas' must be a list or {from, to, count}");
}

void write_csv(const fs::path& path, const CsvTable& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ResourceError("cannot write " + path.string());
  const auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  if (!out) throw ResourceError("write failed for " + path.string());
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read " + path.string());
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (first) t.header = std::move(cells);
    else t.rows.push_back(std::move(cells));
    first = false;
  }
  return t;
}

namespace {

class Outputs {
 public:
  Outputs(const CliConfig& cli, std::vector<std::string> names) : dir_(cli.out_dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw ResourceError("cannot create output directory " + dir_.string() + ": " + ec.message());
    names.push_back("meta.json");
    for (const auto& n : names)
      if (fs::exists(dir_ / n) && !cli.force)
        throw ResourceError("refusing to overwrite " + (dir_ / n).string() + " (use --force)");
  }
  fs::path csv(const std::string& name, const CsvTable& t) {
    write_csv(dir_ / name, t);
    written_.push_back(dir_ / name);
    return dir_ / name;
  }
  fs::path json_file(const std::string& name, const json& j) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw ResourceError("cannot write " + (dir_ / name).string());
    out << j.dump(2) << '\n';
    written_.push_back(dir_ / name);
    return dir_ / name;
  }
  /// Sidecar with the config echo and the only wall-clock fields.
  std::vector<fs::path> finish(const CliConfig& cli, const json& exp, json extra = json::object()) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    extra["command"] = cli.subcommand;
    extra["seed"] = seed_of(exp);
    extra["workers"] = cli.workers;
    extra["config"] = exp;
    extra["created"] = stamp;
    json_file("meta.json", extra);
    return written_;
  }

 private:
  fs::path dir_;
  std::vector<fs::path> written_;
};

std::string fmt(double v) { return format_double(v); }
std::string fmt(std::int64_t v) { return std::to_string(v); }
std::string fmt(std::size_t v) { return std::to_string(v); }

json pi_json(const ReturnEstimate& e) {
  return {{"pi", e.pi}, {"method", to_string(e.method)}, {"std_error", e.std_error}, {"detail", e.detail}};
}

ReturnParams pi_params_from(const json& exp, const CliConfig& cli) {
  const json p = exp.value("pi", json::object());
  ReturnParams rp;
  rp.horizon = get_or<std::int64_t>(p, "horizon", 10'000);
  rp.samples = get_or<std::int64_t>(p, "samples", 100'000);
  rp.grid.points_per_axis = get_or<int>(p, "points_per_axis", 0);
  rp.seed = derive_seed(seed_of(exp), 0x70695f6d63ULL);
  rp.workers = cli.workers;
  return rp;
}

std::optional<ReturnEstimate> given_pi(const json& exp) {
  const json p = exp.value("pi", json::object());
  if (!p.contains("value")) return std::nullopt;
  ReturnEstimate e;
  e.pi = get_or<double>(p, "value", 1.0);
  e.method = ReturnMethod::green_quadrature;
  e.detail = {{"source", "config"}};
  if (!(e.pi > 0.0 && e.pi <= 1.0)) throw InvalidArgument("config: pi.value must lie in (0, 1]");
  return e;
}

CsvTable series_table(const std::vector<RunDiagnostics>& reps) {
  CsvTable t{{"replica", "n", "logW", "logZ", "I", "J", "J_cesaro", "leak_logmass"}, {}};
  for (std::size_t r = 0; r < reps.size(); ++r) {
    const auto& d = reps[r];
    for (std::int64_t n = 1; n <= d.steps(); ++n) {
      const auto i = static_cast<std::size_t>(n - 1);
      t.rows.push_back({fmt(r), fmt(n), fmt(d.logW[i]), fmt(d.logZ(n)), fmt(d.I[i]), fmt(d.J[i]), fmt(d.J_cesaro[i]),
                        fmt(d.leak_logmass[i])});
    }
  }
  return t;
}

}  // namespace

std::vector<fs::path> cmd_kernel(const CliConfig& cli, const json& exp) {
  const auto k = kernel_from_config(exp.value("kernel", json::object()));
  Outputs out(cli, {"kernel.json", "tail.csv"});
  json meta;
  meta["entropy"] = kernel_entropy(k);
  meta["support_size"] = k.size();
  meta["symmetric"] = k.is_symmetric();
  try {
    const auto tp = tail_profile(k);
    meta["tail_profile"] = {{"alpha_hat", tp.alpha_hat}, {"p_star", tp.p_star}, {"q_star", tp.q_star},
                            {"max_radius", tp.max_radius}, {"fit_radii", tp.fit_radii}};
  } catch (const DiagnosticError& ex) {
    meta["tail_profile"] = {{"unavailable", ex.what()}};
  }
  out.json_file("kernel.json", to_json(k));
  CsvTable tail{{"r", "mass_beyond"}, {}};
  for (const auto& [r, m] : tail_masses(k)) tail.rows.push_back({fmt(r), fmt(m)});
  out.csv("tail.csv", tail);
  return out.finish(cli, exp, meta);
}

std::vector<fs::path> cmd_pi(const CliConfig& cli, const json& exp) {
  const auto k = kernel_from_config(exp.value("kernel", json::object()));
  Outputs out(cli, {"pi.json"});
  const auto cls = classify_transience(k);
  json rep;
  rep["classification"] = to_string(cls);
  if (cls != Transience::transient) {
    rep["pi"] = 1.0;
    rep["green"] = "skipped: not transient";
    out.json_file("pi.json", rep);
    return out.finish(cli, exp);
  }
  const DifferenceWalk walk(k);
  const auto params = pi_params_from(exp, cli);
  const auto cf = chung_fuchs_integral(walk, params.grid);
  rep["quadrature"] = {{"infinite", cf.integral.infinite}, {"integral", cf.integral.value},
                       {"alpha_fit", cf.fit.alpha}, {"points_per_axis", cf.points_per_axis},
                       {"singular_points", cf.singular_points}};
  if (cf.integral.infinite) {
    rep["pi"] = 1.0;
    rep["note"] = "local exponent fit reaches the dimension; the truncated walk is treated as recurrent";
    out.json_file("pi.json", rep);
    return out.finish(cli, exp);
  }
  const auto green = return_probability(walk, ReturnMethod::green_quadrature, params);
  rep["green"] = pi_json(green);
  rep["pi"] = green.pi;
  const double gq = green.detail["G"].get<double>();
  const json pj = exp.value("pi", json::object());
  if (get_or<bool>(pj, "series", true)) {
    try {
      SeriesSpec s;
      s.torus = get_or<std::int64_t>(pj, "series_torus", 0);
      s.terms = get_or<std::int64_t>(pj, "series_terms", 0);
      const auto sg = green_series(walk, s);
      rep["series"] = {{"G", sg.G.infinite ? json("inf") : json(sg.G.value)}, {"partial", sg.partial},
                       {"torus", sg.torus}, {"terms", sg.terms}};
      if (!sg.G.infinite) rep["agreement"]["G_relative"] = std::abs(sg.G.value - gq) / gq;
    } catch (const ResourceError& ex) {
      rep["series"] = {{"skipped", ex.what()}};
    }
  }
  if (params.samples > 0) {
    const auto mc = return_probability(walk, ReturnMethod::monte_carlo, params);
    rep["monte_carlo"] = pi_json(mc);
    rep["agreement"]["pi_abs"] = std::abs(mc.pi - green.pi);
    rep["agreement"]["within_0_01"] = std::abs(mc.pi - green.pi) <= 0.01;
  }
  out.json_file("pi.json", rep);
  return out.finish(cli, exp);
}

namespace {

CsvTable conditions_table(const ScanResult& s) {
  CsvTable t{{"beta", "gamma1", "pi", "l2_margin", "kp_margin", "fm_bound", "theta_star", "verdict"}, {}};
  for (const auto& p : s.points)
    t.rows.push_back({fmt(p.beta), fmt(p.gamma1), fmt(p.pi.pi), fmt(p.l2_margin), fmt(p.kp_margin), fmt(p.fm_bound),
                      fmt(p.theta_star), to_string(p.verdict)});
  return t;
}

json scan_meta(const ScanResult& s) {
  json m;
  m["transience"] = to_string(s.transience);
  m["pi"] = pi_json(s.pi);
  m["l2_max_beta"] = s.l2_max_beta ? json(*s.l2_max_beta) : json(nullptr);
  m["kp_min_beta"] = s.kp_min_beta ? json(*s.kp_min_beta) : json(nullptr);
  return m;
}

}  // namespace

std::vector<fs::path> cmd_conditions(const CliConfig& cli, const json& exp) {
  const auto k = kernel_from_config(exp.value("kernel", json::object()));
  const auto env = environment_from_config(exp.value("environment", json()));
  const auto betas = beta_grid_from(exp.value("betas", json::object()));
  Outputs out(cli, {"conditions.csv"});
  ScanOptions opt;
  opt.pi = given_pi(exp);
  opt.pi_params = pi_params_from(exp, cli);
  opt.theta_grid = get_or<int>(exp, "theta_grid", 64);
  opt.workers = cli.workers;
  const auto s = scan(betas, k, env, opt);
  out.csv("conditions.csv", conditions_table(s));
  return out.finish(cli, exp, scan_meta(s));
}

std::vector<fs::path> cmd_run(const CliConfig& cli, const json& exp) {
  const auto cfg = run_config_from(exp, seed_of(exp));
  const auto replicas = get_or<std::size_t>(exp, "replicas", 1);
  if (replicas < 1) throw InvalidArgument("config: replicas must be >= 1");
  Outputs out(cli, {"series.csv", "run.json", "snapshots.csv"});
  const auto reps = run_replicas(cfg, replicas, cli.workers);
  out.csv("series.csv", series_table(reps));
  json runs = json::array();
  for (std::size_t r = 0; r < reps.size(); ++r) {
    const auto& d = reps[r];
    json j = {{"replica", r}, {"seed", d.seed}, {"logW_final", d.logW.back()},
              {"J_cesaro_final", d.J_cesaro.back()}, {"classification", to_string(classify_run(d))},
              {"leak_flagged", d.leak_flagged}, {"leak_flag_step", d.leak_flag_step},
              {"clamped_mass", d.clamped_mass}, {"max_window_volume", d.max_window_volume},
              {"fft_steps", d.fft_steps}};
    if (d.steps() >= 100) {
      const auto fe = free_energy_estimate(d);
      j["free_energy"] = {{"p_hat", fe.p_hat}, {"std_error", fe.std_error}, {"lambda", fe.lambda}};
    }
    if (!d.argmax.empty()) {
      const auto& a = d.argmax.back();
      j["argmax_final"] = std::vector<std::int64_t>(a.begin(), a.begin() + cfg.kernel.dim());
    }
    runs.push_back(j);
  }
  json res = {{"config", to_json(cfg)}, {"runs", runs}};
  if (reps.size() > 1) {
    std::vector<double> w;
    for (const auto& d : reps) w.push_back(std::exp(d.logW.back()));
    const double m = static_cast<double>(w.size());
    double mean = 0, m2 = 0;
    for (double x : w) mean += x / m;
    for (double x : w) m2 += x * x / m;
    double var = 0;
    for (double x : w) var += (x - mean) * (x - mean);
    res["W_mean"] = mean;
    res["W_std_error"] = std::sqrt(var / (m - 1) / m);
    res["W2_mean"] = m2;
    if (cfg.n_steps >= 100) {
      const auto fe = free_energy_estimate(reps);
      res["free_energy"] = {{"p_hat", fe.p_hat}, {"std_error", fe.std_error}, {"lambda", fe.lambda}};
    }
  }
  out.json_file("run.json", res);
  CsvTable snaps{{"replica", "n", "x0", "x1", "x2", "prob"}, {}};
  for (std::size_t r = 0; r < reps.size(); ++r)
    for (const auto& s : reps[r].snapshots)
      for (std::size_t i = 0; i < s.prob.size(); ++i)
        if (s.prob[i] > 0.0) {
          const Site x = s.window.site(i);
          snaps.rows.push_back({fmt(r), fmt(s.n), fmt(x[0]), fmt(x[1]), fmt(x[2]), fmt(s.prob[i])});
        }
  out.csv("snapshots.csv", snaps);
  return out.finish(cli, exp);
}

std::vector<fs::path> cmd_scan(const CliConfig& cli, const json& exp) {
  const auto k = kernel_from_config(exp.value("kernel", json::object()));
  const auto env = environment_from_config(exp.value("environment", json()));
  const auto betas = beta_grid_from(exp.value("betas", json::object()));
  Outputs out(cli, {"scan.csv", "attachments.csv"});
  ScanOptions opt;
  opt.pi = given_pi(exp);
  opt.pi_params = pi_params_from(exp, cli);
  opt.theta_grid = get_or<int>(exp, "theta_grid", 64);
  opt.workers = cli.workers;
  opt.seed = seed_of(exp);
  const json at = exp.value("attach", json::object());
  opt.attach_betas = get_or<std::vector<double>>(at, "betas", {});
  opt.attach_replicas = get_or<std::size_t>(at, "replicas", 20);
  opt.attach_steps = get_or<std::int64_t>(at, "steps", 200);
  if (at.contains("kernel")) opt.sim_kernel = kernel_from_config(at.at("kernel"));
  const auto s = scan(betas, k, env, opt);
  out.csv("scan.csv", conditions_table(s));
  CsvTable att{{"beta", "W_mean", "W_std_error", "W2_mean", "W2_std_error", "p_hat", "p_std_error", "lambda"}, {}};
  for (const auto& a : s.attachments)
    att.rows.push_back({fmt(a.beta), fmt(a.second_moment.mean_W), fmt(a.second_moment.std_error_W),
                        fmt(a.second_moment.mean), fmt(a.second_moment.std_error), fmt(a.free_energy.p_hat),
                        fmt(a.free_energy.std_error), fmt(lambda(env, a.beta))});
  out.csv("attachments.csv", att);
  return out.finish(cli, exp, scan_meta(s));
}

std::vector<fs::path> cmd_scaling(const CliConfig& cli, const json& exp) {
  const auto k = kernel_from_config(exp.value("kernel", json::object()));
  const auto env = environment_from_config(exp.value("environment", json()));
  const double beta = get_or<double>(exp, "beta", 0.0);
  Outputs out(cli, {"scaling.csv", "kolmogorov.csv"});
  ScalingOptions opt;
  opt.n_list = get_or<std::vector<std::int64_t>>(exp, "n_list", {100, 400, 800});
  opt.replicas = get_or<std::size_t>(exp, "replicas", 200);
  opt.seed = seed_of(exp);
  opt.workers = cli.workers;
  opt.pi = given_pi(exp);
  const auto rep = scaling_check(k, env, beta, opt);
  CsvTable t{{"n", "g", "mean", "std", "nu_n", "deviation"}, {}};
  for (const auto& r : rep.rows)
    t.rows.push_back({fmt(r.n), r.g_id, fmt(r.mean), fmt(r.std), fmt(r.nu_n), fmt(r.deviation)});
  out.csv("scaling.csv", t);
  CsvTable ks{{"n", "kolmogorov"}, {}};
  for (std::size_t i = 0; i < rep.n_values.size(); ++i) ks.rows.push_back({fmt(rep.n_values[i]), fmt(rep.kolmogorov[i])});
  out.csv("kolmogorov.csv", ks);
  return out.finish(cli, exp, {{"l2_holds", rep.l2_holds}, {"note", rep.note}});
}

namespace {

struct OracleRow {
  std::string check;
  double value, reference, error, tolerance;
  bool pass;
};

OracleRow compare(std::string name, double v, double ref, double tol, bool relative = true) {
  const double err = relative ? std::abs(v - ref) / std::max(std::abs(ref), 1e-300) : std::abs(v - ref);
  return {std::move(name), v, ref, err, tol, err <= tol};
}

}  // namespace

std::vector<fs::path> cmd_oracle(const CliConfig& cli, const json& exp) {
  Outputs out(cli, {"oracle.csv"});
  const std::uint64_t seed = seed_of(exp);
  std::vector<OracleRow> rows;
  const std::vector<std::pair<std::string, JumpKernel>> kernels = {
      {"nn1", build_nn_kernel(1)}, {"pl1_a0.5_R2", build_power_law_kernel(1, 0.5, 2)}, {"nn2", build_nn_kernel(2)}};
  const std::vector<std::pair<std::string, EnvironmentModel>> envs = {
      {"gauss", EnvironmentModel::gaussian(0, 1)}, {"bern", EnvironmentModel::bernoulli(0.5)}};
  const int n = 4;
  for (const auto& [kid, k] : kernels)
    for (const auto& [eid, env] : envs) {
      RunConfig cfg(k, env);
      cfg.beta = 0.7;
      cfg.n_steps = n;
      cfg.base_seed = derive_seed(seed, rows.size());
      Box reach = k.bounding_box();
      for (int i = 0; i < reach.dim; ++i) {
        reach.lo[i] *= n;
        reach.hi[i] *= n;
      }
      cfg.window = WindowPolicy::fixed(reach);
      cfg.record.snapshot_times = {n};
      const auto d = run_polymer(cfg);
      const auto e = enumerate_Z(k, sample_field(env, cfg.base_seed, 1, n + 1, reach), cfg.beta, n);
      rows.push_back(compare("engine_logZ_" + kid + "_" + eid, d.logZ(n), std::log(e.Z), 1e-10, false));
      double worst = 0.0;
      const auto& s = d.snapshots.front();
      for (std::size_t i = 0; i < s.prob.size(); ++i) {
        const auto it = e.endpoint.find(s.window.site(i));
        worst = std::max(worst, std::abs(s.prob[i] - (it == e.endpoint.end() ? 0.0 : it->second)));
      }
      rows.push_back(compare("engine_endpoint_" + kid + "_" + eid, worst, 0.0, 1e-10, false));
    }
  const auto env = EnvironmentModel::gaussian(0, 1);
  for (const auto& [kid, k] : kernels) {
    if (k.dim() != 1) continue;
    const double g = gamma1(env, 1.0);
    rows.push_back(compare("pair_moment_" + kid, pair_moment_exact(k, g, 3), pair_moment_enumerate(k, g, 3), 1e-12));
  }
  {
    const auto k = build_power_law_kernel(1, 0.5, 50);
    DenseLayer in;
    in.box = Box{1, {-300, 0, 0}, {300, 0, 0}};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < in.box.volume(); ++i) in.values.push_back(u(rng));
    DenseLayer a, b;
    LayerConvolver naive(k, ConvolutionMode::naive), fft(k, ConvolutionMode::fft);
    naive.apply(in, a);
    fft.apply(in, b);
    double worst = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
      peak = std::max(peak, a.values[i]);
    }
    rows.push_back(compare("convolution_routes", worst / peak, 0.0, 1e-10, false));
  }
  {
    RunConfig cfg(build_power_law_kernel(1, 0.5, 50), env);
    cfg.beta = 0.0;
    cfg.n_steps = 50;
    double worst = 0.0;
    for (double v : run_polymer(cfg).logW) worst = std::max(worst, std::abs(v));
    // Adaptive trimming may drop up to the leak budget in total.
    rows.push_back(compare("beta0_logW", worst, 0.0, cfg.window.leak_budget + 1e-12, false));
  }
  {
    RunConfig cfg(build_nn_kernel(1), env);
    cfg.beta = 1.0;
    cfg.n_steps = 400;
    cfg.base_seed = seed;
    const auto fe = free_energy_estimate(run_polymer(cfg));
    rows.push_back({"annealed_bound", fe.p_hat, fe.lambda, fe.p_hat - fe.lambda, 3 * fe.std_error,
                    fe.p_hat <= fe.lambda + 3 * fe.std_error});
  }
  if (get_or<bool>(exp, "green", true)) {
    const DifferenceWalk walk(build_nn_kernel(3));
    const double gq = green_function(walk);
    const auto gs = green_series(walk);
    rows.push_back(compare("green_nn3_quadrature", gq, 1.516386, 1e-3));
    rows.push_back(compare("green_nn3_routes", gq, gs.G.value, 1e-2));
  }
  CsvTable t{{"check", "value", "reference", "error", "tolerance", "pass"}, {}};
  bool ok = true;
  for (const auto& r : rows) {
    t.rows.push_back({r.check, fmt(r.value), fmt(r.reference), fmt(r.error), fmt(r.tolerance), r.pass ? "1" : "0"});
    ok = ok && r.pass;
  }
  out.csv("oracle.csv", t);
  auto files = out.finish(cli, exp, {{"all_pass", ok}});
  if (!ok) throw AssertionFailure("oracle suite: at least one check failed (see oracle.csv)");
  return files;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Directed polymers with heavy-tailed steps: kernels, return probabilities, phase checks, simulation"};
  app.require_subcommand(1);
  CliConfig cli;
  std::string config, outdir = "out";
  std::uint64_t seed = 1;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "JSON experiment file");
    sub->add_option("--out", outdir, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "base seed (overrides the config)");
    sub->add_option("--workers", cli.workers, "worker threads (0 = hardware)")->check(CLI::NonNegativeNumber);
    sub->add_flag("--force", cli.force, "overwrite existing result files");
    sub->add_option("--set", cli.overrides, "override a config key: key.path=value")->take_all();
  };
  using Cmd = std::vector<fs::path> (*)(const CliConfig&, const json&);
  const std::vector<std::tuple<std::string, std::string, Cmd>> cmds = {
      {"kernel", "build a jump kernel and write it with its tail profile", cmd_kernel},
      {"pi", "return probability of the difference walk by every available route", cmd_pi},
      {"conditions", "weak/strong sufficient conditions over a beta grid", cmd_conditions},
      {"run", "transfer-matrix simulation of one or more replicas", cmd_run},
      {"scan", "condition scan with optional attached simulations", cmd_scan},
      {"scaling", "endpoint scaling check against the beta = 0 walk", cmd_scaling},
      {"oracle", "exact cross-checks of the engine and the analysis routes", cmd_oracle}};
  std::vector<CLI::App*> subs;
  for (const auto& [name, help, fn] : cmds) subs.push_back(app.add_subcommand(name, help)), add_common(subs.back());
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInvalid;
  }
  try {
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (!subs[i]->parsed()) continue;
      cli.subcommand = std::get<0>(cmds[i]);
      cli.config_path = config;
      cli.out_dir = outdir;
      cli.base_seed = seed;
      cli.seed_given = subs[i]->count("--seed") > 0;
      const auto exp = load_experiment(cli);
      for (const auto& p : std::get<2>(cmds[i])(cli, exp)) std::cout << p.string() << '\n';
    }
    return kExitOk;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const UnsupportedCase& e) {
    std::cerr << "unsupported case: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const DiagnosticError& e) {
    std::cerr << "diagnostic failure: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const ResourceError& e) {
    std::cerr << "resource error: " << e.what() << '\n';
    return kExitResource;
  } catch (const std::bad_alloc&) {
    std::cerr << "resource error: out of memory\n";
    return kExitResource;
  } catch (const AssertionFailure& e) {
    std::cerr << "assertion failure: " << e.what() << '\n';
    return kExitAssertion;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitAssertion;
  }
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> copy = args;
  std::vector<char*> argv;
  for (auto& a : copy) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace stablepoly

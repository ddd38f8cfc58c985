// pilotwave: command-line front door. One subcommand per scripted
// experiment, flat key=value config files with flag overrides, seeded
// reproducibility, CSV/JSON emission into an output directory.
//
// Exit codes: 0 success, 2 configuration error, 3 runtime guard or
// invariant failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>

#include "pilotwave/io.hpp"
#include "pilotwave/pilotwave.hpp"
#include "pilotwave/verify.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace pilotwave;

namespace {

// ---------------------------------------------------------------------------
// Flat key=value config files. Flags win over config values.

std::map<std::string, std::string> load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + " is not key=value: " + t);
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    kv[key] = value;
  }
  return kv;
}

class ConfigOverlay {
 public:
  ConfigOverlay(const CLI::App& cmd, std::map<std::string, std::string> kv)
      : cmd_(cmd), kv_(std::move(kv)) {}

  template <typename T>
  void apply(const std::string& name, T& value) {
    const auto it = kv_.find(name);
    if (it == kv_.end()) return;
    used_.insert(name);
    if (cmd_.count("--" + name) > 0) return;  // explicit flag wins
    std::istringstream is(it->second);
    if constexpr (std::is_same_v<T, std::string>) {
      value = it->second;
    } else {
      is >> value;
      if (is.fail()) throw ConfigError("config value for '" + name + "' is not parsable");
    }
  }

  void finish() const {
    for (const auto& [key, value] : kv_)
      if (!used_.contains(key)) throw ConfigError("unknown config key: " + key);
  }

 private:
  const CLI::App& cmd_;
  std::map<std::string, std::string> kv_;
  std::set<std::string> used_;
};

// ---------------------------------------------------------------------------
// Common run plumbing.

struct CommonOpts {
  std::uint64_t seed = 42;
  std::string out;
  std::string format = "both";  // csv | json | both
  std::string config_path;

  void add_to(CLI::App* cmd, const std::string& default_out) {
    out = default_out;
    cmd->add_option("--seed", seed, "master seed; all randomness derives from it");
    cmd->add_option("--out", out, "output directory");
    cmd->add_option("--format", format, "data file format: csv, json or both")
        ->check(CLI::IsMember({"csv", "json", "both"}));
    cmd->add_option("--config", config_path, "flat key=value config file (flags win)");
  }

  ConfigOverlay overlay(const CLI::App& cmd) const {
    auto kv = config_path.empty() ? std::map<std::string, std::string>{}
                                  : load_config_file(config_path);
    ConfigOverlay ov(cmd, std::move(kv));
    return ov;
  }

  void apply_common(ConfigOverlay& ov) {
    ov.apply("seed", seed);
    ov.apply("out", out);
    ov.apply("format", format);
  }
};

// Writes data tables (CSV and/or JSON) plus the final summary, all through
// atomic renames, and remembers every file it touched.
class Emitter {
 public:
  Emitter(fs::path dir, std::string format) : dir_(std::move(dir)), format_(std::move(format)) {}

  void table(const std::string& stem, const std::function<void(std::ostream&)>& write_csv,
             const std::function<json()>& make_json) {
    if (format_ != "json") {
      io::write_file_atomic(dir_, stem + ".csv", write_csv);
      files_.push_back(stem + ".csv");
    }
    if (format_ != "csv") {
      const json j = make_json();
      io::write_file_atomic(dir_, stem + ".json",
                            [&](std::ostream& os) { os << j.dump(2) << '\n'; });
      files_.push_back(stem + ".json");
    }
  }

  void report(const std::string& name, const json& j) {
    io::write_file_atomic(dir_, name, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
    files_.push_back(name);
  }

  void summary(json s) {
    std::vector<std::string> all = files_;
    all.push_back("summary.json");
    s["artifacts"] = all;
    report("summary.json", s);
  }

  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::string format_;
  std::vector<std::string> files_;
};

json density_json(const Density& d) {
  json j;
  json rows = json::array();
  for (std::size_t k = 0; k < d.grid().size(); ++k) {
    const Position p = d.grid().point(k);
    if (d.grid().dimension() == 1)
      rows.push_back({p[0], d.weight(k)});
    else
      rows.push_back({p[0], p[1], d.weight(k)});
  }
  j["columns"] = d.grid().dimension() == 1 ? json::array({"x", "weight"})
                                           : json::array({"x", "y", "weight"});
  j["rows"] = std::move(rows);
  return j;
}

json values_json(const Grid& g, std::span<const double> values, const std::string& column) {
  json j;
  json rows = json::array();
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Position p = g.point(k);
    if (g.dimension() == 1)
      rows.push_back({p[0], values[k]});
    else
      rows.push_back({p[0], p[1], values[k]});
  }
  j["columns"] = g.dimension() == 1 ? json::array({"x", column})
                                    : json::array({"x", "y", column});
  j["rows"] = std::move(rows);
  return j;
}

json trajectories_json(const TrajectoryEnsemble& ens, int dim, std::size_t limit) {
  json j;
  j["columns"] = dim == 1 ? json::array({"traj_id", "t", "x"})
                          : json::array({"traj_id", "t", "x", "y"});
  json rows = json::array();
  const std::size_t count = limit == 0 ? ens.count() : std::min(ens.count(), limit);
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t t = 0; t < ens.times.size(); ++t) {
      const Position& p = ens.positions[i][t];
      if (dim == 1)
        rows.push_back({i, ens.times[t], p[0]});
      else
        rows.push_back({i, ens.times[t], p[0], p[1]});
    }
  j["rows"] = std::move(rows);
  return j;
}

double elapsed_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// double-slit

struct DoubleSlitOpts {
  CommonOpts common;
  std::string open = "both";
  double separation = 4.0;
  double width = 0.5;
  double forward_momentum = 10.0;
  double grid_min = -30.0, grid_max = 30.0;
  std::size_t grid_points = 1024;
  double dt = 0.002;
  std::size_t steps = 1000;
  std::size_t snapshot_stride = 4;
  std::size_t trajectories = 10000;
  std::size_t traj_csv_limit = 200;
};

int run_double_slit(const CLI::App& cmd, DoubleSlitOpts& o) {
  auto ov = o.common.overlay(cmd);
  o.common.apply_common(ov);
  ov.apply("open", o.open);
  ov.apply("separation", o.separation);
  ov.apply("width", o.width);
  ov.apply("forward-momentum", o.forward_momentum);
  ov.apply("grid-min", o.grid_min);
  ov.apply("grid-max", o.grid_max);
  ov.apply("grid-points", o.grid_points);
  ov.apply("dt", o.dt);
  ov.apply("steps", o.steps);
  ov.apply("snapshot-stride", o.snapshot_stride);
  ov.apply("trajectories", o.trajectories);
  ov.apply("traj-csv-limit", o.traj_csv_limit);
  ov.finish();
  const auto t0 = std::chrono::steady_clock::now();

  const Grid grid = Grid::line(o.grid_min, o.grid_max, o.grid_points);
  SlitConfig cfg;
  cfg.separation = o.separation;
  cfg.width = o.width;
  cfg.forward_momentum = o.forward_momentum;
  if (o.open == "slit1")
    cfg.open = SlitOpen::slit1;
  else if (o.open == "slit2")
    cfg.open = SlitOpen::slit2;
  else if (o.open == "both")
    cfg.open = SlitOpen::both;
  else
    throw ConfigError("open must be slit1, slit2 or both");

  EvolutionSpec spec;
  spec.dt = o.dt;
  spec.steps = o.steps;

  // Case (A): close slit 1, open slit 2. Case (B): the mirror. Case (C):
  // both open. The configured case also carries the trajectory run.
  SlitConfig cfg_a = cfg;
  cfg_a.open = SlitOpen::slit2;
  SlitConfig cfg_b = cfg;
  cfg_b.open = SlitOpen::slit1;
  const WaveFunction psi2 = prepare_double_slit(grid, cfg_a, spec);
  const WaveFunction psi1 = prepare_double_slit(grid, cfg_b, spec);

  EvolveDiagnostics diag;
  const auto snaps =
      prepare_double_slit_recording(grid, cfg, spec, o.snapshot_stride);
  const WaveFunction& psi_run = snaps.back();

  // Cross term of the configured case: for a single open slit the second
  // packet is absent and the file is identically zero.
  const WaveFunction zero(grid, std::vector<Complex>(grid.size(), Complex{0.0, 0.0}));
  const InterferenceDecomposition dec =
      cfg.open == SlitOpen::both
          ? interference_decomposition(psi1, psi2)
          : interference_decomposition(cfg.open == SlitOpen::slit1 ? psi1 : psi2, zero);

  double cross_peak = 0.0, raw_sum_peak = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    cross_peak = std::max(cross_peak, std::abs(dec.cross_term[k]));
    const double raw = cfg.open == SlitOpen::both
                           ? std::norm(psi1.value(k) + psi2.value(k))
                           : std::norm(psi_run.value(k));
    raw_sum_peak = std::max(raw_sum_peak, raw);
  }
  const bool interference_present = cross_peak > 0.05 * raw_sum_peak;

  const GuidanceField field(snaps, o.dt * static_cast<double>(o.snapshot_stride));
  const auto traj = double_slit_trajectories(field, o.trajectories, o.common.seed);

  std::vector<double> finals;
  const std::size_t last = traj.ensemble.times.size() - 1;
  for (std::size_t i = 0; i < traj.ensemble.count(); ++i)
    if (!traj.ensemble.flagged[i]) finals.push_back(traj.ensemble.positions[i][last][0]);
  const double ks =
      ks_statistic(std::move(finals), GridCdf(density(field.snapshot(field.snapshot_count() - 1))));
  std::size_t upper = 0;
  for (int slit : traj.slit_attribution) upper += (slit == 1);

  Emitter emit(o.common.out, o.common.format);
  const Density rho_a = density(psi2), rho_b = density(psi1), rho_c = density(psi_run);
  emit.table("screen_density_a_slit2", [&](std::ostream& os) { io::write_density_csv(os, rho_a); },
             [&] { return density_json(rho_a); });
  emit.table("screen_density_b_slit1", [&](std::ostream& os) { io::write_density_csv(os, rho_b); },
             [&] { return density_json(rho_b); });
  emit.table("screen_density_c_run", [&](std::ostream& os) { io::write_density_csv(os, rho_c); },
             [&] { return density_json(rho_c); });
  emit.table("cross_term",
             [&](std::ostream& os) { io::write_values_csv(os, grid, dec.cross_term, "cross_term"); },
             [&] { return values_json(grid, dec.cross_term, "cross_term"); });
  emit.table("trajectories",
             [&](std::ostream& os) {
               io::write_trajectories_csv(os, traj.ensemble, 1, o.traj_csv_limit);
             },
             [&] { return trajectories_json(traj.ensemble, 1, o.traj_csv_limit); });

  json s;
  s["experiment"] = "double-slit";
  s["config"] = {{"open", o.open},
                 {"separation", o.separation},
                 {"width", o.width},
                 {"forward-momentum", o.forward_momentum},
                 {"grid-min", o.grid_min},
                 {"grid-max", o.grid_max},
                 {"grid-points", o.grid_points},
                 {"dt", o.dt},
                 {"steps", o.steps},
                 {"snapshot-stride", o.snapshot_stride},
                 {"trajectories", o.trajectories},
                 {"traj-csv-limit", o.traj_csv_limit},
                 {"seed", o.common.seed},
                 {"format", o.common.format}};
  s["results"] = {{"norm_psi1", psi1.norm()},
                  {"norm_psi2", psi2.norm()},
                  {"norm_run", psi_run.norm()},
                  {"cross_term_peak", cross_peak},
                  {"density_peak_raw", raw_sum_peak},
                  {"interference_present", interference_present},
                  {"crossings", traj.crossings},
                  {"upper_slit_fraction",
                   static_cast<double>(upper) / static_cast<double>(o.trajectories)},
                  {"flagged_trajectories", traj.ensemble.flagged_count()},
                  {"endpoint_ks", ks},
                  {"ks_threshold", ks_threshold(o.trajectories)}};
  s["checks"] = {{"interference_matches_mode",
                  interference_present == (cfg.open == SlitOpen::both)},
                 {"no_axis_crossings", traj.crossings == 0},
                 {"endpoints_match_screen_density", ks < ks_threshold(o.trajectories)}};
  emit.summary(s);

  std::printf("double-slit: interference_present=%s crossings=%zu ks=%.4g (%.2fs)\n",
              interference_present ? "true" : "false", traj.crossings, ks, elapsed_since(t0));
  std::printf("wrote %s\n", emit.dir().string().c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// equivariance

struct EquivarianceOpts {
  CommonOpts common;
  double sigma = 1.0;
  double momentum = 0.0;
  double t_check = 2.0;
  double grid_min = -40.0, grid_max = 40.0;
  std::size_t grid_points = 1024;
  double dt = 0.002;
  std::size_t steps = 1000;
  std::size_t snapshot_stride = 4;
  std::size_t trajectories = 10000;
  double velocity_scale = 1.0;
  std::size_t traj_csv_limit = 200;
};

int run_equivariance(const CLI::App& cmd, EquivarianceOpts& o) {
  auto ov = o.common.overlay(cmd);
  o.common.apply_common(ov);
  ov.apply("sigma", o.sigma);
  ov.apply("momentum", o.momentum);
  ov.apply("t-check", o.t_check);
  ov.apply("grid-min", o.grid_min);
  ov.apply("grid-max", o.grid_max);
  ov.apply("grid-points", o.grid_points);
  ov.apply("dt", o.dt);
  ov.apply("steps", o.steps);
  ov.apply("snapshot-stride", o.snapshot_stride);
  ov.apply("trajectories", o.trajectories);
  ov.apply("velocity-scale", o.velocity_scale);
  ov.apply("traj-csv-limit", o.traj_csv_limit);
  ov.finish();
  const auto t0 = std::chrono::steady_clock::now();

  const Grid grid = Grid::line(o.grid_min, o.grid_max, o.grid_points);
  EvolutionSpec spec;
  spec.dt = o.dt;
  spec.steps = o.steps;
  const auto snaps =
      evolve_recording(gaussian_packet_1d(grid, 0.0, o.sigma, o.momentum), spec, o.snapshot_stride);
  const GuidanceField field(snaps, o.dt * static_cast<double>(o.snapshot_stride));

  TrajectoryEnsemble ensemble;
  const auto res = equivariance_check(field, o.trajectories, o.common.seed, o.t_check,
                                      o.velocity_scale, &ensemble);

  Emitter emit(o.common.out, o.common.format);
  emit.table("ensemble",
             [&](std::ostream& os) {
               io::write_trajectories_csv(os, ensemble, 1, o.traj_csv_limit);
             },
             [&] { return trajectories_json(ensemble, 1, o.traj_csv_limit); });

  json s;
  s["experiment"] = "equivariance";
  s["config"] = {{"sigma", o.sigma},
                 {"momentum", o.momentum},
                 {"t-check", o.t_check},
                 {"grid-min", o.grid_min},
                 {"grid-max", o.grid_max},
                 {"grid-points", o.grid_points},
                 {"dt", o.dt},
                 {"steps", o.steps},
                 {"snapshot-stride", o.snapshot_stride},
                 {"trajectories", o.trajectories},
                 {"velocity-scale", o.velocity_scale},
                 {"traj-csv-limit", o.traj_csv_limit},
                 {"seed", o.common.seed},
                 {"format", o.common.format}};
  s["results"] = {{"ks_statistic", res.ks_statistic},
                  {"ks_threshold", res.threshold},
                  {"pass", res.pass},
                  {"flagged_trajectories", res.flagged},
                  {"trajectories_used", res.used}};
  s["checks"] = {{"equivariance_pass", res.pass}};
  emit.summary(s);

  std::printf("equivariance: ks=%.5g threshold=%.5g pass=%s (%.2fs)\n", res.ks_statistic,
              res.threshold, res.pass ? "true" : "false", elapsed_since(t0));
  std::printf("wrote %s\n", emit.dir().string().c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// pointer

struct PointerOpts {
  CommonOpts common;
  double c1_squared = 0.3;
  double coupling = 1.0;
  double duration = 8.0;
  std::size_t steps = 800;
  double sigma = 1.0;
  double grid_min = -30.0, grid_max = 30.0;
  std::size_t grid_points = 1024;
  std::size_t trajectories = 10000;
  std::size_t traj_csv_limit = 200;
};

int run_pointer(const CLI::App& cmd, PointerOpts& o) {
  auto ov = o.common.overlay(cmd);
  o.common.apply_common(ov);
  ov.apply("c1-squared", o.c1_squared);
  ov.apply("coupling", o.coupling);
  ov.apply("duration", o.duration);
  ov.apply("steps", o.steps);
  ov.apply("sigma", o.sigma);
  ov.apply("grid-min", o.grid_min);
  ov.apply("grid-max", o.grid_max);
  ov.apply("grid-points", o.grid_points);
  ov.apply("trajectories", o.trajectories);
  ov.apply("traj-csv-limit", o.traj_csv_limit);
  ov.finish();
  const auto t0 = std::chrono::steady_clock::now();

  if (!(o.c1_squared >= 0.0 && o.c1_squared <= 1.0))
    throw ConfigError("c1-squared must lie in [0, 1]");
  const Grid grid = Grid::line(o.grid_min, o.grid_max, o.grid_points);
  const WaveFunction ready = gaussian_packet_1d(grid, 0.0, o.sigma);
  const Complex c1 = std::sqrt(o.c1_squared);
  const Complex c2 = std::sqrt(1.0 - o.c1_squared);

  const SpinorField sf = pointer_measure(c1, c2, ready, o.coupling, o.duration);
  const double mass_up = sf.up.norm_squared();
  const double mass_down = sf.down.norm_squared();
  const auto overlap_value = decoherence_overlap(sf);
  const bool fapp_decohered = overlap_value.has_value() && *overlap_value < 1e-10;

  const PointerRun run =
      pointer_measure_recording(c1, c2, ready, o.coupling, o.duration, o.steps);
  const auto traj = pointer_trajectories(run, o.trajectories, o.common.seed);
  const double sigma3 =
      3.0 * std::sqrt(o.c1_squared * (1.0 - o.c1_squared) / static_cast<double>(o.trajectories));

  Emitter emit(o.common.out, o.common.format);
  const Density rho_up = density(sf.up), rho_down = density(sf.down);
  emit.table("branch_up_density",
             [&](std::ostream& os) { io::write_density_csv(os, rho_up); },
             [&] { return density_json(rho_up); });
  emit.table("branch_down_density",
             [&](std::ostream& os) { io::write_density_csv(os, rho_down); },
             [&] { return density_json(rho_down); });
  emit.table("trajectories",
             [&](std::ostream& os) {
               io::write_trajectories_csv(os, traj.ensemble, 1, o.traj_csv_limit);
             },
             [&] { return trajectories_json(traj.ensemble, 1, o.traj_csv_limit); });

  json s;
  s["experiment"] = "pointer";
  s["config"] = {{"c1-squared", o.c1_squared}, {"coupling", o.coupling},
                 {"duration", o.duration},    {"steps", o.steps},
                 {"sigma", o.sigma},          {"grid-min", o.grid_min},
                 {"grid-max", o.grid_max},    {"grid-points", o.grid_points},
                 {"trajectories", o.trajectories}, {"traj-csv-limit", o.traj_csv_limit},
                 {"seed", o.common.seed},     {"format", o.common.format}};
  s["results"] = {{"branch_mass_up", mass_up},
                  {"branch_mass_down", mass_down},
                  {"born_weight_up", o.c1_squared},
                  {"born_weight_down", 1.0 - o.c1_squared},
                  {"decoherence_overlap",
                   overlap_value ? json(*overlap_value) : json("not-applicable")},
                  {"fapp_decohered", fapp_decohered},
                  {"trajectory_up_fraction", traj.up_fraction},
                  {"binomial_3sigma", sigma3}};
  s["checks"] = {{"branch_masses_match_born",
                  std::abs(mass_up - o.c1_squared) < 1e-8 &&
                      std::abs(mass_down - (1.0 - o.c1_squared)) < 1e-8},
                 {"trajectory_fraction_within_3sigma",
                  std::abs(traj.up_fraction - o.c1_squared) < sigma3}};
  emit.summary(s);

  std::printf("pointer: masses %.6f/%.6f, trajectory up fraction %.4f (3sigma %.4f) (%.2fs)\n",
              mass_up, mass_down, traj.up_fraction, sigma3, elapsed_since(t0));
  std::printf("wrote %s\n", emit.dir().string().c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// no-signaling

struct NoSignalingOpts {
  CommonOpts common;
  std::size_t states = 1000;
  std::size_t angles = 24;
};

int run_no_signaling(const CLI::App& cmd, NoSignalingOpts& o) {
  auto ov = o.common.overlay(cmd);
  o.common.apply_common(ov);
  ov.apply("states", o.states);
  ov.apply("angles", o.angles);
  ov.finish();
  const auto t0 = std::chrono::steady_clock::now();

  const TwoQubitState singlet = TwoQubitState::singlet();
  json sweep = json::array();
  double singlet_max = 0.0;
  for (std::size_t a = 0; a < o.angles; ++a) {
    const MeasurementAxis axis{2.0 * std::numbers::pi * static_cast<double>(a) /
                               static_cast<double>(o.angles)};
    const auto audit = no_signaling_audit(singlet, axis);
    singlet_max = std::max(singlet_max, audit.discrepancy);
    sweep.push_back({{"gamma", axis.gamma},
                     {"post_measurement_marginal", audit.post_measurement_marginal},
                     {"unmeasured_marginal", audit.unmeasured_marginal},
                     {"discrepancy", audit.discrepancy}});
  }

  SplitMix64 rng(o.common.seed);
  double random_max = 0.0;
  for (std::size_t s = 0; s < o.states; ++s) {
    const TwoQubitState state = TwoQubitState::random(rng);
    for (std::size_t a = 0; a < o.angles; ++a) {
      const MeasurementAxis axis{2.0 * std::numbers::pi * static_cast<double>(a) /
                                 static_cast<double>(o.angles)};
      random_max = std::max(random_max, no_signaling_audit(state, axis).discrepancy);
    }
  }
  const double overall = std::max(singlet_max, random_max);

  Emitter emit(o.common.out, o.common.format);
  json report;
  report["state"] = {{"a", {singlet.a.real(), singlet.a.imag()}},
                     {"b", {singlet.b.real(), singlet.b.imag()}},
                     {"c", {singlet.c.real(), singlet.c.imag()}},
                     {"d", {singlet.d.real(), singlet.d.imag()}}};
  report["angle_sweep"] = sweep;
  report["random_states_audited"] = o.states;
  report["max_discrepancy_singlet"] = singlet_max;
  report["max_discrepancy_random"] = random_max;
  report["max_discrepancy"] = overall;
  report["identity_holds"] = overall < 1e-12;
  emit.report("audit.json", report);

  json s;
  s["experiment"] = "no-signaling";
  s["config"] = {{"states", o.states},
                 {"angles", o.angles},
                 {"seed", o.common.seed},
                 {"format", o.common.format}};
  s["results"] = {{"max_discrepancy", overall}};
  s["checks"] = {{"identity_holds", overall < 1e-12}};
  emit.summary(s);

  std::printf("no-signaling: max discrepancy %.3e over %zu states x %zu angles (%.2fs)\n",
              overall, o.states, o.angles, elapsed_since(t0));
  std::printf("wrote %s\n", emit.dir().string().c_str());
  return overall < 1e-12 ? 0 : 3;
}

// ---------------------------------------------------------------------------
// bell

struct BellOpts {
  CommonOpts common;
  double angle_a = 0.0, angle_b = 120.0, angle_c = 240.0;  // degrees
  std::size_t samples = 100000;
};

int run_bell(const CLI::App& cmd, BellOpts& o) {
  auto ov = o.common.overlay(cmd);
  o.common.apply_common(ov);
  ov.apply("angle-a", o.angle_a);
  ov.apply("angle-b", o.angle_b);
  ov.apply("angle-c", o.angle_c);
  ov.apply("samples", o.samples);
  ov.finish();
  const auto t0 = std::chrono::steady_clock::now();

  const AngleTriple triple = AngleTriple::degrees(o.angle_a, o.angle_b, o.angle_c);
  const NonlocalityReport rep = nonlocality_demonstration(triple, o.samples, o.common.seed);

  Emitter emit(o.common.out, o.common.format);
  emit.table("pair_counts", [&](std::ostream& os) { io::write_pair_counts_csv(os, rep); },
             [&] {
               json j;
               j["columns"] = {"left_axis", "right_axis", "cell", "count", "expected"};
               json rows = json::array();
               static const char* kCells[4] = {"ii", "ij", "ji", "jj"};
               for (const auto& pair : rep.pairs)
                 for (std::size_t cell = 0; cell < 4; ++cell)
                   rows.push_back({pair.left_angle, pair.right_angle, kCells[cell],
                                   pair.counts[cell], pair.expected[cell]});
               j["rows"] = std::move(rows);
               return j;
             });

  json report;
  report["lhv_bound"] = rep.lhv_bound;
  report["witness"] = {rep.witness.x_a, rep.witness.x_b, rep.witness.x_c};
  report["quantum_sum_analytic"] = rep.quantum_sum_analytic;
  report["quantum_sum_mc"] = rep.quantum_sum_mc;
  report["mc_sigma"] = rep.mc_sigma;
  report["verdict"] = rep.violation ? "VIOLATION" : "NO-VIOLATION";
  report["samples_per_pair"] = rep.samples_per_pair;
  report["angles_degrees"] = {o.angle_a, o.angle_b, o.angle_c};
  emit.report("report.json", report);

  json s;
  s["experiment"] = "bell";
  s["config"] = {{"angle-a", o.angle_a},
                 {"angle-b", o.angle_b},
                 {"angle-c", o.angle_c},
                 {"samples", o.samples},
                 {"seed", o.common.seed},
                 {"format", o.common.format}};
  s["results"] = {{"lhv_bound", rep.lhv_bound},
                  {"quantum_sum_analytic", rep.quantum_sum_analytic},
                  {"quantum_sum_mc", rep.quantum_sum_mc},
                  {"mc_sigma", rep.mc_sigma},
                  {"verdict", rep.violation ? "VIOLATION" : "NO-VIOLATION"}};
  s["checks"] = {{"mc_within_3sigma",
                  std::abs(rep.quantum_sum_mc - rep.quantum_sum_analytic) <=
                      3.0 * rep.mc_sigma}};
  emit.summary(s);

  std::printf("bell: LHV bound %.0f, quantum %.6f (MC %.6f +- %.2e), verdict %s (%.2fs)\n",
              rep.lhv_bound, rep.quantum_sum_analytic, rep.quantum_sum_mc, rep.mc_sigma,
              rep.violation ? "VIOLATION" : "NO-VIOLATION", elapsed_since(t0));
  std::printf("wrote %s\n", emit.dir().string().c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// verify

int run_verify(const CLI::App& cmd, CommonOpts& common) {
  auto ov = common.overlay(cmd);
  common.apply_common(ov);
  ov.finish();

  const auto results = run_acceptance(common.seed);
  bool all_pass = true;
  json entries = json::array();
  for (const auto& r : results) {
    const bool pass = passed_within_budget(r);
    all_pass = all_pass && pass;
    std::printf("[%s] %d. %s: %s (%.2fs)\n", pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.details.c_str(), r.seconds);
    entries.push_back({{"id", r.id}, {"name", r.name}, {"pass", pass}, {"details", r.details}});
  }

  Emitter emit(common.out, common.format);
  json s;
  s["experiment"] = "verify";
  s["config"] = {{"seed", common.seed}, {"format", common.format}};
  s["criteria"] = entries;
  s["all_pass"] = all_pass;
  emit.summary(s);
  std::printf("verify: %s\n", all_pass ? "all criteria passed" : "FAILURES present");
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pilot-wave quantum mechanics laboratory"};
  app.require_subcommand(1);

  DoubleSlitOpts ds;
  auto* cmd_ds = app.add_subcommand("double-slit", "two-slit interference and trajectories");
  ds.common.add_to(cmd_ds, "runs/double-slit");
  cmd_ds->add_option("--open", ds.open, "which slits are open: slit1, slit2, both")
      ->check(CLI::IsMember({"slit1", "slit2", "both"}));
  cmd_ds->add_option("--separation", ds.separation, "gap separation");
  cmd_ds->add_option("--width", ds.width, "gap width");
  cmd_ds->add_option("--forward-momentum", ds.forward_momentum,
                     "longitudinal wavenumber (recorded, transversally inert)");
  cmd_ds->add_option("--grid-min", ds.grid_min);
  cmd_ds->add_option("--grid-max", ds.grid_max);
  cmd_ds->add_option("--grid-points", ds.grid_points);
  cmd_ds->add_option("--dt", ds.dt);
  cmd_ds->add_option("--steps", ds.steps);
  cmd_ds->add_option("--snapshot-stride", ds.snapshot_stride);
  cmd_ds->add_option("--trajectories", ds.trajectories);
  cmd_ds->add_option("--traj-csv-limit", ds.traj_csv_limit,
                     "trajectories written to CSV (0 = all)");

  EquivarianceOpts eq;
  auto* cmd_eq = app.add_subcommand("equivariance", "Born-rule transport check");
  eq.common.add_to(cmd_eq, "runs/equivariance");
  cmd_eq->add_option("--sigma", eq.sigma);
  cmd_eq->add_option("--momentum", eq.momentum);
  cmd_eq->add_option("--t-check", eq.t_check);
  cmd_eq->add_option("--grid-min", eq.grid_min);
  cmd_eq->add_option("--grid-max", eq.grid_max);
  cmd_eq->add_option("--grid-points", eq.grid_points);
  cmd_eq->add_option("--dt", eq.dt);
  cmd_eq->add_option("--steps", eq.steps);
  cmd_eq->add_option("--snapshot-stride", eq.snapshot_stride);
  cmd_eq->add_option("--trajectories", eq.trajectories);
  cmd_eq->add_option("--velocity-scale", eq.velocity_scale,
                     "scale the guidance velocity (2 = deliberate corruption)");
  cmd_eq->add_option("--traj-csv-limit", eq.traj_csv_limit);

  PointerOpts po;
  auto* cmd_po = app.add_subcommand("pointer", "von Neumann pointer measurement");
  po.common.add_to(cmd_po, "runs/pointer");
  cmd_po->add_option("--c1-squared", po.c1_squared, "Born weight of branch 1");
  cmd_po->add_option("--coupling", po.coupling);
  cmd_po->add_option("--duration", po.duration);
  cmd_po->add_option("--steps", po.steps);
  cmd_po->add_option("--sigma", po.sigma);
  cmd_po->add_option("--grid-min", po.grid_min);
  cmd_po->add_option("--grid-max", po.grid_max);
  cmd_po->add_option("--grid-points", po.grid_points);
  cmd_po->add_option("--trajectories", po.trajectories);
  cmd_po->add_option("--traj-csv-limit", po.traj_csv_limit);

  NoSignalingOpts ns;
  auto* cmd_ns = app.add_subcommand("no-signaling", "marginal identity audit");
  ns.common.add_to(cmd_ns, "runs/no-signaling");
  cmd_ns->add_option("--states", ns.states, "random states audited");
  cmd_ns->add_option("--angles", ns.angles, "angles in the sweep");

  BellOpts be;
  auto* cmd_be = app.add_subcommand("bell", "Bell bound, quantum sum, violation verdict");
  be.common.add_to(cmd_be, "runs/bell");
  cmd_be->add_option("--angle-a", be.angle_a, "direction a, degrees");
  cmd_be->add_option("--angle-b", be.angle_b, "direction b, degrees");
  cmd_be->add_option("--angle-c", be.angle_c, "direction c, degrees");
  cmd_be->add_option("--samples", be.samples, "Monte Carlo samples per pair");

  CommonOpts verify_common;
  auto* cmd_ve = app.add_subcommand("verify", "run the full acceptance suite");
  verify_common.add_to(cmd_ve, "runs/verify");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (cmd_ds->parsed()) return run_double_slit(*cmd_ds, ds);
    if (cmd_eq->parsed()) return run_equivariance(*cmd_eq, eq);
    if (cmd_po->parsed()) return run_pointer(*cmd_po, po);
    if (cmd_ns->parsed()) return run_no_signaling(*cmd_ns, ns);
    if (cmd_be->parsed()) return run_bell(*cmd_be, be);
    if (cmd_ve->parsed()) return run_verify(*cmd_ve, verify_common);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "runtime guard: %s\n", e.what());
    return 3;
  }
  return 0;
}

#include "pulselab/lab.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pulselab/common.hpp"
#include "pulselab/design.hpp"
#include "pulselab/frontmetrics.hpp"
#include "pulselab/solver.hpp"
#include "pulselab/spectra.hpp"

namespace pulselab::lab {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// strict config access
// ---------------------------------------------------------------------------

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& ctx) {
  if (!j.is_object()) throw ConfigError(ctx + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known) throw ConfigError(ctx + ": unknown key '" + it.key() + "'");
  }
}

double num_or(const json& j, const char* key, double dflt) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_number()) throw ConfigError(std::string(key) + " must be a number");
  return j[key].get<double>();
}

int int_or(const json& j, const char* key, int dflt) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_number_integer()) throw ConfigError(std::string(key) + " must be an integer");
  return j[key].get<int>();
}

bool bool_or(const json& j, const char* key, bool dflt) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_boolean()) throw ConfigError(std::string(key) + " must be a boolean");
  return j[key].get<bool>();
}

std::string str_or(const json& j, const char* key, const std::string& dflt) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_string()) throw ConfigError(std::string(key) + " must be a string");
  return j[key].get<std::string>();
}

std::vector<double> num_list(const json& j, const std::string& ctx) {
  if (!j.is_array()) throw ConfigError(ctx + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError(ctx + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

// ---------------------------------------------------------------------------
// reaction factory
// ---------------------------------------------------------------------------

ReactionPtr reaction_from_json(const json& j, const std::string& ctx) {
  if (!j.is_object() || !j.contains("kind"))
    throw ConfigError(ctx + ": reaction needs a 'kind' tag");
  const std::string kind = j["kind"].get<std::string>();
  ReactionPtr r;
  if (kind == "cubic") {
    check_keys(j, {"kind", "dim", "reflect_state", "reflect_space"}, ctx);
    r = make_cubic(int_or(j, "dim", 1));
  } else if (kind == "family_1d") {
    check_keys(j, {"kind", "tau", "sigma", "sigma_pair", "delta0", "reflect_state",
                   "reflect_space"},
               ctx);
    const double d0 = num_or(j, "delta0", 0.05);
    if (j.contains("sigma_pair")) {
      auto p = num_list(j["sigma_pair"], ctx + ".sigma_pair");
      if (p.size() != 2) throw ConfigError(ctx + ": sigma_pair needs two entries");
      r = make_family_1d_pair(p[0], p[1], d0);
    } else {
      r = make_family_1d(num_or(j, "tau", 0.0), num_or(j, "sigma", 0.1), d0);
    }
  } else if (kind == "family_multidir") {
    check_keys(j, {"kind", "tau", "sigma", "dirs", "periods", "period_vector", "delta0",
                   "reflect_state", "reflect_space"},
               ctx);
    if (!j.contains("tau") || !j.contains("dirs") || !j.contains("period_vector"))
      throw ConfigError(ctx + ": family_multidir needs tau, dirs and period_vector");
    std::vector<std::vector<double>> dirs;
    for (const auto& d : j["dirs"]) dirs.push_back(num_list(d, ctx + ".dirs"));
    auto tau = num_list(j["tau"], ctx + ".tau");
    auto period_vector = num_list(j["period_vector"], ctx + ".period_vector");
    std::vector<double> periods;
    if (j.contains("periods")) {
      periods = num_list(j["periods"], ctx + ".periods");
    } else {
      for (const auto& d : dirs) {
        auto m = membership_SL(d, period_vector);
        if (!m) throw ConfigError(ctx + ": direction outside S_L for the declared period");
        periods.push_back(*m);
      }
    }
    r = make_family_multidir(tau, num_or(j, "sigma", 0.1), dirs, periods, period_vector,
                             num_or(j, "delta0", 0.05));
  } else if (kind == "stacked") {
    check_keys(j, {"kind", "components", "reflect_state", "reflect_space"}, ctx);
    if (!j.contains("components") || !j["components"].is_array())
      throw ConfigError(ctx + ": stacked needs a component list");
    std::vector<ReactionPtr> comps;
    int idx = 0;
    for (const auto& c : j["components"])
      comps.push_back(reaction_from_json(c, ctx + ".components[" + std::to_string(idx++) + "]"));
    r = make_stacked(comps);
  } else if (kind == "rescaled") {
    check_keys(j, {"kind", "nu", "inner", "reflect_state", "reflect_space"}, ctx);
    if (!j.contains("inner")) throw ConfigError(ctx + ": rescaled needs an inner reaction");
    r = make_rescaled(reaction_from_json(j["inner"], ctx + ".inner"), num_or(j, "nu", 1.0));
  } else {
    throw ConfigError(ctx + ": unknown reaction kind '" + kind + "'");
  }
  if (bool_or(j, "reflect_space", false)) r = reflect_space(r);
  if (bool_or(j, "reflect_state", false)) r = reflect_state(r);
  return r;
}

// ---------------------------------------------------------------------------
// profiles and artifacts
// ---------------------------------------------------------------------------

constexpr auto kSolverKeys = {
    "dx_length",         "dt_time",        "t_end_time",
    "scheme",            "boundary",       "half_width_length",
    "moving_window",     "recenter_threshold_length", "record_every_time",
    "snapshot_every_time", "snapshot_from_time", "t_end_2d_time",
    "half_width_2d_length", "deta_target_length", "frame_dir"};

MeasureProfile profile_from(const json& cfg) {
  MeasureProfile p;
  if (!cfg.contains("solver")) return p;
  const json& s = cfg["solver"];
  check_keys(s, kSolverKeys, "solver");
  p.dx = num_or(s, "dx_length", p.dx);
  p.dt = num_or(s, "dt_time", p.dt);
  p.t_end = num_or(s, "t_end_time", p.t_end);
  p.half_width = num_or(s, "half_width_length", p.half_width);
  p.record_every = num_or(s, "record_every_time", p.record_every);
  p.moving_window = bool_or(s, "moving_window", p.moving_window);
  p.recenter_threshold = num_or(s, "recenter_threshold_length", p.recenter_threshold);
  p.t_end_2d = num_or(s, "t_end_2d_time", p.t_end_2d);
  p.half_width_2d = num_or(s, "half_width_2d_length", p.half_width_2d);
  p.deta_target = num_or(s, "deta_target_length", p.deta_target);
  const std::string scheme = str_or(s, "scheme", "cn-imex");
  if (scheme == "cn-imex")
    p.scheme = Scheme::cn_imex;
  else if (scheme == "be-imex")
    p.scheme = Scheme::be_imex;
  else if (scheme == "explicit")
    p.scheme = Scheme::explicit_euler;
  else
    throw ConfigError("solver.scheme must be cn-imex, be-imex or explicit");
  return p;
}

SpectraOptions spectra_from(const json& cfg, unsigned seed) {
  SpectraOptions opt;
  opt.seed = seed;
  if (!cfg.contains("spectra")) return opt;
  const json& s = cfg["spectra"];
  check_keys(s, {"cell_nodes", "harvest_runs", "harvest_t_time", "instability_floor"},
             "spectra");
  opt.n = int_or(s, "cell_nodes", opt.n);
  opt.harvest_runs = int_or(s, "harvest_runs", opt.harvest_runs);
  opt.harvest_t = num_or(s, "harvest_t_time", opt.harvest_t);
  opt.instability_floor = num_or(s, "instability_floor", opt.instability_floor);
  return opt;
}

class Csv {
 public:
  Csv(const std::filesystem::path& path, const std::string& header) {
    f_ = std::fopen(path.string().c_str(), "wb");
    if (!f_) throw ConfigError("cannot open output file " + path.string());
    std::fprintf(f_, "%s\n", header.c_str());
  }
  ~Csv() {
    if (f_) std::fclose(f_);
  }
  void cell(double v) {
    sep();
    std::fprintf(f_, "%.12g", v);
  }
  void cell(const std::string& s) {
    sep();
    std::fprintf(f_, "%s", s.c_str());
  }
  void cell(int v) {
    sep();
    std::fprintf(f_, "%d", v);
  }
  void end_row() {
    std::fprintf(f_, "\n");
    first_ = true;
  }

 private:
  void sep() {
    if (!first_) std::fprintf(f_, ",");
    first_ = false;
  }
  std::FILE* f_ = nullptr;
  bool first_ = true;
};

std::string level_tag(double level) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", level);
  return buf;
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& tr) {
  std::string header = "t";
  for (double lev : tr.track_levels) header += ",front_pos_level_" + level_tag(lev);
  header += ",shift";
  Csv csv(path, header);
  for (const auto& rec : tr.records) {
    csv.cell(rec.t);
    for (double p : rec.front_pos) csv.cell(p);
    csv.cell(rec.shift);
    csv.end_row();
  }
}

void write_field_csv(const std::filesystem::path& path, const Field1D& f) {
  Csv csv(path, "x,u");
  for (int i = 0; i < f.grid.nx; ++i) {
    csv.cell(f.x_abs(i));
    csv.cell(f.u[i]);
    csv.end_row();
  }
}

void write_field_csv_2d(const std::filesystem::path& path, const Field2D& f) {
  Csv csv(path, "xi,eta,u");
  for (int i = 0; i < f.grid.n_xi; ++i)
    for (int j = 0; j < f.grid.n_eta; ++j) {
      csv.cell(f.grid.xi(i) + f.shift);
      csv.cell(f.grid.eta(j));
      csv.cell(f.at(i, j));
      csv.end_row();
    }
}

void write_speed_row(Csv& csv, double level, const SpeedEstimate& e) {
  csv.cell(level);
  csv.cell(e.c);
  csv.cell(e.stderr_c);
  csv.cell(to_string(e.cls));
  csv.end_row();
}

void write_design_log(const std::filesystem::path& path, const DesignResult& d, int n_tau) {
  std::string header = "iter";
  for (int i = 1; i <= n_tau; ++i) header += ",tau_" + std::to_string(i);
  header += ",cL,cR,residual";
  Csv csv(path, header);
  for (const auto& it : d.log) {
    csv.cell(it.iter);
    for (double t : it.tau) csv.cell(t);
    csv.cell(it.c_left);
    csv.cell(it.c_right);
    csv.cell(it.residual);
    csv.end_row();
  }
}

// ---------------------------------------------------------------------------
// subcommand runners
// ---------------------------------------------------------------------------

struct Ctx {
  json cfg;
  std::filesystem::path out;
  int jobs = 1;
  unsigned seed = 12345u;

  ReactionPtr reaction(bool required = true) const {
    if (!cfg.contains("reaction")) {
      if (required) throw ConfigError("config is missing the reaction section");
      return nullptr;
    }
    return reaction_from_json(cfg["reaction"], "reaction");
  }
  json measure() const {
    if (!cfg.contains("measure")) return json::object();
    const json& m = cfg["measure"];
    check_keys(m,
               {"discard_fraction", "level", "orientation", "decay_tol",
                "tolerance_rel"},
               "measure");
    return m;
  }
};

Orientation orientation_from(const json& m) {
  const std::string o = str_or(m, "orientation", "right");
  if (o == "right") return Orientation::right_moving;
  if (o == "left") return Orientation::left_moving;
  throw ConfigError("measure.orientation must be 'right' or 'left'");
}

int run_simulate(const Ctx& ctx) {
  auto r = ctx.reaction();
  MeasureProfile prof = profile_from(ctx.cfg);
  const json m = ctx.measure();
  prof.discard_fraction = num_or(m, "discard_fraction", prof.discard_fraction);
  const double level = num_or(m, "level", 0.5 * (r->min_level() + r->max_level()));

  if (r->dim() == 1) {
    Orientation o = orientation_from(m);
    ReactionPtr rr = o == Orientation::right_moving ? r : reflect_space(r);
    const int nx = static_cast<int>(std::lround(2.0 * prof.half_width / prof.dx)) + 1;
    Grid1D g{-prof.half_width, prof.half_width, nx};
    SolverConfig cfg;
    cfg.dt = prof.dt;
    cfg.t_end = prof.t_end;
    cfg.scheme = prof.scheme;
    cfg.record_every = prof.record_every;
    cfg.moving_window = prof.moving_window;
    cfg.recenter_threshold = prof.recenter_threshold;
    cfg.track_levels = {level};
    cfg.window_level = level;
    if (ctx.cfg.contains("solver")) {
      cfg.snapshot_every = num_or(ctx.cfg["solver"], "snapshot_every_time", 0.0);
      cfg.snapshot_from = num_or(ctx.cfg["solver"], "snapshot_from_time", 0.0);
      const std::string b = str_or(ctx.cfg["solver"], "boundary", "clamp-to-levels");
      if (b == "clamp-to-levels")
        cfg.boundary = Boundary::clamp_to_levels;
      else if (b == "zero-flux")
        cfg.boundary = Boundary::zero_flux;
      else
        throw ConfigError("solver.boundary must be clamp-to-levels or zero-flux");
    }
    auto res = evolve(front_initial(g, Orientation::right_moving, r->max_level(),
                                    r->min_level()),
                      *rr, cfg);
    write_trajectory_csv(ctx.out / "trajectory.csv", res.trajectory);
    write_field_csv(ctx.out / "final_snapshot.csv", res.final_field);
    return 0;
  }

  // 2-D: rotated frame taken from the config
  if (!ctx.cfg.contains("solver") || !ctx.cfg["solver"].contains("frame_dir"))
    throw ConfigError("2-D simulation needs solver.frame_dir");
  auto dir = num_list(ctx.cfg["solver"]["frame_dir"], "solver.frame_dir");
  if (dir.size() != 2) throw ConfigError("solver.frame_dir must have two components");
  Grid2D g;
  g.dir[0] = dir[0];
  g.dir[1] = dir[1];
  g.xi_min = -prof.half_width_2d;
  g.xi_max = prof.half_width_2d;
  g.n_xi = static_cast<int>(std::lround(2.0 * prof.half_width_2d / prof.dx)) + 1;
  g.transverse_period = frame_transverse_period(*r, g.dir);
  g.n_eta = std::max(8, static_cast<int>(std::lround(g.transverse_period / prof.deta_target)));
  SolverConfig cfg;
  cfg.dt = prof.dt;
  cfg.t_end = prof.t_end_2d;
  cfg.record_every = prof.record_every;
  cfg.moving_window = prof.moving_window;
  cfg.recenter_threshold = prof.recenter_threshold;
  cfg.track_levels = {level};
  cfg.window_level = level;
  auto res = evolve_2d(front_initial_2d(g, r->max_level(), r->min_level()), *r, cfg,
                       frame_longitudinal_period(*r, g.dir));
  write_trajectory_csv(ctx.out / "trajectory.csv", res.trajectory);
  write_field_csv_2d(ctx.out / "final_snapshot.csv", res.final_field);
  return 0;
}

int run_speed(const Ctx& ctx) {
  auto r = ctx.reaction();
  MeasureProfile prof = profile_from(ctx.cfg);
  const json m = ctx.measure();
  prof.discard_fraction = num_or(m, "discard_fraction", prof.discard_fraction);
  const double level = 0.5 * (r->min_level() + r->max_level());

  SpeedEstimate sides[2];
  parallel_for_indexed(2, ctx.jobs, [&](int i) {
    sides[i] = measure_speed(
        r, i == 0 ? Orientation::left_moving : Orientation::right_moving, prof);
  });
  {
    Csv csv(ctx.out / "speed_left.csv", "level,c,stderr,class");
    write_speed_row(csv, level, sides[0]);
  }
  {
    Csv csv(ctx.out / "speed_right.csv", "level,c,stderr,class");
    write_speed_row(csv, level, sides[1]);
  }
  std::ofstream sum(ctx.out / "summary.txt");
  sum << "leftward:  c = " << sides[0].c << " (" << to_string(sides[0].cls) << ")\n"
      << "rightward: c = " << sides[1].c << " (" << to_string(sides[1].cls) << ")\n";
  const bool ok = sides[0].cls != SpeedClass::inconclusive &&
                  sides[1].cls != SpeedClass::inconclusive;
  return ok ? 0 : 1;
}

int run_certify(const Ctx& ctx) {
  auto r = ctx.reaction();
  SpectraOptions opt = spectra_from(ctx.cfg, ctx.seed);
  auto rep = certify_bistable(*r, opt);
  Csv csv(ctx.out / "certification.csv", "state_id,max,min,lambda1,tag");
  for (size_t i = 0; i < rep.states.size(); ++i) {
    const auto& st = rep.states[i];
    csv.cell(static_cast<int>(i));
    csv.cell(st.max_value);
    csv.cell(st.min_value);
    csv.cell(st.lambda1);
    csv.cell(st.stable ? "stable" : "unstable");
    csv.end_row();
  }
  std::ofstream sum(ctx.out / "summary.txt");
  sum << (rep.certified ? "certified" : "refused") << "\n";
  if (!rep.certified) sum << "reason: " << rep.reason << "\n";
  return rep.certified ? 0 : 1;
}

int run_decay(const Ctx& ctx) {
  auto r = ctx.reaction();
  if (r->levels().size() != 2)
    throw ConfigError("decay fits expect a bistable reaction");
  MeasureProfile prof = profile_from(ctx.cfg);
  const json m = ctx.measure();
  prof.discard_fraction = num_or(m, "discard_fraction", prof.discard_fraction);
  const double tol = num_or(m, "decay_tol", 0.05);
  Orientation o = orientation_from(m);

  auto [field, est] = converged_profile(r, o, prof);
  DecayOptions opt;
  opt.band = r->delta0();
  opt.trim_period = r->period()[0];
  const double c = est.cls == SpeedClass::zero ? 0.0 : est.c;
  auto [ahead, behind] =
      fit_decay(field, r->min_level(), r->max_level(), c, r->gamma(), r->gamma(), opt);

  write_field_csv(ctx.out / "profile.csv", field);
  Csv csv(ctx.out / "decay.csv", "side,rate_fit,rate_theory,rms_residual,n");
  csv.cell("ahead");
  csv.cell(ahead.rate);
  csv.cell(ahead.rate_theory);
  csv.cell(ahead.rms_residual);
  csv.cell(ahead.n);
  csv.end_row();
  csv.cell("behind");
  csv.cell(behind.rate);
  csv.cell(behind.rate_theory);
  csv.cell(behind.rms_residual);
  csv.cell(behind.n);
  csv.end_row();

  std::ofstream sum(ctx.out / "summary.txt");
  sum << "speed " << est.c << " (" << to_string(est.cls) << ")\n"
      << "ahead  " << ahead.rate << " vs " << ahead.rate_theory << "\n"
      << "behind " << behind.rate << " vs " << behind.rate_theory << "\n";
  const bool ok = std::fabs(ahead.rate / ahead.rate_theory - 1.0) <= tol &&
                  std::fabs(behind.rate / behind.rate_theory - 1.0) <= tol;
  return ok ? 0 : 1;
}

json design_section(const Ctx& ctx) {
  if (!ctx.cfg.contains("design")) throw ConfigError("config is missing the design section");
  const json& d = ctx.cfg["design"];
  check_keys(d,
             {"c_left", "c_right", "sigma", "targets", "dirs", "period_vector", "periods",
              "allow_rescale", "tolerance_rel"},
             "design");
  return d;
}

int verdict_against_targets(const std::vector<double>& targets,
                            const std::vector<double>& achieved,
                            const std::vector<SpeedEstimate>& ests, double tol) {
  for (size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] == 0.0) {
      if (ests[i].cls != SpeedClass::zero) return 1;
    } else if (std::fabs(achieved[i] / targets[i] - 1.0) > tol) {
      return 1;
    }
  }
  return 0;
}

int run_design(const Ctx& ctx) {
  const json d = design_section(ctx);
  if (!d.contains("c_left") || !d.contains("c_right"))
    throw ConfigError("design needs c_left and c_right targets");
  MeasureProfile prof = profile_from(ctx.cfg);
  auto res = design_1d(d["c_left"].get<double>(), d["c_right"].get<double>(),
                       num_or(d, "sigma", 0.1), prof);
  write_design_log(ctx.out / "design_log.csv", res, 1);
  std::ofstream sum(ctx.out / "design_summary.txt");
  sum << "tau " << (res.tau.empty() ? 0.0 : res.tau[0]) << "\nnu " << res.nu << "\n"
      << "targets " << res.targets[0] << " " << res.targets[1] << "\n"
      << "achieved " << res.achieved[0] << " " << res.achieved[1] << "\n";
  return verdict_against_targets(res.targets, res.achieved, res.achieved_estimates,
                                 num_or(d, "tolerance_rel", 0.05));
}

int run_design_nd(const Ctx& ctx) {
  const json d = design_section(ctx);
  if (!d.contains("targets") || !d.contains("dirs") || !d.contains("period_vector"))
    throw ConfigError("design-nd needs targets, dirs and period_vector");
  MultiDirSpec spec;
  for (const auto& dir : d["dirs"]) spec.dirs.push_back(num_list(dir, "design.dirs"));
  spec.period_vector = num_list(d["period_vector"], "design.period_vector");
  if (d.contains("periods")) spec.periods = num_list(d["periods"], "design.periods");
  spec.sigma = num_or(d, "sigma", 0.1);
  MeasureProfile prof = profile_from(ctx.cfg);
  auto res = design_multidir(num_list(d["targets"], "design.targets"), spec, prof,
                             bool_or(d, "allow_rescale", true), ctx.jobs);
  write_design_log(ctx.out / "design_log.csv", res, static_cast<int>(spec.dirs.size()));
  std::ofstream sum(ctx.out / "design_summary.txt");
  sum << "nu " << res.nu << "\ntau";
  for (double t : res.tau) sum << " " << t;
  sum << "\ntargets";
  for (double t : res.targets) sum << " " << t;
  sum << "\nachieved";
  for (double a : res.achieved) sum << " " << a;
  sum << "\n";
  return verdict_against_targets(res.targets, res.achieved, res.achieved_estimates,
                                 num_or(d, "tolerance_rel", 0.1));
}

int run_terrace(const Ctx& ctx) {
  json t = ctx.cfg.contains("terrace") ? ctx.cfg["terrace"] : json::object();
  check_keys(t, {"variant", "n_fronts", "sigma", "gap_length", "run_t_end_time"},
             "terrace");
  const std::string v = str_or(t, "variant", "ii");
  TerraceVariant variant;
  if (v == "i")
    variant = TerraceVariant::shared_platforms;
  else if (v == "ii")
    variant = TerraceVariant::disjoint_platforms;
  else if (v == "iii")
    variant = TerraceVariant::single_front;
  else
    throw ConfigError("terrace.variant must be i, ii or iii");
  const int n_fronts = int_or(t, "n_fronts", variant == TerraceVariant::disjoint_platforms ? 2 : 3);
  const double sigma = num_or(t, "sigma", 0.1);
  const double gap = num_or(t, "gap_length", 8.0);
  const double t_run = num_or(t, "run_t_end_time", 250.0);

  MeasureProfile prof = profile_from(ctx.cfg);
  auto sc = terrace_scenario(variant, n_fronts, sigma, prof, ctx.jobs);
  const int I = static_cast<int>(sc.components.size());

  // run geometry wide enough for the fastest front over the whole run
  double cmax = 0.0;
  for (double c : sc.achieved_right) cmax = std::max(cmax, c);
  for (double c : sc.achieved_left) cmax = std::max(cmax, c);
  const double x_lo = -((I - 1) * gap + 40.0);
  const double x_hi = cmax * t_run + 40.0;
  const int nx = static_cast<int>(std::lround((x_hi - x_lo) / prof.dx)) + 1;
  Grid1D g{x_lo, x_hi, nx};

  std::vector<double> track, plateaus;
  for (int k = 1; k < 4 * I; ++k) {
    const double lev = k / 4.0;
    if (std::fabs(lev - std::round(lev)) > 1e-12) track.push_back(lev);
  }
  for (int q = 1; q < I; ++q) plateaus.push_back(q);

  TerraceReport reports[2];
  parallel_for_indexed(2, ctx.jobs, [&](int side) {
    ReactionPtr r = side == 0 ? sc.reaction : reflect_space(sc.reaction);
    SolverConfig cfg;
    cfg.dt = prof.dt;
    cfg.t_end = t_run;
    cfg.scheme = prof.scheme;
    cfg.record_every = 0.5;
    cfg.track_levels = track;
    cfg.plateau_levels = plateaus;
    auto res = evolve(staircase_initial(g, r->levels(), Orientation::right_moving, gap),
                      *r, cfg);
    reports[side] = extract_terrace(
        res.trajectory, r->levels(), 1.0,
        side == 0 ? Orientation::right_moving : Orientation::left_moving);
  });

  auto dump = [&](const char* name, const TerraceReport& rep) {
    Csv csv(ctx.out / name, "level,c,stderr,class");
    for (const auto& f : rep.fronts) write_speed_row(csv, f.level, f.speed);
  };
  dump("terrace_right.csv", reports[0]);
  dump("terrace_left.csv", reports[1]);

  auto intermediate = [](const TerraceReport& rep) {
    std::vector<double> out(rep.platforms.begin() + 1, rep.platforms.end() - 1);
    std::sort(out.begin(), out.end());
    return out;
  };
  auto expected_r = sc.expected_platforms_right;
  auto expected_l = sc.expected_platforms_left;
  std::sort(expected_r.begin(), expected_r.end());
  std::sort(expected_l.begin(), expected_l.end());
  const bool platforms_ok =
      intermediate(reports[0]) == expected_r && intermediate(reports[1]) == expected_l;
  const bool verdicts_ok = reports[0].verdict == TerraceVerdict::valid &&
                           reports[1].verdict == TerraceVerdict::valid;

  std::ofstream sum(ctx.out / "terrace_summary.txt");
  sum << "variant " << v << "  eta* " << sc.eta_star << "\n";
  for (int k = 0; k < I; ++k)
    sum << "level " << k + 1 << ": targets (R " << sc.targets_right[k] << ", L "
        << sc.targets_left[k] << ") achieved (R " << sc.achieved_right[k] << ", L "
        << sc.achieved_left[k] << ")\n";
  for (int side = 0; side < 2; ++side) {
    const auto& rep = reports[side];
    sum << (side == 0 ? "rightward" : "leftward") << " platforms:";
    for (double p : rep.platforms) sum << " " << p;
    sum << "  verdict " << to_string(rep.verdict) << "\n";
  }
  sum << (platforms_ok ? "platforms match" : "platforms differ") << "\n";
  return (platforms_ok && verdicts_ok) ? 0 : 1;
}

int run_fg(const Ctx& ctx) {
  if (!ctx.cfg.contains("fg")) throw ConfigError("config is missing the fg section");
  const json& f = ctx.cfg["fg"];
  check_keys(f, {"samples", "queries", "dirs"}, "fg");
  std::vector<DirectionalSample> samples;
  if (f.contains("samples")) {
    for (const auto& s : f["samples"]) {
      check_keys(s, {"dir", "speed"}, "fg.samples");
      DirectionalSample d;
      d.dir = num_list(s["dir"], "fg.samples.dir");
      d.speed = s["speed"].get<double>();
      samples.push_back(std::move(d));
    }
  } else {
    // measure c* in the listed directions for the configured reaction
    if (!f.contains("dirs")) throw ConfigError("fg needs samples or dirs");
    auto r = ctx.reaction();
    MeasureProfile prof = profile_from(ctx.cfg);
    std::vector<std::vector<double>> dirs;
    for (const auto& d : f["dirs"]) dirs.push_back(num_list(d, "fg.dirs"));
    samples.resize(dirs.size());
    parallel_for_indexed(static_cast<int>(dirs.size()), ctx.jobs, [&](int i) {
      auto est = measure_speed_dir(r, dirs[i], prof);
      if (est.cls == SpeedClass::negative)
        throw NumericError("fg: spreading requires nonnegative speeds");
      samples[i] = {dirs[i], est.cls == SpeedClass::zero ? 0.0 : est.c};
    });
  }
  std::vector<std::vector<double>> queries;
  if (f.contains("queries")) {
    for (const auto& q : f["queries"]) queries.push_back(num_list(q, "fg.queries"));
  } else {
    for (const auto& s : samples) queries.push_back(s.dir);
  }
  auto w = fg_envelope(samples, queries);
  const size_t dim = queries.empty() ? 2 : queries[0].size();
  std::string header;
  for (size_t i = 1; i <= dim; ++i) header += "e_" + std::to_string(i) + ",";
  header += "wstar";
  Csv csv(ctx.out / "fg.csv", header);
  for (size_t i = 0; i < queries.size(); ++i) {
    for (double c : queries[i]) csv.cell(c);
    csv.cell(w[i]);
    csv.end_row();
  }
  return 0;
}

int run_sweep(const Ctx& ctx) {
  if (!ctx.cfg.contains("sweep")) throw ConfigError("config is missing the sweep section");
  const json& s = ctx.cfg["sweep"];
  check_keys(s, {"taus", "sigma"}, "sweep");
  auto taus = num_list(s["taus"], "sweep.taus");
  const double sigma = num_or(s, "sigma", 0.1);
  MeasureProfile prof = profile_from(ctx.cfg);
  auto rows = speed_map_1d(taus, sigma, prof, ctx.jobs);
  Csv csv(ctx.out / "sweep.csv", "tau,cL,cL_stderr,cL_class,cR,cR_stderr,cR_class");
  for (const auto& row : rows) {
    csv.cell(row.tau);
    csv.cell(row.left.c);
    csv.cell(row.left.stderr_c);
    csv.cell(to_string(row.left.cls));
    csv.cell(row.right.c);
    csv.cell(row.right.stderr_c);
    csv.cell(to_string(row.right.cls));
    csv.end_row();
  }
  const bool mono = speed_map_monotone(rows);
  std::ofstream sum(ctx.out / "summary.txt");
  sum << (mono ? "monotone within 3 stderr" : "monotonicity violated") << "\n";
  return mono ? 0 : 1;
}

}  // namespace

ReactionPtr reaction_from_json_text(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("reaction JSON parse error: ") + e.what());
  }
  return reaction_from_json(j, "reaction");
}

int run(const std::string& subcommand, const std::string& config_path,
        const std::string& out_dir, int jobs, unsigned seed) {
  Ctx ctx;
  std::ifstream in(config_path);
  if (!in) throw ConfigError("cannot read config file " + config_path);
  try {
    in >> ctx.cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  check_keys(ctx.cfg,
             {"scenario", "reaction", "solver", "measure", "design", "terrace", "fg",
              "sweep", "spectra"},
             "config");
  ctx.out = out_dir.empty() ? std::filesystem::path(".") : std::filesystem::path(out_dir);
  std::filesystem::create_directories(ctx.out);
  ctx.jobs = std::max(1, jobs);
  ctx.seed = seed;

  if (subcommand == "simulate") return run_simulate(ctx);
  if (subcommand == "speed") return run_speed(ctx);
  if (subcommand == "certify") return run_certify(ctx);
  if (subcommand == "decay") return run_decay(ctx);
  if (subcommand == "design") return run_design(ctx);
  if (subcommand == "design-nd") return run_design_nd(ctx);
  if (subcommand == "terrace") return run_terrace(ctx);
  if (subcommand == "fg") return run_fg(ctx);
  if (subcommand == "sweep") return run_sweep(ctx);
  throw ConfigError("unknown subcommand '" + subcommand + "'");
}

}  // namespace pulselab::lab

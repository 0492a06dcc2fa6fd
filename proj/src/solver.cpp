#include "pulselab/solver.hpp"

#include <algorithm>
#include <cmath>

#include "pulselab/common.hpp"
#include "pulselab/linalg.hpp"

namespace pulselab {

void Grid1D::validate() const {
  if (nx < 16) throw ConfigError("Grid1D: nx must be at least 16");
  if (!(x_max > x_min)) throw ConfigError("Grid1D: empty extent");
}

void Grid2D::validate() const {
  if (n_xi < 16) throw ConfigError("Grid2D: n_xi must be at least 16");
  if (n_eta < 8) throw ConfigError("Grid2D: n_eta must be at least 8");
  if (!(xi_max > xi_min)) throw ConfigError("Grid2D: empty extent");
  if (!(transverse_period > 0.0)) throw ConfigError("Grid2D: transverse period must be positive");
  const double norm = std::hypot(dir[0], dir[1]);
  if (std::fabs(norm - 1.0) > 1e-12) throw ConfigError("Grid2D: frame direction must be unit");
}

void Grid2D::point(int i, int j, double* xy) const {
  const double s = xi(i), t = eta(j);
  xy[0] = s * dir[0] - t * dir[1];
  xy[1] = s * dir[1] + t * dir[0];
}

void SolverConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("SolverConfig: dt must be positive");
  if (t_end < 0.0) throw ConfigError("SolverConfig: t_end must be nonnegative");
  if (!(record_every > 0.0)) throw ConfigError("SolverConfig: record cadence must be positive");
  if (snapshot_every < 0.0) throw ConfigError("SolverConfig: snapshot cadence must be nonnegative");
  if (moving_window && !(recenter_threshold > 0.0))
    throw ConfigError("SolverConfig: recenter threshold must be positive");
}

void Trajectory::series(double level, std::vector<double>& t,
                        std::vector<double>& pos) const {
  t.clear();
  pos.clear();
  int idx = -1;
  for (size_t k = 0; k < track_levels.size(); ++k)
    if (std::fabs(track_levels[k] - level) < 1e-12) idx = static_cast<int>(k);
  if (idx < 0) throw ConfigError("Trajectory: level was not tracked");
  for (const auto& rec : records) {
    if (std::isnan(rec.front_pos[idx])) continue;
    t.push_back(rec.t);
    pos.push_back(rec.front_pos[idx]);
  }
}

Field1D front_initial(const Grid1D& grid, Orientation orientation, double upper,
                      double lower, double x0) {
  grid.validate();
  if (!(upper > lower)) throw ConfigError("front_initial: upper must exceed lower");
  Field1D f;
  f.grid = grid;
  f.u.resize(grid.nx);
  const double sgn = (orientation == Orientation::right_moving) ? 1.0 : -1.0;
  for (int i = 0; i < grid.nx; ++i)
    f.u[i] = lower + (upper - lower) * kink(sgn * (grid.x(i) - x0));
  return f;
}

Field1D staircase_initial(const Grid1D& grid, const std::vector<double>& levels,
                          Orientation orientation, double gap, double x0) {
  grid.validate();
  if (levels.size() < 2) throw ConfigError("staircase_initial: need at least two levels");
  Field1D f;
  f.grid = grid;
  f.u.assign(grid.nx, levels.front());
  const double sgn = (orientation == Orientation::right_moving) ? 1.0 : -1.0;
  // The front whose lower level is levels[m] sits at x0 - m * gap (mirrored
  // for left-moving data); the bottom front leads.
  for (size_t m = 0; m + 1 < levels.size(); ++m) {
    const double amp = levels[m + 1] - levels[m];
    const double center = x0 - static_cast<double>(m) * gap * sgn;
    for (int i = 0; i < grid.nx; ++i)
      f.u[i] += amp * kink(sgn * (grid.x(i) - center));
  }
  return f;
}

namespace {

double theta_of(Scheme s) {
  switch (s) {
    case Scheme::cn_imex: return 0.5;
    case Scheme::be_imex: return 1.0;
    case Scheme::explicit_euler: return 0.0;
  }
  return 0.5;
}

std::optional<double> first_crossing(const std::vector<double>& u, const Grid1D& g,
                                     double level) {
  for (int i = 0; i + 1 < g.nx; ++i) {
    const double a = u[i] - level, b = u[i + 1] - level;
    if (a == 0.0 && b == 0.0) continue;
    if ((a <= 0.0 && b > 0.0) || (a >= 0.0 && b < 0.0) || (a > 0.0 && b <= 0.0) ||
        (a < 0.0 && b >= 0.0)) {
      if (a == b) continue;
      return g.x(i) + g.dx() * a / (a - b);
    }
  }
  return std::nullopt;
}

struct Workspace1D {
  std::vector<double> xs;   // absolute node coordinates
  std::vector<double> rhs;
  std::vector<double> scratch;
  linalg::TridiagFactor interior;  // clamp rows removed
  linalg::TridiagFactor full;      // zero-flux mirror rows
  linalg::CyclicFactor wrap;       // periodic
  double theta = 0.5;
  double r = 0.0;

  void rebuild_coords(const Field1D& f) {
    xs.resize(f.grid.nx);
    for (int i = 0; i < f.grid.nx; ++i) xs[i] = f.x_abs(i);
  }

  void prepare(const Field1D& f, const SolverConfig& cfg) {
    const int n = f.grid.nx;
    theta = theta_of(cfg.scheme);
    r = cfg.dt / (f.grid.dx() * f.grid.dx());
    rebuild_coords(f);
    rhs.resize(n);
    scratch.resize(n);
    if (theta > 0.0) {
      const double diag = 1.0 + 2.0 * r * theta, off = -r * theta;
      if (cfg.boundary == Boundary::clamp_to_levels) {
        const int m = n - 2;
        interior = linalg::TridiagFactor(std::vector<double>(m, off),
                                         std::vector<double>(m, diag),
                                         std::vector<double>(m, off));
      } else if (cfg.boundary == Boundary::zero_flux) {
        std::vector<double> a(n, off), b(n, diag), c(n, off);
        c[0] = 2.0 * off;
        a[n - 1] = 2.0 * off;
        full = linalg::TridiagFactor(std::move(a), std::move(b), std::move(c));
      } else {
        wrap = linalg::CyclicFactor(n, diag, off);
      }
    }
  }
};

void check_divergence(const std::vector<double>& u, const Reaction& r) {
  const double lo = r.min_level() - 1.0, hi = r.max_level() + 1.0;
  for (double v : u)
    if (!(v >= lo && v <= hi))
      throw NumericError("solver diverged: state left the invariant slab");
}

void step_impl(Field1D& f, const Reaction& r, const SolverConfig& cfg,
               Workspace1D& ws) {
  const int n = f.grid.nx;
  std::vector<double>& u = f.u;
  std::vector<double>& d = ws.rhs;
  const double rr = ws.r, th = ws.theta, dt = cfg.dt;

  auto lap = [&](int i) -> double {
    if (i == 0) {
      if (cfg.boundary == Boundary::zero_flux) return 2.0 * (u[1] - u[0]);
      if (cfg.boundary == Boundary::periodic) return u[n - 1] - 2.0 * u[0] + u[1];
      return 0.0;
    }
    if (i == n - 1) {
      if (cfg.boundary == Boundary::zero_flux) return 2.0 * (u[n - 2] - u[n - 1]);
      if (cfg.boundary == Boundary::periodic) return u[n - 2] - 2.0 * u[n - 1] + u[0];
      return 0.0;
    }
    return u[i - 1] - 2.0 * u[i] + u[i + 1];
  };

  if (cfg.scheme == Scheme::explicit_euler) {
    for (int i = 0; i < n; ++i)
      d[i] = u[i] + rr * lap(i) + dt * r.value(&ws.xs[i], u[i]);
    if (cfg.boundary == Boundary::clamp_to_levels) {
      d[0] = u[0];
      d[n - 1] = u[n - 1];
    }
    u.swap(d);
    check_divergence(u, r);
    return;
  }

  if (cfg.boundary == Boundary::clamp_to_levels) {
    // Interior unknowns only; clamp values enter the first/last rows.
    for (int i = 1; i < n - 1; ++i)
      d[i] = u[i] + rr * (1.0 - th) * lap(i) + dt * r.value(&ws.xs[i], u[i]);
    d[1] += rr * th * u[0];
    d[n - 2] += rr * th * u[n - 1];
    std::vector<double>& sol = ws.scratch;
    sol.assign(d.begin() + 1, d.begin() + (n - 1));
    ws.interior.solve(sol);
    for (int i = 1; i < n - 1; ++i) u[i] = sol[i - 1];
  } else {
    for (int i = 0; i < n; ++i)
      d[i] = u[i] + rr * (1.0 - th) * lap(i) + dt * r.value(&ws.xs[i], u[i]);
    if (cfg.boundary == Boundary::zero_flux) {
      ws.full.solve(d);
    } else {
      ws.wrap.solve(d);
    }
    u.swap(d);
  }
  check_divergence(u, r);
}

}  // namespace

void step(Field1D& field, const Reaction& r, const SolverConfig& cfg) {
  cfg.validate();
  field.grid.validate();
  if (cfg.scheme == Scheme::explicit_euler &&
      cfg.dt > field.grid.dx() * field.grid.dx() / 2.0 + 1e-15)
    throw ConfigError("explicit scheme violates dt <= dx^2/2");
  Workspace1D ws;
  ws.prepare(field, cfg);
  step_impl(field, r, cfg, ws);
}

namespace {

struct Recorder {
  const SolverConfig* cfg;
  const Reaction* r;
  Trajectory traj;
  double halfband;

  void init(const Reaction& reaction, const SolverConfig& c) {
    cfg = &c;
    r = &reaction;
    traj.track_levels = c.track_levels;
    traj.plateau_levels = c.plateau_levels;
    halfband = c.plateau_halfband > 0.0 ? c.plateau_halfband : reaction.delta0() / 2.0;
  }

  void record_1d(double t, const Field1D& f) {
    TrajectoryRecord rec;
    rec.t = t;
    rec.shift = f.shift;
    for (double lev : traj.track_levels) {
      auto c = first_crossing(f.u, f.grid, lev);
      rec.front_pos.push_back(c ? *c + f.shift : quiet_nan());
    }
    for (double q : traj.plateau_levels) {
      int count = 0;
      for (double v : f.u)
        if (std::fabs(v - q) < halfband) ++count;
      rec.plateau_w.push_back(count * f.grid.dx());
    }
    traj.records.push_back(std::move(rec));
  }

  void check_contamination_1d(const Field1D& f) {
    if (!cfg->check_contamination || cfg->boundary != Boundary::clamp_to_levels) return;
    const int n = f.grid.nx;
    if (std::fabs(f.u[1] - f.u[0]) > 1e-6 || std::fabs(f.u[n - 2] - f.u[n - 1]) > 1e-6)
      throw NumericError("boundary contamination: front reached the domain edge");
  }
};

double snap_to_level(const Reaction& r, double v) {
  for (double p : r.levels())
    if (std::fabs(v - p) < 1e-6) return p;
  return v;
}

}  // namespace

EvolveResult evolve(const Field1D& initial, const Reaction& r, const SolverConfig& cfg) {
  cfg.validate();
  initial.grid.validate();
  if (r.dim() != 1) throw ConfigError("evolve: reaction must be one-dimensional");
  if (cfg.scheme == Scheme::explicit_euler &&
      cfg.dt > initial.grid.dx() * initial.grid.dx() / 2.0 + 1e-15)
    throw ConfigError("explicit scheme violates dt <= dx^2/2");

  Field1D f = initial;
  const double L = r.period()[0];
  const double dx = f.grid.dx();
  long nodes_per_period = 0;
  if (cfg.moving_window) {
    const double npp = L / dx;
    if (!nearly_integer(npp, 1e-9))
      throw ConfigError("moving window requires the period to be a whole number of cells");
    nodes_per_period = std::lround(npp);
  }
  const double window_level = cfg.window_level > r.min_level()
                                  ? cfg.window_level
                                  : 0.5 * (r.min_level() + r.max_level());

  Workspace1D ws;
  ws.prepare(f, cfg);
  Recorder rec;
  rec.init(r, cfg);

  const long nsteps = std::lround(cfg.t_end / cfg.dt);
  const long record_steps = std::max(1L, std::lround(cfg.record_every / cfg.dt));
  const long snap_steps =
      cfg.snapshot_every > 0.0 ? std::max(1L, std::lround(cfg.snapshot_every / cfg.dt)) : 0;

  auto snapshot = [&](double t) {
    SnapshotRecord s;
    s.t = t;
    s.x0_abs = f.x_abs(0);
    s.dx = dx;
    s.u = f.u;
    rec.traj.snapshots.push_back(std::move(s));
  };

  auto maybe_recenter = [&]() {
    if (!cfg.moving_window) return;
    auto pos = first_crossing(f.u, f.grid, window_level);
    if (!pos) return;
    const double center = 0.5 * (f.grid.x_min + f.grid.x_max);
    const double drift = *pos - center;
    if (std::fabs(drift) <= cfg.recenter_threshold) return;
    const long k = std::lround(drift / L);
    if (k == 0) return;
    const long s = k * nodes_per_period;
    const int n = f.grid.nx;
    if (std::labs(s) >= n) throw NumericError("moving window: shift exceeds the domain");
    if (s > 0) {
      const double fill = snap_to_level(r, f.u[n - 1]);
      for (int i = 0; i + s < n; ++i) f.u[i] = f.u[i + s];
      for (int i = n - static_cast<int>(s); i < n; ++i) f.u[i] = fill;
    } else {
      const double fill = snap_to_level(r, f.u[0]);
      for (int i = n - 1; i + s >= 0; --i) f.u[i] = f.u[i + s];
      for (int i = 0; i < -s; ++i) f.u[i] = fill;
    }
    f.u[0] = snap_to_level(r, f.u[0]);
    f.u[f.grid.nx - 1] = snap_to_level(r, f.u[f.grid.nx - 1]);
    f.shift += k * L;
    rec.traj.recenter_events++;
    ws.rebuild_coords(f);
  };

  rec.record_1d(0.0, f);
  if (snap_steps > 0 && cfg.snapshot_from <= 0.0) snapshot(0.0);

  for (long n = 1; n <= nsteps; ++n) {
    step_impl(f, r, cfg, ws);
    const double t = n * cfg.dt;
    const bool at_record = (n % record_steps == 0) || n == nsteps;
    if (at_record) {
      rec.check_contamination_1d(f);
      rec.record_1d(t, f);
      maybe_recenter();
    }
    if (snap_steps > 0 && n % snap_steps == 0 && t >= cfg.snapshot_from - 1e-12)
      snapshot(t);
  }

  EvolveResult out;
  out.trajectory = std::move(rec.traj);
  out.final_field = std::move(f);
  return out;
}

// ---------------------------------------------------------------------------
// 2-D rotated frame
// ---------------------------------------------------------------------------

Field2D front_initial_2d(const Grid2D& grid, double upper, double lower, double xi0) {
  grid.validate();
  if (!(upper > lower)) throw ConfigError("front_initial_2d: upper must exceed lower");
  Field2D f;
  f.grid = grid;
  f.u.resize(static_cast<size_t>(grid.n_xi) * grid.n_eta);
  for (int i = 0; i < grid.n_xi; ++i) {
    const double v = lower + (upper - lower) * kink(grid.xi(i) - xi0);
    for (int j = 0; j < grid.n_eta; ++j) f.at(i, j) = v;
  }
  return f;
}

namespace {

struct Workspace2D {
  std::vector<double> coords;  // 2 per node
  std::vector<double> v;       // reaction stage
  std::vector<double> col, row;
  std::vector<double> mean;    // transverse-mean profile
  linalg::TridiagFactor xi_fac;
  linalg::CyclicFactor eta_fac;
  double theta = 0.5;

  void rebuild_coords(const Field2D& f) {
    const Grid2D& g = f.grid;
    coords.resize(static_cast<size_t>(g.n_xi) * g.n_eta * 2);
    for (int i = 0; i < g.n_xi; ++i)
      for (int j = 0; j < g.n_eta; ++j) {
        double* xy = &coords[(static_cast<size_t>(i) * g.n_eta + j) * 2];
        const double s = g.xi(i) + f.shift, t = g.eta(j);
        xy[0] = s * g.dir[0] - t * g.dir[1];
        xy[1] = s * g.dir[1] + t * g.dir[0];
      }
  }

  void prepare(const Field2D& f, const SolverConfig& cfg) {
    const Grid2D& g = f.grid;
    theta = theta_of(cfg.scheme);
    rebuild_coords(f);
    v.resize(f.u.size());
    col.resize(g.n_xi);
    row.resize(g.n_eta);
    mean.resize(g.n_xi);
    const double half = (cfg.scheme == Scheme::cn_imex) ? 0.5 : 1.0;
    const double rxi = half * cfg.dt / (g.dxi() * g.dxi());
    const double reta = half * cfg.dt / (g.deta() * g.deta());
    const int m = g.n_xi - 2;
    xi_fac = linalg::TridiagFactor(std::vector<double>(m, -rxi),
                                   std::vector<double>(m, 1.0 + 2.0 * rxi),
                                   std::vector<double>(m, -rxi));
    eta_fac = linalg::CyclicFactor(g.n_eta, 1.0 + 2.0 * reta, -reta);
  }

  void transverse_mean(const Field2D& f) {
    const Grid2D& g = f.grid;
    for (int i = 0; i < g.n_xi; ++i) {
      double s = 0.0;
      for (int j = 0; j < g.n_eta; ++j) s += f.at(i, j);
      mean[i] = s / g.n_eta;
    }
  }
};

// Stabilizing-correction splitting in increment form: the update solves
//   (I - th dt Dxi)(I - th dt Deta) du = dt (Lap u + f(x,u)),
// so fixed points satisfy the discrete steady equation exactly. On
// transverse-uniform data this reduces to the 1-D IMEX step.
void step_impl_2d(Field2D& f, const Reaction& r, const SolverConfig& cfg,
                  Workspace2D& ws) {
  const Grid2D& g = f.grid;
  const int nxi = g.n_xi, neta = g.n_eta;
  const double dt = cfg.dt;
  const double ixi = 1.0 / (g.dxi() * g.dxi());
  const double ieta = 1.0 / (g.deta() * g.deta());

  // full explicit right-hand side dt * (Lap u + f)
  for (int i = 1; i < nxi - 1; ++i) {
    for (int j = 0; j < neta; ++j) {
      const int jm = (j + neta - 1) % neta, jp = (j + 1) % neta;
      const size_t k = static_cast<size_t>(i) * neta + j;
      const double lap = ixi * (f.at(i - 1, j) - 2.0 * f.at(i, j) + f.at(i + 1, j)) +
                         ieta * (f.at(i, jm) - 2.0 * f.at(i, j) + f.at(i, jp));
      ws.v[k] = dt * (lap + r.value(&ws.coords[2 * k], f.u[k]));
    }
  }

  // xi sweep over increments (clamped boundaries carry zero increment)
  for (int j = 0; j < neta; ++j) {
    std::vector<double>& sol = ws.col;
    sol.resize(nxi - 2);
    for (int i = 1; i < nxi - 1; ++i) sol[i - 1] = ws.v[static_cast<size_t>(i) * neta + j];
    ws.xi_fac.solve(sol);
    for (int i = 1; i < nxi - 1; ++i) ws.v[static_cast<size_t>(i) * neta + j] = sol[i - 1];
  }

  // eta sweep (cyclic), then apply the increment
  for (int i = 1; i < nxi - 1; ++i) {
    for (int j = 0; j < neta; ++j) ws.row[j] = ws.v[static_cast<size_t>(i) * neta + j];
    ws.eta_fac.solve(ws.row);
    for (int j = 0; j < neta; ++j) f.at(i, j) += ws.row[j];
  }

  check_divergence(f.u, r);
}

}  // namespace

void step_2d(Field2D& field, const Reaction& r, const SolverConfig& cfg) {
  cfg.validate();
  field.grid.validate();
  if (cfg.boundary != Boundary::clamp_to_levels)
    throw ConfigError("step_2d: only clamp-to-levels boundaries are supported");
  if (cfg.scheme == Scheme::explicit_euler)
    throw ConfigError("step_2d: explicit scheme not supported in 2-D");
  Workspace2D ws;
  ws.prepare(field, cfg);
  step_impl_2d(field, r, cfg, ws);
}

double frame_longitudinal_period(const Reaction& r, const double* dir) {
  std::vector<double> ratios;
  for (int i = 0; i < r.dim(); ++i)
    if (std::fabs(dir[i]) > 1e-12) ratios.push_back(r.period()[i] / std::fabs(dir[i]));
  const double q = linalg::real_lcm(ratios, 1e-9, 1000000L);
  if (q <= 0.0) throw ConfigError("rotated frame: no longitudinal period found");
  return q;
}

double frame_transverse_period(const Reaction& r, const double* dir) {
  if (r.dim() != 2) throw ConfigError("rotated frame: transverse period needs dim 2");
  const double perp[2] = {-dir[1], dir[0]};
  return frame_longitudinal_period(r, perp);
}

EvolveResult2D evolve_2d(const Field2D& initial, const Reaction& r,
                         const SolverConfig& cfg, double xi_period) {
  cfg.validate();
  initial.grid.validate();
  if (r.dim() != 2) throw ConfigError("evolve_2d: reaction must be two-dimensional");
  if (cfg.boundary != Boundary::clamp_to_levels)
    throw ConfigError("evolve_2d: only clamp-to-levels boundaries are supported");
  if (cfg.scheme == Scheme::explicit_euler)
    throw ConfigError("evolve_2d: explicit scheme not supported");

  Field2D f = initial;
  const Grid2D& g = f.grid;

  // the rotated frame must tile the reaction lattice
  const double p_trans = frame_transverse_period(r, g.dir);
  if (!nearly_integer(g.transverse_period / p_trans, 1e-9))
    throw ConfigError("evolve_2d: transverse period is not a period of the reaction");

  long nodes_per_period = 0;
  if (cfg.moving_window) {
    const double npp = xi_period / g.dxi();
    if (!nearly_integer(npp, 1e-9))
      throw ConfigError("moving window requires the xi period to be a whole number of cells");
    nodes_per_period = std::lround(npp);
  }
  const double window_level = cfg.window_level > r.min_level()
                                  ? cfg.window_level
                                  : 0.5 * (r.min_level() + r.max_level());

  Workspace2D ws;
  ws.prepare(f, cfg);
  Recorder rec;
  rec.init(r, cfg);

  Grid1D mean_grid{g.xi_min, g.xi_max, g.n_xi};

  auto record = [&](double t) {
    ws.transverse_mean(f);
    TrajectoryRecord out;
    out.t = t;
    out.shift = f.shift;
    for (double lev : rec.traj.track_levels) {
      auto c = first_crossing(ws.mean, mean_grid, lev);
      out.front_pos.push_back(c ? *c + f.shift : quiet_nan());
    }
    for (double q : rec.traj.plateau_levels) {
      int count = 0;
      for (int i = 0; i < g.n_xi; ++i)
        if (std::fabs(ws.mean[i] - q) < rec.halfband) ++count;
      out.plateau_w.push_back(count * g.dxi());
    }
    if (cfg.check_contamination) {
      if (std::fabs(ws.mean[1] - ws.mean[0]) > 1e-6 ||
          std::fabs(ws.mean[g.n_xi - 2] - ws.mean[g.n_xi - 1]) > 1e-6)
        throw NumericError("boundary contamination: front reached the domain edge");
    }
    rec.traj.records.push_back(std::move(out));
  };

  auto maybe_recenter = [&]() {
    if (!cfg.moving_window) return;
    ws.transverse_mean(f);
    auto pos = first_crossing(ws.mean, mean_grid, window_level);
    if (!pos) return;
    const double center = 0.5 * (g.xi_min + g.xi_max);
    const double drift = *pos - center;
    if (std::fabs(drift) <= cfg.recenter_threshold) return;
    const long k = std::lround(drift / xi_period);
    if (k == 0) return;
    const long s = k * nodes_per_period;
    if (std::labs(s) >= g.n_xi) throw NumericError("moving window: shift exceeds the domain");
    const int nxi = g.n_xi, neta = g.n_eta;
    std::vector<double> fill(neta);
    if (s > 0) {
      for (int j = 0; j < neta; ++j) fill[j] = f.at(nxi - 1, j);
      for (int i = 0; i + s < nxi; ++i)
        for (int j = 0; j < neta; ++j) f.at(i, j) = f.at(i + static_cast<int>(s), j);
      for (int i = nxi - static_cast<int>(s); i < nxi; ++i)
        for (int j = 0; j < neta; ++j) f.at(i, j) = fill[j];
    } else {
      for (int j = 0; j < neta; ++j) fill[j] = f.at(0, j);
      for (int i = nxi - 1; i + s >= 0; --i)
        for (int j = 0; j < neta; ++j) f.at(i, j) = f.at(i + static_cast<int>(s), j);
      for (int i = 0; i < -s; ++i)
        for (int j = 0; j < neta; ++j) f.at(i, j) = fill[j];
    }
    f.shift += k * xi_period;
    rec.traj.recenter_events++;
    ws.rebuild_coords(f);
  };

  const long nsteps = std::lround(cfg.t_end / cfg.dt);
  const long record_steps = std::max(1L, std::lround(cfg.record_every / cfg.dt));

  record(0.0);
  for (long n = 1; n <= nsteps; ++n) {
    step_impl_2d(f, r, cfg, ws);
    const double t = n * cfg.dt;
    if (n % record_steps == 0 || n == nsteps) {
      record(t);
      maybe_recenter();
    }
  }

  EvolveResult2D out;
  out.trajectory = std::move(rec.traj);
  out.final_field = std::move(f);
  return out;
}

}  // namespace pulselab

#include "pulselab/design.hpp"

#include <algorithm>
#include <cmath>

#include "pulselab/common.hpp"

namespace pulselab {

MeasureProfile MeasureProfile::scaled(double nu) const {
  MeasureProfile p = *this;
  p.dx /= nu;
  p.dt /= nu * nu;
  p.t_end /= nu * nu;
  p.half_width /= nu;
  p.record_every /= nu * nu;
  p.recenter_threshold /= nu;
  p.t_end_2d /= nu * nu;
  p.half_width_2d /= nu;
  p.deta_target /= nu;
  return p;
}

namespace {

SolverConfig solver_config(const MeasureProfile& prof, double level) {
  SolverConfig cfg;
  cfg.dt = prof.dt;
  cfg.t_end = prof.t_end;
  cfg.scheme = prof.scheme;
  cfg.record_every = prof.record_every;
  cfg.moving_window = prof.moving_window;
  cfg.recenter_threshold = prof.recenter_threshold;
  cfg.track_levels = {level};
  cfg.window_level = level;
  return cfg;
}

Grid1D measurement_grid(const MeasureProfile& prof) {
  const int nx = static_cast<int>(std::lround(2.0 * prof.half_width / prof.dx)) + 1;
  return Grid1D{-prof.half_width, prof.half_width, nx};
}

}  // namespace

std::pair<Field1D, SpeedEstimate> converged_profile(const ReactionPtr& r,
                                                    Orientation orientation,
                                                    const MeasureProfile& prof) {
  if (r->dim() != 1) throw ConfigError("measure_speed: reaction must be 1-D");
  ReactionPtr rr = orientation == Orientation::right_moving ? r : reflect_space(r);
  const double level = 0.5 * (r->min_level() + r->max_level());
  Grid1D g = measurement_grid(prof);
  Field1D init = front_initial(g, Orientation::right_moving, r->max_level(), r->min_level());
  auto res = evolve(init, *rr, solver_config(prof, level));
  auto est = estimate_speed(res.trajectory, level, r->period()[0], prof.discard_fraction);
  return {std::move(res.final_field), est};
}

SpeedEstimate measure_speed(const ReactionPtr& r, Orientation orientation,
                            const MeasureProfile& prof) {
  return converged_profile(r, orientation, prof).second;
}

SpeedEstimate measure_speed_dir(const ReactionPtr& r, const std::vector<double>& dir,
                                const MeasureProfile& prof) {
  if (static_cast<int>(dir.size()) != r->dim())
    throw ConfigError("measure_speed_dir: direction dimension mismatch");
  if (r->dim() == 1)
    return measure_speed(
        r, dir[0] > 0 ? Orientation::right_moving : Orientation::left_moving, prof);
  if (r->dim() != 2) throw ConfigError("measure_speed_dir: only dim 1 and 2");

  Grid2D g;
  g.dir[0] = dir[0];
  g.dir[1] = dir[1];
  g.xi_min = -prof.half_width_2d;
  g.xi_max = prof.half_width_2d;
  g.n_xi = static_cast<int>(std::lround(2.0 * prof.half_width_2d / prof.dx)) + 1;
  g.transverse_period = frame_transverse_period(*r, g.dir);
  g.n_eta = std::max(8, static_cast<int>(std::lround(g.transverse_period / prof.deta_target)));
  const double xi_period = frame_longitudinal_period(*r, g.dir);

  const double level = 0.5 * (r->min_level() + r->max_level());
  SolverConfig cfg = solver_config(prof, level);
  cfg.t_end = prof.t_end_2d;
  auto res = evolve_2d(front_initial_2d(g, r->max_level(), r->min_level()), *r, cfg,
                       xi_period);
  return estimate_speed(res.trajectory, level, xi_period, prof.discard_fraction);
}

SpeedPairResult speed_pair(const ReactionPtr& r, const MeasureProfile& prof) {
  SpeedPairResult out;
  out.right = measure_speed(r, Orientation::right_moving, prof);
  out.left = measure_speed(r, Orientation::left_moving, prof);
  const bool left_pos = out.left.cls == SpeedClass::positive;
  const bool left_neg = out.left.cls == SpeedClass::negative;
  const bool right_pos = out.right.cls == SpeedClass::positive;
  const bool right_neg = out.right.cls == SpeedClass::negative;
  if ((left_pos && right_neg) || (left_neg && right_pos))
    throw NumericError("speed_pair: classifications carry opposite strict signs");
  return out;
}

std::vector<SpeedMapRow> speed_map_1d(const std::vector<double>& taus, double sigma,
                                      const MeasureProfile& prof, int jobs) {
  std::vector<SpeedMapRow> rows(taus.size());
  parallel_for_indexed(static_cast<int>(taus.size()), jobs, [&](int i) {
    auto r = make_family_1d(taus[i], sigma);
    auto pr = speed_pair(r, prof);
    rows[i] = SpeedMapRow{taus[i], pr.left, pr.right};
  });
  return rows;
}

bool speed_map_monotone(const std::vector<SpeedMapRow>& rows) {
  for (size_t i = 0; i + 1 < rows.size(); ++i) {
    const auto& a = rows[i];
    const auto& b = rows[i + 1];
    if (b.left.c < a.left.c - 3.0 * (a.left.stderr_c + b.left.stderr_c)) return false;
    if (b.right.c < a.right.c - 3.0 * (a.right.stderr_c + b.right.stderr_c)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// one-dimensional design: ratio bisection + rescaling
// ---------------------------------------------------------------------------

DesignResult design_1d(double c_left_target, double c_right_target, double sigma,
                       const MeasureProfile& prof) {
  if ((c_left_target > 0 && c_right_target < 0) ||
      (c_left_target < 0 && c_right_target > 0))
    throw ConfigError(
        "design_1d: leftward and rightward speeds must share a sign "
        "(the integral of f fixes both)");

  DesignResult out;
  out.targets = {c_left_target, c_right_target};
  out.reflected = (c_left_target < 0.0 || c_right_target < 0.0);
  double cl = std::fabs(c_left_target), cr = std::fabs(c_right_target);

  if (cl == 0.0 && cr == 0.0) {
    out.reaction = make_cubic(1);
    out.nu = 1.0;
    auto pr = speed_pair(out.reaction, prof);
    out.achieved = {pr.left.c, pr.right.c};
    out.achieved_estimates = {pr.left, pr.right};
    return out;
  }

  const bool swapped = cr > cl;
  if (swapped) std::swap(cl, cr);
  const double gamma = cr / cl;  // in [0, 1]

  MeasureProfile light = prof;
  light.t_end = std::min(prof.t_end, 120.0);

  int iter = 0;
  auto eval = [&](double tau) {
    auto pr = speed_pair(make_family_1d(tau, sigma), light);
    DesignIteration it;
    it.iter = iter++;
    it.tau = {tau};
    it.c_left = pr.left.c;
    it.c_right = pr.right.c;
    const double ratio = pr.right.c / pr.left.c;
    it.residual = std::fabs(ratio - gamma);
    out.log.push_back(it);
    return pr;
  };

  double tau_star;
  double c_tau_l;
  const double ratio_tol = 0.015;
  if (gamma < 1e-12) {
    tau_star = 0.0;  // blocked rightward branch
    auto pr = eval(tau_star);
    c_tau_l = pr.left.c;
  } else if (gamma > 1.0 - 1e-12) {
    tau_star = 1.0;  // symmetric branch
    auto pr = eval(tau_star);
    c_tau_l = pr.left.c;
  } else {
    double lo = 0.0, hi = 1.0;
    double ratio_lo = 0.0, ratio_hi = 1.0;
    tau_star = -1.0;
    c_tau_l = 0.0;
    for (int k = 0; k < 14; ++k) {
      const double mid = 0.5 * (lo + hi);
      auto pr = eval(mid);
      const double ratio = pr.right.c / pr.left.c;
      if (std::fabs(ratio - gamma) <= ratio_tol) {
        tau_star = mid;
        c_tau_l = pr.left.c;
        break;
      }
      if (ratio < ratio_lo - 0.01 || ratio > ratio_hi + 0.01) {
        // monotonicity of the ratio failed: fall back to a refinement scan
        tau_star = -1.0;
        break;
      }
      if (ratio < gamma) {
        lo = mid;
        ratio_lo = ratio;
      } else {
        hi = mid;
        ratio_hi = ratio;
      }
      if (hi - lo < 1e-4)
        throw NumericError("design_1d: ratio bracket collapsed before reaching tolerance");
    }
    if (tau_star < 0.0) {
      double best = 1e300;
      for (int k = 0; k <= 20; ++k) {
        const double tau = k / 20.0;
        auto pr = eval(tau);
        const double ratio = tau == 0.0 ? 0.0 : pr.right.c / pr.left.c;
        if (std::fabs(ratio - gamma) < best) {
          best = std::fabs(ratio - gamma);
          tau_star = tau;
          c_tau_l = pr.left.c;
        }
      }
      if (best > 0.05)
        throw NumericError("design_1d: refinement scan could not match the speed ratio");
    }
  }

  const double nu = cl / c_tau_l;
  out.tau = {tau_star};
  out.nu = nu;
  ReactionPtr r = make_rescaled(make_family_1d(tau_star, sigma), nu);
  if (swapped) r = reflect_space(r);
  if (out.reflected) r = reflect_state(reflect_space(r));
  out.reaction = r;

  auto pr = speed_pair(out.reaction, prof.scaled(nu));
  out.achieved = {pr.left.c, pr.right.c};
  out.achieved_estimates = {pr.left, pr.right};
  return out;
}

// ---------------------------------------------------------------------------
// multi-direction design: cyclic per-coordinate bisection
// ---------------------------------------------------------------------------

namespace {

ReactionPtr multidir_reaction(const std::vector<double>& tau, const MultiDirSpec& spec,
                              const std::vector<double>& periods) {
  return make_family_multidir(tau, spec.sigma, spec.dirs, periods, spec.period_vector,
                              spec.delta0);
}

}  // namespace

DesignResult design_multidir(const std::vector<double>& targets, const MultiDirSpec& spec,
                             const MeasureProfile& prof, bool allow_rescale, int jobs) {
  const int n = static_cast<int>(spec.dirs.size());
  if (n < 2) throw ConfigError("design_multidir: need at least two directions");
  if (static_cast<int>(targets.size()) != n)
    throw ConfigError("design_multidir: one target per direction required");

  bool any_pos = false, any_neg = false;
  for (double c : targets) {
    any_pos |= c > 0;
    any_neg |= c < 0;
  }
  if (any_pos && any_neg)
    throw ConfigError("design_multidir: targets must share a sign");

  DesignResult out;
  out.targets = targets;
  out.reflected = any_neg;
  std::vector<double> want(targets);
  for (double& c : want) c = std::fabs(c);

  // membership quanta
  std::vector<double> periods = spec.periods;
  if (periods.empty()) {
    for (const auto& d : spec.dirs) {
      auto m = membership_SL(d, spec.period_vector);
      if (!m) throw ConfigError("design_multidir: direction outside S_L");
      periods.push_back(*m);
    }
  }

  int iter = 0;
  auto log_point = [&](const std::vector<double>& tau, int j, double c, double resid) {
    DesignIteration it;
    it.iter = iter++;
    it.tau = tau;
    if (n == 2) {
      // 1-D left/right layout for readability of the iteration log
      it.c_right = j == 0 ? c : quiet_nan();
      it.c_left = j == 1 ? c : quiet_nan();
    } else {
      it.c_right = c;
      it.c_left = quiet_nan();
    }
    it.residual = resid;
    out.log.push_back(it);
  };

  auto measure_j = [&](const std::vector<double>& tau, int j) {
    auto r = multidir_reaction(tau, spec, periods);
    return measure_speed_dir(r, spec.dirs[j], prof);
  };

  // empirical eta*: the guaranteed box is [0, min_j c_j(e_j)]^N
  std::vector<double> corner(n);
  parallel_for_indexed(n, jobs, [&](int j) {
    std::vector<double> tau(n, 0.0);
    tau[j] = 1.0;
    corner[j] = measure_j(tau, j).c;
  });
  double eta_star = *std::min_element(corner.begin(), corner.end());
  if (!(eta_star > 0)) throw NumericError("design_multidir: empty reachable box");

  const double cmax = *std::max_element(want.begin(), want.end());
  double nu = 1.0;
  std::vector<double> scaled(want);
  if (cmax > 0) {
    const double eta_safe = 0.9 * eta_star;  // stay inside the certified box
    if (allow_rescale) {
      for (double& c : scaled) c *= eta_safe / cmax;
      nu = cmax / eta_safe;
    } else if (cmax > eta_safe) {
      throw ConfigError("design_multidir: targets exceed the reachable box at nu = 1");
    }
  }

  std::vector<double> tau(n, 0.0);
  for (int j = 0; j < n; ++j)
    if (scaled[j] > 0) tau[j] = 0.5;

  const double rel_tol = 0.05;
  auto coord_tol = [&](int j) { return std::max(0.03 * scaled[j], 0.004 * eta_star); };

  // one cycle of per-coordinate tuning; the other coordinates shift the
  // curve between sweeps, so each sweep re-tunes against fresh measurements
  auto tune_coordinate = [&](int j, bool first_sweep) {
    double lo = 0.0, hi = 1.0;
    double t_prev = quiet_nan(), c_prev = quiet_nan();
    double t_cur = first_sweep ? 0.5 : tau[j];
    const int budget = first_sweep ? 8 : 5;
    for (int k = 0; k < budget; ++k) {
      tau[j] = t_cur;
      const double c = measure_j(tau, j).c;
      log_point(tau, j, c, c - scaled[j]);
      if (std::fabs(c - scaled[j]) <= coord_tol(j)) return;
      (c < scaled[j] ? lo : hi) = t_cur;
      double t_next;
      if (!std::isnan(t_prev) && std::fabs(c - c_prev) > 1e-12) {
        // secant step, kept inside the bisection bracket
        t_next = t_cur + (scaled[j] - c) * (t_cur - t_prev) / (c - c_prev);
        if (!(t_next > lo && t_next < hi)) t_next = 0.5 * (lo + hi);
      } else {
        t_next = 0.5 * (lo + hi);
      }
      t_prev = t_cur;
      c_prev = c;
      t_cur = t_next;
    }
    tau[j] = t_cur;
  };

  std::vector<SpeedEstimate> joint(n);
  double prev_worst = 1e300;
  int stalled = 0;
  const int max_sweeps = 6;
  bool converged = false;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    for (int j = 0; j < n; ++j) {
      if (scaled[j] <= 0.0) {
        tau[j] = 0.0;  // c*(zeta_j) = 0 exactly on the face tau_j = 0
        continue;
      }
      tune_coordinate(j, sweep == 0);
    }
    // joint residual at the final tau of this sweep
    parallel_for_indexed(n, jobs, [&](int j) { joint[j] = measure_j(tau, j); });
    double worst = 0.0;
    for (int j = 0; j < n; ++j)
      if (scaled[j] > 0)
        worst = std::max(worst, std::fabs(joint[j].c - scaled[j]) / scaled[j]);
    converged = worst <= rel_tol;
    if (!converged) {
      auto residual_vector = [&] {
        std::string s;
        for (int j = 0; j < n; ++j)
          s += " " + std::to_string(joint[j].c - scaled[j]);
        return s;
      };
      if (worst >= prev_worst - 1e-3) {
        if (++stalled >= 3)
          throw NumericError("design_multidir: cyclic sweeps stalled; residuals:" +
                             residual_vector());
      } else {
        stalled = 0;
      }
      prev_worst = worst;
      if (sweep == max_sweeps - 1)
        throw NumericError("design_multidir: sweep budget exhausted; residuals:" +
                           residual_vector());
    }
  }

  out.tau = tau;
  out.nu = nu;
  ReactionPtr r = multidir_reaction(tau, spec, periods);
  if (nu != 1.0) r = make_rescaled(r, nu);
  if (out.reflected) r = reflect_state(reflect_space(r));
  out.reaction = r;
  for (int j = 0; j < n; ++j) {
    SpeedEstimate e = joint[j];
    e.c *= nu;
    e.stderr_c *= nu;
    if (out.reflected) {
      e.c = -e.c;
      if (e.cls == SpeedClass::positive) e.cls = SpeedClass::negative;
      else if (e.cls == SpeedClass::negative) e.cls = SpeedClass::positive;
    }
    out.achieved.push_back(e.c);
    out.achieved_estimates.push_back(e);
  }
  return out;
}

// ---------------------------------------------------------------------------
// terrace scenarios
// ---------------------------------------------------------------------------

TerraceScenario terrace_scenario(TerraceVariant variant, int n_fronts, double sigma,
                                 const MeasureProfile& prof, int jobs) {
  TerraceScenario sc;
  sc.variant = variant;
  int levels_count;  // I, the number of stacked components
  switch (variant) {
    case TerraceVariant::shared_platforms:
      if (n_fronts < 1) throw ConfigError("terrace: need at least one front");
      levels_count = n_fronts;
      break;
    case TerraceVariant::disjoint_platforms:
      if (n_fronts != 2)
        throw ConfigError("terrace: the disjoint-platform variant is built for N = 2");
      levels_count = 3;
      break;
    case TerraceVariant::single_front:
      if (n_fronts < 1 || n_fronts > 3)
        throw ConfigError("terrace: the single-front variant supports N <= 3");
      levels_count = n_fronts;
      break;
    default:
      throw ConfigError("terrace: unknown variant");
  }
  const int I = levels_count;

  // per-level speed fractions, top front (k = 1) first
  std::vector<double> fr_R(I), fr_L(I);
  switch (variant) {
    case TerraceVariant::shared_platforms:
      for (int k = 0; k < I; ++k) {
        fr_R[k] = I == 1 ? 1.0 : 0.3 + 0.7 * k / (I - 1);
        fr_L[k] = 0.6 * fr_R[k];
      }
      break;
    case TerraceVariant::disjoint_platforms:
      fr_R = {0.5, 1.0 / 6.0, 1.0};
      fr_L = {1.0 / 6.0, 1.0, 0.5};
      break;
    case TerraceVariant::single_front:
      for (int k = 0; k < I; ++k)
        fr_R[k] = I == 1 ? 1.0 : 1.0 - (5.0 / 6.0) * k / (I - 1);
      for (int k = 0; k < I; ++k) fr_L[k] = fr_R[I - 1 - k];
      break;
  }

  MultiDirSpec spec;
  spec.dirs = {{1.0}, {-1.0}};
  spec.period_vector = {1.0};
  spec.periods = {1.0, 1.0};
  spec.sigma = sigma;

  // the ordering tolerances are generous, so the per-level designs run on a
  // shorter window than the final terrace verification will
  MeasureProfile light = prof;
  light.t_end = std::min(prof.t_end, 100.0);
  light.half_width = std::min(prof.half_width, 45.0);

  // one shared eta* measurement fixes the reachable box for every level
  std::vector<double> corner(2);
  parallel_for_indexed(2, jobs, [&](int j) {
    std::vector<double> tau(2, 0.0);
    tau[j] = 1.0;
    auto r = make_family_multidir(tau, sigma, spec.dirs, spec.periods,
                                  spec.period_vector, spec.delta0);
    corner[j] = measure_speed_dir(r, spec.dirs[j], light).c;
  });
  sc.eta_star = std::min(corner[0], corner[1]);
  const double eta_safe = 0.85 * sc.eta_star;

  for (int k = 0; k < I; ++k) {
    sc.targets_right.push_back(fr_R[k] * eta_safe);
    sc.targets_left.push_back(fr_L[k] * eta_safe);
  }

  sc.components.resize(I);
  sc.designs.resize(I);
  for (int k = 0; k < I; ++k) {
    auto d = design_multidir({sc.targets_right[k], sc.targets_left[k]}, spec, light,
                             /*allow_rescale=*/false, jobs);
    sc.achieved_right.push_back(d.achieved[0]);
    sc.achieved_left.push_back(d.achieved[1]);
    sc.components[I - 1 - k] = d.reaction;  // paper level k sits on (I-k, I-k+1]
    sc.designs[k] = std::move(d);
  }
  sc.reaction = make_stacked(sc.components);

  switch (variant) {
    case TerraceVariant::shared_platforms:
      for (int q = 1; q < I; ++q) {
        sc.expected_platforms_right.push_back(q);
        sc.expected_platforms_left.push_back(q);
      }
      break;
    case TerraceVariant::disjoint_platforms:
      sc.expected_platforms_right = {1.0};  // p2
      sc.expected_platforms_left = {2.0};   // p1
      break;
    case TerraceVariant::single_front:
      for (int q = 1; q < I; ++q) sc.expected_platforms_left.push_back(q);
      break;
  }
  return sc;
}

std::vector<double> fg_envelope(const std::vector<DirectionalSample>& samples,
                                const std::vector<std::vector<double>>& queries) {
  if (samples.empty()) throw ConfigError("fg_envelope: no directional samples");
  for (const auto& s : samples)
    if (s.speed < 0.0)
      throw ConfigError("fg_envelope: spreading requires nonnegative speeds");
  std::vector<double> out;
  out.reserve(queries.size());
  for (const auto& e : queries) {
    double best = 1e300;
    bool found = false;
    for (const auto& s : samples) {
      if (s.dir.size() != e.size())
        throw ConfigError("fg_envelope: dimension mismatch");
      double dot = 0.0;
      for (size_t i = 0; i < e.size(); ++i) dot += s.dir[i] * e[i];
      if (dot > 1e-12) {
        best = std::min(best, s.speed / dot);
        found = true;
      }
    }
    if (!found)
      throw ConfigError("fg_envelope: no sample faces the queried direction");
    out.push_back(best);
  }
  return out;
}

}  // namespace pulselab

#include "pulselab/frontmetrics.hpp"

#include <algorithm>
#include <cmath>

#include "pulselab/common.hpp"

namespace pulselab {

std::vector<double> front_position(const Field1D& field, double level) {
  std::vector<double> out;
  const auto& u = field.u;
  const int n = field.grid.nx;
  for (int i = 0; i + 1 < n; ++i) {
    const double a = u[i] - level, b = u[i + 1] - level;
    if (a == 0.0 && b == 0.0) continue;
    const bool crosses = (a <= 0.0 && b > 0.0) || (a >= 0.0 && b < 0.0) ||
                         (a > 0.0 && b <= 0.0) || (a < 0.0 && b >= 0.0);
    if (!crosses || a == b) continue;
    const double x = field.grid.x(i) + field.grid.dx() * a / (a - b);
    if (!out.empty() && std::fabs((x + field.shift) - out.back()) < 1e-12) continue;
    out.push_back(x + field.shift);
  }
  return out;
}

const char* to_string(SpeedClass c) {
  switch (c) {
    case SpeedClass::positive: return "positive";
    case SpeedClass::zero: return "zero";
    case SpeedClass::negative: return "negative";
    case SpeedClass::inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

// linear interpolation of a sampled monotone-ish series at value y
double crossing_time(const std::vector<double>& t, const std::vector<double>& p,
                     double y, size_t start_hint) {
  for (size_t i = std::max<size_t>(start_hint, 1); i < t.size(); ++i) {
    const double a = p[i - 1] - y, b = p[i] - y;
    if ((a <= 0.0 && b >= 0.0) || (a >= 0.0 && b <= 0.0)) {
      if (a == b) return t[i - 1];
      return t[i - 1] + (t[i] - t[i - 1]) * a / (a - b);
    }
  }
  return quiet_nan();
}

}  // namespace

SpeedEstimate estimate_speed(const Trajectory& traj, double level, double period,
                             double discard_fraction) {
  if (period <= 0.0) throw ConfigError("estimate_speed: period must be positive");
  if (discard_fraction < 0.0 || discard_fraction >= 1.0)
    throw ConfigError("estimate_speed: discard fraction must lie in [0,1)");
  std::vector<double> t, p;
  traj.series(level, t, p);
  if (t.size() < 2) throw ConfigError("estimate_speed: too few trajectory records");

  const double t0 = t.front() + discard_fraction * (t.back() - t.front());
  std::vector<double> tw, pw;
  for (size_t i = 0; i < t.size(); ++i)
    if (t[i] >= t0 - 1e-12) {
      tw.push_back(t[i]);
      pw.push_back(p[i]);
    }
  if (tw.size() < 20) throw ConfigError("estimate_speed: fewer than 20 samples after discard");

  SpeedEstimate est;
  est.window_t0 = tw.front();
  est.window_t1 = tw.back();
  est.n_samples = static_cast<int>(tw.size());
  est.displacement = pw.back() - pw.front();

  // displacement-based stall detection
  const double quarter_t = tw.back() - 0.25 * (tw.back() - tw.front());
  double p_quarter = pw.front();
  for (size_t i = 0; i < tw.size(); ++i)
    if (tw[i] <= quarter_t) p_quarter = pw[i];
  const double last_quarter_disp = pw.back() - p_quarter;
  const bool stalled = std::fabs(est.displacement) < 0.5 * period &&
                       std::fabs(last_quarter_disp) < 0.1 * period;

  if (std::fabs(est.displacement) >= 3.0 * period) {
    // one sample per whole period of traversal
    const double sgn = est.displacement > 0 ? 1.0 : -1.0;
    std::vector<double> tk, yk;
    const long kmax = static_cast<long>(std::floor(std::fabs(est.displacement) / period));
    for (long k = 0; k <= kmax; ++k) {
      const double target = pw.front() + sgn * k * period;
      const double tc = crossing_time(tw, pw, target, 1);
      if (!std::isnan(tc)) {
        tk.push_back(tc);
        yk.push_back(sgn * k * period);
      }
    }
    if (tk.size() >= 3) {
      const LineFit fit = fit_line(tk, yk);
      est.c = fit.slope;
      est.stderr_c = fit.slope_stderr;
      est.period_synchronized = true;
    }
  }
  if (!est.period_synchronized) {
    const LineFit fit = fit_line(tw, pw);
    est.c = fit.slope;
    est.stderr_c = fit.slope_stderr;
  }

  if (stalled)
    est.cls = SpeedClass::zero;
  else if (est.c > 3.0 * est.stderr_c)
    est.cls = SpeedClass::positive;
  else if (est.c < -3.0 * est.stderr_c)
    est.cls = SpeedClass::negative;
  else
    est.cls = SpeedClass::inconclusive;
  return est;
}

namespace {

// value of a snapshot at an absolute coordinate that must sit on a node
double snapshot_at(const SnapshotRecord& s, double x_abs, bool& ok) {
  const double fi = (x_abs - s.x0_abs) / s.dx;
  const long i = std::lround(fi);
  if (std::fabs(fi - i) > 1e-6 || i < 0 || i >= static_cast<long>(s.u.size())) {
    ok = false;
    return 0.0;
  }
  ok = true;
  return s.u[i];
}

}  // namespace

PulsatingCheck check_pulsating_relation(const Trajectory& traj, double period,
                                        double speed) {
  if (speed == 0.0) throw ConfigError("check_pulsating_relation: speed must be nonzero");
  const auto& snaps = traj.snapshots;
  if (snaps.size() < 3) throw ConfigError("check_pulsating_relation: need snapshots");
  const double t_shift = period / std::fabs(speed);
  double max_gap = 0.0;
  for (size_t i = 1; i < snaps.size(); ++i)
    max_gap = std::max(max_gap, snaps[i].t - snaps[i - 1].t);
  if (max_gap > 0.1 * t_shift + 1e-12)
    throw NumericError("check_pulsating_relation: snapshot cadence too coarse");

  // the latest reference whose shifted time still lies in the archive
  int ref = -1;
  for (int i = static_cast<int>(snaps.size()) - 1; i >= 0; --i)
    if (snaps[i].t + t_shift <= snaps.back().t + 1e-12) {
      ref = i;
      break;
    }
  if (ref < 0) throw NumericError("check_pulsating_relation: run too short for one period");

  const double t2 = snaps[ref].t + t_shift;
  size_t hi = 1;
  while (hi < snaps.size() && snaps[hi].t < t2 - 1e-12) ++hi;
  if (hi >= snaps.size()) hi = snaps.size() - 1;
  const size_t lo = hi - 1;
  const double w = (snaps[hi].t > snaps[lo].t)
                       ? (t2 - snaps[lo].t) / (snaps[hi].t - snaps[lo].t)
                       : 0.0;

  const double x_shift = speed > 0 ? period : -period;
  const SnapshotRecord& a = snaps[ref];
  PulsatingCheck out;
  out.t_ref = a.t;
  out.t_shift = t_shift;
  const int margin = 5;
  for (int i = margin; i < static_cast<int>(a.u.size()) - margin; ++i) {
    const double x = a.x0_abs + i * a.dx;
    bool ok1 = false, ok2 = false;
    const double v1 = snapshot_at(snaps[lo], x + x_shift, ok1);
    const double v2 = snapshot_at(snaps[hi], x + x_shift, ok2);
    if (!ok1 || !ok2) continue;
    const double shifted = (1.0 - w) * v1 + w * v2;
    out.residual = std::max(out.residual, std::fabs(shifted - a.u[i]));
    out.n_overlap++;
  }
  if (out.n_overlap < 10)
    throw NumericError("check_pulsating_relation: shifted snapshots barely overlap");
  return out;
}

double decay_rate_ahead(double c, double fp) { return 0.5 * (c + std::sqrt(c * c - 4.0 * fp)); }

double decay_rate_behind(double c, double fp) { return 0.5 * (-c + std::sqrt(c * c - 4.0 * fp)); }

namespace {

DecayFit fit_tail(const Field1D& f, double limit, bool ahead, double front_x,
                  const DecayOptions& opt) {
  const int n = f.grid.nx;
  std::vector<double> xs, logs;
  const int lo_excl = opt.boundary_margin_nodes;
  for (int i = lo_excl; i < n - lo_excl; ++i) {
    const double x = f.x_abs(i);
    if (ahead && x <= front_x) continue;
    if (!ahead && x >= front_x) continue;
    const double w = std::fabs(f.u[i] - limit);
    if (w < opt.value_floor || w > opt.band) continue;
    xs.push_back(x);
    logs.push_back(std::log(w));
  }
  if (xs.size() < 20) throw NumericError("fit_decay: tail window too short");
  if (opt.trim_period > 0.0) {
    // keep a whole number of periods, anchored at the front side
    const double span = xs.back() - xs.front();
    const double keep = std::floor(span / opt.trim_period) * opt.trim_period;
    if (keep >= opt.trim_period) {
      std::vector<double> xs2, logs2;
      for (size_t i = 0; i < xs.size(); ++i) {
        const double d = ahead ? xs[i] - xs.front() : xs.back() - xs[i];
        if (d <= keep + 1e-12) {
          xs2.push_back(xs[i]);
          logs2.push_back(logs[i]);
        }
      }
      xs.swap(xs2);
      logs.swap(logs2);
    }
  }
  const LineFit fit = fit_line(xs, logs);
  DecayFit out;
  out.side = ahead ? TailSide::ahead : TailSide::behind;
  out.rate = ahead ? -fit.slope : fit.slope;
  out.rms_residual = fit.rms_residual;
  out.n = fit.n;
  return out;
}

}  // namespace

std::pair<DecayFit, DecayFit> fit_decay(const Field1D& field, double lower,
                                        double upper, double speed,
                                        double fprime_lower, double fprime_upper,
                                        const DecayOptions& opt) {
  if (!(upper > lower)) throw ConfigError("fit_decay: upper must exceed lower");
  const auto crossings = front_position(field, 0.5 * (lower + upper));
  if (crossings.empty()) throw ConfigError("fit_decay: no front in the field");
  const double xf = crossings.front();
  DecayFit ahead = fit_tail(field, lower, true, xf, opt);
  DecayFit behind = fit_tail(field, upper, false, xf, opt);
  ahead.rate_theory = decay_rate_ahead(speed, fprime_lower);
  behind.rate_theory = decay_rate_behind(speed, fprime_upper);
  return {ahead, behind};
}

const char* to_string(TerraceVerdict v) {
  switch (v) {
    case TerraceVerdict::valid: return "valid";
    case TerraceVerdict::invalid: return "invalid";
    case TerraceVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

TerraceReport extract_terrace(const Trajectory& traj,
                              const std::vector<double>& candidate_levels,
                              double period, Orientation direction,
                              const TerraceOptions& opt) {
  if (traj.records.size() < 8) throw ConfigError("extract_terrace: trajectory too short");
  TerraceReport rep;
  rep.direction = direction;
  rep.candidates = candidate_levels;

  // extremes = first and last plateau candidates come from the run itself:
  // the platform list always starts at the top state and ends at the bottom.
  std::vector<double> all_levels = candidate_levels;
  std::sort(all_levels.begin(), all_levels.end());
  const double bottom = all_levels.front(), top = all_levels.back();

  const double t_begin = traj.records.front().t;
  const double t_final = traj.records.back().t;
  const double t_half = t_begin + 0.5 * (t_final - t_begin);

  bool marginal = false;
  std::vector<double> accepted;
  for (double q : all_levels) {
    if (q <= bottom + 1e-12 || q >= top - 1e-12) {
      rep.plateau_slopes.push_back(quiet_nan());
      continue;
    }
    int idx = -1;
    for (size_t k = 0; k < traj.plateau_levels.size(); ++k)
      if (std::fabs(traj.plateau_levels[k] - q) < 1e-12) idx = static_cast<int>(k);
    if (idx < 0) throw ConfigError("extract_terrace: candidate level was not observed");
    std::vector<double> t, w;
    for (const auto& rec : traj.records)
      if (rec.t >= t_half) {
        t.push_back(rec.t);
        w.push_back(rec.plateau_w[idx]);
      }
    const LineFit fit = fit_line(t, w);
    rep.plateau_slopes.push_back(fit.slope);
    if (fit.slope > opt.slope_threshold) {
      accepted.push_back(q);
      if (fit.slope_stderr > 0.5 * fit.slope) marginal = true;
    }
  }

  rep.platforms.push_back(top);
  for (auto it = accepted.rbegin(); it != accepted.rend(); ++it) rep.platforms.push_back(*it);
  rep.platforms.push_back(bottom);

  bool any_inconclusive = false;
  for (size_t k = 0; k + 1 < rep.platforms.size(); ++k) {
    TerraceFront fr;
    fr.upper = rep.platforms[k];
    fr.lower = rep.platforms[k + 1];
    double level = 0.5 * (fr.upper + fr.lower);
    for (double q : all_levels)
      if (std::fabs(level - q) < 1e-9) level -= (fr.upper - fr.lower) / 8.0;
    fr.level = level;
    fr.speed = estimate_speed(traj, level, period, opt.discard_fraction);
    if (fr.speed.cls == SpeedClass::inconclusive) any_inconclusive = true;
    rep.fronts.push_back(fr);
  }

  // Definition of a terrace: speeds nondecreasing from the top front down.
  bool ordered = true;
  for (size_t k = 0; k + 1 < rep.fronts.size(); ++k) {
    const auto& a = rep.fronts[k].speed;
    const auto& b = rep.fronts[k + 1].speed;
    if (a.c > b.c + 3.0 * (a.stderr_c + b.stderr_c)) ordered = false;
  }
  if (marginal || any_inconclusive)
    rep.verdict = TerraceVerdict::inconclusive;
  else
    rep.verdict = ordered ? TerraceVerdict::valid : TerraceVerdict::invalid;
  return rep;
}

}  // namespace pulselab

// Acceptance suite: one scenario per criterion, each printing a single
// PASS/FAIL line (plus indented detail). Run with no arguments for the full
// battery or with a criterion number. Exit code 0 only if everything passed.

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "pulselab/common.hpp"
#include "pulselab/design.hpp"
#include "pulselab/frontmetrics.hpp"
#include "pulselab/reaction.hpp"
#include "pulselab/solver.hpp"
#include "pulselab/spectra.hpp"

using namespace pulselab;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) ok = false;
    detail += std::string("    ") + (cond ? "ok   " : "BAD  ") + what + "\n";
  }
  void note(const std::string& what) { detail += "         " + what + "\n"; }
};

std::string fmt(const char* f, ...) {
  char buf[256];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

MeasureProfile desk_profile() {
  MeasureProfile p;  // dx = 0.05, dt = 2.5e-3, T = 200, half-width 60
  return p;
}

// --- 1. blocking dichotomy (tau = 0) ---------------------------------------

Check criterion_01() {
  Check c;
  auto r = make_family_1d(0.0, 0.1);
  MeasureProfile prof = desk_profile();
  auto right = measure_speed(r, Orientation::right_moving, prof);
  auto left = measure_speed(r, Orientation::left_moving, prof);
  c.require(right.cls == SpeedClass::zero,
            fmt("rightward classified zero (c = %.3g)", right.c));
  c.require(std::fabs(right.displacement) < 0.5,
            fmt("total midlevel displacement %.3g < 0.5", right.displacement));
  c.require(left.cls == SpeedClass::positive,
            fmt("leftward classified positive (c = %.5f)", left.c));
  c.require(left.c > 0.005, "leftward speed exceeds 0.005");
  return c;
}

// --- 2. symmetry at tau = 1 -------------------------------------------------

Check criterion_02() {
  Check c;
  auto pr = speed_pair(make_family_1d(1.0, 0.1), desk_profile());
  const double diff = std::fabs(pr.left.c - pr.right.c);
  const double bound = 0.02 * std::max(pr.left.c, pr.right.c);
  c.require(diff <= bound,
            fmt("|cL - cR| = %.3g within 0.02 max = %.3g", diff, bound));
  return c;
}

// --- 3. speed-map monotonicity ----------------------------------------------

Check criterion_03() {
  Check c;
  auto rows = speed_map_1d({0.0, 0.25, 0.5, 0.75, 1.0}, 0.1, desk_profile(), 2);
  c.require(speed_map_monotone(rows), "c_L and c_R nondecreasing within 3 stderr");
  c.require(rows[0].right.cls == SpeedClass::zero, "c_R(0) classified zero");
  for (size_t i = 1; i < rows.size(); ++i)
    c.require(rows[i].right.cls == SpeedClass::positive,
              fmt("c_R(%.2f) = %.4f classified positive", rows[i].tau, rows[i].right.c));
  for (const auto& row : rows)
    c.note(fmt("tau %.2f: cL %.5f  cR %.5f", row.tau, row.left.c, row.right.c));
  return c;
}

// --- 4. design round-trip ----------------------------------------------------

Check criterion_04() {
  Check c;
  MeasureProfile prof = desk_profile();
  for (auto [tl, tr] : {std::pair{0.03, 0.012}, std::pair{0.02, 0.02}}) {
    auto d = design_1d(tl, tr, 0.1, prof);
    const double el = std::fabs(d.achieved[0] / tl - 1.0);
    const double er = std::fabs(d.achieved[1] / tr - 1.0);
    c.require(el <= 0.05 && er <= 0.05,
              fmt("targets (%.3f, %.3f): achieved (%.5f, %.5f), errors (%.1f%%, %.1f%%)",
                  tl, tr, d.achieved[0], d.achieved[1], 100 * el, 100 * er));
  }
  return c;
}

// --- 5. decay rates -----------------------------------------------------------

Check criterion_05() {
  Check c;
  MeasureProfile prof = desk_profile();
  DecayOptions opt;
  opt.band = 0.05;
  opt.trim_period = 1.0;

  {
    auto [field, est] = converged_profile(make_family_1d(0.5, 0.1),
                                          Orientation::right_moving, prof);
    auto [ahead, behind] = fit_decay(field, 0.0, 1.0, est.c, -0.5, -0.5, opt);
    const double theory = 0.5 * (est.c + std::sqrt(est.c * est.c + 2.0));
    const double err = std::fabs(ahead.rate / theory - 1.0);
    c.require(err <= 0.05, fmt("moving front: fitted %.5f vs (c+sqrt(c^2+2))/2 = %.5f "
                               "(c = %.5f, err %.2f%%)",
                               ahead.rate, theory, est.c, 100 * err));
  }
  {
    auto [field, est] = converged_profile(make_family_1d(0.0, 0.1),
                                          Orientation::right_moving, prof);
    auto [ahead, behind] = fit_decay(field, 0.0, 1.0, 0.0, -0.5, -0.5, opt);
    const double theory = std::sqrt(0.5);
    const double err = std::fabs(ahead.rate / theory - 1.0);
    c.require(est.cls == SpeedClass::zero, "tau = 0 rightward profile is blocked");
    c.require(err <= 0.05, fmt("blocked front: fitted %.5f vs sqrt(1/2) = %.5f (err %.2f%%)",
                               ahead.rate, theory, 100 * err));
  }
  return c;
}

// --- 6. spectral certification ------------------------------------------------

Check criterion_06() {
  Check c;
  SpectraOptions opt;
  for (double tau : {0.0, 0.5, 1.0}) {
    auto rep = certify_bistable(*make_family_1d(tau, 0.1), opt);
    c.require(rep.certified, fmt("family tau = %.1f certified (%zu states)", tau,
                                 rep.states.size()));
  }
  for (double q0 : {-0.5, 0.25, 1.0, -2.5}) {
    std::vector<double> q(256, q0);
    const double l1 = principal_eigenvalue_periodic(q, 1.0 / 256);
    c.require(std::fabs(l1 - q0) < 1e-12,
              fmt("constant potential %.2f: |lambda1 - q0| = %.2e", q0,
                  std::fabs(l1 - q0)));
  }
  {
    std::vector<double> half(256, 0.5);
    const double l1 = principal_eigenvalue(*make_cubic(1), half, opt);
    c.require(std::fabs(l1 - 0.25) < 1e-10,
              fmt("cubic intermediate state: lambda1 = %.12f (vs 1/4)", l1));
  }
  return c;
}

// --- 7. pulsating relation ------------------------------------------------------

double pulsating_residual(double dx, double dt, double cadence, Check& c) {
  auto r = make_family_1d(0.5, 0.1);
  const int nx = static_cast<int>(std::lround(120.0 / dx)) + 1;
  Grid1D g{-60.0, 60.0, nx};
  SolverConfig cfg;
  cfg.dt = dt;
  cfg.t_end = 60.0;
  cfg.record_every = 0.25;
  cfg.track_levels = {0.5};
  cfg.window_level = 0.5;
  cfg.moving_window = true;
  cfg.recenter_threshold = 5.0;
  cfg.snapshot_every = cadence;  // the linear time interpolation must refine too
  cfg.snapshot_from = 40.0;
  auto res = evolve(front_initial(g, Orientation::right_moving, 1.0, 0.0), *r, cfg);
  auto est = estimate_speed(res.trajectory, 0.5, 1.0);
  auto chk = check_pulsating_relation(res.trajectory, 1.0, est.c);
  c.note(fmt("dx = %.3f: c = %.5f, residual = %.2e", dx, est.c, chk.residual));
  return chk.residual;
}

Check criterion_07() {
  Check c;
  const double coarse = pulsating_residual(0.05, 2.5e-3, 0.08, c);
  c.require(coarse < 5e-3, fmt("residual %.2e < 5e-3 at dx = 0.05", coarse));
  const double fine = pulsating_residual(0.025, 6.25e-4, 0.04, c);
  c.require(fine <= 0.6 * coarse,
            fmt("residual halves under refinement (%.2e -> %.2e)", coarse, fine));
  return c;
}

// --- 8/9. terrace scenarios -----------------------------------------------------

Check run_terrace_criterion(TerraceVariant variant, int n_fronts,
                            const std::vector<double>& expect_right,
                            const std::vector<double>& expect_left) {
  Check c;
  MeasureProfile prof = desk_profile();
  auto sc = terrace_scenario(variant, n_fronts, 0.1, prof, 2);
  const int I = static_cast<int>(sc.components.size());
  for (int k = 0; k < I; ++k)
    c.note(fmt("level %d: targets (R %.4f, L %.4f) achieved (R %.4f, L %.4f)", k + 1,
               sc.targets_right[k], sc.targets_left[k], sc.achieved_right[k],
               sc.achieved_left[k]));

  double cmax = 0.0;
  for (double v : sc.achieved_right) cmax = std::max(cmax, v);
  for (double v : sc.achieved_left) cmax = std::max(cmax, v);
  const double t_run = 250.0, gap = 8.0;
  const double x_lo = -((I - 1) * gap + 40.0), x_hi = cmax * t_run + 40.0;
  Grid1D g{x_lo, x_hi, static_cast<int>(std::lround((x_hi - x_lo) / prof.dx)) + 1};

  std::vector<double> track, plateaus;
  for (int k = 1; k < 4 * I; ++k)
    if (k % 4 != 0) track.push_back(k / 4.0);
  for (int q = 1; q < I; ++q) plateaus.push_back(q);

  TerraceReport reports[2];
  parallel_for_indexed(2, 2, [&](int side) {
    ReactionPtr r = side == 0 ? sc.reaction : reflect_space(sc.reaction);
    SolverConfig cfg;
    cfg.dt = prof.dt;
    cfg.t_end = t_run;
    cfg.record_every = 0.5;
    cfg.track_levels = track;
    cfg.plateau_levels = plateaus;
    auto res = evolve(staircase_initial(g, r->levels(), Orientation::right_moving, gap),
                      *r, cfg);
    reports[side] = extract_terrace(
        res.trajectory, r->levels(), 1.0,
        side == 0 ? Orientation::right_moving : Orientation::left_moving);
  });

  auto check_side = [&](const char* name, const TerraceReport& rep,
                        std::vector<double> expected) {
    std::vector<double> got(rep.platforms.begin() + 1, rep.platforms.end() - 1);
    std::sort(got.begin(), got.end());
    std::sort(expected.begin(), expected.end());
    std::string got_s, exp_s;
    for (double p : got) got_s += fmt("%g ", p);
    for (double p : expected) exp_s += fmt("%g ", p);
    c.require(got == expected, fmt("%s intermediate platforms {%s} match {%s}", name,
                                   got_s.c_str(), exp_s.c_str()));
    c.require(rep.verdict == TerraceVerdict::valid,
              fmt("%s terrace verdict valid (speeds ordered)", name));
    for (const auto& f : rep.fronts)
      c.note(fmt("%s front %g -> %g: c = %.4f (%s)", name, f.upper, f.lower, f.speed.c,
                 to_string(f.speed.cls)));
  };
  check_side("rightward", reports[0], expect_right);
  check_side("leftward", reports[1], expect_left);
  return c;
}

Check criterion_08() {
  return run_terrace_criterion(TerraceVariant::disjoint_platforms, 2, {1.0}, {2.0});
}

Check criterion_09() {
  return run_terrace_criterion(TerraceVariant::single_front, 3, {}, {1.0, 2.0});
}

// --- 10. comparison principle ----------------------------------------------------

Check criterion_10() {
  Check c;
  auto r = make_family_1d(0.5, 0.1);
  const double lip = lipschitz_u(*r);
  SolverConfig cfg;
  cfg.dt = std::min(2.5e-3, 0.5 / lip);
  cfg.scheme = Scheme::be_imex;
  cfg.t_end = 1.0;
  c.note(fmt("Lip_u(f) = %.2f, dt = %.4g (dt Lip = %.3f)", lip, cfg.dt, cfg.dt * lip));
  Grid1D g{-10.0, 10.0, 401};
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const long steps = std::lround(cfg.t_end / cfg.dt);
  const long sample_every = std::max(1L, steps / 10);
  bool all_ok = true;
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    Field1D lo, hi;
    lo.grid = hi.grid = g;
    lo.u.resize(g.nx);
    hi.u.resize(g.nx);
    for (int i = 0; i < g.nx; ++i) {
      const double a = unif(rng), b = unif(rng);
      lo.u[i] = std::min(a, b);
      hi.u[i] = std::max(a, b);
    }
    lo.u.front() = 0.0;
    lo.u.back() = 0.0;
    hi.u.front() = 1.0;
    hi.u.back() = 1.0;
    for (long s = 1; s <= steps; ++s) {
      step(lo, *r, cfg);
      step(hi, *r, cfg);
      if (s % sample_every == 0 || s == steps) {
        for (int i = 0; i < g.nx; ++i) {
          worst = std::max(worst, lo.u[i] - hi.u[i]);
          if (lo.u[i] > hi.u[i] + 1e-12) all_ok = false;
        }
      }
    }
  }
  c.require(all_ok, fmt("50 ordered pairs stay ordered to 1e-12 (worst gap %.2e)", worst));
  return c;
}

// --- 11. rescaling covariance ------------------------------------------------------

Check criterion_11() {
  Check c;
  MeasureProfile prof = desk_profile();
  auto base = make_family_1d(0.5, 0.1);
  const double c_base = measure_speed(base, Orientation::right_moving, prof).c;
  c.note(fmt("base speed %.5f", c_base));
  for (double nu : {0.5, 2.0}) {
    const double c_nu =
        measure_speed(make_rescaled(base, nu), Orientation::right_moving, prof.scaled(nu)).c;
    const double err = std::fabs(c_nu / (nu * c_base) - 1.0);
    c.require(err <= 0.03,
              fmt("nu = %.1f: c = %.5f vs nu c = %.5f (err %.2f%%)", nu, c_nu,
                  nu * c_base, 100 * err));
  }
  return c;
}

// --- 12. 2-D sign dichotomy and ratio design ---------------------------------------

Check criterion_12() {
  Check c;
  auto r2 = make_family_multidir({1.0, 0.0}, 0.1, {{1.0, 0.0}, {0.0, 1.0}}, {1.0, 1.0},
                                 {1.0, 1.0});
  MeasureProfile prof = desk_profile();  // 1200 x 24 rotated frame, T = 150
  auto c1 = measure_speed_dir(r2, {1.0, 0.0}, prof);
  auto c2 = measure_speed_dir(r2, {0.0, 1.0}, prof);
  c.require(c1.cls == SpeedClass::positive, fmt("c*(zeta_1) = %.5f positive", c1.c));
  c.require(c2.cls == SpeedClass::zero, fmt("c*(zeta_2) = %.3g zero", c2.c));

  // ratio-2 design on coarse grids
  MultiDirSpec spec;
  spec.dirs = {{1.0, 0.0}, {0.0, 1.0}};
  spec.period_vector = {1.0, 1.0};
  spec.periods = {1.0, 1.0};
  spec.sigma = 0.1;
  MeasureProfile coarse = prof;
  coarse.dx = 0.1;
  coarse.dt = 5e-3;
  coarse.half_width_2d = 25.0;
  coarse.t_end_2d = 50.0;
  coarse.deta_target = 1.0 / 12.0;
  auto d = design_multidir({0.2, 0.1}, spec, coarse, true, 2);
  const double ratio = d.achieved[0] / d.achieved[1];
  c.require(std::fabs(ratio / 2.0 - 1.0) <= 0.10,
            fmt("designed ratio %.3f within 10%% of 2 (achieved %.4f, %.4f)", ratio,
                d.achieved[0], d.achieved[1]));
  return c;
}

// --- 13. sign property ----------------------------------------------------------------

Check criterion_13() {
  Check c;
  MeasureProfile prof = desk_profile();
  prof.t_end = 80.0;  // speeds here are large, whole periods accrue quickly
  std::vector<std::pair<double, double>> samples = {
      {0.25, 0.05}, {0.5, 0.05}, {0.75, 0.05}, {1.0, 0.05}, {0.4, 0.1},
      {0.6, 0.1},   {0.8, 0.1},  {1.0, 0.1},   {0.5, 0.15}, {1.0, 0.15}};
  std::vector<SpeedEstimate> ests(samples.size());
  parallel_for_indexed(static_cast<int>(samples.size()), 2, [&](int i) {
    ests[i] = measure_speed(make_family_1d(samples[i].first, samples[i].second),
                            Orientation::right_moving, prof);
  });
  for (size_t i = 0; i < samples.size(); ++i) {
    const auto [tau, sigma] = samples[i];
    c.require(ests[i].cls == SpeedClass::positive,
              fmt("(tau %.2f, sigma %.2f): speed %.4f positive", tau, sigma, ests[i].c));
    auto integral = integral_sign(*make_family_1d(tau, sigma));
    c.require(integral.sign == IntegralSign::positive,
              fmt("(tau %.2f, sigma %.2f): integral %.4g positive", tau, sigma,
                  integral.value));
  }
  return c;
}

// --- 14. Freidlin-Gartner envelope ------------------------------------------------------

Check criterion_14() {
  Check c;
  // constant speeds over a dense rational sample set
  auto dirs = rational_directions(40);
  std::vector<DirectionalSample> samples;
  for (const auto& d : dirs) samples.push_back({d, 0.7});
  std::vector<std::vector<double>> queries = {{1, 0}, {0, 1}, {0.6, 0.8}, {-1, 0}};
  auto w = fg_envelope(samples, queries);
  for (double v : w)
    c.require(std::fabs(v - 0.7) < 1e-12, fmt("constant c*: w* = %.15f equals c*", v));

  // the two-sample worked example
  const double s = 1.0 / std::sqrt(2.0);
  auto w2 = fg_envelope({{{1.0, 0.0}, 1.0}, {{s, s}, 0.6}}, {{1.0, 0.0}});
  c.require(std::fabs(w2[0] - 0.6 * std::sqrt(2.0)) < 1e-12,
            fmt("two-sample example: w* = %.6f = 0.6 sqrt(2)", w2[0]));
  c.require(std::fabs(w2[0] - 0.8485) < 5e-4, "matches 0.8485");
  c.require(w2[0] <= 1.0 + 1e-15, "w*(e) <= c*(e) when e itself is sampled");
  return c;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Check()> fn;
};

const std::vector<Criterion>& all_criteria() {
  static const std::vector<Criterion> list = {
      {1, "blocking dichotomy (tau = 0)", criterion_01},
      {2, "left-right symmetry at tau = 1", criterion_02},
      {3, "speed-map monotonicity in tau", criterion_03},
      {4, "1-D design round-trip", criterion_04},
      {5, "exponential decay rates", criterion_05},
      {6, "spectral certification", criterion_06},
      {7, "pulsating relation residual", criterion_07},
      {8, "terrace with disjoint platforms", criterion_08},
      {9, "single-front vs stacked terrace", criterion_09},
      {10, "discrete comparison principle", criterion_10},
      {11, "rescaling covariance", criterion_11},
      {12, "2-D sign dichotomy and ratio design", criterion_12},
      {13, "sign property of wave speeds", criterion_13},
      {14, "Freidlin-Gartner envelope", criterion_14},
  };
  return list;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc > 1 && std::strcmp(argv[1], "all") != 0) only = std::atoi(argv[1]);
  int failures = 0;
  for (const auto& cr : all_criteria()) {
    if (only && cr.id != only) continue;
    Check result;
    std::string error;
    try {
      result = cr.fn();
    } catch (const std::exception& e) {
      result.ok = false;
      error = e.what();
    }
    std::printf("%s  criterion %02d: %s\n", result.ok ? "PASS" : "FAIL", cr.id, cr.name);
    std::fputs(result.detail.c_str(), stdout);
    if (!error.empty()) std::printf("    exception: %s\n", error.c_str());
    std::fflush(stdout);
    if (!result.ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}

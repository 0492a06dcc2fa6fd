#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "pulselab/common.hpp"
#include "pulselab/frontmetrics.hpp"
#include "pulselab/reaction.hpp"

using namespace pulselab;

namespace {

// synthetic trajectory with a single tracked level following pos(t)
Trajectory synthetic_traj(double t_end, double dt, const std::function<double(double)>& pos) {
  Trajectory tr;
  tr.track_levels = {0.5};
  for (double t = 0.0; t <= t_end + 1e-12; t += dt) {
    TrajectoryRecord rec;
    rec.t = t;
    rec.front_pos = {pos(t)};
    tr.records.push_back(rec);
  }
  return tr;
}

}  // namespace

TEST_SUITE_BEGIN("frontmetrics");

TEST_CASE("front_position on exact kink, staircase and constant fields") {
  Grid1D g{-20.0, 20.0, 801};
  Field1D f;
  f.grid = g;
  f.u.resize(g.nx);
  for (int i = 0; i < g.nx; ++i) f.u[i] = kink(g.x(i));
  auto cr = front_position(f, 0.5);
  REQUIRE(cr.size() == 1);
  CHECK(std::fabs(cr[0]) <= g.dx());

  Field1D c;
  c.grid = g;
  c.u.assign(g.nx, 0.7);
  CHECK(front_position(c, 0.5).empty());

  // shifted window coordinates translate into absolute positions
  f.shift = 7.0;
  CHECK(front_position(f, 0.5).front() == doctest::Approx(cr[0] + 7.0));
}

TEST_CASE("speed estimation on synthetic drifting fronts") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> noise(-1e-4, 1e-4);
  auto tr = synthetic_traj(200.0, 0.5, [&](double t) { return 0.3 * t + noise(rng); });
  auto est = estimate_speed(tr, 0.5, 1.0);
  CHECK(est.cls == SpeedClass::positive);
  CHECK(est.c == doctest::Approx(0.3).epsilon(1e-3 / 0.3));
  CHECK(est.period_synchronized);

  // blocked front: a decaying pulsation that settles in place
  auto blocked = synthetic_traj(
      200.0, 0.5, [&](double t) { return 0.2 * std::sin(0.1 * t) * std::exp(-0.02 * t); });
  auto est0 = estimate_speed(blocked, 0.5, 1.0);
  CHECK(est0.cls == SpeedClass::zero);

  // negative drift
  auto neg = synthetic_traj(200.0, 0.5, [&](double t) { return -0.05 * t; });
  CHECK(estimate_speed(neg, 0.5, 1.0).cls == SpeedClass::negative);

  // invariance to time shift and whole-period translation
  auto shifted = synthetic_traj(200.0, 0.5, [&](double t) { return 17.0 + 0.3 * (t + 40.0); });
  auto est2 = estimate_speed(shifted, 0.5, 1.0);
  CHECK(est2.c == doctest::Approx(est.c).epsilon(2e-3));

  CHECK_THROWS_AS(estimate_speed(synthetic_traj(2.0, 0.5, [](double) { return 0.0; }), 0.5, 1.0),
                  ConfigError);
}

TEST_CASE("decay rate formulas") {
  // c = 0, f'(0) = -1/2: sqrt(1/2)
  CHECK(decay_rate_ahead(0.0, -0.5) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  // evaluate (0.1 + sqrt(0.01 + 2)) / 2
  CHECK(decay_rate_ahead(0.1, -0.5) ==
        doctest::Approx(0.5 * (0.1 + std::sqrt(2.01))).epsilon(1e-12));
  CHECK(decay_rate_ahead(0.1, -0.5) == doctest::Approx(0.75887).epsilon(1e-4));
  CHECK(decay_rate_behind(0.1, -0.5) ==
        doctest::Approx(0.5 * (-0.1 + std::sqrt(2.01))).epsilon(1e-12));
}

TEST_CASE("decay fit recovers the kink tail rate") {
  Grid1D g{-40.0, 40.0, 1601};
  Field1D f;
  f.grid = g;
  f.u.resize(g.nx);
  for (int i = 0; i < g.nx; ++i) f.u[i] = kink(g.x(i));
  DecayOptions opt;
  opt.band = 0.05;
  opt.trim_period = 1.0;
  auto [ahead, behind] = fit_decay(f, 0.0, 1.0, 0.0, -0.5, -0.5, opt);
  CHECK(ahead.rate == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.02));
  CHECK(behind.rate == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.02));
  CHECK(ahead.rate_theory == doctest::Approx(std::sqrt(0.5)));
  CHECK(ahead.n >= 20);

  // floor rejection: a field clipped to zero ahead has a short window
  Field1D clipped = f;
  for (int i = 0; i < g.nx; ++i)
    if (g.x(i) > 2.0) clipped.u[i] = 0.0;
  CHECK_THROWS_AS(fit_decay(clipped, 0.0, 1.0, 0.0, -0.5, -0.5, opt), NumericError);
}

TEST_CASE("pulsating relation on an exactly translating profile") {
  // u(t,x) = U0(x - c t) sampled into snapshots
  const double c = 0.25, L = 1.0, dx = 0.05;
  Trajectory tr;
  tr.track_levels = {0.5};
  const int nx = 1201;
  for (double t = 0.0; t <= 30.0 + 1e-9; t += 0.125) {
    SnapshotRecord s;
    s.t = t;
    s.x0_abs = -30.0;
    s.dx = dx;
    s.u.resize(nx);
    for (int i = 0; i < nx; ++i) s.u[i] = kink(s.x0_abs + i * dx - c * t);
    tr.snapshots.push_back(std::move(s));
    TrajectoryRecord rec;
    rec.t = t;
    rec.front_pos = {c * t};
    tr.records.push_back(rec);
  }
  auto chk = check_pulsating_relation(tr, L, c);
  CHECK(chk.residual < 5e-3);
  // a mismatched speed degrades the residual by an order of magnitude
  auto bad = check_pulsating_relation(tr, L, 2.0 * c);
  CHECK(bad.residual > 10.0 * chk.residual);

  // cadence error path: thin the snapshots
  Trajectory sparse = tr;
  sparse.snapshots.clear();
  for (size_t i = 0; i < tr.snapshots.size(); i += 8) sparse.snapshots.push_back(tr.snapshots[i]);
  CHECK_THROWS_AS(check_pulsating_relation(sparse, L, c), NumericError);
}

TEST_CASE("terrace extraction from a synthetic three-level run") {
  // fronts: 3->1 merged moving at 0.1, 1->0 moving at 0.25 (platform at 1)
  Trajectory tr;
  tr.track_levels = {0.25, 0.5, 0.75, 1.25, 1.5, 1.75, 2.25, 2.5, 2.75};
  tr.plateau_levels = {1.0, 2.0};
  const double v_up = 0.1, v_dn = 0.25;
  for (double t = 0.0; t <= 300.0 + 1e-9; t += 0.5) {
    TrajectoryRecord rec;
    rec.t = t;
    const double x_up = -10.0 + v_up * t;   // the 3 -> 1 front
    const double x_dn = 0.0 + v_dn * t;     // the 1 -> 0 front
    for (double lev : tr.track_levels) rec.front_pos.push_back(lev < 1.0 ? x_dn : x_up);
    rec.plateau_w = {std::max(0.0, x_dn - x_up), 0.3};  // u=1 grows, u=2 does not
    tr.records.push_back(rec);
  }
  auto rep = extract_terrace(tr, {0.0, 1.0, 2.0, 3.0}, 1.0, Orientation::right_moving);
  REQUIRE(rep.platforms.size() == 3);
  CHECK(rep.platforms[0] == 3.0);
  CHECK(rep.platforms[1] == 1.0);
  CHECK(rep.platforms[2] == 0.0);
  REQUIRE(rep.fronts.size() == 2);
  CHECK(rep.fronts[0].speed.c == doctest::Approx(v_up).epsilon(1e-6));
  CHECK(rep.fronts[1].speed.c == doctest::Approx(v_dn).epsilon(1e-6));
  CHECK(rep.fronts[0].level == doctest::Approx(1.75));  // midlevel 2 is a stable level
  CHECK(rep.verdict == TerraceVerdict::valid);

  // swapped speeds violate the ordering
  Trajectory bad = tr;
  for (auto& rec : bad.records)
    for (size_t k = 0; k < bad.track_levels.size(); ++k)
      rec.front_pos[k] = bad.track_levels[k] < 1.0 ? -10.0 + v_up * rec.t : v_dn * rec.t;
  auto rep2 = extract_terrace(bad, {0.0, 1.0, 2.0, 3.0}, 1.0, Orientation::right_moving);
  CHECK(rep2.verdict == TerraceVerdict::invalid);
}

TEST_SUITE_END();

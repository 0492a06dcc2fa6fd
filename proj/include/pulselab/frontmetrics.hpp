#ifndef PULSELAB_FRONTMETRICS_HPP
#define PULSELAB_FRONTMETRICS_HPP

#include <vector>

#include "pulselab/grid.hpp"
#include "pulselab/solver.hpp"

namespace pulselab {

/// All level crossings of a field, located by linear interpolation and
/// returned in absolute coordinates, ordered left to right. Empty when the
/// field never meets the level.
std::vector<double> front_position(const Field1D& field, double level);

enum class SpeedClass { positive, zero, negative, inconclusive };

const char* to_string(SpeedClass c);

/// Least-squares front speed over the measurement window. `zero` means the
/// total displacement stayed under half a period and the last quarter under
/// a tenth of one; strict signs additionally require |c| > 3 stderr.
struct SpeedEstimate {
  double c = 0.0;
  double stderr_c = 0.0;
  SpeedClass cls = SpeedClass::inconclusive;
  double displacement = 0.0;   // over the window
  double window_t0 = 0.0;
  double window_t1 = 0.0;
  int n_samples = 0;
  bool period_synchronized = false;
};

/// Fits position-vs-time for the tracked level after discarding the leading
/// `discard_fraction` of the time window. When the front has traversed at
/// least three periods the fit uses period-crossing times (one sample per
/// spatial period); otherwise the raw records. Requires >= 20 samples.
SpeedEstimate estimate_speed(const Trajectory& traj, double level, double period,
                             double discard_fraction = 0.5);

struct PulsatingCheck {
  double residual = 0.0;  // sup norm over the overlap
  double t_ref = 0.0;     // reference snapshot time
  double t_shift = 0.0;   // L / c
  int n_overlap = 0;
};

/// Verifies U(t + L/c, x + L) = U(t, x) on stored snapshots, interpolating
/// linearly in time. Throws when the snapshot cadence exceeds 0.1 L/|c|.
PulsatingCheck check_pulsating_relation(const Trajectory& traj, double period,
                                        double speed);

enum class TailSide { ahead, behind };

/// Exponential tail fit of a front profile on one side.
struct DecayFit {
  TailSide side = TailSide::ahead;
  double rate = 0.0;         // fitted lambda (positive)
  double rms_residual = 0.0; // in log space
  double rate_theory = 0.0;
  int n = 0;
};

/// lambda_plus = (c + sqrt(c^2 - 4 fp)) / 2 for the tail ahead of the front.
double decay_rate_ahead(double c, double fprime_at_limit);
/// lambda_minus = (-c + sqrt(c^2 - 4 fp)) / 2 for the tail behind.
double decay_rate_behind(double c, double fprime_at_limit);

struct DecayOptions {
  double value_floor = 1e-9;   // never fit below this distance from the limit
  double band = 0.05;          // fit only inside the homogeneous band
  int boundary_margin_nodes = 5;
  double trim_period = 0.0;    // >0 trims the window to whole periods
};

/// Tail fits of a converged rightward-oriented profile (upper state on the
/// left). ahead = approach to `lower` on the right, behind = approach to
/// `upper` on the left. The theoretical rates use the supplied speed and
/// level derivatives.
std::pair<DecayFit, DecayFit> fit_decay(const Field1D& field, double lower,
                                        double upper, double speed,
                                        double fprime_lower, double fprime_upper,
                                        const DecayOptions& opt);

enum class TerraceVerdict { valid, invalid, inconclusive };

const char* to_string(TerraceVerdict v);

struct TerraceFront {
  double upper = 0.0;
  double lower = 0.0;
  double level = 0.0;  // tracked level used for the speed fit
  SpeedEstimate speed;
};

struct TerraceReport {
  Orientation direction = Orientation::right_moving;
  std::vector<double> platforms;  // descending, extremes included
  std::vector<TerraceFront> fronts;
  TerraceVerdict verdict = TerraceVerdict::inconclusive;
  std::vector<double> plateau_slopes;  // aligned with candidates
  std::vector<double> candidates;
};

struct TerraceOptions {
  double slope_threshold = 0.01;  // plateau growth rate accepting a platform
  double discard_fraction = 0.5;
};

/// Detects intermediate platforms by linear growth of the plateau measure
/// over the last half of the run, then fits speeds of the fronts between
/// consecutive platforms and checks the terrace ordering.
TerraceReport extract_terrace(const Trajectory& traj,
                              const std::vector<double>& candidate_levels,
                              double period, Orientation direction,
                              const TerraceOptions& opt = {});

}  // namespace pulselab

#endif

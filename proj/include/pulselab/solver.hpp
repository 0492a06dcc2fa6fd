#ifndef PULSELAB_SOLVER_HPP
#define PULSELAB_SOLVER_HPP

#include <vector>

#include "pulselab/grid.hpp"
#include "pulselab/reaction.hpp"

namespace pulselab {

enum class Scheme { cn_imex, be_imex, explicit_euler };
enum class Boundary { clamp_to_levels, zero_flux, periodic };

/// Time stepping configuration for du/dt = Lap u + f(x,u). Diffusion is
/// implicit (theta = 1/2 for cn-imex, 1 for be-imex), the reaction explicit.
struct SolverConfig {
  double dt = 2.5e-3;
  double t_end = 1.0;
  Scheme scheme = Scheme::cn_imex;
  Boundary boundary = Boundary::clamp_to_levels;

  double record_every = 0.5;       // trajectory record cadence (time)
  double snapshot_every = 0.0;     // 0 disables field snapshots
  double snapshot_from = 0.0;      // first snapshot time

  bool moving_window = false;
  double recenter_threshold = 10.0;    // drift before the window recenters
  double window_level = -1.0;          // tracked level; <0 picks the midlevel

  std::vector<double> track_levels;    // front positions recorded per level
  std::vector<double> plateau_levels;  // plateau widths recorded per level
  double plateau_halfband = -1.0;      // <0 picks delta0 / 2

  bool check_contamination = true;     // outflow boundary monitor

  void validate() const;
};

struct TrajectoryRecord {
  double t = 0.0;
  std::vector<double> front_pos;   // absolute coordinates, NaN when absent
  std::vector<double> plateau_w;   // measure of {|u - q| < halfband}
  double shift = 0.0;
};

struct SnapshotRecord {
  double t = 0.0;
  double x0_abs = 0.0;  // absolute coordinate of node 0
  double dx = 0.0;
  std::vector<double> u;
};

struct Trajectory {
  std::vector<double> track_levels;
  std::vector<double> plateau_levels;
  std::vector<TrajectoryRecord> records;
  std::vector<SnapshotRecord> snapshots;
  int recenter_events = 0;

  const TrajectoryRecord& back() const { return records.back(); }
  /// Time series of the tracked level's absolute front position.
  void series(double level, std::vector<double>& t, std::vector<double>& pos) const;
};

struct EvolveResult {
  Trajectory trajectory;
  Field1D final_field;
};

struct EvolveResult2D {
  Trajectory trajectory;
  Field2D final_field;
};

/// Front-like initial data between two stable levels. Right-moving places
/// the upper state on the left (invasion advances rightward); left-moving
/// is the mirror image.
enum class Orientation { right_moving, left_moving };

Field1D front_initial(const Grid1D& grid, Orientation orientation, double upper,
                      double lower, double x0 = 0.0);

/// Monotone staircase through all levels of a stacked reaction; the level-k
/// front (between levels k-1 and k counted from the top) is centered at
/// x0 - (k-1) * gap for right-moving data.
Field1D staircase_initial(const Grid1D& grid, const std::vector<double>& levels,
                          Orientation orientation, double gap, double x0 = 0.0);

/// One time step. Throws NumericError on divergence (values outside
/// [min level - 1, max level + 1]).
void step(Field1D& field, const Reaction& r, const SolverConfig& cfg);

/// Repeated stepping with observer sampling, optional field snapshots and
/// an optional moving window that recenters by whole periods.
EvolveResult evolve(const Field1D& initial, const Reaction& r, const SolverConfig& cfg);

// --- 2-D (rotated frame, Strang-split implicit sweeps) ---

Field2D front_initial_2d(const Grid2D& grid, double upper, double lower,
                         double xi0 = 0.0);

void step_2d(Field2D& field, const Reaction& r, const SolverConfig& cfg);

/// 2-D evolution; fronts are tracked on the transverse-mean profile.
/// `xi_period` is the longitudinal recentering quantum (whole multiples
/// keep the reaction samples aligned).
EvolveResult2D evolve_2d(const Field2D& initial, const Reaction& r,
                         const SolverConfig& cfg, double xi_period);

/// Longitudinal period of the reaction in the rotated frame `dir`
/// (smallest q > 0 with f(x + q dir, u) = f(x, u)); throws if none found.
double frame_longitudinal_period(const Reaction& r, const double* dir);

/// Transverse period candidate for the rotated frame (smallest q > 0 with
/// f(x + q dir_perp, u) = f(x, u)).
double frame_transverse_period(const Reaction& r, const double* dir);

}  // namespace pulselab

#endif

#ifndef PULSELAB_DESIGN_HPP
#define PULSELAB_DESIGN_HPP

#include <vector>

#include "pulselab/frontmetrics.hpp"
#include "pulselab/reaction.hpp"
#include "pulselab/solver.hpp"

namespace pulselab {

/// Numerics profile shared by all speed measurements. 2-D runs use the
/// *_2d variants and derive the transverse node count from deta_target.
struct MeasureProfile {
  double dx = 0.05;
  double dt = 2.5e-3;
  double t_end = 200.0;
  double half_width = 60.0;
  double record_every = 0.25;
  double discard_fraction = 0.5;
  double recenter_threshold = 5.0;
  bool moving_window = true;
  Scheme scheme = Scheme::cn_imex;

  double t_end_2d = 150.0;
  double half_width_2d = 30.0;
  double deta_target = 1.0 / 24.0;

  /// Similarity-scaled profile for a reaction rescaled by nu (lengths by
  /// 1/nu, times by 1/nu^2): the step count and node count stay put.
  MeasureProfile scaled(double nu) const;
};

struct SpeedPairResult {
  SpeedEstimate left;
  SpeedEstimate right;
};

/// Rightward front speed of r in one simulation. Leftward speeds are the
/// rightward speeds of the space-reflected reaction.
SpeedEstimate measure_speed(const ReactionPtr& r, Orientation orientation,
                            const MeasureProfile& prof);

/// Converged rightward front profile (for decay fits); also returns the
/// measured speed estimate.
std::pair<Field1D, SpeedEstimate> converged_profile(const ReactionPtr& r,
                                                    Orientation orientation,
                                                    const MeasureProfile& prof);

/// Speed of the pulsating wave of a 2-D reaction in direction `dir`,
/// simulated in the rotated frame.
SpeedEstimate measure_speed_dir(const ReactionPtr& r, const std::vector<double>& dir,
                                const MeasureProfile& prof);

/// (c_L, c_R) of a reaction by two independent mirrored runs; rejects pairs
/// whose classifications carry opposite strict signs.
SpeedPairResult speed_pair(const ReactionPtr& r, const MeasureProfile& prof);

struct SpeedMapRow {
  double tau = 0.0;
  SpeedEstimate left;
  SpeedEstimate right;
};

/// Sampled tau -> (c_L, c_R) map of the one-parameter family at fixed sigma.
std::vector<SpeedMapRow> speed_map_1d(const std::vector<double>& taus, double sigma,
                                      const MeasureProfile& prof, int jobs = 1);

/// Nondecreasing within 3 stderr along the sampled grid?
bool speed_map_monotone(const std::vector<SpeedMapRow>& rows);

struct DesignIteration {
  int iter = 0;
  std::vector<double> tau;
  double c_left = 0.0;
  double c_right = 0.0;
  double residual = 0.0;
};

struct DesignResult {
  std::vector<double> tau;
  double nu = 1.0;
  bool reflected = false;  // negative targets realized via u -> 1-u, x -> -x
  ReactionPtr reaction;
  std::vector<double> targets;
  std::vector<double> achieved;
  std::vector<SpeedEstimate> achieved_estimates;
  std::vector<DesignIteration> log;
};

/// Realizes a prescribed (leftward, rightward) speed pair: bisection on tau
/// for the speed ratio, then the similarity rescaling nu. Both targets must
/// share a sign; the negative quadrant is served by reflection.
DesignResult design_1d(double c_left_target, double c_right_target, double sigma,
                       const MeasureProfile& prof);

struct MultiDirSpec {
  std::vector<std::vector<double>> dirs;
  std::vector<double> period_vector;
  std::vector<double> periods;  // quanta M_j; empty = derive via membership
  double sigma = 0.1;
  double delta0 = 0.05;
};

/// Realizes prescribed speeds in N lattice directions by cyclic
/// per-coordinate bisection of tau (order preservation makes each sweep
/// monotone), followed by a global rescale when allowed. With
/// allow_rescale = false the targets must fit inside the reachable box.
DesignResult design_multidir(const std::vector<double>& targets, const MultiDirSpec& spec,
                             const MeasureProfile& prof, bool allow_rescale = true,
                             int jobs = 1);

enum class TerraceVariant { shared_platforms, disjoint_platforms, single_front };

struct TerraceScenario {
  TerraceVariant variant = TerraceVariant::shared_platforms;
  ReactionPtr reaction;                     // the stacked reaction
  std::vector<ReactionPtr> components;      // bottom to top
  std::vector<double> targets_right;        // per front, top front first
  std::vector<double> targets_left;
  std::vector<double> achieved_right;
  std::vector<double> achieved_left;
  std::vector<double> expected_platforms_right;  // intermediate levels only
  std::vector<double> expected_platforms_left;
  double eta_star = 0.0;
  std::vector<DesignResult> designs;        // per level, top front first
};

/// Builds the stacked reaction whose per-level speed pairs follow the
/// variant's ordering; speeds are chosen as fixed fractions of the
/// empirical eta* so every component keeps period one.
TerraceScenario terrace_scenario(TerraceVariant variant, int n_fronts, double sigma,
                                 const MeasureProfile& prof, int jobs = 1);

struct DirectionalSample {
  std::vector<double> dir;
  double speed = 0.0;
};

/// Freidlin-Gartner spreading envelope w*(e) = min over samples e' with
/// e'.e > 0 of c*(e') / (e'.e), for each query direction.
std::vector<double> fg_envelope(const std::vector<DirectionalSample>& samples,
                                const std::vector<std::vector<double>>& queries);

}  // namespace pulselab

#endif

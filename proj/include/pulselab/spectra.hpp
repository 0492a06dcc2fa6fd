#ifndef PULSELAB_SPECTRA_HPP
#define PULSELAB_SPECTRA_HPP

#include <string>
#include <vector>

#include "pulselab/reaction.hpp"
#include "pulselab/solver.hpp"

namespace pulselab {

/// A periodic steady state of u'' + f(x,u) = 0 on one cell (or Lap u + f
/// in 2-D), tagged by the principal eigenvalue of its linearization.
struct SteadyState {
  std::vector<double> profile;  // n nodes (1-D) or n1*n2 nodes (2-D)
  double residual = 0.0;        // max norm of the steady equation
  double lambda1 = 0.0;
  bool stable = false;
  double mean = 0.0;
  double min_value = 0.0;
  double max_value = 0.0;
};

struct SpectraOptions {
  int n = 256;            // nodes per cell axis (1-D); 2-D uses n_2d
  int n_2d = 24;          // nodes per axis for 2-D cells
  int newton_max_iter = 100;
  double newton_tol = 1e-11;    // max-norm residual target
  int harvest_runs = 20;        // randomized relaxation seeds
  double harvest_t = 30.0;
  unsigned seed = 12345u;
  double instability_floor = 1e-6;  // lambda1 above this counts as unstable
  long power_max_iter = 100000;
};

/// Principal eigenvalue of psi'' + q psi = lambda psi on the periodic cell
/// (largest eigenvalue, positive eigenfunction), by shifted power iteration
/// with a dense fallback for small problems. The grid spacing is h.
double principal_eigenvalue_periodic(const std::vector<double>& potential, double h,
                                     std::vector<double>* eigenvector = nullptr,
                                     long max_iter = 100000);

/// 2-D variant on an n1 x n2 doubly periodic cell (row-major potential).
double principal_eigenvalue_periodic_2d(const std::vector<double>& potential,
                                        int n1, int n2, double h1, double h2,
                                        std::vector<double>* eigenvector = nullptr,
                                        long max_iter = 100000);

/// Principal eigenvalue of the linearization of the steady equation about
/// the state `u` sampled on the reaction's cell.
double principal_eigenvalue(const Reaction& r, const std::vector<double>& u,
                            const SpectraOptions& opt = {});

/// Damped Newton search for periodic steady states from constant, midlevel
/// and harvested seeds; deduplicated and tagged. Non-convergent seeds are
/// dropped. Results are sorted by mean value.
std::vector<SteadyState> find_steady_states(const Reaction& r,
                                            const SpectraOptions& opt = {});

struct CertifyReport {
  bool certified = false;
  std::string reason;
  std::vector<SteadyState> states;
  int witness = -1;  // offending state when refused
};

/// Bistable structure check: both extreme levels linearly stable, every
/// discovered intermediate periodic steady state unstable. Stacked
/// reactions are certified component by component.
CertifyReport certify_bistable(const Reaction& r, const SpectraOptions& opt = {});

struct SubsolutionScan {
  double min = 0.0;
  double max = 0.0;
};

/// Residual v'' + f(x, v) of the shifted kink v(x) = U0(s(x . dir) + xi)
/// (s = +1 rightward, -1 leftward), evaluated in closed form. Subsolution
/// iff min >= -1e-10, strict iff additionally max > 0.
SubsolutionScan subsolution_residual(const Reaction& r, double xi,
                                     Orientation orientation,
                                     const std::vector<double>& dir = {},
                                     int n_samples = 4001);

}  // namespace pulselab

#endif

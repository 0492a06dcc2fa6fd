#ifndef PULSELAB_GRID_HPP
#define PULSELAB_GRID_HPP

#include <vector>

namespace pulselab {

/// Uniform 1-D grid with nodes x_min + i dx, i = 0 .. nx-1.
struct Grid1D {
  double x_min = 0.0;
  double x_max = 1.0;
  int nx = 0;

  double dx() const { return (x_max - x_min) / (nx - 1); }
  double x(int i) const { return x_min + i * dx(); }
  void validate() const;
};

/// Node values on a 1-D grid. `shift` is the cumulative moving-window
/// displacement: the absolute coordinate of node i is grid.x(i) + shift.
struct Field1D {
  Grid1D grid;
  std::vector<double> u;
  double shift = 0.0;

  double x_abs(int i) const { return grid.x(i) + shift; }
};

/// Rotated 2-D frame: longitudinal coordinate xi along `dir`, transverse
/// eta along the rotated normal, periodic with period P (eta nodes
/// j * P/n_eta, j = 0 .. n_eta-1, wrapping).
struct Grid2D {
  double xi_min = 0.0;
  double xi_max = 1.0;
  int n_xi = 0;
  double transverse_period = 1.0;
  int n_eta = 0;
  double dir[2] = {1.0, 0.0};

  double dxi() const { return (xi_max - xi_min) / (n_xi - 1); }
  double deta() const { return transverse_period / n_eta; }
  double xi(int i) const { return xi_min + i * dxi(); }
  double eta(int j) const { return j * deta(); }
  /// Physical point of node (i, j).
  void point(int i, int j, double* xy) const;
  void validate() const;
};

/// Node values on a 2-D grid, xi-major layout: u[i * n_eta + j].
struct Field2D {
  Grid2D grid;
  std::vector<double> u;
  double shift = 0.0;  // cumulative window displacement along xi

  double& at(int i, int j) { return u[static_cast<size_t>(i) * grid.n_eta + j]; }
  double at(int i, int j) const { return u[static_cast<size_t>(i) * grid.n_eta + j]; }
};

}  // namespace pulselab

#endif

#ifndef PULSELAB_REACTION_HPP
#define PULSELAB_REACTION_HPP

#include <memory>
#include <optional>
#include <vector>

namespace pulselab {

// ---------------------------------------------------------------------------
// Balanced cubic and its standing kink
// ---------------------------------------------------------------------------

/// f0(u) = u (1-u) (u-1/2), the balanced cubic. Both 0 and 1 are stable
/// zeros with f0'(0) = f0'(1) = -1/2; the integral over [0,1] vanishes.
double cubic_balanced(double u);

/// f0'(u) = -3u^2 + 3u - 1/2.
double cubic_balanced_du(double u);

/// Standing front of u'' + f0(u) = 0: U0(x) = 1 / (1 + exp(x / sqrt 2)).
/// Strictly decreasing, U0(0) = 1/2, U0(-inf) = 1, U0(+inf) = 0.
double kink(double x);

/// U0'(x) = -U0 (1 - U0) / sqrt 2 (always negative).
double kink_deriv(double x);

/// Inverse of the kink: sqrt(2) ln((1-u)/u) for u in (0,1); rejects others.
double kink_inverse(double u);

// ---------------------------------------------------------------------------
// The comb function chi
// ---------------------------------------------------------------------------

/// Largest legal half-width of the homogeneous state band: on
/// [-d,d] u [1-d,1+d] the cubic satisfies f0' <= -1/4 exactly up to this
/// value, the smaller root of 3u^2 - 3u + 1/4.
double delta0_legal_max();

enum class BumpProfile { sin_squared };

/// Parameters of the periodic comb chi(z,u): spatial period M and the state
/// band half-width delta0 inside which chi vanishes identically.
struct ChiParams {
  double period = 1.0;
  double delta0 = 0.05;
  BumpProfile profile = BumpProfile::sin_squared;

  void validate() const;
};

/// chi(z,u) = sin^2(pi theta) rho(u) with theta = frac((z - U0^{-1}(u))/M).
/// C1 on R^2, M-periodic in z, valued in [0,1]; vanishes for
/// u outside (delta0, 1-delta0) and on the kink graph u = U0(z mod M);
/// strictly positive for 2 delta0 <= u <= 1-2 delta0 away from the graph.
double chi(double z, double u, const ChiParams& p);

/// Partial derivative of chi with respect to the state variable.
double chi_du(double z, double u, const ChiParams& p);

/// C1 plateau ramp in the state variable: 0 on [0,d] u [1-d,1],
/// 1 on [2d, 1-2d], cubic in between.
double chi_ramp(double u, double delta0);

// ---------------------------------------------------------------------------
// Reactions
// ---------------------------------------------------------------------------

/// A spatially periodic reaction term f(x,u). Immutable after construction
/// and safe to share read-only across threads.
class Reaction {
 public:
  virtual ~Reaction() = default;

  /// f(x, u); x points to dim() coordinates.
  virtual double value(const double* x, double u) const = 0;
  /// Exact partial derivative with respect to u.
  virtual double deriv_u(const double* x, double u) const = 0;

  int dim() const { return dim_; }
  /// Period per axis.
  const std::vector<double>& period() const { return period_; }
  /// Stable levels, ascending.
  const std::vector<double>& levels() const { return levels_; }
  /// Common value of du f at every stable level (negative).
  double gamma() const { return gamma_; }
  /// Homogeneous band half-width around each level.
  double delta0() const { return delta0_; }

  double min_level() const { return levels_.front(); }
  double max_level() const { return levels_.back(); }

  /// Convenience for one-dimensional reactions.
  double value1(double x, double u) const { return value(&x, u); }
  double deriv_u1(double x, double u) const { return deriv_u(&x, u); }

 protected:
  Reaction(int dim, std::vector<double> period, std::vector<double> levels,
           double gamma, double delta0);

 private:
  int dim_;
  std::vector<double> period_;
  std::vector<double> levels_;
  double gamma_;
  double delta0_;
};

using ReactionPtr = std::shared_ptr<const Reaction>;

/// Homogeneous balanced cubic as a Reaction (period 1 per axis by
/// convention; the value does not depend on x).
ReactionPtr make_cubic(int dim = 1);

/// f(x,u) = f0(u) + sigma_r chi(x,u) + sigma_l chi(-x,u), period 1.
/// sigma_r drives the leftward speed, sigma_l the rightward one; either
/// may be zero but not both negative.
ReactionPtr make_family_1d_pair(double sigma_r, double sigma_l, double delta0 = 0.05);

/// One-parameter slice f(x,u;tau) = f0 + sigma chi(x,u) + tau sigma chi(-x,u),
/// tau in [0,1], sigma > 0. Pointwise nondecreasing in tau.
ReactionPtr make_family_1d(double tau, double sigma, double delta0 = 0.05);

/// Multi-direction family
///   f(x,u) = f0(u) + sigma sum_j tau_j prod_{l != j} chi(x.zeta_l, u; M_l),
/// L-periodic when every zeta_j lies in S_L with quantum M_j.
ReactionPtr make_family_multidir(const std::vector<double>& tau, double sigma,
                                 const std::vector<std::vector<double>>& dirs,
                                 const std::vector<double>& periods,
                                 const std::vector<double>& period_vector,
                                 double delta0 = 0.05);

/// Stack of 1-D bistable components sharing period, gamma and delta0.
/// components[j] governs u in (j, j+1]; levels become {0, 1, ..., I}.
/// Outside [0, I] the reaction continues linearly with slope gamma.
ReactionPtr make_stacked(const std::vector<ReactionPtr>& components);

/// nu^2 f(nu x, u): period L/nu, level derivative nu^2 gamma.
ReactionPtr make_rescaled(ReactionPtr inner, double nu);

/// u -> (top + bottom - u) conjugation: flips the sign of every wave speed
/// and swaps the roles of the two orientations.
ReactionPtr reflect_state(ReactionPtr inner);

/// x -> -x conjugation: swaps leftward and rightward speeds.
ReactionPtr reflect_space(ReactionPtr inner);

/// Components of a stacked reaction (bottom to top), or nullptr.
const std::vector<ReactionPtr>* stacked_components(const Reaction& r);

// ---------------------------------------------------------------------------
// Direction lattice and integral sign
// ---------------------------------------------------------------------------

/// Tests zeta in S_L: searches M > 0 with L_i zeta.e_i in M Z for all i,
/// by a continued-fraction rational search (denominator cap 1e6,
/// tolerance 1e-9 on the integer multiples). Returns M or nullopt.
std::optional<double> membership_SL(const std::vector<double>& zeta,
                                    const std::vector<double>& period_vector);

/// Unit vectors of S^1 with rational coordinates, enumerated by the height
/// of their stereographic preimage. Always starts with (1,0).
std::vector<std::vector<double>> rational_directions(int count);

enum class IntegralSign { negative, zero_within_tol, positive };

struct IntegralResult {
  double value = 0.0;     // integral of f over one cell and the state range
  double tol = 0.0;       // classification tolerance used
  IntegralSign sign = IntegralSign::zero_within_tol;
};

/// Composite quadrature of f over [levels.front(), levels.back()] x cell,
/// classified with tolerance 1e-8 * cell volume.
IntegralResult integral_sign(const Reaction& r);

/// Sampled bound on |du f| over one cell and the state range, padded by
/// delta0. Used for comparison-principle time step checks.
double lipschitz_u(const Reaction& r, int n_x = 128, int n_u = 257);

/// Max sampled periodicity residual |f(x + k L, u) - f(x, u)| over random
/// probe points; deterministic given the seed.
double periodicity_residual(const Reaction& r, int samples = 200,
                            unsigned seed = 7u);

}  // namespace pulselab

#endif

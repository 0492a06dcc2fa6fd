#include "pulselab/reaction.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "pulselab/common.hpp"
#include "pulselab/linalg.hpp"

namespace pulselab {

double cubic_balanced(double u) { return u * (1.0 - u) * (u - 0.5); }

double cubic_balanced_du(double u) { return -3.0 * u * u + 3.0 * u - 0.5; }

double kink(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x / kSqrt2);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x / kSqrt2));
}

double kink_deriv(double x) {
  const double u = kink(x);
  return -u * (1.0 - u) / kSqrt2;
}

double kink_inverse(double u) {
  if (!(u > 0.0 && u < 1.0)) throw ConfigError("kink_inverse: u must lie in (0,1)");
  return kSqrt2 * std::log((1.0 - u) / u);
}

double delta0_legal_max() {
  // smaller root of 3u^2 - 3u + 1/4 = 0
  return (3.0 - std::sqrt(6.0)) / 6.0;
}

void ChiParams::validate() const {
  if (!(period > 0.0)) throw ConfigError("ChiParams: period must be positive");
  if (!(delta0 > 0.0 && delta0 < 0.25)) throw ConfigError("ChiParams: delta0 must lie in (0, 1/4)");
  if (delta0 > delta0_legal_max() + 1e-15)
    throw ConfigError("ChiParams: delta0 exceeds the band where f0' <= -1/4");
}

namespace {

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }
double smoothstep_d(double t) { return 6.0 * t * (1.0 - t); }

}  // namespace

double chi_ramp(double u, double d) {
  if (u <= d || u >= 1.0 - d) return 0.0;
  if (u < 2.0 * d) return smoothstep((u - d) / d);
  if (u > 1.0 - 2.0 * d) return smoothstep((1.0 - d - u) / d);
  return 1.0;
}

static double chi_ramp_du(double u, double d) {
  if (u <= d || u >= 1.0 - d) return 0.0;
  if (u < 2.0 * d) return smoothstep_d((u - d) / d) / d;
  if (u > 1.0 - 2.0 * d) return -smoothstep_d((1.0 - d - u) / d) / d;
  return 0.0;
}

double chi(double z, double u, const ChiParams& p) {
  const double rho = chi_ramp(u, p.delta0);
  if (rho == 0.0) return 0.0;
  double theta = (z - kink_inverse(u)) / p.period;
  theta -= std::floor(theta);
  const double s = std::sin(M_PI * theta);
  return s * s * rho;
}

double chi_du(double z, double u, const ChiParams& p) {
  const double rho = chi_ramp(u, p.delta0);
  if (rho == 0.0) return 0.0;
  double theta = (z - kink_inverse(u)) / p.period;
  theta -= std::floor(theta);
  const double s = std::sin(M_PI * theta);
  const double bump = s * s;
  const double bump_dtheta = M_PI * std::sin(2.0 * M_PI * theta);
  // d theta / du = -d/du U0^{-1}(u) / M = sqrt(2) / (u (1-u) M)
  const double dtheta_du = kSqrt2 / (u * (1.0 - u) * p.period);
  return bump_dtheta * dtheta_du * rho + bump * chi_ramp_du(u, p.delta0);
}

// ---------------------------------------------------------------------------

Reaction::Reaction(int dim, std::vector<double> period, std::vector<double> levels,
                   double gamma, double delta0)
    : dim_(dim),
      period_(std::move(period)),
      levels_(std::move(levels)),
      gamma_(gamma),
      delta0_(delta0) {}

namespace {

class CubicReaction final : public Reaction {
 public:
  explicit CubicReaction(int dim)
      : Reaction(dim, std::vector<double>(dim, 1.0), {0.0, 1.0}, -0.5, 0.05) {}
  double value(const double*, double u) const override { return cubic_balanced(u); }
  double deriv_u(const double*, double u) const override { return cubic_balanced_du(u); }
};

class Family1D final : public Reaction {
 public:
  Family1D(double sigma_r, double sigma_l, double delta0)
      : Reaction(1, {1.0}, {0.0, 1.0}, -0.5, delta0),
        sigma_r_(sigma_r),
        sigma_l_(sigma_l),
        chi_{1.0, delta0, BumpProfile::sin_squared} {
    chi_.validate();
    if (sigma_r < 0.0 || sigma_l < 0.0)
      throw ConfigError("family_1d: comb amplitudes must be nonnegative");
  }
  double value(const double* x, double u) const override {
    double f = cubic_balanced(u);
    if (sigma_r_ != 0.0) f += sigma_r_ * chi(*x, u, chi_);
    if (sigma_l_ != 0.0) f += sigma_l_ * chi(-*x, u, chi_);
    return f;
  }
  double deriv_u(const double* x, double u) const override {
    double f = cubic_balanced_du(u);
    if (sigma_r_ != 0.0) f += sigma_r_ * chi_du(*x, u, chi_);
    if (sigma_l_ != 0.0) f += sigma_l_ * chi_du(-*x, u, chi_);
    return f;
  }

 private:
  double sigma_r_, sigma_l_;
  ChiParams chi_;
};

class FamilyMultiDir final : public Reaction {
 public:
  FamilyMultiDir(std::vector<double> tau, double sigma,
                 std::vector<std::vector<double>> dirs, std::vector<double> periods,
                 std::vector<double> period_vector, double delta0)
      : Reaction(static_cast<int>(dirs.empty() ? 0 : dirs[0].size()),
                 period_vector, {0.0, 1.0}, -0.5, delta0),
        tau_(std::move(tau)),
        sigma_(sigma),
        dirs_(std::move(dirs)) {
    const size_t n = dirs_.size();
    if (n < 2) throw ConfigError("family_multidir: need at least two directions");
    if (tau_.size() != n || periods.size() != n)
      throw ConfigError("family_multidir: tau/dirs/periods size mismatch");
    if (!(sigma > 0.0)) throw ConfigError("family_multidir: sigma must be positive");
    for (double t : tau_)
      if (t < 0.0 || t > 1.0) throw ConfigError("family_multidir: tau_j must lie in [0,1]");
    chis_.reserve(n);
    for (size_t j = 0; j < n; ++j) {
      if (dirs_[j].size() != static_cast<size_t>(dim()))
        throw ConfigError("family_multidir: inconsistent direction dimensions");
      double norm2 = 0.0;
      for (double c : dirs_[j]) norm2 += c * c;
      if (std::fabs(std::sqrt(norm2) - 1.0) > 1e-12)
        throw ConfigError("family_multidir: directions must be unit vectors");
      // Declared quantum must make z -> chi(z) L-periodic along every axis.
      for (int i = 0; i < dim(); ++i) {
        const double m = period_vector[i] * dirs_[j][i] / periods[j];
        if (!nearly_integer(m, 1e-9))
          throw ConfigError("family_multidir: direction fails the S_L membership test");
      }
      chis_.push_back(ChiParams{periods[j], delta0, BumpProfile::sin_squared});
      chis_.back().validate();
    }
  }

  double value(const double* x, double u) const override {
    double f = cubic_balanced(u);
    if (u <= delta0() || u >= 1.0 - delta0()) return f;
    const size_t n = dirs_.size();
    double z[8], c[8];
    for (size_t l = 0; l < n; ++l) {
      z[l] = 0.0;
      for (int i = 0; i < dim(); ++i) z[l] += x[i] * dirs_[l][i];
      c[l] = chi(z[l], u, chis_[l]);
    }
    for (size_t j = 0; j < n; ++j) {
      if (tau_[j] == 0.0) continue;
      double prod = 1.0;
      for (size_t l = 0; l < n; ++l)
        if (l != j) prod *= c[l];
      f += sigma_ * tau_[j] * prod;
    }
    return f;
  }

  double deriv_u(const double* x, double u) const override {
    double f = cubic_balanced_du(u);
    if (u <= delta0() || u >= 1.0 - delta0()) return f;
    const size_t n = dirs_.size();
    double z[8], c[8], cd[8];
    for (size_t l = 0; l < n; ++l) {
      z[l] = 0.0;
      for (int i = 0; i < dim(); ++i) z[l] += x[i] * dirs_[l][i];
      c[l] = chi(z[l], u, chis_[l]);
      cd[l] = chi_du(z[l], u, chis_[l]);
    }
    for (size_t j = 0; j < n; ++j) {
      if (tau_[j] == 0.0) continue;
      double sum = 0.0;
      for (size_t l = 0; l < n; ++l) {
        if (l == j) continue;
        double prod = cd[l];
        for (size_t m = 0; m < n; ++m)
          if (m != j && m != l) prod *= c[m];
        sum += prod;
      }
      f += sigma_ * tau_[j] * sum;
    }
    return f;
  }

 private:
  std::vector<double> tau_;
  double sigma_;
  std::vector<std::vector<double>> dirs_;
  std::vector<ChiParams> chis_;
};

class StackedReaction final : public Reaction {
 public:
  explicit StackedReaction(std::vector<ReactionPtr> comps)
      : Reaction(1, comps.at(0)->period(), make_levels(comps.size()),
                 comps.at(0)->gamma(), comps.at(0)->delta0()),
        comps_(std::move(comps)) {
    for (const auto& c : comps_) {
      if (c->dim() != 1) throw ConfigError("stack: components must be one-dimensional");
      if (c->levels() != std::vector<double>{0.0, 1.0})
        throw ConfigError("stack: components must connect 0 and 1");
      if (std::fabs(c->period()[0] - period()[0]) > 1e-12)
        throw ConfigError("stack: components must share the period");
      if (std::fabs(c->gamma() - gamma()) > 1e-12)
        throw ConfigError("stack: components must share the level derivative");
      if (std::fabs(c->delta0() - delta0()) > 1e-12)
        throw ConfigError("stack: components must share delta0");
    }
  }

  double value(const double* x, double u) const override {
    const double top = static_cast<double>(comps_.size());
    if (u <= 0.0) return gamma() * u;
    if (u > top) return gamma() * (u - top);
    const int m = std::min<int>(static_cast<int>(comps_.size()) - 1,
                                static_cast<int>(std::ceil(u)) - 1);
    return comps_[m]->value(x, u - m);
  }

  double deriv_u(const double* x, double u) const override {
    const double top = static_cast<double>(comps_.size());
    if (u <= 0.0 || u > top) return gamma();
    const int m = std::min<int>(static_cast<int>(comps_.size()) - 1,
                                static_cast<int>(std::ceil(u)) - 1);
    return comps_[m]->deriv_u(x, u - m);
  }

  const std::vector<ReactionPtr>& components() const { return comps_; }

 private:
  static std::vector<double> make_levels(size_t n) {
    std::vector<double> v(n + 1);
    for (size_t i = 0; i <= n; ++i) v[i] = static_cast<double>(i);
    return v;
  }
  std::vector<ReactionPtr> comps_;
};

class RescaledReaction final : public Reaction {
 public:
  RescaledReaction(ReactionPtr inner, double nu)
      : Reaction(inner->dim(), scale(inner->period(), nu), inner->levels(),
                 nu * nu * inner->gamma(), inner->delta0()),
        inner_(std::move(inner)),
        nu_(nu) {}

  double value(const double* x, double u) const override {
    double xs[8];
    for (int i = 0; i < dim(); ++i) xs[i] = nu_ * x[i];
    return nu_ * nu_ * inner_->value(xs, u);
  }
  double deriv_u(const double* x, double u) const override {
    double xs[8];
    for (int i = 0; i < dim(); ++i) xs[i] = nu_ * x[i];
    return nu_ * nu_ * inner_->deriv_u(xs, u);
  }

 private:
  static std::vector<double> scale(std::vector<double> p, double nu) {
    for (double& v : p) v /= nu;
    return p;
  }
  ReactionPtr inner_;
  double nu_;
};

class StateReflected final : public Reaction {
 public:
  explicit StateReflected(ReactionPtr inner)
      : Reaction(inner->dim(), inner->period(), inner->levels(), inner->gamma(),
                 inner->delta0()),
        inner_(std::move(inner)),
        pivot_(inner_->min_level() + inner_->max_level()) {}

  double value(const double* x, double u) const override {
    return -inner_->value(x, pivot_ - u);
  }
  double deriv_u(const double* x, double u) const override {
    return inner_->deriv_u(x, pivot_ - u);
  }

 private:
  ReactionPtr inner_;
  double pivot_;
};

class SpaceReflected final : public Reaction {
 public:
  explicit SpaceReflected(ReactionPtr inner)
      : Reaction(inner->dim(), inner->period(), inner->levels(), inner->gamma(),
                 inner->delta0()),
        inner_(std::move(inner)) {}

  double value(const double* x, double u) const override {
    double xs[8];
    for (int i = 0; i < dim(); ++i) xs[i] = -x[i];
    return inner_->value(xs, u);
  }
  double deriv_u(const double* x, double u) const override {
    double xs[8];
    for (int i = 0; i < dim(); ++i) xs[i] = -x[i];
    return inner_->deriv_u(xs, u);
  }

 private:
  ReactionPtr inner_;
};

}  // namespace

ReactionPtr make_cubic(int dim) {
  if (dim < 1 || dim > 8) throw ConfigError("make_cubic: dim must lie in [1,8]");
  return std::make_shared<CubicReaction>(dim);
}

ReactionPtr make_family_1d_pair(double sigma_r, double sigma_l, double delta0) {
  return std::make_shared<Family1D>(sigma_r, sigma_l, delta0);
}

ReactionPtr make_family_1d(double tau, double sigma, double delta0) {
  if (!(sigma > 0.0)) throw ConfigError("family_1d: sigma must be positive");
  if (tau < 0.0 || tau > 1.0) throw ConfigError("family_1d: tau must lie in [0,1]");
  return std::make_shared<Family1D>(sigma, tau * sigma, delta0);
}

ReactionPtr make_family_multidir(const std::vector<double>& tau, double sigma,
                                 const std::vector<std::vector<double>>& dirs,
                                 const std::vector<double>& periods,
                                 const std::vector<double>& period_vector,
                                 double delta0) {
  if (dirs.empty() || dirs[0].empty() || dirs[0].size() > 8)
    throw ConfigError("family_multidir: bad direction list");
  if (period_vector.size() != dirs[0].size())
    throw ConfigError("family_multidir: period vector dimension mismatch");
  return std::make_shared<FamilyMultiDir>(tau, sigma, dirs, periods, period_vector,
                                          delta0);
}

ReactionPtr make_stacked(const std::vector<ReactionPtr>& components) {
  if (components.empty()) throw ConfigError("stack: need at least one component");
  if (components.size() == 1) return components[0];
  return std::make_shared<StackedReaction>(components);
}

ReactionPtr make_rescaled(ReactionPtr inner, double nu) {
  if (!(nu > 0.0)) throw ConfigError("rescale: nu must be positive");
  return std::make_shared<RescaledReaction>(std::move(inner), nu);
}

ReactionPtr reflect_state(ReactionPtr inner) {
  return std::make_shared<StateReflected>(std::move(inner));
}

ReactionPtr reflect_space(ReactionPtr inner) {
  return std::make_shared<SpaceReflected>(std::move(inner));
}

const std::vector<ReactionPtr>* stacked_components(const Reaction& r) {
  if (const auto* s = dynamic_cast<const StackedReaction*>(&r)) return &s->components();
  return nullptr;
}

// ---------------------------------------------------------------------------

std::optional<double> membership_SL(const std::vector<double>& zeta,
                                    const std::vector<double>& period_vector) {
  if (zeta.size() != period_vector.size() || zeta.empty())
    throw ConfigError("membership_SL: dimension mismatch");
  double norm2 = 0.0;
  for (double c : zeta) norm2 += c * c;
  if (std::fabs(std::sqrt(norm2) - 1.0) > 1e-12)
    throw ConfigError("membership_SL: zeta must be a unit vector");
  std::vector<double> projections(zeta.size());
  for (size_t i = 0; i < zeta.size(); ++i) projections[i] = period_vector[i] * zeta[i];
  const double g = linalg::real_gcd(projections, 1e-9, 1000000L);
  if (g <= 0.0) return std::nullopt;
  return g;
}

std::vector<std::vector<double>> rational_directions(int count) {
  if (count < 1) throw ConfigError("rational_directions: count must be >= 1");
  std::vector<std::vector<double>> out;
  out.push_back({1.0, 0.0});  // the projection pole itself
  for (long h = 1; static_cast<int>(out.size()) < count && h < 4000; ++h) {
    for (long q = 1; q <= h && static_cast<int>(out.size()) < count; ++q) {
      const long ap = h - q;
      for (int sgn : {+1, -1}) {
        if (ap == 0 && sgn < 0) continue;
        if (std::gcd(ap, q) != 1) continue;
        const long p = sgn * ap;
        // inverse stereographic image of t = p/q
        const long den = p * p + q * q;
        out.push_back({static_cast<double>(p * p - q * q) / den,
                       static_cast<double>(2 * p * q) / den});
        if (static_cast<int>(out.size()) >= count) break;
      }
    }
  }
  out.resize(count);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// 16-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr int kGL = 8;
constexpr double kGLx[kGL] = {0.0950125098376374, 0.2816035507792589,
                              0.4580167776572274, 0.6178762444026438,
                              0.7554044083550030, 0.8656312023878318,
                              0.9445750230732326, 0.9894009349916499};
constexpr double kGLw[kGL] = {0.1894506104550685, 0.1826034150449236,
                              0.1691565193950025, 0.1495959888165767,
                              0.1246289712555339, 0.0951585116824928,
                              0.0622535239386479, 0.0271524594117541};

template <typename F>
double gauss_segment(F&& f, double a, double b) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < kGL; ++i)
    s += kGLw[i] * (f(mid + half * kGLx[i]) + f(mid - half * kGLx[i]));
  return s * half;
}

std::vector<double> state_breakpoints(const Reaction& r) {
  std::vector<double> pts;
  const double d = r.delta0();
  for (double p : r.levels()) {
    pts.push_back(p);
    pts.push_back(p + d);
    pts.push_back(p + 2 * d);
    pts.push_back(p - d);
    pts.push_back(p - 2 * d);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](double a, double b) { return std::fabs(a - b) < 1e-14; }),
            pts.end());
  const double lo = r.min_level(), hi = r.max_level();
  std::vector<double> in;
  for (double p : pts)
    if (p > lo - 1e-14 && p < hi + 1e-14) in.push_back(p);
  if (in.empty() || std::fabs(in.front() - lo) > 1e-14) in.insert(in.begin(), lo);
  if (std::fabs(in.back() - hi) > 1e-14) in.push_back(hi);
  return in;
}

}  // namespace

IntegralResult integral_sign(const Reaction& r) {
  if (r.levels().size() < 2) throw ConfigError("integral_sign: need two extreme levels");
  const auto brk = state_breakpoints(r);
  // Periodic trapezoid in x (spectrally accurate for smooth periodic slices),
  // composite Gauss-Legendre across the C1 breakpoints in u.
  const int nx = 64;
  double cell = 1.0;
  for (double L : r.period()) cell *= L;

  auto cell_integral = [&](double u) {
    double acc = 0.0;
    if (r.dim() == 1) {
      const double h = r.period()[0] / nx;
      for (int i = 0; i < nx; ++i) {
        const double x = i * h;
        acc += r.value(&x, u);
      }
      return acc * h;
    }
    if (r.dim() == 2) {
      const double hx = r.period()[0] / nx, hy = r.period()[1] / nx;
      for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nx; ++j) {
          const double x[2] = {i * hx, j * hy};
          acc += r.value(x, u);
        }
      return acc * hx * hy;
    }
    throw ConfigError("integral_sign: only dim 1 and 2 supported");
  };

  double total = 0.0;
  for (size_t s = 0; s + 1 < brk.size(); ++s) {
    const double a = brk[s], b = brk[s + 1];
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / 0.05)));
    for (int p = 0; p < panels; ++p) {
      const double pa = a + (b - a) * p / panels;
      const double pb = a + (b - a) * (p + 1) / panels;
      total += gauss_segment(cell_integral, pa, pb);
    }
  }

  IntegralResult res;
  res.value = total;
  res.tol = 1e-8 * cell;
  if (total > res.tol)
    res.sign = IntegralSign::positive;
  else if (total < -res.tol)
    res.sign = IntegralSign::negative;
  else
    res.sign = IntegralSign::zero_within_tol;
  return res;
}

double lipschitz_u(const Reaction& r, int n_x, int n_u) {
  const double lo = r.min_level() - r.delta0();
  const double hi = r.max_level() + r.delta0();
  double worst = 0.0;
  std::vector<double> x(r.dim(), 0.0);
  const int nx_eff = (r.dim() == 1) ? n_x : std::max(16, n_x / 4);
  auto scan_u = [&](const double* xp) {
    for (int k = 0; k < n_u; ++k) {
      const double u = lo + (hi - lo) * k / (n_u - 1);
      worst = std::max(worst, std::fabs(r.deriv_u(xp, u)));
    }
  };
  if (r.dim() == 1) {
    for (int i = 0; i < nx_eff; ++i) {
      x[0] = r.period()[0] * i / nx_eff;
      scan_u(x.data());
    }
  } else if (r.dim() == 2) {
    for (int i = 0; i < nx_eff; ++i)
      for (int j = 0; j < nx_eff; ++j) {
        x[0] = r.period()[0] * i / nx_eff;
        x[1] = r.period()[1] * j / nx_eff;
        scan_u(x.data());
      }
  } else {
    throw ConfigError("lipschitz_u: only dim 1 and 2 supported");
  }
  return worst;
}

double periodicity_residual(const Reaction& r, int samples, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> shift(-3, 3);
  const double lo = r.min_level(), hi = r.max_level();
  double worst = 0.0;
  std::vector<double> x(r.dim()), y(r.dim());
  for (int s = 0; s < samples; ++s) {
    for (int i = 0; i < r.dim(); ++i) {
      x[i] = (unif(rng) - 0.5) * 6.0 * r.period()[i];
      y[i] = x[i] + shift(rng) * r.period()[i];
    }
    const double u = lo + (hi - lo) * unif(rng);
    worst = std::max(worst, std::fabs(r.value(x.data(), u) - r.value(y.data(), u)));
  }
  return worst;
}

}  // namespace pulselab

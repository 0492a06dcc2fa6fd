#include "pulselab/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "pulselab/common.hpp"
#include "pulselab/linalg.hpp"

namespace pulselab {

namespace {

// shifted power iteration on A + sI where A = D2 + diag(q); the shift makes
// the matrix nonnegative and irreducible so the Perron vector is positive.
template <typename MatVec>
double power_iterate(MatVec&& apply_a, int n, double shift, long max_iter,
                     std::vector<double>* eigenvector) {
  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> av(n);
  double mu = 0.0;
  for (long it = 0; it < max_iter; ++it) {
    apply_a(v.data(), av.data());
    // Rayleigh quotient and residual check every few iterations
    if (it % 4 == 0 || it == max_iter - 1) {
      double num = 0.0, den = 0.0;
      for (int i = 0; i < n; ++i) {
        num += v[i] * av[i];
        den += v[i] * v[i];
      }
      mu = num / den;
      double res = 0.0;
      for (int i = 0; i < n; ++i) res = std::max(res, std::fabs(av[i] - mu * v[i]));
      if (res <= 1e-11 * std::max(1.0, std::fabs(mu))) {
        if (eigenvector) *eigenvector = v;
        for (double c : v)
          if (!(c > 0.0)) throw NumericError("principal eigenvector lost positivity");
        return mu;
      }
    }
    double norm = 0.0;
    for (int i = 0; i < n; ++i) {
      av[i] += shift * v[i];
      norm += av[i] * av[i];
    }
    norm = std::sqrt(norm);
    for (int i = 0; i < n; ++i) v[i] = av[i] / norm;
  }
  return quiet_nan();
}

}  // namespace

double principal_eigenvalue_periodic(const std::vector<double>& q, double h,
                                     std::vector<double>* eigenvector, long max_iter) {
  const int n = static_cast<int>(q.size());
  if (n < 3) throw ConfigError("principal_eigenvalue: need at least 3 nodes");
  const double ih2 = 1.0 / (h * h);
  auto apply_a = [&](const double* v, double* out) {
    for (int i = 0; i < n; ++i) {
      const double vm = v[(i + n - 1) % n], vp = v[(i + 1) % n];
      out[i] = ih2 * (vm - 2.0 * v[i] + vp) + q[i] * v[i];
    }
  };
  const double qmin = *std::min_element(q.begin(), q.end());
  const double shift = 2.0 * ih2 - qmin + 1.0;
  const double mu = power_iterate(apply_a, n, shift, max_iter, eigenvector);
  if (!std::isnan(mu)) return mu;
  if (n <= 512) {
    // dense fallback
    std::vector<double> m(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
      m[static_cast<size_t>(i) * n + i] = -2.0 * ih2 + q[i];
      m[static_cast<size_t>(i) * n + (i + 1) % n] += ih2;
      m[static_cast<size_t>(i) * n + (i + n - 1) % n] += ih2;
    }
    std::vector<double> vecs;
    const auto eig = linalg::symmetric_eigenvalues(std::move(m), n,
                                                   eigenvector ? &vecs : nullptr);
    if (eigenvector) {
      eigenvector->resize(n);
      for (int i = 0; i < n; ++i) (*eigenvector)[i] = vecs[static_cast<size_t>(i) * n + (n - 1)];
      if ((*eigenvector)[0] < 0)
        for (double& c : *eigenvector) c = -c;
    }
    return eig.back();
  }
  throw NumericError("principal_eigenvalue: power iteration failed to converge");
}

double principal_eigenvalue_periodic_2d(const std::vector<double>& q, int n1, int n2,
                                        double h1, double h2,
                                        std::vector<double>* eigenvector,
                                        long max_iter) {
  const int n = n1 * n2;
  if (static_cast<int>(q.size()) != n) throw ConfigError("principal_eigenvalue_2d: size mismatch");
  const double i1 = 1.0 / (h1 * h1), i2 = 1.0 / (h2 * h2);
  auto apply_a = [&](const double* v, double* out) {
    for (int a = 0; a < n1; ++a) {
      const int am = (a + n1 - 1) % n1, ap = (a + 1) % n1;
      for (int b = 0; b < n2; ++b) {
        const int bm = (b + n2 - 1) % n2, bp = (b + 1) % n2;
        const size_t k = static_cast<size_t>(a) * n2 + b;
        out[k] = i1 * (v[static_cast<size_t>(am) * n2 + b] - 2.0 * v[k] +
                       v[static_cast<size_t>(ap) * n2 + b]) +
                 i2 * (v[static_cast<size_t>(a) * n2 + bm] - 2.0 * v[k] +
                       v[static_cast<size_t>(a) * n2 + bp]) +
                 q[k] * v[k];
      }
    }
  };
  const double qmin = *std::min_element(q.begin(), q.end());
  const double shift = 2.0 * (i1 + i2) - qmin + 1.0;
  const double mu = power_iterate(apply_a, n, shift, max_iter, eigenvector);
  if (std::isnan(mu)) throw NumericError("principal_eigenvalue_2d: power iteration failed");
  return mu;
}

namespace {

struct Cell1D {
  int n;
  double L, h;
  std::vector<double> xs;
  explicit Cell1D(const Reaction& r, int n_) : n(n_), L(r.period()[0]), h(L / n_) {
    xs.resize(n);
    for (int i = 0; i < n; ++i) xs[i] = i * h;
  }
};

std::vector<double> steady_residual_1d(const Reaction& r, const Cell1D& c,
                                       const std::vector<double>& u) {
  std::vector<double> F(c.n);
  const double ih2 = 1.0 / (c.h * c.h);
  for (int i = 0; i < c.n; ++i) {
    const double um = u[(i + c.n - 1) % c.n], up = u[(i + 1) % c.n];
    F[i] = ih2 * (um - 2.0 * u[i] + up) + r.value(&c.xs[i], u[i]);
  }
  return F;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

bool newton_1d(const Reaction& r, const Cell1D& c, std::vector<double>& u,
               const SpectraOptions& opt) {
  const double ih2 = 1.0 / (c.h * c.h);
  const double lo = r.min_level() - 1.0, hi = r.max_level() + 1.0;
  // full steps first (the residual is genuinely nonmonotone along the path
  // to interior states), damped once the basin is reached
  const int pure_phase = 12;
  for (int it = 0; it < opt.newton_max_iter; ++it) {
    std::vector<double> F = steady_residual_1d(r, c, u);
    const double fn = max_abs(F);
    if (fn < opt.newton_tol) return true;
    std::vector<double> a(c.n, ih2), b(c.n), cc(c.n, ih2), rhs(c.n);
    for (int i = 0; i < c.n; ++i) {
      b[i] = -2.0 * ih2 + r.deriv_u(&c.xs[i], u[i]);
      rhs[i] = -F[i];
    }
    std::vector<double> delta;
    try {
      delta = linalg::solve_cyclic_tridiagonal(a, b, cc, ih2, ih2, rhs);
    } catch (const std::exception&) {
      return false;
    }
    if (it < pure_phase) {
      for (int i = 0; i < c.n; ++i) u[i] += delta[i];
    } else {
      double lam = 1.0;
      bool moved = false;
      for (int half = 0; half < 20; ++half) {
        std::vector<double> trial(u);
        for (int i = 0; i < c.n; ++i) trial[i] += lam * delta[i];
        if (max_abs(steady_residual_1d(r, c, trial)) < (1.0 - 0.25 * lam) * fn) {
          u.swap(trial);
          moved = true;
          break;
        }
        lam *= 0.5;
      }
      if (!moved) return false;
    }
    for (double v : u)
      if (!(v >= lo && v <= hi)) return false;
  }
  return false;
}

std::vector<std::vector<double>> harvest_seeds(const Reaction& r, const Cell1D& c,
                                               const SpectraOptions& opt) {
  std::vector<std::vector<double>> seeds;
  std::mt19937 rng(opt.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double lo = r.min_level(), hi = r.max_level();
  Grid1D grid{0.0, c.L - c.h, c.n};
  SolverConfig cfg;
  cfg.dt = 2.5e-3;
  cfg.t_end = opt.harvest_t;
  cfg.scheme = Scheme::cn_imex;
  cfg.boundary = Boundary::periodic;
  cfg.record_every = opt.harvest_t > 0 ? opt.harvest_t : 1.0;
  cfg.check_contamination = false;
  for (int run = 0; run < opt.harvest_runs; ++run) {
    Field1D f;
    f.grid = grid;
    f.u.resize(c.n);
    const double base = lo + (hi - lo) * unif(rng);
    double amp[4], phase[4];
    for (int k = 0; k < 4; ++k) {
      amp[k] = (unif(rng) - 0.5) * 0.6 * (hi - lo);
      phase[k] = 2.0 * M_PI * unif(rng);
    }
    for (int i = 0; i < c.n; ++i) {
      double v = base;
      for (int k = 0; k < 4; ++k)
        v += amp[k] * std::cos(2.0 * M_PI * (k + 1) * c.xs[i] / c.L + phase[k]);
      f.u[i] = std::clamp(v, lo, hi);
    }
    try {
      auto res = evolve(f, r, cfg);
      seeds.push_back(std::move(res.final_field.u));
    } catch (const NumericError&) {
      // a diverged relaxation contributes no seed
    }
  }
  return seeds;
}

}  // namespace

double principal_eigenvalue(const Reaction& r, const std::vector<double>& u,
                            const SpectraOptions& opt) {
  if (r.dim() != 1) throw ConfigError("principal_eigenvalue: state must be 1-D here");
  Cell1D c(r, static_cast<int>(u.size()));
  std::vector<double> q(c.n);
  for (int i = 0; i < c.n; ++i) q[i] = r.deriv_u(&c.xs[i], u[i]);
  return principal_eigenvalue_periodic(q, c.h, nullptr, opt.power_max_iter);
}

std::vector<SteadyState> find_steady_states(const Reaction& r,
                                            const SpectraOptions& opt) {
  if (r.dim() != 1)
    throw ConfigError("find_steady_states: only 1-D reactions are searched");
  Cell1D c(r, opt.n);

  std::vector<std::vector<double>> seeds;
  for (double p : r.levels()) seeds.emplace_back(c.n, p);
  const auto& lv = r.levels();
  for (size_t k = 0; k + 1 < lv.size(); ++k) {
    seeds.emplace_back(c.n, 0.5 * (lv[k] + lv[k + 1]));
    // a gently modulated midlevel helps Newton find non-constant states
    std::vector<double> wob(c.n);
    for (int i = 0; i < c.n; ++i)
      wob[i] = 0.5 * (lv[k] + lv[k + 1]) + 0.1 * (lv[k + 1] - lv[k]) *
                                               std::cos(2.0 * M_PI * c.xs[i] / c.L);
    seeds.push_back(std::move(wob));
  }
  for (auto& s : harvest_seeds(r, c, opt)) seeds.push_back(std::move(s));

  std::vector<SteadyState> found;
  for (auto& seed : seeds) {
    std::vector<double> u = seed;
    if (!newton_1d(r, c, u, opt)) continue;
    bool dup = false;
    for (const auto& st : found) {
      double dist = 0.0;
      for (int i = 0; i < c.n; ++i) dist = std::max(dist, std::fabs(st.profile[i] - u[i]));
      if (dist < 1e-6) {
        dup = true;
        break;
      }
    }
    if (dup) continue;
    SteadyState st;
    st.profile = u;
    st.residual = max_abs(steady_residual_1d(r, c, u));
    st.min_value = *std::min_element(u.begin(), u.end());
    st.max_value = *std::max_element(u.begin(), u.end());
    double mean = 0.0;
    for (double v : u) mean += v;
    st.mean = mean / c.n;
    st.lambda1 = principal_eigenvalue(r, u, opt);
    st.stable = st.lambda1 < 0.0;
    found.push_back(std::move(st));
  }
  std::sort(found.begin(), found.end(),
            [](const SteadyState& a, const SteadyState& b) { return a.mean < b.mean; });
  return found;
}

namespace {

CertifyReport certify_flat(const Reaction& r, const SpectraOptions& opt) {
  CertifyReport rep;
  rep.states = find_steady_states(r, opt);
  const double lo = r.min_level(), hi = r.max_level();
  bool lo_ok = false, hi_ok = false;
  for (size_t i = 0; i < rep.states.size(); ++i) {
    const auto& st = rep.states[i];
    const bool is_lo = std::fabs(st.min_value - lo) < 1e-6 && std::fabs(st.max_value - lo) < 1e-6;
    const bool is_hi = std::fabs(st.min_value - hi) < 1e-6 && std::fabs(st.max_value - hi) < 1e-6;
    if (is_lo || is_hi) {
      if (st.lambda1 >= 0.0) {
        rep.reason = "extreme level is not linearly stable";
        rep.witness = static_cast<int>(i);
        return rep;
      }
      (is_lo ? lo_ok : hi_ok) = true;
      continue;
    }
    if (!(st.lambda1 > opt.instability_floor)) {
      rep.reason = "intermediate periodic steady state is not linearly unstable";
      rep.witness = static_cast<int>(i);
      return rep;
    }
  }
  if (!lo_ok || !hi_ok) {
    rep.reason = "failed to locate both extreme levels";
    return rep;
  }
  rep.certified = true;
  return rep;
}

}  // namespace

CertifyReport certify_bistable(const Reaction& r, const SpectraOptions& opt) {
  if (const auto* comps = stacked_components(r)) {
    CertifyReport rep;
    rep.certified = true;
    for (size_t k = 0; k < comps->size(); ++k) {
      CertifyReport sub = certify_bistable(*(*comps)[k], opt);
      // offset discovered states into the stacked coordinates
      const double off = static_cast<double>(k);
      for (auto& st : sub.states) {
        for (double& v : st.profile) v += off;
        st.mean += off;
        st.min_value += off;
        st.max_value += off;
      }
      if (!sub.certified && rep.certified) {
        rep.certified = false;
        rep.reason = "component " + std::to_string(k) + ": " + sub.reason;
        rep.witness = sub.witness >= 0
                          ? static_cast<int>(rep.states.size()) + sub.witness
                          : -1;
      }
      rep.states.insert(rep.states.end(), sub.states.begin(), sub.states.end());
    }
    return rep;
  }
  if (r.levels().size() != 2)
    throw ConfigError("certify_bistable: reaction must have two extreme levels");
  return certify_flat(r, opt);
}

SubsolutionScan subsolution_residual(const Reaction& r, double xi,
                                     Orientation orientation,
                                     const std::vector<double>& dir, int n_samples) {
  std::vector<double> e(r.dim(), 0.0);
  if (!dir.empty()) {
    if (static_cast<int>(dir.size()) != r.dim())
      throw ConfigError("subsolution_residual: direction dimension mismatch");
    e = dir;
  } else {
    e[0] = 1.0;
  }
  const double sgn = orientation == Orientation::right_moving ? 1.0 : -1.0;
  // v(x) = U0(s x.e + xi) solves v'' = -f0(v); the residual reduces to
  // f(x, v) - f0(v), scanned where v crosses the comb support (plus margin).
  const double d0 = r.delta0();
  const double z_hi = kink_inverse(d0), z_lo = kink_inverse(1.0 - d0);
  double Lmax = 0.0;
  for (double L : r.period()) Lmax = std::max(Lmax, L);
  const double a = z_lo - Lmax, b = z_hi + Lmax;
  SubsolutionScan scan;
  scan.min = 0.0;
  scan.max = 0.0;
  std::vector<double> x(r.dim());
  const int n_trans = (r.dim() == 2) ? 41 : 1;
  for (int k = 0; k < n_samples; ++k) {
    const double z = a + (b - a) * k / (n_samples - 1);  // z = s x.e + xi
    const double s_coord = (z - xi) / sgn;
    const double v = kink(z);
    for (int m = 0; m < n_trans; ++m) {
      for (int i = 0; i < r.dim(); ++i) x[i] = s_coord * e[i];
      if (r.dim() == 2) {
        const double t = Lmax * m / n_trans;
        x[0] += -e[1] * t;
        x[1] += e[0] * t;
      }
      const double rho = r.value(x.data(), v) - cubic_balanced(v);
      scan.min = std::min(scan.min, rho);
      scan.max = std::max(scan.max, rho);
    }
  }
  return scan;
}

}  // namespace pulselab

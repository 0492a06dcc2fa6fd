#include "pulselab/linalg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "pulselab/common.hpp"

namespace pulselab {

void parallel_for_indexed(int n, int jobs, const std::function<void(int)>& fn) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<std::thread> pool;
  for (int w = 0; w < jobs; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit f;
  const int n = static_cast<int>(x.size());
  f.n = n;
  if (n < 2 || y.size() != x.size()) throw ConfigError("fit_line: need >= 2 points");
  double sx = 0, sy = 0;
  for (int i = 0; i < n; ++i) { sx += x[i]; sy += y[i]; }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0) throw ConfigError("fit_line: degenerate abscissae");
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0;
  for (int i = 0; i < n; ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    rss += r * r;
  }
  f.rms_residual = std::sqrt(rss / n);
  f.slope_stderr = (n > 2) ? std::sqrt(rss / (n - 2) / sxx) : 0.0;
  return f;
}

}  // namespace pulselab

namespace pulselab::linalg {

void solve_tridiagonal(std::vector<double>& a, std::vector<double>& b,
                       std::vector<double>& c, std::vector<double>& d) {
  const int n = static_cast<int>(b.size());
  if (n == 0) return;
  for (int i = 1; i < n; ++i) {
    const double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    d[i] -= w * d[i - 1];
  }
  d[n - 1] /= b[n - 1];
  for (int i = n - 2; i >= 0; --i) d[i] = (d[i] - c[i] * d[i + 1]) / b[i];
}

std::vector<double> solve_cyclic_tridiagonal(const std::vector<double>& a,
                                             const std::vector<double>& b,
                                             const std::vector<double>& c,
                                             double alpha, double beta,
                                             const std::vector<double>& d) {
  const int n = static_cast<int>(b.size());
  if (n == 1) return {d[0] / (b[0] + alpha + beta)};
  if (n == 2) {
    // Direct 2x2 solve; the wrap terms add to the off-diagonals.
    const double a01 = c[0] + alpha, a10 = a[1] + beta;
    const double det = b[0] * b[1] - a01 * a10;
    return {(d[0] * b[1] - a01 * d[1]) / det, (b[0] * d[1] - a10 * d[0]) / det};
  }
  // Sherman-Morrison with u = (gamma,0,...,0,beta)^T, v = (1,0,...,0,alpha/gamma)^T.
  const double gamma = -b[0];
  std::vector<double> bb(b);
  bb[0] = b[0] - gamma;
  bb[n - 1] = b[n - 1] - alpha * beta / gamma;
  std::vector<double> aa(a), cc(c), y(d);
  {
    std::vector<double> a1(aa), b1(bb), c1(cc);
    solve_tridiagonal(a1, b1, c1, y);
  }
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = beta;
  {
    std::vector<double> a2(aa), b2(bb), c2(cc);
    solve_tridiagonal(a2, b2, c2, u);
  }
  const double vy = y[0] + alpha / gamma * y[n - 1];
  const double vu = u[0] + alpha / gamma * u[n - 1];
  const double factor = vy / (1.0 + vu);
  for (int i = 0; i < n; ++i) y[i] -= factor * u[i];
  return y;
}

TridiagFactor::TridiagFactor(std::vector<double> a, std::vector<double> b,
                             std::vector<double> c) {
  const int n = static_cast<int>(b.size());
  w_.assign(n, 0.0);
  beff_ = std::move(b);
  c_ = std::move(c);
  for (int i = 1; i < n; ++i) {
    w_[i] = a[i] / beff_[i - 1];
    beff_[i] -= w_[i] * c_[i - 1];
  }
}

void TridiagFactor::solve(std::vector<double>& d) const {
  const int n = size();
  for (int i = 1; i < n; ++i) d[i] -= w_[i] * d[i - 1];
  d[n - 1] /= beff_[n - 1];
  for (int i = n - 2; i >= 0; --i) d[i] = (d[i] - c_[i] * d[i + 1]) / beff_[i];
}

CyclicFactor::CyclicFactor(int n, double diag, double off) : n_(n), corner_(off) {
  gamma_ = -diag;
  // Sherman-Morrison: perturb b[0] and b[n-1], correct with a rank-one solve.
  std::vector<double> a(n, off), b(n, diag), c(n, off);
  b[0] -= gamma_;
  b[n - 1] -= corner_ * corner_ / gamma_;
  base_ = TridiagFactor(std::move(a), std::move(b), std::move(c));
  z_.assign(n, 0.0);
  z_[0] = gamma_;
  z_[n - 1] = corner_;
  base_.solve(z_);
  denom_ = 1.0 + z_[0] + corner_ / gamma_ * z_[n - 1];
}

void CyclicFactor::solve(std::vector<double>& d) const {
  base_.solve(d);
  const double factor = (d[0] + corner_ / gamma_ * d[n_ - 1]) / denom_;
  for (int i = 0; i < n_; ++i) d[i] -= factor * z_[i];
}

std::vector<double> symmetric_eigenvalues(std::vector<double> m, int n,
                                          std::vector<double>* vectors) {
  std::vector<double> v;
  if (vectors) {
    v.assign(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) v[static_cast<size_t>(i) * n + i] = 1.0;
  }
  auto at = [&](int i, int j) -> double& { return m[static_cast<size_t>(i) * n + j]; };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
    if (off < 1e-26 * n * n) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (std::fabs(apq) < 1e-300) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double cth = 1.0 / std::sqrt(t * t + 1.0);
        const double sth = t * cth;
        for (int k = 0; k < n; ++k) {
          const double akp = at(k, p), akq = at(k, q);
          at(k, p) = cth * akp - sth * akq;
          at(k, q) = sth * akp + cth * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = at(p, k), aqk = at(q, k);
          at(p, k) = cth * apk - sth * aqk;
          at(q, k) = sth * apk + cth * aqk;
        }
        if (vectors) {
          for (int k = 0; k < n; ++k) {
            const double vkp = v[static_cast<size_t>(k) * n + p];
            const double vkq = v[static_cast<size_t>(k) * n + q];
            v[static_cast<size_t>(k) * n + p] = cth * vkp - sth * vkq;
            v[static_cast<size_t>(k) * n + q] = sth * vkp + cth * vkq;
          }
        }
      }
    }
  }
  std::vector<double> eig(n);
  for (int i = 0; i < n; ++i) eig[i] = at(i, i);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) { return eig[i] < eig[j]; });
  std::vector<double> sorted(n);
  for (int i = 0; i < n; ++i) sorted[i] = eig[order[i]];
  if (vectors) {
    vectors->assign(static_cast<size_t>(n) * n, 0.0);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        (*vectors)[static_cast<size_t>(i) * n + j] = v[static_cast<size_t>(i) * n + order[j]];
  }
  return sorted;
}

std::vector<double> solve_dense(std::vector<double> m, int n, std::vector<double> rhs) {
  auto at = [&](int i, int j) -> double& { return m[static_cast<size_t>(i) * n + j]; };
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::fabs(at(i, k)) > std::fabs(at(piv, k))) piv = i;
    if (std::fabs(at(piv, k)) < 1e-300) throw NumericError("solve_dense: singular matrix");
    if (piv != k) {
      for (int j = k; j < n; ++j) std::swap(at(piv, j), at(k, j));
      std::swap(rhs[piv], rhs[k]);
    }
    for (int i = k + 1; i < n; ++i) {
      const double w = at(i, k) / at(k, k);
      if (w == 0.0) continue;
      for (int j = k; j < n; ++j) at(i, j) -= w * at(k, j);
      rhs[i] -= w * rhs[k];
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = rhs[i];
    for (int j = i + 1; j < n; ++j) s -= at(i, j) * rhs[j];
    rhs[i] = s / at(i, i);
  }
  return rhs;
}

bool rationalize(double x, double tol, long max_den, long& p, long& q) {
  // Walk the continued-fraction convergents of x until one lands within tol.
  double rem = x;
  long p0 = 1, q0 = 0;  // previous convergents
  long p1 = static_cast<long>(std::floor(rem)), q1 = 1;
  rem -= std::floor(rem);
  for (int it = 0; it < 64; ++it) {
    if (std::fabs(x - static_cast<double>(p1) / q1) <= tol) {
      p = p1;
      q = q1;
      return true;
    }
    if (rem < 1e-15) break;
    rem = 1.0 / rem;
    const double fl = std::floor(rem);
    if (fl > 4e18 / std::max(q1, 1L)) break;
    const long a = static_cast<long>(fl);
    rem -= fl;
    const long p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
  }
  return false;
}

double real_gcd(const std::vector<double>& values, double tol, long max_den) {
  std::vector<double> vals;
  for (double v : values)
    if (std::fabs(v) > tol) vals.push_back(std::fabs(v));
  if (vals.empty()) return 0.0;
  const double ref = *std::min_element(vals.begin(), vals.end());
  long lcm_q = 1;
  for (double v : vals) {
    long p = 0, q = 0;
    if (!rationalize(v / ref, 1e-12 + tol / ref, max_den, p, q)) return 0.0;
    const long g = std::gcd(lcm_q, q);
    if (q / g > max_den / lcm_q) return 0.0;
    lcm_q = lcm_q / g * q;
  }
  const double g = ref / static_cast<double>(lcm_q);
  // Final absolute check: every value must sit on a multiple of g.
  for (double v : vals)
    if (!nearly_integer(v / g, tol)) return 0.0;
  return g;
}

double real_lcm(const std::vector<double>& values, double tol, long max_den) {
  std::vector<double> vals;
  for (double v : values)
    if (std::fabs(v) > tol) vals.push_back(std::fabs(v));
  if (vals.empty()) return 0.0;
  double m = vals[0];
  for (size_t i = 1; i < vals.size(); ++i) {
    long p = 0, q = 0;
    if (!rationalize(m / vals[i], 1e-10, max_den, p, q)) return 0.0;
    if (p == 0) return 0.0;
    const long g = std::gcd(std::labs(p), q);
    // m = (p/g)/(q/g) * vals[i]; the least common multiple is (q/g)*m.
    m = static_cast<double>(q / g) * m;
  }
  for (double v : vals)
    if (!nearly_integer(m / v, tol)) return 0.0;
  return m;
}

}  // namespace pulselab::linalg

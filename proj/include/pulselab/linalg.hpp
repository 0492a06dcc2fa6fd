#ifndef PULSELAB_LINALG_HPP
#define PULSELAB_LINALG_HPP

#include <vector>

namespace pulselab::linalg {

/// Solves a tridiagonal system in place (Thomas algorithm).
/// a = sub-diagonal (a[0] unused), b = diagonal, c = super-diagonal
/// (c[n-1] unused), d = right-hand side, overwritten with the solution.
void solve_tridiagonal(std::vector<double>& a, std::vector<double>& b,
                       std::vector<double>& c, std::vector<double>& d);

/// Solves a cyclic tridiagonal system (periodic wrap via Sherman-Morrison).
/// corner terms: A[0][n-1] = alpha, A[n-1][0] = beta.
std::vector<double> solve_cyclic_tridiagonal(const std::vector<double>& a,
                                             const std::vector<double>& b,
                                             const std::vector<double>& c,
                                             double alpha, double beta,
                                             const std::vector<double>& d);

/// Prefactored tridiagonal solver for repeated right-hand sides with fixed
/// coefficients: a = sub-diagonal (a[0] unused), b = diagonal,
/// c = super-diagonal (c[n-1] unused).
class TridiagFactor {
 public:
  TridiagFactor() = default;
  TridiagFactor(std::vector<double> a, std::vector<double> b, std::vector<double> c);
  void solve(std::vector<double>& d) const;  // in place
  int size() const { return static_cast<int>(beff_.size()); }

 private:
  std::vector<double> w_;     // forward elimination multipliers
  std::vector<double> beff_;  // eliminated diagonal
  std::vector<double> c_;     // super-diagonal
};

/// Prefactored cyclic constant-coefficient tridiagonal solver
/// (Sherman-Morrison around TridiagFactor).
class CyclicFactor {
 public:
  CyclicFactor() = default;
  CyclicFactor(int n, double diag, double off);
  void solve(std::vector<double>& d) const;  // in place
  int size() const { return n_; }

 private:
  int n_ = 0;
  TridiagFactor base_;
  std::vector<double> z_;   // base solve of the rank-one column
  double corner_ = 0.0;     // off-diagonal wrap entry
  double gamma_ = 0.0;
  double denom_ = 1.0;
};

/// All eigenvalues of a symmetric dense matrix (row-major n*n) by cyclic
/// Jacobi rotations. Returns eigenvalues ascending; if vectors != nullptr it
/// receives the matching eigenvectors as columns (row-major).
std::vector<double> symmetric_eigenvalues(std::vector<double> mat, int n,
                                          std::vector<double>* vectors = nullptr);

/// Dense LU solve with partial pivoting; mat is row-major n*n, destroyed.
std::vector<double> solve_dense(std::vector<double> mat, int n,
                                std::vector<double> rhs);

/// Greatest common real divisor of |values| under a continued-fraction
/// rational search: returns g > 0 such that every value is within
/// `tol` of an integer multiple of g, or 0 if none is found with
/// denominators up to `max_den`. Zero entries are ignored.
double real_gcd(const std::vector<double>& values, double tol, long max_den);

/// Least common real multiple of |values| (smallest m > 0 with m/value
/// integral for all nonzero values, within tol); 0 on failure.
double real_lcm(const std::vector<double>& values, double tol, long max_den);

/// Best rational approximation p/q of x with q <= max_den (continued
/// fractions). Returns true and fills p, q when |x - p/q| <= tol.
bool rationalize(double x, double tol, long max_den, long& p, long& q);

}  // namespace pulselab::linalg

#endif

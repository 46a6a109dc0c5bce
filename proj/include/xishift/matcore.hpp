// Dense complex matrix foundation: Hermitian eigendecompositions, spectral
// projections, eigenvalue-wise functional calculus, numerical rank and
// determinants. Everything downstream (operator logarithms, index
// machinery, spectral-shift representations) is built on this layer.
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <initializer_list>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace xishift {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Error taxonomy. All library failures are typed; messages carry the
// offending quantity so callers can act (perturb, widen a cutoff, ...).

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A matrix that must be invertible is (numerically) singular.
class InvertibilityError : public Error {
 public:
  using Error::Error;
};

// An eigenvalue sits on an open interval endpoint within tolerance.
class EndpointCollisionError : public Error {
 public:
  using Error::Error;
};

// Input outside an operation's mathematical domain (e.g. sqrt of a matrix
// with a negative eigenvalue).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A stated precondition does not hold for the supplied data.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Two independent internal routes to the same quantity disagree. This is
// a structural self-test failure, not a user error.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

// A configuration cannot deliver the requested accuracy.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed problem document.
class ParseError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------

struct Tolerances {
  double tol_eig = 1e-10;       // relative eigendecomposition tolerance
  double tol_proj = 1e-10;      // projection idempotence / self-adjointness
  double tol_herm = 1e-8;       // accepted hermiticity defect
  double tol_rank_rel = 1e-10;  // relative singular-value cutoff for rank
  double cluster_gap = 1e-8;    // relative gap for eigenvalue grouping

  void validate() const;
};

// Operator (spectral) norm and trace (Schatten-1) norm via singular values.
double op_norm(const Matrix& m);
double trace_norm(const Matrix& m);

// Row-major diagonal constructors, mostly for tests and small examples.
Matrix diag_matrix(std::initializer_list<double> d);
Matrix diag_matrix(std::initializer_list<Complex> d);

// ---------------------------------------------------------------------------
// A square complex matrix certified self-adjoint. Construction symmetrizes
// H <- (H + H*)/2 and records the operator-norm distance to the adjoint;
// defects above tol_herm are rejected.

class HermitianMatrix {
 public:
  explicit HermitianMatrix(const Matrix& m, const Tolerances& tol = {});

  const Matrix& matrix() const { return mat_; }
  Eigen::Index dim() const { return mat_.rows(); }
  double hermiticity_defect() const { return defect_; }
  double norm() const;  // operator norm (cached)

 private:
  Matrix mat_;
  double defect_;
  mutable double norm_ = -1.0;
};

// ---------------------------------------------------------------------------

struct SpectralDecomposition {
  RealVector eigenvalues;           // ascending
  Matrix eigenvectors;              // unitary; k-th column pairs with eigenvalues[k]
  std::vector<int> multiplicities;  // cluster sizes, grouped at cluster_gap * |H|
};

// A matrix certified idempotent and self-adjoint, carrying its rank.
class OrthoProjection {
 public:
  OrthoProjection(const Matrix& p, const Tolerances& tol = {});

  const Matrix& matrix() const { return mat_; }
  int rank() const { return rank_; }
  Eigen::Index dim() const { return mat_.rows(); }
  int kernel_dim() const { return static_cast<int>(dim()) - rank_; }

  static OrthoProjection zero(Eigen::Index n);
  static OrthoProjection identity(Eigen::Index n);

 private:
  Matrix mat_;
  int rank_;
};

// Real interval with explicit open/closed endpoints. Infinite endpoints are
// always open. An eigenvalue within `snap` of a finite closed endpoint is
// treated as sitting exactly on it; the same situation at an open endpoint
// is an EndpointCollisionError (the caller must perturb, or switch to a
// closed endpoint deliberately).
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_closed = false;
  bool hi_closed = false;

  static Interval open(double lo, double hi);
  static Interval closed(double lo, double hi);
  static Interval point(double x);          // [x, x]
  static Interval negative_axis();          // (-inf, 0)
  static Interval positive_axis();          // (0, inf)
  static Interval below(double hi, bool closed = false);  // (-inf, hi) or (-inf, hi]
  static Interval above(double lo, bool closed = false);  // (lo, inf) or [lo, inf)

  std::string describe() const;
};

// ---------------------------------------------------------------------------
// Operations

// Full Hermitian eigendecomposition with tolerance-based multiplicity
// grouping. Reconstruction U diag(w) U* is verified against tol_eig * |H|.
SpectralDecomposition eig_hermitian(const HermitianMatrix& h, const Tolerances& tol = {});

// Spectral projection onto the eigenvalues of H lying in `window`.
OrthoProjection spectral_projection(const HermitianMatrix& h, const Interval& window,
                                    const Tolerances& tol = {});

enum class ScalarFunc { Arctan, Sqrt, Abs, Sign };

// f applied eigenvalue-wise through the decomposition. Sign maps the
// kernel (|eigenvalue| below the rank cutoff) to +1; Sqrt requires the
// spectrum to be nonnegative within tol_eig * |H|.
HermitianMatrix func_calc_hermitian(const HermitianMatrix& h, ScalarFunc f,
                                    const Tolerances& tol = {});

// Number of singular values above tol_rank_rel * n * sigma_max.
int rank_eps(const Matrix& m, const Tolerances& tol = {});

Complex determinant(const Matrix& m);

// Eigenvalue counting helpers shared by the flow and shift modules: the
// number of eigenvalues of H strictly below / inside a window, with the
// same endpoint-snap semantics as spectral_projection.
int count_eigs_in(const HermitianMatrix& h, const Interval& window, const Tolerances& tol = {});
int count_eigs_below(const HermitianMatrix& h, double x, const Tolerances& tol = {});

}  // namespace xishift

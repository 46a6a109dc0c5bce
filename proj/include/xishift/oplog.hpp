// Logarithm of boundedly invertible dissipative matrices and the Xi
// operator Xi(T) = Im(log T) / pi.
//
// Branch convention: the scalar logarithm takes arg in [0, pi] on the
// closed upper half-plane, with negative reals assigned arg = +pi (the
// limit from above). For self-adjoint T this makes Xi(T) the spectral
// projection onto (-inf, 0).
#pragma once

#include "xishift/matcore.hpp"

namespace xishift {

// A square matrix certified dissipative (Im(T) = (T - T*)/2i >= 0 within
// tolerance) and invertible (smallest singular value above the rank cutoff).
class DissipativeMatrix {
 public:
  explicit DissipativeMatrix(const Matrix& m, const Tolerances& tol = {});

  const Matrix& matrix() const { return mat_; }
  Eigen::Index dim() const { return mat_.rows(); }
  double im_min() const { return im_min_; }      // smallest eigenvalue of Im(T)
  double inv_norm() const { return inv_norm_; }  // |T^{-1}|

 private:
  Matrix mat_;
  double im_min_;
  double inv_norm_;
};

// Configuration of the improper-integral logarithm: composite
// Gauss-Legendre on [0, Lambda], Lambda = cutoff_factor * max(1, |T|),
// plus an analytic tail resummation whose remainder must stay below
// tail_tol.
struct QuadratureConfig {
  int panels = 64;
  int nodes_per_panel = 8;
  double cutoff_factor = 10.0;
  double tail_tol = 1e-10;

  void validate() const;
};

enum class LogMethod { Schur, Integral };

struct LogResult {
  Matrix value;
  // Schur path: total diagonal perturbation applied when the triangular
  // diagonal was too clustered for the Parlett recurrence (0 if none).
  double diagonal_perturbation = 0.0;
  // Integral path: bound on the analytic tail remainder beyond the cutoff.
  double tail_bound = 0.0;
};

// Scalar branch used throughout: arg in [0, pi] on the closed upper
// half-plane, negative reals at +pi. (Branch cut along the negative
// imaginary axis.)
Complex log_upper_branch(Complex z);

LogResult log_dissipative(const DissipativeMatrix& t, LogMethod method,
                          const QuadratureConfig& q = {});

// Xi(T) = Im(log T)/pi for invertible dissipative T; spectrum lies in
// [0, 1] up to roundoff.
HermitianMatrix xi_operator(const DissipativeMatrix& t, const Tolerances& tol = {});

// Self-adjoint branch: the orthogonal projection onto the negative
// spectral subspace. Errors if 0 is an eigenvalue within tolerance
// (open-endpoint collision).
OrthoProjection xi_projection(const HermitianMatrix& s, const Tolerances& tol = {});
HermitianMatrix xi_operator(const HermitianMatrix& s, const Tolerances& tol = {});

}  // namespace xishift

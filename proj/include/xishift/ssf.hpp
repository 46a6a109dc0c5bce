// Krein's spectral shift function for finite Hermitian pairs (H0, H0+V)
// and its operator representations: the eigenvalue-counting oracle, the
// factorization V = K J K*, the trindex and averaged-index forms of the
// shift function, the Poisson-smoothing identity, the gap formulas, and
// the generalized shift function of a signature pair.
//
// Convention: xi(lambda) = #{eigs of H0 < lambda} - #{eigs of H < lambda},
// the sign fixed by the resolvent trace formula
//   tr((H-z)^{-1} - (H0-z)^{-1}) = -int xi(l) (l-z)^{-2} dl.
// Boundary values lambda + i0 are replaced throughout by explicit
// eps-regularization; eps = 0 is permitted only off the spectrum of H0.
#pragma once

#include "xishift/matcore.hpp"
#include "xishift/oplog.hpp"
#include "xishift/spectralflow.hpp"

#include <optional>
#include <vector>

namespace xishift {

struct SignFactorization {
  HermitianMatrix k;  // |V|^{1/2}, PSD
  HermitianMatrix j;  // sgn(V), +1 on ker(V); J^2 = I
  int n_neg;          // strictly negative eigenvalues of V
};

// V = K J K with K = |V|^{1/2} and the kernel of V mapped to +1.
SignFactorization factor_sign(const HermitianMatrix& v, const Tolerances& tol = {});

// (H0, V) with the sign factorization attached. Construction verifies
// |KJK - V|, J^2 = I, n_neg = rank E_V((-inf,0)), and validates the
// counting step function against the resolvent trace formula at two
// complex points.
class PerturbationPair {
 public:
  PerturbationPair(HermitianMatrix h0, HermitianMatrix v, const Tolerances& tol = {});

  const HermitianMatrix& h0() const { return h0_; }
  const HermitianMatrix& v() const { return v_; }
  const HermitianMatrix& h() const { return h_; }  // H0 + V
  const HermitianMatrix& k() const { return fac_.k; }
  const HermitianMatrix& j() const { return fac_.j; }
  int n_neg() const { return fac_.n_neg; }
  Eigen::Index dim() const { return h0_.dim(); }

  const RealVector& h0_eigenvalues() const { return h0_eigs_; }
  const RealVector& h_eigenvalues() const { return h_eigs_; }

 private:
  HermitianMatrix h0_, v_, h_;
  SignFactorization fac_;
  RealVector h0_eigs_, h_eigs_;
};

// The step function xi as sorted jump points with the constant value on
// each bounded interval between consecutive points (zero on both tails).
struct SsfStep {
  std::vector<double> points;
  std::vector<int> values;  // size points.size() - 1; empty if points has < 2 entries

  // Closed-form Poisson smoothing (1/pi) int xi(mu) eps/((mu-l)^2+eps^2) dmu.
  double poisson(double lambda, double eps) const;
  // Closed form of -int xi(mu) (mu-z)^{-2} dmu.
  Complex resolvent_moment(Complex z) const;
};

SsfStep ssf_step_function(const PerturbationPair& pp, const Tolerances& tol = {});

// Counting oracle; errors if lambda sits on a jump within tolerance.
int ssf_exact(const PerturbationPair& pp, double lambda, const Tolerances& tol = {});

struct BoundaryOperators {
  DissipativeMatrix phi;  // J + K (H0 - lambda - i eps)^{-1} K
  HermitianMatrix a_lam;  // Re(phi - J)
  HermitianMatrix b_lam;  // Im(phi), PSD
};

BoundaryOperators phi_boundary(const PerturbationPair& pp, double lambda, double eps,
                               const Tolerances& tol = {});

// trindex(Xi(phi(lambda + i eps)), Xi(J)). Integer-valued at eps = 0 off
// both spectra; the Poisson smoothing of xi for eps > 0.
double ssf_trindex_rep(const PerturbationPair& pp, double lambda, double eps,
                       const Tolerances& tol = {});

struct PoissonCheck {
  double lhs = 0.0;  // tr(Xi(phi) - Xi(J))
  double rhs = 0.0;  // closed-form Poisson smoothing of the exact step function
  double residual = 0.0;
};

PoissonCheck poisson_check(const PerturbationPair& pp, double lambda, double eps,
                           const Tolerances& tol = {});

// Cauchy average over t of index(E_{J+A+tB}((-inf,0)), E_J((-inf,0)))
// through the crossing machinery with S = J, A = A(lambda), B = B(lambda).
double ssf_averaged_rep(const PerturbationPair& pp, double lambda, double eps,
                        const Tolerances& tol = {});

struct GapFormulas {
  int xi = 0;                   // counting oracle
  std::optional<int> sobolev;   // +-rank(E_{-+A(lambda)}((1, inf))), sign-definite V only
  int bs_gap = 0;               // index(E_{J+A(lambda)}((-inf,0)), E_J((-inf,0)))
};

// All applicable gap representations at a point of a joint spectral gap;
// they are asserted equal before returning.
GapFormulas gap_formulas(const PerturbationPair& pp, double lambda, const Tolerances& tol = {});

// Generalized shift function of the pair (S+A, S) for a signature S:
// index(E_{S+A}((-inf,lambda)), E_S((-inf,lambda))).
int generalized_ssf_pair(const HermitianMatrix& s_sig, const HermitianMatrix& a, double lambda,
                         const Tolerances& tol = {});

// The left limit at 0, evaluated at -offset with offset
// 1e-6 * (1 + |S+A|); asserts the offset window is free of spectrum.
int generalized_ssf_zero_minus(const HermitianMatrix& s_sig, const HermitianMatrix& a,
                               const Tolerances& tol = {});

struct GeneralizedBs {
  double lhs = 0.0;  // ssf_trindex_rep at (lambda, eps)
  double rhs = 0.0;  // Cauchy average of the generalized shift at 0-
  double residual = 0.0;
};

// Generalized Birman-Schwinger identity: the trindex representation
// against the Cauchy average over t of the generalized shift function of
// (J + A(lambda) + t B(lambda), J) at 0-.
GeneralizedBs generalized_bs(const PerturbationPair& pp, double lambda, double eps,
                             const Tolerances& tol = {});

// Midpoints of the joint spectral gaps of (H0, H) wider than 2*margin,
// plus one representative in each unbounded tail.
std::vector<double> joint_gap_points(const PerturbationPair& pp, double margin);

}  // namespace xishift

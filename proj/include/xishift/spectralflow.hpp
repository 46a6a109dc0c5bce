// Spectral-flow engine: crossing profiles n(t) = index(Xi(S+A+tB), Xi(S)),
// exact Cauchy averaging, the identity between that average and the
// trindex of (Xi(S+A+iB), Xi(S)), the log- and arctan-trace formulas, and
// the scattering-determinant identity.
//
// Crossings are located algebraically: S+A+tB is singular exactly when
// -1/t is a nonzero eigenvalue of B^{1/2}(S+A)^{-1}B^{1/2}, with matching
// multiplicity. Plateau values are obtained independently by counting the
// negative spectrum at interval midpoints, so the two routes cross-check
// each other.
#pragma once

#include "xishift/matcore.hpp"
#include "xishift/oplog.hpp"

#include <utility>
#include <vector>

namespace xishift {

// Data of one flow problem: self-adjoint S (invertible for the index
// identities), self-adjoint perturbation A, PSD B, together with an
// admissible coupling tau0 at which S + A + tau0*B is invertible
// (existence located by a scan, as the hypothesis requires).
class FlowInstance {
 public:
  FlowInstance(HermitianMatrix s, HermitianMatrix a, HermitianMatrix b,
               const Tolerances& tol = {});

  const HermitianMatrix& s() const { return s_; }
  const HermitianMatrix& a() const { return a_; }
  const HermitianMatrix& b() const { return b_; }
  double tau0() const { return tau0_; }
  Eigen::Index dim() const { return s_.dim(); }

  Matrix at(double t) const;  // S + A + t B
  HermitianMatrix b_sqrt(const Tolerances& tol = {}) const;

 private:
  HermitianMatrix s_, a_, b_;
  double tau0_;
};

struct Crossing {
  double t;
  int multiplicity;
};

// The step function n(t) as sorted jump points with multiplicities and the
// plateau value on each open interval between them (first entry = left
// tail, last = right tail).
struct CrossingProfile {
  std::vector<Crossing> crossings;  // ascending
  std::vector<int> plateaus;        // size crossings.size() + 1
  std::vector<double> plateau_samples;  // the t at which each plateau was counted
  double reference_shift = 0.0;     // tau* used when S+A itself was singular
  bool zero_is_crossing = false;

  // n(0). Throws if a crossing sits exactly at t = 0: the half-open
  // convention there is deliberately left undefined.
  int base_index() const;
  // Plateau value at an arbitrary non-crossing t.
  int value_at(double t) const;
};

CrossingProfile crossing_profile(const FlowInstance& inst, const Tolerances& tol = {});

// Exact Cauchy-measure average of a step function:
//   (1/pi) * sum_i n_i * (arctan(b_i) - arctan(a_i))
// over the plateau intervals, with arctan(+-inf) = +-pi/2. No quadrature.
double cauchy_average(const CrossingProfile& profile);

// trindex(Xi(S+A+iB), Xi(S)) through the dissipative logarithm and the
// pair-index machinery.
double trindex_xi_pair(const FlowInstance& inst, const Tolerances& tol = {});

struct IdentityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Residual of: trindex(Xi(S+A+iB), Xi(S)) = Cauchy average of n(t).
IdentityCheck verify_averaged_index(const FlowInstance& inst, const Tolerances& tol = {});

// Both sides of tr(log(S+zB) - log(S)) = sum_k m_k Log(1 + z lambda_k),
// lambda_k the eigenvalues of B^{1/2} S^{-1} B^{1/2}. For real z the
// admissible set requires S + tau z B invertible for all tau in [0,1];
// the blocking tau is named otherwise.
std::pair<Complex, Complex> log_trace_formula(const HermitianMatrix& s, const HermitianMatrix& b,
                                              Complex z, const Tolerances& tol = {});

struct ArctanTraceResult {
  double lhs = 0.0;        // tr arctan(B^{1/2}(S+eps B)^{-1}B^{1/2})
  double rhs_exact = 0.0;  // sum_k m_k arctan(lambda_k) + (pi/2) dim ker(S)
  int kernel_dim = 0;
};

// Regularized arctan trace against its exact eps -> 0 limit. The limit
// spectrum {lambda_k} is recovered from a reference coupling delta0 by the
// eigenvalue transport map mu -> mu / (1 - mu delta0), after removing the
// dim ker(S) eigenvalues pinned at 1/delta0.
ArctanTraceResult arctan_trace(const HermitianMatrix& s, const HermitianMatrix& b, double eps,
                               const Tolerances& tol = {});

struct BirmanKreinResult {
  Matrix smatrix;              // I - 2i B^{1/2} (S+A+iB)^{-1} B^{1/2}
  Complex det = 0.0;
  double trindex = 0.0;        // trindex(Xi(S+A+iB), Xi(S))
  double residual = 0.0;       // |det - exp(-2 pi i trindex)|
  double unitarity_defect = 0.0;
};

BirmanKreinResult birman_krein(const FlowInstance& inst, const Tolerances& tol = {});

// Scan helper shared with the shift module: smallest-|tau| coupling on the
// grid {0} union {+-2^-j / max(1,|B|)} at which S + A + tau B is
// invertible. Throws PreconditionError when none is found.
double find_admissible_coupling(const HermitianMatrix& s, const HermitianMatrix& a,
                                const HermitianMatrix& b, const Tolerances& tol = {});

}  // namespace xishift

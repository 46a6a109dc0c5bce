#include "xishift/spectralflow.hpp"

#include "xishift/pairindex.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace xishift {

namespace {

constexpr double kPi = std::numbers::pi;

RealVector herm_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error("hermitian eigensolver failed to converge");
  return es.eigenvalues();
}

// sigma_min / sigma_max, 0 for a zero matrix.
double inverse_condition(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  if (sv(0) == 0.0) return 0.0;
  return sv(sv.size() - 1) / sv(0);
}

// Count of the strictly negative spectrum. The collision guard sits at
// the eigensolver noise floor of the matrix actually being counted, so
// genuinely small eigenvalues between close or far-out crossings are
// still countable while sign decisions below the noise floor are refused.
int count_negative(const Matrix& herm) {
  const RealVector w = herm_eigenvalues(herm);
  const double guard =
      1e-12 * static_cast<double>(w.size()) * std::max(1.0, w.cwiseAbs().maxCoeff());
  for (Eigen::Index k = 0; k < w.size(); ++k)
    if (std::abs(w(k)) <= guard)
      throw EndpointCollisionError("eigenvalue " + std::to_string(w(k)) +
                                   " too close to 0 while counting the negative spectrum");
  int c = 0;
  for (Eigen::Index k = 0; k < w.size(); ++k)
    if (w(k) < 0.0) ++c;
  return c;
}

}  // namespace

double find_admissible_coupling(const HermitianMatrix& s, const HermitianMatrix& a,
                                const HermitianMatrix& b, const Tolerances& tol) {
  const Matrix base = s.matrix() + a.matrix();
  const double bnorm = std::max(1.0, b.norm());

  double best_tau = 0.0;
  double best_ratio = -1.0;
  auto consider = [&](double tau) {
    const double ratio = inverse_condition(base + tau * b.matrix());
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best_tau = tau;
    }
    return ratio > 1e-6;
  };

  if (consider(0.0)) return 0.0;
  for (int j = 0; j <= 52; ++j) {
    const double step = std::ldexp(1.0, -j) / bnorm;
    if (consider(step)) return step;
    if (consider(-step)) return -step;
  }
  // Accept a merely rank-full best candidate before giving up.
  const Matrix probe = base + best_tau * b.matrix();
  if (rank_eps(probe, tol) == probe.rows()) return best_tau;
  throw PreconditionError(
      "no admissible coupling found: S + A + tau B is singular on the whole scan grid");
}

FlowInstance::FlowInstance(HermitianMatrix s, HermitianMatrix a, HermitianMatrix b,
                           const Tolerances& tol)
    : s_(std::move(s)), a_(std::move(a)), b_(std::move(b)), tau0_(0.0) {
  if (s_.dim() != a_.dim() || s_.dim() != b_.dim())
    throw PreconditionError("FlowInstance: S, A, B must share one dimension");
  const RealVector bw = herm_eigenvalues(b_.matrix());
  if (bw.minCoeff() < -tol.tol_herm * std::max(1.0, b_.norm()))
    throw PreconditionError("FlowInstance: B is not positive semidefinite, eigenvalue " +
                            std::to_string(bw.minCoeff()));
  tau0_ = find_admissible_coupling(s_, a_, b_, tol);
}

Matrix FlowInstance::at(double t) const { return s_.matrix() + a_.matrix() + t * b_.matrix(); }

HermitianMatrix FlowInstance::b_sqrt(const Tolerances& tol) const {
  return func_calc_hermitian(b_, ScalarFunc::Sqrt, tol);
}

int CrossingProfile::base_index() const { return value_at(0.0); }

int CrossingProfile::value_at(double t) const {
  if (zero_is_crossing && t == 0.0)
    throw PreconditionError(
        "a crossing sits exactly at t = 0; the profile value there is undefined");
  std::size_t i = 0;
  while (i < crossings.size() && crossings[i].t < t) ++i;
  if (i < crossings.size() && crossings[i].t == t)
    throw PreconditionError("profile value requested exactly at crossing t = " +
                            std::to_string(t));
  return plateaus[i];
}

CrossingProfile crossing_profile(const FlowInstance& inst, const Tolerances& tol) {
  const Eigen::Index n = inst.dim();
  CrossingProfile profile;

  // Reference coupling: t = 0 when S+A is invertible, otherwise the
  // scanned admissible shift (reported in the profile).
  double ref = 0.0;
  {
    const double ratio = inverse_condition(inst.at(0.0));
    if (ratio <= 1e-9)
      ref = find_admissible_coupling(inst.s(), inst.a(), inst.b(), tol);
  }
  profile.reference_shift = ref;

  const Matrix bh = inst.b_sqrt(tol).matrix();
  const Matrix m_ref = inst.at(ref);
  const Matrix compressed_raw =
      bh * m_ref.partialPivLu().solve(Matrix::Identity(n, n)) * bh;
  const RealVector mu = herm_eigenvalues(compressed_raw);

  const double mu_cut = tol.tol_rank_rel * static_cast<double>(n) * mu.cwiseAbs().maxCoeff();
  std::vector<double> ts;
  for (Eigen::Index k = 0; k < mu.size(); ++k)
    if (std::abs(mu(k)) > mu_cut) ts.push_back(ref - 1.0 / mu(k));
  std::sort(ts.begin(), ts.end());

  // Merge coincident crossings at relative cluster_gap tolerance.
  for (std::size_t i = 0; i < ts.size();) {
    std::size_t j = i + 1;
    double sum = ts[i];
    while (j < ts.size() && ts[j] - ts[i] <= tol.cluster_gap * (1.0 + std::abs(ts[i]))) {
      sum += ts[j];
      ++j;
    }
    profile.crossings.push_back({sum / static_cast<double>(j - i), static_cast<int>(j - i)});
    i = j;
  }

  // Each algebraic crossing must actually open a kernel. The rank cutoff
  // is floored at scale one: at the crossing the largest singular value
  // itself may be the vanishing one (n = 1, or a wholly tiny family), and
  // a purely relative cutoff would then see full rank in roundoff noise.
  for (const Crossing& c : profile.crossings) {
    Eigen::JacobiSVD<Matrix> svd(inst.at(c.t));
    const auto& sv = svd.singularValues();
    const double cut =
        tol.tol_rank_rel * static_cast<double>(n) * std::max(1.0, sv(0));
    if (sv(sv.size() - 1) > cut)
      throw ConsistencyError("algebraic crossing t = " + std::to_string(c.t) +
                             " does not correspond to a kernel of S + A + tB");
    if (std::abs(c.t) <= tol.cluster_gap) profile.zero_is_crossing = true;
  }

  // Plateau values by independent rank counting at interior sample
  // points; unbounded tails sample at finite endpoint -+ 1. A sample that
  // lands on a near-zero eigenvalue (possible between close crossings) is
  // retried elsewhere in the same interval, where the plateau value is
  // identical.
  const int neg_s = count_negative(inst.s().matrix());
  auto count_at = [&](double t) { return count_negative(inst.at(t)) - neg_s; };
  auto sample_interval = [&](const std::vector<double>& candidates) {
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      try {
        const int v = count_at(candidates[k]);
        profile.plateaus.push_back(v);
        profile.plateau_samples.push_back(candidates[k]);
        return;
      } catch (const EndpointCollisionError&) {
        if (k + 1 == candidates.size()) throw;
      }
    }
  };

  if (profile.crossings.empty()) {
    sample_interval({0.0, 0.5, -0.5, 1.0});
    return profile;
  }
  const double t_lo = profile.crossings.front().t;
  const double t_hi = profile.crossings.back().t;
  const double d_lo = std::max(1.0, std::abs(t_lo));
  const double d_hi = std::max(1.0, std::abs(t_hi));
  sample_interval({t_lo - d_lo, t_lo - 2.0 * d_lo, t_lo - 0.5 * d_lo, t_lo - 4.0 * d_lo});
  for (std::size_t i = 0; i + 1 < profile.crossings.size(); ++i) {
    const double a = profile.crossings[i].t;
    const double b = profile.crossings[i + 1].t;
    std::vector<double> candidates;
    for (const double f : {0.5, 0.3, 0.7, 0.45, 0.55}) candidates.push_back(a + f * (b - a));
    sample_interval(candidates);
  }
  sample_interval({t_hi + d_hi, t_hi + 2.0 * d_hi, t_hi + 0.5 * d_hi, t_hi + 4.0 * d_hi});
  return profile;
}

double cauchy_average(const CrossingProfile& profile) {
  if (profile.plateaus.size() != profile.crossings.size() + 1)
    throw PreconditionError("malformed crossing profile");
  double sum = 0.0;
  for (std::size_t i = 0; i < profile.plateaus.size(); ++i) {
    const double lo = (i == 0) ? -0.5 * kPi : std::atan(profile.crossings[i - 1].t);
    const double hi =
        (i == profile.crossings.size()) ? 0.5 * kPi : std::atan(profile.crossings[i].t);
    sum += profile.plateaus[i] * (hi - lo);
  }
  return sum / kPi;
}

double trindex_xi_pair(const FlowInstance& inst, const Tolerances& tol) {
  const OrthoProjection q = xi_projection(inst.s(), tol);
  const DissipativeMatrix t(inst.at(0.0) + Complex(0.0, 1.0) * inst.b().matrix(), tol);
  const HermitianMatrix xi_t = xi_operator(t, tol);

  // When S+A is invertible, route through the admissible projection
  // Xi(S+A) as well; trindex re-checks the default route internally.
  if (inverse_condition(inst.at(0.0)) > 1e-9) {
    const OrthoProjection p = xi_projection(HermitianMatrix(inst.at(0.0), tol), tol);
    return trindex(xi_t.matrix(), q, p, tol);
  }
  return trindex(xi_t.matrix(), q, std::nullopt, tol);
}

IdentityCheck verify_averaged_index(const FlowInstance& inst, const Tolerances& tol) {
  IdentityCheck check;
  check.lhs = trindex_xi_pair(inst, tol);
  check.rhs = cauchy_average(crossing_profile(inst, tol));
  check.residual = std::abs(check.lhs - check.rhs);
  check.tolerance = 1e-8 * (1.0 + static_cast<double>(inst.dim()));
  check.pass = check.residual <= check.tolerance;
  return check;
}

std::pair<Complex, Complex> log_trace_formula(const HermitianMatrix& s, const HermitianMatrix& b,
                                              Complex z, const Tolerances& tol) {
  const Eigen::Index n = s.dim();
  if (rank_eps(s.matrix(), tol) != n)
    throw PreconditionError("log_trace_formula: S must be invertible");
  if (z == Complex(0.0, 0.0)) return {Complex(0.0, 0.0), Complex(0.0, 0.0)};
  if (z.imag() < 0.0)
    throw PreconditionError("log_trace_formula: z must lie in the closed upper half-plane");

  if (z.imag() == 0.0) {
    // Real coupling: S + tau z B must stay invertible on tau in [0, 1].
    const HermitianMatrix zero(Matrix::Zero(n, n), tol);
    const CrossingProfile prof = crossing_profile(FlowInstance(s, zero, b, tol), tol);
    for (const Crossing& c : prof.crossings) {
      const double tau = c.t / z.real();
      if (tau > 1e-15 && tau <= 1.0 + 1e-12)
        throw PreconditionError("z outside the admissible set: S + tau z B is singular at tau = " +
                                std::to_string(tau));
    }
  }

  const DissipativeMatrix shifted(s.matrix() + z * b.matrix(), tol);
  const DissipativeMatrix base(s.matrix(), tol);
  const Complex lhs = (log_dissipative(shifted, LogMethod::Schur).value -
                       log_dissipative(base, LogMethod::Schur).value)
                          .trace();

  const Matrix bh = func_calc_hermitian(b, ScalarFunc::Sqrt, tol).matrix();
  const Matrix compressed = bh * s.matrix().partialPivLu().solve(Matrix::Identity(n, n)) * bh;
  const RealVector lambda = herm_eigenvalues(compressed);
  // Segment-path logarithm from 1 to 1 + z lambda_k: equals the principal
  // branch, since the segment avoids 0 whenever z is admissible.
  Complex rhs(0.0, 0.0);
  for (Eigen::Index k = 0; k < lambda.size(); ++k)
    rhs += std::log(Complex(1.0, 0.0) + z * lambda(k));
  return {lhs, rhs};
}

ArctanTraceResult arctan_trace(const HermitianMatrix& s, const HermitianMatrix& b, double eps,
                               const Tolerances& tol) {
  if (eps <= 0.0) throw PreconditionError("arctan_trace: eps must be positive");
  const Eigen::Index n = s.dim();
  const Matrix bh = func_calc_hermitian(b, ScalarFunc::Sqrt, tol).matrix();
  const Matrix id = Matrix::Identity(n, n);

  const Matrix m_eps = s.matrix() + eps * b.matrix();
  if (rank_eps(m_eps, tol) != n)
    throw PreconditionError("arctan_trace: S + eps B is singular at eps = " +
                            std::to_string(eps));
  const HermitianMatrix a_eps(bh * m_eps.partialPivLu().solve(id) * bh, tol);

  ArctanTraceResult res;
  res.lhs = func_calc_hermitian(a_eps, ScalarFunc::Arctan, tol).matrix().trace().real();
  res.kernel_dim = static_cast<int>(n) - rank_eps(s.matrix(), tol);

  if (res.kernel_dim == 0) {
    const RealVector lambda =
        herm_eigenvalues(bh * s.matrix().partialPivLu().solve(id) * bh);
    for (Eigen::Index k = 0; k < lambda.size(); ++k) res.rhs_exact += std::atan(lambda(k));
    return res;
  }

  // Singular S: recover the limit spectrum from a reference coupling
  // delta0. A(delta0) pins dim ker(S) eigenvalues at exactly 1/delta0; the
  // remaining ones transport back to 0 via mu -> mu / (1 - mu delta0).
  const double bnorm = std::max(1.0, b.norm());
  for (int j = 0; j <= 26; ++j) {
    for (const double sgn : {1.0, -1.0}) {
      const double delta0 = sgn * std::ldexp(1.0, -j) / bnorm;
      const Matrix m0 = s.matrix() + delta0 * b.matrix();
      if (inverse_condition(m0) <= 1e-8) continue;
      RealVector mu = herm_eigenvalues(bh * m0.partialPivLu().solve(id) * bh);

      const double pin = 1.0 / delta0;
      std::vector<double> dist(mu.size());
      std::vector<Eigen::Index> order(mu.size());
      for (Eigen::Index k = 0; k < mu.size(); ++k) {
        dist[k] = std::abs(mu(k) - pin);
        order[k] = k;
      }
      std::sort(order.begin(), order.end(),
                [&](Eigen::Index a1, Eigen::Index a2) { return dist[a1] < dist[a2]; });
      const double scale_inv = 1.0 + std::abs(pin);
      const bool pinned_tight = dist[order[res.kernel_dim - 1]] <= 1e-6 * scale_inv;
      const bool rest_clear = res.kernel_dim == static_cast<int>(mu.size()) ||
                              dist[order[res.kernel_dim]] >= 1e-2 * scale_inv;
      if (!pinned_tight || !rest_clear) continue;

      res.rhs_exact = 0.5 * kPi * res.kernel_dim;
      for (std::size_t k = res.kernel_dim; k < order.size(); ++k) {
        const double m_val = mu(order[k]);
        res.rhs_exact += std::atan(m_val / (1.0 - m_val * delta0));
      }
      return res;
    }
  }
  throw PreconditionError(
      "arctan_trace: no reference coupling separates the kernel eigenvalues");
}

BirmanKreinResult birman_krein(const FlowInstance& inst, const Tolerances& tol) {
  const Eigen::Index n = inst.dim();
  const Matrix bh = inst.b_sqrt(tol).matrix();
  const DissipativeMatrix t(inst.at(0.0) + Complex(0.0, 1.0) * inst.b().matrix(), tol);

  BirmanKreinResult res;
  res.smatrix = Matrix::Identity(n, n) -
                Complex(0.0, 2.0) * bh * t.matrix().partialPivLu().solve(bh);
  res.unitarity_defect =
      op_norm(res.smatrix.adjoint() * res.smatrix - Matrix::Identity(n, n));
  res.det = determinant(res.smatrix);
  res.trindex = trindex_xi_pair(inst, tol);
  res.residual = std::abs(res.det - std::exp(Complex(0.0, -2.0 * kPi * res.trindex)));
  return res;
}

}  // namespace xishift

#include "xishift/oplog.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <numbers>
#include <vector>

namespace xishift {

namespace {
constexpr double kPi = std::numbers::pi;
}

DissipativeMatrix::DissipativeMatrix(const Matrix& m, const Tolerances& tol) {
  if (m.rows() == 0 || m.rows() != m.cols())
    throw PreconditionError("DissipativeMatrix: matrix must be square and nonempty");
  if (!m.allFinite()) throw PreconditionError("DissipativeMatrix: non-finite entries");

  const Matrix im_part = (m - m.adjoint()) / Complex(0.0, 2.0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(im_part, Eigen::EigenvaluesOnly);
  im_min_ = es.eigenvalues().minCoeff();
  const double scale = std::max(1.0, op_norm(m));
  if (im_min_ < -tol.tol_herm * scale)
    throw PreconditionError("matrix is not dissipative: min eigenvalue of Im(T) = " +
                            std::to_string(im_min_));

  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  const double cut = tol.tol_rank_rel * static_cast<double>(m.rows()) * sv(0);
  const double smin = sv(sv.size() - 1);
  if (smin <= cut)
    throw InvertibilityError("dissipative matrix is numerically singular: sigma_min = " +
                             std::to_string(smin));
  inv_norm_ = 1.0 / smin;
  mat_ = m;
}

void QuadratureConfig::validate() const {
  if (panels <= 0 || nodes_per_panel <= 0)
    throw ConfigError("quadrature panel/node counts must be positive");
  if (cutoff_factor <= 1.0) throw ConfigError("cutoff_factor must exceed 1");
  if (tail_tol <= 0.0) throw ConfigError("tail_tol must be positive");
}

Complex log_upper_branch(Complex z) {
  double theta = std::arg(z);
  // Rotate the cut onto the negative imaginary axis so the closed upper
  // half-plane gets arg in [0, pi] with negative reals at +pi.
  if (theta < -0.5 * kPi) theta += 2.0 * kPi;
  return Complex(std::log(std::abs(z)), theta);
}

namespace {

// Schur-Parlett logarithm: triangularize, take the scalar branch on the
// diagonal, recover the strict upper triangle from F T = T F one
// superdiagonal at a time. A clustered diagonal makes the recurrence
// divide by a near-zero separation, so in that case the triangular
// diagonal is split apart by a tiny reported perturbation first.
LogResult log_schur(const DissipativeMatrix& t) {
  const Eigen::Index n = t.dim();
  LogResult res;

  Eigen::ComplexSchur<Matrix> schur(t.matrix());
  if (schur.info() != Eigen::Success) throw Error("complex Schur decomposition failed");
  Matrix r = schur.matrixT();
  const Matrix& u = schur.matrixU();

  const double scale = std::max(1.0, op_norm(t.matrix()));
  const double sep_needed = 1e-8 * scale;

  bool clustered = false;
  for (Eigen::Index i = 0; i < n && !clustered; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (std::abs(r(i, i) - r(j, j)) < sep_needed) {
        clustered = true;
        break;
      }

  if (clustered) {
    double delta = 1e-12 * scale;
    for (int attempt = 0; attempt < 8; ++attempt) {
      Matrix rp = r;
      for (Eigen::Index k = 0; k < n; ++k) rp(k, k) += static_cast<double>(k + 1) * delta;
      double min_sep = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
          min_sep = std::min(min_sep, std::abs(rp(i, i) - rp(j, j)));
      if (min_sep >= 0.5 * delta) {
        r = rp;
        res.diagonal_perturbation = static_cast<double>(n)*delta;
        break;
      }
      delta *= 3.0;
    }
    if (res.diagonal_perturbation == 0.0)
      throw Error("could not split clustered Schur diagonal");
  }

  Matrix f = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) f(k, k) = log_upper_branch(r(k, k));
  for (Eigen::Index p = 1; p < n; ++p) {       // superdiagonal offset
    for (Eigen::Index i = 0; i + p < n; ++i) {
      const Eigen::Index j = i + p;
      Complex num = r(i, j) * (f(j, j) - f(i, i));
      for (Eigen::Index k = i + 1; k < j; ++k) num += r(i, k) * f(k, j) - f(i, k) * r(k, j);
      f(i, j) = num / (r(j, j) - r(i, i));
    }
  }

  res.value = u * f * u.adjoint();
  return res;
}

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_m.
void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w) {
  x.assign(m, 0.0);
  w.assign(m, 0.0);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (m + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < m; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = m * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[m - 1 - i] = z;
    w[i] = w[m - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
}

// Riemann-integral logarithm
//   log T = -i * int_0^inf ((T + i s)^{-1} - (1 + i s)^{-1} I) ds,
// split at Lambda: composite Gauss-Legendre below, analytic resummation of
// the Neumann-series tail above. The remainder bound after k_max terms is
// reported and enforced against tail_tol.
LogResult log_integral(const DissipativeMatrix& t, const QuadratureConfig& q) {
  q.validate();
  const Eigen::Index n = t.dim();
  const Matrix& m = t.matrix();
  const Matrix id = Matrix::Identity(n, n);
  const double norm_t = op_norm(m);
  const double cutoff = q.cutoff_factor * std::max(1.0, norm_t);

  std::vector<double> gx, gw;
  gauss_legendre(q.nodes_per_panel, gx, gw);

  Matrix acc = Matrix::Zero(n, n);
  const double h = cutoff / q.panels;
  for (int p = 0; p < q.panels; ++p) {
    const double a = p * h;
    for (int k = 0; k < q.nodes_per_panel; ++k) {
      const double s = a + 0.5 * h * (gx[k] + 1.0);
      const Complex is(0.0, s);
      const Matrix resolvent = (m + is * id).partialPivLu().solve(id);
      acc += (0.5 * h * gw[k]) * (resolvent - (1.0 / (1.0 + is)) * id);
    }
  }

  // Tail: for s >= Lambda expand both resolvents in powers of 1/(is) and
  // integrate term by term,
  //   int_Lambda^inf ds (T+is)^{-1} - (1+is)^{-1} I
  //     = sum_{k>=1} (-1)^k (T^k - I) (-i)^{k+1} Lambda^{-k} / k.
  const int k_max = 40;
  const double a_ratio = norm_t / cutoff;   // < 1 by cutoff_factor > 1
  const double b_ratio = 1.0 / cutoff;
  Matrix tail = Matrix::Zero(n, n);
  Matrix t_pow = m;
  Complex minus_i_pow(-1.0, 0.0);  // (-i)^{k+1} starting at k=1 -> (-i)^2 = -1
  double lam_pow = cutoff;
  for (int k = 1; k <= k_max; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    tail += (sign * minus_i_pow / (static_cast<double>(k) * lam_pow)) * (t_pow - id);
    t_pow = t_pow * m;
    minus_i_pow *= Complex(0.0, -1.0);
    lam_pow *= cutoff;
  }
  const double r = std::max(a_ratio, b_ratio);
  const double remainder =
      (std::pow(a_ratio, k_max + 1) + std::pow(b_ratio, k_max + 1)) /
      (static_cast<double>(k_max + 1) * (1.0 - r));
  if (!(remainder <= q.tail_tol))
    throw ConfigError("integral-log tail bound " + std::to_string(remainder) +
                      " exceeds tail_tol; increase cutoff_factor");

  LogResult res;
  res.value = Complex(0.0, -1.0) * (acc + tail);
  res.tail_bound = remainder;
  return res;
}

}  // namespace

LogResult log_dissipative(const DissipativeMatrix& t, LogMethod method,
                          const QuadratureConfig& q) {
  switch (method) {
    case LogMethod::Schur:
      return log_schur(t);
    case LogMethod::Integral:
      return log_integral(t, q);
  }
  throw ConfigError("unknown log method");
}

HermitianMatrix xi_operator(const DissipativeMatrix& t, const Tolerances& tol) {
  const Matrix l = log_dissipative(t, LogMethod::Schur).value;
  const Matrix im = (l - l.adjoint()) / Complex(0.0, 2.0);
  return HermitianMatrix(im / kPi, tol);
}

OrthoProjection xi_projection(const HermitianMatrix& s, const Tolerances& tol) {
  return spectral_projection(s, Interval::negative_axis(), tol);
}

HermitianMatrix xi_operator(const HermitianMatrix& s, const Tolerances& tol) {
  return HermitianMatrix(xi_projection(s, tol).matrix(), tol);
}

}  // namespace xishift

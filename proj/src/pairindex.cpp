#include "xishift/pairindex.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace xishift {

namespace {

// Kernel dimension with the scale floored at 1: differences of
// projections live on scale one, so a numerically-zero P - Q -+ I must
// count as a full kernel rather than as rank carried by roundoff noise.
int kernel_dim_unit_scale(const Matrix& m, const Tolerances& tol) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  const double cut =
      tol.tol_rank_rel * static_cast<double>(m.rows()) * std::max(1.0, sv(0));
  int kernel = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) <= cut) ++kernel;
  return kernel;
}

}  // namespace

int index_pair(const OrthoProjection& p, const OrthoProjection& q, const Tolerances& tol) {
  if (p.dim() != q.dim()) throw PreconditionError("index_pair: dimension mismatch");
  const Eigen::Index n = p.dim();
  const Matrix diff = p.matrix() - q.matrix();

  const double tr = diff.trace().real();
  const int idx = static_cast<int>(std::lround(tr));
  if (std::abs(tr - idx) > 0.1)
    throw PreconditionError("index_pair: tr(P-Q) = " + std::to_string(tr) +
                            " is far from an integer; inputs are not valid projections");
  if (std::abs(tr - idx) > static_cast<double>(n) * tol.tol_proj)
    throw ConsistencyError("index_pair: rounding defect " + std::to_string(std::abs(tr - idx)) +
                           " exceeds n * tol_proj");

  // Kernel-count route: dim ker(P-Q-I) - dim ker(P-Q+I).
  const Matrix id = Matrix::Identity(n, n);
  const int dim_plus = kernel_dim_unit_scale(diff - id, tol);
  const int dim_minus = kernel_dim_unit_scale(diff + id, tol);
  if (dim_plus - dim_minus != idx)
    throw ConsistencyError("index_pair: trace formula gives " + std::to_string(idx) +
                           " but kernel counts give " + std::to_string(dim_plus - dim_minus));
  return idx;
}

double trindex(const Matrix& a, const OrthoProjection& q,
               const std::optional<OrthoProjection>& p, const Tolerances& tol) {
  if (a.rows() != q.dim() || a.cols() != q.dim())
    throw PreconditionError("trindex: dimension mismatch");

  const double via_q = (a - q.matrix()).trace().real();
  if (!p) return via_q;

  const double via_p = (a - p->matrix()).trace().real() +
                       static_cast<double>(index_pair(*p, q, tol));
  if (std::abs(via_p - via_q) > static_cast<double>(a.rows()) * tol.tol_proj)
    throw ConsistencyError("trindex: value depends on the auxiliary projection (" +
                           std::to_string(via_p) + " vs " + std::to_string(via_q) + ")");
  return via_p;
}

double gtr(const Matrix& a, const Matrix& b, const std::optional<OrthoProjection>& q,
           const Tolerances& tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
    throw PreconditionError("gtr: operands must be square of equal dimension");
  const Eigen::Index n = a.rows();

  const OrthoProjection q0 = q ? *q : OrthoProjection::zero(n);
  const double via_q0 = trindex(a, q0, std::nullopt, tol) - trindex(b, q0, std::nullopt, tol);

  // Q-independence: recompute with the identity projection.
  const OrthoProjection q1 = OrthoProjection::identity(n);
  const double via_q1 = trindex(a, q1, std::nullopt, tol) - trindex(b, q1, std::nullopt, tol);
  const double slack = static_cast<double>(n) * tol.tol_proj;
  if (std::abs(via_q0 - via_q1) > slack)
    throw ConsistencyError("gtr: value depends on the auxiliary projection Q");

  // Finite dimension: gtr(A, B) = tr(A - B).
  const double direct = (a - b).trace().real();
  if (std::abs(via_q0 - direct) > slack)
    throw ConsistencyError("gtr: trindex difference " + std::to_string(via_q0) +
                           " disagrees with tr(A-B) = " + std::to_string(direct));
  return via_q0;
}

}  // namespace xishift

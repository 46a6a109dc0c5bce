#include "xishift/matcore.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <sstream>

namespace xishift {

void Tolerances::validate() const {
  if (tol_eig <= 0 || tol_proj <= 0 || tol_herm <= 0 || tol_rank_rel <= 0 || cluster_gap <= 0)
    throw ConfigError("all tolerances must be strictly positive");
}

double op_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double trace_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

Matrix diag_matrix(std::initializer_list<double> d) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  Eigen::Index k = 0;
  for (double v : d) m(k, k) = v, ++k;
  return m;
}

Matrix diag_matrix(std::initializer_list<Complex> d) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  Eigen::Index k = 0;
  for (Complex v : d) m(k, k) = v, ++k;
  return m;
}

static void require_square_finite(const Matrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols())
    throw PreconditionError(std::string(what) + ": matrix must be square and nonempty, got " +
                            std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  if (!m.allFinite()) throw PreconditionError(std::string(what) + ": matrix has non-finite entries");
}

HermitianMatrix::HermitianMatrix(const Matrix& m, const Tolerances& tol) {
  require_square_finite(m, "HermitianMatrix");
  defect_ = op_norm(m - m.adjoint());
  double scale = std::max(1.0, op_norm(m));
  if (defect_ > tol.tol_herm * scale)
    throw PreconditionError("hermiticity defect " + std::to_string(defect_) +
                            " exceeds tolerance " + std::to_string(tol.tol_herm * scale));
  mat_ = 0.5 * (m + m.adjoint());
}

double HermitianMatrix::norm() const {
  if (norm_ < 0) norm_ = op_norm(mat_);
  return norm_;
}

OrthoProjection::OrthoProjection(const Matrix& p, const Tolerances& tol) : mat_(p) {
  require_square_finite(p, "OrthoProjection");
  const double idem = op_norm(p * p - p);
  const double herm = op_norm(p - p.adjoint());
  if (idem > tol.tol_proj || herm > tol.tol_proj)
    throw PreconditionError("not an orthogonal projection: |P^2-P| = " + std::to_string(idem) +
                            ", |P-P*| = " + std::to_string(herm));
  const double tr = p.trace().real();
  rank_ = static_cast<int>(std::lround(tr));
  if (std::abs(tr - rank_) > tol.tol_proj * static_cast<double>(p.rows()))
    throw PreconditionError("projection trace " + std::to_string(tr) +
                            " is not near an integer rank");
}

OrthoProjection OrthoProjection::zero(Eigen::Index n) {
  return OrthoProjection(Matrix::Zero(n, n));
}

OrthoProjection OrthoProjection::identity(Eigen::Index n) {
  return OrthoProjection(Matrix::Identity(n, n));
}

Interval Interval::open(double lo, double hi) { return {lo, hi, false, false}; }
Interval Interval::closed(double lo, double hi) { return {lo, hi, true, true}; }
Interval Interval::point(double x) { return {x, x, true, true}; }
Interval Interval::negative_axis() { return below(0.0); }
Interval Interval::positive_axis() { return above(0.0); }

Interval Interval::below(double hi, bool closed) {
  return {-std::numeric_limits<double>::infinity(), hi, false, closed};
}

Interval Interval::above(double lo, bool closed) {
  return {lo, std::numeric_limits<double>::infinity(), closed, false};
}

std::string Interval::describe() const {
  std::ostringstream os;
  os << (lo_closed ? '[' : '(') << lo << ", " << hi << (hi_closed ? ']' : ')');
  return os.str();
}

SpectralDecomposition eig_hermitian(const HermitianMatrix& h, const Tolerances& tol) {
  tol.validate();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
  if (solver.info() != Eigen::Success)
    throw Error("hermitian eigensolver failed to converge (Eigen info " +
                std::to_string(static_cast<int>(solver.info())) + ")");

  SpectralDecomposition dec;
  dec.eigenvalues = solver.eigenvalues();
  dec.eigenvectors = solver.eigenvectors();

  const double scale = std::max(1.0, h.norm());
  const Matrix rebuilt =
      dec.eigenvectors * dec.eigenvalues.asDiagonal().toDenseMatrix().cast<Complex>() *
      dec.eigenvectors.adjoint();
  if (op_norm(rebuilt - h.matrix()) > tol.tol_eig * scale * 100.0)
    throw ConsistencyError("eigendecomposition reconstruction error exceeds tolerance");

  // multiplicities by gap clustering
  const double gap = tol.cluster_gap * scale;
  int run = 1;
  for (Eigen::Index k = 1; k < dec.eigenvalues.size(); ++k) {
    if (dec.eigenvalues(k) - dec.eigenvalues(k - 1) <= gap) {
      ++run;
    } else {
      dec.multiplicities.push_back(run);
      run = 1;
    }
  }
  dec.multiplicities.push_back(run);
  return dec;
}

namespace {

// Decide eigenvalue membership in a window; |x - endpoint| <= snap counts
// as sitting on the endpoint. Open endpoint collisions throw.
bool eig_selected(double x, const Interval& w, double snap) {
  if (std::isfinite(w.lo) && std::abs(x - w.lo) <= snap) {
    if (!w.lo_closed)
      throw EndpointCollisionError("eigenvalue " + std::to_string(x) +
                                   " collides with open endpoint of " + w.describe() +
                                   "; perturb the operator or use a closed endpoint deliberately");
    // On the lower endpoint of [lo, hi]: inside unless the window is a
    // point strictly to the right (cannot happen since lo <= hi).
    return true;
  }
  if (std::isfinite(w.hi) && std::abs(x - w.hi) <= snap) {
    if (!w.hi_closed)
      throw EndpointCollisionError("eigenvalue " + std::to_string(x) +
                                   " collides with open endpoint of " + w.describe() +
                                   "; perturb the operator or use a closed endpoint deliberately");
    return true;
  }
  return x > w.lo && x < w.hi;
}

}  // namespace

OrthoProjection spectral_projection(const HermitianMatrix& h, const Interval& window,
                                    const Tolerances& tol) {
  const SpectralDecomposition dec = eig_hermitian(h, tol);
  const double snap = tol.tol_eig * std::max(1.0, h.norm());
  Matrix p = Matrix::Zero(h.dim(), h.dim());
  for (Eigen::Index k = 0; k < dec.eigenvalues.size(); ++k) {
    if (eig_selected(dec.eigenvalues(k), window, snap))
      p += dec.eigenvectors.col(k) * dec.eigenvectors.col(k).adjoint();
  }
  return OrthoProjection(0.5 * (p + p.adjoint()), tol);
}

HermitianMatrix func_calc_hermitian(const HermitianMatrix& h, ScalarFunc f,
                                    const Tolerances& tol) {
  const SpectralDecomposition dec = eig_hermitian(h, tol);
  const double scale = std::max(1.0, h.norm());
  const double n = static_cast<double>(h.dim());
  RealVector w = dec.eigenvalues;

  switch (f) {
    case ScalarFunc::Arctan:
      for (Eigen::Index k = 0; k < w.size(); ++k) w(k) = std::atan(w(k));
      break;
    case ScalarFunc::Abs:
      for (Eigen::Index k = 0; k < w.size(); ++k) w(k) = std::abs(w(k));
      break;
    case ScalarFunc::Sqrt: {
      const double floor = -tol.tol_eig * scale;
      for (Eigen::Index k = 0; k < w.size(); ++k) {
        if (w(k) < floor)
          throw DomainError("sqrt of a matrix with negative eigenvalue " + std::to_string(w(k)));
        w(k) = std::sqrt(std::max(0.0, w(k)));
      }
      break;
    }
    case ScalarFunc::Sign: {
      // Kernel eigenvalues map to +1; cutoff matches the numerical rank rule.
      const double cut = tol.tol_rank_rel * n * h.norm();
      for (Eigen::Index k = 0; k < w.size(); ++k) w(k) = (w(k) < -cut) ? -1.0 : 1.0;
      break;
    }
  }

  Matrix out = dec.eigenvectors * w.asDiagonal().toDenseMatrix().cast<Complex>() *
               dec.eigenvectors.adjoint();
  return HermitianMatrix(0.5 * (out + out.adjoint()), tol);
}

int rank_eps(const Matrix& m, const Tolerances& tol) {
  require_square_finite(m, "rank_eps");
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double cut = tol.tol_rank_rel * static_cast<double>(m.rows()) * sv(0);
  int r = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) > cut) ++r;
  return r;
}

Complex determinant(const Matrix& m) {
  require_square_finite(m, "determinant");
  return m.determinant();
}

int count_eigs_in(const HermitianMatrix& h, const Interval& window, const Tolerances& tol) {
  const Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error("hermitian eigensolver failed to converge");
  const double snap = tol.tol_eig * std::max(1.0, h.norm());
  int count = 0;
  for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k)
    if (eig_selected(solver.eigenvalues()(k), window, snap)) ++count;
  return count;
}

int count_eigs_below(const HermitianMatrix& h, double x, const Tolerances& tol) {
  return count_eigs_in(h, Interval::below(x), tol);
}

}  // namespace xishift

#include "xishift/matcore.hpp"
#include "xishift/problem.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace xishift;

namespace {

// Independent 2x2 Hermitian eigen oracle: [[a, b],[conj(b), c]] has
// eigenvalues (a+c)/2 -+ sqrt(((a-c)/2)^2 + |b|^2) with eigenvector
// (b, lambda - a) for eigenvalue lambda.
struct Eig2 {
  double lo, hi;
  Eigen::Vector2cd v_lo, v_hi;
};

Eig2 eig2_oracle(double a, Complex b, double c) {
  const double mid = 0.5 * (a + c);
  const double rad = std::sqrt(0.25 * (a - c) * (a - c) + std::norm(b));
  Eig2 out;
  out.lo = mid - rad;
  out.hi = mid + rad;
  auto vec = [&](double lambda) {
    Eigen::Vector2cd v;
    if (std::abs(b) > 1e-14) {
      v << b, Complex(lambda - a, 0.0);
    } else {
      v << Complex(lambda == a ? 1.0 : 0.0, 0.0), Complex(lambda == a ? 0.0 : 1.0, 0.0);
    }
    return v.normalized().eval();
  };
  out.v_lo = vec(out.lo);
  out.v_hi = vec(out.hi);
  return out;
}

Matrix offdiag_ones() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

}  // namespace

TEST_CASE("eig_hermitian on diagonal input") {
  const HermitianMatrix h(diag_matrix({3.0, -1.0, -1.0}));
  const SpectralDecomposition dec = eig_hermitian(h);
  CHECK(dec.eigenvalues(0) == doctest::Approx(-1.0));
  CHECK(dec.eigenvalues(1) == doctest::Approx(-1.0));
  CHECK(dec.eigenvalues(2) == doctest::Approx(3.0));
  REQUIRE(dec.multiplicities.size() == 2);
  CHECK(dec.multiplicities[0] == 2);
  CHECK(dec.multiplicities[1] == 1);
}

TEST_CASE("eig_hermitian on the zero matrix") {
  const HermitianMatrix h(Matrix::Zero(2, 2));
  const SpectralDecomposition dec = eig_hermitian(h);
  CHECK(dec.eigenvalues(0) == 0.0);
  CHECK(dec.eigenvalues(1) == 0.0);
  REQUIRE(dec.multiplicities.size() == 1);
  CHECK(dec.multiplicities[0] == 2);
}

TEST_CASE("eig_hermitian matches the 2x2 closed form") {
  const Eig2 oracle = eig2_oracle(0.0, Complex(1.0, 0.0), 0.0);
  REQUIRE(oracle.lo == doctest::Approx(-1.0));
  REQUIRE(oracle.hi == doctest::Approx(1.0));

  const HermitianMatrix h(offdiag_ones());
  const SpectralDecomposition dec = eig_hermitian(h);
  CHECK(dec.eigenvalues(0) == doctest::Approx(oracle.lo).epsilon(1e-14));
  CHECK(dec.eigenvalues(1) == doctest::Approx(oracle.hi).epsilon(1e-14));
  // eigenvectors agree up to phase
  CHECK(std::abs(dec.eigenvectors.col(0).dot(oracle.v_lo)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(dec.eigenvectors.col(1).dot(oracle.v_hi)) == doctest::Approx(1.0).epsilon(1e-12));
  // frozen oracle values: (1, -+1)/sqrt(2)
  CHECK(std::abs(oracle.v_lo(0)) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(std::abs(oracle.v_hi(1)) == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("eig_hermitian reconstruction and unitarity on random input") {
  MatrixSampler sampler(401);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 2 + rep;
    const HermitianMatrix h(sampler.hermitian(n));
    const SpectralDecomposition dec = eig_hermitian(h);
    const Matrix rebuilt = dec.eigenvectors *
                           dec.eigenvalues.asDiagonal().toDenseMatrix().cast<Complex>() *
                           dec.eigenvectors.adjoint();
    CHECK(op_norm(rebuilt - h.matrix()) <= 1e-10 * std::max(1.0, h.norm()));
    CHECK(op_norm(dec.eigenvectors.adjoint() * dec.eigenvectors - Matrix::Identity(n, n)) <=
          1e-12);
    int msum = 0;
    for (int m : dec.multiplicities) msum += m;
    CHECK(msum == n);
  }
}

TEST_CASE("spectral_projection basic windows") {
  const HermitianMatrix h(diag_matrix({-2.0, 3.0}));
  const OrthoProjection p = spectral_projection(h, Interval::negative_axis());
  CHECK(p.rank() == 1);
  CHECK(op_norm(p.matrix() - diag_matrix({1.0, 0.0})) <= 1e-14);

  const HermitianMatrix ones(diag_matrix({1.0, 1.0}));
  CHECK(spectral_projection(ones, Interval::negative_axis()).rank() == 0);
}

TEST_CASE("spectral_projection of the exchange matrix") {
  // From the 2x2 oracle: negative subspace spanned by (1,-1)/sqrt(2).
  const HermitianMatrix h(offdiag_ones());
  const OrthoProjection p = spectral_projection(h, Interval::negative_axis());
  Matrix expected(2, 2);
  expected << 0.5, -0.5, -0.5, 0.5;
  CHECK(p.rank() == 1);
  CHECK(op_norm(p.matrix() - expected) <= 1e-14);
}

TEST_CASE("spectral window partition sums to the identity") {
  MatrixSampler sampler(402);
  for (int rep = 0; rep < 8; ++rep) {
    const int n = 3 + rep % 4;
    const HermitianMatrix h(sampler.hermitian(n));
    const OrthoProjection below = spectral_projection(h, Interval::negative_axis());
    const OrthoProjection at = spectral_projection(h, Interval::point(0.0));
    const OrthoProjection above = spectral_projection(h, Interval::positive_axis());
    CHECK(below.rank() + at.rank() + above.rank() == n);
    CHECK(op_norm(below.matrix() + at.matrix() + above.matrix() - Matrix::Identity(n, n)) <=
          1e-12);
    CHECK(below.rank() + below.kernel_dim() == n);
    CHECK(op_norm(below.matrix() * below.matrix() - below.matrix()) <= 1e-12);
  }
}

TEST_CASE("open endpoint collision is refused, closed endpoint accepts") {
  const HermitianMatrix h(diag_matrix({0.0, 1.0}));
  CHECK_THROWS_AS(spectral_projection(h, Interval::negative_axis()), EndpointCollisionError);
  CHECK(spectral_projection(h, Interval::point(0.0)).rank() == 1);
  CHECK(spectral_projection(h, Interval::below(0.0, true)).rank() == 1);
}

TEST_CASE("func_calc sign maps the kernel to +1") {
  const HermitianMatrix v(diag_matrix({4.0, -9.0, 0.0}));
  const HermitianMatrix j = func_calc_hermitian(v, ScalarFunc::Sign);
  CHECK(op_norm(j.matrix() - diag_matrix({1.0, -1.0, 1.0})) <= 1e-14);
}

TEST_CASE("func_calc arctan on a diagonal") {
  const HermitianMatrix h(diag_matrix({1.0, -1.0}));
  const HermitianMatrix f = func_calc_hermitian(h, ScalarFunc::Arctan);
  const double quarter_pi = std::numbers::pi / 4.0;
  CHECK(op_norm(f.matrix() - diag_matrix({quarter_pi, -quarter_pi})) <= 1e-14);
}

TEST_CASE("func_calc sqrt of a rank-one multiple") {
  // Oracle: [[1,1],[1,1]] = 2 P with P the rank-one projector, so the
  // square root is sqrt(2) P = [[1,1],[1,1]]/sqrt(2).
  Matrix m(2, 2);
  m << 1, 1, 1, 1;
  const HermitianMatrix f = func_calc_hermitian(HermitianMatrix(m), ScalarFunc::Sqrt);
  CHECK(op_norm(f.matrix() - m / std::sqrt(2.0)) <= 1e-14);
  CHECK(op_norm(f.matrix() * f.matrix() - m) <= 1e-14);
}

TEST_CASE("func_calc sqrt refuses a negative eigenvalue") {
  const HermitianMatrix h(diag_matrix({1.0, -1.0}));
  CHECK_THROWS_AS(func_calc_hermitian(h, ScalarFunc::Sqrt), DomainError);
}

TEST_CASE("sign squares to the identity, including singular input") {
  MatrixSampler sampler(403);
  for (int rep = 0; rep < 6; ++rep) {
    const int n = 2 + rep;
    Matrix h = sampler.hermitian(n);
    if (rep % 2 == 0) {
      // plant a kernel
      const SpectralDecomposition dec = eig_hermitian(HermitianMatrix(h));
      RealVector w = dec.eigenvalues;
      w(0) = 0.0;
      h = dec.eigenvectors * w.asDiagonal().toDenseMatrix().cast<Complex>() *
          dec.eigenvectors.adjoint();
    }
    const HermitianMatrix j = func_calc_hermitian(HermitianMatrix(h), ScalarFunc::Sign);
    CHECK(op_norm(j.matrix() * j.matrix() - Matrix::Identity(n, n)) <= 1e-12);
  }
}

TEST_CASE("rank_eps") {
  CHECK(rank_eps(diag_matrix({1.0, 0.0, 2.0})) == 2);
  CHECK(rank_eps(Matrix::Zero(3, 3)) == 0);
  // Oracle: singular values of [[1,1],[1,1]] are (2, 0).
  Matrix m(2, 2);
  m << 1, 1, 1, 1;
  CHECK(rank_eps(m) == 1);
}

TEST_CASE("determinant") {
  CHECK(std::abs(determinant(diag_matrix({Complex(2.0, 0.0), Complex(0.0, 3.0)})) -
                 Complex(0.0, 6.0)) <= 1e-14);
  CHECK(std::abs(determinant(Matrix::Identity(5, 5)) - Complex(1.0, 0.0)) <= 1e-14);
  Matrix m(2, 2);
  m << 1, 1, 1, 1;
  CHECK(std::abs(determinant(m)) <= 1e-14);
}

TEST_CASE("determinant of an assembled unitary has unit modulus") {
  MatrixSampler sampler(404);
  for (int rep = 0; rep < 5; ++rep) {
    const HermitianMatrix h(sampler.hermitian(4 + rep));
    const SpectralDecomposition dec = eig_hermitian(h);
    CHECK(std::abs(std::abs(determinant(dec.eigenvectors)) - 1.0) <= 1e-9);
  }
}

TEST_CASE("hermitian symmetrization records the defect") {
  Matrix m(2, 2);
  m << 1.0, Complex(0.0, 1e-10), Complex(0.0, 1e-10), 2.0;
  // (m - m*) has off-diagonal 2e-10 i; defect recorded, matrix accepted.
  const HermitianMatrix h(m);
  CHECK(h.hermiticity_defect() > 0.0);
  CHECK(h.hermiticity_defect() <= 1e-8);
  CHECK(op_norm(h.matrix() - h.matrix().adjoint()) == 0.0);

  Matrix bad(2, 2);
  bad << 1.0, 5.0, -5.0, 2.0;
  CHECK_THROWS_AS(HermitianMatrix{bad}, PreconditionError);
}

TEST_CASE("count_eigs_below and count_eigs_in") {
  const HermitianMatrix h(diag_matrix({-2.0, -1.0, 0.5, 3.0}));
  CHECK(count_eigs_below(h, 0.0) == 2);
  CHECK(count_eigs_below(h, 1.0) == 3);
  CHECK(count_eigs_in(h, Interval::above(1.0)) == 1);
  CHECK(count_eigs_in(h, Interval::closed(-1.0, 0.5)) == 2);
  CHECK_THROWS_AS(count_eigs_below(h, 0.5), EndpointCollisionError);
}

#include "xishift/pairindex.hpp"
#include "xishift/problem.hpp"

#include <doctest.h>

#include <cmath>

using namespace xishift;

namespace {

OrthoProjection proj(const Matrix& m) { return OrthoProjection(m); }

}  // namespace

TEST_CASE("index of simple projection pairs") {
  CHECK(index_pair(proj(diag_matrix({1.0, 0.0})), proj(diag_matrix({0.0, 1.0}))) == 0);
  CHECK(index_pair(proj(diag_matrix({1.0, 1.0})), proj(diag_matrix({1.0, 0.0}))) == 1);

  Matrix half(2, 2);
  half << 0.5, -0.5, -0.5, 0.5;
  CHECK(index_pair(proj(half), proj(diag_matrix({1.0, 0.0}))) == 0);
}

TEST_CASE("index antisymmetry, chain rule and vanishing on random projections") {
  MatrixSampler sampler(601);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 2 + rep % 7;
    const OrthoProjection p = proj(sampler.projection(n, sampler.uniform_int(0, n)));
    const OrthoProjection q = proj(sampler.projection(n, sampler.uniform_int(0, n)));
    const OrthoProjection r = proj(sampler.projection(n, sampler.uniform_int(0, n)));

    CHECK(index_pair(p, q) == -index_pair(q, p));
    CHECK(index_pair(p, r) == index_pair(p, q) + index_pair(q, r));
    CHECK(index_pair(p, q) == static_cast<int>(std::lround(
                                  (p.matrix() - q.matrix()).trace().real())));
  }
}

TEST_CASE("index vanishes for nearby projections") {
  MatrixSampler sampler(602);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 2 + rep % 5;
    const Matrix p = sampler.projection(n, sampler.uniform_int(0, n));
    // Cayley rotation keeps |P - UPU*| < 1
    const Matrix h = sampler.hermitian(n);
    const Matrix x = Complex(0.0, 0.05) * h / std::max(1.0, op_norm(h));
    const Matrix u = (Matrix::Identity(n, n) - x).partialPivLu().solve(
        Matrix::Identity(n, n) + x);
    const Matrix q = u * p * u.adjoint();
    REQUIRE(op_norm(p - q) < 1.0);
    CHECK(index_pair(proj(p), proj(q)) == 0);
  }
}

TEST_CASE("index refuses non-integer trace differences") {
  // An invalid "projection" must be rejected at construction already.
  CHECK_THROWS_AS(proj(diag_matrix({0.5, 0.0})), PreconditionError);
}

TEST_CASE("trindex with the default projection") {
  const OrthoProjection q = proj(diag_matrix({1.0, 0.0}));
  const Matrix a = diag_matrix({0.3, 0.9});
  CHECK(trindex(a, q) == doctest::Approx(0.2).epsilon(1e-14));
  // same value through a different admissible projection
  CHECK(trindex(a, q, proj(diag_matrix({0.0, 1.0}))) == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("trindex of a projection with itself is its index") {
  MatrixSampler sampler(603);
  const Matrix p = sampler.projection(4, 2);
  CHECK(trindex(p, proj(p)) == doctest::Approx(0.0));
}

TEST_CASE("trindex is independent of the admissible projection") {
  MatrixSampler sampler(604);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 3 + rep % 5;
    const Matrix a = 0.7 * sampler.hermitian(n);
    const OrthoProjection q = proj(sampler.projection(n, sampler.uniform_int(0, n)));
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int k = 0; k < 5; ++k) {
      const double v = trindex(a, q, proj(sampler.projection(n, sampler.uniform_int(0, n))));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK(hi - lo <= n * 1e-10);
  }
}

TEST_CASE("trindex is stable under small rotations of Q") {
  MatrixSampler sampler(605);
  const int n = 5;
  const Matrix a = sampler.hermitian(n);
  const Matrix q = sampler.projection(n, 2);
  const Matrix h = sampler.hermitian(n);
  const Matrix x = Complex(0.0, 0.05) * h / std::max(1.0, op_norm(h));
  const Matrix u =
      (Matrix::Identity(n, n) - x).partialPivLu().solve(Matrix::Identity(n, n) + x);
  const Matrix q1 = u * q * u.adjoint();
  REQUIRE(op_norm(q - q1) < 1.0);
  CHECK(trindex(a, proj(q)) == doctest::Approx(trindex(a, proj(q1))).epsilon(1e-12));
}

TEST_CASE("gtr equals the trace difference and ignores Q") {
  CHECK(gtr(diag_matrix({1.0, 2.0}), diag_matrix({0.0, 2.0})) == doctest::Approx(1.0));
  const Matrix a = diag_matrix({0.5, -0.5});
  CHECK(gtr(a, a) == doctest::Approx(0.0));

  const Matrix b = Matrix::Zero(2, 2);
  const double with_q0 = gtr(a, b, proj(diag_matrix({1.0, 0.0})));
  const double with_q1 = gtr(a, b, proj(diag_matrix({0.0, 1.0})));
  CHECK(with_q0 == doctest::Approx(0.0));
  CHECK(with_q1 == doctest::Approx(0.0));
}

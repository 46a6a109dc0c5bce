// Index of a Fredholm pair of projections, trindex of a (bounded operator,
// projection) pair, and the generalized trace of two bounded operators.
//
// At finite dimension every pair is Fredholm and every difference is
// trace class, so the infinite-dimensional distinctions collapse; each
// operation therefore evaluates its quantity along two algebraically
// different routes and treats disagreement as an internal error, which is
// what keeps silent formula bugs from passing.
#pragma once

#include "xishift/matcore.hpp"

#include <optional>

namespace xishift {

// index(P, Q): trace formula round(tr(P - Q)) cross-checked against the
// kernel-count formula dim ker(P - Q - I) - dim ker(P - Q + I).
int index_pair(const OrthoProjection& p, const OrthoProjection& q, const Tolerances& tol = {});

// trindex(A, Q) = tr(A - P) + index(P, Q) for an admissible projection P
// (any projection, at finite dimension). P defaults to Q; when a P is
// supplied the value is recomputed with P = Q and the two must agree.
double trindex(const Matrix& a, const OrthoProjection& q,
               const std::optional<OrthoProjection>& p = std::nullopt,
               const Tolerances& tol = {});

// gtr(A, B) = trindex(A, Q) - trindex(B, Q), independent of Q; evaluated
// for the supplied (or zero) Q and re-checked with the identity projection
// and against tr(A - B).
double gtr(const Matrix& a, const Matrix& b,
           const std::optional<OrthoProjection>& q = std::nullopt,
           const Tolerances& tol = {});

}  // namespace xishift

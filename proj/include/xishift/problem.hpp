// Problem ingestion: JSON documents describing either a flow instance
// (S, A, B) or a perturbation pair (H0, V), plus optional tolerances, an
// eps list, a lambda grid and a seed. Complex matrices are serialized
// row-major as arrays of [re, im] pairs, one array per row.
#pragma once

#include "xishift/matcore.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace xishift {

struct GridSpec {
  double min = -10.0;
  double max = 10.0;
  int count = 50;
};

struct ProblemFile {
  enum class Kind { Flow, Pair };

  Kind kind = Kind::Flow;
  Matrix s, a, b;    // flow
  Matrix h0, v;      // pair
  Tolerances tol;
  std::vector<double> eps = {1e-1, 1e-2};
  std::optional<GridSpec> grid;
  std::uint64_t seed = 0;

  Eigen::Index dim() const;
};

ProblemFile parse_problem(const std::string& text);
ProblemFile load_problem(const std::string& path);
std::string serialize_problem(const ProblemFile& p);

// Seeded generators producing admissible instances: S random Hermitian
// pushed away from 0, A random Hermitian, B = G*G rescaled; pairs get a
// random H0 and a random V (with a sign-definite V every third seed).
ProblemFile random_flow(int n, std::uint64_t seed);
ProblemFile random_pair(int n, std::uint64_t seed);

// Seeded Hermitian / PSD / unitary factories shared by the generators and
// the verification suites.
class MatrixSampler {
 public:
  explicit MatrixSampler(std::uint64_t seed);

  Matrix gaussian(int n);               // iid complex Gaussian entries
  Matrix hermitian(int n);              // (G + G*)/2
  Matrix hermitian_invertible(int n, double min_abs_eig = 0.3);
  Matrix psd(int n);                    // G* G, rescaled to unit norm
  Matrix unitary(int n);                // QR of a Gaussian
  Matrix projection(int n, int rank);   // U diag(1..1,0..0) U*
  double uniform(double lo, double hi);
  int uniform_int(int lo, int hi);

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace xishift

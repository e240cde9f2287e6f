#pragma once

#include <cstdint>
#include <vector>

#include "lsda/grid.hpp"
#include "lsda/operator.hpp"

namespace lsda {

struct EigenOptions {
  double tol = 1e-7;        // ||H psi - eps psi|| <= tol (1 + |eps|)
  int max_iter = 3000;
  std::uint64_t seed = 20240611;
  int guard = -1;           // extra block vectors; negative picks max(4, k/4)

  friend bool operator==(const EigenOptions&, const EigenOptions&) = default;
};

struct EigenSolution {
  std::vector<double> eigenvalues;       // ascending
  std::vector<SpinorField> eigenvectors; // orthonormal in the discrete inner product
  std::vector<double> residual_norms;
  int iterations = 0;
};

/// Lowest k eigenpairs by a block locally optimal preconditioned iteration from
/// a seeded random start, optionally seeded with previous orbitals. Collinear
/// operators are solved per spin channel, unpolarized ones as a single spatial
/// problem whose eigenpairs are duplicated for both spins. Throws SolverError
/// (carrying the best residuals) when max_iter is reached.
EigenSolution lowest_eigenpairs(const MeanFieldOperator& op, int k, const EigenOptions& opt = {},
                                const std::vector<SpinorField>* initial = nullptr);

/// Largest 2 n^3 accepted by dense_oracle.
inline constexpr std::size_t kDenseOracleMaxDimension = 4096;

/// Materializes H as a dense Hermitian matrix and returns its full spectrum.
/// Throws ConfigError above kDenseOracleMaxDimension and NumericError when the
/// assembled matrix is not Hermitian to 1e-12 relative.
EigenSolution dense_oracle(const MeanFieldOperator& op);

}  // namespace lsda

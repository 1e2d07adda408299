#pragma once

#include <iosfwd>
#include <string>

#include "mubtomo/types.hpp"

namespace mubtomo {

/// Unit-trace positive-semidefinite Hermitian operator on the bipartite
/// space. Construct through make_density (validating) or project_to_physical
/// (repairing); both enforce the physicality contract.
struct DensityMatrix {
  Mat mat;

  int dim() const { return static_cast<int>(mat.rows()); }
};

bool is_hermitian(const Mat& m, double tol = 1e-10);

/// Smallest eigenvalue of the Hermitian part of m.
double min_eigenvalue(const Mat& m);

/// Validates Hermiticity, unit trace, and eigenvalues >= -tol.
DensityMatrix make_density(const Mat& m, double tol = 1e-10);

/// Nearest physical state: hermitize, clip negative eigenvalues at zero,
/// renormalize the trace.
DensityMatrix project_to_physical(const Mat& m);

DensityMatrix maximally_mixed(int dim);

/// Text export/import: dim, then row-major (re, im) pairs.
void save_density(const DensityMatrix& rho, std::ostream& out);
DensityMatrix load_density(std::istream& in);

}  // namespace mubtomo

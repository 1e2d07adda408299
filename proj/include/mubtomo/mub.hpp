#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mubtomo/types.hpp"

namespace mubtomo {

/// One member state |psi_{m,i}> = sum_l c_l |l> of a mutually unbiased basis.
/// For basis_index >= 2 every coefficient has magnitude 1/sqrt(dim).
struct MubVector {
  int dim = 0;
  int basis_index = 0;  // m, 1..d+1
  int state_index = 0;  // i, 1..d
  Vec amplitudes;
};

/// Complete set of d+1 mutually unbiased bases of a d-dimensional
/// single-photon OAM subspace. Basis m=1 is the mode (computational) basis;
/// oam_labels[l] is the OAM value carried by mode index l.
struct MubSet {
  int dim = 0;
  std::vector<int> oam_labels;
  std::vector<std::vector<MubVector>> bases;  // [m-1][i-1]

  const MubVector& vector(int m, int i) const;
};

struct UnbiasednessReport {
  bool pass = false;
  double max_deviation = 0.0;
  long pair_count = 0;
};

/// OAM values spanned by the d-dimensional subspace.
/// d=2 -> {-2,+2}; d=3 -> {-1,0,+1}; d=4 -> {-2,-1,+1,+2}; d=5 -> {-2..+2}.
std::vector<int> oam_labels(int d);

/// Canonical complete MUB set for d in {2,3,4,5}. Coefficients are stored as
/// exact phase fractions of the circle and evaluated to double on build, so
/// repeated invocations are bit-identical.
MubSet build_mub_set(int d);

/// Certify |<psi_{m,i}|psi_{n,j}>|^2 = 1/d (m != n) and = delta_ij (m == n)
/// for every pair, within tol. The report carries the worst deviation.
UnbiasednessReport verify_unbiasedness(const MubSet& set, double tol);

/// Text export/import; amplitudes round-trip at full double precision.
void save_mub_set(const MubSet& set, std::ostream& out);
MubSet load_mub_set(std::istream& in);
void save_mub_set_file(const MubSet& set, const std::string& path);
MubSet load_mub_set_file(const std::string& path);

}  // namespace mubtomo

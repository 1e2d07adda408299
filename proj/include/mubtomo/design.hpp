#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mubtomo/mub.hpp"
#include "mubtomo/types.hpp"

namespace mubtomo {

/// Rank-1 projective measurement on the bipartite space, built from one MUB
/// state per arm. The stored vector is |psi_{m,i}>_A (x) |psi*_{n,j}>_B with
/// flat index (alpha-1)*d + beta; the B amplitudes enter conjugated, matching
/// the phase-conjugate hologram in the second detection arm.
struct JointProjector {
  int m = 0, i = 0, n = 0, j = 0;
  Vec vector;  // length D = d^2
};

enum class PlanKind { Complete, Overcomplete };

std::string to_string(PlanKind kind);
PlanKind plan_kind_from_string(const std::string& s);

struct MeasurementPlan {
  int dim = 0;
  PlanKind kind = PlanKind::Complete;
  std::vector<JointProjector> projectors;

  int bipartite_dim() const { return dim * dim; }
  /// Number of d x d quadrants in the correlation matrix:
  /// (d+1)^2 for the overcomplete plan, d^2 for the complete one.
  int quadrant_count() const;
};

/// Bipartite product vector (a (x) conj(b)) in the flat index convention.
Vec joint_vector(const MubVector& a, const MubVector& b);

/// All (m,i,n,j) combinations in lexicographic order: (d(d+1))^2 projectors.
MeasurementPlan build_overcomplete_plan(const MubSet& set);

/// Minimal tomographically complete subset: per photon, every state of basis
/// m=1 plus states i=1..d-1 of each basis m>=2 (state i=d dropped), all
/// pairwise combinations -> d^4 projectors.
MeasurementPlan build_complete_plan(const MubSet& set);

/// Measurement counts of the two reconstruction strategies: d^4 for the
/// single-particle MUB method, [4*C(d,2)+d]^2 for overcomplete tomography.
long plan_size_mubs(int d);
long plan_size_qst(int d);

/// Trace-orthonormal Hermitian operator basis of the D-dimensional space:
/// identity/sqrt(D) followed by the generalized Gell-Mann generators rescaled
/// so Tr(G_mu G_nu) = delta_mu_nu.
struct OperatorBasis {
  int dim = 0;
  std::vector<Mat> elements;  // D^2 matrices
};

OperatorBasis operator_basis(int D);

/// Design matrix B with B(k, mu) = <psi_k| G_mu |psi_k>; full column rank
/// certifies tomographic completeness of the plan.
RealMat b_matrix(const MeasurementPlan& plan, const OperatorBasis& basis);

struct CompletenessReport {
  bool complete = false;
  double condition_number = 0.0;
  double min_singular_value = 0.0;
  long rows = 0;
  long cols = 0;
};

CompletenessReport completeness_check(const MeasurementPlan& plan, const OperatorBasis& basis,
                                      double min_singular = 1e-8);

void save_plan(const MeasurementPlan& plan, std::ostream& out);
void save_plan_file(const MeasurementPlan& plan, const std::string& path);
void save_completeness_report(const CompletenessReport& report, std::ostream& out);

}  // namespace mubtomo

#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "mubtomo/density.hpp"
#include "mubtomo/design.hpp"
#include "mubtomo/rng.hpp"
#include "mubtomo/sim.hpp"

namespace mubtomo {

/// Complex lower-triangular matrix T with real diagonal: D^2 real parameters
/// mapping to the physical state T^dag T / Tr(T^dag T).
struct TriangularParam {
  Mat t;  // lower triangular, real diagonal

  int dim() const { return static_cast<int>(t.rows()); }
};

DensityMatrix rho_from_t(const TriangularParam& param);

/// Triangular factor of a physical state (inverse of rho_from_t up to the
/// usual phase freedom); used to warm-start fits from a linear inversion.
TriangularParam t_from_rho(const DensityMatrix& rho);

TriangularParam random_triangular(int dim, Rng& rng);

/// Pearson chi^2 between measured probabilities and Tr(rho Pi_k); model
/// probabilities below probability_floor are floored to keep terms finite.
double chi_squared(const std::vector<double>& p, const MeasurementPlan& plan,
                   const DensityMatrix& rho, double probability_floor = 1e-12);

/// chi^2 as a function of the D^2 real triangular parameters, with analytic
/// gradient. Parameter layout: rows r = 0..D-1, columns c = 0..r; diagonal
/// entries contribute one real parameter, off-diagonal entries two (re, im).
class ChiSquaredObjective {
 public:
  ChiSquaredObjective(const MeasurementPlan& plan, std::vector<double> p,
                      double probability_floor = 1e-12);

  int parameter_count() const { return dim_ * dim_; }
  int dim() const { return dim_; }

  double value(const RealVec& x) const;
  double value_and_gradient(const RealVec& x, RealVec& grad) const;

  static RealVec pack(const TriangularParam& param);
  static TriangularParam unpack(const RealVec& x, int dim);

 private:
  int dim_;
  Mat psi_;  // D x K, one column per projector
  std::vector<double> p_;
  double floor_;
};

struct FitConfig {
  int restarts = 4;
  int max_iterations = 2000;
  double tolerance = 1e-9;  // relative chi^2 change declaring convergence
  double probability_floor = 1e-12;
  std::uint64_t seed = 1;
  bool warm_start = true;  // first restart from the projected linear inversion
};

struct ReconstructionResult {
  DensityMatrix rho;
  double chi_squared = 0.0;
  double linear_entropy = 0.0;
  double fidelity = 0.0;  // against the maximally entangled target
  double sigma_entropy = 0.0;
  double sigma_fidelity = 0.0;
  int iterations = 0;  // iterations spent by the winning restart
  int restarts = 0;
  bool converged = false;
  std::vector<double> restart_values;  // best chi^2 of each restart
};

struct LinearInversion {
  DensityMatrix rho;
  bool projected = false;      // eigenvalue clipping was required
  double min_eigenvalue = 0.0; // before clipping
};

/// Shared workspace for repeated reconstructions over one plan: operator
/// basis, design matrix, and completeness certificate are built once.
class Reconstructor {
 public:
  explicit Reconstructor(const MeasurementPlan& plan);

  const CompletenessReport& certification() const { return report_; }

  LinearInversion linear_invert(const std::vector<double>& p) const;
  ReconstructionResult fit(const std::vector<double>& p, const FitConfig& config = {}) const;

  /// Poissonian bootstrap: redraw every count around the observed value,
  /// renormalize, refit; returns the sample standard deviations of the
  /// linear entropy and fidelity across replicas.
  std::pair<double, double> bootstrap(const Dataset& data, int n_replicas,
                                      const FitConfig& config = {}) const;

 private:
  const MeasurementPlan& plan_;
  OperatorBasis basis_;
  RealMat b_;
  CompletenessReport report_;
  DensityMatrix reference_;  // maximally entangled target for fidelity
};

/// One-shot conveniences over a temporary Reconstructor.
LinearInversion linear_invert(const std::vector<double>& p, const MeasurementPlan& plan,
                              const OperatorBasis& basis);
ReconstructionResult fit(const std::vector<double>& p, const MeasurementPlan& plan,
                         const FitConfig& config = {});
std::pair<double, double> bootstrap(const Dataset& data, const MeasurementPlan& plan,
                                    int n_replicas, const FitConfig& config = {});

void save_result(const ReconstructionResult& result, std::ostream& out);
ReconstructionResult load_result(std::istream& in);
void save_result_file(const ReconstructionResult& result, const std::string& path);
ReconstructionResult load_result_file(const std::string& path);

}  // namespace mubtomo

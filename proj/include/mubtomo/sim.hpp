#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "mubtomo/density.hpp"
#include "mubtomo/design.hpp"

namespace mubtomo {

/// Down-conversion source and detection chain parameters. schmidt_width
/// controls the spiral bandwidth through a Gaussian Schmidt envelope
/// lambda_l ~ exp(-l^2 / (2 w^2)); infinity gives the maximally entangled
/// state. Rates are per second, times in seconds.
struct SourceModel {
  int dim = 0;
  double schmidt_width = std::numeric_limits<double>::infinity();
  double pair_rate = 0.0;
  double arm_efficiency_a = 1.0;
  double arm_efficiency_b = 1.0;
  double background_singles_a = 0.0;
  double background_singles_b = 0.0;
  double gate_time = 0.0;
  double integration_time = 0.0;
};

/// Counts for one measurement setting over the integration window.
/// accidentals = singles_a * singles_b * gate_time / integration_time.
struct CountRecord {
  int m = 0, i = 0, n = 0, j = 0;
  long long coincidences = 0;
  long long singles_a = 0;
  long long singles_b = 0;
  double accidentals = 0.0;
};

struct Dataset {
  int dim = 0;
  PlanKind kind = PlanKind::Complete;
  double gate_time = 0.0;
  double integration_time = 0.0;
  std::uint64_t seed = 0;
  std::vector<CountRecord> records;  // aligned with the generating plan
};

/// Schmidt coefficients over oam_labels(d), normalized so sum of squares = 1.
std::vector<double> schmidt_coefficients(int d, double schmidt_width);

/// Pure target |psi> = sum_l lambda_l |l>|l>, as a density matrix.
DensityMatrix target_state(int d, double schmidt_width);

/// Tr(rho Pi) for one joint projector. Values in [-1e-12, 0) clamp to 0.
double true_probability(const DensityMatrix& rho, const JointProjector& proj);

/// Poissonian coincidence/singles counts for every setting of the plan.
/// Deterministic under a fixed seed; per-setting substreams make the draw
/// order irrelevant.
Dataset simulate_counts(const MeasurementPlan& plan, const SourceModel& model,
                        const DensityMatrix& rho, std::uint64_t seed);

/// Detection probabilities from counts: the accidental-referenced excess
/// x_k = (C_k - U_k)/U_k, scaled by Q / sum_k x_k so the Q quadrants of the
/// correlation matrix sum to one overall. Negative values floor at zero.
std::vector<double> normalize_probabilities(const Dataset& data);

/// QC = C/U, the measured-to-accidental coincidence ratio.
double quantum_contrast(const CountRecord& record);

/// Mean quantum contrast across a dataset.
double mean_quantum_contrast(const Dataset& data);

/// Same experiment observed factor-times longer: counts and integration time
/// scale together (accidentals follow).
Dataset scale_dataset(const Dataset& data, long long factor);

void save_dataset(const Dataset& data, std::ostream& out);
Dataset load_dataset(std::istream& in);
void save_dataset_file(const Dataset& data, const std::string& path);
Dataset load_dataset_file(const std::string& path);

}  // namespace mubtomo

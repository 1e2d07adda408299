#pragma once

#include <string>

#include "mubtomo/density.hpp"

namespace mubtomo {

/// S = 1 - Tr(rho^2); zero for pure states, 1 - 1/D for the maximally mixed.
double linear_entropy(const DensityMatrix& rho);

/// Tr(rho^2) = 1 - S.
double purity(const DensityMatrix& rho);

/// Uhlmann fidelity F = Tr[sqrt(sqrt(sigma) rho sqrt(sigma))]^2. When sigma
/// is pure this reduces to Tr(sigma rho), which is used directly.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

struct MetricReport {
  double linear_entropy = 0.0;
  double fidelity = 0.0;
  double purity = 0.0;
  std::string reference;
};

MetricReport make_metric_report(const DensityMatrix& rho, const DensityMatrix& sigma,
                                const std::string& reference_description);

}  // namespace mubtomo

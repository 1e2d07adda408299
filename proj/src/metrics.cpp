#include "mubtomo/metrics.hpp"

#include <cmath>

namespace mubtomo {

double purity(const DensityMatrix& rho) {
  return std::real((rho.mat * rho.mat).trace());
}

double linear_entropy(const DensityMatrix& rho) { return 1.0 - purity(rho); }

namespace {

// Hermitian square root with negative eigenvalues clipped at zero; fitted
// matrices are positive-semidefinite only to tolerance.
Mat psd_sqrt(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.adjoint()));
  const RealVec roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw std::invalid_argument("fidelity: dimension mismatch");
  }
  if (min_eigenvalue(rho.mat) < -1e-8 || min_eigenvalue(sigma.mat) < -1e-8) {
    throw CertificationError("fidelity: input is not positive-semidefinite");
  }
  if (linear_entropy(sigma) < 1e-12) {
    // sigma = |psi><psi|, so F = <psi|rho|psi> = Tr(sigma rho).
    return std::real((sigma.mat * rho.mat).trace());
  }
  // Tr sqrt(sqrt(sigma) rho sqrt(sigma)) equals the nuclear norm of
  // sqrt(rho) sqrt(sigma); the singular values avoid the square-root blowup
  // of near-zero eigenvalue noise in the sandwiched form.
  Eigen::BDCSVD<Mat> svd(psd_sqrt(rho.mat) * psd_sqrt(sigma.mat));
  const double trace_sqrt = svd.singularValues().sum();
  return trace_sqrt * trace_sqrt;
}

MetricReport make_metric_report(const DensityMatrix& rho, const DensityMatrix& sigma,
                                const std::string& reference_description) {
  MetricReport report;
  report.linear_entropy = linear_entropy(rho);
  report.purity = 1.0 - report.linear_entropy;
  report.fidelity = fidelity(rho, sigma);
  report.reference = reference_description;
  return report;
}

}  // namespace mubtomo

#include "mubtomo/density.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "mubtomo/io.hpp"

namespace mubtomo {

bool is_hermitian(const Mat& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

double min_eigenvalue(const Mat& m) {
  const Mat h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

DensityMatrix make_density(const Mat& m, double tol) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("make_density: matrix must be square");
  }
  if (!is_hermitian(m, tol)) {
    throw CertificationError("make_density: matrix is not Hermitian within tolerance");
  }
  if (std::fabs(m.trace().real() - 1.0) > tol || std::fabs(m.trace().imag()) > tol) {
    throw CertificationError("make_density: trace differs from 1");
  }
  if (min_eigenvalue(m) < -tol) {
    throw CertificationError("make_density: matrix has negative eigenvalues");
  }
  return DensityMatrix{0.5 * (m + m.adjoint())};
}

DensityMatrix project_to_physical(const Mat& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("project_to_physical: matrix must be square");
  }
  const Mat h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  RealVec evals = es.eigenvalues().cwiseMax(0.0);
  const double total = evals.sum();
  if (total <= 0.0) {
    throw CertificationError("project_to_physical: no positive spectral weight");
  }
  evals /= total;
  const Mat out =
      es.eigenvectors() * evals.asDiagonal() * es.eigenvectors().adjoint();
  return DensityMatrix{0.5 * (out + out.adjoint())};
}

DensityMatrix maximally_mixed(int dim) {
  if (dim < 1) throw std::invalid_argument("maximally_mixed: dim must be positive");
  return DensityMatrix{Mat::Identity(dim, dim) / static_cast<double>(dim)};
}

void save_density(const DensityMatrix& rho, std::ostream& out) {
  const int d = rho.dim();
  out << "density\n";
  out << "dim " << d << "\n";
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      if (c) out << ' ';
      out << fmt_double(rho.mat(r, c).real()) << ' ' << fmt_double(rho.mat(r, c).imag());
    }
    out << "\n";
  }
}

DensityMatrix load_density(std::istream& in) {
  std::string tag;
  in >> tag;
  if (tag != "density") throw IoError("density file: bad magic '" + tag + "'");
  int d = 0;
  in >> tag >> d;
  if (tag != "dim" || d < 1) throw IoError("density file: missing dim");
  Mat m(d, d);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      double re = 0.0, im = 0.0;
      in >> re >> im;
      m(r, c) = Cx(re, im);
    }
  }
  if (!in) throw IoError("density file: truncated matrix");
  return DensityMatrix{std::move(m)};
}

}  // namespace mubtomo

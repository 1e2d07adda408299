#include "mubtomo/design.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include "mubtomo/io.hpp"

namespace mubtomo {

std::string to_string(PlanKind kind) {
  return kind == PlanKind::Complete ? "complete" : "overcomplete";
}

PlanKind plan_kind_from_string(const std::string& s) {
  if (s == "complete") return PlanKind::Complete;
  if (s == "overcomplete") return PlanKind::Overcomplete;
  throw std::invalid_argument("unknown plan kind '" + s + "'");
}

int MeasurementPlan::quadrant_count() const {
  return kind == PlanKind::Overcomplete ? (dim + 1) * (dim + 1) : dim * dim;
}

Vec joint_vector(const MubVector& a, const MubVector& b) {
  if (a.dim != b.dim) {
    throw std::invalid_argument("joint_vector: dimension mismatch");
  }
  const int d = a.dim;
  Vec v(d * d);
  for (int alpha = 0; alpha < d; ++alpha) {
    for (int beta = 0; beta < d; ++beta) {
      v(alpha * d + beta) = a.amplitudes(alpha) * std::conj(b.amplitudes(beta));
    }
  }
  return v;
}

namespace {

MeasurementPlan plan_from_state_lists(const MubSet& set,
                                      const std::vector<std::pair<int, int>>& states,
                                      PlanKind kind) {
  MeasurementPlan plan;
  plan.dim = set.dim;
  plan.kind = kind;
  plan.projectors.reserve(states.size() * states.size());
  for (const auto& [m, i] : states) {
    for (const auto& [n, j] : states) {
      JointProjector p;
      p.m = m;
      p.i = i;
      p.n = n;
      p.j = j;
      p.vector = joint_vector(set.vector(m, i), set.vector(n, j));
      plan.projectors.push_back(std::move(p));
    }
  }
  return plan;
}

}  // namespace

MeasurementPlan build_overcomplete_plan(const MubSet& set) {
  std::vector<std::pair<int, int>> states;
  for (int m = 1; m <= set.dim + 1; ++m) {
    for (int i = 1; i <= set.dim; ++i) states.emplace_back(m, i);
  }
  return plan_from_state_lists(set, states, PlanKind::Overcomplete);
}

MeasurementPlan build_complete_plan(const MubSet& set) {
  std::vector<std::pair<int, int>> states;
  for (int i = 1; i <= set.dim; ++i) states.emplace_back(1, i);
  for (int m = 2; m <= set.dim + 1; ++m) {
    for (int i = 1; i <= set.dim - 1; ++i) states.emplace_back(m, i);
  }
  return plan_from_state_lists(set, states, PlanKind::Complete);
}

long plan_size_mubs(int d) {
  if (d < 2) throw std::invalid_argument("plan_size_mubs: d must be >= 2");
  const long dl = d;
  return dl * dl * dl * dl;
}

long plan_size_qst(int d) {
  if (d < 2) throw std::invalid_argument("plan_size_qst: d must be >= 2");
  const long dl = d;
  const long per_photon = 4 * (dl * (dl - 1) / 2) + dl;
  return per_photon * per_photon;
}

OperatorBasis operator_basis(int D) {
  if (D < 2) throw std::invalid_argument("operator_basis: D must be >= 2");
  OperatorBasis basis;
  basis.dim = D;
  basis.elements.reserve(static_cast<std::size_t>(D) * D);

  basis.elements.push_back(Mat::Identity(D, D) / std::sqrt(static_cast<double>(D)));

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < D; ++j) {
    for (int k = j + 1; k < D; ++k) {
      Mat sym = Mat::Zero(D, D);
      sym(j, k) = inv_sqrt2;
      sym(k, j) = inv_sqrt2;
      basis.elements.push_back(std::move(sym));

      Mat asym = Mat::Zero(D, D);
      asym(j, k) = Cx(0.0, -inv_sqrt2);
      asym(k, j) = Cx(0.0, inv_sqrt2);
      basis.elements.push_back(std::move(asym));
    }
  }
  for (int l = 1; l < D; ++l) {
    Mat diag = Mat::Zero(D, D);
    const double norm = 1.0 / std::sqrt(static_cast<double>(l) * (l + 1));
    for (int j = 0; j < l; ++j) diag(j, j) = norm;
    diag(l, l) = -static_cast<double>(l) * norm;
    basis.elements.push_back(std::move(diag));
  }
  return basis;
}

RealMat b_matrix(const MeasurementPlan& plan, const OperatorBasis& basis) {
  if (plan.bipartite_dim() != basis.dim) {
    throw std::invalid_argument("b_matrix: plan/basis dimension mismatch");
  }
  const long rows = static_cast<long>(plan.projectors.size());
  const long cols = static_cast<long>(basis.elements.size());
  RealMat b(rows, cols);
  for (long r = 0; r < rows; ++r) {
    const Vec& psi = plan.projectors[r].vector;
    for (long c = 0; c < cols; ++c) {
      b(r, c) = std::real(psi.dot(basis.elements[c] * psi));
    }
  }
  return b;
}

CompletenessReport completeness_check(const MeasurementPlan& plan, const OperatorBasis& basis,
                                      double min_singular) {
  const RealMat b = b_matrix(plan, basis);
  Eigen::BDCSVD<RealMat> svd(b);
  const auto& sv = svd.singularValues();
  CompletenessReport report;
  report.rows = b.rows();
  report.cols = b.cols();
  report.min_singular_value = sv(sv.size() - 1);
  report.condition_number =
      report.min_singular_value > 0.0 ? sv(0) / report.min_singular_value
                                      : std::numeric_limits<double>::infinity();
  report.complete = b.rows() >= b.cols() && report.min_singular_value > min_singular;
  return report;
}

void save_plan(const MeasurementPlan& plan, std::ostream& out) {
  out << "plan\n";
  out << "dim " << plan.dim << "\n";
  out << "kind " << to_string(plan.kind) << "\n";
  out << "projectors " << plan.projectors.size() << "\n";
  for (const auto& p : plan.projectors) {
    out << p.m << ' ' << p.i << ' ' << p.n << ' ' << p.j;
    for (int l = 0; l < p.vector.size(); ++l) {
      out << ' ' << fmt_double(p.vector(l).real()) << ' ' << fmt_double(p.vector(l).imag());
    }
    out << "\n";
  }
}

void save_plan_file(const MeasurementPlan& plan, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  save_plan(plan, out);
  if (!out) throw IoError("write failed: " + path);
}

void save_completeness_report(const CompletenessReport& report, std::ostream& out) {
  out << "completeness_report\n";
  out << "complete " << (report.complete ? 1 : 0) << "\n";
  out << "rows " << report.rows << "\n";
  out << "cols " << report.cols << "\n";
  out << "min_singular_value " << fmt_double(report.min_singular_value) << "\n";
  out << "condition_number " << fmt_double(report.condition_number) << "\n";
}

}  // namespace mubtomo

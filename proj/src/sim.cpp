#include "mubtomo/sim.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "mubtomo/io.hpp"
#include "mubtomo/rng.hpp"

namespace mubtomo {

std::vector<double> schmidt_coefficients(int d, double schmidt_width) {
  if (!(schmidt_width > 0.0)) {
    throw std::invalid_argument("schmidt_coefficients: width must be positive");
  }
  const std::vector<int> labels = oam_labels(d);
  std::vector<double> lambda(labels.size());
  double norm_sq = 0.0;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    const double l = labels[k];
    lambda[k] = std::isinf(schmidt_width)
                    ? 1.0
                    : std::exp(-l * l / (2.0 * schmidt_width * schmidt_width));
    norm_sq += lambda[k] * lambda[k];
  }
  const double inv_norm = 1.0 / std::sqrt(norm_sq);
  for (double& v : lambda) v *= inv_norm;
  return lambda;
}

DensityMatrix target_state(int d, double schmidt_width) {
  const std::vector<double> lambda = schmidt_coefficients(d, schmidt_width);
  Vec psi = Vec::Zero(d * d);
  for (int l = 0; l < d; ++l) psi(l * d + l) = lambda[l];
  return DensityMatrix{psi * psi.adjoint()};
}

double true_probability(const DensityMatrix& rho, const JointProjector& proj) {
  if (rho.dim() != proj.vector.size()) {
    throw std::invalid_argument("true_probability: dimension mismatch");
  }
  if (!is_hermitian(rho.mat, 1e-10)) {
    throw std::invalid_argument("true_probability: state is not Hermitian");
  }
  const double p = std::real(proj.vector.dot(rho.mat * proj.vector));
  if (p < -1e-12) {
    throw CertificationError("true_probability: negative probability " + fmt_double(p));
  }
  return std::max(p, 0.0);
}

namespace {

Mat partial_trace_b(const Mat& rho, int d) {
  Mat out = Mat::Zero(d, d);
  for (int a = 0; a < d; ++a) {
    for (int ap = 0; ap < d; ++ap) {
      Cx sum = 0.0;
      for (int b = 0; b < d; ++b) sum += rho(a * d + b, ap * d + b);
      out(a, ap) = sum;
    }
  }
  return out;
}

Mat partial_trace_a(const Mat& rho, int d) {
  Mat out = Mat::Zero(d, d);
  for (int b = 0; b < d; ++b) {
    for (int bp = 0; bp < d; ++bp) {
      Cx sum = 0.0;
      for (int a = 0; a < d; ++a) sum += rho(a * d + b, a * d + bp);
      out(b, bp) = sum;
    }
  }
  return out;
}

void validate_model(const SourceModel& model, int plan_dim) {
  if (model.dim != plan_dim) {
    throw std::invalid_argument("simulate_counts: model/plan dimension mismatch");
  }
  if (!(model.pair_rate >= 0.0)) throw std::invalid_argument("simulate_counts: pair_rate < 0");
  if (!(model.integration_time > 0.0)) {
    throw std::invalid_argument("simulate_counts: integration_time must be positive");
  }
  if (!(model.gate_time > 0.0)) {
    throw std::invalid_argument("simulate_counts: gate_time must be positive");
  }
  for (double eta : {model.arm_efficiency_a, model.arm_efficiency_b}) {
    if (!(eta >= 0.0 && eta <= 1.0)) {
      throw std::invalid_argument("simulate_counts: arm efficiency outside [0, 1]");
    }
  }
  for (double bg : {model.background_singles_a, model.background_singles_b}) {
    if (!(bg >= 0.0)) throw std::invalid_argument("simulate_counts: negative background rate");
  }
}

}  // namespace

Dataset simulate_counts(const MeasurementPlan& plan, const SourceModel& model,
                        const DensityMatrix& rho, std::uint64_t seed) {
  validate_model(model, plan.dim);
  if (rho.dim() != plan.bipartite_dim()) {
    throw std::invalid_argument("simulate_counts: state/plan dimension mismatch");
  }
  const int d = plan.dim;
  const double t = model.integration_time;
  const double rate_t = model.pair_rate * t;

  const Mat rho_a = partial_trace_b(rho.mat, d);
  const Mat rho_b = partial_trace_a(rho.mat, d);

  Dataset data;
  data.dim = d;
  data.kind = plan.kind;
  data.gate_time = model.gate_time;
  data.integration_time = t;
  data.seed = seed;
  data.records.resize(plan.projectors.size());

  for (std::size_t k = 0; k < plan.projectors.size(); ++k) {
    const JointProjector& proj = plan.projectors[k];
    const double p_joint = true_probability(rho, proj);

    // Single-arm marginals <a|rho_A|a> and <b*|rho_B|b*>. The joint vector is
    // the product a_alpha conj(b_beta) with both factors unit-norm, so the
    // partial contractions of v v^dag recover |a><a| and |b*><b*| directly.
    Mat aa = Mat::Zero(d, d);
    Mat bb = Mat::Zero(d, d);
    for (int alpha = 0; alpha < d; ++alpha) {
      for (int ap = 0; ap < d; ++ap) {
        Cx sum = 0.0;
        for (int beta = 0; beta < d; ++beta) {
          sum += proj.vector(alpha * d + beta) * std::conj(proj.vector(ap * d + beta));
        }
        aa(alpha, ap) = sum;
      }
    }
    for (int beta = 0; beta < d; ++beta) {
      for (int bp = 0; bp < d; ++bp) {
        Cx sum = 0.0;
        for (int alpha = 0; alpha < d; ++alpha) {
          sum += proj.vector(alpha * d + beta) * std::conj(proj.vector(alpha * d + bp));
        }
        bb(beta, bp) = sum;
      }
    }
    const double p_a = std::real((aa * rho_a).trace());
    const double p_b = std::real((bb * rho_b).trace());

    const double mean_a = rate_t * model.arm_efficiency_a * p_a + model.background_singles_a * t;
    const double mean_b = rate_t * model.arm_efficiency_b * p_b + model.background_singles_b * t;
    const double mean_accidentals = mean_a * mean_b * model.gate_time / t;
    const double mean_c =
        rate_t * model.arm_efficiency_a * model.arm_efficiency_b * p_joint + mean_accidentals;

    Rng rng(seed, static_cast<std::uint64_t>(k));
    CountRecord& rec = data.records[k];
    rec.m = proj.m;
    rec.i = proj.i;
    rec.n = proj.n;
    rec.j = proj.j;
    rec.coincidences = rng.poisson(mean_c);
    rec.singles_a = rng.poisson(mean_a);
    rec.singles_b = rng.poisson(mean_b);
    rec.accidentals = static_cast<double>(rec.singles_a) * static_cast<double>(rec.singles_b) *
                      model.gate_time / t;
  }
  return data;
}

std::vector<double> normalize_probabilities(const Dataset& data) {
  if (data.records.empty()) {
    throw std::invalid_argument("normalize_probabilities: empty dataset");
  }
  const int q = data.kind == PlanKind::Overcomplete ? (data.dim + 1) * (data.dim + 1)
                                                    : data.dim * data.dim;
  std::vector<double> excess(data.records.size());
  double total = 0.0;
  for (std::size_t k = 0; k < data.records.size(); ++k) {
    const CountRecord& rec = data.records[k];
    if (!(rec.accidentals > 0.0)) {
      throw std::invalid_argument("normalize_probabilities: zero accidental estimate");
    }
    excess[k] = (static_cast<double>(rec.coincidences) - rec.accidentals) / rec.accidentals;
    total += excess[k];
  }
  std::vector<double> p(excess.size(), 0.0);
  if (total <= 0.0) return p;  // pure accidentals everywhere
  const double upsilon = static_cast<double>(q) / total;
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::max(0.0, upsilon * excess[k]);
  return p;
}

double quantum_contrast(const CountRecord& record) {
  if (!(record.accidentals > 0.0)) {
    throw std::invalid_argument("quantum_contrast: zero accidental estimate");
  }
  return static_cast<double>(record.coincidences) / record.accidentals;
}

double mean_quantum_contrast(const Dataset& data) {
  if (data.records.empty()) {
    throw std::invalid_argument("mean_quantum_contrast: empty dataset");
  }
  double sum = 0.0;
  for (const CountRecord& rec : data.records) sum += quantum_contrast(rec);
  return sum / static_cast<double>(data.records.size());
}

Dataset scale_dataset(const Dataset& data, long long factor) {
  if (factor < 1) throw std::invalid_argument("scale_dataset: factor must be >= 1");
  Dataset out = data;
  out.integration_time = data.integration_time * static_cast<double>(factor);
  for (CountRecord& rec : out.records) {
    rec.coincidences *= factor;
    rec.singles_a *= factor;
    rec.singles_b *= factor;
    rec.accidentals = static_cast<double>(rec.singles_a) * static_cast<double>(rec.singles_b) *
                      out.gate_time / out.integration_time;
  }
  return out;
}

void save_dataset(const Dataset& data, std::ostream& out) {
  out << "dataset\n";
  out << "dim " << data.dim << "\n";
  out << "plan " << to_string(data.kind) << "\n";
  out << "gate_time " << fmt_double(data.gate_time) << "\n";
  out << "integration_time " << fmt_double(data.integration_time) << "\n";
  out << "seed " << data.seed << "\n";
  out << "records " << data.records.size() << "\n";
  out << "m i n j C A B\n";
  for (const CountRecord& rec : data.records) {
    out << rec.m << ' ' << rec.i << ' ' << rec.n << ' ' << rec.j << ' ' << rec.coincidences << ' '
        << rec.singles_a << ' ' << rec.singles_b << "\n";
  }
}

Dataset load_dataset(std::istream& in) {
  std::string tag;
  in >> tag;
  if (tag != "dataset") throw IoError("dataset file: bad magic '" + tag + "'");
  Dataset data;
  std::string kind;
  std::size_t count = 0;
  in >> tag >> data.dim;
  if (tag != "dim") throw IoError("dataset file: missing dim");
  in >> tag >> kind;
  if (tag != "plan") throw IoError("dataset file: missing plan kind");
  data.kind = plan_kind_from_string(kind);
  in >> tag >> data.gate_time;
  if (tag != "gate_time") throw IoError("dataset file: missing gate_time");
  in >> tag >> data.integration_time;
  if (tag != "integration_time") throw IoError("dataset file: missing integration_time");
  in >> tag >> data.seed;
  if (tag != "seed") throw IoError("dataset file: missing seed");
  in >> tag >> count;
  if (tag != "records") throw IoError("dataset file: missing record count");
  std::string col;
  for (int c = 0; c < 7; ++c) in >> col;  // column header
  data.records.resize(count);
  for (CountRecord& rec : data.records) {
    in >> rec.m >> rec.i >> rec.n >> rec.j >> rec.coincidences >> rec.singles_a >> rec.singles_b;
    rec.accidentals = static_cast<double>(rec.singles_a) * static_cast<double>(rec.singles_b) *
                      data.gate_time / data.integration_time;
  }
  if (!in) throw IoError("dataset file: truncated records");
  return data;
}

void save_dataset_file(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  save_dataset(data, out);
  if (!out) throw IoError("write failed: " + path);
}

Dataset load_dataset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  return load_dataset(in);
}

}  // namespace mubtomo

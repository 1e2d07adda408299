#include "mubtomo/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "mubtomo/io.hpp"
#include "mubtomo/metrics.hpp"
#include "mubtomo/parallel.hpp"

namespace mubtomo {

DensityMatrix rho_from_t(const TriangularParam& param) {
  const double norm = std::real((param.t.adjoint() * param.t).trace());
  if (!(norm > 0.0)) {
    throw std::invalid_argument("rho_from_t: T has no weight (all-zero matrix)");
  }
  Mat rho = (param.t.adjoint() * param.t) / norm;
  return DensityMatrix{0.5 * (rho + rho.adjoint())};
}

TriangularParam t_from_rho(const DensityMatrix& rho) {
  const int d = rho.dim();
  // rho = T^dag T with T lower-triangular is the Cholesky factorization seen
  // from the opposite corner: factorize J rho J (J = index reversal) and map
  // the factor back. Fitted inputs can be singular to machine precision, so
  // retry with a growing diagonal jitter until the factorization succeeds.
  Mat reversed(d, d);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) reversed(r, c) = rho.mat(d - 1 - r, d - 1 - c);
  }
  double jitter = 0.0;
  for (int attempt = 0; attempt < 60; ++attempt) {
    Eigen::LLT<Mat> llt(reversed + jitter * Mat::Identity(d, d));
    if (llt.info() == Eigen::Success) {
      const Mat l = llt.matrixL();
      Mat upper(d, d);
      for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) upper(r, c) = l(d - 1 - r, d - 1 - c);
      }
      return TriangularParam{upper.adjoint()};
    }
    jitter = jitter == 0.0 ? 1e-14 : jitter * 10.0;
  }
  throw CertificationError("t_from_rho: state could not be factorized");
}

TriangularParam random_triangular(int dim, Rng& rng) {
  Mat t = Mat::Zero(dim, dim);
  for (int r = 0; r < dim; ++r) {
    t(r, r) = rng.normal();
    for (int c = 0; c < r; ++c) t(r, c) = Cx(rng.normal(), rng.normal());
  }
  return TriangularParam{std::move(t)};
}

double chi_squared(const std::vector<double>& p, const MeasurementPlan& plan,
                   const DensityMatrix& rho, double probability_floor) {
  if (p.size() != plan.projectors.size()) {
    throw std::invalid_argument("chi_squared: probabilities not aligned with plan");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double model = true_probability(rho, plan.projectors[k]);
    const double denom = std::max(model, probability_floor);
    const double diff = p[k] - model;
    total += diff * diff / denom;
  }
  return total;
}

// ---------------------------------------------------------------------------
// chi^2 objective over triangular parameters

ChiSquaredObjective::ChiSquaredObjective(const MeasurementPlan& plan, std::vector<double> p,
                                         double probability_floor)
    : dim_(plan.bipartite_dim()), p_(std::move(p)), floor_(probability_floor) {
  if (p_.size() != plan.projectors.size()) {
    throw std::invalid_argument("ChiSquaredObjective: probabilities not aligned with plan");
  }
  psi_ = Mat(dim_, static_cast<long>(plan.projectors.size()));
  for (std::size_t k = 0; k < plan.projectors.size(); ++k) {
    psi_.col(static_cast<long>(k)) = plan.projectors[k].vector;
  }
}

RealVec ChiSquaredObjective::pack(const TriangularParam& param) {
  const int d = param.dim();
  RealVec x(d * d);
  int idx = 0;
  for (int r = 0; r < d; ++r) {
    x(idx++) = param.t(r, r).real();
    for (int c = 0; c < r; ++c) {
      x(idx++) = param.t(r, c).real();
      x(idx++) = param.t(r, c).imag();
    }
  }
  return x;
}

TriangularParam ChiSquaredObjective::unpack(const RealVec& x, int dim) {
  if (x.size() != dim * dim) {
    throw std::invalid_argument("ChiSquaredObjective::unpack: wrong parameter count");
  }
  Mat t = Mat::Zero(dim, dim);
  int idx = 0;
  for (int r = 0; r < dim; ++r) {
    t(r, r) = x(idx++);
    for (int c = 0; c < r; ++c) {
      const double re = x(idx++);
      const double im = x(idx++);
      t(r, c) = Cx(re, im);
    }
  }
  return TriangularParam{std::move(t)};
}

double ChiSquaredObjective::value(const RealVec& x) const {
  const TriangularParam param = unpack(x, dim_);
  const double norm = std::real((param.t.adjoint() * param.t).trace());
  if (!(norm > 0.0)) return std::numeric_limits<double>::infinity();
  const Mat w = param.t * psi_;
  double total = 0.0;
  for (std::size_t k = 0; k < p_.size(); ++k) {
    const double model = w.col(static_cast<long>(k)).squaredNorm() / norm;
    const double diff = p_[k] - model;
    total += diff * diff / std::max(model, floor_);
  }
  return total;
}

double ChiSquaredObjective::value_and_gradient(const RealVec& x, RealVec& grad) const {
  const TriangularParam param = unpack(x, dim_);
  const Mat& t = param.t;
  const double norm = std::real((t.adjoint() * t).trace());
  if (!(norm > 0.0)) {
    grad = RealVec::Zero(x.size());
    return std::numeric_limits<double>::infinity();
  }
  const Mat w = t * psi_;

  double total = 0.0;
  RealVec dchi(static_cast<long>(p_.size()));
  double weighted_model_sum = 0.0;
  for (std::size_t k = 0; k < p_.size(); ++k) {
    const long kl = static_cast<long>(k);
    const double model = w.col(kl).squaredNorm() / norm;
    const double diff = p_[k] - model;
    if (model > floor_) {
      total += diff * diff / model;
      dchi(kl) = -diff * (p_[k] + model) / (model * model);
    } else {
      total += diff * diff / floor_;
      dchi(kl) = -2.0 * diff / floor_;
    }
    weighted_model_sum += dchi(kl) * model;
  }

  // Wirtinger derivative d(chi^2)/d(conj T); the real-parameter gradient is
  // twice its real/imaginary parts on the lower triangle.
  const Mat g = (w * dchi.asDiagonal() * psi_.adjoint() - weighted_model_sum * t) / norm;
  grad = RealVec(x.size());
  int idx = 0;
  for (int r = 0; r < dim_; ++r) {
    grad(idx++) = 2.0 * g(r, r).real();
    for (int c = 0; c < r; ++c) {
      grad(idx++) = 2.0 * g(r, c).real();
      grad(idx++) = 2.0 * g(r, c).imag();
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// L-BFGS with Armijo backtracking

namespace {

struct MinimizeOutcome {
  RealVec x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

MinimizeOutcome lbfgs_minimize(const ChiSquaredObjective& objective, RealVec x0,
                               int max_iterations, double tolerance) {
  constexpr int kHistory = 10;
  constexpr double kArmijo = 1e-4;

  MinimizeOutcome out;
  RealVec x = std::move(x0);
  RealVec grad(x.size());
  double value = objective.value_and_gradient(x, grad);

  std::deque<RealVec> s_hist, y_hist;
  std::deque<double> rho_hist;

  int iter = 0;
  for (; iter < max_iterations; ++iter) {
    if (!std::isfinite(value)) break;
    if (grad.lpNorm<Eigen::Infinity>() < 1e-12) {
      out.converged = true;
      break;
    }

    // Two-loop recursion for the search direction.
    RealVec q = -grad;
    std::vector<double> alpha(s_hist.size());
    for (int h = static_cast<int>(s_hist.size()) - 1; h >= 0; --h) {
      alpha[h] = rho_hist[h] * s_hist[h].dot(q);
      q -= alpha[h] * y_hist[h];
    }
    if (!s_hist.empty()) {
      const double gamma =
          s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
      q *= gamma;
    }
    for (std::size_t h = 0; h < s_hist.size(); ++h) {
      const double beta = rho_hist[h] * y_hist[h].dot(q);
      q += (alpha[h] - beta) * s_hist[h];
    }

    double slope = grad.dot(q);
    if (!(slope < 0.0)) {  // not a descent direction; fall back to steepest
      q = -grad;
      slope = grad.dot(q);
    }

    double step = 1.0;
    RealVec x_next;
    double value_next = value;
    bool accepted = false;
    for (int backtrack = 0; backtrack < 60; ++backtrack) {
      x_next = x + step * q;
      value_next = objective.value(x_next);
      if (std::isfinite(value_next) && value_next <= value + kArmijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      out.converged = true;  // no further progress possible at double precision
      break;
    }

    RealVec grad_next(x.size());
    objective.value_and_gradient(x_next, grad_next);

    RealVec s = x_next - x;
    RealVec y = grad_next - grad;
    const double sy = s.dot(y);
    if (sy > 1e-14 * s.norm() * y.norm()) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > kHistory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }

    const double rel_change = (value - value_next) / std::max(std::fabs(value), 1e-30);
    x = std::move(x_next);
    grad = std::move(grad_next);
    value = value_next;
    if (rel_change < tolerance) {
      out.converged = true;
      ++iter;
      break;
    }
  }

  out.x = std::move(x);
  out.value = value;
  out.iterations = iter;
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Reconstructor

Reconstructor::Reconstructor(const MeasurementPlan& plan)
    : plan_(plan),
      basis_(operator_basis(plan.bipartite_dim())),
      b_(b_matrix(plan, basis_)),
      report_(completeness_check(plan, basis_)),
      reference_(target_state(plan.dim, std::numeric_limits<double>::infinity())) {}

LinearInversion Reconstructor::linear_invert(const std::vector<double>& p) const {
  if (p.size() != plan_.projectors.size()) {
    throw std::invalid_argument("linear_invert: probabilities not aligned with plan");
  }
  if (!report_.complete) {
    throw CertificationError("linear_invert: plan failed completeness certification");
  }
  Eigen::Map<const RealVec> pv(p.data(), static_cast<long>(p.size()));
  const Eigen::ColPivHouseholderQR<RealMat> qr(b_);
  if (qr.rank() < b_.cols()) {
    throw CertificationError("linear_invert: design matrix is singular");
  }
  const RealVec gamma = qr.solve(pv);

  const int big_d = plan_.bipartite_dim();
  Mat rho = Mat::Zero(big_d, big_d);
  for (long mu = 0; mu < gamma.size(); ++mu) rho += gamma(mu) * basis_.elements[mu];

  const double trace = rho.trace().real();
  if (!(std::fabs(trace) > 1e-12)) {
    throw CertificationError("linear_invert: reconstructed state has vanishing trace");
  }
  rho /= trace;

  LinearInversion result;
  result.min_eigenvalue = min_eigenvalue(rho);
  result.projected = result.min_eigenvalue < -1e-12;
  result.rho = result.projected ? project_to_physical(rho)
                                : DensityMatrix{0.5 * (rho + rho.adjoint())};
  return result;
}

ReconstructionResult Reconstructor::fit(const std::vector<double>& p,
                                        const FitConfig& config) const {
  if (!report_.complete) {
    throw CertificationError("fit: plan failed completeness certification");
  }
  if (config.restarts < 1) throw std::invalid_argument("fit: restarts must be >= 1");

  const ChiSquaredObjective objective(plan_, p, config.probability_floor);
  const int big_d = plan_.bipartite_dim();

  std::vector<RealVec> starts(static_cast<std::size_t>(config.restarts));
  std::size_t first_random = 0;
  if (config.warm_start) {
    const LinearInversion warm = linear_invert(p);
    starts[0] = ChiSquaredObjective::pack(t_from_rho(warm.rho));
    first_random = 1;
  }
  for (std::size_t r = first_random; r < starts.size(); ++r) {
    Rng rng(config.seed, 0x5eedu + r);
    starts[r] = ChiSquaredObjective::pack(random_triangular(big_d, rng));
  }

  std::vector<MinimizeOutcome> outcomes(starts.size());
  parallel_for(starts.size(), [&](std::size_t r) {
    outcomes[r] = lbfgs_minimize(objective, starts[r], config.max_iterations, config.tolerance);
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < outcomes.size(); ++r) {
    if (outcomes[r].value < outcomes[best].value) best = r;
  }

  ReconstructionResult result;
  result.rho = rho_from_t(ChiSquaredObjective::unpack(outcomes[best].x, big_d));
  result.chi_squared = outcomes[best].value;
  result.linear_entropy = linear_entropy(result.rho);
  result.fidelity = fidelity(result.rho, reference_);
  result.iterations = outcomes[best].iterations;
  result.restarts = static_cast<int>(outcomes.size());
  result.converged = outcomes[best].converged;
  result.restart_values.reserve(outcomes.size());
  for (const auto& o : outcomes) result.restart_values.push_back(o.value);
  return result;
}

std::pair<double, double> Reconstructor::bootstrap(const Dataset& data, int n_replicas,
                                                   const FitConfig& config) const {
  if (n_replicas < 2) throw std::invalid_argument("bootstrap: need at least 2 replicas");
  std::vector<double> entropies(static_cast<std::size_t>(n_replicas));
  std::vector<double> fidelities(static_cast<std::size_t>(n_replicas));

  parallel_for(static_cast<std::size_t>(n_replicas), [&](std::size_t r) {
    Rng rng(config.seed, 0xb007u + r);
    Dataset replica = data;
    for (CountRecord& rec : replica.records) {
      rec.coincidences = rng.poisson(static_cast<double>(rec.coincidences));
      rec.singles_a = rng.poisson(static_cast<double>(rec.singles_a));
      rec.singles_b = rng.poisson(static_cast<double>(rec.singles_b));
      rec.accidentals = static_cast<double>(rec.singles_a) * static_cast<double>(rec.singles_b) *
                        replica.gate_time / replica.integration_time;
    }
    FitConfig replica_config = config;
    replica_config.seed = mix64(config.seed) + r;
    const ReconstructionResult res = fit(normalize_probabilities(replica), replica_config);
    entropies[r] = res.linear_entropy;
    fidelities[r] = res.fidelity;
  });

  const auto sample_std = [](const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
  };
  return {sample_std(entropies), sample_std(fidelities)};
}

LinearInversion linear_invert(const std::vector<double>& p, const MeasurementPlan& plan,
                              const OperatorBasis& basis) {
  if (plan.bipartite_dim() != basis.dim) {
    throw std::invalid_argument("linear_invert: plan/basis dimension mismatch");
  }
  return Reconstructor(plan).linear_invert(p);
}

ReconstructionResult fit(const std::vector<double>& p, const MeasurementPlan& plan,
                         const FitConfig& config) {
  return Reconstructor(plan).fit(p, config);
}

std::pair<double, double> bootstrap(const Dataset& data, const MeasurementPlan& plan,
                                    int n_replicas, const FitConfig& config) {
  return Reconstructor(plan).bootstrap(data, n_replicas, config);
}

// ---------------------------------------------------------------------------
// result I/O

void save_result(const ReconstructionResult& result, std::ostream& out) {
  out << "reconstruction_result\n";
  out << "chi_squared " << fmt_double(result.chi_squared) << "\n";
  out << "linear_entropy " << fmt_double(result.linear_entropy) << "\n";
  out << "fidelity " << fmt_double(result.fidelity) << "\n";
  out << "sigma_entropy " << fmt_double(result.sigma_entropy) << "\n";
  out << "sigma_fidelity " << fmt_double(result.sigma_fidelity) << "\n";
  out << "iterations " << result.iterations << "\n";
  out << "restarts " << result.restarts << "\n";
  out << "converged " << (result.converged ? 1 : 0) << "\n";
  save_density(result.rho, out);
}

ReconstructionResult load_result(std::istream& in) {
  std::string tag;
  in >> tag;
  if (tag != "reconstruction_result") throw IoError("result file: bad magic '" + tag + "'");
  ReconstructionResult result;
  int converged = 0;
  in >> tag >> result.chi_squared;
  if (tag != "chi_squared") throw IoError("result file: missing chi_squared");
  in >> tag >> result.linear_entropy;
  if (tag != "linear_entropy") throw IoError("result file: missing linear_entropy");
  in >> tag >> result.fidelity;
  if (tag != "fidelity") throw IoError("result file: missing fidelity");
  in >> tag >> result.sigma_entropy;
  if (tag != "sigma_entropy") throw IoError("result file: missing sigma_entropy");
  in >> tag >> result.sigma_fidelity;
  if (tag != "sigma_fidelity") throw IoError("result file: missing sigma_fidelity");
  in >> tag >> result.iterations;
  if (tag != "iterations") throw IoError("result file: missing iterations");
  in >> tag >> result.restarts;
  if (tag != "restarts") throw IoError("result file: missing restarts");
  in >> tag >> converged;
  if (tag != "converged") throw IoError("result file: missing converged");
  result.converged = converged != 0;
  result.rho = load_density(in);
  return result;
}

void save_result_file(const ReconstructionResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  save_result(result, out);
  if (!out) throw IoError("write failed: " + path);
}

ReconstructionResult load_result_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  return load_result(in);
}

}  // namespace mubtomo

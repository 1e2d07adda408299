#include "mubtomo/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "mubtomo/io.hpp"
#include "mubtomo/metrics.hpp"
#include "mubtomo/reconstruct.hpp"
#include "mubtomo/render.hpp"

namespace mubtomo {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitCertification = 2;
constexpr int kExitIo = 3;

double parse_width(const std::string& text) {
  if (text == "inf" || text == "infinity") return std::numeric_limits<double>::infinity();
  std::size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("--width: expected a number or 'inf', got '" + text + "'");
  }
  if (pos != text.size()) {
    throw std::invalid_argument("--width: trailing characters in '" + text + "'");
  }
  if (!(value > 0.0)) throw std::invalid_argument("--width must be positive (or 'inf')");
  return value;
}

MeasurementPlan build_plan(const MubSet& set, PlanKind kind) {
  return kind == PlanKind::Complete ? build_complete_plan(set) : build_overcomplete_plan(set);
}

int cmd_mub(int dim, const std::string& out_path) {
  const MubSet set = build_mub_set(dim);
  const UnbiasednessReport report = verify_unbiasedness(set, 1e-12);
  save_mub_set_file(set, out_path);
  {
    std::ofstream cert(out_path + ".cert");
    if (!cert) throw IoError("cannot open for writing: " + out_path + ".cert");
    cert << "unbiasedness_report\n";
    cert << "dim " << dim << "\n";
    cert << "pass " << (report.pass ? 1 : 0) << "\n";
    cert << "max_deviation " << fmt_double(report.max_deviation) << "\n";
    cert << "pairs " << report.pair_count << "\n";
    if (!cert) throw IoError("write failed: " + out_path + ".cert");
  }
  std::cout << "wrote " << out_path << " (" << dim + 1 << " bases of " << dim << " states)\n";
  std::cout << "certification: " << (report.pass ? "pass" : "FAIL")
            << ", worst deviation " << fmt_double(report.max_deviation) << " over "
            << report.pair_count << " pairs\n";
  if (!report.pass) {
    std::cerr << "error: unbiasedness certification failed\n";
    return kExitCertification;
  }
  return kExitOk;
}

struct SimulateArgs {
  int dim = 3;
  PlanKind kind = PlanKind::Complete;
  std::string width = "inf";
  double pair_rate = 20000.0;
  double efficiency_a = 0.5;
  double efficiency_b = 0.5;
  double background_a = 200.0;
  double background_b = 200.0;
  double gate_time = 1e-8;
  double integration = 10.0;
  std::uint64_t seed = 1;
  std::string out_path;
};

int cmd_simulate(const SimulateArgs& args) {
  const MubSet set = build_mub_set(args.dim);
  const MeasurementPlan plan = build_plan(set, args.kind);

  SourceModel model;
  model.dim = args.dim;
  model.schmidt_width = parse_width(args.width);
  model.pair_rate = args.pair_rate;
  model.arm_efficiency_a = args.efficiency_a;
  model.arm_efficiency_b = args.efficiency_b;
  model.background_singles_a = args.background_a;
  model.background_singles_b = args.background_b;
  model.gate_time = args.gate_time;
  model.integration_time = args.integration;

  const DensityMatrix rho = target_state(args.dim, model.schmidt_width);
  const Dataset data = simulate_counts(plan, model, rho, args.seed);
  save_dataset_file(data, args.out_path);
  std::cout << "wrote " << args.out_path << " (" << data.records.size() << " records, "
            << to_string(args.kind) << " plan, d=" << args.dim << ")\n";
  std::cout << "mean quantum contrast " << fmt_double(mean_quantum_contrast(data)) << "\n";
  return kExitOk;
}

ReconstructionResult reconstruct_dataset(const Dataset& data, int restarts, int bootstrap_n,
                                         std::uint64_t seed) {
  const MubSet set = build_mub_set(data.dim);
  const MeasurementPlan plan = build_plan(set, data.kind);
  if (data.records.size() != plan.projectors.size()) {
    throw std::invalid_argument("dataset has " + std::to_string(data.records.size()) +
                                " records but the " + to_string(data.kind) + " plan has " +
                                std::to_string(plan.projectors.size()));
  }
  for (std::size_t k = 0; k < data.records.size(); ++k) {
    const CountRecord& rec = data.records[k];
    const JointProjector& proj = plan.projectors[k];
    if (rec.m != proj.m || rec.i != proj.i || rec.n != proj.n || rec.j != proj.j) {
      throw std::invalid_argument("dataset row " + std::to_string(k + 1) +
                                  " is not aligned with the plan's setting order");
    }
  }
  const Reconstructor reconstructor(plan);
  const CompletenessReport& cert = reconstructor.certification();
  if (!cert.complete) {
    std::ostringstream msg;
    msg << "plan failed completeness certification (min singular value "
        << fmt_double(cert.min_singular_value) << ")";
    throw CertificationError(msg.str());
  }

  FitConfig config;
  config.restarts = restarts;
  config.seed = mix64(seed ^ 0xf17u);
  ReconstructionResult result = reconstructor.fit(normalize_probabilities(data), config);
  if (bootstrap_n > 0) {
    FitConfig replica_config = config;
    replica_config.restarts = 1;  // warm start only; replicas stay near the fit
    replica_config.seed = mix64(seed ^ 0xb007u);
    const auto [sigma_s, sigma_f] = reconstructor.bootstrap(data, bootstrap_n, replica_config);
    result.sigma_entropy = sigma_s;
    result.sigma_fidelity = sigma_f;
  }
  return result;
}

struct ReconstructArgs {
  std::string in_path;
  std::string out_path;
  int restarts = 4;
  int bootstrap_n = 0;
  std::uint64_t seed = 1;
  std::optional<int> dim;
  std::optional<std::string> plan;
};

int cmd_reconstruct(const ReconstructArgs& args) {
  const Dataset data = load_dataset_file(args.in_path);
  if (args.dim && *args.dim != data.dim) {
    throw std::invalid_argument("--dim " + std::to_string(*args.dim) +
                                " conflicts with dataset dimension " + std::to_string(data.dim));
  }
  if (args.plan && plan_kind_from_string(*args.plan) != data.kind) {
    throw std::invalid_argument("--plan " + *args.plan + " conflicts with dataset plan " +
                                to_string(data.kind));
  }
  const ReconstructionResult result =
      reconstruct_dataset(data, args.restarts, args.bootstrap_n, args.seed);
  save_result_file(result, args.out_path);
  std::cout << "wrote " << args.out_path << "\n";
  std::cout << "chi_squared " << fmt_double(result.chi_squared) << "\n";
  std::cout << "linear_entropy " << fmt_double(result.linear_entropy);
  if (args.bootstrap_n > 0) std::cout << " +/- " << fmt_double(result.sigma_entropy);
  std::cout << "\nfidelity " << fmt_double(result.fidelity);
  if (args.bootstrap_n > 0) std::cout << " +/- " << fmt_double(result.sigma_fidelity);
  std::cout << "\nconverged " << (result.converged ? "yes" : "no") << " (" << result.iterations
            << " iterations, " << result.restarts << " restarts)\n";
  return kExitOk;
}

struct CompareArgs {
  int dim = 3;
  std::string out_path;
  std::string in_mubs;
  std::string in_qst;
  int restarts = 4;
  int bootstrap_n = 0;
  std::uint64_t seed = 1;
};

int cmd_compare(const CompareArgs& args) {
  const long m_mubs = plan_size_mubs(args.dim);
  const long m_qst = plan_size_qst(args.dim);

  std::optional<ReconstructionResult> mubs_result, qst_result;
  if (!args.in_mubs.empty()) {
    const Dataset data = load_dataset_file(args.in_mubs);
    if (data.dim != args.dim) {
      throw std::invalid_argument("--in-mubs dataset dimension does not match --dim");
    }
    if (data.kind != PlanKind::Complete) {
      throw std::invalid_argument("--in-mubs expects a complete-plan dataset");
    }
    mubs_result = reconstruct_dataset(data, args.restarts, args.bootstrap_n, args.seed);
  }
  if (!args.in_qst.empty()) {
    const Dataset data = load_dataset_file(args.in_qst);
    if (data.dim != args.dim) {
      throw std::invalid_argument("--in-qst dataset dimension does not match --dim");
    }
    if (data.kind != PlanKind::Overcomplete) {
      throw std::invalid_argument("--in-qst expects an overcomplete-plan dataset");
    }
    qst_result = reconstruct_dataset(data, args.restarts, args.bootstrap_n, args.seed);
  }

  std::ostringstream table;
  table << "comparison_report\n";
  table << "dim " << args.dim << "\n";
  table << "method M S sigma_S F sigma_F\n";
  const auto row = [&table](const std::string& name, long m,
                            const std::optional<ReconstructionResult>& r) {
    table << name << ' ' << m;
    if (r) {
      table << ' ' << fmt_double(r->linear_entropy) << ' ' << fmt_double(r->sigma_entropy) << ' '
            << fmt_double(r->fidelity) << ' ' << fmt_double(r->sigma_fidelity);
    } else {
      table << " - - - -";
    }
    table << "\n";
  };
  row("MUBs", m_mubs, mubs_result);
  row("QST", m_qst, qst_result);

  std::cout << table.str();
  if (!args.out_path.empty()) {
    std::ofstream out(args.out_path);
    if (!out) throw IoError("cannot open for writing: " + args.out_path);
    out << table.str();
    if (!out) throw IoError("write failed: " + args.out_path);
    std::cout << "wrote " << args.out_path << "\n";
  }
  return kExitOk;
}

struct RenderArgs {
  int dim = 3;
  int basis = 0;
  int state = 0;
  bool all = false;
  std::string out_prefix;
  int size = 256;
  double extent = 3.0;
  double waist = 1.0;
};

void render_one(const MubSet& set, int m, int i, const GridSpec& grid,
                const std::string& prefix) {
  const ModeImage image = render_mub_mode(set.vector(m, i), set.oam_labels, grid);
  const std::string stem = prefix + "_m" + std::to_string(m) + "_i" + std::to_string(i);
  write_intensity_pgm(image, stem + "_intensity.pgm");
  write_phase_ppm(image, stem + "_phase.ppm");
  write_sidecar(image, stem + "_mode.txt");
}

int cmd_render(const RenderArgs& args) {
  const MubSet set = build_mub_set(args.dim);
  GridSpec grid;
  grid.width = args.size;
  grid.height = args.size;
  grid.extent = args.extent;
  grid.waist = args.waist;

  if (args.all) {
    for (int m = 1; m <= args.dim + 1; ++m) {
      for (int i = 1; i <= args.dim; ++i) render_one(set, m, i, grid, args.out_prefix);
    }
    std::cout << "wrote " << (args.dim + 1) * args.dim << " image pairs at " << args.out_prefix
              << "_m*_i*\n";
  } else {
    render_one(set, args.basis, args.state, grid, args.out_prefix);
    std::cout << "wrote image pair " << args.out_prefix << "_m" << args.basis << "_i"
              << args.state << "\n";
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Tomography of OAM-entangled photon pairs from single-particle MUB measurements",
               "mubtomo"};
  app.require_subcommand(1);
  app.set_config("--config");

  // mub
  auto* mub_cmd = app.add_subcommand("mub", "Build and certify a MUB set, write it to a file");
  int mub_dim = 3;
  std::string mub_out = "mubset.txt";
  mub_cmd->add_option("--dim", mub_dim, "Subspace dimension (2..5)");
  mub_cmd->add_option("--out", mub_out, "Output path");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate coincidence counts for a plan");
  SimulateArgs sim_args;
  std::string sim_plan = "complete";
  sim_cmd->add_option("--dim", sim_args.dim, "Subspace dimension (2..5)");
  sim_cmd->add_option("--plan", sim_plan, "complete | overcomplete");
  sim_cmd->add_option("--width", sim_args.width, "Schmidt width (spiral bandwidth), or 'inf'");
  sim_cmd->add_option("--pair-rate", sim_args.pair_rate, "Generated pairs per second");
  sim_cmd->add_option("--efficiency-a", sim_args.efficiency_a, "Arm A efficiency in [0,1]");
  sim_cmd->add_option("--efficiency-b", sim_args.efficiency_b, "Arm B efficiency in [0,1]");
  sim_cmd->add_option("--background-a", sim_args.background_a, "Arm A background singles rate");
  sim_cmd->add_option("--background-b", sim_args.background_b, "Arm B background singles rate");
  sim_cmd->add_option("--gate-time", sim_args.gate_time, "Coincidence gate time in seconds");
  sim_cmd->add_option("--integration", sim_args.integration, "Integration time per setting");
  sim_cmd->add_option("--seed", sim_args.seed, "Random seed");
  sim_cmd->add_option("--out", sim_args.out_path, "Output dataset path")->required();

  // reconstruct
  auto* rec_cmd = app.add_subcommand("reconstruct", "Fit a density matrix to a dataset");
  ReconstructArgs rec_args;
  int rec_dim = -1;
  std::string rec_plan;
  rec_cmd->add_option("--in", rec_args.in_path, "Input dataset path")->required();
  rec_cmd->add_option("--out", rec_args.out_path, "Output result path")->required();
  rec_cmd->add_option("--restarts", rec_args.restarts, "Optimizer restarts");
  rec_cmd->add_option("--bootstrap", rec_args.bootstrap_n, "Bootstrap replica count");
  rec_cmd->add_option("--seed", rec_args.seed, "Random seed");
  rec_cmd->add_option("--dim", rec_dim, "Expected dimension (validated against the file)");
  rec_cmd->add_option("--plan", rec_plan, "Expected plan kind (validated against the file)");

  // compare
  auto* cmp_cmd = app.add_subcommand("compare", "Measurement-count and metric comparison table");
  CompareArgs cmp_args;
  cmp_cmd->add_option("--dim", cmp_args.dim, "Subspace dimension (2..5)");
  cmp_cmd->add_option("--out", cmp_args.out_path, "Output report path");
  cmp_cmd->add_option("--in-mubs", cmp_args.in_mubs, "Complete-plan dataset (MUBs row)");
  cmp_cmd->add_option("--in-qst", cmp_args.in_qst, "Overcomplete-plan dataset (QST row)");
  cmp_cmd->add_option("--restarts", cmp_args.restarts, "Optimizer restarts");
  cmp_cmd->add_option("--bootstrap", cmp_args.bootstrap_n, "Bootstrap replica count");
  cmp_cmd->add_option("--seed", cmp_args.seed, "Random seed");

  // render
  auto* ren_cmd = app.add_subcommand("render", "Render MUB mode intensity and phase images");
  RenderArgs ren_args;
  ren_cmd->add_option("--dim", ren_args.dim, "Subspace dimension (2..5)");
  ren_cmd->add_option("--basis", ren_args.basis, "Basis index m (1..d+1)");
  ren_cmd->add_option("--state", ren_args.state, "State index i (1..d)");
  ren_cmd->add_flag("--all", ren_args.all, "Render every mode of every basis");
  ren_cmd->add_option("--out", ren_args.out_prefix, "Output path prefix")->required();
  ren_cmd->add_option("--size", ren_args.size, "Image size in pixels");
  ren_cmd->add_option("--extent", ren_args.extent, "Grid half-width in waist units");
  ren_cmd->add_option("--waist", ren_args.waist, "Beam waist");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (mub_cmd->parsed()) return cmd_mub(mub_dim, mub_out);
    if (sim_cmd->parsed()) {
      sim_args.kind = plan_kind_from_string(sim_plan);
      return cmd_simulate(sim_args);
    }
    if (rec_cmd->parsed()) {
      if (rec_dim > 0) rec_args.dim = rec_dim;
      if (!rec_plan.empty()) rec_args.plan = rec_plan;
      return cmd_reconstruct(rec_args);
    }
    if (cmp_cmd->parsed()) return cmd_compare(cmp_args);
    if (ren_cmd->parsed()) {
      if (!ren_args.all && (ren_args.basis < 1 || ren_args.state < 1)) {
        throw std::invalid_argument("render: provide --basis and --state, or --all");
      }
      return cmd_render(ren_args);
    }
    throw std::invalid_argument("no subcommand given");
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const CertificationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCertification;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace mubtomo

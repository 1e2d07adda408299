#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "mubtomo/cli.hpp"
#include "mubtomo/mub.hpp"
#include "mubtomo/reconstruct.hpp"
#include "mubtomo/sim.hpp"
#include "helpers.hpp"

using namespace mubtomo;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

TEST_CASE("mub command writes a certified set deterministically") {
  const testing::TempDir dir("mubtomo_cli_mub");
  const std::string out = dir.file("d3.mub");
  CHECK(run_cli({"mub", "--dim", "3", "--out", out}) == 0);
  const MubSet set = load_mub_set_file(out);
  CHECK(set.bases.size() == 4);
  const std::string cert = slurp(out + ".cert");
  CHECK(cert.find("pass 1") != std::string::npos);
  CHECK(cert.find("max_deviation") != std::string::npos);

  const std::string first = slurp(out);
  CHECK(run_cli({"mub", "--dim", "3", "--out", out}) == 0);
  CHECK(slurp(out) == first);

  CHECK(run_cli({"mub", "--dim", "7", "--out", dir.file("d7.mub")}) == 1);
}

TEST_CASE("simulate writes datasets of the documented sizes") {
  const testing::TempDir dir("mubtomo_cli_sim");
  const std::string d2 = dir.file("d2.counts");
  CHECK(run_cli({"simulate", "--dim", "2", "--plan", "complete", "--integration", "1",
                 "--seed", "5", "--out", d2}) == 0);
  CHECK(load_dataset_file(d2).records.size() == 16);

  const std::string d5 = dir.file("d5.counts");
  CHECK(run_cli({"simulate", "--dim", "5", "--plan", "overcomplete", "--integration", "0.2",
                 "--seed", "5", "--out", d5}) == 0);
  CHECK(load_dataset_file(d5).records.size() == 900);

  const std::string repeat = dir.file("d2_repeat.counts");
  CHECK(run_cli({"simulate", "--dim", "2", "--plan", "complete", "--integration", "1",
                 "--seed", "5", "--out", repeat}) == 0);
  CHECK(slurp(repeat) == slurp(d2));

  CHECK(run_cli({"simulate", "--dim", "2", "--width", "-1", "--out", dir.file("x")}) == 1);
}

TEST_CASE("reconstruct fits a dataset end to end") {
  const testing::TempDir dir("mubtomo_cli_rec");
  const std::string counts = dir.file("d2.counts");
  CHECK(run_cli({"simulate", "--dim", "2", "--plan", "overcomplete", "--integration", "20",
                 "--pair-rate", "20000", "--seed", "9", "--out", counts}) == 0);

  const std::string result_path = dir.file("d2.result");
  CHECK(run_cli({"reconstruct", "--in", counts, "--out", result_path, "--restarts", "2",
                 "--seed", "9"}) == 0);
  const ReconstructionResult result = load_result_file(result_path);
  CHECK(result.fidelity >= 0.99);
  CHECK(result.rho.dim() == 4);

  // The minimal complete plan reconstructs too; its global excess-count normalization
  // rescales the probabilities, which costs a little fidelity in the fit.
  const std::string counts_c = dir.file("d2c.counts");
  CHECK(run_cli({"simulate", "--dim", "2", "--plan", "complete", "--integration", "20",
                 "--pair-rate", "20000", "--seed", "9", "--out", counts_c}) == 0);
  const std::string result_c = dir.file("d2c.result");
  CHECK(run_cli({"reconstruct", "--in", counts_c, "--out", result_c, "--restarts", "2",
                 "--seed", "9"}) == 0);
  CHECK(load_result_file(result_c).fidelity >= 0.9);

  // Reordered rows no longer align with the plan and are refused.
  Dataset shuffled = load_dataset_file(counts_c);
  std::swap(shuffled.records[0], shuffled.records[5]);
  const std::string shuffled_path = dir.file("shuffled.counts");
  save_dataset_file(shuffled, shuffled_path);
  CHECK(run_cli({"reconstruct", "--in", shuffled_path, "--out", result_path}) == 1);

  // Conflicting expectations are usage errors.
  CHECK(run_cli({"reconstruct", "--in", counts, "--out", result_path, "--dim", "3"}) == 1);
  CHECK(run_cli({"reconstruct", "--in", counts, "--out", result_path, "--plan",
                 "complete"}) == 1);
  // Missing input is an I/O failure.
  CHECK(run_cli({"reconstruct", "--in", dir.file("absent.counts"), "--out", result_path}) == 3);
}

TEST_CASE("reconstruct reports bootstrap uncertainties when asked") {
  const testing::TempDir dir("mubtomo_cli_boot");
  const std::string counts = dir.file("d2.counts");
  CHECK(run_cli({"simulate", "--dim", "2", "--plan", "complete", "--integration", "2",
                 "--seed", "31", "--out", counts}) == 0);
  const std::string result_path = dir.file("d2.result");
  CHECK(run_cli({"reconstruct", "--in", counts, "--out", result_path, "--restarts", "1",
                 "--bootstrap", "50", "--seed", "31"}) == 0);
  const ReconstructionResult result = load_result_file(result_path);
  CHECK(result.sigma_fidelity > 0.0);
  CHECK(result.sigma_entropy > 0.0);
}

TEST_CASE("compare prints the reference measurement counts") {
  const testing::TempDir dir("mubtomo_cli_cmp");
  for (const auto& [d, mubs, qst] :
       {std::tuple{2, "16", "36"}, std::tuple{3, "81", "225"}, std::tuple{4, "256", "784"}}) {
    const std::string out = dir.file("compare_d" + std::to_string(d) + ".txt");
    CHECK(run_cli({"compare", "--dim", std::to_string(d), "--out", out}) == 0);
    const std::string text = slurp(out);
    CHECK(text.find(std::string("MUBs ") + mubs) != std::string::npos);
    CHECK(text.find(std::string("QST ") + qst) != std::string::npos);
  }
}

TEST_CASE("compare reconstructs supplied datasets side by side") {
  const testing::TempDir dir("mubtomo_cli_cmp2");
  const std::string mubs_counts = dir.file("mubs.counts");
  const std::string qst_counts = dir.file("qst.counts");
  CHECK(run_cli({"simulate", "--dim", "2", "--plan", "complete", "--integration", "10",
                 "--seed", "3", "--out", mubs_counts}) == 0);
  CHECK(run_cli({"simulate", "--dim", "2", "--plan", "overcomplete", "--integration", "10",
                 "--seed", "4", "--out", qst_counts}) == 0);
  const std::string out = dir.file("compare.txt");
  CHECK(run_cli({"compare", "--dim", "2", "--in-mubs", mubs_counts, "--in-qst", qst_counts,
                 "--restarts", "1", "--out", out}) == 0);

  std::ifstream in(out);
  std::string line;
  std::getline(in, line);  // magic
  std::getline(in, line);  // dim
  std::getline(in, line);  // column header
  std::string method;
  long m = 0;
  double s = -1.0, sigma_s = -1.0, f = -1.0, sigma_f = -1.0;
  in >> method >> m >> s >> sigma_s >> f >> sigma_f;
  CHECK(method == "MUBs");
  CHECK(m == 16);
  CHECK(f > 0.9);
  in >> method >> m >> s >> sigma_s >> f >> sigma_f;
  CHECK(method == "QST");
  CHECK(m == 36);
  CHECK(f > 0.99);
  CHECK(s >= 0.0);

  // Swapped plan kinds are rejected; unreadable inputs are I/O failures.
  CHECK(run_cli({"compare", "--dim", "2", "--in-mubs", qst_counts}) == 1);
  CHECK(run_cli({"compare", "--dim", "2", "--in-mubs", dir.file("nope.counts")}) == 3);
}

TEST_CASE("render writes image pairs for every mode") {
  const testing::TempDir dir("mubtomo_cli_render");
  const std::string prefix = dir.file("mode");
  CHECK(run_cli({"render", "--dim", "3", "--all", "--size", "32", "--out", prefix}) == 0);
  int pairs = 0;
  for (int m = 1; m <= 4; ++m) {
    for (int i = 1; i <= 3; ++i) {
      const std::string stem = prefix + "_m" + std::to_string(m) + "_i" + std::to_string(i);
      if (std::filesystem::exists(stem + "_intensity.pgm") &&
          std::filesystem::exists(stem + "_phase.ppm")) {
        ++pairs;
      }
    }
  }
  CHECK(pairs == 12);

  const std::string prefix5 = dir.file("mode5");
  CHECK(run_cli({"render", "--dim", "5", "--all", "--size", "24", "--out", prefix5}) == 0);
  int pairs5 = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir.path())) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("mode5_", 0) == 0 && name.find("_intensity.pgm") != std::string::npos) {
      ++pairs5;
    }
  }
  CHECK(pairs5 == 30);

  CHECK(run_cli({"render", "--dim", "3", "--basis", "2", "--state", "9", "--size", "16",
                 "--out", prefix}) == 1);
  CHECK(run_cli({"render", "--dim", "3", "--size", "16", "--out", prefix}) == 1);
}

TEST_CASE("usage errors return exit code 1") {
  CHECK(run_cli({}) == 1);
  CHECK(run_cli({"unknown-subcommand"}) == 1);
  CHECK(run_cli({"simulate"}) == 1);  // missing required --out
}

TEST_CASE("the full pipeline runs for every supported dimension") {
  const testing::TempDir dir("mubtomo_cli_pipeline");
  for (int d = 2; d <= 5; ++d) {
    const std::string tag = std::to_string(d);
    const std::string mub_path = dir.file("d" + tag + ".mub");
    const std::string counts = dir.file("d" + tag + ".counts");
    const std::string result_path = dir.file("d" + tag + ".result");
    CHECK(run_cli({"mub", "--dim", tag, "--out", mub_path}) == 0);
    CHECK(run_cli({"simulate", "--dim", tag, "--plan", "complete", "--integration", "2",
                   "--seed", "77", "--out", counts}) == 0);
    CHECK(run_cli({"reconstruct", "--in", counts, "--out", result_path, "--restarts", "1",
                   "--seed", "77"}) == 0);
    const ReconstructionResult result = load_result_file(result_path);
    CHECK(result.rho.dim() == d * d);
    CHECK(result.fidelity > 0.5);
    CHECK(min_eigenvalue(result.rho.mat) > -1e-10);
  }
}

TEST_CASE("flags can come from a config file, with command line winning") {
  const testing::TempDir dir("mubtomo_cli_config");
  const std::string mub_path = dir.file("from_config.mub");
  const std::string config_path = dir.file("run.ini");
  {
    std::ofstream cfg(config_path);
    cfg << "[mub]\n";
    cfg << "dim=4\n";
    cfg << "out=" << mub_path << "\n";
  }
  CHECK(run_cli({"--config", config_path, "mub"}) == 0);
  CHECK(load_mub_set_file(mub_path).dim == 4);

  // An explicit flag overrides the file.
  const std::string override_path = dir.file("override.mub");
  CHECK(run_cli({"--config", config_path, "mub", "--out", override_path}) == 0);
  CHECK(load_mub_set_file(override_path).dim == 4);
}

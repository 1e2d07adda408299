#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "mubtomo/reconstruct.hpp"
#include "mubtomo/rng.hpp"

namespace mubtomo::testing {

inline DensityMatrix random_physical_state(int dim, std::uint64_t seed) {
  Rng rng(seed, 0xd15c0u);
  return rho_from_t(random_triangular(dim, rng));
}

/// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& stem) {
    path_ = std::filesystem::temp_directory_path() /
            (stem + "_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace mubtomo::testing

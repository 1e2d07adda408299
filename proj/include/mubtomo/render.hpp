#pragma once

#include <string>
#include <vector>

#include "mubtomo/mub.hpp"
#include "mubtomo/types.hpp"

namespace mubtomo {

/// Square sampling grid in beam-waist units; extent is the half-width, so x
/// and y run over [-extent, extent].
struct GridSpec {
  int width = 256;
  int height = 256;
  double extent = 3.0;
  double waist = 1.0;
};

/// Rendered transverse mode: intensity normalized to max 1, phase wrapped to
/// [-pi, pi).
struct ModeImage {
  int width = 0;
  int height = 0;
  std::vector<double> intensity;  // row-major
  std::vector<double> phase;
  GridSpec grid;
  int basis_index = 0;
  int state_index = 0;
};

/// p=0 Laguerre-Gaussian field: (r sqrt2 / w0)^|l| exp(-r^2/w0^2) exp(i l phi).
std::vector<Cx> lg_field(int ell, const GridSpec& grid);

/// Superposition sum_l c_l LG_l for one MUB state; labels supply the OAM
/// value of each mode index.
ModeImage render_mub_mode(const MubVector& v, const std::vector<int>& labels,
                          const GridSpec& grid);

/// 8-bit binary portable pixmaps: P5 grayscale for intensity, P6 with a
/// cyclic color wheel for phase, plus a text sidecar with the grid spec.
void write_intensity_pgm(const ModeImage& image, const std::string& path);
void write_phase_ppm(const ModeImage& image, const std::string& path);
void write_sidecar(const ModeImage& image, const std::string& path);

}  // namespace mubtomo

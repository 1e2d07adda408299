#include "mubtomo/render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "mubtomo/io.hpp"

namespace mubtomo {

namespace {

void check_grid(const GridSpec& grid) {
  if (grid.width < 2 || grid.height < 2) {
    throw std::invalid_argument("render: grid must be at least 2x2");
  }
  if (!(grid.extent > 0.0) || !(grid.waist > 0.0)) {
    throw std::invalid_argument("render: extent and waist must be positive");
  }
}

// Pixel centers: x in [-extent, extent] sampled uniformly.
double coordinate(int index, int count, double extent) {
  return -extent + 2.0 * extent * (index + 0.5) / count;
}

}  // namespace

std::vector<Cx> lg_field(int ell, const GridSpec& grid) {
  check_grid(grid);
  std::vector<Cx> field(static_cast<std::size_t>(grid.width) * grid.height);
  const double w0 = grid.waist;
  for (int row = 0; row < grid.height; ++row) {
    const double y = coordinate(row, grid.height, grid.extent);
    for (int col = 0; col < grid.width; ++col) {
      const double x = coordinate(col, grid.width, grid.extent);
      const double r = std::hypot(x, y);
      const double phi = std::atan2(y, x);
      const double amp = std::pow(r * std::sqrt(2.0) / w0, std::abs(ell)) *
                         std::exp(-r * r / (w0 * w0));
      field[static_cast<std::size_t>(row) * grid.width + col] = std::polar(amp, ell * phi);
    }
  }
  return field;
}

ModeImage render_mub_mode(const MubVector& v, const std::vector<int>& labels,
                          const GridSpec& grid) {
  check_grid(grid);
  if (static_cast<int>(labels.size()) != v.dim) {
    throw std::invalid_argument("render_mub_mode: label/vector length mismatch");
  }
  const std::size_t pixels = static_cast<std::size_t>(grid.width) * grid.height;
  std::vector<Cx> field(pixels, Cx(0.0, 0.0));
  for (int l = 0; l < v.dim; ++l) {
    const std::vector<Cx> component = lg_field(labels[l], grid);
    for (std::size_t px = 0; px < pixels; ++px) field[px] += v.amplitudes(l) * component[px];
  }

  ModeImage image;
  image.width = grid.width;
  image.height = grid.height;
  image.grid = grid;
  image.basis_index = v.basis_index;
  image.state_index = v.state_index;
  image.intensity.resize(pixels);
  image.phase.resize(pixels);
  double peak = 0.0;
  for (std::size_t px = 0; px < pixels; ++px) {
    image.intensity[px] = std::norm(field[px]);
    peak = std::max(peak, image.intensity[px]);
    double arg = std::arg(field[px]);
    if (arg >= kPi) arg -= 2.0 * kPi;  // wrap to [-pi, pi)
    image.phase[px] = arg;
  }
  if (peak > 0.0) {
    for (double& val : image.intensity) val /= peak;
  }
  return image;
}

namespace {

void hsv_wheel(double phase, unsigned char& r, unsigned char& g, unsigned char& b) {
  // Hue from the principal phase branch, full saturation and value.
  double h = (phase + kPi) / (2.0 * kPi) * 6.0;
  if (h >= 6.0) h -= 6.0;
  const int sector = static_cast<int>(h);
  const double frac = h - sector;
  const double q = 1.0 - frac;
  auto to_byte = [](double x) {
    return static_cast<unsigned char>(std::clamp(x, 0.0, 1.0) * 255.0 + 0.5);
  };
  double red = 0.0, green = 0.0, blue = 0.0;
  switch (sector) {
    case 0: red = 1.0, green = frac; break;
    case 1: red = q, green = 1.0; break;
    case 2: green = 1.0, blue = frac; break;
    case 3: green = q, blue = 1.0; break;
    case 4: red = frac, blue = 1.0; break;
    default: red = 1.0, blue = q; break;
  }
  r = to_byte(red);
  g = to_byte(green);
  b = to_byte(blue);
}

std::ofstream open_binary(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

}  // namespace

void write_intensity_pgm(const ModeImage& image, const std::string& path) {
  std::ofstream out = open_binary(path);
  out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(image.width));
  for (int r = 0; r < image.height; ++r) {
    for (int c = 0; c < image.width; ++c) {
      const double v = image.intensity[static_cast<std::size_t>(r) * image.width + c];
      row[static_cast<std::size_t>(c)] =
          static_cast<unsigned char>(std::clamp(v, 0.0, 1.0) * 255.0 + 0.5);
    }
    out.write(reinterpret_cast<const char*>(row.data()), image.width);
  }
  if (!out) throw IoError("write failed: " + path);
}

void write_phase_ppm(const ModeImage& image, const std::string& path) {
  std::ofstream out = open_binary(path);
  out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(image.width) * 3);
  for (int r = 0; r < image.height; ++r) {
    for (int c = 0; c < image.width; ++c) {
      const std::size_t px = static_cast<std::size_t>(r) * image.width + c;
      hsv_wheel(image.phase[px], row[3 * c], row[3 * c + 1], row[3 * c + 2]);
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<long>(row.size()));
  }
  if (!out) throw IoError("write failed: " + path);
}

void write_sidecar(const ModeImage& image, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "mode_image\n";
  out << "width " << image.width << "\n";
  out << "height " << image.height << "\n";
  out << "extent " << fmt_double(image.grid.extent) << "\n";
  out << "waist " << fmt_double(image.grid.waist) << "\n";
  out << "basis " << image.basis_index << "\n";
  out << "state " << image.state_index << "\n";
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace mubtomo

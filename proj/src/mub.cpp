#include "mubtomo/mub.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "mubtomo/io.hpp"

namespace mubtomo {
namespace {

// Superposition-basis coefficients, tabulated as integer phase exponents k
// with c_{m,i,l} = exp(2*pi*I * k / unit) / sqrt(d). Rows are (m,i) ordered
// exactly as in the canonical dephased-Hadamard tables; m=1 (the mode basis) is the
// identity and is generated separately.
//
// Phase units: the d=2 and d=4 tables use quarter turns (entries 1,-1,i,-i),
// the d=3 and d=5 tables use d-th roots of unity.

struct PhaseTable {
  int unit;
  const int* exponents;  // (d * d) entries per superposition basis, d bases
};

constexpr int kTableD2[2 * 2 * 2] = {
    0, 0, 0, 2,  // m=2
    0, 1, 0, 3,  // m=3
};

constexpr int kTableD3[3 * 3 * 3] = {
    0, 0, 0, 0, 1, 2, 0, 2, 1,  // m=2
    0, 1, 1, 0, 2, 0, 0, 0, 2,  // m=3
    0, 2, 2, 0, 0, 1, 0, 1, 0,  // m=4
};

constexpr int kTableD4[4 * 4 * 4] = {
    0, 0, 0, 0, 0, 0, 2, 2, 0, 2, 2, 0, 0, 2, 0, 2,  // m=2
    0, 0, 3, 1, 0, 0, 1, 3, 0, 2, 1, 1, 0, 2, 3, 3,  // m=3
    0, 1, 2, 1, 0, 3, 2, 3, 0, 1, 0, 3, 0, 3, 0, 1,  // m=4
    0, 1, 1, 2, 0, 3, 3, 2, 0, 1, 3, 0, 0, 3, 1, 0,  // m=5
};

constexpr int kTableD5[5 * 5 * 5] = {
    0, 0, 0, 0, 0, 0, 1, 2, 3, 4, 0, 2, 4, 1, 3, 0, 3, 1, 4, 2, 0, 4, 3, 2, 1,  // m=2
    0, 1, 4, 4, 1, 0, 2, 1, 2, 0, 0, 3, 3, 0, 4, 0, 4, 0, 3, 3, 0, 0, 2, 1, 2,  // m=3
    0, 2, 3, 3, 2, 0, 3, 0, 1, 1, 0, 4, 2, 4, 0, 0, 0, 4, 2, 4, 0, 1, 1, 0, 3,  // m=4
    0, 3, 2, 2, 3, 0, 4, 4, 0, 2, 0, 0, 1, 3, 1, 0, 1, 3, 1, 0, 0, 2, 0, 4, 4,  // m=5
    0, 4, 1, 1, 4, 0, 0, 3, 4, 3, 0, 1, 0, 2, 2, 0, 2, 2, 0, 1, 0, 3, 4, 3, 0,  // m=6
};

PhaseTable phase_table(int d) {
  switch (d) {
    case 2:
      return {4, kTableD2};
    case 3:
      return {3, kTableD3};
    case 4:
      return {4, kTableD4};
    case 5:
      return {5, kTableD5};
    default:
      throw std::invalid_argument("mub: unsupported dimension " + std::to_string(d) +
                                  " (supported: 2..5)");
  }
}

}  // namespace

const MubVector& MubSet::vector(int m, int i) const {
  if (m < 1 || m > dim + 1 || i < 1 || i > dim) {
    throw std::invalid_argument("MubSet::vector: indices out of range");
  }
  return bases[m - 1][i - 1];
}

std::vector<int> oam_labels(int d) {
  switch (d) {
    case 2:
      return {-2, 2};
    case 3:
      return {-1, 0, 1};
    case 4:
      return {-2, -1, 1, 2};
    case 5:
      return {-2, -1, 0, 1, 2};
    default:
      throw std::invalid_argument("oam_labels: unsupported dimension " + std::to_string(d) +
                                  " (supported: 2..5)");
  }
}

MubSet build_mub_set(int d) {
  const PhaseTable table = phase_table(d);
  MubSet set;
  set.dim = d;
  set.oam_labels = oam_labels(d);
  set.bases.resize(d + 1);

  for (int i = 1; i <= d; ++i) {
    MubVector v;
    v.dim = d;
    v.basis_index = 1;
    v.state_index = i;
    v.amplitudes = Vec::Zero(d);
    v.amplitudes(i - 1) = 1.0;
    set.bases[0].push_back(std::move(v));
  }

  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (int m = 2; m <= d + 1; ++m) {
    for (int i = 1; i <= d; ++i) {
      MubVector v;
      v.dim = d;
      v.basis_index = m;
      v.state_index = i;
      v.amplitudes = Vec(d);
      const int* row = table.exponents + ((m - 2) * d + (i - 1)) * d;
      for (int l = 0; l < d; ++l) {
        v.amplitudes(l) = std::polar(scale, 2.0 * kPi * row[l] / table.unit);
      }
      set.bases[m - 1].push_back(std::move(v));
    }
  }
  return set;
}

UnbiasednessReport verify_unbiasedness(const MubSet& set, double tol) {
  UnbiasednessReport report;
  report.pass = true;
  const int d = set.dim;
  for (int m = 1; m <= d + 1; ++m) {
    for (int i = 1; i <= d; ++i) {
      const Vec& a = set.vector(m, i).amplitudes;
      for (int n = m; n <= d + 1; ++n) {
        for (int j = (n == m ? i : 1); j <= d; ++j) {
          const Vec& b = set.vector(n, j).amplitudes;
          const double overlap = std::norm(a.dot(b));
          const double target = (m == n) ? (i == j ? 1.0 : 0.0) : 1.0 / d;
          const double dev = std::fabs(overlap - target);
          report.max_deviation = std::max(report.max_deviation, dev);
          if (dev > tol) report.pass = false;
          ++report.pair_count;
        }
      }
    }
  }
  return report;
}

void save_mub_set(const MubSet& set, std::ostream& out) {
  out << "mubset\n";
  out << "dim " << set.dim << "\n";
  out << "oam_labels";
  for (int l : set.oam_labels) out << ' ' << l;
  out << "\n";
  for (const auto& basis : set.bases) {
    for (const auto& v : basis) {
      out << "vector " << v.basis_index << ' ' << v.state_index;
      for (int l = 0; l < v.dim; ++l) {
        out << ' ' << fmt_double(v.amplitudes(l).real()) << ' '
            << fmt_double(v.amplitudes(l).imag());
      }
      out << "\n";
    }
  }
}

MubSet load_mub_set(std::istream& in) {
  std::string tag;
  in >> tag;
  if (tag != "mubset") throw IoError("mub file: bad magic '" + tag + "'");
  MubSet set;
  in >> tag >> set.dim;
  if (tag != "dim" || set.dim < 2) throw IoError("mub file: missing dim");
  const int d = set.dim;
  in >> tag;
  if (tag != "oam_labels") throw IoError("mub file: missing oam_labels");
  set.oam_labels.resize(d);
  for (int& l : set.oam_labels) in >> l;
  set.bases.assign(d + 1, {});
  for (int k = 0; k < (d + 1) * d; ++k) {
    MubVector v;
    v.dim = d;
    in >> tag >> v.basis_index >> v.state_index;
    if (tag != "vector" || !in) throw IoError("mub file: truncated vector list");
    if (v.basis_index < 1 || v.basis_index > d + 1 || v.state_index < 1 || v.state_index > d) {
      throw IoError("mub file: vector indices out of range");
    }
    v.amplitudes = Vec(d);
    for (int l = 0; l < d; ++l) {
      double re = 0.0, im = 0.0;
      in >> re >> im;
      v.amplitudes(l) = Cx(re, im);
    }
    if (!in) throw IoError("mub file: truncated amplitudes");
    set.bases[v.basis_index - 1].push_back(std::move(v));
  }
  for (const auto& basis : set.bases) {
    if (static_cast<int>(basis.size()) != d) throw IoError("mub file: basis size mismatch");
  }
  return set;
}

void save_mub_set_file(const MubSet& set, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  save_mub_set(set, out);
  if (!out) throw IoError("write failed: " + path);
}

MubSet load_mub_set_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  return load_mub_set(in);
}

}  // namespace mubtomo

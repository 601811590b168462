#include "lathop/lattice.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>

#include "lathop/csv.hpp"
#include "lathop/kernels.hpp"

namespace lathop {

int Offset::norm_sup() const {
  return std::max({std::abs(delta[0]), std::abs(delta[1]), std::abs(delta[2])});
}

bool Offset::is_canonical() const {
  for (int d : delta) {
    if (d != 0) return d > 0;
  }
  return false;
}

Lattice::Lattice(int dim, std::array<int, kMaxDim> extents, double spacing)
    : dim_(dim), extents_(extents), spacing_(spacing) {
  if (dim < 1 || dim > kMaxDim) throw InputError("lattice dimension must be 1, 2 or 3");
  if (!(spacing > 0.0) || !std::isfinite(spacing))
    throw InputError("lattice spacing must be positive and finite");
  volume_ = 1;
  cell_measure_ = 1.0;
  for (int i = 0; i < kMaxDim; ++i) {
    if (i >= dim) {
      extents_[i] = 1;
      continue;
    }
    if (extents_[i] < 2) throw InputError("every lattice extent must be >= 2");
    volume_ *= static_cast<std::size_t>(extents_[i]);
    cell_measure_ *= spacing;
  }
}

Lattice::Lattice(int dim, int extent, double spacing)
    : Lattice(dim, {extent, extent, extent}, spacing) {}

int Lattice::min_extent() const {
  int m = extents_[0];
  for (int i = 1; i < dim_; ++i) m = std::min(m, extents_[i]);
  return m;
}

std::size_t Lattice::index(const Site& s) const {
  std::size_t idx = 0;
  for (int i = 0; i < kMaxDim; ++i)
    idx = idx * static_cast<std::size_t>(extents_[i]) + static_cast<std::size_t>(s[i]);
  return idx;
}

Site Lattice::site(std::size_t index) const {
  Site s;
  for (int i = kMaxDim - 1; i >= 0; --i) {
    const auto l = static_cast<std::size_t>(extents_[i]);
    s.coords[i] = static_cast<int>(index % l);
    index /= l;
  }
  return s;
}

bool Lattice::contains(const Site& s) const {
  for (int i = 0; i < kMaxDim; ++i)
    if (s[i] < 0 || s[i] >= extents_[i]) return false;
  return true;
}

Site Lattice::wrap(const Site& s, const Offset& o) const {
  Site out;
  for (int i = 0; i < kMaxDim; ++i) {
    const int l = extents_[i];
    int c = (s[i] + o[i]) % l;
    if (c < 0) c += l;
    out.coords[i] = c;
  }
  return out;
}

std::size_t Lattice::neighbor(std::size_t index, const Offset& o) const {
  return this->index(wrap(site(index), o));
}

WaveField::WaveField(const Lattice& lattice)
    : lattice_(lattice), amp_(lattice.volume()) {}

WaveField::WaveField(const Lattice& lattice, std::vector<cplx> amplitudes)
    : lattice_(lattice), amp_(std::move(amplitudes)) {
  if (amp_.size() != lattice_.volume())
    throw InputError("wave field length does not match lattice volume");
}

double WaveField::norm() const {
  return std::sqrt(lattice_.cell_measure() * kernels::norm_sq(amp_));
}

void WaveField::normalize() {
  const double n = norm();
  if (!(n > 0.0)) throw InputError("cannot normalize a zero wave field");
  for (auto& v : amp_) v /= n;
}

cplx inner_product(const WaveField& phi, const WaveField& psi) {
  if (!(phi.lattice() == psi.lattice()))
    throw InputError("inner product of wave fields on different lattices");
  return phi.lattice().cell_measure() * kernels::dot(phi.data(), psi.data());
}

WaveField delta_field(const Lattice& lat, const Site& s) {
  WaveField f(lat);
  f[lat.index(s)] = 1.0;
  return f;
}

double mode_wavenumber(int mode, const Lattice& lat, int axis) {
  return 2.0 * std::numbers::pi * mode / (lat.extent(axis) * lat.spacing());
}

WaveField plane_wave(std::array<int, kMaxDim> mode, const Lattice& lat) {
  std::array<double, kMaxDim> k{};
  for (int i = 0; i < lat.dim(); ++i) {
    if (mode[i] < 0 || mode[i] >= lat.extent(i))
      throw InputError("plane-wave mode out of range");
    k[i] = mode_wavenumber(mode[i], lat, i);
  }
  const double amp = 1.0 / std::sqrt(static_cast<double>(lat.volume()) * lat.cell_measure());
  WaveField f(lat);
  for (std::size_t idx = 0; idx < lat.volume(); ++idx) {
    const Site s = lat.site(idx);
    double phase = 0.0;
    for (int i = 0; i < lat.dim(); ++i) phase += k[i] * lat.position(s, i);
    f[idx] = amp * std::polar(1.0, phase);
  }
  return f;
}

WaveField gaussian_packet(std::span<const double> center, std::span<const double> k0,
                          double sigma, const Lattice& lat) {
  const int d = lat.dim();
  if (static_cast<int>(center.size()) != d || static_cast<int>(k0.size()) != d)
    throw InputError("gaussian packet center/k0 must have one entry per axis");
  if (sigma < 2.0 * lat.spacing())
    throw InputError("gaussian packet width below two lattice spacings");
  // envelope at the seam (x = 0 == L a) must be negligible
  for (int i = 0; i < d; ++i) {
    const double dist = std::min(center[i], lat.box_length(i) - center[i]);
    if (dist <= 0.0 || std::exp(-dist * dist / (4.0 * sigma * sigma)) > 1e-10)
      throw InputError("gaussian packet is truncated by the periodic boundary");
  }
  WaveField f(lat);
  for (std::size_t idx = 0; idx < lat.volume(); ++idx) {
    const Site s = lat.site(idx);
    double r2 = 0.0;
    double phase = 0.0;
    for (int i = 0; i < d; ++i) {
      const double x = lat.position(s, i);
      r2 += (x - center[i]) * (x - center[i]);
      phase += k0[i] * x;
    }
    f[idx] = std::exp(-r2 / (4.0 * sigma * sigma)) * std::polar(1.0, phase);
  }
  f.normalize();
  return f;
}

double mean_position(const WaveField& psi, int axis) {
  const Lattice& lat = psi.lattice();
  double s = 0.0;
  for (std::size_t idx = 0; idx < lat.volume(); ++idx)
    s += lat.position(lat.site(idx), axis) * std::norm(psi[idx]);
  return s * lat.cell_measure();
}

double position_variance(const WaveField& psi) {
  const Lattice& lat = psi.lattice();
  double var = 0.0;
  for (int ax = 0; ax < lat.dim(); ++ax) {
    const double mu = mean_position(psi, ax);
    double s = 0.0;
    for (std::size_t idx = 0; idx < lat.volume(); ++idx) {
      const double dx = lat.position(lat.site(idx), ax) - mu;
      s += dx * dx * std::norm(psi[idx]);
    }
    var += s * lat.cell_measure();
  }
  return var;
}

std::string wave_field_to_csv(const WaveField& psi) {
  const Lattice& lat = psi.lattice();
  std::ostringstream os;
  os << "site_index";
  for (int i = 0; i < lat.dim(); ++i) os << ",coord_" << i;
  os << ",re,im\n";
  for (std::size_t idx = 0; idx < lat.volume(); ++idx) {
    const Site s = lat.site(idx);
    os << idx;
    for (int i = 0; i < lat.dim(); ++i) os << ',' << s[i];
    os << ',' << csv::format_double(psi[idx].real()) << ','
       << csv::format_double(psi[idx].imag()) << '\n';
  }
  return os.str();
}

WaveField wave_field_from_csv(const std::string& text, const Lattice& lat) {
  const csv::Table table = csv::parse(text);
  const std::size_t ncol = static_cast<std::size_t>(lat.dim()) + 3;
  if (table.header.size() != ncol || table.header.front() != "site_index" ||
      table.header[ncol - 2] != "re" || table.header[ncol - 1] != "im")
    throw InputError("wave field CSV header does not match lattice dimension");
  if (table.rows.size() != lat.volume())
    throw InputError("wave field CSV row count does not match lattice volume");
  WaveField f(lat);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (static_cast<std::size_t>(row[0]) != r)
      throw InputError("wave field CSV rows must follow site ordering");
    f[r] = {row[ncol - 2], row[ncol - 1]};
  }
  return f;
}

}  // namespace lathop

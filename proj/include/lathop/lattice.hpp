#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lathop {

using cplx = std::complex<double>;

inline constexpr int kMaxDim = 3;

/// Raised for malformed input: bad geometry, mismatched lattices, parse errors.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integer displacement between sites. Unused trailing axes are zero.
struct Offset {
  std::array<int, kMaxDim> delta{0, 0, 0};

  Offset() = default;
  constexpr explicit Offset(std::array<int, kMaxDim> d) : delta(d) {}
  static Offset axis(int ax, int step = 1) {
    Offset o;
    o.delta[ax] = step;
    return o;
  }

  int operator[](int i) const { return delta[i]; }
  Offset operator-() const { return Offset({-delta[0], -delta[1], -delta[2]}); }
  bool is_zero() const { return delta[0] == 0 && delta[1] == 0 && delta[2] == 0; }
  int norm_sup() const;
  // first nonzero component positive
  bool is_canonical() const;

  auto operator<=>(const Offset&) const = default;
};

/// Canonical site coordinates, componentwise in [0, L_i).
struct Site {
  std::array<int, kMaxDim> coords{0, 0, 0};

  Site() = default;
  constexpr explicit Site(std::array<int, kMaxDim> c) : coords(c) {}
  int operator[](int i) const { return coords[i]; }
  auto operator<=>(const Site&) const = default;
};

/// Periodic simple-cubic lattice of spacing a. Sites are ordered row-major
/// (last axis fastest).
class Lattice {
 public:
  Lattice(int dim, std::array<int, kMaxDim> extents, double spacing);
  Lattice(int dim, int extent, double spacing);

  int dim() const { return dim_; }
  int extent(int axis) const { return extents_[axis]; }
  const std::array<int, kMaxDim>& extents() const { return extents_; }
  double spacing() const { return spacing_; }
  std::size_t volume() const { return volume_; }
  // a^d
  double cell_measure() const { return cell_measure_; }
  int min_extent() const;

  std::size_t index(const Site& s) const;
  Site site(std::size_t index) const;
  bool contains(const Site& s) const;
  Site wrap(const Site& s, const Offset& o) const;
  std::size_t neighbor(std::size_t index, const Offset& o) const;
  // physical coordinate x_i = a * coord_i
  double position(const Site& s, int axis) const { return spacing_ * s[axis]; }
  double box_length(int axis) const { return spacing_ * extents_[axis]; }

  bool operator==(const Lattice& other) const = default;

 private:
  int dim_;
  std::array<int, kMaxDim> extents_;
  double spacing_;
  std::size_t volume_;
  double cell_measure_;
};

/// Complex amplitudes on every site of a lattice.
class WaveField {
 public:
  explicit WaveField(const Lattice& lattice);
  WaveField(const Lattice& lattice, std::vector<cplx> amplitudes);

  const Lattice& lattice() const { return lattice_; }
  std::size_t size() const { return amp_.size(); }
  cplx& operator[](std::size_t i) { return amp_[i]; }
  const cplx& operator[](std::size_t i) const { return amp_[i]; }
  std::span<cplx> data() { return amp_; }
  std::span<const cplx> data() const { return amp_; }
  const std::vector<cplx>& amplitudes() const { return amp_; }

  double norm() const;
  void normalize();

 private:
  Lattice lattice_;
  std::vector<cplx> amp_;
};

/// a^d * sum_x conj(phi) psi.
cplx inner_product(const WaveField& phi, const WaveField& psi);

WaveField delta_field(const Lattice& lat, const Site& s);

/// Unit-norm plane wave with k_i = 2 pi mode_i / (L_i a).
WaveField plane_wave(std::array<int, kMaxDim> mode, const Lattice& lat);

/// Lattice wave number of a plane-wave mode along one axis.
double mode_wavenumber(int mode, const Lattice& lat, int axis);

/// Normalized exp(-(x-c)^2/(4 sigma^2) + i k0.x). Requires sigma >= 2a and
/// tails below 1e-10 at the periodic seam.
WaveField gaussian_packet(std::span<const double> center,
                          std::span<const double> k0, double sigma,
                          const Lattice& lat);

/// <x_axis> = a^d sum x |psi|^2 (no seam unwrapping).
double mean_position(const WaveField& psi, int axis);
/// Sum over axes of the positional variance.
double position_variance(const WaveField& psi);

/// CSV: site_index,coord_0..coord_{d-1},re,im
std::string wave_field_to_csv(const WaveField& psi);
WaveField wave_field_from_csv(const std::string& text, const Lattice& lat);

}  // namespace lathop

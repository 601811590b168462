#include "lathop/potentials.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "lathop/csv.hpp"
#include "lathop/generator.hpp"

namespace lathop {

namespace {

// Tolerances in this module scale with the largest rate, which grows as 1/a^2.
double kernel_scale(const HomogeneousKernel& k) {
  double s = 1.0;
  for (const auto& [n, v] : k.amplitudes()) s = std::max(s, std::abs(v));
  return s;
}

void require_conservation(const HoppingModel& mdl) {
  const double scale = kernel_scale(mdl.kernel());
  const double v = validate_unitarity(mdl);
  if (v > kStructuralTol * scale) {
    std::ostringstream os;
    os << "model violates probability conservation (max violation " << v << ")";
    throw InputError(os.str());
  }
}

std::vector<double> w_sum(const HoppingModel& mdl, double* max_imag) {
  const Lattice& lat = mdl.lattice();
  const double a = lat.spacing();
  const cplx i{0.0, 1.0};
  std::vector<double> w(lat.volume());
  double worst = 0.0;
  for (std::size_t x = 0; x < lat.volume(); ++x) {
    cplx acc = i * mdl.onsite_at(x);
    for (const auto& n : mdl.kernel().hopping_offsets()) {
      const double im_z = mdl.zfield().get(x, -n).imag();
      acc += 0.5 * i * mdl.kernel().at(n) * (1.0 + std::exp(-2.0 * a * im_z));
    }
    worst = std::max(worst, std::abs(acc.imag()));
    w[x] = acc.real();
  }
  if (max_imag) *max_imag = worst;
  return w;
}

}  // namespace

double ScalarField::max_abs_diff(const ScalarField& other) const {
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    d = std::max(d, std::abs(values[i] - other.values[i]));
  return d;
}

double VectorPotentialField::max_abs_diff(const VectorPotentialField& other) const {
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    for (int ax = 0; ax < kMaxDim; ++ax)
      d = std::max(d, std::abs(values[i][ax] - other.values[i][ax]));
  return d;
}

ScalarField extract_W(const HoppingModel& mdl) {
  require_conservation(mdl);
  double residue = 0.0;
  auto w = w_sum(mdl, &residue);
  if (residue > 1e-13 * kernel_scale(mdl.kernel()))
    throw InputError("W(x) has a non-negligible imaginary part");
  return {mdl.lattice(), std::move(w)};
}

VectorPotentialField extract_A(const HoppingModel& mdl) {
  const Lattice& lat = mdl.lattice();
  const double a = lat.spacing();
  const double m = mass_of_kernel(mdl.kernel());
  const cplx pref{0.0, m * a * a};
  VectorPotentialField out{lat, std::vector<std::array<double, kMaxDim>>(lat.volume())};
  if (mdl.zfield().empty()) return out;
  for (std::size_t x = 0; x < lat.volume(); ++x) {
    std::array<cplx, kMaxDim> acc{};
    for (const auto& n : mdl.kernel().hopping_offsets()) {
      const double re_z = mdl.zfield().get(x, n).real();
      if (re_z == 0.0) continue;
      const cplx k = mdl.kernel().at(n);
      for (int ax = 0; ax < lat.dim(); ++ax) acc[ax] += k * static_cast<double>(n[ax]) * re_z;
    }
    for (int ax = 0; ax < lat.dim(); ++ax) out.values[x][ax] = (pref * acc[ax]).real();
  }
  return out;
}

ScalarField extract_U(const HoppingModel& mdl, std::vector<std::string>* warnings) {
  const Lattice& lat = mdl.lattice();
  const double a = lat.spacing();
  const double m = mass_of_kernel(mdl.kernel());
  ScalarField u = extract_W(mdl);
  const VectorPotentialField av = extract_A(mdl);
  const auto& z = mdl.zfield();
  const cplx i{0.0, 1.0};

  for (const auto& n : mdl.kernel().hopping_offsets()) {
    const cplx coef = -0.5 * i * a * a * mdl.kernel().at(n);
    std::vector<double> im_z(lat.volume());
    bool any = false;
    for (std::size_t x = 0; x < lat.volume(); ++x) {
      im_z[x] = z.get(x, n).imag();
      any = any || im_z[x] != 0.0;
    }
    if (warnings && any && variation_wavelength(lat, im_z) < 4.0 * a) {
      std::ostringstream os;
      os << "Im Z on offset (";
      for (int ax = 0; ax < lat.dim(); ++ax) os << (ax ? "," : "") << n[ax];
      os << ") varies on scales below 4a; gradient term unresolved";
      warnings->push_back(os.str());
    }
    for (std::size_t x = 0; x < lat.volume(); ++x) {
      double directional = 0.0;
      if (any) {
        for (int ax = 0; ax < lat.dim(); ++ax) {
          if (n[ax] == 0) continue;
          const double fwd = im_z[lat.neighbor(x, Offset::axis(ax, 1))];
          const double bwd = im_z[lat.neighbor(x, Offset::axis(ax, -1))];
          directional += n[ax] * (fwd - bwd) / (2.0 * a);
        }
      }
      const double z2 = std::norm(z.get(x, n));
      u.values[x] += (coef * (directional + z2)).real();
    }
  }
  for (std::size_t x = 0; x < lat.volume(); ++x) {
    double a2 = 0.0;
    for (int ax = 0; ax < lat.dim(); ++ax) a2 += av.values[x][ax] * av.values[x][ax];
    u.values[x] -= a2 / (2.0 * m);
  }
  return u;
}

Decomposition decompose_generator(const HoppingModel& mdl) {
  const Lattice& lat = mdl.lattice();
  if (lat.volume() > kDenseLimit) throw InputError("decomposition check limited to V <= 4096");
  const auto v = static_cast<Eigen::Index>(lat.volume());
  const double a = lat.spacing();
  const cplx i{0.0, 1.0};
  using Sparse = Eigen::SparseMatrix<cplx>;

  Sparse kinetic(v, v);
  for (const auto& n : mdl.kernel().hopping_offsets()) {
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(2 * lat.volume());
    for (std::size_t x = 0; x < lat.volume(); ++x) {
      const auto row = static_cast<Eigen::Index>(x);
      const auto col = static_cast<Eigen::Index>(lat.neighbor(x, n));
      trip.emplace_back(row, col, std::exp(i * a * mdl.zfield().get(x, n)) / a);
      trip.emplace_back(row, row, cplx{-1.0 / a});
    }
    Sparse d(v, v);
    d.setFromTriplets(trip.begin(), trip.end());
    const Sparse dd = Sparse(d.adjoint()) * d;
    kinetic += (-0.5 * i * a * a * mdl.kernel().at(n)) * dd;
  }

  double residue = 0.0;
  ScalarField w{lat, w_sum(mdl, &residue)};

  Decomposition out{Eigen::MatrixXcd(kinetic), std::move(w), 0.0};
  Eigen::MatrixXcd rebuilt = out.kinetic;
  for (Eigen::Index x = 0; x < v; ++x) rebuilt(x, x) += out.W.values[static_cast<std::size_t>(x)];
  const Eigen::MatrixXcd h = build_generator(mdl).dense();
  out.residual = (h - rebuilt).cwiseAbs().maxCoeff();
  return out;
}

double variation_wavelength(const Lattice& lat, const std::vector<double>& samples) {
  const double a = lat.spacing();
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(samples.size());
  double amp = 0.0;
  for (double s : samples) amp = std::max(amp, std::abs(s - mean));
  double curv = 0.0;
  for (std::size_t x = 0; x < lat.volume(); ++x)
    for (int ax = 0; ax < lat.dim(); ++ax) {
      const double f = samples[lat.neighbor(x, Offset::axis(ax, 1))];
      const double b = samples[lat.neighbor(x, Offset::axis(ax, -1))];
      curv = std::max(curv, std::abs(f - 2.0 * samples[x] + b) / (a * a));
    }
  // curvature at roundoff level counts as none
  if (curv * a * a <= 1e-12 * std::max(1.0, amp)) return std::numeric_limits<double>::infinity();
  return 2.0 * std::numbers::pi * std::sqrt(amp / curv);
}

std::string scalar_field_to_csv(const ScalarField& f) {
  const Lattice& lat = f.lattice;
  std::ostringstream os;
  os << "site_index";
  for (int i = 0; i < lat.dim(); ++i) os << ",coord_" << i;
  os << ",value\n";
  for (std::size_t x = 0; x < lat.volume(); ++x) {
    const Site s = lat.site(x);
    os << x;
    for (int i = 0; i < lat.dim(); ++i) os << ',' << s[i];
    os << ',' << csv::format_double(f.values[x]) << '\n';
  }
  return os.str();
}

std::string vector_field_to_csv(const VectorPotentialField& f) {
  const Lattice& lat = f.lattice;
  std::ostringstream os;
  os << "site_index";
  for (int i = 0; i < lat.dim(); ++i) os << ",coord_" << i;
  for (int i = 0; i < lat.dim(); ++i) os << ",value_" << i;
  os << '\n';
  for (std::size_t x = 0; x < lat.volume(); ++x) {
    const Site s = lat.site(x);
    os << x;
    for (int i = 0; i < lat.dim(); ++i) os << ',' << s[i];
    for (int i = 0; i < lat.dim(); ++i) os << ',' << csv::format_double(f.values[x][i]);
    os << '\n';
  }
  return os.str();
}

}  // namespace lathop

#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lathop/generator.hpp"
#include "lathop/hopping_model.hpp"

namespace lathop {

struct OrderFit {
  double order = 0.0;  // +inf when some error is exactly zero
  std::vector<double> pair_orders;
  std::vector<std::string> warnings;
  bool defined() const;
};

/// Mean of log(err_i / err_{i+1}) / log(a_i / a_{i+1}) over successive pairs
/// (log2 of the error ratio for halvings). Needs >= 3 strictly decreasing
/// spacings.
OrderFit fit_convergence_order(const std::vector<double>& errors,
                               const std::vector<double>& spacings);

/// Least-squares slope of log y against log x.
double fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys);

struct ConvergenceReport {
  std::string benchmark;
  nlohmann::json params = nlohmann::json::object();
  std::vector<double> spacings;
  std::vector<double> errors;
  OrderFit fit;
  bool monotone = true;
  nlohmann::json details = nlohmann::json::array();
  bool pass = false;

  double fitted_order() const { return fit.order; }
  /// Sets `pass` from the order window and monotonicity.
  void judge(double order_lo, double order_hi);
  nlohmann::json to_json() const;
};

/// Errors strictly decreasing, except the finest pair may rise by 5%.
bool errors_monotone(const std::vector<double>& errors);

enum class KernelOrder { nearest_neighbor = 2, fourth = 4 };

/// |E_lattice(k) - k^2/2m| per spacing.
ConvergenceReport dispersion_convergence(double mass, double k_phys,
                                         const std::vector<double>& spacings,
                                         KernelOrder order = KernelOrder::nearest_neighbor);

/// Closed-form free Gaussian on the line, initially
/// (2 pi sigma^2)^(-1/4) exp(-(x-c)^2/(4 sigma^2) + i k0 x).
cplx free_gaussian_exact(double x, double t, double mass, double sigma, double k0,
                         double center);

struct FreePacketParams {
  double mass = 1.0;
  double sigma = 1.0;
  double k0 = 0.5;
  double time = 2.0;
  double box = 32.0;        // physical box length
  double dt_factor = 0.1;   // dt = dt_factor * m * a^2
};

/// L2 distance after evolving a lattice Gaussian with Crank-Nicolson on the
/// free nearest-neighbour model, against free_gaussian_exact at the final time.
ConvergenceReport free_packet_benchmark(const FreePacketParams& p,
                                        const std::vector<double>& spacings);

struct HarmonicParams {
  double mass = 1.0;
  double omega = 1.0;
  double box_lengths = 16.0;  // box size in oscillator lengths
};

/// |E0 - omega/2| for the free model plus synthesized 1/2 m omega^2 (x - x_c)^2.
/// Details carry the E1 - E0 gap per spacing.
ConvergenceReport harmonic_benchmark(const HarmonicParams& p, const std::vector<double>& spacings);

struct GaugeShiftReport {
  double a0 = 0.0;
  double c_a = 0.0;                   // mean U completion constant
  double formula_deviation = 0.0;     // vs {(1 - cos a(k - A0))/(m a^2) + c_A}
  double free_multiset_deviation = 0.0;  // sorted spectra, gauge vs free
  double parabola_deviation = 0.0;    // vs (k - A0)^2/2m + c_A for |k - A0| <= 2 dk
  int argmin_mode = 0;
  int nearest_mode = 0;
  double min_energy = 0.0;
  double ground_energy = 0.0;
};

/// Constant A0 along axis 0 on a nearest-neighbour model.
GaugeShiftReport constant_gauge_test(double mass, double a0, const Lattice& lat);

struct ImaginaryZReport {
  double s = 0.0;
  double deviation = 0.0;  // max over the lowest `levels` eigenvalues
  double hermiticity_defect = 0.0;
  double min_modulus = 0.0;  // min |exp(i a Z)| over links
  double max_modulus = 0.0;
  double u_pred_mean = 0.0;
};

/// Uniform Im Z = s on every canonical link, completed. Compares the spectrum
/// with free + diag(extract_U) on the lowest `levels` eigenvalues.
ImaginaryZReport imaginary_z_test(double mass, double s, const Lattice& lat,
                                  std::size_t levels = 9);

ConvergenceReport imaginary_z_convergence(double mass, double s, double box,
                                          const std::vector<double>& spacings,
                                          std::size_t levels = 9);

/// max |extract_A - A| after synthesize_gauge of A(x) = amp sin(2 pi x / box)
/// in 1D.
ConvergenceReport vector_roundtrip_convergence(double mass, double amp, double box,
                                               const std::vector<double>& spacings);

struct EulerDriftReport {
  std::vector<double> dts;
  std::vector<double> drifts;  // | |psi'| - |psi| | after one explicit step
  double exponent = 0.0;
};

EulerDriftReport euler_drift_scaling(const Generator& g, const WaveField& psi,
                                     const std::vector<double>& dts);

}  // namespace lathop

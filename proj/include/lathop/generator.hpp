#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lathop/hopping_model.hpp"
#include "lathop/kernels.hpp"
#include "lathop/lattice.hpp"

namespace lathop {

inline constexpr std::size_t kDenseLimit = 4096;

/// Iterative solver failed to reach its residual target.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Explicit stepper asked to run with dt * |H| above the stability bound.
class StabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// H with i dpsi/dt = H psi, H[x, x+n] = i kappa(x, n).
class Generator {
 public:
  Generator(Lattice lattice, kernels::CsrMatrix h);

  const Lattice& lattice() const { return lattice_; }
  std::size_t dimension() const { return h_.rows; }
  std::size_t nnz() const { return h_.nnz(); }
  // max |row - col| over stored entries
  std::size_t bandwidth() const { return bandwidth_; }
  const kernels::CsrMatrix& matrix() const { return h_; }
  cplx entry(std::size_t row, std::size_t col) const { return h_.at(row, col); }
  // max row sum of |H_xy|, an upper bound on the spectral radius
  double norm_estimate() const;

  WaveField apply(const WaveField& psi) const;
  // <psi|H|psi>
  double expectation(const WaveField& psi) const;
  Eigen::MatrixXcd dense() const;

 private:
  Lattice lattice_;
  kernels::CsrMatrix h_;
  std::size_t bandwidth_ = 0;
};

/// Requires kernel radius < min L_i / 2 so that n and -n never reach the
/// same neighbour.
Generator build_generator(const HoppingModel& mdl);

/// max |H - H^dagger| entrywise.
double hermiticity_defect(const Generator& g);

struct TimeGrid {
  double dt = 0.0;
  std::size_t steps = 0;
  std::size_t record_every = 1;
};

enum class Stepper { crank_nicolson, euler };

struct SolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

struct CrankNicolsonOptions {
  double tolerance = 1e-14;  // target relative residual
  double accept = 1e-12;     // worst acceptable relative residual
  int max_iterations = 1000;
};

/// Solves (I + i dt/2 H) psi' = (I - i dt/2 H) psi by Jacobi-preconditioned
/// BiCGSTAB. Throws SolverError if the residual stays above `accept`.
WaveField step_crank_nicolson(const WaveField& psi, const Generator& g, double dt,
                              const CrankNicolsonOptions& opts = {},
                              SolveStats* stats = nullptr);

/// psi' = psi - i dt H psi. No norm correction.
WaveField step_euler(const WaveField& psi, const Generator& g, double dt);

/// Throws StabilityError unless dt * norm_estimate() <= 0.5.
void check_explicit_stability(const Generator& g, double dt);

struct TrajectoryRow {
  std::size_t step = 0;
  double time = 0.0;
  double norm = 0.0;
  double energy = 0.0;
  std::vector<double> mean_x;
  double var_x = 0.0;
  cplx overlap;
};

struct Trajectory {
  int dim = 1;
  std::vector<TrajectoryRow> rows;
  WaveField final_state;

  std::string to_csv() const;
};

/// Evolves psi0 over the grid, recording observables at step 0, every
/// `record_every` steps, and at the last step. Overlap is taken against
/// `reference`, or against psi0 when none is given.
Trajectory evolve(const WaveField& psi0, const Generator& g, const TimeGrid& grid,
                  Stepper stepper, const std::optional<WaveField>& reference = std::nullopt);

struct EigenPair {
  double value;
  WaveField vector;  // unit norm under the lattice measure
};

/// Lowest `count` eigenpairs, ascending. Throws InputError above kDenseLimit.
std::vector<EigenPair> eigensolve_dense(const Generator& g, std::size_t count);

/// All eigenvalues, ascending.
std::vector<double> spectrum_dense(const Generator& g);

/// E(k) = i sum_n kappa(n) exp(i a k.n).
double dispersion_relation(const HomogeneousKernel& k, std::span<const double> kvec);

}  // namespace lathop

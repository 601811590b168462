#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lathop/hopping_model.hpp"

namespace lathop {

struct ScalarField {
  Lattice lattice;
  std::vector<double> values;

  double max_abs_diff(const ScalarField& other) const;
};

struct VectorPotentialField {
  Lattice lattice;
  std::vector<std::array<double, kMaxDim>> values;

  double max_abs_diff(const VectorPotentialField& other) const;
};

/// W(x) = 1/2 sum_n i kappa(n) (1 + exp(-2 a Im Z(x, -n))) + i kappa(x, 0).
/// Throws InputError if the model violates probability conservation or the
/// sum keeps an imaginary residue.
ScalarField extract_W(const HoppingModel& mdl);

/// A(x) = i m a^2 sum_n kappa(n) n Re Z(x, n).
VectorPotentialField extract_A(const HoppingModel& mdl);

/// U(x) = W - 1/2 sum_n i a^2 kappa(n) (n.grad Im Z(x, n) + |Z(x, n)|^2) - A^2/(2m),
/// with grad Im Z by second-order central differences per offset channel.
/// Channels whose Im Z varies on scales below 4a are reported in `warnings`.
ScalarField extract_U(const HoppingModel& mdl, std::vector<std::string>* warnings = nullptr);

struct Decomposition {
  Eigen::MatrixXcd kinetic;  // -1/2 sum_n i a^2 kappa(n) D_n^dagger D_n
  ScalarField W;
  double residual = 0.0;  // max |H - (K + diag W)|
};

/// Materializes the covariant-derivative form of the generator and compares
/// it entrywise with build_generator. Dense, V <= 4096. The conservation
/// precondition is not enforced here so that the residual can expose a
/// broken model.
Decomposition decompose_generator(const HoppingModel& mdl);

/// Estimated shortest wavelength 2 pi sqrt(max|f - mean| / max|f''|) of a
/// sampled field, f'' by second differences along each axis. Infinite for
/// fields without curvature.
double variation_wavelength(const Lattice& lat, const std::vector<double>& samples);

std::string scalar_field_to_csv(const ScalarField& f);
std::string vector_field_to_csv(const VectorPotentialField& f);

}  // namespace lathop

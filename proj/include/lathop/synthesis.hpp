#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "lathop/hopping_model.hpp"

namespace lathop {

using Point = std::array<double, kMaxDim>;
using ScalarFn = std::function<double(const Point&)>;
using VectorFn = std::function<std::array<double, kMaxDim>(const Point&)>;

/// Free model with renormalized on-site rate (E(0) = 0, U = 0).
/// order 2 uses the nearest-neighbour kernel, order 4 the range-2 stencil.
HoppingModel synthesize_free(double mass, const Lattice& lat, int order = 2);

/// Nearest-neighbour `free` model with Re Z(x, e_i) = -A_i(x + a e_i / 2) on
/// the canonical links, completed to all links, Im Z = 0. On-site data is kept.
/// Throws InputError for kernels that are not range-1 axis kernels.
HoppingModel synthesize_gauge(const HoppingModel& free, const VectorFn& a_target,
                              std::vector<std::string>* warnings = nullptr);

/// Shifts Im kappa(x, 0) so that extract_U equals the target; kernel and Z
/// are left untouched.
HoppingModel synthesize_scalar(const HoppingModel& mdl, const ScalarFn& u_target,
                               std::vector<std::string>* warnings = nullptr);

std::vector<double> sample_on_sites(const Lattice& lat, const ScalarFn& f);

}  // namespace lathop

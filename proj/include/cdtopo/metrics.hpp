#pragma once

#include "cdtopo/fem.hpp"

namespace cdtopo {

// Fraction of elements with delta < rho_e < 1 - delta.
double grayness_metric(const DensityField& rho, double delta = 0.05);

// Fraction of 2x2 element blocks laid out as solid/void over void/solid or
// the complement (solid meaning rho > 1/2). Zero when the mesh has no block.
double checkerboard_metric(const Mesh& mesh, const DensityField& rho);

}  // namespace cdtopo

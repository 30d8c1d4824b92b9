#pragma once

#include <string>

#include "cdtopo/fem.hpp"
#include "cdtopo/result.hpp"

namespace cdtopo {

// Plain PGM (P2), one pixel per element, round(255 (1 - rho)) so solid is
// black, top row of the domain first.
void write_density_image(const DensityField& rho, const Mesh& mesh, const std::string& path);

// iter,compliance,volume,grayness
void write_history_csv(const RunResult& result, const std::string& path);

// element,col,row,rho with full precision.
void write_density_csv(const DensityField& rho, const Mesh& mesh, const std::string& path);

// Shortest text that parses back to the same double.
std::string format_double(double value);

}  // namespace cdtopo

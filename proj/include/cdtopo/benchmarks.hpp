#pragma once

#include <string>

#include "cdtopo/fem.hpp"

namespace cdtopo {

// Half MBB beam: x fixed along the left (symmetry) edge, y fixed at the
// bottom-right corner, unit downward load at the top-left corner.
Problem problem_mbb(int nx, int ny, double volume_fraction);

// Cantilever clamped along the left edge with a unit downward load at the
// right edge node floor(ny / 2) rows above the bottom.
Problem problem_cantilever(int nx, int ny, double volume_fraction);

// Looks up "mbb" or "cantilever".
Problem make_problem(const std::string& name, int nx, int ny, double volume_fraction);

}  // namespace cdtopo

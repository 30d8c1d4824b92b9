#include "cdtopo/benchmarks.hpp"

#include <algorithm>

#include "cdtopo/error.hpp"

namespace cdtopo {

Problem problem_mbb(int nx, int ny, double volume_fraction) {
  Problem p{Mesh(nx, ny), Material{}, {}, {}, volume_fraction, "mbb"};
  for (int row = 0; row <= ny; ++row) p.fixed_dofs.push_back(2 * p.mesh.node_index(0, row));
  p.fixed_dofs.push_back(2 * p.mesh.node_index(nx, ny) + 1);
  std::sort(p.fixed_dofs.begin(), p.fixed_dofs.end());
  p.loads[2 * p.mesh.node_index(0, 0) + 1] = -1.0;
  p.validate();
  return p;
}

Problem problem_cantilever(int nx, int ny, double volume_fraction) {
  Problem p{Mesh(nx, ny), Material{}, {}, {}, volume_fraction, "cantilever"};
  for (int row = 0; row <= ny; ++row) {
    const int node = p.mesh.node_index(0, row);
    p.fixed_dofs.push_back(2 * node);
    p.fixed_dofs.push_back(2 * node + 1);
  }
  // Rows count downwards; floor(ny / 2) above the bottom is row ny - ny / 2.
  p.loads[2 * p.mesh.node_index(nx, ny - ny / 2) + 1] = -1.0;
  p.validate();
  return p;
}

Problem make_problem(const std::string& name, int nx, int ny, double volume_fraction) {
  if (name == "mbb") return problem_mbb(nx, ny, volume_fraction);
  if (name == "cantilever") return problem_cantilever(nx, ny, volume_fraction);
  throw InvalidArgument("unknown problem '" + name + "'");
}

}  // namespace cdtopo

#include "cdtopo/metrics.hpp"

#include "cdtopo/error.hpp"

namespace cdtopo {

double grayness_metric(const DensityField& rho, double delta) {
  if (rho.size() == 0) return 0.0;
  const auto r = rho.rho.array();
  const auto gray = (r > delta && r < 1.0 - delta).count();
  return static_cast<double>(gray) / static_cast<double>(rho.size());
}

double checkerboard_metric(const Mesh& mesh, const DensityField& rho) {
  if (rho.size() != mesh.num_elements()) throw InvalidArgument("density field does not match the mesh");
  const int blocks = (mesh.nx() - 1) * (mesh.ny() - 1);
  if (blocks == 0) return 0.0;
  auto solid = [&](int col, int row) { return rho.rho[mesh.element_index(col, row)] > 0.5; };
  int alternating = 0;
  for (int col = 0; col + 1 < mesh.nx(); ++col) {
    for (int row = 0; row + 1 < mesh.ny(); ++row) {
      const bool tl = solid(col, row);
      const bool tr = solid(col + 1, row);
      const bool bl = solid(col, row + 1);
      const bool br = solid(col + 1, row + 1);
      if (tl == br && tr == bl && tl != tr) ++alternating;
    }
  }
  return static_cast<double>(alternating) / blocks;
}

}  // namespace cdtopo

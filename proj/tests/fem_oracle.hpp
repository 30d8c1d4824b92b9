#pragma once

// Reference computations written independently of the library.

#include <Eigen/Dense>
#include <cmath>

#include "cdtopo/fem.hpp"

namespace oracle {

// Q4 plane-stress stiffness of the unit square with E = 1 by 2x2 Gauss
// quadrature (exact for a bilinear element on a rectangle). Nodes run
// counter-clockwise from (0,0), y pointing up; DOFs interleaved x, y.
inline Eigen::Matrix<double, 8, 8> q4_stiffness_gauss(double nu) {
  Eigen::Matrix3d D;
  D << 1, nu, 0, nu, 1, 0, 0, 0, (1 - nu) / 2;
  D /= 1 - nu * nu;
  const double xn[4] = {0, 1, 1, 0};
  const double yn[4] = {0, 0, 1, 1};
  const double g[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
  Eigen::Matrix<double, 8, 8> K = Eigen::Matrix<double, 8, 8>::Zero();
  for (double x : g) {
    for (double y : g) {
      Eigen::Matrix<double, 3, 8> B = Eigen::Matrix<double, 3, 8>::Zero();
      for (int i = 0; i < 4; ++i) {
        // N_i = (1 - |x - xn|)(1 - |y - yn|) on the unit square.
        const double sx = xn[i] > 0 ? 1.0 : -1.0;
        const double sy = yn[i] > 0 ? 1.0 : -1.0;
        const double dNdx = sx * (1 - std::abs(y - yn[i]));
        const double dNdy = sy * (1 - std::abs(x - xn[i]));
        B(0, 2 * i) = dNdx;
        B(1, 2 * i + 1) = dNdy;
        B(2, 2 * i) = dNdy;
        B(2, 2 * i + 1) = dNdx;
      }
      K += 0.25 * B.transpose() * D * B;
    }
  }
  return K;
}

// Dense solve of K u = f on the free DOFs of a problem, scattering a single
// element matrix when given an 8x8 one.
inline Eigen::VectorXd dense_solve(const Eigen::MatrixXd& K_full, const cdtopo::Problem& p) {
  const int m = p.mesh.num_dofs();
  Eigen::MatrixXd K = K_full;
  if (K.rows() == 8 && m != 8) throw std::logic_error("element matrix on a multi-element mesh");
  if (K.rows() == 8) {
    Eigen::MatrixXd scattered = Eigen::MatrixXd::Zero(m, m);
    const auto dofs = p.mesh.element_dofs(0);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) scattered(dofs[i], dofs[j]) = K(i, j);
    K = scattered;
  }
  std::vector<int> free;
  for (int d = 0; d < m; ++d)
    if (std::find(p.fixed_dofs.begin(), p.fixed_dofs.end(), d) == p.fixed_dofs.end()) free.push_back(d);
  const int nf = static_cast<int>(free.size());
  Eigen::MatrixXd Kff(nf, nf);
  Eigen::VectorXd ff(nf);
  for (int i = 0; i < nf; ++i) {
    ff[i] = 0;
    for (const auto& [dof, value] : p.loads)
      if (dof == free[i]) ff[i] += value;
    for (int j = 0; j < nf; ++j) Kff(i, j) = K(free[i], free[j]);
  }
  const Eigen::VectorXd uf = Kff.fullPivLu().solve(ff);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(m);
  for (int i = 0; i < nf; ++i) u[free[i]] = uf[i];
  return u;
}

}  // namespace oracle

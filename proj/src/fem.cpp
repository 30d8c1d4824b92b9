#include "cdtopo/fem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cdtopo/error.hpp"

namespace cdtopo {

namespace {

constexpr double kResidualTolerance = 1e-8;
// Normwise backward error at which a solve is as accurate as double allows.
constexpr double kBackwardTolerance = 1e-12;
constexpr int kMaxRefinementSteps = 4;

double inf_norm(const SparseMatrix& K) {
  Vector row_sums = Vector::Zero(K.rows());
  for (int col = 0; col < K.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(K, col); it; ++it) row_sums[it.row()] += std::abs(it.value());
  }
  return row_sums.maxCoeff();
}

}  // namespace

Mesh::Mesh(int nx, int ny, double element_size) : nx_(nx), ny_(ny), element_size_(element_size) {
  if (nx < 1 || ny < 1) {
    std::ostringstream msg;
    msg << "mesh needs at least one element per axis, got " << nx << "x" << ny;
    throw InvalidArgument(msg.str());
  }
  if (!(element_size > 0.0) || !std::isfinite(element_size)) {
    throw InvalidArgument("element size must be positive");
  }
}

std::array<int, 4> Mesh::element_nodes(int e) const {
  const auto [col, row] = element_position(e);
  return {node_index(col, row + 1), node_index(col + 1, row + 1), node_index(col + 1, row),
          node_index(col, row)};
}

std::array<int, 8> Mesh::element_dofs(int e) const {
  const auto nodes = element_nodes(e);
  std::array<int, 8> dofs{};
  for (int i = 0; i < 4; ++i) {
    dofs[2 * i] = 2 * nodes[i];
    dofs[2 * i + 1] = 2 * nodes[i] + 1;
  }
  return dofs;
}

Vector Mesh::element_volumes() const {
  return Vector::Constant(num_elements(), element_volume(0));
}

void Material::validate() const {
  if (!(E_min > 0.0) || !(E > E_min)) {
    throw InvalidArgument("material requires E > E_min > 0");
  }
  if (!(nu >= 0.0 && nu < 0.5)) {
    throw InvalidArgument("Poisson's ratio must lie in [0, 0.5)");
  }
}

void Problem::validate() const {
  material.validate();
  if (fixed_dofs.empty()) throw InvalidArgument("problem has no fixed DOFs");
  if (loads.empty()) throw InvalidArgument("problem has no loads");
  const int m = mesh.num_dofs();
  for (std::size_t i = 0; i < fixed_dofs.size(); ++i) {
    if (fixed_dofs[i] < 0 || fixed_dofs[i] >= m) throw InvalidArgument("fixed DOF out of range");
    if (i > 0 && fixed_dofs[i] <= fixed_dofs[i - 1]) {
      throw InvalidArgument("fixed DOFs must be sorted and unique");
    }
  }
  for (const auto& [dof, value] : loads) {
    if (dof < 0 || dof >= m) throw InvalidArgument("loaded DOF out of range");
    if (!std::isfinite(value)) throw InvalidArgument("load value is not finite");
    if (std::binary_search(fixed_dofs.begin(), fixed_dofs.end(), dof)) {
      throw InvalidArgument("a loaded DOF is also fixed");
    }
  }
  // A fraction of exactly 1 is allowed: the budget then never binds.
  if (!(volume_fraction > 0.0 && volume_fraction <= 1.0)) {
    throw InvalidArgument("volume fraction must lie in (0, 1]");
  }
}

Vector Problem::load_vector() const {
  Vector f = Vector::Zero(mesh.num_dofs());
  for (const auto& [dof, value] : loads) f[dof] += value;
  return f;
}

std::vector<int> Problem::free_dofs() const {
  std::vector<int> free;
  free.reserve(mesh.num_dofs() - fixed_dofs.size());
  std::size_t k = 0;
  for (int d = 0; d < mesh.num_dofs(); ++d) {
    if (k < fixed_dofs.size() && fixed_dofs[k] == d) {
      ++k;
      continue;
    }
    free.push_back(d);
  }
  return free;
}

ElementMatrix element_stiffness(const Material& material) {
  const double nu = material.nu;
  const double k[8] = {0.5 - nu / 6.0,          0.125 + nu / 8.0,  -0.25 - nu / 12.0,
                       -0.125 + 3.0 * nu / 8.0, -0.25 + nu / 12.0, -0.125 - nu / 8.0,
                       nu / 6.0,                0.125 - 3.0 * nu / 8.0};
  // Index pattern of the closed-form Q4 plane-stress stiffness.
  static constexpr int pattern[8][8] = {
      {0, 1, 2, 3, 4, 5, 6, 7}, {1, 0, 7, 6, 5, 4, 3, 2}, {2, 7, 0, 5, 6, 3, 4, 1},
      {3, 6, 5, 0, 7, 2, 1, 4}, {4, 5, 6, 7, 0, 1, 2, 3}, {5, 4, 3, 2, 1, 0, 7, 6},
      {6, 3, 4, 1, 2, 7, 0, 5}, {7, 2, 1, 4, 3, 6, 5, 0}};
  ElementMatrix Ke;
  const double scale = 1.0 / (1.0 - nu * nu);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) Ke(i, j) = scale * k[pattern[i][j]];
  }
  return Ke;
}

Vector element_moduli(const DensityField& rho, const Material& material) {
  return (material.E_min + (material.E - material.E_min) * rho.rho.array()).matrix();
}

SparseMatrix assemble_with_moduli(const Mesh& mesh, const Vector& moduli,
                                  const Material& material) {
  const int n = mesh.num_elements();
  if (moduli.size() != n) throw InvalidArgument("one modulus per element required");
  const ElementMatrix Ke = element_stiffness(material);

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(n) * 64);
  for (int e = 0; e < n; ++e) {
    const auto dofs = mesh.element_dofs(e);
    for (int j = 0; j < 8; ++j) {
      for (int i = 0; i < 8; ++i) {
        triplets.emplace_back(dofs[i], dofs[j], moduli[e] * Ke(i, j));
      }
    }
  }
  SparseMatrix K(mesh.num_dofs(), mesh.num_dofs());
  K.setFromTriplets(triplets.begin(), triplets.end());
  return K;
}

SparseMatrix assemble_stiffness(const Mesh& mesh, const DensityField& rho,
                                const Material& material) {
  if (rho.size() != mesh.num_elements()) {
    throw InvalidArgument("density field does not match the mesh");
  }
  return assemble_with_moduli(mesh, element_moduli(rho, material), material);
}

EquilibriumSolver::EquilibriumSolver(const Problem& problem)
    : num_dofs_(problem.mesh.num_dofs()), free_dofs_(problem.free_dofs()) {
  full_to_free_.assign(num_dofs_, -1);
  for (std::size_t i = 0; i < free_dofs_.size(); ++i) full_to_free_[free_dofs_[i]] = static_cast<int>(i);
  const Vector f = problem.load_vector();
  f_free_.resize(static_cast<Eigen::Index>(free_dofs_.size()));
  for (std::size_t i = 0; i < free_dofs_.size(); ++i) f_free_[static_cast<Eigen::Index>(i)] = f[free_dofs_[i]];
}

SparseMatrix EquilibriumSolver::reduce(const SparseMatrix& K) const {
  const int nf = static_cast<int>(free_dofs_.size());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(K.nonZeros()));
  for (int col = 0; col < K.outerSize(); ++col) {
    const int fc = full_to_free_[col];
    if (fc < 0) continue;
    for (SparseMatrix::InnerIterator it(K, col); it; ++it) {
      const int fr = full_to_free_[it.row()];
      if (fr >= 0) triplets.emplace_back(fr, fc, it.value());
    }
  }
  SparseMatrix Kff(nf, nf);
  Kff.setFromTriplets(triplets.begin(), triplets.end());
  return Kff;
}

DisplacementField EquilibriumSolver::solve(const SparseMatrix& K) {
  if (K.rows() != num_dofs_ || K.cols() != num_dofs_) {
    throw InvalidArgument("stiffness matrix does not match the problem");
  }
  DisplacementField out{Vector::Zero(num_dofs_)};
  const double f_norm = f_free_.norm();
  if (f_norm == 0.0) {
    last_residual_ = 0.0;
    last_backward_error_ = 0.0;
    return out;
  }

  const SparseMatrix Kff = reduce(K);
  if (!analyzed_) {
    llt_.analyzePattern(Kff);
    analyzed_ = true;
  }
  llt_.factorize(Kff);
  if (llt_.info() != Eigen::Success) {
    throw SingularSystem("stiffness factorization failed; check the boundary conditions");
  }

  Vector u = llt_.solve(f_free_);
  Vector r = f_free_ - Kff * u;
  double residual = r.norm() / f_norm;
  // Iterative refinement: the E_min floor makes K badly conditioned.
  for (int step = 0; step < kMaxRefinementSteps && residual > kResidualTolerance; ++step) {
    u += llt_.solve(r);
    r = f_free_ - Kff * u;
    residual = r.norm() / f_norm;
  }
  if (!u.allFinite()) throw SingularSystem("equilibrium solve produced non-finite displacements");
  // Designs with parts held only by the E_min floor have displacements near
  // 1/E_min, and rounding u alone leaves a residual above the tolerance. Such
  // solves are accepted when they are backward stable.
  const double backward = r.lpNorm<Eigen::Infinity>() /
                          (inf_norm(Kff) * u.lpNorm<Eigen::Infinity>() + f_free_.lpNorm<Eigen::Infinity>());
  if (!(residual <= kResidualTolerance) && !(backward <= kBackwardTolerance)) {
    std::ostringstream msg;
    msg << "equilibrium residual " << residual << " exceeds " << kResidualTolerance
        << " (backward error " << backward << ")";
    throw SingularSystem(msg.str());
  }
  last_backward_error_ = backward;
  last_residual_ = residual;
  for (std::size_t i = 0; i < free_dofs_.size(); ++i) out.u[free_dofs_[i]] = u[static_cast<Eigen::Index>(i)];
  return out;
}

DisplacementField solve_equilibrium(const SparseMatrix& K, const Problem& problem) {
  EquilibriumSolver solver(problem);
  return solver.solve(K);
}

Vector element_energies(const Mesh& mesh, const DisplacementField& u, const Material& material) {
  if (u.u.size() != mesh.num_dofs()) throw InvalidArgument("displacement does not match the mesh");
  const ElementMatrix Ke = element_stiffness(material);
  const int n = mesh.num_elements();
  Vector c(n);
  Eigen::Matrix<double, 8, 1> ue;
  for (int e = 0; e < n; ++e) {
    const auto dofs = mesh.element_dofs(e);
    for (int i = 0; i < 8; ++i) ue[i] = u.u[dofs[i]];
    // Clamp round-off: K_e is positive semidefinite.
    c[e] = std::max(0.0, 0.5 * material.E * ue.dot(Ke * ue));
  }
  return c;
}

double compliance(const DensityField& rho, const Vector& c) {
  if (rho.rho.size() != c.size()) throw InvalidArgument("density and energy lengths differ");
  return rho.rho.dot(c);
}

double structural_compliance(const Problem& problem, const DisplacementField& u) {
  double work = 0.0;
  for (const auto& [dof, value] : problem.loads) work += value * u.u[dof];
  return work;
}

}  // namespace cdtopo

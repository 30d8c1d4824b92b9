#pragma once

// Linear-elastic finite elements on a structured grid of square bilinear
// quads (plane stress, unit thickness).
//
// Numbering follows the classic 88-line layout so that benchmark boundary
// conditions are reproducible:
//   * nodes are numbered column-major starting at the top-left corner,
//     node(col, row) = col * (ny + 1) + row, with row counted downwards;
//   * elements likewise, element(col, row) = col * ny + row;
//   * each node carries two DOFs, 2 * node (x) and 2 * node + 1 (y, positive
//     upwards);
//   * element nodes run counter-clockwise from the lower-left corner.

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

namespace cdtopo {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using ElementMatrix = Eigen::Matrix<double, 8, 8>;

class Mesh {
 public:
  Mesh(int nx, int ny, double element_size = 1.0);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double element_size() const { return element_size_; }

  int num_nodes() const { return (nx_ + 1) * (ny_ + 1); }
  int num_elements() const { return nx_ * ny_; }
  int num_dofs() const { return 2 * num_nodes(); }

  int node_index(int col, int row) const { return col * (ny_ + 1) + row; }
  int element_index(int col, int row) const { return col * ny_ + row; }
  // (col, row) of an element; row 0 is the top of the domain.
  std::pair<int, int> element_position(int e) const { return {e / ny_, e % ny_}; }

  std::array<int, 4> element_nodes(int e) const;
  std::array<int, 8> element_dofs(int e) const;

  double element_volume(int /*e*/) const { return element_size_ * element_size_; }
  Vector element_volumes() const;
  double total_volume() const { return num_elements() * element_volume(0); }

  bool operator==(const Mesh&) const = default;

 private:
  int nx_;
  int ny_;
  double element_size_;
};

struct Material {
  double E = 1.0;
  double E_min = 1e-9;
  double nu = 0.3;

  void validate() const;
  bool operator==(const Material&) const = default;
};

struct DisplacementField {
  Vector u;
};

struct DensityField {
  Vector rho;

  static DensityField constant(int n, double value) { return {Vector::Constant(n, value)}; }
  int size() const { return static_cast<int>(rho.size()); }
};

struct Problem {
  Mesh mesh;
  Material material;
  std::vector<int> fixed_dofs;  // sorted, unique
  std::map<int, double> loads;  // DOF -> force
  double volume_fraction = 0.5;
  std::string name;

  void validate() const;
  Vector load_vector() const;
  double volume_budget() const { return volume_fraction * mesh.total_volume(); }
  std::vector<int> free_dofs() const;
};

// Stiffness of a unit-modulus square element (size independent in 2-D).
ElementMatrix element_stiffness(const Material& material);

// E_min + (E - E_min) * rho_e for every element.
Vector element_moduli(const DensityField& rho, const Material& material);

// K = sum_e modulus_e * K_e.
SparseMatrix assemble_with_moduli(const Mesh& mesh, const Vector& moduli,
                                  const Material& material);

// K(rho) = sum_e [E_min + (E - E_min) rho_e] K_e.
SparseMatrix assemble_stiffness(const Mesh& mesh, const DensityField& rho,
                                const Material& material);

// Solves K u = f on the free DOFs. Keeps the symbolic factorization between
// calls, which pays off when the sparsity pattern does not change (it never
// does for a fixed mesh).
class EquilibriumSolver {
 public:
  explicit EquilibriumSolver(const Problem& problem);

  DisplacementField solve(const SparseMatrix& K);

  // Relative residual ||K_ff u_f - f_f|| / ||f_f|| of the last solve. It is
  // <= 1e-8 unless the design has parts held only by the E_min floor; those
  // solves are accepted when the backward error is at round-off level.
  double last_residual() const { return last_residual_; }
  // ||r||_inf / (||K_ff||_inf ||u_f||_inf + ||f_f||_inf) of the last solve.
  double last_backward_error() const { return last_backward_error_; }

 private:
  SparseMatrix reduce(const SparseMatrix& K) const;

  int num_dofs_;
  std::vector<int> free_dofs_;
  std::vector<int> full_to_free_;
  Vector f_free_;
  Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> llt_;
  bool analyzed_ = false;
  double last_residual_ = 0.0;
  double last_backward_error_ = 0.0;
};

DisplacementField solve_equilibrium(const SparseMatrix& K, const Problem& problem);

// c_e = 1/2 u_e^T (E K_e) u_e, i.e. the energy element e would store if solid.
Vector element_energies(const Mesh& mesh, const DisplacementField& u, const Material& material);

// rho^T c
double compliance(const DensityField& rho, const Vector& c);

// f^T u, the work of the external loads (= u^T K u at equilibrium).
double structural_compliance(const Problem& problem, const DisplacementField& u);

}  // namespace cdtopo

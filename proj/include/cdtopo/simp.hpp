#pragma once

// SIMP baseline in the style of the 88-line code: penalized moduli,
// sensitivity filter and optimality-criteria update.

#include <functional>

#include "cdtopo/result.hpp"

namespace cdtopo {

struct SIMPConfig {
  double penal = 3.0;
  double rmin = 1.5;       // filter radius in element lengths; 0 disables the filter
  int ft = 1;              // only the sensitivity filter is provided
  double move = 0.2;
  double tol_change = 0.01;
  int max_iters = 200;
  double rho_min = 1e-3;   // keeps densities in (0, 1]

  void validate() const;
};

Vector oc_update(const Vector& rho, const Vector& dc, const Vector& dv, double volume_fraction,
                 double move, double rho_min = 1e-3);

Vector sensitivity_filter(const Mesh& mesh, const Vector& rho, const Vector& dc, double rmin);

RunResult run_simp(const Problem& problem, const SIMPConfig& config,
                   const std::function<void(const IterationRecord&)>& observer = {});

}  // namespace cdtopo

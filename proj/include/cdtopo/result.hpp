#pragma once

#include <vector>

#include "cdtopo/fem.hpp"

namespace cdtopo {

struct IterationRecord {
  int iter = 0;
  double compliance = 0.0;  // f^T u of the analysed design
  double volume = 0.0;      // rho^T a
  double grayness = 0.0;
  double budget = 0.0;      // volume target of this iteration
  int inner_iterations = 0;
  double beta = 0.0;        // CDT: perturbation actually used
  bool rounded = false;     // CDT: inner solve was not certified binary
  double change = 0.0;      // SIMP: max density change
};

struct RunResult {
  DensityField final_rho;
  DisplacementField final_u;
  std::vector<IterationRecord> history;
  bool converged = false;
  int outer_iterations = 0;

  double final_compliance() const { return history.empty() ? 0.0 : history.back().compliance; }
};

}  // namespace cdtopo

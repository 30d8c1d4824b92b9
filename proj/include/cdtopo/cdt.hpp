#pragma once

// Alternating topology optimization: equilibrium solve, then an analytic
// canonical-dual knapsack solve for the element selection, under a
// geometrically shrinking volume budget.

#include <functional>

#include "cdtopo/knapsack.hpp"
#include "cdtopo/result.hpp"

namespace cdtopo {

// Which energy an element offers to the knapsack.
enum class EnergyModel {
  // 1/2 u_e^T [E_min + (E - E_min) rho_e] K_e u_e: the energy actually stored
  // by the current design. Removed elements carry ~E_min energy and stay out.
  kDesign,
  // 1/2 u_e^T E K_e u_e for every element, solid or not.
  kSolid,
};

struct CDTConfig {
  CDInnerConfig inner;
  double mu = 0.975;            // budget shrink factor per outer step
  double omega2 = 1e-4;         // relative compliance change for convergence
  int max_outer_iters = 200;
  double beta_retry_factor = 10.0;
  int beta_retries = 1;         // NonBinary inner solves are retried this often
  EnergyModel energy = EnergyModel::kDesign;

  void validate(double volume_fraction) const;
};

struct OuterTrace {
  const IterationRecord& record;
  const KnapsackInstance& instance;  // the knapsack solved at this step
  const KnapsackSolution& inner;
};

using OuterObserver = std::function<void(const OuterTrace&)>;

struct CDTObservers {
  OuterObserver outer;
  // Called with the outer index and each inner iteration.
  std::function<void(int, const InnerTrace&)> inner;
};

// max(mu * V, V_c)
double volume_schedule(double current, double mu, double target);

RunResult run_cdt(const Problem& problem, const CDTConfig& config,
                  const CDTObservers& observers = {});

}  // namespace cdtopo

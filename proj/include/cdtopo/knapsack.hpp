#pragma once

// Canonical-dual solver for the linear 0-1 knapsack problem
//
//   min  -c^T rho   s.t.  rho in {0,1}^n,  rho^T a <= V
//
// The dual variables are one multiplier sigma_e > 0 per element (for the
// constraint rho_e^2 - rho_e <= 0) and a scalar varsigma >= 0 for the budget.
// Given a dual point the primal is recovered in closed form,
//
//   rho_e = (sigma_e - varsigma a_e + c_e) / (2 sigma_e),
//
// and a binary rho obtained this way is a global optimum.

#include <functional>
#include <string_view>

#include "cdtopo/fem.hpp"

namespace cdtopo {

struct KnapsackInstance {
  Vector cost;    // c_e >= 0
  Vector volume;  // a_e > 0
  double budget = 0.0;

  int size() const { return static_cast<int>(cost.size()); }
  double total_volume() const { return volume.sum(); }
  // Checks lengths and signs. The budget is not checked here because the
  // solver handles the trivial cases (budget <= 0 or >= total volume).
  void validate() const;
};

struct DualPoint {
  Vector sigma;
  double varsigma = 0.0;
};

struct CDInnerConfig {
  double beta = 100.0;
  double varsigma0 = 1.0;
  // Stop once |C_k - C_{k-1}| <= omega1 * |C_k| and the budget holds.
  double omega1 = 1e-7;
  int max_inner_iters = 1000;
  double binary_tol = 1e-2;

  void validate() const;
};

enum class KnapsackStatus { Converged, MaxIters, NonBinary };

std::string_view to_string(KnapsackStatus status);

struct KnapsackSolution {
  Vector rho;  // snapped to {0,1} when Converged, raw otherwise
  DualPoint dual;
  double objective = 0.0;       // -c^T rho
  double dual_objective = 0.0;  // unperturbed dual value at `dual`
  double gap = 0.0;
  int iterations = 0;
  KnapsackStatus status = KnapsackStatus::MaxIters;
};

// Per-iteration view handed to an observer of solve_knapsack_cd.
struct InnerTrace {
  int iteration;
  const DualPoint& dual;
  const Vector& rho;
  double cost;    // c^T rho
  double volume;  // a^T rho
  double gap;     // |-c^T rho - dual_value|
};

using InnerObserver = std::function<void(const InnerTrace&)>;

// Unique positive root of 4 sigma^3 / beta + sigma^2 = theta^2.
// Throws DegenerateTheta when |theta| < 1e-12 * scale.
double solve_sigma_cubic(double beta, double theta, double scale = 1.0);

// varsigma = (sum a_e (1 + c_e / sigma_e) - 2 V) / sum a_e^2 / sigma_e
double update_varsigma(const Vector& sigma, const KnapsackInstance& instance);

// rho_e = (1 - theta_e / sigma_e) / 2 with theta_e = varsigma a_e - c_e; no clamping.
Vector primal_from_dual(const DualPoint& dual, const KnapsackInstance& instance);

// -1/4 sum tau_e^2 / sigma_e - varsigma V with tau = sigma - varsigma a + c.
double dual_value(const DualPoint& dual, const KnapsackInstance& instance);

// dual_value - |sigma|^2 / (4 beta)
double perturbed_dual_value(const DualPoint& dual, const KnapsackInstance& instance,
                            double beta);

// Largest volume a binary selection can actually reach without exceeding
// the budget, when that is cheap to know. With equal element volumes
// (uniform meshes) it is a * floor(V / a); otherwise the budget itself.
// The binary feasible set is unchanged, but the dual is tightened so that
// no element is left fractional by an unreachable budget.
double effective_budget(const KnapsackInstance& instance);

KnapsackSolution solve_knapsack_cd(const KnapsackInstance& instance, const CDInnerConfig& config,
                                   const InnerObserver& observer = {});

// Snap a relaxed rho to {0,1} without exceeding the budget: elements are
// taken in decreasing rho (ties by index) while rho_e >= 1/2 and they fit.
Vector round_within_budget(const Vector& rho, const KnapsackInstance& instance);

struct BruteForceResult {
  Vector rho;
  double objective = 0.0;
};

// Exhaustive enumeration; n <= 25.
BruteForceResult brute_force_knapsack(const KnapsackInstance& instance);

// |(-c^T rho) - dual_value(dual)| evaluated against the effective budget.
double duality_gap(const KnapsackSolution& solution, const KnapsackInstance& instance);

}  // namespace cdtopo

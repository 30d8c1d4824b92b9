#include "cdtopo/cdt.hpp"

#include <cmath>

#include "cdtopo/error.hpp"
#include "cdtopo/metrics.hpp"

namespace cdtopo {

void CDTConfig::validate(double volume_fraction) const {
  inner.validate();
  if (!(mu > 0.0 && mu < 1.0)) throw InvalidArgument("mu must lie in (0, 1)");
  if (volume_fraction < 1.0 && !(mu > volume_fraction)) {
    throw InvalidArgument("mu must exceed the target volume fraction");
  }
  if (!(omega2 > 0.0)) throw InvalidArgument("omega2 must be positive");
  if (max_outer_iters < 1) throw InvalidArgument("max_outer_iters must be at least 1");
  if (!(beta_retry_factor > 1.0)) throw InvalidArgument("beta retry factor must exceed 1");
  if (beta_retries < 0) throw InvalidArgument("beta_retries must be non-negative");
}

double volume_schedule(double current, double mu, double target) {
  return std::max(mu * current, target);
}

RunResult run_cdt(const Problem& problem, const CDTConfig& config, const CDTObservers& observers) {
  problem.validate();
  config.validate(problem.volume_fraction);

  const Mesh& mesh = problem.mesh;
  const Material& material = problem.material;
  const int n = mesh.num_elements();
  const Vector a = mesh.element_volumes();
  const double full_volume = a.sum();
  const double target = problem.volume_budget();

  EquilibriumSolver solver(problem);
  DensityField rho = DensityField::constant(n, 1.0);
  DisplacementField u = solver.solve(assemble_stiffness(mesh, rho, material));
  double previous = structural_compliance(problem, u);

  RunResult result;
  if (target >= full_volume) {
    // The budget never binds: the full design is optimal.
    result.history.push_back({.iter = 0, .compliance = previous, .volume = full_volume,
                              .grayness = 0.0, .budget = target});
    result.final_rho = rho;
    result.final_u = u;
    result.converged = true;
    result.outer_iterations = 1;
    return result;
  }

  double budget = volume_schedule(full_volume, config.mu, target);
  double varsigma = config.inner.varsigma0;

  for (int gamma = 0; gamma < config.max_outer_iters; ++gamma) {
    Vector c = element_energies(mesh, u, material);
    if (config.energy == EnergyModel::kDesign) {
      c.array() *= element_moduli(rho, material).array() / material.E;
    }
    const KnapsackInstance instance{c, a, budget};

    CDInnerConfig inner = config.inner;
    inner.varsigma0 = varsigma;
    InnerObserver inner_observer;
    if (observers.inner) {
      inner_observer = [&](const InnerTrace& t) { observers.inner(gamma, t); };
    }
    KnapsackSolution sol = solve_knapsack_cd(instance, inner, inner_observer);
    for (int retry = 0; retry < config.beta_retries && sol.status != KnapsackStatus::Converged;
         ++retry) {
      inner.beta *= config.beta_retry_factor;
      sol = solve_knapsack_cd(instance, inner, inner_observer);
    }
    const bool rounded = sol.status != KnapsackStatus::Converged;
    rho.rho = rounded ? round_within_budget(sol.rho, instance) : sol.rho;
    if (std::isfinite(sol.dual.varsigma) && sol.dual.varsigma > 0.0) varsigma = sol.dual.varsigma;

    u = solver.solve(assemble_stiffness(mesh, rho, material));
    const double current = structural_compliance(problem, u);

    IterationRecord record{.iter = gamma,
                           .compliance = current,
                           .volume = a.dot(rho.rho),
                           .grayness = grayness_metric(rho),
                           .budget = budget,
                           .inner_iterations = sol.iterations,
                           .beta = inner.beta,
                           .rounded = rounded};
    result.history.push_back(record);
    if (observers.outer) observers.outer(OuterTrace{result.history.back(), instance, sol});

    if (std::abs(current - previous) <= config.omega2 * std::abs(current) && budget <= target) {
      result.converged = true;
      break;
    }
    previous = current;
    if (budget > target) budget = volume_schedule(budget, config.mu, target);
  }

  result.final_rho = rho;
  result.final_u = u;
  result.outer_iterations = static_cast<int>(result.history.size());
  return result;
}

}  // namespace cdtopo

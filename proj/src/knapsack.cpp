#include "cdtopo/knapsack.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>

#include "cdtopo/error.hpp"

namespace cdtopo {

namespace {

constexpr double kDegenerateThetaRatio = 1e-12;
constexpr int kMaxBruteForceSize = 25;

void require_positive_sigma(const DualPoint& dual, int n) {
  if (dual.sigma.size() != n) throw InvalidArgument("dual point does not match the instance");
  if (!(dual.sigma.array() > 0.0).all()) throw InvalidArgument("sigma must be strictly positive");
}

double budget_slack(const KnapsackInstance& instance) {
  return 1e-12 * std::max(1.0, instance.total_volume());
}

KnapsackInstance with_budget(const KnapsackInstance& instance, double budget) {
  return {instance.cost, instance.volume, budget};
}

// Closed-form solution when the budget cannot bind or admits nothing.
KnapsackSolution trivial_solution(const KnapsackInstance& instance, bool take_all) {
  const int n = instance.size();
  const double floor = kDegenerateThetaRatio * std::max(1.0, instance.cost.maxCoeff());
  KnapsackSolution sol;
  sol.status = KnapsackStatus::Converged;
  if (take_all) {
    // varsigma = 0 and sigma = c satisfy rho_e = 1 exactly.
    sol.rho = Vector::Ones(n);
    sol.dual.varsigma = 0.0;
    sol.dual.sigma = instance.cost.cwiseMax(floor);
  } else {
    // Any varsigma above every ratio c_e / a_e makes rho_e = 0 with tau = 0.
    sol.rho = Vector::Zero(n);
    sol.dual.varsigma = (instance.cost.array() / instance.volume.array()).maxCoeff() + 1.0;
    sol.dual.sigma = (sol.dual.varsigma * instance.volume - instance.cost).cwiseMax(floor);
  }
  sol.objective = -instance.cost.dot(sol.rho);
  sol.dual_objective = dual_value(sol.dual, with_budget(instance, std::max(instance.budget, 0.0)));
  sol.gap = std::abs(sol.objective - sol.dual_objective);
  return sol;
}

}  // namespace

std::string_view to_string(KnapsackStatus status) {
  switch (status) {
    case KnapsackStatus::Converged:
      return "converged";
    case KnapsackStatus::MaxIters:
      return "max_iters";
    case KnapsackStatus::NonBinary:
      return "non_binary";
  }
  return "unknown";
}

void KnapsackInstance::validate() const {
  if (cost.size() < 1) throw InvalidArgument("knapsack instance is empty");
  if (volume.size() != cost.size()) throw InvalidArgument("cost and volume lengths differ");
  if (!cost.allFinite() || (cost.array() < 0.0).any()) {
    throw InvalidArgument("knapsack costs must be finite and non-negative");
  }
  if (!volume.allFinite() || !(volume.array() > 0.0).all()) {
    throw InvalidArgument("knapsack volumes must be positive");
  }
  if (!std::isfinite(budget)) throw InvalidArgument("knapsack budget is not finite");
}

void CDInnerConfig::validate() const {
  if (!(beta > 0.0)) throw InvalidArgument("beta must be positive");
  if (!(varsigma0 >= 0.0)) throw InvalidArgument("initial varsigma must be non-negative");
  if (!(omega1 > 0.0)) throw InvalidArgument("omega1 must be positive");
  if (max_inner_iters < 1) throw InvalidArgument("max_inner_iters must be at least 1");
  if (!(binary_tol >= 0.0 && binary_tol < 0.5)) throw InvalidArgument("binary_tol must lie in [0, 0.5)");
}

double solve_sigma_cubic(double beta, double theta, double scale) {
  if (!(beta > 0.0)) throw InvalidArgument("beta must be positive");
  const double t = std::abs(theta);
  if (!(t >= kDegenerateThetaRatio * scale)) {
    std::ostringstream msg;
    msg << "theta = " << theta << " is degenerate";
    throw DegenerateTheta(msg.str());
  }
  const double a = 4.0 / beta;
  const double t2 = t * t;
  // g(s) = a s^3 + s^2 - t^2 is increasing and convex on s > 0, and both
  // candidates below satisfy g >= 0, so Newton descends monotonically onto
  // the root without overshooting.
  double s = std::min(t, std::cbrt(t2 / a));
  for (int it = 0; it < 200; ++it) {
    const double g = (a * s + 1.0) * s * s - t2;
    if (g <= 0.0) break;
    const double dg = (3.0 * a * s + 2.0) * s;
    const double next = s - g / dg;
    if (!(next < s)) break;
    s = next;
  }
  return s;
}

double update_varsigma(const Vector& sigma, const KnapsackInstance& instance) {
  const auto a = instance.volume.array();
  const auto c = instance.cost.array();
  const auto s = sigma.array();
  const double numerator = (a * (1.0 + c / s)).sum() - 2.0 * instance.budget;
  const double denominator = (a * a / s).sum();
  return numerator / denominator;
}

Vector primal_from_dual(const DualPoint& dual, const KnapsackInstance& instance) {
  require_positive_sigma(dual, instance.size());
  const auto theta = dual.varsigma * instance.volume.array() - instance.cost.array();
  return (0.5 * (1.0 - theta / dual.sigma.array())).matrix();
}

double dual_value(const DualPoint& dual, const KnapsackInstance& instance) {
  require_positive_sigma(dual, instance.size());
  const auto tau = dual.sigma.array() - dual.varsigma * instance.volume.array() + instance.cost.array();
  return -0.25 * (tau.square() / dual.sigma.array()).sum() - dual.varsigma * instance.budget;
}

double perturbed_dual_value(const DualPoint& dual, const KnapsackInstance& instance,
                            double beta) {
  return dual_value(dual, instance) - 0.25 / beta * dual.sigma.squaredNorm();
}

double effective_budget(const KnapsackInstance& instance) {
  const double a0 = instance.volume[0];
  const bool uniform = ((instance.volume.array() - a0).abs() <= 1e-12 * a0).all();
  if (!uniform || instance.budget <= 0.0) return instance.budget;
  const double count = std::floor(instance.budget / a0 + 1e-9);
  return std::min(count, static_cast<double>(instance.size())) * a0;
}

KnapsackSolution solve_knapsack_cd(const KnapsackInstance& instance, const CDInnerConfig& config,
                                   const InnerObserver& observer) {
  instance.validate();
  config.validate();
  const int n = instance.size();
  const double total = instance.total_volume();
  const double slack = budget_slack(instance);

  if (instance.budget >= total - slack) return trivial_solution(instance, true);
  const double budget = effective_budget(instance);
  if (budget <= slack) return trivial_solution(instance, false);

  const KnapsackInstance tight = with_budget(instance, budget);
  const Vector& c = instance.cost;
  const Vector& a = instance.volume;
  const double scale = std::max(1.0, c.maxCoeff());
  const double theta_floor = kDegenerateThetaRatio * scale;

  DualPoint dual{Vector(n), config.varsigma0};
  Vector rho(n);
  double previous_cost = 0.0;
  bool settled = false;
  int k = 0;
  while (k < config.max_inner_iters) {
    ++k;
    // sigma from the previous varsigma.
    for (int e = 0; e < n; ++e) {
      double theta = dual.varsigma * a[e] - c[e];
      if (std::abs(theta) < theta_floor) theta = theta < 0.0 ? -theta_floor : theta_floor;
      dual.sigma[e] = solve_sigma_cubic(config.beta, theta, scale);
    }
    // varsigma from the new sigma; the multiplier of an inequality stays >= 0.
    dual.varsigma = std::max(0.0, update_varsigma(dual.sigma, tight));
    rho = primal_from_dual(dual, tight);

    const double cost = c.dot(rho);
    const double volume = a.dot(rho);
    if (observer) {
      const double gap = std::abs(-cost - dual_value(dual, tight));
      observer(InnerTrace{k, dual, rho, cost, volume, gap});
    }
    if (k > 1 && std::abs(cost - previous_cost) <= config.omega1 * std::abs(cost) &&
        volume <= budget + slack) {
      settled = true;
      break;
    }
    previous_cost = cost;
  }

  KnapsackSolution sol;
  sol.dual = dual;
  sol.iterations = k;
  sol.rho = rho;
  if (!settled) {
    sol.status = KnapsackStatus::MaxIters;
  } else {
    const bool near_binary =
        (rho.array().abs().min((rho.array() - 1.0).abs()) <= config.binary_tol).all();
    const Vector snapped = (rho.array() >= 0.5).cast<double>().matrix();
    if (near_binary && a.dot(snapped) <= budget + slack) {
      sol.rho = snapped;
      sol.status = KnapsackStatus::Converged;
    } else {
      sol.status = KnapsackStatus::NonBinary;
    }
  }
  sol.objective = -c.dot(sol.rho);
  sol.dual_objective = dual_value(sol.dual, tight);
  sol.gap = std::abs(sol.objective - sol.dual_objective);
  return sol;
}

Vector round_within_budget(const Vector& rho, const KnapsackInstance& instance) {
  const int n = instance.size();
  if (rho.size() != n) throw InvalidArgument("rho does not match the instance");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return rho[i] > rho[j]; });
  const double limit = instance.budget + budget_slack(instance);
  Vector out = Vector::Zero(n);
  double used = 0.0;
  for (int e : order) {
    if (rho[e] < 0.5) break;
    if (used + instance.volume[e] <= limit) {
      out[e] = 1.0;
      used += instance.volume[e];
    }
  }
  return out;
}

BruteForceResult brute_force_knapsack(const KnapsackInstance& instance) {
  instance.validate();
  const int n = instance.size();
  if (n > kMaxBruteForceSize) {
    std::ostringstream msg;
    msg << "brute force limited to n <= " << kMaxBruteForceSize << ", got " << n;
    throw TooLarge(msg.str());
  }
  const double limit = instance.budget + budget_slack(instance);
  // Gray-code walk: one item flips per step.
  std::uint32_t code = 0;
  double cost = 0.0;
  double volume = 0.0;
  std::uint32_t best_code = 0;
  double best_cost = 0.0;  // the empty selection is always feasible when budget >= 0
  bool have_best = limit >= 0.0;
  const std::uint32_t count = 1u << n;
  for (std::uint32_t i = 1; i < count; ++i) {
    const int bit = __builtin_ctz(i);
    code ^= 1u << bit;
    const double sign = (code >> bit) & 1u ? 1.0 : -1.0;
    cost += sign * instance.cost[bit];
    volume += sign * instance.volume[bit];
    if (volume <= limit && (!have_best || cost > best_cost)) {
      best_cost = cost;
      best_code = code;
      have_best = true;
    }
  }
  if (!have_best) throw InvalidArgument("knapsack budget admits no selection");
  BruteForceResult out{Vector::Zero(n), 0.0};
  for (int e = 0; e < n; ++e) out.rho[e] = (best_code >> e) & 1u ? 1.0 : 0.0;
  // Recompute to avoid accumulated round-off from the incremental walk.
  out.objective = -instance.cost.dot(out.rho);
  return out;
}

double duality_gap(const KnapsackSolution& solution, const KnapsackInstance& instance) {
  if (solution.status != KnapsackStatus::Converged) {
    throw NotConverged("duality gap is only defined for converged solutions");
  }
  const KnapsackInstance tight = with_budget(instance, effective_budget(instance));
  return std::abs(-instance.cost.dot(solution.rho) - dual_value(solution.dual, tight));
}

}  // namespace cdtopo

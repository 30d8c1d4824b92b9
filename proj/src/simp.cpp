#include "cdtopo/simp.hpp"

#include <algorithm>
#include <cmath>

#include "cdtopo/error.hpp"
#include "cdtopo/metrics.hpp"

namespace cdtopo {

namespace {

constexpr double kVolumeTolerance = 1e-10;

Vector oc_candidate(const Vector& rho, const Vector& dc, const Vector& dv, double lambda,
                    double move, double rho_min) {
  Vector out(rho.size());
  for (Eigen::Index e = 0; e < rho.size(); ++e) {
    const double ratio = std::max(0.0, -dc[e]) / (lambda * dv[e]);
    const double lo = std::max(rho_min, rho[e] - move);
    const double hi = std::min(1.0, rho[e] + move);
    out[e] = std::clamp(rho[e] * std::sqrt(ratio), lo, hi);
  }
  return out;
}

}  // namespace

void SIMPConfig::validate() const {
  if (!(penal >= 1.0)) throw InvalidArgument("penal must be at least 1");
  if (!(rmin >= 0.0)) throw InvalidArgument("rmin must be non-negative");
  if (ft != 1) throw InvalidArgument("only the sensitivity filter (ft = 1) is available");
  if (!(move >= 0.0 && move <= 1.0)) throw InvalidArgument("move must lie in [0, 1]");
  if (!(tol_change > 0.0)) throw InvalidArgument("tol_change must be positive");
  if (max_iters < 1) throw InvalidArgument("max_iters must be at least 1");
  if (!(rho_min > 0.0 && rho_min < 1.0)) throw InvalidArgument("rho_min must lie in (0, 1)");
}

Vector oc_update(const Vector& rho, const Vector& dc, const Vector& dv, double volume_fraction,
                 double move, double rho_min) {
  if (dc.size() != rho.size() || dv.size() != rho.size()) {
    throw InvalidArgument("OC inputs must have equal lengths");
  }
  if (move == 0.0) return rho;

  const double target = volume_fraction * dv.sum();
  auto volume = [&](double lambda) {
    return dv.dot(oc_candidate(rho, dc, dv, lambda, move, rho_min));
  };

  // Volume is non-increasing in lambda; bracket the target in log space.
  double lo = 1.0;
  double hi = 1.0;
  int guard = 0;
  while (volume(lo) < target && guard++ < 1000) lo *= 0.5;
  guard = 0;
  while (volume(hi) > target && guard++ < 1000) hi *= 2.0;
  const double v_lo = volume(lo);
  const double v_hi = volume(hi);
  if (v_hi > target * (1.0 + 1e-9)) {
    throw BisectionFailure("OC update cannot reach the volume target within the move limit");
  }
  if (v_lo <= target) return oc_candidate(rho, dc, dv, lo, move, rho_min);

  for (int it = 0; it < 400; ++it) {
    const double mid = std::sqrt(lo * hi);
    const double v = volume(mid);
    if (std::abs(v - target) <= kVolumeTolerance * target) {
      return oc_candidate(rho, dc, dv, mid, move, rho_min);
    }
    if (v > target) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-15 * hi) break;
  }
  return oc_candidate(rho, dc, dv, std::sqrt(lo * hi), move, rho_min);
}

Vector sensitivity_filter(const Mesh& mesh, const Vector& rho, const Vector& dc, double rmin) {
  const int n = mesh.num_elements();
  if (rho.size() != n || dc.size() != n) throw InvalidArgument("filter inputs do not match the mesh");
  if (rmin <= 0.0) return dc;

  const int reach = static_cast<int>(std::ceil(rmin)) - 1;
  Vector out(n);
  for (int e = 0; e < n; ++e) {
    const auto [col, row] = mesh.element_position(e);
    double weighted = 0.0;
    double weight_sum = 0.0;
    for (int c2 = std::max(col - reach, 0); c2 <= std::min(col + reach, mesh.nx() - 1); ++c2) {
      for (int r2 = std::max(row - reach, 0); r2 <= std::min(row + reach, mesh.ny() - 1); ++r2) {
        const double w = std::max(0.0, rmin - std::hypot(col - c2, row - r2));
        const int j = mesh.element_index(c2, r2);
        weighted += w * rho[j] * dc[j];
        weight_sum += w;
      }
    }
    out[e] = weighted / (std::max(rho[e], 1e-3) * weight_sum);
  }
  return out;
}

RunResult run_simp(const Problem& problem, const SIMPConfig& config,
                   const std::function<void(const IterationRecord&)>& observer) {
  problem.validate();
  config.validate();
  const Mesh& mesh = problem.mesh;
  const Material& material = problem.material;
  const int n = mesh.num_elements();
  const Vector dv = mesh.element_volumes();
  const double span = material.E - material.E_min;

  EquilibriumSolver solver(problem);
  Vector rho = Vector::Constant(n, problem.volume_fraction);
  RunResult result;

  for (int it = 0; it < config.max_iters; ++it) {
    const Vector penalized = rho.array().pow(config.penal);
    const Vector moduli = (material.E_min + span * penalized.array()).matrix();
    DisplacementField u = solver.solve(assemble_with_moduli(mesh, moduli, material));

    // 2 c_e / E = u_e^T K_e u_e with the unit-modulus element matrix.
    const Vector ue_ke_ue = 2.0 / material.E * element_energies(mesh, u, material);
    Vector dc = (-config.penal * span * rho.array().pow(config.penal - 1.0) * ue_ke_ue.array()).matrix();
    dc = sensitivity_filter(mesh, rho, dc, config.rmin);
    const Vector next = oc_update(rho, dc, dv, problem.volume_fraction, config.move, config.rho_min);
    const double change = (next - rho).cwiseAbs().maxCoeff();

    IterationRecord record{.iter = it,
                           .compliance = structural_compliance(problem, u),
                           .volume = dv.dot(rho),
                           .grayness = grayness_metric(DensityField{rho}),
                           .budget = problem.volume_budget(),
                           .change = change};
    result.history.push_back(record);
    if (observer) observer(record);

    result.final_rho.rho = rho;
    result.final_u = std::move(u);
    rho = next;
    if (change <= config.tol_change) {
      result.converged = true;
      break;
    }
  }
  result.outer_iterations = static_cast<int>(result.history.size());
  return result;
}

}  // namespace cdtopo

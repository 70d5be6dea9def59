#include <array>

#include "poropinn/errors.hpp"
#include "poropinn/training.hpp"

namespace poropinn {

namespace {

// Computes the breakdown from evaluated bundles. When seed spans are
// non-empty, also writes d(total)/d(bundle entry). Training and reporting both
// go through here so the logged and optimized objectives agree bit-for-bit.
LossBreakdown breakdown_from_bundles(std::span<const DerivBundle> data, std::span<const FieldValues> targets,
                                     std::span<const DerivBundle> colloc, const SolutionParams& sp,
                                     std::span<DerivBundle> data_seeds, std::span<DerivBundle> colloc_seeds) {
  LossBreakdown out;
  if (!data.empty()) {
    const double n = static_cast<double>(data.size());
    std::array<double, 3> sums{};
    for (std::size_t i = 0; i < data.size(); ++i) {
      for (int c = 0; c < 3; ++c) {
        const double diff = targets[i][c] - data[i].value[c];
        sums[c] += diff * diff;
        if (!data_seeds.empty()) data_seeds[i].value[c] = -2.0 * diff / n;
      }
    }
    out.mse_u = sums[kU] / n;
    out.mse_v = sums[kV] / n;
    out.mse_p = sums[kP] / n;
  }
  if (!colloc.empty()) {
    const double n = static_cast<double>(colloc.size());
    const double eta = sp.eta;
    std::array<double, 3> sums{};
    for (std::size_t i = 0; i < colloc.size(); ++i) {
      const auto& b = colloc[i];
      const double rf = residual_f(b, eta) - source_ru(b.point, sp);
      const double rg = residual_g(b, eta) - source_rv(b.point, sp);
      const double rh = residual_h(b) - source_rp(b.point, sp);
      sums[0] += rf * rf;
      sums[1] += rg * rg;
      sums[2] += rh * rh;
      if (colloc_seeds.empty()) continue;

      const double sf = 2.0 * rf / n;
      const double sg = 2.0 * rg / n;
      const double sh = 2.0 * rh / n;
      auto& s = colloc_seeds[i];
      auto& hu = s.hessians[kU];
      auto& hv = s.hessians[kV];
      auto& hp = s.hessians[kP];
      // f = (eta+1) u_xx + u_zz + eta v_xz + (eta+1) p_x
      hu[kX][kX] += (eta + 1.0) * sf;
      hu[kZ][kZ] += sf;
      hv[kX][kZ] += eta * sf;
      s.jacobian[kP][kX] += (eta + 1.0) * sf;
      // g = v_xx + (eta+1) v_zz + eta u_xz + (eta+1) p_z
      hv[kX][kX] += sg;
      hv[kZ][kZ] += (eta + 1.0) * sg;
      hu[kX][kZ] += eta * sg;
      s.jacobian[kP][kZ] += (eta + 1.0) * sg;
      // h = u_tx + v_tz - p_xx - p_zz
      hu[kT][kX] += sh;
      hv[kT][kZ] += sh;
      hp[kX][kX] -= sh;
      hp[kZ][kZ] -= sh;
    }
    out.mse_f = sums[0] / n;
    out.mse_g = sums[1] / n;
    out.mse_h = sums[2] / n;
  }
  out.data = out.mse_u + out.mse_v + out.mse_p;
  out.physics = out.mse_f + out.mse_g + out.mse_h;
  out.total = out.data + out.physics;
  return out;
}

std::array<EvalGroup, 2> groups_for(const DataBatch& batch, std::span<const SpacetimePoint> colloc) {
  return {EvalGroup{batch.points, DerivOrder::kValue}, EvalGroup{colloc, DerivOrder::kSecond}};
}

void check_batch(const DataBatch& batch) {
  if (batch.points.size() != batch.targets.size()) {
    throw UsageError("data batch has mismatched point and target counts");
  }
}

}  // namespace

DataTerms data_loss(const MlpParams& params, const DataBatch& batch) {
  check_batch(batch);
  if (batch.size() == 0) throw UsageError("data_loss needs a non-empty batch");
  const auto bundles = evaluate(params, {batch.points, DerivOrder::kValue});
  const auto b = breakdown_from_bundles(bundles, batch.targets, {}, SolutionParams{}, {}, {});
  return {b.mse_u, b.mse_v, b.mse_p};
}

PhysicsTerms physics_loss(const MlpParams& params, std::span<const SpacetimePoint> colloc,
                          const SolutionParams& sp) {
  if (colloc.empty()) throw UsageError("physics_loss needs a non-empty collocation set");
  const auto bundles = evaluate(params, {colloc, DerivOrder::kSecond});
  const auto b = breakdown_from_bundles({}, {}, bundles, sp, {}, {});
  return {b.mse_f, b.mse_g, b.mse_h};
}

LossBreakdown total_loss(const MlpParams& params, const DataBatch& batch,
                         std::span<const SpacetimePoint> colloc, const SolutionParams& sp) {
  check_batch(batch);
  if (batch.size() == 0) throw UsageError("total_loss needs a non-empty batch");
  if (colloc.empty()) throw UsageError("total_loss needs a non-empty collocation set");
  return batch_loss(params, batch, colloc, sp);
}

LossBreakdown batch_loss(const MlpParams& params, const DataBatch& batch,
                         std::span<const SpacetimePoint> colloc, const SolutionParams& sp) {
  check_batch(batch);
  const auto groups = groups_for(batch, colloc);
  const auto data = evaluate(params, groups[0]);
  const auto phys = evaluate(params, groups[1]);
  return breakdown_from_bundles(data, batch.targets, phys, sp, {}, {});
}

LossAndGradient loss_and_gradient(const MlpParams& params, const DataBatch& batch,
                                  std::span<const SpacetimePoint> colloc, const SolutionParams& sp) {
  check_batch(batch);
  const auto groups = groups_for(batch, colloc);
  LossBreakdown losses;
  auto objective = [&](std::span<const std::vector<DerivBundle>> bundles,
                       std::span<std::vector<DerivBundle>> seeds) {
    losses = breakdown_from_bundles(bundles[0], batch.targets, bundles[1], sp, seeds[0], seeds[1]);
    return losses.total;
  };
  auto vg = grad_scalar(params, groups, objective);
  return {losses, std::move(vg.gradient)};
}

}  // namespace poropinn

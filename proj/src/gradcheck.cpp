#include "poropinn/gradcheck.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "poropinn/errors.hpp"
#include "poropinn/random.hpp"

namespace poropinn {

void ErrorProbe::record(double error, const std::function<std::string()>& location) {
  ++compared;
  // NaN compares false everywhere; treat it as the worst possible error.
  if (std::isnan(error)) error = INFINITY;
  if (where.empty() || error > worst) {
    worst = std::max(worst, error);
    where = location();
  }
}

double relative_error(double actual, double reference) {
  const double scale = std::max(std::abs(actual), std::abs(reference));
  if (scale == 0.0) return 0.0;
  return std::abs(actual - reference) / scale;
}

namespace {

constexpr const char* kAxisName[3] = {"x", "z", "t"};
constexpr const char* kFieldName[3] = {"u", "v", "p"};

SpacetimePoint shifted(SpacetimePoint q, int axis, double h) {
  if (axis == kX) q.x += h;
  else if (axis == kZ) q.z += h;
  else q.t += h;
  return q;
}

}  // namespace

InputDerivErrors check_input_derivatives(const MlpParams& params, std::span<const SpacetimePoint> points,
                                         const DerivEvaluator& eval) {
  constexpr double h1 = 1e-4;
  constexpr double h2 = 1e-3;
  InputDerivErrors out;
  for (std::size_t s = 0; s < points.size(); ++s) {
    const auto& q = points[s];
    const DerivBundle b = eval(params, q);
    const FieldValues center = forward(params, q);
    auto where = [&](const char* kind, int field, int a, int c) {
      return [=, &q]() {
        return c < 0 ? fmt::format("point {} ({:.6f},{:.6f},{:.6f}) {}[{}][{}]", s, q.x, q.z, q.t, kind,
                                   kFieldName[field], kAxisName[a])
                     : fmt::format("point {} ({:.6f},{:.6f},{:.6f}) {}[{}][{}][{}]", s, q.x, q.z, q.t, kind,
                                   kFieldName[field], kAxisName[a], kAxisName[c]);
      };
    };
    for (int a = 0; a < 3; ++a) {
      const FieldValues fp = forward(params, shifted(q, a, h1));
      const FieldValues fm = forward(params, shifted(q, a, -h1));
      for (int f = 0; f < 3; ++f) {
        const double fd = (fp[f] - fm[f]) / (2.0 * h1);
        out.jacobian.record(std::abs(b.jacobian[f][a] - fd) / (1.0 + std::abs(fd)), where("jacobian", f, a, -1));
      }
    }
    for (int a = 0; a < 3; ++a) {
      for (int c = a; c < 3; ++c) {
        std::array<double, 3> fd{};
        if (a == c) {
          const FieldValues fp = forward(params, shifted(q, a, h2));
          const FieldValues fm = forward(params, shifted(q, a, -h2));
          for (int f = 0; f < 3; ++f) fd[f] = (fp[f] - 2.0 * center[f] + fm[f]) / (h2 * h2);
        } else {
          const FieldValues fpp = forward(params, shifted(shifted(q, a, h2), c, h2));
          const FieldValues fpm = forward(params, shifted(shifted(q, a, h2), c, -h2));
          const FieldValues fmp = forward(params, shifted(shifted(q, a, -h2), c, h2));
          const FieldValues fmm = forward(params, shifted(shifted(q, a, -h2), c, -h2));
          for (int f = 0; f < 3; ++f) fd[f] = (fpp[f] - fpm[f] - fmp[f] + fmm[f]) / (4.0 * h2 * h2);
        }
        for (int f = 0; f < 3; ++f) {
          // Both orderings are checked so an asymmetric Hessian cannot hide.
          out.hessian.record(std::abs(b.hessians[f][a][c] - fd[f]) / (1.0 + std::abs(fd[f])),
                             where("hessian", f, a, c));
          out.hessian.record(std::abs(b.hessians[f][c][a] - fd[f]) / (1.0 + std::abs(fd[f])),
                             where("hessian", f, c, a));
        }
      }
    }
  }
  return out;
}

namespace {

// Central differences of a loss near 10 in double precision carry roughly
// 1e-9 of absolute rounding noise at step 1e-6, which swamps a 1e-5 relative
// tolerance on small gradient entries. The reference loss below is therefore
// evaluated in long double, through its own jet recurrences.
using Wide = long double;

struct WideJet {
  Wide v = 0;
  std::array<Wide, 3> g{};
  std::array<Wide, 6> h{};  // xx xz xt zz zt tt
};

constexpr int kPair[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};

using WideLayer = std::vector<WideJet>;

WideLayer input_jets(const SpacetimePoint& q) {
  WideLayer act(3);
  for (int j = 0; j < 3; ++j) {
    act[j].v = static_cast<Wide>(q[j]);
    act[j].g[j] = 1;
  }
  return act;
}

// Runs layers [from, end) starting from `act`; when `trace` is given it
// receives the activation entering every layer.
template <bool kDerivs>
WideLayer wide_propagate(const MlpParams& shape, std::span<const Wide> w, WideLayer act, std::size_t from,
                         std::vector<WideLayer>* trace = nullptr) {
  WideLayer next;
  const std::size_t nl = shape.layer_count();
  for (std::size_t l = from; l < nl; ++l) {
    if (trace) trace->push_back(act);
    const auto& s = shape.shape(l);
    next.assign(s.rows, WideJet{});
    for (std::size_t r = 0; r < s.rows; ++r) {
      WideJet& z = next[r];
      z.v = w[s.bias_offset + r];
      const Wide* row = w.data() + s.weight_offset + r * s.cols;
      for (std::size_t c = 0; c < s.cols; ++c) {
        z.v += row[c] * act[c].v;
        if constexpr (kDerivs) {
          for (int a = 0; a < 3; ++a) z.g[a] += row[c] * act[c].g[a];
          for (int k = 0; k < 6; ++k) z.h[k] += row[c] * act[c].h[k];
        }
      }
      if (l + 1 == nl) continue;
      const Wide y = std::tanh(z.v);
      const Wide d1 = 1 - y * y;
      const Wide d2 = -2 * y * d1;
      z.v = y;
      if constexpr (kDerivs) {
        for (int a = 0; a < 3; ++a) {
          for (int b = a; b < 3; ++b) z.h[kPair[a][b]] = d2 * z.g[a] * z.g[b] + d1 * z.h[kPair[a][b]];
        }
        for (int a = 0; a < 3; ++a) z.g[a] *= d1;
      }
    }
    act.swap(next);
  }
  return act;
}

// Long double batch objective. Layer inputs of the unperturbed network are
// cached, so a perturbation in layer l only re-runs layers l and above.
class WideObjective {
 public:
  WideObjective(const MlpParams& params, const DataBatch& batch, std::span<const SpacetimePoint> colloc,
                const SolutionParams& sp)
      : shape_(params), batch_(batch), colloc_(colloc), sp_(sp), w_(params.values().begin(), params.values().end()) {
    for (const auto& q : batch.points) {
      data_trace_.emplace_back();
      wide_propagate<false>(shape_, w_, input_jets(q), 0, &data_trace_.back());
    }
    for (const auto& q : colloc) {
      colloc_trace_.emplace_back();
      wide_propagate<true>(shape_, w_, input_jets(q), 0, &colloc_trace_.back());
      sources_.push_back({static_cast<Wide>(source_ru(q, sp)), static_cast<Wide>(source_rv(q, sp)),
                          static_cast<Wide>(source_rp(q, sp))});
    }
  }

  std::size_t size() const { return w_.size(); }

  // Central difference of the loss along parameter i.
  Wide central_difference(std::size_t i, Wide step) {
    std::size_t layer = 0;
    while (layer + 1 < shape_.layer_count() && i >= shape_.shape(layer + 1).weight_offset) ++layer;
    const Wide saved = w_[i];
    w_[i] = saved + step;
    const Wide up = loss(layer);
    w_[i] = saved - step;
    const Wide down = loss(layer);
    w_[i] = saved;
    return (up - down) / (2 * step);
  }

 private:
  Wide loss(std::size_t from) const {
    std::array<Wide, 3> data{};
    for (std::size_t i = 0; i < batch_.size(); ++i) {
      const auto out = wide_propagate<false>(shape_, w_, data_trace_[i][from], from);
      for (int f = 0; f < 3; ++f) {
        const Wide d = out[f].v - static_cast<Wide>(batch_.targets[i][f]);
        data[f] += d * d;
      }
    }
    std::array<Wide, 3> phys{};
    const Wide eta = sp_.eta;
    for (std::size_t i = 0; i < colloc_.size(); ++i) {
      const auto o = wide_propagate<true>(shape_, w_, colloc_trace_[i][from], from);
      const auto& u = o[kU];
      const auto& v = o[kV];
      const auto& p = o[kP];
      const Wide f = (eta + 1) * u.h[0] + u.h[3] + eta * v.h[1] + (eta + 1) * p.g[kX];
      const Wide g = v.h[0] + (eta + 1) * v.h[3] + eta * u.h[1] + (eta + 1) * p.g[kZ];
      const Wide h = u.h[2] + v.h[4] - p.h[0] - p.h[3];
      const Wide res[3] = {f - sources_[i][0], g - sources_[i][1], h - sources_[i][2]};
      for (int k = 0; k < 3; ++k) phys[k] += res[k] * res[k];
    }
    Wide total = 0;
    const Wide nd = static_cast<Wide>(batch_.size());
    for (Wide s : data) total += s / nd;
    if (!colloc_.empty()) {
      const Wide nc = static_cast<Wide>(colloc_.size());
      for (Wide s : phys) total += s / nc;
    }
    return total;
  }

  const MlpParams& shape_;
  DataBatch batch_;
  std::span<const SpacetimePoint> colloc_;
  SolutionParams sp_;
  std::vector<Wide> w_;
  std::vector<std::vector<WideLayer>> data_trace_;
  std::vector<std::vector<WideLayer>> colloc_trace_;
  std::vector<std::array<Wide, 3>> sources_;
};

}  // namespace

ErrorProbe check_param_gradient(const MlpParams& params, const DataBatch& batch,
                                std::span<const SpacetimePoint> colloc, const SolutionParams& sp, double step,
                                double floor) {
  if (batch.size() == 0) throw UsageError("gradient check needs a non-empty data batch");
  const auto analytic = loss_and_gradient(params, batch, colloc, sp);
  ErrorProbe probe;
  WideObjective reference(params, batch, colloc, sp);
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double fd = static_cast<double>(reference.central_difference(i, static_cast<Wide>(step)));
    const double g = analytic.gradient.values()[i];
    if (std::max(std::abs(g), std::abs(fd)) <= floor) continue;
    probe.record(relative_error(g, fd), [&] {
      return fmt::format("{} (analytic {:.10g}, finite difference {:.10g})", params.describe(i), g, fd);
    });
  }
  return probe;
}

ErrorProbe check_residual_identity(std::span<const SpacetimePoint> points, const SolutionParams& sp) {
  ErrorProbe probe;
  for (const auto& q : points) {
    const DerivBundle b = analytic_bundle(q, sp);
    const double errs[3] = {std::abs(residual_f(b, sp.eta) - source_ru(q, sp)),
                            std::abs(residual_g(b, sp.eta) - source_rv(q, sp)),
                            std::abs(residual_h(b) - source_rp(q, sp))};
    constexpr const char* names[3] = {"f - r_u", "g - r_v", "h - r_p"};
    for (int k = 0; k < 3; ++k) {
      probe.record(errs[k], [&] { return fmt::format("{} at ({:.6f},{:.6f},{:.6f})", names[k], q.x, q.z, q.t); });
    }
  }
  return probe;
}

GradcheckReport run_gradcheck(const GradcheckPlan& plan, const DerivEvaluator& eval) {
  GradcheckReport report;
  Rng rng(plan.seed);
  auto random_point = [&] {
    const double x = rng.uniform01();
    const double z = rng.uniform01();
    const double t = rng.uniform01();
    return SpacetimePoint{x, z, t};
  };
  auto merge = [](ErrorProbe& into, const ErrorProbe& from) {
    into.compared += from.compared;
    if (into.where.empty() || from.worst > into.worst) {
      into.worst = std::max(into.worst, from.worst);
      into.where = from.where;
    }
  };

  for (std::size_t s = 0; s < plan.derivative_samples; ++s) {
    const MlpParams params = init_params(plan.net, plan.seed + 1 + s);
    const SpacetimePoint q[1] = {random_point()};
    const auto errs = check_input_derivatives(params, q, eval);
    merge(report.jacobian, errs.jacobian);
    merge(report.hessian, errs.hessian);
  }

  for (std::size_t s = 0; s < plan.gradient_batches; ++s) {
    const MlpParams params = init_params(plan.net, plan.seed + 100000 + s);
    std::vector<SpacetimePoint> data_pts, colloc;
    std::vector<FieldValues> targets;
    for (std::size_t i = 0; i < plan.batch_points; ++i) {
      data_pts.push_back(random_point());
      targets.push_back(analytic_solution(data_pts.back(), plan.solution));
      colloc.push_back(random_point());
    }
    merge(report.gradient, check_param_gradient(params, {data_pts, targets}, colloc, plan.solution));
  }

  std::vector<SpacetimePoint> pts;
  for (std::size_t i = 0; i < plan.residual_points; ++i) pts.push_back(random_point());
  report.residual = check_residual_identity(pts, plan.solution);
  return report;
}

}  // namespace poropinn

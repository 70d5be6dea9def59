#include "poropinn/net_core.hpp"

#include <cmath>

#include <fmt/format.h>

#include "poropinn/errors.hpp"
#include "poropinn/random.hpp"

namespace poropinn {

namespace {

// Each hidden unit carries a small vector of "channels": the value, the three
// first input derivatives and the six unique second derivatives.
//   [0]       value
//   [1..3]    d/dx, d/dz, d/dt
//   [4..9]    xx, xz, xt, zz, zt, tt
constexpr std::array<std::array<int, 2>, 6> kPairs{{{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}}};

int channel_count(DerivOrder order) {
  switch (order) {
    case DerivOrder::kValue:
      return 1;
    case DerivOrder::kFirst:
      return 4;
    case DerivOrder::kSecond:
      return 10;
  }
  return 1;
}

bool is_hidden(std::size_t layer, std::size_t layer_count) { return layer + 1 < layer_count; }

// Per-point storage of pre-activations (every layer) and post-activations
// (hidden layers only), each laid out [unit][channel].
class Tape {
 public:
  Tape(const MlpParams& params, int channels) : channels_(channels) {
    std::size_t offset = 0;
    const std::size_t n = params.layer_count();
    for (std::size_t l = 0; l < n; ++l) {
      const std::size_t width = params.shape(l).rows * channels;
      pre_offset_.push_back(offset);
      offset += width;
      post_offset_.push_back(offset);
      if (is_hidden(l, n)) offset += width;
    }
    per_point_ = offset;
  }

  std::size_t per_point() const { return per_point_; }
  int channels() const { return channels_; }
  std::size_t pre(std::size_t layer) const { return pre_offset_[layer]; }
  std::size_t post(std::size_t layer) const { return post_offset_[layer]; }

 private:
  int channels_;
  std::size_t per_point_ = 0;
  std::vector<std::size_t> pre_offset_;
  std::vector<std::size_t> post_offset_;
};

void check_finite_input(std::span<const double> input) {
  for (double v : input) {
    if (!std::isfinite(v)) throw InputError("non-finite network input");
  }
}

// Input channels: value x_j, Jacobian row e_j, zero Hessian.
void seed_input(std::span<const double> input, int channels, std::vector<double>& out) {
  out.assign(input.size() * channels, 0.0);
  for (std::size_t j = 0; j < input.size(); ++j) {
    out[j * channels] = input[j];
    if (channels > 1) out[j * channels + 1 + j] = 1.0;
  }
}

void affine_forward(const MlpParams& params, std::size_t layer, const double* in, int channels,
                    double* out) {
  const auto& s = params.shape(layer);
  for (std::size_t i = 0; i < s.rows; ++i) {
    double* row = out + i * channels;
    row[0] = params.bias(layer, i);
    for (int c = 1; c < channels; ++c) row[c] = 0.0;
    for (std::size_t k = 0; k < s.cols; ++k) {
      const double w = params.weight(layer, i, k);
      const double* src = in + k * channels;
      for (int c = 0; c < channels; ++c) row[c] += w * src[c];
    }
  }
}

// h = tanh(a) lifted to (value, Jacobian, Hessian) with s = tanh(a), d = 1 - s^2:
//   J_h = d J_a,   H_h = d H_a - 2 s d (J_a outer J_a).
void tanh_forward(const double* pre, int channels, std::size_t units, double* post) {
  for (std::size_t i = 0; i < units; ++i) {
    const double* a = pre + i * channels;
    double* h = post + i * channels;
    const double s = std::tanh(a[0]);
    const double d = 1.0 - s * s;
    h[0] = s;
    if (channels >= 4) {
      for (int c = 0; c < 3; ++c) h[1 + c] = d * a[1 + c];
    }
    if (channels == 10) {
      const double g = 2.0 * s * d;
      for (int q = 0; q < 6; ++q) {
        const auto [c, e] = kPairs[q];
        h[4 + q] = d * a[4 + q] - g * (a[1 + c] * a[1 + e]);
      }
    }
  }
}

// Adjoint of tanh_forward for one layer: hbar (post adjoints) -> abar.
void tanh_backward(const double* pre, const double* post, const double* hbar, int channels,
                   std::size_t units, double* abar) {
  for (std::size_t i = 0; i < units; ++i) {
    const double* a = pre + i * channels;
    const double* hb = hbar + i * channels;
    double* ab = abar + i * channels;
    const double s = post[i * channels];
    const double d = 1.0 - s * s;
    double sbar = hb[0];
    double dbar = 0.0;
    if (channels >= 4) {
      for (int c = 0; c < 3; ++c) {
        ab[1 + c] = d * hb[1 + c];
        dbar += hb[1 + c] * a[1 + c];
      }
    }
    if (channels == 10) {
      const double g = 2.0 * s * d;
      double gbar = 0.0;
      for (int q = 0; q < 6; ++q) {
        const auto [c, e] = kPairs[q];
        const double hq = hb[4 + q];
        ab[4 + q] = d * hq;
        dbar += hq * a[4 + q];
        gbar -= hq * (a[1 + c] * a[1 + e]);
        ab[1 + c] -= g * hq * a[1 + e];
        ab[1 + e] -= g * hq * a[1 + c];
      }
      sbar += gbar * 2.0 * d;
      dbar += gbar * 2.0 * s;
    }
    sbar -= dbar * 2.0 * s;
    ab[0] = sbar * d;
  }
}

// Runs one point forward, filling its tape slot.
void run_forward(const MlpParams& params, const Tape& tape, std::span<const double> input,
                 std::vector<double>& scratch, double* slot) {
  const int channels = tape.channels();
  seed_input(input, channels, scratch);
  const std::size_t n = params.layer_count();
  const double* in = scratch.data();
  for (std::size_t l = 0; l < n; ++l) {
    double* pre = slot + tape.pre(l);
    affine_forward(params, l, in, channels, pre);
    if (is_hidden(l, n)) {
      double* post = slot + tape.post(l);
      tanh_forward(pre, channels, params.shape(l).rows, post);
      in = post;
    } else {
      in = pre;
    }
  }
}

const double* output_channels(const MlpParams& params, const Tape& tape, const double* slot) {
  return slot + tape.pre(params.layer_count() - 1);
}

void unpack_bundle(const double* out, int channels, DerivBundle& b) {
  for (int i = 0; i < 3; ++i) {
    const double* row = out + i * channels;
    b.value[i] = row[0];
    if (channels >= 4) {
      for (int c = 0; c < 3; ++c) b.jacobian[i][c] = row[1 + c];
    }
    if (channels == 10) {
      for (int q = 0; q < 6; ++q) {
        const auto [c, e] = kPairs[q];
        b.hessians[i][c][e] = row[4 + q];
        b.hessians[i][e][c] = row[4 + q];
      }
    }
  }
}

// Symmetric Hessian entries share one channel, so both adjoints fold into it.
void pack_seed(const DerivBundle& seed, int channels, double* out) {
  for (int i = 0; i < 3; ++i) {
    double* row = out + i * channels;
    row[0] = seed.value[i];
    if (channels >= 4) {
      for (int c = 0; c < 3; ++c) row[1 + c] = seed.jacobian[i][c];
    }
    if (channels == 10) {
      for (int q = 0; q < 6; ++q) {
        const auto [c, e] = kPairs[q];
        const auto& h = seed.hessians[i];
        row[4 + q] = c == e ? h[c][c] : h[c][e] + h[e][c];
      }
    }
  }
}

void run_backward(const MlpParams& params, const Tape& tape, std::span<const double> input,
                  const double* slot, const double* out_seed, std::vector<double>& input_scratch,
                  std::vector<double>& abar, std::vector<double>& hbar, ParamGradient& grad) {
  const int channels = tape.channels();
  const std::size_t n = params.layer_count();
  const std::size_t out_width = params.shape(n - 1).rows * channels;
  abar.assign(out_seed, out_seed + out_width);
  seed_input(input, channels, input_scratch);

  for (std::size_t l = n; l-- > 0;) {
    const auto& s = params.shape(l);
    const double* in = l == 0 ? input_scratch.data() : slot + tape.post(l - 1);
    for (std::size_t i = 0; i < s.rows; ++i) {
      const double* ab = abar.data() + i * channels;
      grad.bias(l, i) += ab[0];
      for (std::size_t k = 0; k < s.cols; ++k) {
        const double* src = in + k * channels;
        double acc = 0.0;
        for (int c = 0; c < channels; ++c) acc += ab[c] * src[c];
        grad.weight(l, i, k) += acc;
      }
    }
    if (l == 0) break;

    hbar.assign(s.cols * channels, 0.0);
    for (std::size_t i = 0; i < s.rows; ++i) {
      const double* ab = abar.data() + i * channels;
      for (std::size_t k = 0; k < s.cols; ++k) {
        const double w = params.weight(l, i, k);
        double* dst = hbar.data() + k * channels;
        for (int c = 0; c < channels; ++c) dst[c] += w * ab[c];
      }
    }
    abar.assign(s.cols * channels, 0.0);
    tanh_backward(slot + tape.pre(l - 1), slot + tape.post(l - 1), hbar.data(), channels, s.cols,
                  abar.data());
  }
}

void require_poroelastic_shape(const MlpParams& params) {
  const auto& spec = params.spec();
  if (spec.input_dim != 3 || spec.output_dim != 3) {
    throw DimensionError(
        fmt::format("derivative bundles need a 3-input, 3-output network (got {} -> {})",
                    spec.input_dim, spec.output_dim));
  }
}

std::array<double, 3> as_array(const SpacetimePoint& p) { return {p.x, p.z, p.t}; }

}  // namespace

void validate(const LayerSpec& spec) {
  if (spec.input_dim < 1 || spec.output_dim < 1) {
    throw DimensionError("input_dim and output_dim must be positive");
  }
  if (spec.hidden_layers < 0) throw DimensionError("hidden_layers must be non-negative");
  if (spec.hidden_layers > 0 && spec.hidden_units < 1) {
    throw DimensionError("hidden_units must be positive");
  }
  if (spec.hidden_activation != Activation::kTanh || spec.output_activation != Activation::kLinear) {
    throw DimensionError("only tanh hidden layers with a linear output layer are supported");
  }
}

std::vector<LayerShape> layer_shapes(const LayerSpec& spec) {
  validate(spec);
  std::vector<LayerShape> shapes;
  std::size_t offset = 0;
  std::size_t in = static_cast<std::size_t>(spec.input_dim);
  for (int l = 0; l <= spec.hidden_layers; ++l) {
    const bool last = l == spec.hidden_layers;
    const std::size_t out = static_cast<std::size_t>(last ? spec.output_dim : spec.hidden_units);
    LayerShape s{out, in, offset, offset + out * in};
    offset = s.bias_offset + out;
    shapes.push_back(s);
    in = out;
  }
  return shapes;
}

ParamBlocks::ParamBlocks(const LayerSpec& spec) : spec_(spec), shapes_(layer_shapes(spec)) {
  const auto& last = shapes_.back();
  values_.assign(last.bias_offset + last.rows, 0.0);
}

std::string ParamBlocks::describe(std::size_t flat_index) const {
  for (std::size_t l = 0; l < shapes_.size(); ++l) {
    const auto& s = shapes_[l];
    if (flat_index < s.bias_offset) {
      const std::size_t local = flat_index - s.weight_offset;
      return fmt::format("layer {} weight[{}][{}]", l, local / s.cols, local % s.cols);
    }
    if (flat_index < s.bias_offset + s.rows) {
      return fmt::format("layer {} bias[{}]", l, flat_index - s.bias_offset);
    }
  }
  return fmt::format("index {} out of range", flat_index);
}

MlpParams init_params(const LayerSpec& spec, std::uint64_t seed) {
  MlpParams params(spec);
  Rng rng(seed);
  for (std::size_t l = 0; l < params.layer_count(); ++l) {
    const auto& s = params.shape(l);
    const double bound = std::sqrt(6.0 / static_cast<double>(s.rows + s.cols));
    for (std::size_t i = 0; i < s.rows; ++i) {
      for (std::size_t k = 0; k < s.cols; ++k) params.weight(l, i, k) = rng.uniform(-bound, bound);
    }
  }
  return params;
}

std::vector<double> forward(const MlpParams& params, std::span<const double> input) {
  if (input.size() != static_cast<std::size_t>(params.spec().input_dim)) {
    throw DimensionError(fmt::format("expected {} inputs, got {}", params.spec().input_dim,
                                     input.size()));
  }
  check_finite_input(input);
  const Tape tape(params, 1);
  std::vector<double> slot(tape.per_point());
  std::vector<double> scratch;
  run_forward(params, tape, input, scratch, slot.data());
  const double* out = output_channels(params, tape, slot.data());
  return {out, out + params.spec().output_dim};
}

FieldValues forward(const MlpParams& params, const SpacetimePoint& point) {
  require_poroelastic_shape(params);
  const auto in = as_array(point);
  const auto out = forward(params, std::span<const double>(in));
  return {out[0], out[1], out[2]};
}

DerivBundle forward_with_derivs(const MlpParams& params, const SpacetimePoint& point) {
  const SpacetimePoint one[1] = {point};
  return evaluate(params, EvalGroup{one, DerivOrder::kSecond}).front();
}

std::vector<DerivBundle> evaluate(const MlpParams& params, const EvalGroup& group) {
  require_poroelastic_shape(params);
  const int channels = channel_count(group.order);
  const Tape tape(params, channels);
  std::vector<double> slot(tape.per_point());
  std::vector<double> scratch;
  std::vector<DerivBundle> bundles(group.points.size());
  for (std::size_t p = 0; p < group.points.size(); ++p) {
    const auto in = as_array(group.points[p]);
    check_finite_input(in);
    run_forward(params, tape, in, scratch, slot.data());
    bundles[p].point = group.points[p];
    unpack_bundle(output_channels(params, tape, slot.data()), channels, bundles[p]);
  }
  return bundles;
}

ValueAndGradient grad_scalar(const MlpParams& params, std::span<const EvalGroup> groups,
                             const BundleObjective& objective) {
  require_poroelastic_shape(params);

  std::vector<Tape> tapes;
  std::vector<std::vector<double>> slots(groups.size());
  std::vector<std::vector<DerivBundle>> bundles(groups.size());
  std::vector<double> scratch;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& group = groups[g];
    tapes.emplace_back(params, channel_count(group.order));
    const Tape& tape = tapes.back();
    slots[g].resize(tape.per_point() * group.points.size());
    bundles[g].resize(group.points.size());
    for (std::size_t p = 0; p < group.points.size(); ++p) {
      const auto in = as_array(group.points[p]);
      check_finite_input(in);
      double* slot = slots[g].data() + p * tape.per_point();
      run_forward(params, tape, in, scratch, slot);
      bundles[g][p].point = group.points[p];
      unpack_bundle(output_channels(params, tape, slot), tape.channels(), bundles[g][p]);
    }
  }

  std::vector<std::vector<DerivBundle>> seeds(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) seeds[g].resize(bundles[g].size());

  ValueAndGradient result{objective(bundles, seeds), ParamGradient(params.spec())};
  if (!std::isfinite(result.value)) throw NumericError("objective value is not finite");

  std::vector<double> out_seed, abar, hbar;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const Tape& tape = tapes[g];
    out_seed.resize(3 * static_cast<std::size_t>(tape.channels()));
    for (std::size_t p = 0; p < bundles[g].size(); ++p) {
      pack_seed(seeds[g][p], tape.channels(), out_seed.data());
      const auto in = as_array(groups[g].points[p]);
      run_backward(params, tape, in, slots[g].data() + p * tape.per_point(), out_seed.data(),
                   scratch, abar, hbar, result.gradient);
    }
  }

  const auto values = result.gradient.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw NumericError("non-finite gradient in " + result.gradient.describe(i));
    }
  }
  return result;
}

}  // namespace poropinn

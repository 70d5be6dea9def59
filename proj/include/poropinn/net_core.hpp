#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace poropinn {

// Input and output coordinates of the poroelastic network.
enum Axis : int { kX = 0, kZ = 1, kT = 2 };
enum Field : int { kU = 0, kV = 1, kP = 2 };

struct SpacetimePoint {
  double x = 0.0;
  double z = 0.0;
  double t = 0.0;

  double operator[](int axis) const { return axis == kX ? x : (axis == kZ ? z : t); }
  bool operator==(const SpacetimePoint&) const = default;
};

struct FieldValues {
  double u = 0.0;
  double v = 0.0;
  double p = 0.0;

  double operator[](int field) const { return field == kU ? u : (field == kV ? v : p); }
  bool operator==(const FieldValues&) const = default;
};

enum class Activation { kTanh, kLinear };

struct LayerSpec {
  int input_dim = 3;
  int hidden_layers = 5;
  int hidden_units = 20;
  int output_dim = 3;
  Activation hidden_activation = Activation::kTanh;
  Activation output_activation = Activation::kLinear;

  bool operator==(const LayerSpec&) const = default;
};

/// Throws DimensionError unless the layer description is buildable.
/// Zero hidden layers (a single affine map) is accepted here; front ends
/// that need a real hidden stack check for it themselves.
void validate(const LayerSpec& spec);

/// Location of one affine layer inside the flat parameter vector. Weights are
/// stored row-major (rows = layer output width).
struct LayerShape {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t weight_offset = 0;
  std::size_t bias_offset = 0;

  bool operator==(const LayerShape&) const = default;
};

std::vector<LayerShape> layer_shapes(const LayerSpec& spec);

/// Flat storage shared by parameters, gradients and optimizer moments. All
/// per-layer accessors index into one contiguous vector so elementwise
/// updates stay trivial.
class ParamBlocks {
 public:
  ParamBlocks() = default;
  explicit ParamBlocks(const LayerSpec& spec);

  const LayerSpec& spec() const { return spec_; }
  std::size_t layer_count() const { return shapes_.size(); }
  const LayerShape& shape(std::size_t layer) const { return shapes_[layer]; }

  double weight(std::size_t layer, std::size_t row, std::size_t col) const {
    const auto& s = shapes_[layer];
    return values_[s.weight_offset + row * s.cols + col];
  }
  double& weight(std::size_t layer, std::size_t row, std::size_t col) {
    const auto& s = shapes_[layer];
    return values_[s.weight_offset + row * s.cols + col];
  }
  double bias(std::size_t layer, std::size_t row) const {
    return values_[shapes_[layer].bias_offset + row];
  }
  double& bias(std::size_t layer, std::size_t row) { return values_[shapes_[layer].bias_offset + row]; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  std::size_t size() const { return values_.size(); }

  /// Human-readable location of a flat index, e.g. "layer 2 weight[3][4]".
  std::string describe(std::size_t flat_index) const;

  bool same_shape(const ParamBlocks& other) const { return spec_ == other.spec_; }
  bool operator==(const ParamBlocks& other) const = default;

 private:
  LayerSpec spec_;
  std::vector<LayerShape> shapes_;
  std::vector<double> values_;
};

class MlpParams : public ParamBlocks {
 public:
  using ParamBlocks::ParamBlocks;
};

class ParamGradient : public ParamBlocks {
 public:
  using ParamBlocks::ParamBlocks;
};

using Mat3 = std::array<std::array<double, 3>, 3>;

/// Network value with its exact input Jacobian and input Hessians.
/// jacobian[i][j] = d(out i)/d(in j); hessians[i][j][k] = d2(out i)/d(in j)d(in k).
struct DerivBundle {
  SpacetimePoint point;
  std::array<double, 3> value{};
  Mat3 jacobian{};
  std::array<Mat3, 3> hessians{};

  FieldValues fields() const { return {value[kU], value[kV], value[kP]}; }
};

/// Glorot-uniform weights, zero biases; a pure function of (spec, seed).
MlpParams init_params(const LayerSpec& spec, std::uint64_t seed);

/// Plain feed-forward evaluation for any input/output width.
std::vector<double> forward(const MlpParams& params, std::span<const double> input);

FieldValues forward(const MlpParams& params, const SpacetimePoint& point);

DerivBundle forward_with_derivs(const MlpParams& params, const SpacetimePoint& point);

/// How much of the derivative bundle an evaluation group needs. Data points
/// only need values; collocation points need the full second-order bundle.
enum class DerivOrder { kValue, kFirst, kSecond };

struct EvalGroup {
  std::span<const SpacetimePoint> points;
  DerivOrder order = DerivOrder::kValue;
};

/// Batched evaluation through the same kernel grad_scalar uses, so values
/// computed here are bit-identical to the ones seen by an objective.
std::vector<DerivBundle> evaluate(const MlpParams& params, const EvalGroup& group);

/// An objective over evaluated bundles. It receives one bundle vector per
/// group, returns the scalar, and fills `seeds` (same layout, pre-zeroed) with
/// d(objective)/d(bundle entry). Only entries valid for the group's order are
/// read back.
using BundleObjective = std::function<double(std::span<const std::vector<DerivBundle>> bundles,
                                             std::span<std::vector<DerivBundle>> seeds)>;

struct ValueAndGradient {
  double value = 0.0;
  ParamGradient gradient;
};

/// Exact reverse-mode gradient of `objective` with respect to every weight and
/// bias, propagating adjoints through the Jacobian/Hessian recurrences.
/// Throws NumericError naming the parameter block on a non-finite result.
ValueAndGradient grad_scalar(const MlpParams& params, std::span<const EvalGroup> groups,
                             const BundleObjective& objective);

}  // namespace poropinn

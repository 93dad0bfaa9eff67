#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gcspn/grid.hpp"
#include "gcspn/propagation.hpp"

namespace gcspn {

enum class LossKind : std::uint8_t { l1, smooth_l1, l2 };

LossKind loss_kind_from_string(std::string_view name);
std::string_view to_string(LossKind kind);

/// Loss breakdown for one forward pass: total = main + weight * sum(aux).
struct LossReport {
  double total{0.0};
  double main{0.0};
  std::vector<double> auxiliary;
  std::size_t valid_count{0};
};

struct TrainConfig {
  std::size_t epochs{40};
  double learning_rate{2e-3};
  double aux_weight{0.1};
  LossKind loss{LossKind::l1};
  std::uint64_t seed{1};

  void validate() const;
};

/// Mean absolute error over pixels with positive ground truth.
double masked_l1(const DepthGrid& pred, const DepthGrid& gt);

/// Masked loss of the requested kind (smooth-l1 is quadratic below unit
/// error and linear above; l2 is the mean squared error).
double masked_loss(const DepthGrid& pred, const DepthGrid& gt, LossKind kind);

LossReport loss_with_auxiliary(const DepthGrid& final_depth,
                               std::span<const DepthGrid> intermediates,
                               const DepthGrid& gt, double weight,
                               LossKind kind);

/// Inverse-distance-weighted fill of the sparse map (power 2, 32 nearest
/// valid sites, exact at valid pixels). Parameter-free.
DepthGrid idw_fill(const DepthGrid& sparse);

struct InitializerResult {
  DepthGrid initial_depth;
  FeatureGrid features;  // channel c = fill + conv_c([fill, mask, guidance])
};

/// Produces the initial depth and the residual feature channels consumed by
/// graph construction. `gray` may be null; its channel is then zero.
InitializerResult initializer_forward(const DepthGrid& sparse,
                                      const DepthGrid* gray,
                                      const PropagationParams& params,
                                      ConvCache* cache = nullptr);

/// Named flat views over every learnable tensor and its gradient buffer.
/// The store does not own memory; it indexes a PropagationParams pair.
class ParamStore {
 public:
  struct TensorRef {
    std::string name;
    std::size_t rows{0};
    std::size_t cols{0};  // 1 for vectors
    double* value{nullptr};
    double* grad{nullptr};
    std::size_t size{0};
  };

  static ParamStore bind(PropagationParams& params, PropagationParams& grads);

  std::span<const TensorRef> tensors() const { return refs_; }
  const TensorRef& at(std::string_view name) const;
  std::size_t total_size() const;
  void zero_grads();
  bool values_finite() const;

 private:
  std::vector<TensorRef> refs_;
};

/// Adaptive-moment state (beta1 0.9, beta2 0.999, eps 1e-8) with bias
/// correction; lazily sized to the store on the first step.
struct AdamState {
  double beta1{0.9};
  double beta2{0.999};
  double eps{1e-8};
  std::size_t t{0};
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
};

/// One optimizer step over every tensor; gradients are cleared afterwards
/// and the updated values are checked to stay finite.
void sgd_adam_step(ParamStore& store, AdamState& state, double lr);

/// Zero-valued parameter set with the standard shapes for the given patch
/// size (hidden width 64, conv hidden width 8, C = patch_h*patch_w).
PropagationParams make_params(std::size_t patch_h, std::size_t patch_w,
                              std::size_t hidden = 64,
                              std::size_t conv_hidden = 8);

/// Re-draws every tensor uniformly from +-1/sqrt(fan_in) with the run seed.
void init_params(PropagationParams& params, std::uint64_t seed);

/// Recorded forward pass of initializer + propagation + loss.
struct PipelineTrace {
  ConvCache conv;
  PropagationTrace prop;
  DepthGrid initial_depth;
  bool recorded{false};
};

struct PipelineResult {
  DepthGrid initial_depth;
  DepthGrid depth;
  LossReport loss;
};

PipelineResult pipeline_forward(const DepthGrid& sparse, const DepthGrid* gray,
                                const DepthGrid& gt,
                                const CameraIntrinsics& intr,
                                const PropagationParams& params,
                                const PropagationConfig& config, LossKind kind,
                                double aux_weight,
                                PipelineTrace* trace = nullptr);

/// Reverse pass over a recorded forward; accumulates exact gradients of the
/// total loss into `grads`. Positions and neighbor selection are constants.
void pipeline_backward(const PipelineTrace& trace, const DepthGrid& gt,
                       const PropagationParams& params,
                       const PropagationConfig& config, LossKind kind,
                       double aux_weight, PropagationParams& grads);

struct SceneSample {
  std::string name;
  DepthGrid gt;
  DepthGrid gray;
  DepthGrid sparse;
};

struct EpochLoss {
  double total{0.0};
  double main{0.0};
  double aux{0.0};
};

struct TrainResult {
  PropagationParams params;
  std::vector<EpochLoss> log;
};

/// Deterministic training: seeded init, seeded shuffling, one adaptive step
/// per scene visit.
TrainResult train(const std::vector<SceneSample>& scenes,
                  const TrainConfig& config, const PropagationConfig& prop,
                  const CameraIntrinsics& intr);

/// Finite-difference verification of the analytic gradients on one scene.
struct GradCheckReport {
  struct Group {
    std::string name;
    double max_rel_err{0.0};
  };
  std::vector<Group> groups;
  double max_rel_err{0.0};
  double tolerance{0.0};
  bool pass{false};
};

GradCheckReport gradient_check(const DepthGrid& sparse, const DepthGrid* gray,
                               const DepthGrid& gt,
                               const CameraIntrinsics& intr,
                               PropagationParams& params,
                               const PropagationConfig& config, LossKind kind,
                               double aux_weight, double step = 1e-4,
                               double tolerance = 1e-4,
                               bool corrupt = false);

}  // namespace gcspn

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "gcspn/graph.hpp"
#include "gcspn/grid.hpp"
#include "gcspn/nn.hpp"

namespace gcspn {

/// Per-pixel 3x3 affinity kernels: channel c = (di+1)*3 + (dj+1) holds the
/// weight of the neighbor at offset (di, dj); channel 4 is the self weight.
struct AffinityKernelField {
  std::size_t height{0};
  std::size_t width{0};
  std::vector<double> weights;  // (y*width + x)*9 + c

  static constexpr std::size_t kSelf = 4;

  double at(std::size_t y, std::size_t x, std::size_t c) const {
    return weights[(y * width + x) * 9 + c];
  }

  /// Absolute-sum normalization of the eight neighbor weights with the self
  /// weight set to the residual, so every pixel's kernel sums to 1.
  AffinityKernelField normalized() const;
};

/// One fixed-kernel propagation sweep: each depth becomes the affinity
/// weighted combination of itself and its 3x3 neighbors. Weights of
/// out-of-range neighbors fold into the self weight.
DepthGrid cspn_step(const DepthGrid& depth, const AffinityKernelField& kern);

struct PropagationConfig {
  std::size_t steps{3};
  std::size_t k{8};
  std::size_t patch_h{4};
  std::size_t patch_w{4};
  double pos_scale{10.0};
  bool reimpose_sparse{false};
  bool record_intermediate{false};
  // Ablation toggles.
  bool use_attention{true};   // off: uniform mean aggregation
  bool use_geometry{true};    // off: neighbor search in patch-feature space
  bool dynamic_topology{true};// off: topology frozen after the first step

  void validate() const;
};

/// Learnable state of the propagation operator plus the feature initializer.
struct PropagationParams {
  MlpSpec phi_self;      // L -> P_h*P_w
  MlpSpec phi_nbr;       // 2L -> P_h*P_w
  MlpSpec psi;           // 2L -> P_h*P_w (per-channel attention logits)
  ConvStack initializer; // residual feature channels on top of the fill
};

/// Softmax-normalized attention coefficients. For node i the (k+1) rows
/// follow the neighbor-table order with the self coefficient last; each
/// channel column sums to 1.
class AttentionTensor {
 public:
  AttentionTensor() = default;
  AttentionTensor(std::size_t n_nodes, std::size_t k, std::size_t channels)
      : n_nodes_(n_nodes),
        k_(k),
        channels_(channels),
        coeff_((k + 1) * n_nodes * channels, 0.0) {}

  static AttentionTensor uniform(std::size_t n_nodes, std::size_t k,
                                 std::size_t channels);

  std::size_t n_nodes() const { return n_nodes_; }
  std::size_t k() const { return k_; }
  std::size_t channels() const { return channels_; }
  std::size_t self_row() const { return k_; }

  double at(std::size_t node, std::size_t row, std::size_t channel) const {
    return coeff_[(node * (k_ + 1) + row) * channels_ + channel];
  }
  double& at(std::size_t node, std::size_t row, std::size_t channel) {
    return coeff_[(node * (k_ + 1) + row) * channels_ + channel];
  }

  /// Largest deviation of any channel column sum from 1 (test hook).
  double max_normalization_error() const;

 private:
  std::size_t n_nodes_{0};
  std::size_t k_{0};
  std::size_t channels_{0};
  std::vector<double> coeff_;
};

/// Forward state recorded for one propagation step so the training module
/// can run the exact reverse pass.
struct StepCache {
  Eigen::MatrixXd node_in;  // N x L features entering the step
  NeighborTable topology;
  AttentionTensor alpha;
  std::vector<MlpCache> psi;       // N*(k+1), index i*(k+1)+row, self last
  std::vector<MlpCache> phi_nbr;   // N*k, index i*k + table row
  std::vector<MlpCache> phi_self;  // N
  Eigen::MatrixXd f_self;          // N x P: phi_self outputs
  Eigen::MatrixXd g_nbr;           // (N*k) x P: phi_nbr outputs
  Eigen::MatrixXd new_patch;       // N x P: aggregation output
  Eigen::MatrixXd node_state;      // N x P: after sparse re-imposition
  std::vector<std::uint8_t> reimposed;  // N*P overwrite flags
};

struct PropagationTrace {
  PatchLayout layout;
  std::vector<StepCache> steps;
  std::vector<DepthGrid> step_depths;  // scatter after each step
};

/// Channel-wise softmax over psi(x_i || x_j) logits for j in neighbors + self,
/// max-subtracted for stability. psi must map 2L -> P_h*P_w.
AttentionTensor attention_coefficients(const PatchGraph& graph, const MlpSpec& psi,
                                       std::vector<MlpCache>* caches = nullptr);

/// One edge-attention aggregation (attention coefficients included):
/// x_i' = a_ii * phi_self(x_i) + sum_j a_ij * phi_nbr(x_i || (x_j - x_i)),
/// products taken channel-wise. Returns the new N x (P_h*P_w) patch part.
Eigen::MatrixXd edge_attention_step(const PatchGraph& graph,
                                    const MlpSpec& phi_self,
                                    const MlpSpec& phi_nbr, const MlpSpec& psi,
                                    StepCache* cache = nullptr);

struct PropagateResult {
  DepthGrid depth;
  std::vector<DepthGrid> intermediates;  // filled iff record_intermediate
};

/// Runs the full propagation operator: gather the feature patches, embed
/// 3D positions from the initial depth, then for each step rebuild the
/// topology, aggregate, optionally re-impose sparse observations and
/// re-embed positions. The final depth is the scatter of the last state.
PropagateResult propagate(const DepthGrid& initial_depth,
                          const FeatureGrid& features, const DepthGrid& sparse,
                          const CameraIntrinsics& intr,
                          const PropagationParams& params,
                          const PropagationConfig& config,
                          PropagationTrace* trace = nullptr);

}  // namespace gcspn

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "gcspn/rng.hpp"

namespace gcspn {

enum class Activation : std::uint8_t { relu, identity };

/// Fully-connected network. weights[l] maps layer l to l+1; the activation is
/// applied after every layer except the last. Tests may build single-layer
/// specs for exact linear maps.
struct MlpSpec {
  std::vector<Eigen::MatrixXd> weights;  // (out x in) per layer
  std::vector<Eigen::VectorXd> biases;
  Activation activation{Activation::relu};

  std::size_t input_width() const {
    return static_cast<std::size_t>(weights.front().cols());
  }
  std::size_t output_width() const {
    return static_cast<std::size_t>(weights.back().rows());
  }
  void validate() const;
};

/// Forward activations recorded for one MLP application.
struct MlpCache {
  Eigen::VectorXd input;
  std::vector<Eigen::VectorXd> pre;  // pre-activation of every layer
};

/// Zero-weight spec with the given layer widths.
MlpSpec make_mlp(const std::vector<std::size_t>& widths, Activation act);

/// Spec with weights and biases drawn uniformly from +-1/sqrt(fan_in).
MlpSpec make_mlp_random(const std::vector<std::size_t>& widths, Activation act,
                        Rng& rng);

Eigen::VectorXd mlp_forward(const MlpSpec& mlp, const Eigen::VectorXd& x,
                            MlpCache* cache = nullptr);

/// Accumulates parameter gradients for one recorded application and returns
/// the gradient with respect to the input.
Eigen::VectorXd mlp_backward(const MlpSpec& mlp, const MlpCache& cache,
                             const Eigen::VectorXd& d_out, MlpSpec& grad);

/// Two 3x3 convolution layers with replicate padding and a ReLU hidden
/// layer. Weight rows are per output channel; columns pack (in_channel, tap)
/// with taps in row-major 3x3 order.
struct ConvStack {
  Eigen::MatrixXd w1;  // hidden x (in*9)
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;  // out x (hidden*9)
  Eigen::VectorXd b2;

  std::size_t in_channels() const { return static_cast<std::size_t>(w1.cols()) / 9; }
  std::size_t hidden_channels() const { return static_cast<std::size_t>(w1.rows()); }
  std::size_t out_channels() const { return static_cast<std::size_t>(w2.rows()); }
};

struct ConvCache {
  std::vector<Eigen::MatrixXd> input;       // in channel planes (H x W)
  std::vector<Eigen::MatrixXd> hidden_pre;  // hidden planes before ReLU
};

ConvStack make_conv_stack(std::size_t in_channels, std::size_t hidden_channels,
                          std::size_t out_channels);
ConvStack make_conv_stack_random(std::size_t in_channels,
                                 std::size_t hidden_channels,
                                 std::size_t out_channels, Rng& rng);

std::vector<Eigen::MatrixXd> conv_stack_forward(
    const ConvStack& stack, const std::vector<Eigen::MatrixXd>& input,
    ConvCache* cache = nullptr);

/// Accumulates weight gradients from the output gradient planes. Gradients
/// with respect to the stack input are not produced; the pipeline treats the
/// input planes as data.
void conv_stack_backward(const ConvStack& stack, const ConvCache& cache,
                         const std::vector<Eigen::MatrixXd>& d_out,
                         ConvStack& grad);

}  // namespace gcspn

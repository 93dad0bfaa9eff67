#include "gcspn/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace gcspn {

void MlpSpec::validate() const {
  if (weights.empty() || weights.size() != biases.size()) {
    throw std::invalid_argument("mlp: layer lists are empty or mismatched");
  }
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].rows() != biases[l].size()) {
      throw std::invalid_argument("mlp: bias width mismatch");
    }
    if (l + 1 < weights.size() && weights[l].rows() != weights[l + 1].cols()) {
      throw std::invalid_argument("mlp: consecutive layer widths incompatible");
    }
    if (!weights[l].allFinite() || !biases[l].allFinite()) {
      throw std::invalid_argument("mlp: non-finite parameters");
    }
  }
}

MlpSpec make_mlp(const std::vector<std::size_t>& widths, Activation act) {
  if (widths.size() < 2) {
    throw std::invalid_argument("mlp: need at least input and output widths");
  }
  MlpSpec mlp;
  mlp.activation = act;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    mlp.weights.emplace_back(Eigen::MatrixXd::Zero(widths[l + 1], widths[l]));
    mlp.biases.emplace_back(Eigen::VectorXd::Zero(widths[l + 1]));
  }
  return mlp;
}

MlpSpec make_mlp_random(const std::vector<std::size_t>& widths, Activation act,
                        Rng& rng) {
  MlpSpec mlp = make_mlp(widths, act);
  for (std::size_t l = 0; l < mlp.weights.size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(mlp.weights[l].cols()));
    for (Eigen::Index r = 0; r < mlp.weights[l].rows(); ++r) {
      for (Eigen::Index c = 0; c < mlp.weights[l].cols(); ++c) {
        mlp.weights[l](r, c) = rng.uniform(-bound, bound);
      }
    }
    for (Eigen::Index r = 0; r < mlp.biases[l].size(); ++r) {
      mlp.biases[l](r) = rng.uniform(-bound, bound);
    }
  }
  return mlp;
}

namespace {

inline double act_forward(Activation act, double z) {
  return act == Activation::relu ? (z > 0.0 ? z : 0.0) : z;
}

inline double act_grad(Activation act, double z) {
  return act == Activation::relu ? (z > 0.0 ? 1.0 : 0.0) : 1.0;
}

}  // namespace

Eigen::VectorXd mlp_forward(const MlpSpec& mlp, const Eigen::VectorXd& x,
                            MlpCache* cache) {
  if (x.size() != static_cast<Eigen::Index>(mlp.input_width())) {
    throw std::invalid_argument("mlp: input width mismatch");
  }
  if (cache) {
    cache->input = x;
    cache->pre.clear();
    cache->pre.reserve(mlp.weights.size());
  }
  Eigen::VectorXd a = x;
  for (std::size_t l = 0; l < mlp.weights.size(); ++l) {
    Eigen::VectorXd z = mlp.weights[l] * a + mlp.biases[l];
    if (cache) cache->pre.push_back(z);
    if (l + 1 < mlp.weights.size()) {
      a = z.unaryExpr([&](double v) { return act_forward(mlp.activation, v); });
    } else {
      a = std::move(z);
    }
  }
  return a;
}

Eigen::VectorXd mlp_backward(const MlpSpec& mlp, const MlpCache& cache,
                             const Eigen::VectorXd& d_out, MlpSpec& grad) {
  const std::size_t layers = mlp.weights.size();
  Eigen::VectorXd dz = d_out;
  for (std::size_t l = layers; l-- > 0;) {
    if (l + 1 < layers) {
      // dz currently holds the gradient on the activation output.
      dz = dz.cwiseProduct(cache.pre[l].unaryExpr(
          [&](double v) { return act_grad(mlp.activation, v); }));
    }
    const Eigen::VectorXd& a_prev =
        l == 0 ? cache.input
                : cache.pre[l - 1].unaryExpr([&](double v) {
                    return act_forward(mlp.activation, v);
                  }).eval();
    grad.weights[l].noalias() += dz * a_prev.transpose();
    grad.biases[l] += dz;
    if (l > 0) {
      dz = (mlp.weights[l].transpose() * dz).eval();
    } else {
      return mlp.weights[0].transpose() * dz;
    }
  }
  return Eigen::VectorXd::Zero(mlp.input_width());
}

ConvStack make_conv_stack(std::size_t in_channels, std::size_t hidden_channels,
                          std::size_t out_channels) {
  ConvStack s;
  s.w1 = Eigen::MatrixXd::Zero(hidden_channels, in_channels * 9);
  s.b1 = Eigen::VectorXd::Zero(hidden_channels);
  s.w2 = Eigen::MatrixXd::Zero(out_channels, hidden_channels * 9);
  s.b2 = Eigen::VectorXd::Zero(out_channels);
  return s;
}

ConvStack make_conv_stack_random(std::size_t in_channels,
                                 std::size_t hidden_channels,
                                 std::size_t out_channels, Rng& rng) {
  ConvStack s = make_conv_stack(in_channels, hidden_channels, out_channels);
  auto fill = [&rng](Eigen::MatrixXd& w, Eigen::VectorXd& b) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(w.cols()));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-bound, bound);
    }
    for (Eigen::Index r = 0; r < b.size(); ++r) b(r) = rng.uniform(-bound, bound);
  };
  fill(s.w1, s.b1);
  fill(s.w2, s.b2);
  return s;
}

namespace {

inline Eigen::Index clamp_idx(Eigen::Index v, Eigen::Index hi) {
  return v < 0 ? 0 : (v >= hi ? hi - 1 : v);
}

// One 3x3 correlation layer with replicate padding.
std::vector<Eigen::MatrixXd> conv_layer_forward(
    const Eigen::MatrixXd& w, const Eigen::VectorXd& b,
    const std::vector<Eigen::MatrixXd>& input) {
  const std::size_t in_ch = input.size();
  const std::size_t out_ch = static_cast<std::size_t>(w.rows());
  const Eigen::Index h = input[0].rows();
  const Eigen::Index wd = input[0].cols();
  std::vector<Eigen::MatrixXd> out(out_ch, Eigen::MatrixXd::Zero(h, wd));
  for (std::size_t o = 0; o < out_ch; ++o) {
    Eigen::MatrixXd& plane = out[o];
    plane.setConstant(b(o));
    for (std::size_t ci = 0; ci < in_ch; ++ci) {
      for (int ky = 0; ky < 3; ++ky) {
        for (int kx = 0; kx < 3; ++kx) {
          const double wv = w(o, ci * 9 + ky * 3 + kx);
          if (wv == 0.0) continue;
          for (Eigen::Index y = 0; y < h; ++y) {
            const Eigen::Index sy = clamp_idx(y + ky - 1, h);
            for (Eigen::Index x = 0; x < wd; ++x) {
              const Eigen::Index sx = clamp_idx(x + kx - 1, wd);
              plane(y, x) += wv * input[ci](sy, sx);
            }
          }
        }
      }
    }
  }
  return out;
}

}  // namespace

std::vector<Eigen::MatrixXd> conv_stack_forward(
    const ConvStack& stack, const std::vector<Eigen::MatrixXd>& input,
    ConvCache* cache) {
  if (input.size() != stack.in_channels()) {
    throw std::invalid_argument("conv: input channel count mismatch");
  }
  std::vector<Eigen::MatrixXd> hidden_pre =
      conv_layer_forward(stack.w1, stack.b1, input);
  std::vector<Eigen::MatrixXd> hidden(hidden_pre.size());
  for (std::size_t c = 0; c < hidden_pre.size(); ++c) {
    hidden[c] = hidden_pre[c].cwiseMax(0.0);
  }
  if (cache) {
    cache->input = input;
    cache->hidden_pre = hidden_pre;
  }
  return conv_layer_forward(stack.w2, stack.b2, hidden);
}

void conv_stack_backward(const ConvStack& stack, const ConvCache& cache,
                         const std::vector<Eigen::MatrixXd>& d_out,
                         ConvStack& grad) {
  const Eigen::Index h = cache.input[0].rows();
  const Eigen::Index wd = cache.input[0].cols();
  const std::size_t hidden_ch = stack.hidden_channels();

  std::vector<Eigen::MatrixXd> hidden(hidden_ch);
  for (std::size_t c = 0; c < hidden_ch; ++c) {
    hidden[c] = cache.hidden_pre[c].cwiseMax(0.0);
  }

  // Layer 2: weight gradients and the gradient flowing into the hidden maps.
  std::vector<Eigen::MatrixXd> d_hidden(hidden_ch, Eigen::MatrixXd::Zero(h, wd));
  for (std::size_t o = 0; o < stack.out_channels(); ++o) {
    grad.b2(o) += d_out[o].sum();
    for (std::size_t ci = 0; ci < hidden_ch; ++ci) {
      for (int ky = 0; ky < 3; ++ky) {
        for (int kx = 0; kx < 3; ++kx) {
          const double wv = stack.w2(o, ci * 9 + ky * 3 + kx);
          double wg = 0.0;
          for (Eigen::Index y = 0; y < h; ++y) {
            const Eigen::Index sy = clamp_idx(y + ky - 1, h);
            for (Eigen::Index x = 0; x < wd; ++x) {
              const Eigen::Index sx = clamp_idx(x + kx - 1, wd);
              const double g = d_out[o](y, x);
              wg += g * hidden[ci](sy, sx);
              d_hidden[ci](sy, sx) += wv * g;
            }
          }
          grad.w2(o, ci * 9 + ky * 3 + kx) += wg;
        }
      }
    }
  }

  // ReLU gate.
  for (std::size_t c = 0; c < hidden_ch; ++c) {
    d_hidden[c] = d_hidden[c].cwiseProduct(
        cache.hidden_pre[c].unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; }));
  }

  // Layer 1: weight gradients only; the input planes are data.
  for (std::size_t o = 0; o < hidden_ch; ++o) {
    grad.b1(o) += d_hidden[o].sum();
    for (std::size_t ci = 0; ci < stack.in_channels(); ++ci) {
      for (int ky = 0; ky < 3; ++ky) {
        for (int kx = 0; kx < 3; ++kx) {
          double wg = 0.0;
          for (Eigen::Index y = 0; y < h; ++y) {
            const Eigen::Index sy = clamp_idx(y + ky - 1, h);
            for (Eigen::Index x = 0; x < wd; ++x) {
              const Eigen::Index sx = clamp_idx(x + kx - 1, wd);
              wg += d_hidden[o](y, x) * cache.input[ci](sy, sx);
            }
          }
          grad.w1(o, ci * 9 + ky * 3 + kx) += wg;
        }
      }
    }
  }
}

}  // namespace gcspn

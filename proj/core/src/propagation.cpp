#include "gcspn/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gcspn {

AffinityKernelField AffinityKernelField::normalized() const {
  AffinityKernelField out = *this;
  for (std::size_t p = 0; p < height * width; ++p) {
    double* w = out.weights.data() + p * 9;
    double abs_sum = 0.0;
    for (std::size_t c = 0; c < 9; ++c) {
      if (c != kSelf) abs_sum += std::abs(w[c]);
    }
    double nbr_sum = 0.0;
    if (abs_sum > 0.0) {
      for (std::size_t c = 0; c < 9; ++c) {
        if (c == kSelf) continue;
        w[c] /= abs_sum;
        nbr_sum += w[c];
      }
    } else {
      for (std::size_t c = 0; c < 9; ++c) {
        if (c != kSelf) w[c] = 0.0;
      }
    }
    w[kSelf] = 1.0 - nbr_sum;
  }
  return out;
}

DepthGrid cspn_step(const DepthGrid& depth, const AffinityKernelField& kern) {
  if (kern.height != depth.height() || kern.width != depth.width() ||
      kern.weights.size() != depth.size() * 9) {
    throw std::invalid_argument("cspn: kernel field does not match depth grid");
  }
  const std::size_t h = depth.height();
  const std::size_t w = depth.width();
  std::vector<double> out(h * w, 0.0);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      double folded_self = kern.at(y, x, AffinityKernelField::kSelf);
      double acc = 0.0;
      for (int di = -1; di <= 1; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const std::size_t c = (di + 1) * 3 + (dj + 1);
          const auto ny = static_cast<std::ptrdiff_t>(y) + di;
          const auto nx = static_cast<std::ptrdiff_t>(x) + dj;
          if (ny < 0 || nx < 0 || ny >= static_cast<std::ptrdiff_t>(h) ||
              nx >= static_cast<std::ptrdiff_t>(w)) {
            folded_self += kern.at(y, x, c);
          } else {
            acc += kern.at(y, x, c) * depth.at(ny, nx);
          }
        }
      }
      out[y * w + x] = folded_self * depth.at(y, x) + acc;
    }
  }
  return DepthGrid(h, w, std::move(out));
}

void PropagationConfig::validate() const {
  if (steps < 1) throw std::invalid_argument("config: steps must be >= 1");
  if (k < 1) throw std::invalid_argument("config: k must be >= 1");
  if (patch_h < 1 || patch_w < 1) {
    throw std::invalid_argument("config: patch dimensions must be >= 1");
  }
  if (!(pos_scale > 0.0)) {
    throw std::invalid_argument("config: position scale must be positive");
  }
}

AttentionTensor AttentionTensor::uniform(std::size_t n_nodes, std::size_t k,
                                         std::size_t channels) {
  AttentionTensor t(n_nodes, k, channels);
  const double a = 1.0 / static_cast<double>(k + 1);
  std::fill(t.coeff_.begin(), t.coeff_.end(), a);
  return t;
}

double AttentionTensor::max_normalization_error() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < n_nodes_; ++i) {
    for (std::size_t c = 0; c < channels_; ++c) {
      double sum = 0.0;
      for (std::size_t r = 0; r <= k_; ++r) sum += at(i, r, c);
      worst = std::max(worst, std::abs(sum - 1.0));
    }
  }
  return worst;
}

AttentionTensor attention_coefficients(const PatchGraph& graph, const MlpSpec& psi,
                                       std::vector<MlpCache>* caches) {
  const std::size_t n = graph.node_count();
  const std::size_t len = graph.feature_len();
  const std::size_t channels = graph.layout.patch_len();
  const std::size_t k = graph.neighbors.k();
  if (psi.input_width() != 2 * len || psi.output_width() != channels) {
    throw std::invalid_argument("attention: psi must map 2L -> P_h*P_w");
  }
  if (caches) caches->assign(n * (k + 1), MlpCache{});

  AttentionTensor alpha(n, k, channels);
  Eigen::MatrixXd logits(k + 1, channels);
  Eigen::VectorXd cat(2 * len);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = graph.neighbors.row(i);
    cat.head(len) = graph.features.row(i);
    for (std::size_t r = 0; r <= k; ++r) {
      const std::size_t j = r < k ? row[r] : i;
      cat.tail(len) = graph.features.row(j);
      MlpCache* mc = caches ? &(*caches)[i * (k + 1) + r] : nullptr;
      logits.row(r) = mlp_forward(psi, cat, mc);
    }
    for (std::size_t c = 0; c < channels; ++c) {
      const double m = logits.col(c).maxCoeff();
      double denom = 0.0;
      for (std::size_t r = 0; r <= k; ++r) {
        denom += std::exp(logits(r, c) - m);
      }
      for (std::size_t r = 0; r <= k; ++r) {
        alpha.at(i, r, c) = std::exp(logits(r, c) - m) / denom;
      }
    }
  }
  return alpha;
}

namespace {

// Shared by the public edge_attention_step and by propagate, which may swap
// the attention weights for a uniform mean.
Eigen::MatrixXd aggregate_step(const PatchGraph& graph, const MlpSpec& phi_self,
                               const MlpSpec& phi_nbr, const MlpSpec& psi,
                               bool use_attention, StepCache* cache) {
  const std::size_t n = graph.node_count();
  const std::size_t len = graph.feature_len();
  const std::size_t channels = graph.layout.patch_len();
  const std::size_t k = graph.neighbors.k();
  if (phi_self.input_width() != len || phi_self.output_width() != channels) {
    throw std::invalid_argument("aggregate: phi_self must map L -> P_h*P_w");
  }
  if (phi_nbr.input_width() != 2 * len || phi_nbr.output_width() != channels) {
    throw std::invalid_argument("aggregate: phi_nbr must map 2L -> P_h*P_w");
  }

  AttentionTensor alpha =
      use_attention
          ? attention_coefficients(graph, psi, cache ? &cache->psi : nullptr)
          : AttentionTensor::uniform(n, k, channels);
  if (cache) {
    cache->node_in = graph.features;
    cache->topology = graph.neighbors;
    cache->alpha = alpha;
    cache->phi_nbr.assign(n * k, MlpCache{});
    cache->phi_self.assign(n, MlpCache{});
    cache->f_self.resize(n, channels);
    cache->g_nbr.resize(n * k, channels);
  }

  Eigen::MatrixXd out(n, channels);
  Eigen::VectorXd cat(2 * len);
  std::vector<std::pair<std::uint32_t, std::size_t>> order(k);  // (node, row)
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::VectorXd xi = graph.features.row(i);
    const Eigen::VectorXd f =
        mlp_forward(phi_self, xi, cache ? &cache->phi_self[i] : nullptr);
    if (cache) cache->f_self.row(i) = f;

    Eigen::VectorXd acc(channels);
    for (std::size_t c = 0; c < channels; ++c) {
      acc(c) = alpha.at(i, alpha.self_row(), c) * f(c);
    }

    // Accumulate neighbor messages in ascending node-index order so sums are
    // bit-stable regardless of the table's distance ordering.
    const auto row = graph.neighbors.row(i);
    for (std::size_t r = 0; r < k; ++r) order[r] = {row[r], r};
    std::sort(order.begin(), order.end());

    cat.head(len) = xi;
    for (const auto& [j, r] : order) {
      cat.tail(len) = graph.features.row(j).transpose() - xi;
      MlpCache* mc = cache ? &cache->phi_nbr[i * k + r] : nullptr;
      const Eigen::VectorXd g = mlp_forward(phi_nbr, cat, mc);
      if (cache) cache->g_nbr.row(i * k + r) = g;
      for (std::size_t c = 0; c < channels; ++c) {
        acc(c) += alpha.at(i, r, c) * g(c);
      }
    }
    out.row(i) = acc;
  }
  if (cache) cache->new_patch = out;
  return out;
}

}  // namespace

Eigen::MatrixXd edge_attention_step(const PatchGraph& graph,
                                    const MlpSpec& phi_self,
                                    const MlpSpec& phi_nbr, const MlpSpec& psi,
                                    StepCache* cache) {
  return aggregate_step(graph, phi_self, phi_nbr, psi, /*use_attention=*/true,
                        cache);
}

PropagateResult propagate(const DepthGrid& initial_depth,
                          const FeatureGrid& features, const DepthGrid& sparse,
                          const CameraIntrinsics& intr,
                          const PropagationParams& params,
                          const PropagationConfig& config,
                          PropagationTrace* trace) {
  config.validate();
  if (initial_depth.height() != features.height() ||
      initial_depth.width() != features.width() ||
      !sparse.same_shape(initial_depth)) {
    throw std::invalid_argument("propagate: input dimensions disagree");
  }
  const PatchLayout layout(features.height(), features.width(), config.patch_h,
                           config.patch_w);
  const std::size_t n = layout.node_count();
  const std::size_t patch_len = layout.patch_len();
  if (config.k >= n) {
    throw std::invalid_argument("propagate: k must be smaller than the node count");
  }
  if (trace) {
    trace->layout = layout;
    trace->steps.clear();
    trace->step_depths.clear();
  }

  Eigen::MatrixXd patch = gather_patches(features, layout);
  EmbedResult emb =
      embed_positions(patch, initial_depth, layout, intr, config.pos_scale);

  NeighborTable topo;
  PropagateResult result;
  for (std::size_t s = 0; s < config.steps; ++s) {
    if (config.dynamic_topology || s == 0) {
      if (config.use_geometry) {
        topo = knn(std::span<const Point3>(emb.positions), config.k);
      } else {
        topo = knn(Eigen::MatrixXd(emb.features.leftCols(patch_len)), config.k);
      }
    }
    PatchGraph graph(layout, emb.features, emb.positions, topo, intr,
                     config.pos_scale);
    StepCache* sc = trace ? &trace->steps.emplace_back() : nullptr;
    Eigen::MatrixXd state = aggregate_step(graph, params.phi_self,
                                           params.phi_nbr, params.psi,
                                           config.use_attention, sc);

    if (sc) sc->reimposed.assign(n * patch_len, 0);
    if (config.reimpose_sparse) {
      for (std::size_t y = 0; y < sparse.height(); ++y) {
        for (std::size_t x = 0; x < sparse.width(); ++x) {
          const double v = sparse.at(y, x);
          if (v <= 0.0) continue;
          const std::size_t node =
              (y / config.patch_h) * layout.grid_w() + x / config.patch_w;
          const std::size_t l = (y % config.patch_h) * config.patch_w +
                                x % config.patch_w;
          state(node, l) = v;
          if (sc) sc->reimposed[node * patch_len + l] = 1;
        }
      }
    }
    if (sc) sc->node_state = state;

    DepthGrid current = scatter_patches(state, layout);
    if (trace) trace->step_depths.push_back(current);
    if (config.record_intermediate) result.intermediates.push_back(current);

    emb = embed_positions(state, current, layout, intr, config.pos_scale);
    if (s + 1 == config.steps) {
      result.depth = std::move(current);
    }
  }
  return result;
}

}  // namespace gcspn

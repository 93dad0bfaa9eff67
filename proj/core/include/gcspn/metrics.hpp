#pragma once

#include <string>
#include <string_view>

#include "gcspn/grid.hpp"

namespace gcspn {

/// Standard depth-completion error metrics over valid ground-truth pixels.
/// Inverse metrics use 1/d in 1/meter; they are flagged invalid when the
/// prediction is non-positive at a valid pixel. delta1..3 are fractions of
/// pixels whose prediction/truth ratio (either direction) stays below
/// 1.25, 1.25^2 and 1.25^3.
struct MetricsRecord {
  double rmse{0.0};
  double mae{0.0};
  double irmse{0.0};
  double imae{0.0};
  double rel{0.0};
  double delta1{0.0};
  double delta2{0.0};
  double delta3{0.0};
  bool inverse_valid{true};
  std::size_t valid_count{0};
};

MetricsRecord evaluate(const DepthGrid& pred, const DepthGrid& gt);

/// Accumulates a running mean of records (inverse metrics stay valid only if
/// every contribution was).
MetricsRecord mean_record(const std::vector<MetricsRecord>& records);

std::string metrics_csv_header();
std::string metrics_csv_row(std::string_view scene, const MetricsRecord& m);

}  // namespace gcspn

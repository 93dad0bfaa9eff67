#include "gcspn/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <vector>

namespace gcspn {

MetricsRecord evaluate(const DepthGrid& pred, const DepthGrid& gt) {
  if (!pred.same_shape(gt)) {
    throw std::invalid_argument("evaluate: prediction and ground truth differ in shape");
  }
  MetricsRecord m;
  double se = 0.0, ae = 0.0, ise = 0.0, iae = 0.0, rel = 0.0;
  std::size_t n = 0, d1 = 0, d2 = 0, d3 = 0;
  constexpr double kT1 = 1.25;
  constexpr double kT2 = 1.25 * 1.25;
  constexpr double kT3 = 1.25 * 1.25 * 1.25;

  for (std::size_t i = 0; i < gt.size(); ++i) {
    const double t = gt[i];
    if (t <= 0.0) continue;
    const double p = pred[i];
    const double diff = std::abs(t - p);
    se += diff * diff;
    ae += diff;
    rel += diff / t;
    if (p > 0.0) {
      const double idiff = std::abs(1.0 / t - 1.0 / p);
      ise += idiff * idiff;
      iae += idiff;
      const double ratio = p > t ? p / t : t / p;
      if (ratio < kT1) ++d1;
      if (ratio < kT2) ++d2;
      if (ratio < kT3) ++d3;
    } else {
      m.inverse_valid = false;
    }
    ++n;
  }
  if (n == 0) {
    throw std::invalid_argument("evaluate: ground truth has no valid pixel");
  }
  const double dn = static_cast<double>(n);
  m.rmse = std::sqrt(se / dn);
  m.mae = ae / dn;
  m.rel = rel / dn;
  if (m.inverse_valid) {
    m.irmse = std::sqrt(ise / dn);
    m.imae = iae / dn;
  } else {
    m.irmse = std::numeric_limits<double>::quiet_NaN();
    m.imae = std::numeric_limits<double>::quiet_NaN();
  }
  m.delta1 = static_cast<double>(d1) / dn;
  m.delta2 = static_cast<double>(d2) / dn;
  m.delta3 = static_cast<double>(d3) / dn;
  m.valid_count = n;
  return m;
}

MetricsRecord mean_record(const std::vector<MetricsRecord>& records) {
  if (records.empty()) {
    throw std::invalid_argument("metrics: cannot average an empty record list");
  }
  MetricsRecord m;
  m.irmse = 0.0;
  m.imae = 0.0;
  for (const MetricsRecord& r : records) {
    m.rmse += r.rmse;
    m.mae += r.mae;
    m.rel += r.rel;
    m.delta1 += r.delta1;
    m.delta2 += r.delta2;
    m.delta3 += r.delta3;
    m.valid_count += r.valid_count;
    if (r.inverse_valid) {
      m.irmse += r.irmse;
      m.imae += r.imae;
    } else {
      m.inverse_valid = false;
    }
  }
  const double dn = static_cast<double>(records.size());
  m.rmse /= dn;
  m.mae /= dn;
  m.rel /= dn;
  m.delta1 /= dn;
  m.delta2 /= dn;
  m.delta3 /= dn;
  if (m.inverse_valid) {
    m.irmse /= dn;
    m.imae /= dn;
  } else {
    m.irmse = std::numeric_limits<double>::quiet_NaN();
    m.imae = std::numeric_limits<double>::quiet_NaN();
  }
  return m;
}

std::string metrics_csv_header() {
  return "scene,rmse,mae,irmse,imae,rel,d1,d2,d3";
}

std::string metrics_csv_row(std::string_view scene, const MetricsRecord& m) {
  char buf[320];
  std::snprintf(buf, sizeof(buf),
                "%.*s,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g",
                static_cast<int>(scene.size()), scene.data(), m.rmse, m.mae,
                m.irmse, m.imae, m.rel, m.delta1, m.delta2, m.delta3);
  return std::string(buf);
}

}  // namespace gcspn

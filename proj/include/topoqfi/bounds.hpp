#pragma once

#include "topoqfi/qfi.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace topoqfi {

/// Outcome of one topological bound check.  ratio is measured/bound, reported
/// as +inf when the bound is zero and the measurement nonnegative.
struct BoundReport {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
  bool passed = false;
  std::string model;
  int nx = 0;
  int ny = 0;
  std::optional<double> flatness;  // std(F)/mean(F), attached to the subleading check
};

/// Directionally averaged A >= |C| / pi.
BoundReport check_leading_bound(const QfiExpansion& expansion, int chern,
                                const std::string& model = "", int nx = 0, int ny = 0);

/// B >= C^2 / (12 pi^2).
BoundReport check_subleading_bound(const QfiExpansion& expansion, int chern,
                                   const std::string& model = "", int nx = 0, int ny = 0,
                                   std::optional<double> flatness = std::nullopt);

/// Pointwise G^xx + G^yy >= |F^xy|: measured is the worst-k margin, bound 0.
BoundReport check_metric_curvature_pointwise(const QgtField& field, const std::string& model = "");

/// std(F)/mean(F) of the total filled-band Berry curvature; small means flat.
double curvature_flatness(const QgtField& field);

/// Truncated-expansion maximum q* = sqrt(A / (2B)); throws std::domain_error
/// when A <= 0 or B <= 0 (no peak in the truncation).
double qfi_peak(const QfiExpansion& expansion);

struct SpeedLimitEstimate {
  double ds_dt = 0.0;
  std::vector<double> q_grid;
  std::string potential;  // e.g. "v0/q, v0=1"
  double v0 = 1.0;
  int chern_of_model = 0;
};

/// ds/dt = (1/2) sqrt( sum_i f_Q(q_i) |v0/q_i|^2 ) over the curve's q samples.
SpeedLimitEstimate speed_limit(const QfiCurve& curve, double v0 = 1.0, int chern_of_model = 0);

nlohmann::json to_json(const BoundReport& report);

}  // namespace topoqfi

#include "topoqfi/bounds.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>

namespace topoqfi {

namespace {

BoundReport make_report(std::string name, double measured, double bound, std::string model,
                        int nx, int ny) {
  BoundReport report;
  report.name = std::move(name);
  report.measured = measured;
  report.bound = bound;
  report.passed = measured >= bound - 1e-9 * std::max(1.0, std::abs(bound));
  if (bound == 0.0) {
    report.ratio = std::copysign(std::numeric_limits<double>::infinity(),
                                 measured >= 0.0 ? 1.0 : -1.0);
  } else {
    report.ratio = measured / bound;
  }
  report.model = std::move(model);
  report.nx = nx;
  report.ny = ny;
  return report;
}

}  // namespace

BoundReport check_leading_bound(const QfiExpansion& expansion, int chern, const std::string& model,
                                int nx, int ny) {
  const double bound = std::abs(chern) / kPi;
  return make_report("leading_qfi_bound", expansion.a, bound, model, nx, ny);
}

BoundReport check_subleading_bound(const QfiExpansion& expansion, int chern,
                                   const std::string& model, int nx, int ny,
                                   std::optional<double> flatness) {
  const double bound = static_cast<double>(chern) * chern / (12.0 * kPi * kPi);
  BoundReport report = make_report("subleading_qfi_bound", expansion.b, bound, model, nx, ny);
  report.flatness = flatness;
  return report;
}

BoundReport check_metric_curvature_pointwise(const QgtField& field, const std::string& model) {
  double worst = std::numeric_limits<double>::infinity();
  for (int idx = 0; idx < field.grid.size(); ++idx) {
    for (int f = 0; f < field.n_filled(); ++f) {
      const double margin = field.metric_xx(idx, f) + field.metric_yy(idx, f) -
                            std::abs(field.curvature(idx, f));
      worst = std::min(worst, margin);
    }
  }
  return make_report("metric_curvature_pointwise", worst, 0.0, model, field.grid.nx(),
                     field.grid.ny());
}

double curvature_flatness(const QgtField& field) {
  // total curvature of the filled bands, one sample per k
  RealVector total = field.curvature.rowwise().sum();
  const double mean = total.mean();
  if (mean == 0.0) return 0.0;
  const double var = (total.array() - mean).square().mean();
  return std::sqrt(var) / std::abs(mean);
}

double qfi_peak(const QfiExpansion& expansion) {
  if (!(expansion.a > 0.0)) {
    throw std::domain_error("qfi_peak: expansion has A <= 0, no peak");
  }
  if (!(expansion.b > 0.0)) {
    throw std::domain_error("qfi_peak: expansion has B <= 0, no peak in the truncation");
  }
  return std::sqrt(expansion.a / (2.0 * expansion.b));
}

SpeedLimitEstimate speed_limit(const QfiCurve& curve, double v0, int chern_of_model) {
  SpeedLimitEstimate estimate;
  estimate.q_grid = curve.q;
  estimate.v0 = v0;
  estimate.potential = "v0/q, v0=" + std::to_string(v0);
  estimate.chern_of_model = chern_of_model;

  double acc = 0.0;
  for (std::size_t i = 0; i < curve.q.size(); ++i) {
    const double q = curve.q[i];
    if (q == 0.0) {
      throw std::invalid_argument("speed_limit: q = 0 in grid with singular 1/q potential");
    }
    const double v = v0 / q;
    acc += curve.f[i] * v * v;
  }
  estimate.ds_dt = 0.5 * std::sqrt(acc);
  return estimate;
}

nlohmann::json to_json(const BoundReport& report) {
  nlohmann::json j{{"name", report.name},
                   {"measured", report.measured},
                   {"bound", report.bound},
                   {"passed", report.passed},
                   {"model", report.model},
                   {"grid", {report.nx, report.ny}}};
  // infinite ratio (zero bound) serializes as null
  if (std::isfinite(report.ratio)) {
    j["ratio"] = report.ratio;
  } else {
    j["ratio"] = nullptr;
  }
  if (report.flatness) j["flatness"] = *report.flatness;
  return j;
}

}  // namespace topoqfi

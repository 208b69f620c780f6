#pragma once

#include "topoqfi/bounds.hpp"
#include "topoqfi/config.hpp"

#include <filesystem>
#include <map>
#include <optional>

namespace topoqfi {

enum class Stage { Geometry, Qfi, Bounds, SpeedLimit, All };

Stage stage_from_name(const std::string& name);

/// Everything one run produced.  Timings are kept in memory and printed to the
/// console only, so the artifact files stay byte-identical across reruns.
struct RunReport {
  int schema_version = 1;
  RunConfig config;

  double min_gap = 0.0;
  std::vector<double> chern;
  std::vector<double> chern_plaquette;

  std::optional<QfiExpansion> expansion;  // directionally averaged
  std::optional<QfiExpansion> expansion_x;
  std::optional<QfiExpansion> expansion_y;
  std::vector<QfiCurve> curves;
  std::optional<double> q_star;
  bool q_star_reliable = false;

  std::vector<BoundReport> bound_reports;
  std::optional<SpeedLimitEstimate> speed;

  std::optional<double> chern_convergence_delta;  // vs. the half-resolution grid
  std::optional<double> a_convergence_delta;

  std::map<std::string, double> timings_ms;

  bool any_bound_failed() const {
    for (const auto& r : bound_reports)
      if (!r.passed) return true;
    return false;
  }
};

/// Orchestrates model -> bands -> geometry -> QFI -> bounds -> speed limit and
/// writes the stage's artifact files under config.output.
RunReport run_pipeline(const RunConfig& config, Stage stage, bool quiet = false);

/// Plot-ready multi-curve CSV (shared q column, one f_Q column per label) plus
/// a `<stem>.qstar.json` sidecar annotating each curve's peak location.
void emit_curve(const std::vector<QfiCurve>& curves, const std::filesystem::path& csv_path);

nlohmann::json report_to_json(const RunReport& report);

}  // namespace topoqfi

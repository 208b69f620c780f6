#include "topoqfi/pipeline.hpp"

#include "topoqfi/csv.hpp"
#include "topoqfi/geometry.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace topoqfi {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class StageTimer {
 public:
  explicit StageTimer(std::map<std::string, double>& sink) : sink_(sink) {}

  template <class F>
  auto time(const std::string& name, F&& fn) {
    const auto start = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      sink_[name] += elapsed_ms(start);
    } else {
      auto result = fn();
      sink_[name] += elapsed_ms(start);
      return result;
    }
  }

 private:
  static double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
  }
  std::map<std::string, double>& sink_;
};

std::vector<int> zero_based(const std::vector<int>& filled_one_based) {
  std::vector<int> out;
  out.reserve(filled_one_based.size());
  for (int b : filled_one_based) out.push_back(b - 1);
  return out;
}

BlochModel model_from_config(const ModelConfig& mc) {
  json j{{"family", mc.family}, {"flatten", mc.flatten}};
  for (const auto& [key, value] : mc.params) j[key] = value;
  if (mc.flat_energies) j["flat_energies"] = *mc.flat_energies;
  return load_model(j);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
  os << content;
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> out;
  out.reserve(n);
  if (n == 1) {
    out.push_back(lo);
    return out;
  }
  for (int i = 0; i < n; ++i) {
    out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  }
  return out;
}

int total_chern(const std::vector<double>& chern_per_band) {
  double total = 0.0;
  for (double c : chern_per_band) total += c;
  return static_cast<int>(std::lround(total));
}

std::string qfi_curve_csv(const RunReport& report) {
  std::ostringstream os;
  os << "q,f_direct,f_perturbative,beta\n";
  const QfiCurve* direct = nullptr;
  const QfiCurve* pert = nullptr;
  for (const auto& c : report.curves) {
    if (c.label == "direct") direct = &c;
    if (c.label == "perturbative") pert = &c;
  }
  if (!direct || !pert) return os.str();
  for (std::size_t i = 0; i < direct->q.size(); ++i) {
    os << csv::number(direct->q[i]) << ',' << csv::number(direct->f[i]) << ','
       << csv::number(pert->f[i]) << ',' << csv::number(direct->beta) << '\n';
  }
  return os.str();
}

}  // namespace

Stage stage_from_name(const std::string& name) {
  if (name == "geometry") return Stage::Geometry;
  if (name == "qfi") return Stage::Qfi;
  if (name == "bounds") return Stage::Bounds;
  if (name == "speedlimit") return Stage::SpeedLimit;
  if (name == "all") return Stage::All;
  throw std::invalid_argument("unknown stage '" + name + "'");
}

void emit_curve(const std::vector<QfiCurve>& curves, const fs::path& csv_path) {
  if (curves.empty()) throw std::invalid_argument("emit_curve: need at least one curve");
  const std::vector<double>& q = curves.front().q;
  for (const auto& c : curves) {
    if (c.q != q) throw std::invalid_argument("emit_curve: curves must share one q grid");
  }

  std::ostringstream os;
  os << "q";
  for (const auto& c : curves) os << ',' << c.label;
  os << '\n';
  for (std::size_t i = 0; i < q.size(); ++i) {
    os << csv::number(q[i]);
    for (const auto& c : curves) os << ',' << csv::number(c.f[i]);
    os << '\n';
  }
  write_file(csv_path, os.str());

  json sidecar = json::array();
  for (const auto& c : curves) {
    json entry{{"label", c.label}, {"method", c.method}};
    entry["beta"] = std::isinf(c.beta) ? json("inf") : json(c.beta);
    if (c.q_star) {
      entry["q_star"] = *c.q_star;
    } else {
      entry["q_star"] = nullptr;
    }
    sidecar.push_back(entry);
  }
  fs::path sidecar_path = csv_path;
  sidecar_path.replace_extension(".qstar.json");
  write_file(sidecar_path, sidecar.dump(2) + "\n");
}

RunReport run_pipeline(const RunConfig& config, Stage stage, bool quiet) {
  RunReport report;
  report.config = config;
  StageTimer timer(report.timings_ms);

  const fs::path out_dir(config.output);
  fs::create_directories(out_dir);

  const BlochModel model = model_from_config(config.model);
  const std::vector<int> filled = zero_based(config.filled);
  const BzGrid grid(config.nx, config.ny);

  const BandData bands =
      timer.time("bands", [&] { return solve_bands(model, grid, filled); });
  report.min_gap = bands.min_gap;

  const QgtField field = timer.time("geometry", [&] { return qgt_multiband(bands, model); });
  report.chern = field.chern;
  report.chern_plaquette = field.chern_plaquette;
  const int chern = total_chern(field.chern_plaquette);

  const bool want_geometry_csv = stage == Stage::Geometry || stage == Stage::All;
  const bool want_qfi = stage == Stage::Qfi || stage == Stage::All;
  const bool want_bounds = stage == Stage::Bounds || (stage == Stage::All && config.bounds);
  const bool want_speed = stage == Stage::SpeedLimit || stage == Stage::All;

  // expansion is cheap and feeds every later stage
  report.expansion = qfi_expansion(field, Direction::Averaged);
  report.expansion_x = qfi_expansion(field, Direction::X);
  report.expansion_y = qfi_expansion(field, Direction::Y);
  try {
    report.q_star = qfi_peak(*report.expansion);
    report.q_star_reliable = *report.q_star <= report.expansion->validity_qmax();
  } catch (const std::domain_error&) {
    report.q_star.reset();
  }

  // half-resolution convergence deltas
  if (config.nx / 2 >= 8 && config.ny / 2 >= 8) {
    timer.time("convergence", [&] {
      const BzGrid half(config.nx / 2, config.ny / 2);
      const BandData hb = solve_bands(model, half, filled);
      const QgtField hf = qgt_multiband(hb, model);
      double chern_delta = 0.0;
      for (std::size_t f = 0; f < hf.chern_plaquette.size(); ++f) {
        chern_delta =
            std::max(chern_delta, std::abs(hf.chern_plaquette[f] - field.chern_plaquette[f]));
      }
      report.chern_convergence_delta = chern_delta;
      report.a_convergence_delta = std::abs(qfi_expansion(hf).a - report.expansion->a);
    });
  }

  if (want_geometry_csv) {
    std::ostringstream os;
    write_geometry_csv(field, os);
    write_file(out_dir / "geometry.csv", os.str());
  }

  if (want_qfi) {
    timer.time("qfi", [&] {
      QfiCurve direct;
      direct.beta = config.beta;
      direct.method = std::isinf(config.beta) ? "direct" : "finite-beta";
      direct.label = "direct";
      QfiCurve pert;
      pert.beta = std::numeric_limits<double>::infinity();
      pert.method = "perturbative";
      pert.label = "perturbative";
      pert.q_star = report.q_star;
      for (double q : config.q_list) {
        direct.q.push_back(q);
        pert.q.push_back(q);
        const double f =
            std::isinf(config.beta)
                ? qfi_direct(bands, model, q, config.directions, config.n_alpha)
                : qfi_finite_beta(bands, model, q, config.directions, config.beta, config.n_alpha);
        direct.f.push_back(f);
        const double qq = q * q;
        pert.f.push_back(report.expansion->a * qq - report.expansion->b * qq * qq);
      }
      report.curves.push_back(std::move(direct));
      report.curves.push_back(std::move(pert));
    });
    write_file(out_dir / "qfi_curve.csv", qfi_curve_csv(report));
    emit_curve(report.curves, out_dir / "curves.csv");
  }

  if (want_bounds) {
    timer.time("bounds", [&] {
      report.bound_reports.push_back(
          check_leading_bound(*report.expansion, chern, model.name, config.nx, config.ny));
      report.bound_reports.push_back(check_subleading_bound(
          *report.expansion, chern, model.name, config.nx, config.ny, curvature_flatness(field)));
      BoundReport mc = check_metric_curvature_pointwise(field, model.name);
      report.bound_reports.push_back(mc);
    });
    json bounds_json = json::array();
    for (const auto& r : report.bound_reports) bounds_json.push_back(to_json(r));
    write_file(out_dir / "bounds.json", bounds_json.dump(2) + "\n");
  }

  if (want_speed) {
    timer.time("speedlimit", [&] {
      QfiCurve curve;
      curve.beta = std::numeric_limits<double>::infinity();
      curve.method = "direct";
      curve.label = "speedlimit";
      curve.q = log_spaced(config.speedlimit.q_min, config.speedlimit.q_max,
                           config.speedlimit.n_q);
      for (double q : curve.q) {
        curve.f.push_back(qfi_direct(bands, model, q, config.directions, config.n_alpha));
      }
      report.speed = speed_limit(curve, config.speedlimit.v0, chern);
    });
  }

  write_file(out_dir / "run_report.json", report_to_json(report).dump(2) + "\n");

  if (!quiet) {
    std::cout << "model " << model.name << " on " << config.nx << "x" << config.ny
              << ", min gap " << report.min_gap << "\n";
    for (std::size_t f = 0; f < report.chern_plaquette.size(); ++f) {
      std::cout << "  band " << config.filled[f] << ": C = " << report.chern_plaquette[f]
                << " (plaquette), " << report.chern[f] << " (metric route)\n";
    }
    if (report.expansion) {
      std::cout << "  A = " << report.expansion->a << ", B = " << report.expansion->b;
      if (report.q_star) std::cout << ", q* = " << *report.q_star;
      std::cout << "\n";
    }
    for (const auto& r : report.bound_reports) {
      std::cout << "  " << r.name << ": " << (r.passed ? "passed" : "FAILED")
                << " (measured " << r.measured << " vs bound " << r.bound << ")\n";
    }
    if (report.speed) std::cout << "  ds/dt = " << report.speed->ds_dt << "\n";
    std::cout << "  timings(ms):";
    for (const auto& [name, ms] : report.timings_ms) std::cout << ' ' << name << '=' << ms;
    std::cout << "\n";
  }
  return report;
}

nlohmann::json report_to_json(const RunReport& report) {
  json results;
  results["min_gap"] = report.min_gap;
  results["chern"] = report.chern;
  results["chern_plaquette"] = report.chern_plaquette;

  if (report.expansion) {
    json qfi{{"A", report.expansion->a},
             {"B", report.expansion->b},
             {"A_x", report.expansion_x->a},
             {"B_x", report.expansion_x->b},
             {"A_y", report.expansion_y->a},
             {"B_y", report.expansion_y->b},
             {"A_per_band", report.expansion->a_per_band},
             {"B_per_band", report.expansion->b_per_band},
             {"validity_qmax", report.expansion->validity_qmax()}};
    if (report.q_star) {
      qfi["q_star"] = *report.q_star;
      qfi["q_star_reliable"] = report.q_star_reliable;
    } else {
      qfi["q_star"] = nullptr;
    }
    results["qfi"] = qfi;
  }

  if (!report.curves.empty()) {
    json curves = json::array();
    for (const auto& c : report.curves) {
      curves.push_back(json{{"label", c.label},
                            {"method", c.method},
                            {"beta", std::isinf(c.beta) ? json("inf") : json(c.beta)},
                            {"q", c.q},
                            {"f", c.f}});
    }
    results["curves"] = curves;
  }

  if (!report.bound_reports.empty()) {
    json bounds = json::array();
    for (const auto& r : report.bound_reports) bounds.push_back(to_json(r));
    results["bounds"] = bounds;
  }

  if (report.speed) {
    results["speed_limit"] = json{{"ds_dt", report.speed->ds_dt},
                                  {"potential", report.speed->potential},
                                  {"v0", report.speed->v0},
                                  {"chern", report.speed->chern_of_model},
                                  {"q_grid", report.speed->q_grid}};
  }

  json convergence;
  if (report.chern_convergence_delta) {
    convergence["chern_delta"] = *report.chern_convergence_delta;
  }
  if (report.a_convergence_delta) convergence["A_delta"] = *report.a_convergence_delta;
  if (!convergence.empty()) results["grid_convergence"] = convergence;

  return json{{"schema_version", report.schema_version},
              {"config", serialize_config(report.config)},
              {"results", results}};
}

}  // namespace topoqfi

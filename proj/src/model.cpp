#include "topoqfi/model.hpp"

#include <json.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace topoqfi {

namespace {

const Complex kI(0.0, 1.0);

Matrix d_dot_sigma(double dx, double dy, double dz) {
  Matrix h(2, 2);
  h << Complex(dz, 0), Complex(dx, -dy), Complex(dx, dy), Complex(-dz, 0);
  return h;
}

// Integer power by repeated multiplication: std::pow(complex, double) returns
// NaN at z = 0 (it goes through log), and z = 0 occurs on the grid at the
// high-symmetry points of the winding family.
Complex ipow(Complex z, int n) {
  Complex r(1.0, 0.0);
  for (int i = 0; i < n; ++i) r *= z;
  return r;
}

}  // namespace

BlochModel build_qwz(double m) {
  // Same matrices as build_winding_model(1, m); kept as an explicit closed
  // form so the two construction routes stay independent cross-checks.
  BlochModel model;
  model.dim = 2;
  model.name = "qwz";
  model.params = {{"m", m}};
  model.hamiltonian = [m](const Vec2& k) {
    return d_dot_sigma(std::sin(k.x()), std::sin(k.y()), m + std::cos(k.x()) + std::cos(k.y()));
  };
  model.gradient = [](const Vec2& k) -> std::array<Matrix, 2> {
    return {d_dot_sigma(std::cos(k.x()), 0.0, -std::sin(k.x())),
            d_dot_sigma(0.0, std::cos(k.y()), -std::sin(k.y()))};
  };
  return model;
}

BlochModel build_haldane(double t1, double t2, double phi, double mass) {
  if (t1 == 0.0) {
    throw ModelError("build_haldane: nearest-neighbor hopping t1 must be nonzero");
  }
  // Reduced coordinates k = (k1, k2) along the reciprocal primitive vectors.
  // Periodic gauge: inter-sublattice phases use integer lattice vectors only,
  //   H_AB(k) = t1 (1 + e^{-i k1} + e^{-i k2}),
  // second-neighbor loops a1, a2 - a1, -a2 carry the Haldane flux phase.
  BlochModel model;
  model.dim = 2;
  model.name = "haldane";
  model.params = {{"t1", t1}, {"t2", t2}, {"phi", phi}, {"M", mass}};
  model.hamiltonian = [t1, t2, phi, mass](const Vec2& k) {
    const double k1 = k.x();
    const double k2 = k.y();
    const Complex f = t1 * (1.0 + std::exp(-kI * k1) + std::exp(-kI * k2));
    const double haa =
        mass + 2.0 * t2 * (std::cos(k1 + phi) + std::cos(k2 - k1 + phi) + std::cos(-k2 + phi));
    const double hbb =
        -mass + 2.0 * t2 * (std::cos(k1 - phi) + std::cos(k2 - k1 - phi) + std::cos(-k2 - phi));
    Matrix h(2, 2);
    h << Complex(haa, 0), f, std::conj(f), Complex(hbb, 0);
    return h;
  };
  model.gradient = [t1, t2, phi](const Vec2& k) -> std::array<Matrix, 2> {
    const double k1 = k.x();
    const double k2 = k.y();
    const Complex df1 = t1 * (-kI) * std::exp(-kI * k1);
    const Complex df2 = t1 * (-kI) * std::exp(-kI * k2);
    const double daa1 = -2.0 * t2 * (std::sin(k1 + phi) - std::sin(k2 - k1 + phi));
    const double dbb1 = -2.0 * t2 * (std::sin(k1 - phi) - std::sin(k2 - k1 - phi));
    const double daa2 = -2.0 * t2 * (std::sin(k2 - k1 + phi) - std::sin(-k2 + phi));
    const double dbb2 = -2.0 * t2 * (std::sin(k2 - k1 - phi) - std::sin(-k2 - phi));
    Matrix g1(2, 2), g2(2, 2);
    g1 << Complex(daa1, 0), df1, std::conj(df1), Complex(dbb1, 0);
    g2 << Complex(daa2, 0), df2, std::conj(df2), Complex(dbb2, 0);
    return {g1, g2};
  };
  return model;
}

BlochModel build_winding_model(int winding, double m) {
  if (winding < 1) {
    throw ModelError("build_winding_model: winding must be >= 1, got " + std::to_string(winding));
  }
  BlochModel model;
  model.dim = 2;
  model.name = "winding";
  model.params = {{"N", static_cast<double>(winding)}, {"m", m}};
  const int n = winding;
  model.hamiltonian = [n, m](const Vec2& k) {
    const Complex f = ipow(Complex(std::sin(k.x()), std::sin(k.y())), n);
    return d_dot_sigma(f.real(), f.imag(), m + std::cos(k.x()) + std::cos(k.y()));
  };
  model.gradient = [n](const Vec2& k) -> std::array<Matrix, 2> {
    const Complex base(std::sin(k.x()), std::sin(k.y()));
    const Complex dpow = static_cast<double>(n) * ipow(base, n - 1);
    const Complex dfx = dpow * std::cos(k.x());
    const Complex dfy = dpow * kI * std::cos(k.y());
    return {d_dot_sigma(dfx.real(), dfx.imag(), -std::sin(k.x())),
            d_dot_sigma(dfy.real(), dfy.imag(), -std::sin(k.y()))};
  };
  return model;
}

BlochModel flatten_bands(const BlochModel& base, const std::vector<double>& band_energies) {
  if (static_cast<int>(band_energies.size()) != base.dim) {
    throw ModelError("flatten_bands: need exactly " + std::to_string(base.dim) +
                     " target energies, got " + std::to_string(band_energies.size()));
  }
  for (std::size_t i = 1; i < band_energies.size(); ++i) {
    if (!(band_energies[i] > band_energies[i - 1])) {
      throw ModelError("flatten_bands: target energies must be strictly increasing");
    }
  }

  constexpr double kGapFloor = 1e-6;

  BlochModel model;
  model.dim = base.dim;
  model.lattice_constant = base.lattice_constant;
  model.name = base.name + "_flat";
  model.params = base.params;

  auto base_h = base.hamiltonian;
  auto base_g = base.gradient;
  const int dim = base.dim;
  const std::vector<double> energies = band_energies;

  auto solve_base = [base_h, dim](const Vec2& k) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(base_h(k));
    for (int n = 1; n < dim; ++n) {
      const double gap = es.eigenvalues()(n) - es.eigenvalues()(n - 1);
      if (gap < kGapFloor) throw GapClosureError(k, gap);
    }
    return es;
  };

  model.hamiltonian = [solve_base, energies, dim](const Vec2& k) {
    auto es = solve_base(k);
    Matrix h = Matrix::Zero(dim, dim);
    for (int n = 0; n < dim; ++n) {
      const Vector u = es.eigenvectors().col(n);
      h += energies[n] * (u * u.adjoint());
    }
    return h;
  };

  // dH_flat = sum_n E_n dP_n with the exact first-order projector derivative
  //   dP_n = sum_{m != n} (P_m dH P_n + P_n dH P_m) / (e_n - e_m),
  // so flattened models keep an analytic gradient whenever the base has one.
  if (base.has_analytic_gradient()) {
    model.gradient = [solve_base, base_g, energies, dim](const Vec2& k) -> std::array<Matrix, 2> {
      auto es = solve_base(k);
      const auto base_grads = base_g(k);
      std::array<Matrix, 2> out = {Matrix::Zero(dim, dim), Matrix::Zero(dim, dim)};
      for (int axis = 0; axis < 2; ++axis) {
        // In the eigenbasis, (dH_flat)_{nm} = (E_n - E_m)/(e_n - e_m) (dH)_{nm}.
        const Matrix v = es.eigenvectors().adjoint() * base_grads[axis] * es.eigenvectors();
        Matrix vflat = Matrix::Zero(dim, dim);
        for (int n = 0; n < dim; ++n) {
          for (int m = 0; m < dim; ++m) {
            if (n == m) continue;
            const double denom = es.eigenvalues()(n) - es.eigenvalues()(m);
            vflat(n, m) = (energies[n] - energies[m]) / denom * v(n, m);
          }
        }
        out[axis] = es.eigenvectors() * vflat * es.eigenvectors().adjoint();
      }
      return out;
    };
  }
  return model;
}

Matrix hamiltonian_gradient(const BlochModel& model, const Vec2& k, Axis axis) {
  if (model.has_analytic_gradient()) {
    return model.gradient(k)[static_cast<int>(axis)];
  }
  const double h = 1e-5;
  Vec2 dk = Vec2::Zero();
  dk[static_cast<int>(axis)] = h;
  return (model.hamiltonian(k + dk) - model.hamiltonian(k - dk)) / (2.0 * h);
}

BlochModel load_model(const nlohmann::json& config) {
  if (!config.is_object()) throw ModelError("model config must be an object");
  if (!config.contains("family") || !config.at("family").is_string()) {
    throw ModelError("model config requires a string key 'family'");
  }
  const std::string family = config.at("family").get<std::string>();

  auto require = [&config, &family](const std::string& key) -> double {
    if (!config.contains(key) || !config.at(key).is_number()) {
      throw ModelError("model family '" + family + "' requires numeric parameter '" + key + "'");
    }
    return config.at(key).get<double>();
  };

  BlochModel model;
  if (family == "qwz") {
    model = build_qwz(require("m"));
  } else if (family == "haldane") {
    model = build_haldane(require("t1"), require("t2"), require("phi"), require("M"));
  } else if (family == "winding") {
    const double n_raw = require("N");
    const int n = static_cast<int>(std::lround(n_raw));
    if (n < 1 || std::abs(n_raw - n) > 0) {
      throw ModelError("model family 'winding' requires integer N >= 1");
    }
    model = build_winding_model(n, require("m"));
  } else {
    throw ModelError("unknown model family '" + family + "'");
  }

  if (config.value("flatten", false)) {
    std::vector<double> energies;
    if (config.contains("flat_energies")) {
      energies = config.at("flat_energies").get<std::vector<double>>();
    } else if (model.dim == 2) {
      energies = {-1.0, 1.0};
    } else {
      throw ModelError("flatten requested for a " + std::to_string(model.dim) +
                       "-band model: flat_energies must be given explicitly");
    }
    model = flatten_bands(model, energies);
  }
  return model;
}

}  // namespace topoqfi

#pragma once

#include "topoqfi/types.hpp"

#include <json.hpp>

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace topoqfi {

// A Bloch Hamiltonian family member: k in [-pi, pi)^2 -> N x N Hermitian
// matrix in a periodic gauge, H(k + 2pi e_i) = H(k) exactly.  Immutable after
// construction; the callables must be safe to invoke concurrently.
struct BlochModel {
  int dim = 0;
  double lattice_constant = 1.0;
  std::string name;
  std::map<std::string, double> params;

  std::function<Matrix(const Vec2&)> hamiltonian;

  // Analytic (dH/dkx, dH/dky) when the family provides one; empty otherwise,
  // in which case hamiltonian_gradient falls back to central differences.
  std::function<std::array<Matrix, 2>(const Vec2&)> gradient;

  bool has_analytic_gradient() const { return static_cast<bool>(gradient); }
};

/// Qi-Wu-Zhang Chern insulator:
///   H(k) = sin(kx) sx + sin(ky) sy + (m + cos kx + cos ky) sz.
BlochModel build_qwz(double m);

/// Haldane honeycomb model in periodic gauge; rejects t1 = 0.
BlochModel build_haldane(double t1, double t2, double phi, double mass);

/// Two-band family with lower-band |C| = winding in the topological window:
///   d(k) = (Re f, Im f, m + cos kx + cos ky),  f = (sin kx + i sin ky)^winding.
/// winding = 1 reproduces build_qwz(m) exactly.
BlochModel build_winding_model(int winding, double m);

/// Spectral flattening H_flat(k) = sum_n E_n P_n(k): eigenvalues replaced by
/// band_energies (strictly increasing, one per band), eigenprojectors kept.
/// Throws GapClosureError at evaluation if the base spectrum degenerates.
BlochModel flatten_bands(const BlochModel& base, const std::vector<double>& band_energies);

/// Dispatch on a model config block {family: ..., <family params>, flatten, flat_energies}.
BlochModel load_model(const nlohmann::json& config);

/// dH/dk_axis at k: analytic when the model carries one, otherwise central
/// finite differences with step 1e-5.
Matrix hamiltonian_gradient(const BlochModel& model, const Vec2& k, Axis axis);

}  // namespace topoqfi

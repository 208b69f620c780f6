#pragma once

#include "topoqfi/grid.hpp"
#include "topoqfi/model.hpp"
#include "topoqfi/types.hpp"

#include <vector>

namespace topoqfi {

// Eigen-decomposition of H(k) over a BzGrid: energies ascending per k,
// unit-norm states with a deterministic phase convention (largest-magnitude
// component real-positive, ties broken by lowest index).  Immutable after
// solve_bands.
struct BandData {
  BzGrid grid;
  std::vector<int> filled;  // occupied band indices, 0-based, sorted
  double gap_floor = 1e-6;
  double min_gap = 0.0;  // min over k and (filled, empty) pairs of |gap|

  RealMatrix energies;         // size() x dim
  std::vector<Matrix> states;  // per k: dim x dim, column n = |u_n(k)>

  int dim() const { return static_cast<int>(energies.cols()); }

  /// Delta_{mn}(k) = e_m(k) - e_n(k).
  double gap(int k_index, int m, int n) const {
    return energies(k_index, m) - energies(k_index, n);
  }

  bool is_filled(int band) const {
    for (int f : filled)
      if (f == band) return true;
    return false;
  }

  std::vector<int> empty_bands() const {
    std::vector<int> out;
    for (int n = 0; n < dim(); ++n)
      if (!is_filled(n)) out.push_back(n);
    return out;
  }
};

/// Diagonalize the model over the grid.  Throws GapClosureError if any
/// filled-empty gap drops below gap_floor, ModelError for non-Hermitian input.
BandData solve_bands(const BlochModel& model, const BzGrid& grid, const std::vector<int>& filled,
                     double gap_floor = 1e-6);

/// Velocity matrix V^i_{nm} = <u_n(k)| dH/dk_i |u_m(k)> in the band basis.
Matrix velocity_matrix(const BandData& bands, const BlochModel& model, int k_index, Axis axis);

/// One eigensolve at an arbitrary (off-grid) momentum, same conventions as
/// solve_bands.  degeneracy_floor guards adjacent-band splittings.
struct EigenSystem {
  RealVector energies;
  Matrix states;
};
EigenSystem solve_at(const BlochModel& model, const Vec2& k, double degeneracy_floor = 0.0);

}  // namespace topoqfi

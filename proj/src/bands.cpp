#include "topoqfi/bands.hpp"

#include "topoqfi/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace topoqfi {

namespace {

// Largest-magnitude component real-positive; ties broken by lowest index.
// Keeps finite-difference connections stable without affecting any
// gauge-invariant output.
void fix_phase(Eigen::Ref<Vector> u) {
  int best = 0;
  double best_mag = -1.0;
  for (int i = 0; i < u.size(); ++i) {
    const double mag = std::abs(u(i));
    if (mag > best_mag + 1e-14) {
      best_mag = mag;
      best = i;
    }
  }
  if (best_mag > 0.0) u *= std::conj(u(best)) / std::abs(u(best));
}

}  // namespace

EigenSystem solve_at(const BlochModel& model, const Vec2& k, double degeneracy_floor) {
  const Matrix h = model.hamiltonian(k);
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ModelError("model '" + model.name + "' is not Hermitian at k = (" +
                     std::to_string(k.x()) + ", " + std::to_string(k.y()) + ")");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) {
    throw ModelError("eigensolver failed for model '" + model.name + "'");
  }
  EigenSystem sys{es.eigenvalues(), es.eigenvectors()};
  if (degeneracy_floor > 0.0) {
    for (int n = 1; n < sys.energies.size(); ++n) {
      const double gap = sys.energies(n) - sys.energies(n - 1);
      if (gap < degeneracy_floor) throw GapClosureError(k, gap);
    }
  }
  for (int n = 0; n < sys.states.cols(); ++n) fix_phase(sys.states.col(n));
  return sys;
}

BandData solve_bands(const BlochModel& model, const BzGrid& grid, const std::vector<int>& filled,
                     double gap_floor) {
  if (filled.empty()) throw std::invalid_argument("solve_bands: filled set must be nonempty");
  std::vector<int> occ = filled;
  std::sort(occ.begin(), occ.end());
  occ.erase(std::unique(occ.begin(), occ.end()), occ.end());
  if (occ.front() < 0 || occ.back() >= model.dim ||
      static_cast<int>(occ.size()) >= model.dim) {
    throw std::invalid_argument("solve_bands: filled must be a proper subset of 0.." +
                                std::to_string(model.dim - 1));
  }

  BandData bands{grid, occ, gap_floor, 0.0, RealMatrix(grid.size(), model.dim),
                 std::vector<Matrix>(grid.size())};

  parallel_for_index(grid.size(), [&](int idx) {
    EigenSystem sys = solve_at(model, grid.k(idx));
    bands.energies.row(idx) = sys.energies.transpose();
    bands.states[idx] = std::move(sys.states);
  });

  // min gap over filled-empty pairs, deterministic scan order
  const std::vector<int> empty = bands.empty_bands();
  double min_gap = std::numeric_limits<double>::infinity();
  int worst_idx = 0;
  for (int idx = 0; idx < grid.size(); ++idx) {
    for (int n : occ) {
      for (int m : empty) {
        const double gap = std::abs(bands.gap(idx, m, n));
        if (gap < min_gap) {
          min_gap = gap;
          worst_idx = idx;
        }
      }
    }
  }
  if (!(min_gap > gap_floor)) {
    throw GapClosureError(grid.k(worst_idx), min_gap);
  }
  bands.min_gap = min_gap;
  return bands;
}

Matrix velocity_matrix(const BandData& bands, const BlochModel& model, int k_index, Axis axis) {
  if (k_index < 0 || k_index >= bands.grid.size()) {
    throw std::out_of_range("velocity_matrix: k index out of range");
  }
  const Matrix grad = hamiltonian_gradient(model, bands.grid.k(k_index), axis);
  return bands.states[k_index].adjoint() * grad * bands.states[k_index];
}

}  // namespace topoqfi

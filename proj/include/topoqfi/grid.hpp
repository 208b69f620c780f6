#pragma once

#include "topoqfi/types.hpp"

namespace topoqfi {

// Uniform grid over the Brillouin-zone torus [-pi, pi)^2, covering it exactly
// once (no duplicated boundary points).  Grid sums are normalized so that
//   sum_k f(k)  ==  (1/(nx*ny)) * sum_ij f(k_ij)  ~  int d^2k/(2pi)^2 f(k),
// which makes sum_k F^xy = C/(2pi) for a band with Chern number C.
class BzGrid {
 public:
  BzGrid(int nx, int ny) : nx_(nx), ny_(ny) {
    if (nx < 8 || ny < 8) {
      throw std::invalid_argument("BzGrid: nx and ny must be >= 8, got " +
                                  std::to_string(nx) + "x" + std::to_string(ny));
    }
  }

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int size() const { return nx_ * ny_; }

  int index(int i, int j) const { return i * ny_ + j; }
  int ix(int idx) const { return idx / ny_; }
  int iy(int idx) const { return idx % ny_; }

  Vec2 k(int i, int j) const {
    return {-kPi + 2.0 * kPi * i / nx_, -kPi + 2.0 * kPi * j / ny_};
  }
  Vec2 k(int idx) const { return k(ix(idx), iy(idx)); }

  double dkx() const { return 2.0 * kPi / nx_; }
  double dky() const { return 2.0 * kPi / ny_; }

  /// Measure weight of one grid point in sum_k (the d^2k/(2pi)^2 convention).
  double weight() const { return 1.0 / (static_cast<double>(nx_) * ny_); }

  /// Neighbor index with periodic wrap-around, step (di, dj) in grid units.
  int neighbor(int idx, int di, int dj) const {
    int i = (ix(idx) + di % nx_ + nx_) % nx_;
    int j = (iy(idx) + dj % ny_ + ny_) % ny_;
    return index(i, j);
  }

 private:
  int nx_;
  int ny_;
};

}  // namespace topoqfi

#pragma once

#include "topoqfi/bands.hpp"

#include <array>
#include <iosfwd>
#include <vector>

namespace topoqfi {

// Multiband quantum-geometric tensor field over the grid,
//   G^{ij}_{nm}(k) = V^i_{nm} V^j_{mn} / Delta_{nm}^2,
// together with the derived single-band quantum metric, Berry curvature and
// Chern numbers.  Curvature comes via two permanently independent routes:
// the Im-G integral stored in `chern` and the Fukui-Hatsugai-Suzuki plaquette
// sum in `chern_plaquette`.
struct QgtField {
  BzGrid grid;
  std::vector<int> filled;
  int dim = 0;

  // qgt[f][i][j] is nk x dim: row k, column m holds G^{ij}_{n_f, m}(k); the
  // m == n_f column is zero.
  std::vector<std::array<std::array<Matrix, 2>, 2>> qgt;

  // Single-band fields, nk x nf: G^{ij}_n = sum_{m != n} Re G^{ij}_{nm},
  // F^{xy}_n = -2 Im sum_{m != n} G^{xy}_{nm}.
  RealMatrix metric_xx;
  RealMatrix metric_yy;
  RealMatrix metric_xy;
  RealMatrix curvature;

  std::vector<double> chern;            // 2pi * sum_k F^{xy}_n, near-integer
  std::vector<double> chern_plaquette;  // FHS result, integer-exact

  int n_filled() const { return static_cast<int>(filled.size()); }
};

/// Per-plaquette Berry phases per filled band; their sum is exactly
/// 2pi * (integer) up to floating-point rounding.
struct PlaquetteField {
  BzGrid grid;
  std::vector<int> filled;
  RealMatrix phases;  // nk x nf, plaquette based at grid point k
  std::vector<double> chern;
};

QgtField qgt_multiband(const BandData& bands, const BlochModel& model);

PlaquetteField berry_curvature_plaquette(const BandData& bands);

/// Wilczek-Zee connection A^j_{nm}(k) = i <u_n(k)| d_j u_m(k)> by a 4th-order
/// central stencil over grid neighbors, with neighbor phases aligned to the
/// k-point gauge.  Gauge-dependent; off-diagonal moduli are not.
Matrix wz_connection_fd(const BandData& bands, int k_index, Axis axis);

/// Field dump: kx, ky, band, Gxx, Gyy, Gxy, Fxy; one row per grid point per
/// filled band, shortest round-trip decimals.
void write_geometry_csv(const QgtField& field, std::ostream& os);

}  // namespace topoqfi

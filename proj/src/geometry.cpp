#include "topoqfi/geometry.hpp"

#include "topoqfi/csv.hpp"
#include "topoqfi/parallel.hpp"

#include <cmath>
#include <complex>
#include <ostream>

namespace topoqfi {

namespace {

constexpr double kDegeneracyFloor = 1e-6;

}  // namespace

QgtField qgt_multiband(const BandData& bands, const BlochModel& model) {
  const BzGrid& grid = bands.grid;
  const int dim = bands.dim();
  const int nf = static_cast<int>(bands.filled.size());
  const int nk = grid.size();

  QgtField field{grid,
                 bands.filled,
                 dim,
                 {},
                 RealMatrix::Zero(nk, nf),
                 RealMatrix::Zero(nk, nf),
                 RealMatrix::Zero(nk, nf),
                 RealMatrix::Zero(nk, nf),
                 std::vector<double>(nf, 0.0),
                 std::vector<double>(nf, 0.0)};
  field.qgt.resize(nf);
  for (int f = 0; f < nf; ++f)
    for (auto& row : field.qgt[f])
      for (auto& m : row) m = Matrix::Zero(nk, dim);

  parallel_for_index(nk, [&](int idx) {
    const Matrix vx = velocity_matrix(bands, model, idx, Axis::X);
    const Matrix vy = velocity_matrix(bands, model, idx, Axis::Y);
    const Matrix* v[2] = {&vx, &vy};
    for (int f = 0; f < nf; ++f) {
      const int n = bands.filled[f];
      for (int m = 0; m < dim; ++m) {
        if (m == n) continue;
        const double delta = bands.gap(idx, n, m);
        if (std::abs(delta) < kDegeneracyFloor) {
          throw GapClosureError(grid.k(idx), std::abs(delta));
        }
        const double inv_d2 = 1.0 / (delta * delta);
        for (int i = 0; i < 2; ++i) {
          for (int j = 0; j < 2; ++j) {
            field.qgt[f][i][j](idx, m) = (*v[i])(n, m) * (*v[j])(m, n) * inv_d2;
          }
        }
        field.metric_xx(idx, f) += field.qgt[f][0][0](idx, m).real();
        field.metric_yy(idx, f) += field.qgt[f][1][1](idx, m).real();
        field.metric_xy(idx, f) += field.qgt[f][0][1](idx, m).real();
        field.curvature(idx, f) += -2.0 * field.qgt[f][0][1](idx, m).imag();
      }
    }
  });

  // sum_k F = C/(2pi) with the normalized grid measure
  for (int f = 0; f < nf; ++f) {
    field.chern[f] = 2.0 * kPi * grid.weight() * field.curvature.col(f).sum();
  }
  const PlaquetteField plaq = berry_curvature_plaquette(bands);
  field.chern_plaquette = plaq.chern;
  return field;
}

PlaquetteField berry_curvature_plaquette(const BandData& bands) {
  const BzGrid& grid = bands.grid;
  const int nf = static_cast<int>(bands.filled.size());
  const int nk = grid.size();

  PlaquetteField field{grid, bands.filled, RealMatrix::Zero(nk, nf),
                       std::vector<double>(nf, 0.0)};

  auto link = [&](int from, int to, int band) {
    const Complex overlap =
        bands.states[from].col(band).dot(bands.states[to].col(band));
    if (std::abs(overlap) < 1e-12) {
      throw GapClosureError(grid.k(from), std::abs(overlap));
    }
    return overlap / std::abs(overlap);
  };

  parallel_for_index(nk, [&](int idx) {
    const int right = grid.neighbor(idx, 1, 0);
    const int up = grid.neighbor(idx, 0, 1);
    const int diag = grid.neighbor(idx, 1, 1);
    for (int f = 0; f < nf; ++f) {
      const int n = bands.filled[f];
      const Complex loop = link(idx, right, n) * link(right, diag, n) *
                           std::conj(link(up, diag, n)) * std::conj(link(idx, up, n));
      // arg of the Wilson loop is -curvature * plaquette area; store the
      // curvature-signed phase so the band sum is +2pi C
      field.phases(idx, f) = -std::arg(loop);
    }
  });

  for (int f = 0; f < nf; ++f) {
    field.chern[f] = field.phases.col(f).sum() / (2.0 * kPi);
  }
  return field;
}

Matrix wz_connection_fd(const BandData& bands, int k_index, Axis axis) {
  const BzGrid& grid = bands.grid;
  const int dim = bands.dim();
  if (k_index < 0 || k_index >= grid.size()) {
    throw std::out_of_range("wz_connection_fd: k index out of range");
  }
  const double h = (axis == Axis::X) ? grid.dkx() : grid.dky();
  const int di = (axis == Axis::X) ? 1 : 0;
  const int dj = (axis == Axis::X) ? 0 : 1;

  const std::array<int, 4> steps = {-2, -1, 1, 2};
  std::array<int, 4> at{};
  for (int s = 0; s < 4; ++s) {
    at[s] = grid.neighbor(k_index, steps[s] * di, steps[s] * dj);
  }
  // degeneracy guard at the stencil points
  for (int idx : {k_index, at[0], at[1], at[2], at[3]}) {
    for (int n = 1; n < dim; ++n) {
      const double gap = bands.energies(idx, n) - bands.energies(idx, n - 1);
      if (gap < kDegeneracyFloor) throw GapClosureError(grid.k(idx), gap);
    }
  }

  const Matrix& u0 = bands.states[k_index];
  Matrix connection(dim, dim);
  for (int m = 0; m < dim; ++m) {
    // align neighbor phases to |u_m(k)> so the stencil differentiates a
    // locally smooth gauge
    std::array<Vector, 4> u{};
    for (int s = 0; s < 4; ++s) {
      Vector us = bands.states[at[s]].col(m);
      const Complex overlap = u0.col(m).dot(us);
      if (std::abs(overlap) < 1e-12) {
        throw GapClosureError(grid.k(at[s]), std::abs(overlap));
      }
      u[s] = us * (std::conj(overlap) / std::abs(overlap));
    }
    const Vector du = (-u[3] + 8.0 * u[2] - 8.0 * u[1] + u[0]) / (12.0 * h);
    connection.col(m) = Complex(0.0, 1.0) * (u0.adjoint() * du);
  }
  return connection;
}

void write_geometry_csv(const QgtField& field, std::ostream& os) {
  os << "kx,ky,band,Gxx,Gyy,Gxy,Fxy\n";
  for (int idx = 0; idx < field.grid.size(); ++idx) {
    const Vec2 k = field.grid.k(idx);
    for (int f = 0; f < field.n_filled(); ++f) {
      os << csv::number(k.x()) << ',' << csv::number(k.y()) << ',' << (field.filled[f] + 1)
         << ',' << csv::number(field.metric_xx(idx, f)) << ','
         << csv::number(field.metric_yy(idx, f)) << ',' << csv::number(field.metric_xy(idx, f))
         << ',' << csv::number(field.curvature(idx, f)) << '\n';
    }
  }
}

}  // namespace topoqfi

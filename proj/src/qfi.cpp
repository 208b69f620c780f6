#include "topoqfi/qfi.hpp"

#include "topoqfi/parallel.hpp"
#include "topoqfi/quadrature.hpp"

#include <cmath>
#include <iostream>

namespace topoqfi {

namespace {

constexpr double kDegeneracyFloor = 1e-6;

Vec2 reduce_to_bz(Vec2 k) {
  for (int i = 0; i < 2; ++i) {
    k[i] -= 2.0 * kPi * std::floor((k[i] + kPi) / (2.0 * kPi));
  }
  return k;
}

Vec2 q_along(double q, Axis axis) {
  return axis == Axis::X ? Vec2{q, 0.0} : Vec2{0.0, q};
}

bool is_dispersive(const BandData& bands) {
  for (int n = 0; n < bands.dim(); ++n) {
    const double spread =
        bands.energies.col(n).maxCoeff() - bands.energies.col(n).minCoeff();
    if (spread > 1e-9) return true;
  }
  return false;
}

// <u_n(k - (1-a) q)| dH/dk_i (k) |u_m(k + a q)> for all n, m at once.
Matrix shifted_overlaps(const BlochModel& model, const Matrix& grad, const Vec2& k, const Vec2& q,
                        double alpha) {
  const EigenSystem minus = solve_at(model, reduce_to_bz(k - (1.0 - alpha) * q), kDegeneracyFloor);
  const EigenSystem plus = solve_at(model, reduce_to_bz(k + alpha * q), kDegeneracyFloor);
  return minus.states.adjoint() * grad * plus.states;
}

enum class SpectralWeight { Unit, Tanh, Coth };

// sum_k int_0^1 da sum_pairs w(beta, Delta) Q^(a)_{nm}(k, q) / Delta_{mn}(k)^2
// with the normalized grid measure.  Unit weight sums m != n (all partners,
// per the flat-band formula); thermal weights sum filled -> empty transitions.
double lehmann_sum(const BandData& bands, const BlochModel& model, const Vec2& qvec, Axis axis,
                   int n_alpha, double beta, SpectralWeight weight) {
  const BzGrid& grid = bands.grid;
  const Quadrature quad = gauss_legendre_unit(n_alpha);
  const std::vector<int> empty = bands.empty_bands();

  std::vector<double> per_k(grid.size(), 0.0);
  parallel_for_index(grid.size(), [&](int idx) {
    const Vec2 k = grid.k(idx);
    const Matrix grad = hamiltonian_gradient(model, k, axis);
    double acc = 0.0;
    for (int a = 0; a < quad.size(); ++a) {
      const Matrix mel = shifted_overlaps(model, grad, k, qvec, quad.nodes[a]);
      double pair_sum = 0.0;
      for (int n : bands.filled) {
        if (weight == SpectralWeight::Unit) {
          for (int m = 0; m < bands.dim(); ++m) {
            if (m == n) continue;
            const double delta = bands.gap(idx, m, n);
            if (std::abs(delta) < kDegeneracyFloor) {
              throw GapClosureError(k, std::abs(delta));
            }
            pair_sum += std::norm(mel(n, m)) / (delta * delta);
          }
        } else {
          for (int m : empty) {
            const double delta = bands.gap(idx, m, n);  // > 0: m empty, n filled
            const double thermal = (weight == SpectralWeight::Tanh)
                                       ? std::tanh(0.5 * beta * delta)
                                       : 1.0 / std::tanh(0.5 * beta * delta);
            pair_sum += thermal * std::norm(mel(n, m)) / (delta * delta);
          }
        }
      }
      acc += quad.weights[a] * pair_sum;
    }
    per_k[idx] = acc;
  });

  double total = 0.0;
  for (double v : per_k) total += v;
  return grid.weight() * total;
}

void warn_if_dispersive(const BandData& bands, const BlochModel& model, const char* op) {
  if (is_dispersive(bands)) {
    std::cerr << "warning: " << op << " called on dispersive model '" << model.name
              << "'; the flat-band formula is approximate there\n";
  }
}

}  // namespace

std::vector<QTensorSample> q_tensor(const BandData& bands, const BlochModel& model, int k_index,
                                    const Vec2& q, double alpha, Axis axis) {
  if (k_index < 0 || k_index >= bands.grid.size()) {
    throw std::out_of_range("q_tensor: k index out of range");
  }
  if (alpha < 0.0 || alpha > 1.0) {
    throw std::invalid_argument("q_tensor: alpha must lie in [0, 1]");
  }
  const Vec2 k = bands.grid.k(k_index);
  const Matrix grad = hamiltonian_gradient(model, k, axis);
  const Matrix mel = shifted_overlaps(model, grad, k, q, alpha);

  std::vector<QTensorSample> samples;
  samples.reserve(bands.filled.size() * (bands.dim() - 1));
  for (int n : bands.filled) {
    for (int m = 0; m < bands.dim(); ++m) {
      if (m == n) continue;
      samples.push_back({n, m, std::norm(mel(n, m))});
    }
  }
  return samples;
}

double qfi_direct(const BandData& bands, const BlochModel& model, double q, Direction dir,
                  int n_alpha) {
  if (dir == Direction::Averaged) {
    return 0.5 * (qfi_direct(bands, model, q, Direction::X, n_alpha) +
                  qfi_direct(bands, model, q, Direction::Y, n_alpha));
  }
  warn_if_dispersive(bands, model, "qfi_direct");
  if (q == 0.0) return 0.0;
  const Axis axis = (dir == Direction::X) ? Axis::X : Axis::Y;
  const double sum = lehmann_sum(bands, model, q_along(q, axis), axis, n_alpha,
                                 /*beta=*/0.0, SpectralWeight::Unit);
  return 4.0 * q * q * sum;
}

double qfi_finite_beta(const BandData& bands, const BlochModel& model, double q, Direction dir,
                       double beta, int n_alpha) {
  if (!(beta > 0.0)) throw std::invalid_argument("qfi_finite_beta: beta must be positive");
  if (dir == Direction::Averaged) {
    return 0.5 * (qfi_finite_beta(bands, model, q, Direction::X, beta, n_alpha) +
                  qfi_finite_beta(bands, model, q, Direction::Y, beta, n_alpha));
  }
  warn_if_dispersive(bands, model, "qfi_finite_beta");
  if (q == 0.0) return 0.0;
  const Axis axis = (dir == Direction::X) ? Axis::X : Axis::Y;
  const double sum =
      lehmann_sum(bands, model, q_along(q, axis), axis, n_alpha, beta, SpectralWeight::Tanh);
  return 4.0 * q * q * sum;
}

double static_structure_factor(const BandData& bands, const BlochModel& model, double q,
                               Direction dir, double beta, int n_alpha) {
  if (!(beta > 0.0)) {
    throw std::invalid_argument("static_structure_factor: beta must be positive");
  }
  if (!(bands.min_gap > 0.0)) {
    throw GapClosureError(Vec2::Zero(), bands.min_gap);
  }
  if (dir == Direction::Averaged) {
    return 0.5 * (static_structure_factor(bands, model, q, Direction::X, beta, n_alpha) +
                  static_structure_factor(bands, model, q, Direction::Y, beta, n_alpha));
  }
  if (q == 0.0) return 0.0;
  const Axis axis = (dir == Direction::X) ? Axis::X : Axis::Y;
  const double sum =
      lehmann_sum(bands, model, q_along(q, axis), axis, n_alpha, beta, SpectralWeight::Coth);
  return q * q * sum;
}

double QfiExpansion::validity_qmax() const {
  if (b <= 0.0) return 0.2;
  return std::min(0.2, 0.5 * std::sqrt(a / (2.0 * b)));
}

QfiExpansion qfi_expansion(const QgtField& field, Direction dir) {
  if (dir == Direction::Averaged) {
    const QfiExpansion fx = qfi_expansion(field, Direction::X);
    const QfiExpansion fy = qfi_expansion(field, Direction::Y);
    QfiExpansion avg;
    avg.direction = Direction::Averaged;
    avg.bands = fx.bands;
    avg.a = 0.5 * (fx.a + fy.a);
    avg.b = 0.5 * (fx.b + fy.b);
    avg.a_per_band.resize(fx.a_per_band.size());
    avg.b_per_band.resize(fx.b_per_band.size());
    for (std::size_t i = 0; i < fx.a_per_band.size(); ++i) {
      avg.a_per_band[i] = 0.5 * (fx.a_per_band[i] + fy.a_per_band[i]);
      avg.b_per_band[i] = 0.5 * (fx.b_per_band[i] + fy.b_per_band[i]);
    }
    return avg;
  }

  const int i = (dir == Direction::X) ? 0 : 1;
  QfiExpansion out;
  out.direction = dir;
  out.bands = field.filled;
  const double w = field.grid.weight();
  for (int f = 0; f < field.n_filled(); ++f) {
    double a_band = 0.0;
    double b_band = 0.0;
    const Matrix& g = field.qgt[f][i][i];
    for (int idx = 0; idx < field.grid.size(); ++idx) {
      for (int m = 0; m < field.dim; ++m) {
        const double re = g(idx, m).real();
        a_band += re;
        b_band += re * re;
      }
    }
    out.a_per_band.push_back(4.0 * w * a_band);
    out.b_per_band.push_back(4.0 / 3.0 * w * b_band);
    out.a += out.a_per_band.back();
    out.b += out.b_per_band.back();
  }
  return out;
}

double expansion_cross_term_two_band(const BandData& bands, const BlochModel& model, int k_index) {
  if (bands.dim() != 2) {
    throw ModelError("expansion_cross_term_two_band: needs a two-band model, got dim = " +
                     std::to_string(bands.dim()));
  }
  const int n = bands.filled.front();
  const int m = 1 - n;

  const Matrix conn = wz_connection_fd(bands, k_index, Axis::X);
  const Matrix vel = velocity_matrix(bands, model, k_index, Axis::X);

  // Taylor coefficients of <u_n(k-(1-a)q)|V|u_m(k+aq)> in the band basis:
  //   O(q):   a X - (1-a) Y,  X = -i (V A)_{nm},  Y = i (A V)_{nm}
  //   O(q^2): a^2/2 P + (1-a)^2/2 R - a(1-a) Z,
  //           Z = (A V A)_{nm},  P = -(V A A)_{nm},  R = -(A A V)_{nm}
  // (connection-derivative pieces drop out of the real parts for flat bands).
  const Complex i_unit(0.0, 1.0);
  const Complex x_lin = -i_unit * (vel * conn)(n, m);
  const Complex y_lin = i_unit * (conn * vel)(n, m);
  const Complex z_cross = (conn * vel * conn)(n, m);
  const Complex p_sq = -(vel * conn * conn)(n, m);
  const Complex r_sq = -(conn * conn * vel)(n, m);
  const Complex v_mn = vel(m, n);

  const double s_alpha2 = std::norm(x_lin) + (v_mn * p_sq).real();
  const double s_alphabar2 = std::norm(y_lin) + (v_mn * r_sq).real();
  const double s_cross =
      -2.0 * (x_lin * std::conj(y_lin)).real() - 2.0 * (v_mn * z_cross).real();

  // alpha averages: int a^2 = int (1-a)^2 = 1/3, int a(1-a) = 1/6
  return (s_alpha2 + s_alphabar2) / 3.0 + s_cross / 6.0;
}

double linear_term_cancellation_check(const BandData& bands, const BlochModel& model, int k_index,
                                      double q) {
  if (std::abs(q) > 0.1) {
    throw std::invalid_argument("linear_term_cancellation_check: |q| must be <= 0.1");
  }
  const Quadrature quad = gauss_legendre_unit(16);
  const Vec2 k = bands.grid.k(k_index);
  const Matrix grad = hamiltonian_gradient(model, k, Axis::X);

  auto alpha_integrated = [&](double qs) {
    double acc = 0.0;
    for (int a = 0; a < quad.size(); ++a) {
      const Matrix mel = shifted_overlaps(model, grad, k, Vec2{qs, 0.0}, quad.nodes[a]);
      double pair_sum = 0.0;
      for (int n : bands.filled) {
        for (int m = 0; m < bands.dim(); ++m) {
          if (m == n) continue;
          const double delta = bands.gap(k_index, m, n);
          pair_sum += std::norm(mel(n, m)) / (delta * delta);
        }
      }
      acc += quad.weights[a] * pair_sum;
    }
    return acc;
  };

  const double plus = alpha_integrated(q);
  if (plus == 0.0) return 0.0;
  const double minus = alpha_integrated(-q);
  return std::abs(plus - minus) / plus;
}

}  // namespace topoqfi

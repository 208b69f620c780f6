#pragma once

#include "topoqfi/geometry.hpp"

#include <optional>
#include <string>
#include <vector>

namespace topoqfi {

/// One Q-tensor value Q^(alpha)_{nm}(k, q) = |<u_{n,k-(1-a)q}| dH/dk_i(k) |u_{m,k+aq}>|^2.
struct QTensorSample {
  int n = 0;  // filled band index
  int m = 0;  // partner band index
  double value = 0.0;
};

/// Q-tensor samples for all pairs (n in filled, m != n), evaluated by fresh
/// eigensolves at the two shifted momenta (reduced mod 2pi); phase-convention
/// independent by construction.
std::vector<QTensorSample> q_tensor(const BandData& bands, const BlochModel& model, int k_index,
                                    const Vec2& q, double alpha, Axis axis = Axis::X);

/// Momentum-resolved QFI of the dispersionless insulator at T = 0:
///   f_Q(q) = 4 q^2 int_0^1 da sum_{n in filled, m != n} sum_k Q^(a)_{nm}(k, q) / Delta_{mn}(k)^2
/// with Gauss-Legendre quadrature in alpha.  Warns on stderr when the model
/// is dispersive (the flat-band formula is then only approximate).
double qfi_direct(const BandData& bands, const BlochModel& model, double q, Direction dir,
                  int n_alpha = 16);

/// Small-q expansion f_Q(q) = A q^2 - B q^4 with
///   A = 4 sum_{n,m} sum_k Re G^{ii}_{nm},   B = (4/3) sum_{n,m} sum_k [Re G^{ii}_{nm}]^2,
/// per direction i, averaged over x and y when requested.
struct QfiExpansion {
  double a = 0.0;
  double b = 0.0;
  Direction direction = Direction::Averaged;
  std::vector<int> bands;             // filled band indices
  std::vector<double> a_per_band;
  std::vector<double> b_per_band;

  /// Trust region of the truncated expansion; qfi_direct is the authority beyond it.
  double validity_qmax() const;
};

QfiExpansion qfi_expansion(const QgtField& field, Direction dir = Direction::Averaged);

/// Finite-temperature QFI: each filled->empty transition keeps its T = 0
/// weight times tanh(beta Delta / 2); occupations stay at integer filling.
double qfi_finite_beta(const BandData& bands, const BlochModel& model, double q, Direction dir,
                       double beta, int n_alpha = 16);

/// Static structure factor: same Lehmann sum with coth(beta Delta / 2) and a
/// prefactor such that 4 S(q) >= f_Q(q, beta), with equality as beta -> inf.
double static_structure_factor(const BandData& bands, const BlochModel& model, double q,
                               Direction dir, double beta, int n_alpha = 16);

/// Coefficient of q^2 in the alpha-averaged two-band Q-tensor expansion,
/// assembled from Wilczek-Zee connection and velocity products; equals
/// -(1/3) Delta^2 [G^xx]^2 for a flat two-band model.
double expansion_cross_term_two_band(const BandData& bands, const BlochModel& model, int k_index);

/// Relative odd-in-q residual r = |f(q) - f(-q)| / f(q) of the alpha-integrated
/// Q-tensor sum at fixed k; scales at least as q^2 because the linear terms
/// cancel.  Returns 0 when the sum itself vanishes.
double linear_term_cancellation_check(const BandData& bands, const BlochModel& model, int k_index,
                                      double q);

/// Sampled f_Q(q) curve with provenance.
struct QfiCurve {
  std::vector<double> q;
  std::vector<double> f;
  double beta = std::numeric_limits<double>::infinity();
  std::string method;  // "direct" | "perturbative" | "finite-beta"
  std::string label;
  std::optional<double> q_star;
};

}  // namespace topoqfi

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace topoqfi {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Vec2 = Eigen::Vector2d;

constexpr double kPi = 3.14159265358979323846;

/// Cartesian axis of a momentum derivative or response direction.
enum class Axis : int { X = 0, Y = 1 };

/// Response direction for QFI-type quantities; Averaged means (x + y)/2.
enum class Direction : int { X = 0, Y = 1, Averaged = 2 };

inline const char* to_string(Direction d) {
  switch (d) {
    case Direction::X: return "x";
    case Direction::Y: return "y";
    default: return "averaged";
  }
}

/// Thrown when a spectral gap needed by an operation closes (or nearly closes).
class GapClosureError : public std::runtime_error {
 public:
  GapClosureError(const Vec2& k, double gap)
      : std::runtime_error("gap closure at k = (" + std::to_string(k.x()) + ", " +
                           std::to_string(k.y()) + "), |gap| = " + std::to_string(gap)),
        k_(k),
        gap_(gap) {}

  const Vec2& k() const { return k_; }
  double gap() const { return gap_; }

 private:
  Vec2 k_;
  double gap_;
};

/// Invalid model construction or a model violating its contract (e.g. non-Hermitian H).
class ModelError : public std::runtime_error {
 public:
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace topoqfi

#include "topoqfi/quadrature.hpp"

#include "topoqfi/types.hpp"

#include <cmath>
#include <stdexcept>

namespace topoqfi {

// Roots of the Legendre polynomial by Newton iteration from the Chebyshev
// initial guess; weights 2 / ((1 - x^2) P_n'(x)^2), then mapped to [0, 1].
Quadrature gauss_legendre_unit(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre_unit: need n >= 1 nodes");

  Quadrature q;
  q.nodes.resize(n);
  q.weights.resize(n);

  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // recurrence for P_n(x) and P_n'(x)
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // map [-1,1] -> [0,1]; nodes come out descending in x, store ascending
    q.nodes[i] = (1.0 - x) / 2.0;
    q.nodes[n - 1 - i] = (1.0 + x) / 2.0;
    q.weights[i] = w / 2.0;
    q.weights[n - 1 - i] = w / 2.0;
  }
  return q;
}

}  // namespace topoqfi

#pragma once

#include <vector>

namespace topoqfi {

/// Gauss-Legendre nodes and weights on [0, 1].
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;

  int size() const { return static_cast<int>(nodes.size()); }

  template <class F>
  double integrate(F&& f) const {
    double acc = 0.0;
    for (int i = 0; i < size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

Quadrature gauss_legendre_unit(int n);

}  // namespace topoqfi

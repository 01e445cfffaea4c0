#pragma once

#include <vector>

namespace renormlab {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;  ///< normalized to sum to 1
};

/// n-point Gauss rule on [-1, 1] for the weight (1 - t^2)^alpha, alpha > -1,
/// by Golub-Welsch. Weights are normalized to total mass 1.
QuadratureRule gauss_gegenbauer(int n, double alpha);

}  // namespace renormlab

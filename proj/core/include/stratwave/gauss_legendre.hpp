#pragma once

#include <memory>
#include <vector>

namespace stratwave {

// Gauss-Legendre nodes and weights on [-1, 1], ascending nodes.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int size() const { return static_cast<int>(nodes.size()); }
};

// Cached and shared between threads; computed once per n.
std::shared_ptr<const GaussRule> gauss_legendre(int n);

// Rule mapped to [a, b].
GaussRule gauss_legendre(int n, double a, double b);

}  // namespace stratwave

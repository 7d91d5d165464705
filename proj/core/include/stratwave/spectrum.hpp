#pragma once

#include <span>
#include <vector>

#include "stratwave/group_model.hpp"

namespace stratwave {

using MultiIndex = std::vector<int>;

// Smooth bump supported in [a, b], identically 1 on the middle half.
struct WindowSpec {
  double a = 1.0;
  double b = 2.0;
  void validate() const;
};

double window(const WindowSpec& w, double s);

std::vector<double> zeta_components(const GroupSpec& spec, const MultiIndex& alpha, std::span<const double> lambda);
double zeta(const GroupSpec& spec, const MultiIndex& alpha, std::span<const double> lambda);
// prod_j theta(zeta_j(alpha, lambda))
double window_product(const GroupSpec& spec, const WindowSpec& w, const MultiIndex& alpha, std::span<const double> lambda);

struct SpectralPoint {
  MultiIndex alpha;
  std::vector<double> lambda;
  std::vector<double> nu;
  std::vector<double> eta;
  std::vector<double> zeta_j;
  double zeta = 0.0;
  std::vector<double> window_j;
  double window = 0.0;
};

SpectralPoint make_spectral_point(const GroupSpec& spec, const WindowSpec& w, const MultiIndex& alpha,
                                  std::span<const double> lambda, std::span<const double> nu = {});

// Radial shell |lambda_block| in (r_min, r_max) on center coordinates
// [center_offset, center_offset + dim).
struct ShellBounds {
  int center_offset = 0;
  int dim = 0;
  double r_min = 0.0;
  double r_max = 0.0;
};

struct AlphaTerm {
  MultiIndex alpha;
  std::vector<ShellBounds> lambda_support;
  // gamma = m lambda; equals lambda_support when m = 0.
  std::vector<ShellBounds> gamma_support;
};

struct AlphaSupport {
  int m = 0;
  std::vector<AlphaTerm> terms;  // lexicographic in alpha
  double gamma_r_min = 0.0;      // Euclidean radii of gamma over all terms; 0,0 when empty
  double gamma_r_max = 0.0;
};

// All multi-indices of length d with |alpha| = m, lexicographic.
std::vector<MultiIndex> multi_indices(int d, int m);

AlphaSupport alpha_support(const GroupSpec& spec, const WindowSpec& w, int m);

// grad_lambda zeta(alpha, lambda) by the closed form on catalog groups,
// centred differences otherwise.
std::vector<double> zeta_gradient(const GroupSpec& spec, const MultiIndex& alpha, std::span<const double> lambda);

}  // namespace stratwave

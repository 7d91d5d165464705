#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace stratwave {

// Spherical shell r_min <= |x - center| <= r_max in R^dim, dim in {1, 2, 3}.
// In one dimension the shell has two components; sign = +1 or -1 keeps one.
struct Shell {
  int dim = 1;
  double r_min = 0.0;
  double r_max = 1.0;
  std::vector<double> center;
  int sign = 0;
  // dim == 3 only: restricts the polar angle to cos(theta) >= cos_min.
  double cos_min = -1.0;
};

// Cartesian product of shells; coordinates are concatenated in shell order.
struct IntegrationDomain {
  std::vector<Shell> shells;
  int dimension() const;
  // 1 axis per one-dimensional shell, 2 (radius, angle) in the plane,
  // 3 (radius, polar, azimuth) in space.
  int axis_count() const;
  double volume() const;
};

struct PhaseAmplitude {
  double phase = 0.0;
  std::complex<double> amplitude;
};

// Integrand e^{i t Phi(x)} A(x).
struct OscIntegral {
  IntegrationDomain domain;
  std::function<PhaseAmplitude(std::span<const double>)> integrand;
  double t = 0.0;
  // Bound on the variation of Phi along each axis over the domain (radians at
  // t = 1); sets the initial node count. Missing entries count as 0.
  std::vector<double> osc_scale;
};

OscIntegral make_integral(IntegrationDomain domain, std::function<double(std::span<const double>)> phase,
                          std::function<std::complex<double>(std::span<const double>)> amplitude, double t,
                          std::vector<double> osc_scale = {});

struct QuadratureBudget {
  double c0 = 1.5;
  int min_nodes = 16;
  int max_nodes_per_axis = 1 << 15;
  double max_total_nodes = 4e8;
  // Accept when |v(N) - v(2N)| <= abs_tol + rel_tol * \int |A|.
  double abs_tol = 1e-13;
  double rel_tol = 1e-8;
};

struct QuadratureResult {
  std::complex<double> value;
  double error_estimate = 0.0;
  long long nodes_used = 0;
  double abs_integral = 0.0;  // \int |A| on the accepted rule
};

// Phase variation along each axis measured on a coarse grid of the domain,
// restricted to points where the amplitude is nonzero.
std::vector<double> estimate_osc_scale(const OscIntegral& integral, int samples_per_axis = 17);

// Initial per-axis node counts for an integral (before doubling).
std::vector<int> initial_nodes(const OscIntegral& integral, const QuadratureBudget& budget);

QuadratureResult integrate(const OscIntegral& integral, const QuadratureBudget& budget = {});

// Single tensor rule with the given per-axis node counts.
QuadratureResult integrate_fixed(const OscIntegral& integral, std::span<const int> nodes);

struct MonteCarloResult {
  std::complex<double> value;
  double standard_error = 0.0;
  long long samples = 0;
};

MonteCarloResult monte_carlo_check(const OscIntegral& integral, long long samples, std::uint64_t seed);

}  // namespace stratwave

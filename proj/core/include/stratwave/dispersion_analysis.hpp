#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "stratwave/group_model.hpp"
#include "stratwave/oscillatory_quadrature.hpp"
#include "stratwave/propagator_kernel.hpp"
#include "stratwave/spectrum.hpp"

namespace stratwave {

struct RankThresholds {
  double tol_zero = 1e-6;
  double tol_rank = 1e-3;
};

struct RankSample {
  MultiIndex alpha;
  std::vector<double> lambda;
  std::vector<double> singular_values;  // descending
  double hessian_scale = 0.0;           // zeta / |lambda|^2
  int rank = 0;
  bool pass = false;
  double euler_residual = 0.0;  // |D^2 zeta lambda_hat| / max(sigma_1, scale)
};

struct RankReport {
  std::vector<RankSample> samples;
  RankThresholds thresholds;
  bool pass = true;
  double max_euler_residual = 0.0;
};

// Hessian of zeta(alpha, .) at lambda by centred differences (step 1e-4 |lambda|).
Eigen::MatrixXd zeta_hessian(const GroupSpec& spec, const MultiIndex& alpha, std::span<const double> lambda);

RankSample hessian_rank(const GroupSpec& spec, const MultiIndex& alpha, std::span<const double> lambda,
                        const RankThresholds& thresholds = {});

// Random unit lambda away from the degenerate set, every alpha with |alpha| <= 4.
RankReport assumption_check(const GroupSpec& spec, int sample_count, std::uint64_t seed,
                            const RankThresholds& thresholds = {});

// Number of independent factors r of a tensor group (1 otherwise).
int factor_count(const GroupSpec& spec);
// -(k + p - r) / 2
double theoretical_slope(const GroupSpec& spec);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int points = 0;
};

// Least squares on (log x, log y) with a 95% Student-t interval.
SlopeFit fit_loglog(std::span<const double> x, std::span<const double> y);

// Stationary points grad zeta(alpha, lambda_hat) for admissible alpha with
// |alpha| <= m_grid, plus a 3^p box spanning the alpha = 0 points.
std::vector<std::vector<double>> stationary_z_grid(const GroupSpec& spec, const WindowSpec& w, int m_grid,
                                                   bool with_box = true);

// "a:b:Nlog" or "a:b:Nlin" or a comma list.
std::vector<double> parse_t_grid(const std::string& text);

struct DecayOptions {
  int m_max = 6;
  double tol = 1e-6;
  double slope_tolerance = 0.1;
  double certificate_fraction = 0.01;
  int min_points = 6;
  QuadratureBudget budget;
  int jobs = 0;
};

struct DecaySample {
  double t = 0.0;
  std::vector<double> z;
  KernelValue value;
  bool ok = false;
  std::string error;
};

struct DecayReport {
  std::vector<double> t_grid;
  std::vector<double> sup_modulus;  // NaN where the t point was dropped
  std::vector<bool> used;
  std::vector<DecaySample> samples;  // t-major, then Z in grid order
  SlopeFit fit;
  double theory = 0.0;
  double tolerance = 0.0;
  bool theory_in_ci = false;
  bool pass = false;
};

DecayReport decay_scan(const GroupSpec& spec, const WindowSpec& w, std::span<const double> t_grid,
                       const std::vector<std::vector<double>>& z_grid, const DecayOptions& options = {});

struct WitnessEntry {
  double t = 0.0;
  std::complex<double> value;
  double modulus = 0.0;
  double quad_error = 0.0;
  long long nodes = 0;
  std::vector<double> z;  // evaluation point Z (t Z* or Z0)
};

struct WitnessResult {
  std::vector<WitnessEntry> entries;
  std::string classification;  // "constant" or "power-law"
  double exponent = 0.0;
  double spread = 0.0;  // max relative deviation between entries
};

struct WitnessOptions {
  std::vector<double> lambda_star;  // default (1, 0, ..., 0)
  double radius = 0.8;              // support radius of g relative to |lambda*|
  double tol = 1e-10;
  QuadratureBudget budget;
};

// t^{-k/2} \int e^{i t (lambda . Z* - zeta_0(lambda))} g(lambda) |Pf(lambda)| d lambda with
// Z* = grad zeta_0(lambda*) and g a smooth bump around lambda*.
WitnessEntry optimality_witness(const GroupSpec& spec, double t, const WitnessOptions& options = {});

// Zero-phase integral \int g |Pf| on the all-positive component with
// g = prod_f theta_w(|lambda_f|), Z0 = grad zeta_0 there. Throws NotLinear
// when zeta_0 is not linear on that component.
WitnessEntry nondispersion_witness(const GroupSpec& spec, const WindowSpec& g_window, double t,
                                   const QuadratureBudget& budget = {});

WitnessResult classify_witness(std::vector<WitnessEntry> entries, double constant_tol = 1e-6);

}  // namespace stratwave

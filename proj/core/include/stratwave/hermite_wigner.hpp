#pragma once

#include <complex>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace stratwave {

// L2-normalised Hermite functions h_n via the normalised three-term recurrence.
class HermiteEvaluator {
 public:
  explicit HermiteEvaluator(int n_max = 200);

  int n_max() const { return n_max_; }
  double operator()(int n, double xi) const;
  // h_0(xi), ..., h_n(xi) into out[0..n].
  void evaluate_all(int n, double xi, std::span<double> out) const;
  // beta^{1/4} h_n(beta^{1/2} xi)
  double scaled(int n, double beta, double xi) const;

 private:
  void check(int n) const;
  int n_max_;
  std::vector<double> up_, down_;
};

const HermiteEvaluator& default_hermite();

double hermite(int n, double xi);
double hermite_scaled(int n, double beta, double xi);

struct WignerValue {
  int n = 0;
  double xi1 = 0.0, xi2 = 0.0;
  std::complex<double> value;
  double error_estimate = 0.0;  // |g(N) - g(2N)|
  int nodes = 0;
};

// g_n(xi1, xi2) = e^{-i xi1 xi2 / 2} \int e^{-i xi2 xi} h_n(xi1 + xi) h_n(xi) dxi,
// Gauss-Legendre on [-L, L], L = sqrt(2n+1) + 8, with node doubling.
WignerValue wigner_g(int n, double xi1, double xi2);
// Single rule with a fixed node count, no certificate.
std::complex<double> wigner_g_fixed(int n, double xi1, double xi2, int nodes);
// Starting node count used by wigner_g for a given |xi2|.
int wigner_nodes(int n, double xi2_abs);

// Laguerre function L_n(x) e^{-x/2}.
double laguerre_function(int n, double x);
// L_n(r^2/2) e^{-r^2/4}, r^2 = xi1^2 + xi2^2.
double wigner_g_laguerre(int n, double xi1, double xi2);

// sup over grid of |(xi1 d1 + xi2 d2)^k g_n| / max(n,1)^k by centred finite
// differences with step 1e-4 (1 + |xi|). k in {1, 2}.
double radial_derivative_bound(int n, int k, std::span<const std::pair<double, double>> grid);

// Polar sample grid: radii in (0, r_max], angles in [0, pi/2].
std::vector<std::pair<double, double>> polar_grid(double r_max, int radii, int angles);

struct SelfTestRow {
  std::string check;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;  // value < threshold
};

// Invariant suite: orthonormality and ODE residual up to n = 60, scaled norms,
// Wigner values against the Laguerre form on |xi| <= 6, doubling certificates,
// and the radial derivative scaling for n in {5, 10, 20, 40}.
std::vector<SelfTestRow> hermite_selftest();

}  // namespace stratwave

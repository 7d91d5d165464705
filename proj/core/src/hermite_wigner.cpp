#include "stratwave/hermite_wigner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "stratwave/errors.hpp"
#include "stratwave/gauss_legendre.hpp"

namespace stratwave {

namespace {

const double kPiQuarter = std::pow(std::numbers::pi, -0.25);

// Cap on node doublings for the certified Wigner integral.
constexpr int kMaxDoublings = 4;

double wigner_half_width(int n) { return std::sqrt(2.0 * n + 1.0) + 8.0; }

}  // namespace

HermiteEvaluator::HermiteEvaluator(int n_max) : n_max_(n_max) {
  if (n_max < 0) throw std::invalid_argument("HermiteEvaluator: n_max must be non-negative");
  up_.resize(n_max + 1);
  down_.resize(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    up_[n] = std::sqrt(2.0 / (n + 1.0));
    down_[n] = std::sqrt(n / (n + 1.0));
  }
}

void HermiteEvaluator::check(int n) const {
  if (n < 0) throw std::invalid_argument("hermite: negative order");
  if (n > n_max_) throw OrderTooLarge("hermite order " + std::to_string(n) + " exceeds n_max " + std::to_string(n_max_));
}

double HermiteEvaluator::operator()(int n, double xi) const {
  check(n);
  double h0 = kPiQuarter * std::exp(-0.5 * xi * xi);
  if (n == 0) return h0;
  double h1 = std::sqrt(2.0) * xi * h0;
  for (int k = 1; k < n; ++k) {
    double h2 = up_[k] * xi * h1 - down_[k] * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

void HermiteEvaluator::evaluate_all(int n, double xi, std::span<double> out) const {
  check(n);
  out[0] = kPiQuarter * std::exp(-0.5 * xi * xi);
  if (n == 0) return;
  out[1] = std::sqrt(2.0) * xi * out[0];
  for (int k = 1; k < n; ++k) out[k + 1] = up_[k] * xi * out[k] - down_[k] * out[k - 1];
}

double HermiteEvaluator::scaled(int n, double beta, double xi) const {
  if (!(beta > 0.0)) throw std::invalid_argument("hermite_scaled: beta must be positive");
  return std::pow(beta, 0.25) * (*this)(n, std::sqrt(beta) * xi);
}

const HermiteEvaluator& default_hermite() {
  static const HermiteEvaluator evaluator(200);
  return evaluator;
}

double hermite(int n, double xi) { return default_hermite()(n, xi); }

double hermite_scaled(int n, double beta, double xi) { return default_hermite().scaled(n, beta, xi); }

int wigner_nodes(int n, double xi2_abs) {
  double L = wigner_half_width(n);
  int base = 4 * (n + 16);
  int phase = static_cast<int>(std::ceil(0.6 * xi2_abs * 2.0 * L)) + 32;
  return std::max(base, phase);
}

std::complex<double> wigner_g_fixed(int n, double xi1, double xi2, int nodes) {
  const auto& H = default_hermite();
  double L = wigner_half_width(n);
  auto rule = gauss_legendre(nodes);
  double re = 0.0, im = 0.0;
  for (int i = 0; i < nodes; ++i) {
    double xi = L * rule->nodes[i];
    double f = rule->weights[i] * H(n, xi1 + xi) * H(n, xi);
    if (f == 0.0) continue;
    re += f * std::cos(xi2 * xi);
    im -= f * std::sin(xi2 * xi);
  }
  std::complex<double> v(L * re, L * im);
  return std::polar(1.0, -0.5 * xi1 * xi2) * v;
}

WignerValue wigner_g(int n, double xi1, double xi2) {
  default_hermite();
  if (n > default_hermite().n_max()) throw OrderTooLarge("wigner_g order too large");
  WignerValue out{n, xi1, xi2, {}, 0.0, 0};
  int nodes = wigner_nodes(n, std::abs(xi2));
  std::complex<double> coarse = wigner_g_fixed(n, xi1, xi2, nodes);
  for (int level = 0; level < kMaxDoublings; ++level) {
    std::complex<double> fine = wigner_g_fixed(n, xi1, xi2, 2 * nodes);
    double err = std::abs(fine - coarse);
    out.value = fine;
    out.error_estimate = err;
    out.nodes = 2 * nodes;
    if (err < 1e-8) return out;
    coarse = fine;
    nodes *= 2;
  }
  throw QuadratureNotConverged("wigner_g(" + std::to_string(n) + ") did not converge, certificate " +
                               std::to_string(out.error_estimate));
}

double laguerre_function(int n, double x) {
  if (n < 0) throw std::invalid_argument("laguerre_function: negative order");
  double l0 = std::exp(-0.5 * x);
  if (n == 0) return l0;
  double l1 = (1.0 - x) * l0;
  for (int k = 1; k < n; ++k) {
    double l2 = ((2.0 * k + 1.0 - x) * l1 - k * l0) / (k + 1.0);
    l0 = l1;
    l1 = l2;
  }
  return l1;
}

double wigner_g_laguerre(int n, double xi1, double xi2) {
  return laguerre_function(n, 0.5 * (xi1 * xi1 + xi2 * xi2));
}

double radial_derivative_bound(int n, int k, std::span<const std::pair<double, double>> grid) {
  if (k != 1 && k != 2) throw std::invalid_argument("radial_derivative_bound: k must be 1 or 2");
  double xi2_max = 0.0;
  for (const auto& [a, b] : grid) xi2_max = std::max(xi2_max, std::hypot(a, b));
  // One rule for every stencil point keeps the differences free of rule noise.
  const int nodes = 2 * wigner_nodes(n, xi2_max + 1.0);
  auto g = [&](double a, double b) { return wigner_g_fixed(n, a, b, nodes); };
  double best = 0.0;
  for (const auto& [x1, x2] : grid) {
    double h = 1e-4 * (1.0 + std::hypot(x1, x2));
    std::complex<double> g0 = g(x1, x2);
    std::complex<double> gp1 = g(x1 + h, x2), gm1 = g(x1 - h, x2);
    std::complex<double> gp2 = g(x1, x2 + h), gm2 = g(x1, x2 - h);
    std::complex<double> d1 = (gp1 - gm1) / (2.0 * h), d2 = (gp2 - gm2) / (2.0 * h);
    std::complex<double> radial = x1 * d1 + x2 * d2;
    std::complex<double> value = radial;
    if (k == 2) {
      std::complex<double> d11 = (gp1 - 2.0 * g0 + gm1) / (h * h);
      std::complex<double> d22 = (gp2 - 2.0 * g0 + gm2) / (h * h);
      std::complex<double> d12 = (g(x1 + h, x2 + h) - g(x1 + h, x2 - h) - g(x1 - h, x2 + h) + g(x1 - h, x2 - h)) / (4.0 * h * h);
      value = x1 * x1 * d11 + 2.0 * x1 * x2 * d12 + x2 * x2 * d22 + radial;
    }
    best = std::max(best, std::abs(value));
  }
  double scale = std::pow(std::max(n, 1), k);
  return best / scale;
}

std::vector<std::pair<double, double>> polar_grid(double r_max, int radii, int angles) {
  std::vector<std::pair<double, double>> grid;
  for (int i = 1; i <= radii; ++i) {
    double r = r_max * i / radii;
    for (int j = 0; j < angles; ++j) {
      double a = angles == 1 ? 0.0 : 0.5 * std::numbers::pi * j / (angles - 1);
      grid.emplace_back(r * std::cos(a), r * std::sin(a));
    }
  }
  return grid;
}

std::vector<SelfTestRow> hermite_selftest() {
  std::vector<SelfTestRow> rows;
  auto add = [&](std::string name, double value, double threshold) {
    rows.push_back({std::move(name), value, threshold, value < threshold});
  };
  const auto& H = default_hermite();
  constexpr int n_top = 60;

  GaussRule rule = gauss_legendre(400, -16.0, 16.0);
  std::vector<std::vector<double>> table(n_top + 1, std::vector<double>(rule.nodes.size()));
  std::vector<double> buf(n_top + 1);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    H.evaluate_all(n_top, rule.nodes[i], buf);
    for (int n = 0; n <= n_top; ++n) table[n][i] = buf[n];
  }
  double ortho = 0.0;
  for (int m = 0; m <= n_top; ++m)
    for (int n = 0; n <= m; ++n) {
      double s = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * table[m][i] * table[n][i];
      ortho = std::max(ortho, std::abs(s - (m == n ? 1.0 : 0.0)));
    }
  add("orthonormality_max", ortho, 1e-10);

  // Nine-point eighth-order second difference.
  static constexpr double c[5] = {-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0};
  const double h = 0.02;
  double ode = 0.0;
  for (int n = 0; n <= n_top; ++n)
    for (double xi = -6.0; xi <= 6.0 + 1e-12; xi += 0.25) {
      double d2 = c[0] * H(n, xi);
      for (int k = 1; k <= 4; ++k) d2 += c[k] * (H(n, xi + k * h) + H(n, xi - k * h));
      d2 /= h * h;
      ode = std::max(ode, std::abs(d2 - xi * xi * H(n, xi) + (2.0 * n + 1.0) * H(n, xi)));
    }
  add("ode_residual_max", ode, 1e-6);

  double scaled_err = 0.0;
  for (double beta : {0.1, 4.0})
    for (int n : {0, 10, 60}) {
      double L = 16.0 / std::sqrt(beta);
      GaussRule r = gauss_legendre(400, -L, L);
      double s = 0.0;
      for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        double v = H.scaled(n, beta, r.nodes[i]);
        s += r.weights[i] * v * v;
      }
      scaled_err = std::max(scaled_err, std::abs(s - 1.0));
    }
  add("scaled_norm_max", scaled_err, 1e-10);

  double origin = 0.0;
  for (int n = 0; n <= 40; ++n) origin = std::max(origin, std::abs(wigner_g(n, 0.0, 0.0).value - 1.0));
  add("wigner_origin_max", origin, 1e-10);

  double lag_small = 0.0, lag_all = 0.0, cert = 0.0, modulus = 0.0, sym = 0.0;
  for (int n = 0; n <= 40; ++n)
    for (int a = -6; a <= 6; ++a)
      for (int b = -6; b <= 6; ++b) {
        WignerValue w = wigner_g(n, a, b);
        double diff = std::abs(w.value - wigner_g_laguerre(n, a, b));
        if (n <= 5) lag_small = std::max(lag_small, diff);
        lag_all = std::max(lag_all, diff);
        cert = std::max(cert, w.error_estimate);
        modulus = std::max(modulus, std::abs(w.value));
        if (b > 0) sym = std::max(sym, std::abs(w.value - std::conj(wigner_g(n, a, -b).value)));
      }
  add("laguerre_identity_n_le_5", lag_small, 1e-8);
  add("wigner_vs_laguerre_max", lag_all, 1e-8);
  add("doubling_certificate_max", cert, 1e-8);
  add("wigner_modulus_excess", modulus - 1.0, 1e-10);
  add("wigner_symmetry_max", sym, 1e-10);

  auto grid = polar_grid(6.0, 48, 5);
  double c1 = radial_derivative_bound(1, 1, grid);
  add("radial_bound_C1", c1, std::numeric_limits<double>::infinity());
  for (int n : {5, 10, 20, 40}) add("radial_bound_n" + std::to_string(n), radial_derivative_bound(n, 1, grid), 3.0 * c1);
  return rows;
}

}  // namespace stratwave

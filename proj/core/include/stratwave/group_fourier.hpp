#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "stratwave/group_model.hpp"

namespace stratwave {

// Fourier analysis on the Heisenberg group H^1 in catalog coordinates
// (x, y, s) = (P, Q, Z), with law s'' = s + s' + 2 (x y' - y x').
// The representation at lambda != 0 acts on L^2(R) by
//   u_X phi(xi) = exp(-i lambda s - i eta (xi + x/2) sgn(lambda) y) phi(xi + x),
// eta = 4 |lambda|, and matrices are taken in the basis h_{alpha, eta}.

using SpatialFunction = std::function<double(double x, double y, double s)>;
// Partial Fourier transform in s: \int f(x, y, s) e^{-i lambda s} ds.
using PartialTransform = std::function<std::complex<double>(double x, double y, double lambda)>;

struct FourierGrid {
  int N = 16;              // Hermite truncation
  double ring_a = 0.25;    // |lambda| range
  double ring_b = 2.0;
  int lambda_nodes = 32;   // Gauss nodes per sign component
  double box_xy = 6.0;     // trapezoid on [-box, box) in x and y
  int xy_nodes = 144;
  double box_s = 30.0;     // Gauss on [-box_s, box_s]
  int s_nodes = 160;
  int xi_nodes = 96;       // Gauss in the Hermite variable
  int jobs = 0;
};

struct FourierData {
  FourierGrid grid;
  std::vector<double> lambda;   // negative component first, ascending
  std::vector<double> weights;  // Gauss weights in lambda
  std::vector<Eigen::MatrixXcd> M;  // M[l](alpha, beta) = (F(f)(lambda_l) h_beta | h_alpha)
};

const GroupSpec& heisenberg1();

// (u_X h_{beta, eta} | h_{alpha, eta}) by Gauss-Legendre quadrature with node doubling.
std::complex<double> rep_matrix_element(double lambda, const GroupElement& x, int alpha, int beta);

FourierData forward(const SpatialFunction& f, const FourierGrid& grid = {});
FourierData forward_partial(const PartialTransform& fhat, const FourierGrid& grid = {});

// kappa \int tr(u_X^* F f(lambda)) |Pf(lambda)| d lambda over the truncated data.
std::complex<double> inverse_at(const GroupElement& x, const FourierData& data, double kappa);

// \int ||F f(lambda)||_HS^2 |Pf(lambda)| d lambda
double fourier_norm2(const FourierData& data);
// \int |f|^2 on the spatial grid.
double spatial_norm2(const SpatialFunction& f, const FourierGrid& grid = {});

struct KappaEstimate {
  double kappa = 0.0;
  double spatial = 0.0;
  double fourier = 0.0;
};
KappaEstimate plancherel_kappa(const SpatialFunction& f, const FourierGrid& grid = {});

// -Delta f with Delta = X^2 + Y^2, second differences along exp(h X), exp(h Y).
SpatialFunction sublaplacian_fd(SpatialFunction f, double h = 1e-3);

// Diagonal of the harmonic oscillator: (2 alpha + 1) * 4 |lambda|.
Eigen::VectorXd oscillator_diagonal(double lambda, int N);

struct NamedFunction {
  std::string name;
  SpatialFunction f;
};
// Three test functions with lambda-content inside the default ring.
std::vector<NamedFunction> standard_test_functions();

}  // namespace stratwave

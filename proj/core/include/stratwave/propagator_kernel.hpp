#pragma once

#include <complex>
#include <span>
#include <vector>

#include "stratwave/group_model.hpp"
#include "stratwave/oscillatory_quadrature.hpp"
#include "stratwave/spectrum.hpp"

namespace stratwave {

// Evaluation of k_t at the group point (P, Q, t Z, R): x.Z holds the rescaled
// central coordinate Z. P and Q are coordinates in the reference basis of the
// first layer; inside the lambda integral they are re-expressed in the
// lambda-dependent frame.
struct KernelRequest {
  GroupSpec spec;
  WindowSpec window;
  double t = 1.0;
  GroupElement x;
  int m_max = 10;
  double tol = 1e-8;  // relative quadrature tolerance per term
  QuadratureBudget budget;
  int jobs = 0;
  // Skip the factorised radial evaluation used when P = Q = 0.
  bool general_path = false;

  void validate() const;
};

struct KernelValue {
  std::complex<double> value;
  double fresnel_modulus = 1.0;
  double series_tail_bound = 0.0;
  double quadrature_error = 0.0;
  long long nodes = 0;
  int terms = 0;
  double total_error() const { return series_tail_bound + quadrature_error; }
};

// (i pi / t)^{k/2} e^{-i |R|^2 / (4t)}, conjugated for t < 0.
std::complex<double> fresnel_factor(double t, std::span<const double> R);

// prod_j theta((2 alpha_j + 1) eta_j) g_{alpha_j}(sqrt(eta_j) P_j, sqrt(eta_j) Q_j),
// P, Q in frame coordinates.
std::complex<double> amplitude_G(const GroupSpec& spec, const WindowSpec& w, const MultiIndex& alpha,
                                 std::span<const double> P, std::span<const double> Q, std::span<const double> eta);

// Majorant of sum_{m > m_max} sum_alpha \int |G_alpha| |Pf| over the windowed
// supports, valid for every (P, Q, Z) and t.
double series_tail_bound(const GroupSpec& spec, const WindowSpec& w, int m_max);

// Single (m, alpha) term of the reduced series.
QuadratureResult kernel_term(const KernelRequest& req, int m, const AlphaTerm& term);

KernelValue ktilde(const KernelRequest& req);
KernelValue kernel(const KernelRequest& req);

}  // namespace stratwave

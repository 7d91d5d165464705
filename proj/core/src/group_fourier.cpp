#include "stratwave/group_fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "stratwave/errors.hpp"
#include "stratwave/gauss_legendre.hpp"
#include "stratwave/hermite_wigner.hpp"
#include "stratwave/parallel.hpp"

namespace stratwave {

namespace {

using cd = std::complex<double>;

double hermite_half_width(int N, double eta) { return (std::sqrt(2.0 * N + 1.0) + 6.0) / std::sqrt(eta); }

// h_{0..N-1, eta}(u) into out.
void scaled_hermites(int N, double eta, double u, double* out) {
  const double root = std::sqrt(eta), quarter = std::sqrt(root);
  default_hermite().evaluate_all(N - 1, root * u, std::span<double>(out, N));
  for (int i = 0; i < N; ++i) out[i] *= quarter;
}

// All (u_X h_beta | h_alpha), alpha, beta < N, on a fixed Gauss rule.
Eigen::MatrixXcd rep_matrix_fixed(double lambda, const GroupElement& X, int N, int nodes) {
  const double eta = 4.0 * std::abs(lambda), sg = lambda > 0.0 ? 1.0 : -1.0;
  const double x = X.P[0], q = sg * X.Q[0], s = X.Z[0];
  const double L = hermite_half_width(N, eta);
  GaussRule rule = gauss_legendre(nodes, -L, L);
  Eigen::MatrixXcd U = Eigen::MatrixXcd::Zero(N, N);
  std::vector<double> ha(N), hb(N);
  for (int i = 0; i < nodes; ++i) {
    double xi = rule.nodes[i];
    scaled_hermites(N, eta, xi, ha.data());
    scaled_hermites(N, eta, xi + x, hb.data());
    cd w = rule.weights[i] * std::polar(1.0, -eta * (xi + 0.5 * x) * q);
    for (int a = 0; a < N; ++a) {
      if (ha[a] == 0.0) continue;
      cd wa = w * ha[a];
      for (int b = 0; b < N; ++b) U(a, b) += wa * hb[b];
    }
  }
  return std::polar(1.0, -lambda * s) * U;
}

Eigen::MatrixXcd rep_matrix(double lambda, const GroupElement& X, int N) {
  if (lambda == 0.0) throw DegenerateLambda("rep_matrix at lambda = 0");
  const double eta = 4.0 * std::abs(lambda);
  const double L = hermite_half_width(N, eta);
  int nodes = std::max(4 * (N + 16), static_cast<int>(std::ceil(0.6 * eta * std::abs(X.Q[0]) * 2.0 * L)) + 32);
  Eigen::MatrixXcd coarse = rep_matrix_fixed(lambda, X, N, nodes);
  for (int level = 0; level < 4; ++level) {
    nodes *= 2;
    Eigen::MatrixXcd fine = rep_matrix_fixed(lambda, X, N, nodes);
    if ((fine - coarse).cwiseAbs().maxCoeff() < 1e-10) return fine;
    coarse = std::move(fine);
  }
  throw QuadratureNotConverged("rep_matrix: node doubling did not converge");
}

struct Layout {
  std::vector<double> xy, s, s_w, lambda, lambda_w;
  double xy_w = 0.0;
};

Layout make_layout(const FourierGrid& g) {
  if (g.N < 1 || g.lambda_nodes < 1 || g.xy_nodes < 2 || g.s_nodes < 1 || g.xi_nodes < 1)
    throw std::invalid_argument("FourierGrid: node counts must be positive");
  if (!(g.ring_a > 0.0 && g.ring_b > g.ring_a)) throw std::invalid_argument("FourierGrid: need 0 < ring_a < ring_b");
  Layout l;
  l.xy_w = 2.0 * g.box_xy / g.xy_nodes;
  for (int i = 0; i < g.xy_nodes; ++i) l.xy.push_back(-g.box_xy + i * l.xy_w);
  GaussRule sr = gauss_legendre(g.s_nodes, -g.box_s, g.box_s);
  l.s = sr.nodes;
  l.s_w = sr.weights;
  GaussRule lr = gauss_legendre(g.lambda_nodes, g.ring_a, g.ring_b);
  for (int i = g.lambda_nodes - 1; i >= 0; --i) {
    l.lambda.push_back(-lr.nodes[i]);
    l.lambda_w.push_back(lr.weights[i]);
  }
  for (int i = 0; i < g.lambda_nodes; ++i) {
    l.lambda.push_back(lr.nodes[i]);
    l.lambda_w.push_back(lr.weights[i]);
  }
  return l;
}

// M(lambda) from the partial transform sampled on the (x, y) grid (rows x, columns y).
Eigen::MatrixXcd assemble(const FourierGrid& g, const Layout& l, double lambda, const Eigen::MatrixXcd& fh) {
  const int N = g.N, n = g.xy_nodes;
  const double eta = 4.0 * std::abs(lambda), sg = lambda > 0.0 ? 1.0 : -1.0;
  const double L = hermite_half_width(N, eta);
  GaussRule xr = gauss_legendre(g.xi_nodes, -L, L);
  const int nx = g.xi_nodes;

  Eigen::MatrixXcd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = fh(i, j) * std::polar(l.xy_w, -0.5 * eta * sg * l.xy[i] * l.xy[j]);
  Eigen::MatrixXcd A(n, nx);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < nx; ++k) A(j, k) = std::polar(1.0, -eta * sg * xr.nodes[k] * l.xy[j]);
  Eigen::MatrixXcd S = G * A;  // S(x, xi)

  Eigen::MatrixXd Ha(nx, N);
  std::vector<double> buf(N);
  for (int k = 0; k < nx; ++k) {
    scaled_hermites(N, eta, xr.nodes[k], buf.data());
    for (int a = 0; a < N; ++a) Ha(k, a) = buf[a];
  }
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(N, N);
  Eigen::MatrixXd T(nx, N);
  Eigen::MatrixXcd W(nx, N);
  for (int i = 0; i < n; ++i) {
    const double x = l.xy[i];
    if (std::abs(x) > 2.0 * L) continue;
    for (int k = 0; k < nx; ++k) {
      scaled_hermites(N, eta, xr.nodes[k] + x, buf.data());
      for (int b = 0; b < N; ++b) T(k, b) = buf[b];
    }
    for (int k = 0; k < nx; ++k) W.row(k) = (xr.weights[k] * l.xy_w * S(i, k)) * T.row(k).cast<cd>();
    M.noalias() += Ha.transpose().cast<cd>() * W;
  }
  return M;
}

FourierData finish(const FourierGrid& g, const Layout& l, const std::vector<Eigen::MatrixXcd>& fh) {
  FourierData data;
  data.grid = g;
  data.lambda = l.lambda;
  data.weights = l.lambda_w;
  data.M = parallel_map<Eigen::MatrixXcd>(
      l.lambda.size(), [&](std::size_t i) { return assemble(g, l, l.lambda[i], fh[i]); }, g.jobs);
  return data;
}

}  // namespace

const GroupSpec& heisenberg1() {
  static const GroupSpec spec = catalog("heisenberg", {1});
  return spec;
}

std::complex<double> rep_matrix_element(double lambda, const GroupElement& x, int alpha, int beta) {
  if (alpha < 0 || beta < 0) throw std::invalid_argument("rep_matrix_element: negative index");
  return rep_matrix(lambda, x, std::max(alpha, beta) + 1)(alpha, beta);
}

FourierData forward(const SpatialFunction& f, const FourierGrid& g) {
  Layout l = make_layout(g);
  const int n = g.xy_nodes, ns = g.s_nodes, nl = static_cast<int>(l.lambda.size());
  Eigen::MatrixXd F(n * n, ns);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < ns; ++k) F(i * n + j, k) = f(l.xy[i], l.xy[j], l.s[k]);
  Eigen::MatrixXd Ec(ns, nl), Es(ns, nl);
  for (int k = 0; k < ns; ++k)
    for (int m = 0; m < nl; ++m) {
      Ec(k, m) = l.s_w[k] * std::cos(l.lambda[m] * l.s[k]);
      Es(k, m) = -l.s_w[k] * std::sin(l.lambda[m] * l.s[k]);
    }
  Eigen::MatrixXd Re = F * Ec, Im = F * Es;
  std::vector<Eigen::MatrixXcd> fh(nl, Eigen::MatrixXcd(n, n));
  for (int m = 0; m < nl; ++m)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) fh[m](i, j) = cd(Re(i * n + j, m), Im(i * n + j, m));
  return finish(g, l, fh);
}

FourierData forward_partial(const PartialTransform& fhat, const FourierGrid& g) {
  Layout l = make_layout(g);
  const int n = g.xy_nodes;
  std::vector<Eigen::MatrixXcd> fh(l.lambda.size(), Eigen::MatrixXcd(n, n));
  for (std::size_t m = 0; m < l.lambda.size(); ++m)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) fh[m](i, j) = fhat(l.xy[i], l.xy[j], l.lambda[m]);
  return finish(g, l, fh);
}

std::complex<double> inverse_at(const GroupElement& x, const FourierData& data, double kappa) {
  if (x.P.size() != 1 || x.Q.size() != 1 || x.Z.size() != 1 || !x.R.empty())
    throw std::invalid_argument("inverse_at: point must lie in H^1");
  auto terms = parallel_map<cd>(
      data.lambda.size(),
      [&](std::size_t i) {
        const auto& M = data.M[i];
        Eigen::MatrixXcd U = rep_matrix(data.lambda[i], x, static_cast<int>(M.rows()));
        cd tr = (M.array() * U.conjugate().array()).sum();
        return data.weights[i] * 4.0 * std::abs(data.lambda[i]) * tr;
      },
      data.grid.jobs);
  cd sum = 0.0;
  for (const auto& t : terms) sum += t;
  return kappa * sum;
}

double fourier_norm2(const FourierData& data) {
  double sum = 0.0;
  for (std::size_t i = 0; i < data.lambda.size(); ++i)
    sum += data.weights[i] * 4.0 * std::abs(data.lambda[i]) * data.M[i].squaredNorm();
  return sum;
}

double spatial_norm2(const SpatialFunction& f, const FourierGrid& g) {
  Layout l = make_layout(g);
  double sum = 0.0;
  for (double x : l.xy)
    for (double y : l.xy) {
      double row = 0.0;
      for (std::size_t k = 0; k < l.s.size(); ++k) {
        double v = f(x, y, l.s[k]);
        row += l.s_w[k] * v * v;
      }
      sum += l.xy_w * l.xy_w * row;
    }
  return sum;
}

KappaEstimate plancherel_kappa(const SpatialFunction& f, const FourierGrid& g) {
  KappaEstimate k;
  k.spatial = spatial_norm2(f, g);
  k.fourier = fourier_norm2(forward(f, g));
  k.kappa = k.spatial / k.fourier;
  return k;
}

SpatialFunction sublaplacian_fd(SpatialFunction f, double h) {
  return [f = std::move(f), h](double x, double y, double s) {
    // p.(h,0,0) = (x+h, y, s - 2yh), p.(0,h,0) = (x, y+h, s + 2xh)
    double c = f(x, y, s);
    double sx = f(x + h, y, s - 2.0 * y * h) + f(x - h, y, s + 2.0 * y * h);
    double sy = f(x, y + h, s + 2.0 * x * h) + f(x, y - h, s - 2.0 * x * h);
    return -(sx + sy - 4.0 * c) / (h * h);
  };
}

Eigen::VectorXd oscillator_diagonal(double lambda, int N) {
  Eigen::VectorXd d(N);
  for (int a = 0; a < N; ++a) d[a] = (2.0 * a + 1.0) * 4.0 * std::abs(lambda);
  return d;
}

std::vector<NamedFunction> standard_test_functions() {
  return {
      {"gauss_radial",
       [](double x, double y, double s) { return std::exp(-(x * x + y * y) - s * s / 36.0) * std::cos(s); }},
      {"gauss_shifted",
       [](double x, double y, double s) {
         double dx = x - 0.5, dy = y + 0.3;
         return std::exp(-0.8 * (dx * dx + dy * dy) - s * s / 40.0) * std::cos(1.1 * s);
       }},
      {"poly_gauss",
       [](double x, double y, double s) {
         double u = s - 1.0;
         return (1.0 + 0.6 * x - 0.4 * y) * std::exp(-1.2 * (x * x + y * y) - u * u / 36.0) * std::cos(u);
       }},
  };
}

}  // namespace stratwave

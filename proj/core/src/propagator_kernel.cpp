#include "stratwave/propagator_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <tuple>

#include "stratwave/errors.hpp"
#include "stratwave/hermite_wigner.hpp"
#include "stratwave/parallel.hpp"

namespace stratwave {

namespace {

constexpr double kPi = std::numbers::pi;

double ball_volume(int dim, double r) { return std::pow(std::sqrt(kPi) * r, dim) / std::tgamma(0.5 * dim + 1.0); }

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Per-factor data used by the tail majorant and the node heuristics.
struct FactorModel {
  int center_offset, center_dim, first_j, pairs;
  double c_min, c_max;  // eta_j on the unit sphere of the factor
};

std::vector<FactorModel> factor_models(const GroupSpec& spec) {
  std::vector<FactorModel> out;
  if (spec.eta_mode() == EtaMode::ClosedForm) {
    int j = 0;
    for (const auto& f : spec.factors()) {
      out.push_back({f.center_offset, f.center_dim, j, f.pair_count, f.scale, f.scale});
      j += f.pair_count;
    }
  } else {
    double lo = *std::min_element(spec.unit_eta_min().begin(), spec.unit_eta_min().end());
    double hi = *std::max_element(spec.unit_eta_max().begin(), spec.unit_eta_max().end());
    out.push_back({0, spec.p(), 0, spec.d(), lo, hi});
  }
  return out;
}

// Bound of \int |G_alpha| |Pf| d lambda restricted to one factor, 0 if inadmissible.
double factor_term_bound(const FactorModel& f, const WindowSpec& w, int a_min, int a_max) {
  double lo = w.a / ((2.0 * a_min + 1.0) * f.c_max);
  double hi = w.b / ((2.0 * a_max + 1.0) * f.c_min);
  if (!(lo < hi)) return 0.0;
  double vol = ball_volume(f.center_dim, hi) - ball_volume(f.center_dim, lo);
  return vol * std::pow(f.c_max * hi, f.pairs);
}

// S_f(m): sum over alpha restricted to the factor with |alpha_f| = m.
double factor_shell_sum(const FactorModel& f, const WindowSpec& w, int m, long long& work) {
  double s = 0.0;
  for (const auto& alpha : multi_indices(f.pairs, m)) {
    ++work;
    auto [mn, mx] = std::minmax_element(alpha.begin(), alpha.end());
    s += factor_term_bound(f, w, *mn, *mx);
  }
  return s;
}

}  // namespace

void KernelRequest::validate() const {
  window.validate();
  if (t == 0.0) throw ZeroTime("kernel evaluated at t = 0");
  if (!std::isfinite(t)) throw std::invalid_argument("kernel: t must be finite");
  if (m_max < 0) throw std::invalid_argument("kernel: m_max must be non-negative");
  if (static_cast<int>(x.P.size()) != spec.d() || static_cast<int>(x.Q.size()) != spec.d() ||
      static_cast<int>(x.R.size()) != spec.k() || static_cast<int>(x.Z.size()) != spec.p())
    throw std::invalid_argument("kernel: evaluation point does not match the group");
  bool pq = norm(x.P) > 0.0 || norm(x.Q) > 0.0;
  if (pq && spec.frame_mode() != FrameMode::Explicit)
    throw FrameUnavailable(spec.name() + ": P, Q must vanish without an explicit frame");
  if (!spec.is_catalog() && spec.k() > 0)
    throw std::invalid_argument("kernel: groups with a radical are supported only from the catalog");
}

std::complex<double> fresnel_factor(double t, std::span<const double> R) {
  if (t == 0.0) throw ZeroTime("fresnel_factor at t = 0");
  const double k = static_cast<double>(R.size());
  if (R.empty()) return 1.0;
  double r2 = 0.0;
  for (double r : R) r2 += r * r;
  double modulus = std::pow(kPi / std::abs(t), 0.5 * k);
  double arg = (t > 0.0 ? 1.0 : -1.0) * k * kPi / 4.0 - r2 / (4.0 * t);
  return std::polar(modulus, arg);
}

std::complex<double> amplitude_G(const GroupSpec& spec, const WindowSpec& w, const MultiIndex& alpha,
                                 std::span<const double> P, std::span<const double> Q, std::span<const double> eta) {
  const int d = spec.d();
  double g = 1.0;
  for (int j = 0; j < d; ++j) {
    if (!(eta[j] > 0.0)) throw DegenerateLambda("amplitude_G: eta must be positive");
    g *= window(w, (2.0 * alpha[j] + 1.0) * eta[j]);
    if (g == 0.0) return 0.0;
    double pj = P.empty() ? 0.0 : P[j], qj = Q.empty() ? 0.0 : Q[j];
    if (pj != 0.0 || qj != 0.0) g *= laguerre_function(alpha[j], 0.5 * eta[j] * (pj * pj + qj * qj));
  }
  return g;
}

double series_tail_bound(const GroupSpec& spec, const WindowSpec& w, int m_max) {
  w.validate();
  static std::mutex mutex;
  static std::map<std::tuple<std::string, int, double, double, int>, double> cache;
  auto key = std::make_tuple(spec.name(), static_cast<int>(spec.eta_mode()), w.a, w.b, m_max);
  {
    std::lock_guard<std::mutex> lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto models = factor_models(spec);
  for (const auto& f : models)
    if (!(f.c_min > 0.0)) throw std::invalid_argument("series_tail_bound: eta vanishes on the unit sphere");

  // Exact majorant for m_max < m <= m_end, then an m^{-2} envelope fitted on
  // the last stretch.
  const int m_end = std::max(2 * m_max + 40, m_max + 60);
  const long long work_cap = 3000000;
  long long work = 0;
  std::vector<std::vector<double>> per_factor(models.size());
  auto shell_sum = [&](std::size_t f, int m) {
    auto& cache_f = per_factor[f];
    while (static_cast<int>(cache_f.size()) <= m) cache_f.push_back(factor_shell_sum(models[f], w, static_cast<int>(cache_f.size()), work));
    return cache_f[m];
  };
  auto total_sum = [&](int m) {
    if (models.size() == 1) return shell_sum(0, m);
    double s = 0.0;
    for (int m1 = 0; m1 <= m; ++m1) s += shell_sum(0, m1) * shell_sum(1, m - m1);
    return s;
  };
  double tail = 0.0, envelope = 0.0;
  int last = m_max;
  for (int m = m_max + 1; m <= m_end; ++m) {
    double s = total_sum(m);
    tail += s;
    if (m > (m_max + m_end) / 2) envelope = std::max(envelope, s * double(m) * double(m));
    last = m;
    if (work > work_cap) break;
  }
  if (last == m_max + 1) envelope = std::max(envelope, total_sum(last) * double(last) * double(last));
  // sum_{m > last} C m^{-2} <= C / last
  tail += 2.0 * envelope / last;
  std::lock_guard<std::mutex> lock(mutex);
  cache[key] = tail;
  return tail;
}

// P = Q = 0 on a closed-form catalog group: the integrand factorises over the
// spectral factors and each angular integral is known, so the term is a
// product of one-dimensional radial integrals in lambda.
QuadratureResult radial_term(const KernelRequest& req, const AlphaTerm& term) {
  const GroupSpec& spec = req.spec;
  QuadratureResult out;
  out.value = 1.0;
  out.abs_integral = 1.0;
  double rel_err = 0.0;
  int j0 = 0;
  for (std::size_t fi = 0; fi < spec.factors().size(); ++fi) {
    const SpectralFactor& f = spec.factors()[fi];
    const ShellBounds& sb = term.lambda_support[fi];
    std::vector<double> c(f.pair_count);
    double csum = 0.0;
    for (int i = 0; i < f.pair_count; ++i) {
      c[i] = (2.0 * term.alpha[j0 + i] + 1.0) * f.scale;
      csum += c[i];
    }
    j0 += f.pair_count;
    double zf = 0.0;
    for (int l = 0; l < f.center_dim; ++l) zf += req.x.Z[f.center_offset + l] * req.x.Z[f.center_offset + l];
    zf = std::sqrt(zf);
    const int dim = f.center_dim;
    const double t = req.t, scale = f.scale;
    const int pairs = f.pair_count;
    auto amplitude = [&, c](std::span<const double> r) -> std::complex<double> {
      double rr = r[0], w = 1.0;
      for (double ci : c) {
        w *= window(req.window, ci * rr);
        if (w == 0.0) return 0.0;
      }
      double x = t * rr * zf, ang;
      if (dim == 1) ang = 2.0 * std::cos(x);
      else if (dim == 2) ang = 2.0 * kPi * std::cyl_bessel_j(0.0, std::abs(x));
      else ang = 4.0 * kPi * (std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x);
      return w * ang * std::pow(scale * rr, pairs) * std::pow(rr, dim - 1);
    };
    OscIntegral I = make_integral(IntegrationDomain{{Shell{1, sb.r_min, sb.r_max, {0.0}, 1}}},
                                  [csum](std::span<const double> r) { return csum * r[0]; }, amplitude, t,
                                  {(csum + zf) * (sb.r_max - sb.r_min)});
    QuadratureBudget budget = req.budget;
    budget.rel_tol = req.tol;
    QuadratureResult r = integrate(I, budget);
    rel_err += r.error_estimate / std::max(std::abs(r.value), 1e-300);
    out.value *= r.value;
    out.abs_integral *= r.abs_integral;
    out.nodes_used += r.nodes_used;
  }
  out.error_estimate = rel_err * std::abs(out.value);
  return out;
}

QuadratureResult kernel_term(const KernelRequest& req, int m, const AlphaTerm& term) {
  const GroupSpec& spec = req.spec;
  const int p = spec.p(), d = spec.d();
  const double s = m == 0 ? 1.0 : static_cast<double>(m);
  const double weight = m == 0 ? 1.0 : std::pow(s, -static_cast<double>(p + d));
  const std::vector<double> v = req.x.P.size() + req.x.Q.size() ? [&] {
    std::vector<double> out = req.x.P;
    out.insert(out.end(), req.x.Q.begin(), req.x.Q.end());
    out.insert(out.end(), req.x.R.begin(), req.x.R.end());
    return out;
  }() : std::vector<double>{};
  const bool use_frame = norm(req.x.P) > 0.0 || norm(req.x.Q) > 0.0;
  if (!use_frame && spec.eta_mode() == EtaMode::ClosedForm && !req.general_path) return radial_term(req, term);
  const auto models = factor_models(spec);
  const double vnorm2 = use_frame ? std::pow(norm(v), 2) : 0.0;

  IntegrationDomain dom;
  std::vector<double> osc;
  for (const auto& sb : term.gamma_support) {
    dom.shells.push_back(Shell{sb.dim, sb.r_min, sb.r_max, {}, 0});
    // Phase variation in lambda variables equals that in gamma variables.
    double lo = sb.r_min / s, hi = sb.r_max / s;
    double zf = 0.0;
    for (int l = 0; l < sb.dim; ++l) zf += req.x.Z[sb.center_offset + l] * req.x.Z[sb.center_offset + l];
    zf = std::sqrt(zf);
    double wf = 0.0, cmax = 0.0;
    for (const auto& f : models) {
      if (f.center_offset != sb.center_offset) continue;
      cmax = f.c_max;
      for (int j = f.first_j; j < f.first_j + f.pairs; ++j) wf += (2.0 * term.alpha[j] + 1.0) * f.c_max;
    }
    double radial = (wf + zf) * (hi - lo);
    if (use_frame) {
      int amax = *std::max_element(term.alpha.begin(), term.alpha.end());
      radial += 2.0 * std::sqrt((2.0 * amax + 1.0) * 0.5 * cmax * hi * vnorm2) + 0.5 * cmax * hi * vnorm2;
    }
    double tangential = hi * (zf + (spec.eta_mode() == EtaMode::Numeric ? wf : 0.0));
    osc.push_back(radial);
    if (sb.dim == 3) osc.push_back(kPi * tangential);
    if (sb.dim >= 2) osc.push_back(2.0 * kPi * tangential);
  }

  OscIntegral I;
  I.domain = std::move(dom);
  I.t = req.t;
  I.osc_scale = std::move(osc);
  std::vector<double> lambda(p), P(d), Q(d), e(d);
  const bool closed = spec.eta_mode() == EtaMode::ClosedForm;
  I.integrand = [&, lambda, P, Q, e](std::span<const double> gamma) mutable -> PhaseAmplitude {
    for (int l = 0; l < p; ++l) lambda[l] = gamma[l] / s;
    if (closed) {
      int j = 0;
      for (const auto& f : spec.factors()) {
        double r = 0.0;
        for (int l = 0; l < f.center_dim; ++l) r += lambda[f.center_offset + l] * lambda[f.center_offset + l];
        if (r == 0.0) return {};
        r = f.scale * std::sqrt(r);
        for (int i = 0; i < f.pair_count; ++i) e[j++] = r;
      }
    } else {
      e = eta(spec, lambda);
    }
    double window_w = 1.0, zeta_v = 0.0, pf = 1.0;
    for (int j = 0; j < d; ++j) {
      double zj = (2.0 * term.alpha[j] + 1.0) * e[j];
      window_w *= window(req.window, zj);
      if (window_w == 0.0) return {};
      zeta_v += zj;
      pf *= e[j] * s;
    }
    double amp = window_w;
    if (use_frame) {
      Eigen::MatrixXd F = frame(spec, lambda);
      Eigen::Map<const Eigen::VectorXd> vv(v.data(), static_cast<Eigen::Index>(v.size()));
      Eigen::VectorXd c = F.transpose() * vv;
      for (int j = 0; j < d; ++j) {
        P[j] = c[j];
        Q[j] = c[d + j];
      }
      amp = amplitude_G(spec, req.window, term.alpha, P, Q, e).real();
    }
    double lz = 0.0;
    for (int l = 0; l < p; ++l) lz += lambda[l] * req.x.Z[l];
    return PhaseAmplitude{zeta_v - lz, weight * amp * pf};
  };
  QuadratureBudget budget = req.budget;
  budget.rel_tol = req.tol;
  return integrate(I, budget);
}

KernelValue ktilde(const KernelRequest& req) {
  req.validate();
  struct Job {
    int m;
    AlphaTerm term;
  };
  std::vector<Job> jobs;
  for (int m = 0; m <= req.m_max; ++m)
    for (auto& term : alpha_support(req.spec, req.window, m).terms) jobs.push_back({m, std::move(term)});
  auto results = parallel_map<QuadratureResult>(
      jobs.size(), [&](std::size_t i) { return kernel_term(req, jobs[i].m, jobs[i].term); }, req.jobs);
  KernelValue out;
  for (const auto& r : results) {
    out.value += r.value;
    out.quadrature_error += r.error_estimate;
    out.nodes += r.nodes_used;
  }
  out.terms = static_cast<int>(jobs.size());
  out.series_tail_bound = series_tail_bound(req.spec, req.window, req.m_max);
  return out;
}

KernelValue kernel(const KernelRequest& req) {
  KernelValue out = ktilde(req);
  std::complex<double> f = fresnel_factor(req.t, req.x.R);
  out.value *= f;
  out.fresnel_modulus = std::abs(f);
  out.series_tail_bound *= out.fresnel_modulus;
  out.quadrature_error *= out.fresnel_modulus;
  return out;
}

}  // namespace stratwave

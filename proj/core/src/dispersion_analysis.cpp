#include "stratwave/dispersion_analysis.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "stratwave/errors.hpp"
#include "stratwave/parallel.hpp"

namespace stratwave {

namespace {

double vnorm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double psi(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

// 1 on [0, 1/2], 0 beyond 1, smooth in between.
double plateau_step(double u) {
  if (u >= 1.0) return 0.0;
  double up = psi(1.0 - u), down = psi(u - 0.5);
  return up / (up + down);
}

MultiIndex zero_alpha(const GroupSpec& spec) { return MultiIndex(spec.d(), 0); }

}  // namespace

Eigen::MatrixXd zeta_hessian(const GroupSpec& spec, const MultiIndex& alpha, std::span<const double> lambda) {
  const int p = spec.p();
  const double h = 1e-4 * vnorm(lambda);
  if (h == 0.0) throw DegenerateLambda("zeta_hessian at lambda = 0");
  std::vector<double> x(lambda.begin(), lambda.end());
  auto f = [&](int i, double di, int j, double dj) {
    std::vector<double> y = x;
    y[i] += di;
    y[j] += dj;
    return zeta(spec, alpha, y);
  };
  const double f0 = zeta(spec, alpha, x);
  Eigen::MatrixXd H(p, p);
  for (int i = 0; i < p; ++i) {
    H(i, i) = (f(i, h, i, 0.0) - 2.0 * f0 + f(i, -h, i, 0.0)) / (h * h);
    for (int j = i + 1; j < p; ++j) {
      double v = (f(i, h, j, h) - f(i, h, j, -h) - f(i, -h, j, h) + f(i, -h, j, -h)) / (4.0 * h * h);
      H(i, j) = v;
      H(j, i) = v;
    }
  }
  return 0.5 * (H + H.transpose());
}

RankSample hessian_rank(const GroupSpec& spec, const MultiIndex& alpha, std::span<const double> lambda,
                        const RankThresholds& th) {
  const int p = spec.p();
  RankSample s;
  s.alpha = alpha;
  s.lambda.assign(lambda.begin(), lambda.end());
  Eigen::MatrixXd H = zeta_hessian(spec, alpha, lambda);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(H);
  Eigen::VectorXd sv = svd.singularValues();
  s.singular_values.assign(sv.data(), sv.data() + sv.size());
  const double r = vnorm(lambda);
  s.hessian_scale = zeta(spec, alpha, lambda) / (r * r);
  const double s1 = s.singular_values[0];
  if (s1 < th.tol_zero * s.hessian_scale) {
    s.rank = 0;
  } else {
    s.rank = 0;
    for (double v : s.singular_values)
      if (v / s1 > th.tol_rank) ++s.rank;
  }
  if (p == 1) {
    s.pass = true;
  } else if (s.rank == 0) {
    s.pass = false;
  } else {
    s.pass = s.singular_values[p - 2] / s1 > th.tol_rank && s.singular_values[p - 1] / s1 < th.tol_zero;
  }
  Eigen::VectorXd hat(p);
  for (int i = 0; i < p; ++i) hat[i] = lambda[i] / r;
  s.euler_residual = (H * hat).norm() / std::max(s1, s.hessian_scale);
  return s;
}

RankReport assumption_check(const GroupSpec& spec, int sample_count, std::uint64_t seed, const RankThresholds& th) {
  RankReport report;
  report.thresholds = th;
  std::mt19937_64 rng(seed);
  auto uniform = [&] { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
  auto normal = [&] { return std::sqrt(-2.0 * std::log(uniform())) * std::cos(2.0 * std::numbers::pi * uniform()); };
  std::vector<MultiIndex> alphas;
  for (int m = 0; m <= 4; ++m)
    for (auto& a : multi_indices(spec.d(), m)) alphas.push_back(a);
  int taken = 0, attempts = 0;
  while (taken < sample_count) {
    if (++attempts > 1000 * std::max(sample_count, 1)) throw std::runtime_error("assumption_check: could not sample the generic set");
    std::vector<double> lambda(spec.p());
    for (auto& x : lambda) x = normal();
    double r = vnorm(lambda);
    for (auto& x : lambda) x /= r;
    std::vector<double> e;
    try {
      e = eta(spec, lambda);
    } catch (const DegenerateLambda&) {
      continue;
    }
    // Keep the difference stencil inside one component of the generic set.
    double emax = *std::max_element(e.begin(), e.end());
    if (*std::min_element(e.begin(), e.end()) < 0.05 * emax) continue;
    ++taken;
    for (const auto& alpha : alphas) {
      RankSample s = hessian_rank(spec, alpha, lambda, th);
      report.pass = report.pass && s.pass;
      report.max_euler_residual = std::max(report.max_euler_residual, s.euler_residual);
      report.samples.push_back(std::move(s));
    }
  }
  return report;
}

int factor_count(const GroupSpec& spec) {
  const auto& kind = spec.catalog_entry().kind;
  if (kind == "tensor_heisenberg" || kind == "tensor_htype") return static_cast<int>(spec.factors().size());
  return 1;
}

double theoretical_slope(const GroupSpec& spec) {
  return -0.5 * (spec.k() + spec.p() - factor_count(spec)) + 0.0;
}

SlopeFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_loglog: size mismatch");
  const std::size_t n = x.size();
  SlopeFit fit;
  fit.points = static_cast<int>(n);
  if (n < 2) throw std::invalid_argument("fit_loglog: need at least two points");
  double mx = 0.0, my = 0.0;
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("fit_loglog: values must be positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (n > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double r = ly[i] - fit.intercept - fit.slope * lx[i];
      rss += r * r;
    }
    double se = std::sqrt(rss / (n - 2) / sxx);
    boost::math::students_t dist(static_cast<double>(n - 2));
    double q = boost::math::quantile(boost::math::complement(dist, 0.025));
    fit.ci_low = fit.slope - q * se;
    fit.ci_high = fit.slope + q * se;
  } else {
    fit.ci_low = -std::numeric_limits<double>::infinity();
    fit.ci_high = std::numeric_limits<double>::infinity();
  }
  return fit;
}

std::vector<std::vector<double>> stationary_z_grid(const GroupSpec& spec, const WindowSpec& w, int m_grid, bool with_box) {
  const int p = spec.p();
  // Directions: +-1 on one-dimensional factors, the first axis otherwise.
  std::vector<std::vector<double>> dirs{std::vector<double>(p, 0.0)};
  if (spec.eta_mode() == EtaMode::ClosedForm) {
    for (const auto& f : spec.factors()) {
      std::vector<std::vector<double>> next;
      for (const auto& d : dirs) {
        if (f.center_dim == 1) {
          for (double sgn : {1.0, -1.0}) {
            auto e = d;
            e[f.center_offset] = sgn;
            next.push_back(e);
          }
        } else {
          auto e = d;
          e[f.center_offset] = 1.0;
          next.push_back(e);
        }
      }
      dirs = std::move(next);
    }
  } else {
    dirs[0][0] = 1.0;
  }
  std::vector<std::vector<double>> grid;
  auto add = [&](std::vector<double> z) {
    for (auto& c : z)
      if (std::abs(c) < 1e-12) c = 0.0;
    for (const auto& g : grid) {
      double diff = 0.0;
      for (int i = 0; i < p; ++i) diff = std::max(diff, std::abs(g[i] - z[i]));
      if (diff < 1e-9) return;
    }
    grid.push_back(std::move(z));
  };
  double box = 0.0;
  for (int m = 0; m <= m_grid; ++m) {
    for (const auto& term : alpha_support(spec, w, m).terms) {
      for (const auto& d : dirs) {
        auto z = zeta_gradient(spec, term.alpha, d);
        if (m == 0)
          for (double c : z) box = std::max(box, std::abs(c));
        add(z);
      }
    }
  }
  if (with_box && box > 0.0) {
    long long count = 1;
    for (int i = 0; i < p; ++i) count *= 3;
    for (long long c = 0; c < count; ++c) {
      std::vector<double> z(p);
      long long rem = c;
      for (int i = 0; i < p; ++i) {
        z[i] = box * (static_cast<double>(rem % 3) - 1.0);
        rem /= 3;
      }
      add(z);
    }
  }
  return grid;
}

std::vector<double> parse_t_grid(const std::string& text) {
  std::vector<double> out;
  auto fail = [&] { throw std::invalid_argument("bad t grid '" + text + "'"); };
  try {
    if (text.find(':') != std::string::npos) {
      std::stringstream ss(text);
      std::string a, b, c;
      if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c)) fail();
      double lo = std::stod(a), hi = std::stod(b);
      std::size_t used = 0;
      int n = std::stoi(c, &used);
      std::string kind = c.substr(used);
      if (n < 1) fail();
      if (kind != "log" && kind != "lin" && !kind.empty()) fail();
      bool log = kind == "log";
      if (log && !(lo > 0.0 && hi > 0.0)) fail();
      for (int i = 0; i < n; ++i) {
        double f = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
        out.push_back(log ? std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo))) : lo + f * (hi - lo));
      }
      out.front() = lo;
      if (n > 1) out.back() = hi;
    } else {
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    }
  } catch (const std::invalid_argument&) {
    fail();
  } catch (const std::out_of_range&) {
    fail();
  }
  if (out.empty()) fail();
  return out;
}

DecayReport decay_scan(const GroupSpec& spec, const WindowSpec& w, std::span<const double> t_grid,
                       const std::vector<std::vector<double>>& z_grid, const DecayOptions& opt) {
  if (!spec.is_catalog()) throw std::invalid_argument("decay_scan: catalog groups only");
  if (z_grid.empty()) throw std::invalid_argument("decay_scan: empty Z grid");
  DecayReport report;
  report.t_grid.assign(t_grid.begin(), t_grid.end());
  report.theory = theoretical_slope(spec);
  report.tolerance = opt.slope_tolerance;
  const std::size_t nz = z_grid.size(), nt = t_grid.size();
  report.samples = parallel_map<DecaySample>(
      nt * nz,
      [&](std::size_t i) {
        DecaySample s;
        s.t = t_grid[i / nz];
        s.z = z_grid[i % nz];
        KernelRequest req{spec, w, s.t, GroupElement::identity(spec), opt.m_max, opt.tol, opt.budget, 1};
        req.x.Z = s.z;
        try {
          s.value = kernel(req);
          s.ok = true;
        } catch (const Error& e) {
          s.error = e.what();
        }
        return s;
      },
      opt.jobs);
  std::vector<double> xs, ys;
  for (std::size_t it = 0; it < nt; ++it) {
    double sup = 0.0;
    bool ok = true;
    for (std::size_t iz = 0; iz < nz; ++iz) {
      const auto& s = report.samples[it * nz + iz];
      if (!s.ok) {
        ok = false;
        continue;
      }
      sup = std::max(sup, std::abs(s.value.value));
    }
    for (std::size_t iz = 0; iz < nz && ok; ++iz)
      if (report.samples[it * nz + iz].value.quadrature_error > opt.certificate_fraction * sup) ok = false;
    ok = ok && sup > 0.0;
    report.used.push_back(ok);
    report.sup_modulus.push_back(ok ? sup : std::numeric_limits<double>::quiet_NaN());
    if (ok) {
      xs.push_back(t_grid[it]);
      ys.push_back(sup);
    }
  }
  if (static_cast<int>(xs.size()) >= std::max(opt.min_points, 2)) {
    report.fit = fit_loglog(xs, ys);
    report.theory_in_ci = report.fit.ci_low <= report.theory && report.theory <= report.fit.ci_high;
    report.pass = std::abs(report.fit.slope - report.theory) <= opt.slope_tolerance;
  } else {
    report.fit.points = static_cast<int>(xs.size());
    report.pass = false;
  }
  return report;
}

WitnessEntry optimality_witness(const GroupSpec& spec, double t, const WitnessOptions& opt) {
  if (t == 0.0) throw ZeroTime("optimality_witness at t = 0");
  const int p = spec.p();
  if (p > 3) throw std::invalid_argument("optimality_witness: center dimension above 3");
  std::vector<double> star = opt.lambda_star;
  if (star.empty()) {
    star.assign(p, 0.0);
    star[0] = 1.0;
  }
  if (static_cast<int>(star.size()) != p) throw std::invalid_argument("optimality_witness: lambda* has wrong length");
  const MultiIndex a0 = zero_alpha(spec);
  const std::vector<double> zstar = zeta_gradient(spec, a0, star);
  if (vnorm(zstar) == 0.0) throw std::invalid_argument("optimality_witness: grad zeta vanishes at lambda*");
  const double len = vnorm(star);
  const double rho = opt.radius * len;
  if (!(opt.radius > 0.0 && opt.radius < 1.0)) throw std::invalid_argument("optimality_witness: radius must lie in (0, 1)");

  Shell shell{p, len - rho, len + rho, {}, 0};
  // Householder reflection sending the polar axis e_p to lambda*/|lambda*|.
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(p, p);
  if (p == 1) {
    shell.sign = star[0] > 0.0 ? 1 : -1;
  } else if (p == 3) {
    shell.cos_min = std::sqrt(1.0 - opt.radius * opt.radius);
    Eigen::VectorXd u = Eigen::VectorXd::Unit(p, p - 1);
    for (int i = 0; i < p; ++i) u[i] -= star[i] / len;
    if (u.norm() > 1e-14) {
      u.normalize();
      H -= 2.0 * u * u.transpose();
    }
  }
  OscIntegral I;
  I.domain.shells.push_back(shell);
  I.t = t;
  std::vector<double> lambda(p);
  I.integrand = [&, lambda](std::span<const double> mu) mutable -> PhaseAmplitude {
    for (int i = 0; i < p; ++i) {
      double s = 0.0;
      for (int j = 0; j < p; ++j) s += H(i, j) * mu[j];
      lambda[i] = s;
    }
    double dist = 0.0;
    for (int i = 0; i < p; ++i) dist += (lambda[i] - star[i]) * (lambda[i] - star[i]);
    double g = plateau_step(std::sqrt(dist) / rho);
    if (g == 0.0) return {};
    std::vector<double> e = eta(spec, lambda);
    double z0 = 0.0, pf = 1.0;
    for (double v : e) {
      z0 += v;
      pf *= v;
    }
    double lz = 0.0;
    for (int i = 0; i < p; ++i) lz += lambda[i] * zstar[i];
    return PhaseAmplitude{lz - z0, g * pf};
  };
  I.osc_scale = estimate_osc_scale(I);
  QuadratureBudget budget = opt.budget;
  budget.rel_tol = opt.tol;
  QuadratureResult r = integrate(I, budget);
  const double factor = std::pow(std::abs(t), -0.5 * spec.k());
  WitnessEntry out;
  out.t = t;
  out.value = factor * r.value;
  out.modulus = std::abs(out.value);
  out.quad_error = factor * r.error_estimate;
  out.nodes = r.nodes_used;
  out.z = zstar;
  for (auto& c : out.z) c *= t;
  return out;
}

WitnessEntry nondispersion_witness(const GroupSpec& spec, const WindowSpec& gw, double t, const QuadratureBudget& budget) {
  gw.validate();
  if (t == 0.0) throw ZeroTime("nondispersion_witness at t = 0");
  if (!spec.is_catalog() || spec.eta_mode() != EtaMode::ClosedForm)
    throw std::invalid_argument("nondispersion_witness: catalog groups only");
  const int p = spec.p();
  const MultiIndex a0 = zero_alpha(spec);
  // Linearity test on the all-positive component.
  std::vector<double> probe(p, 0.0);
  for (double frac : {0.3, 0.5, 0.7}) {
    for (const auto& f : spec.factors()) {
      double r = gw.a + frac * (gw.b - gw.a);
      for (int l = 0; l < f.center_dim; ++l) probe[f.center_offset + l] = r / std::sqrt(double(f.center_dim)) * (l == 0 ? 1.0 : 0.5 + 0.1 * l);
    }
    Eigen::MatrixXd Hs = zeta_hessian(spec, a0, probe);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Hs);
    double scale = zeta(spec, a0, probe) / std::pow(vnorm(probe), 2);
    if (svd.singularValues()[0] >= 1e-6 * scale)
      throw NotLinear(spec.name() + ": zeta(0, .) is not linear on the chosen component");
  }
  const std::vector<double> z0 = zeta_gradient(spec, a0, probe);
  OscIntegral I;
  for (const auto& f : spec.factors()) I.domain.shells.push_back(Shell{f.center_dim, gw.a, gw.b, {}, 1});
  I.t = t;
  I.integrand = [&](std::span<const double> lambda) -> PhaseAmplitude {
    double g = 1.0;
    for (const auto& f : spec.factors()) g *= window(gw, std::abs(lambda[f.center_offset]));
    if (g == 0.0) return {};
    double pf = pfaffian(spec, lambda);
    double zl = zeta(spec, a0, lambda), lz = 0.0;
    for (int i = 0; i < p; ++i) lz += lambda[i] * z0[i];
    return PhaseAmplitude{zl - lz, g * pf};
  };
  I.osc_scale = estimate_osc_scale(I);
  QuadratureResult r = integrate(I, budget);
  WitnessEntry out;
  out.t = t;
  out.value = r.value;
  out.modulus = std::abs(r.value);
  out.quad_error = r.error_estimate;
  out.nodes = r.nodes_used;
  out.z = z0;
  for (auto& c : out.z) c *= t;
  return out;
}

WitnessResult classify_witness(std::vector<WitnessEntry> entries, double constant_tol) {
  WitnessResult res;
  res.entries = std::move(entries);
  if (res.entries.empty()) return res;
  double ref = res.entries.front().modulus, spread = 0.0;
  for (const auto& a : res.entries)
    for (const auto& b : res.entries) spread = std::max(spread, std::abs(a.value - b.value) / std::max(ref, 1e-300));
  res.spread = spread;
  if (spread <= constant_tol) {
    res.classification = "constant";
    res.exponent = 0.0;
  } else {
    res.classification = "power-law";
    std::vector<double> t, m;
    for (const auto& e : res.entries) {
      t.push_back(std::abs(e.t));
      m.push_back(e.modulus);
    }
    if (t.size() >= 2) res.exponent = fit_loglog(t, m).slope;
  }
  return res;
}

}  // namespace stratwave

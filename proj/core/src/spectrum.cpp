#include "stratwave/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "stratwave/errors.hpp"

namespace stratwave {

namespace {

double psi(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

double block_norm(std::span<const double> lambda, int offset, int dim) {
  double s = 0.0;
  for (int l = 0; l < dim; ++l) s += lambda[offset + l] * lambda[offset + l];
  return std::sqrt(s);
}

bool uses_factors(const GroupSpec& spec) { return spec.eta_mode() == EtaMode::ClosedForm; }

}  // namespace

void WindowSpec::validate() const {
  if (!(a > 0.0) || !(b > a) || !std::isfinite(b)) throw std::invalid_argument("window needs 0 < a < b");
}

double window(const WindowSpec& w, double s) {
  if (s <= w.a || s >= w.b) return 0.0;
  double u = std::abs((2.0 * s - (w.a + w.b)) / (w.b - w.a));
  double up = psi(1.0 - u), down = psi(u - 0.5);
  return up / (up + down);
}

std::vector<double> zeta_components(const GroupSpec& spec, const MultiIndex& alpha, std::span<const double> lambda) {
  if (static_cast<int>(alpha.size()) != spec.d()) throw std::invalid_argument("alpha has wrong length");
  auto e = eta(spec, lambda);
  for (int j = 0; j < spec.d(); ++j) e[j] *= 2.0 * alpha[j] + 1.0;
  return e;
}

double zeta(const GroupSpec& spec, const MultiIndex& alpha, std::span<const double> lambda) {
  double s = 0.0;
  for (double z : zeta_components(spec, alpha, lambda)) s += z;
  return s;
}

double window_product(const GroupSpec& spec, const WindowSpec& w, const MultiIndex& alpha, std::span<const double> lambda) {
  double prod = 1.0;
  for (double z : zeta_components(spec, alpha, lambda)) {
    prod *= window(w, z);
    if (prod == 0.0) break;
  }
  return prod;
}

SpectralPoint make_spectral_point(const GroupSpec& spec, const WindowSpec& w, const MultiIndex& alpha,
                                  std::span<const double> lambda, std::span<const double> nu) {
  if (static_cast<int>(nu.size()) != 0 && static_cast<int>(nu.size()) != spec.k())
    throw std::invalid_argument("nu has wrong length");
  SpectralPoint sp;
  sp.alpha = alpha;
  sp.lambda.assign(lambda.begin(), lambda.end());
  sp.nu.assign(nu.begin(), nu.end());
  sp.nu.resize(spec.k(), 0.0);
  sp.eta = eta(spec, lambda);
  sp.zeta_j = zeta_components(spec, alpha, lambda);
  sp.window = 1.0;
  for (double z : sp.zeta_j) {
    sp.zeta += z;
    sp.window_j.push_back(window(w, z));
    sp.window *= sp.window_j.back();
  }
  return sp;
}

std::vector<MultiIndex> multi_indices(int d, int m) {
  std::vector<MultiIndex> out;
  if (d <= 0) return out;
  MultiIndex cur(d, 0);
  // Lexicographic: first entry descending from m would be reverse order, so
  // recurse with the first entry ascending.
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == d - 1) {
      cur[pos] = left;
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      cur[pos] = v;
      self(self, pos + 1, left - v);
    }
  };
  rec(rec, 0, m);
  return out;
}

AlphaSupport alpha_support(const GroupSpec& spec, const WindowSpec& w, int m) {
  w.validate();
  if (m < 0) throw std::invalid_argument("alpha_support: m must be non-negative");
  AlphaSupport out;
  out.m = m;
  const double scale_m = m == 0 ? 1.0 : static_cast<double>(m);
  double gmin = std::numeric_limits<double>::infinity(), gmax = 0.0;
  for (auto& alpha : multi_indices(spec.d(), m)) {
    AlphaTerm term;
    term.alpha = alpha;
    bool ok = true;
    if (uses_factors(spec)) {
      int j = 0;
      for (const auto& f : spec.factors()) {
        double lo = 0.0, hi = std::numeric_limits<double>::infinity();
        for (int i = 0; i < f.pair_count; ++i, ++j) {
          double c = (2.0 * alpha[j] + 1.0) * f.scale;
          lo = std::max(lo, w.a / c);
          hi = std::min(hi, w.b / c);
        }
        if (!(lo < hi)) {
          ok = false;
          break;
        }
        term.lambda_support.push_back({f.center_offset, f.center_dim, lo, hi});
      }
    } else {
      double lo = 0.0, hi = std::numeric_limits<double>::infinity();
      for (int j = 0; j < spec.d(); ++j) {
        double c = 2.0 * alpha[j] + 1.0;
        if (spec.unit_eta_min()[j] <= 0.0)
          throw std::invalid_argument("alpha_support: eta vanishes on the unit sphere, window support is unbounded");
        lo = std::max(lo, w.a / (c * spec.unit_eta_max()[j]));
        hi = std::min(hi, w.b / (c * spec.unit_eta_min()[j]));
      }
      if (lo < hi) term.lambda_support.push_back({0, spec.p(), lo, hi});
      else ok = false;
    }
    if (!ok) continue;
    double lo2 = 0.0, hi2 = 0.0;
    for (const auto& s : term.lambda_support) {
      ShellBounds g = s;
      g.r_min *= scale_m;
      g.r_max *= scale_m;
      term.gamma_support.push_back(g);
      lo2 += g.r_min * g.r_min;
      hi2 += g.r_max * g.r_max;
    }
    gmin = std::min(gmin, std::sqrt(lo2));
    gmax = std::max(gmax, std::sqrt(hi2));
    out.terms.push_back(std::move(term));
  }
  if (!out.terms.empty()) {
    out.gamma_r_min = gmin;
    out.gamma_r_max = gmax;
  }
  return out;
}

std::vector<double> zeta_gradient(const GroupSpec& spec, const MultiIndex& alpha, std::span<const double> lambda) {
  const int p = spec.p();
  std::vector<double> g(p, 0.0);
  if (uses_factors(spec)) {
    int j = 0;
    for (const auto& f : spec.factors()) {
      double weight = 0.0;
      for (int i = 0; i < f.pair_count; ++i, ++j) weight += (2.0 * alpha[j] + 1.0) * f.scale;
      double r = block_norm(lambda, f.center_offset, f.center_dim);
      if (r == 0.0) throw DegenerateLambda("zeta_gradient: lambda outside the generic set");
      for (int l = 0; l < f.center_dim; ++l) g[f.center_offset + l] = weight * lambda[f.center_offset + l] / r;
    }
    return g;
  }
  double norm = block_norm(lambda, 0, p);
  double h = 1e-6 * norm;
  std::vector<double> x(lambda.begin(), lambda.end());
  for (int l = 0; l < p; ++l) {
    double keep = x[l];
    x[l] = keep + h;
    double up = zeta(spec, alpha, x);
    x[l] = keep - h;
    double down = zeta(spec, alpha, x);
    x[l] = keep;
    g[l] = (up - down) / (2.0 * h);
  }
  return g;
}

}  // namespace stratwave

#include "stratwave/oscillatory_quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "stratwave/errors.hpp"
#include "stratwave/gauss_legendre.hpp"

namespace stratwave {

namespace {

constexpr double kPi = std::numbers::pi;

// Round up to four significant bits so that the rule cache stays small.
int nice_count(double n) {
  long long v = static_cast<long long>(std::ceil(n));
  if (v <= 16) return 16;
  int shift = 0;
  while ((v >> shift) >= 16) ++shift;
  long long top = (v + (1LL << shift) - 1) >> shift;
  return static_cast<int>(top << shift);
}

struct AxisNodes {
  std::vector<double> x, w;
};

struct ShellRule {
  const Shell* shell = nullptr;
  int offset = 0;
  AxisNodes radial;  // r and w * r^{dim-1}
  AxisNodes polar;   // cos(theta) nodes
  AxisNodes angle;   // azimuth
  std::vector<double> cos_a, sin_a, sin_t;
};

AxisNodes periodic(int n) {
  AxisNodes a;
  for (int i = 0; i < n; ++i) {
    a.x.push_back(2.0 * kPi * i / n);
    a.w.push_back(2.0 * kPi / n);
  }
  return a;
}

AxisNodes legendre(int n, double lo, double hi) {
  GaussRule g = gauss_legendre(n, lo, hi);
  return AxisNodes{std::move(g.nodes), std::move(g.weights)};
}

std::vector<ShellRule> build_rules(const IntegrationDomain& dom, std::span<const int> nodes) {
  std::vector<ShellRule> rules;
  int axis = 0, offset = 0;
  for (const auto& s : dom.shells) {
    ShellRule r;
    r.shell = &s;
    r.offset = offset;
    r.radial = legendre(nodes[axis++], s.r_min, s.r_max);
    for (std::size_t i = 0; i < r.radial.x.size(); ++i) r.radial.w[i] *= std::pow(r.radial.x[i], s.dim - 1);
    if (s.dim == 3) {
      r.polar = legendre(nodes[axis++], s.cos_min, 1.0);
      for (double c : r.polar.x) r.sin_t.push_back(std::sqrt(std::max(0.0, 1.0 - c * c)));
    }
    if (s.dim >= 2) {
      r.angle = periodic(nodes[axis++]);
      for (double a : r.angle.x) {
        r.cos_a.push_back(std::cos(a));
        r.sin_a.push_back(std::sin(a));
      }
    }
    offset += s.dim;
    rules.push_back(std::move(r));
  }
  return rules;
}

struct Sums {
  std::complex<double> value;
  double abs = 0.0;
  Sums& operator+=(const Sums& o) {
    value += o.value;
    abs += o.abs;
    return *this;
  }
};

class Evaluator {
 public:
  Evaluator(const OscIntegral& integral, const std::vector<ShellRule>& rules)
      : integral_(integral), rules_(rules), lambda_(integral.domain.dimension(), 0.0) {}

  Sums run() { return visit(0); }

 private:
  Sums leaf() {
    PhaseAmplitude pa = integral_.integrand(lambda_);
    Sums s;
    if (pa.amplitude == std::complex<double>(0.0, 0.0)) return s;
    s.value = pa.amplitude * std::polar(1.0, integral_.t * pa.phase);
    s.abs = std::abs(pa.amplitude);
    return s;
  }

  Sums visit(std::size_t level) {
    if (level == rules_.size()) return leaf();
    const ShellRule& r = rules_[level];
    const Shell& s = *r.shell;
    auto center = [&](int i) { return s.center.empty() ? 0.0 : s.center[i]; };
    Sums total;
    const int off = r.offset;
    if (s.dim == 1) {
      for (int sign : {1, -1}) {
        if (s.sign != 0 && s.sign != sign) continue;
        Sums part;
        for (std::size_t i = 0; i < r.radial.x.size(); ++i) {
          lambda_[off] = center(0) + sign * r.radial.x[i];
          Sums v = visit(level + 1);
          part.value += r.radial.w[i] * v.value;
          part.abs += r.radial.w[i] * v.abs;
        }
        total += part;
      }
    } else if (s.dim == 2) {
      for (std::size_t i = 0; i < r.radial.x.size(); ++i) {
        double rad = r.radial.x[i];
        Sums ring;
        for (std::size_t a = 0; a < r.angle.x.size(); ++a) {
          lambda_[off] = center(0) + rad * r.cos_a[a];
          lambda_[off + 1] = center(1) + rad * r.sin_a[a];
          Sums v = visit(level + 1);
          ring.value += r.angle.w[a] * v.value;
          ring.abs += r.angle.w[a] * v.abs;
        }
        total.value += r.radial.w[i] * ring.value;
        total.abs += r.radial.w[i] * ring.abs;
      }
    } else {
      for (std::size_t i = 0; i < r.radial.x.size(); ++i) {
        double rad = r.radial.x[i];
        Sums sphere;
        for (std::size_t p = 0; p < r.polar.x.size(); ++p) {
          double ct = r.polar.x[p], st = r.sin_t[p];
          Sums ring;
          for (std::size_t a = 0; a < r.angle.x.size(); ++a) {
            lambda_[off] = center(0) + rad * st * r.cos_a[a];
            lambda_[off + 1] = center(1) + rad * st * r.sin_a[a];
            lambda_[off + 2] = center(2) + rad * ct;
            Sums v = visit(level + 1);
            ring.value += r.angle.w[a] * v.value;
            ring.abs += r.angle.w[a] * v.abs;
          }
          sphere.value += r.polar.w[p] * ring.value;
          sphere.abs += r.polar.w[p] * ring.abs;
        }
        total.value += r.radial.w[i] * sphere.value;
        total.abs += r.radial.w[i] * sphere.abs;
      }
    }
    return total;
  }

  const OscIntegral& integral_;
  const std::vector<ShellRule>& rules_;
  std::vector<double> lambda_;
};

void validate(const OscIntegral& integral) {
  if (integral.domain.shells.empty()) throw std::invalid_argument("integrate: empty domain");
  if (integral.domain.dimension() > 3) throw std::invalid_argument("integrate: tensor rule limited to dimension 3");
  for (const auto& s : integral.domain.shells) {
    if (s.dim < 1 || s.dim > 3) throw std::invalid_argument("integrate: shell dimension must be 1, 2 or 3");
    if (!(s.r_min >= 0.0) || !(s.r_max > s.r_min)) throw std::invalid_argument("integrate: need 0 <= r_min < r_max");
    if (s.dim == 3 && !(s.cos_min >= -1.0 && s.cos_min < 1.0))
      throw std::invalid_argument("integrate: cos_min must lie in [-1, 1)");
    if (!s.center.empty() && static_cast<int>(s.center.size()) != s.dim)
      throw std::invalid_argument("integrate: shell center has wrong length");
  }
  if (!integral.integrand) throw std::invalid_argument("integrate: missing integrand");
}

// Axis kinds in order: true for periodic (trapezoid) axes.
std::vector<bool> periodic_axes(const IntegrationDomain& dom) {
  std::vector<bool> out;
  for (const auto& s : dom.shells) {
    out.push_back(false);
    if (s.dim == 3) out.push_back(false);
    if (s.dim >= 2) out.push_back(true);
  }
  return out;
}

}  // namespace

int IntegrationDomain::dimension() const {
  int n = 0;
  for (const auto& s : shells) n += s.dim;
  return n;
}

int IntegrationDomain::axis_count() const { return dimension(); }

double IntegrationDomain::volume() const {
  double v = 1.0;
  for (const auto& s : shells) {
    switch (s.dim) {
      case 1: v *= (s.sign == 0 ? 2.0 : 1.0) * (s.r_max - s.r_min); break;
      case 2: v *= kPi * (s.r_max * s.r_max - s.r_min * s.r_min); break;
      default: v *= 2.0 / 3.0 * kPi * (1.0 - s.cos_min) * (std::pow(s.r_max, 3) - std::pow(s.r_min, 3)); break;
    }
  }
  return v;
}

OscIntegral make_integral(IntegrationDomain domain, std::function<double(std::span<const double>)> phase,
                          std::function<std::complex<double>(std::span<const double>)> amplitude, double t,
                          std::vector<double> osc_scale) {
  OscIntegral I;
  I.domain = std::move(domain);
  I.t = t;
  I.osc_scale = std::move(osc_scale);
  I.integrand = [phase = std::move(phase), amplitude = std::move(amplitude)](std::span<const double> x) {
    return PhaseAmplitude{phase ? phase(x) : 0.0, amplitude(x)};
  };
  return I;
}

std::vector<double> estimate_osc_scale(const OscIntegral& integral, int samples_per_axis) {
  validate(integral);
  const int axes = integral.domain.axis_count();
  const int n = std::max(3, samples_per_axis);
  // Interior sample points per axis. A two-sided line gets both halves, and
  // the step between them is not counted.
  std::vector<std::vector<double>> coord(axes);
  std::vector<int> split(axes, -1);
  std::vector<bool> kinds = periodic_axes(integral.domain);
  {
    int a = 0;
    for (const auto& s : integral.domain.shells) {
      if (s.dim == 1 && s.sign == 0) {
        for (int i = n - 1; i >= 0; --i) coord[a].push_back(-(s.r_min + (s.r_max - s.r_min) * (i + 0.5) / n));
        split[a] = n - 1;
      }
      for (int i = 0; i < n; ++i) {
        double r = s.r_min + (s.r_max - s.r_min) * (i + 0.5) / n;
        coord[a].push_back(s.dim == 1 && s.sign < 0 ? -r : r);
      }
      ++a;
      if (s.dim == 3) {
        for (int i = 0; i < n; ++i) coord[a].push_back(s.cos_min + (1.0 - s.cos_min) * (i + 0.5) / n);
        ++a;
      }
      if (s.dim >= 2) {
        for (int i = 0; i < n; ++i) coord[a].push_back(2.0 * kPi * i / n);
        ++a;
      }
    }
  }
  std::vector<long long> stride(axes, 1);
  long long total = 1;
  for (int a = axes - 1; a >= 0; --a) {
    stride[a] = total;
    total *= static_cast<long long>(coord[a].size());
  }
  std::vector<double> phase(total);
  std::vector<char> present(total);
  std::vector<double> x(integral.domain.dimension());
  for (long long flat = 0; flat < total; ++flat) {
    auto at = [&](int a) { return coord[a][(flat / stride[a]) % coord[a].size()]; };
    int a = 0, off = 0;
    for (const auto& s : integral.domain.shells) {
      auto center = [&](int i) { return s.center.empty() ? 0.0 : s.center[i]; };
      double r = at(a++);
      if (s.dim == 1) {
        x[off] = center(0) + r;
      } else if (s.dim == 2) {
        double ang = at(a++);
        x[off] = center(0) + r * std::cos(ang);
        x[off + 1] = center(1) + r * std::sin(ang);
      } else {
        double ct = at(a), st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        double ang = at(a + 1);
        a += 2;
        x[off] = center(0) + r * st * std::cos(ang);
        x[off + 1] = center(1) + r * st * std::sin(ang);
        x[off + 2] = center(2) + r * ct;
      }
      off += s.dim;
    }
    PhaseAmplitude pa = integral.integrand(x);
    phase[flat] = pa.phase;
    present[flat] = pa.amplitude != std::complex<double>(0.0, 0.0);
  }
  std::vector<double> out(axes, 0.0);
  for (int a = 0; a < axes; ++a) {
    const long long len = static_cast<long long>(coord[a].size());
    for (long long flat = 0; flat < total; ++flat) {
      if ((flat / stride[a]) % len != 0) continue;
      double var = 0.0;
      long long steps = kinds[a] ? len : len - 1;
      for (long long i = 0; i < steps; ++i) {
        if (i == split[a]) continue;
        long long p0 = flat + i * stride[a], p1 = flat + ((i + 1) % len) * stride[a];
        if (!present[p0] && !present[p1]) continue;
        var += std::abs(phase[p1] - phase[p0]);
      }
      out[a] = std::max(out[a], var);
    }
    // Interior samples miss half a cell at each end of a bounded axis.
    if (!kinds[a]) out[a] *= static_cast<double>(n) / (n - 1);
  }
  for (auto& v : out) v *= 1.25;
  return out;
}

std::vector<int> initial_nodes(const OscIntegral& integral, const QuadratureBudget& budget) {
  auto kinds = periodic_axes(integral.domain);
  std::vector<int> n(kinds.size());
  for (std::size_t a = 0; a < kinds.size(); ++a) {
    double v = a < integral.osc_scale.size() ? std::abs(integral.osc_scale[a]) : 0.0;
    // Gauss needs about V/2 nodes for a phase variation V, the periodic
    // trapezoid about V/(2 pi).
    double resolve = std::abs(integral.t) * v / (kinds[a] ? 2.0 * kPi : 2.0);
    n[a] = nice_count(budget.min_nodes + budget.c0 * (1.0 + resolve));
  }
  return n;
}

QuadratureResult integrate_fixed(const OscIntegral& integral, std::span<const int> nodes) {
  validate(integral);
  if (static_cast<int>(nodes.size()) != integral.domain.axis_count())
    throw std::invalid_argument("integrate_fixed: one node count per axis expected");
  auto rules = build_rules(integral.domain, nodes);
  Evaluator ev(integral, rules);
  Sums s = ev.run();
  long long total = 1;
  for (int n : nodes) total *= n;
  for (const auto& sh : integral.domain.shells)
    if (sh.dim == 1 && sh.sign == 0) total *= 2;
  return QuadratureResult{s.value, 0.0, total, s.abs};
}

QuadratureResult integrate(const OscIntegral& integral, const QuadratureBudget& budget) {
  validate(integral);
  std::vector<int> nodes = initial_nodes(integral, budget);
  auto too_big = [&](const std::vector<int>& n) {
    double total = 1.0;
    for (int v : n) {
      if (v > budget.max_nodes_per_axis) return true;
      total *= v;
    }
    return total > budget.max_total_nodes;
  };
  if (too_big(nodes)) throw BudgetExceeded("integrate: initial node count exceeds the budget");
  QuadratureResult coarse = integrate_fixed(integral, nodes);
  for (;;) {
    std::vector<int> fine_nodes = nodes;
    for (int& v : fine_nodes) v *= 2;
    if (too_big(fine_nodes)) {
      std::ostringstream os;
      os << "integrate: certificate not reached within budget (last estimate " << coarse.error_estimate << ")";
      throw BudgetExceeded(os.str());
    }
    QuadratureResult fine = integrate_fixed(integral, fine_nodes);
    fine.error_estimate = std::abs(fine.value - coarse.value);
    fine.nodes_used += coarse.nodes_used;
    if (fine.error_estimate <= budget.abs_tol + budget.rel_tol * fine.abs_integral) return fine;
    coarse = fine;
    nodes = fine_nodes;
  }
}

MonteCarloResult monte_carlo_check(const OscIntegral& integral, long long samples, std::uint64_t seed) {
  validate(integral);
  if (samples < 2) throw std::invalid_argument("monte_carlo_check: need at least two samples");
  std::mt19937_64 rng(seed);
  auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const double vol = integral.domain.volume();
  std::vector<double> x(integral.domain.dimension());
  double sr = 0.0, si = 0.0, sq = 0.0;
  for (long long n = 0; n < samples; ++n) {
    int off = 0;
    for (const auto& s : integral.domain.shells) {
      auto center = [&](int i) { return s.center.empty() ? 0.0 : s.center[i]; };
      double u = uniform();
      if (s.dim == 1) {
        double r = s.r_min + u * (s.r_max - s.r_min);
        int sign = s.sign != 0 ? s.sign : (uniform() < 0.5 ? 1 : -1);
        x[off] = center(0) + sign * r;
      } else if (s.dim == 2) {
        double r = std::sqrt(s.r_min * s.r_min + u * (s.r_max * s.r_max - s.r_min * s.r_min));
        double a = 2.0 * kPi * uniform();
        x[off] = center(0) + r * std::cos(a);
        x[off + 1] = center(1) + r * std::sin(a);
      } else {
        double r = std::cbrt(std::pow(s.r_min, 3) + u * (std::pow(s.r_max, 3) - std::pow(s.r_min, 3)));
        double ct = s.cos_min + (1.0 - s.cos_min) * uniform(), st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        double a = 2.0 * kPi * uniform();
        x[off] = center(0) + r * st * std::cos(a);
        x[off + 1] = center(1) + r * st * std::sin(a);
        x[off + 2] = center(2) + r * ct;
      }
      off += s.dim;
    }
    PhaseAmplitude pa = integral.integrand(x);
    std::complex<double> f = pa.amplitude * std::polar(1.0, integral.t * pa.phase);
    sr += f.real();
    si += f.imag();
    sq += std::norm(f);
  }
  double n = static_cast<double>(samples);
  std::complex<double> mean(sr / n, si / n);
  double var = std::max(0.0, (sq / n - std::norm(mean)) * n / (n - 1.0));
  return MonteCarloResult{vol * mean, vol * std::sqrt(var / n), samples};
}

}  // namespace stratwave

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "stratwave/dispersion_analysis.hpp"
#include "stratwave/errors.hpp"
#include "stratwave/gauss_legendre.hpp"

using namespace stratwave;

TEST_SUITE("dispersion_analysis") {
  TEST_CASE("Hessian of the H-type frequency") {
    // zeta(0, lambda) = 2 |lambda|: D^2 = 2 (I - l l^T) / |l|
    auto spec = catalog("htype", {4, 3});
    std::vector<double> l{0.0, 0.6, 0.8};
    auto s = hessian_rank(spec, {0, 0}, l);
    REQUIRE(s.singular_values.size() == 3);
    CHECK(s.singular_values[0] == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(s.singular_values[1] == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(s.singular_values[2] < 1e-6);
    CHECK(s.rank == 2);
    CHECK(s.pass);
    CHECK(s.euler_residual < 1e-6);
    // degree -1 homogeneity keeps the verdict
    std::vector<double> l5{0.0, 3.0, 4.0};
    auto s5 = hessian_rank(spec, {1, 0}, l5);
    CHECK(s5.pass);
    CHECK(s5.singular_values[0] == doctest::Approx(s.singular_values[0] * 2.0 / 5.0).epsilon(1e-5));
    std::vector<double> zero{0.0, 0.0, 0.0};
    CHECK_THROWS(hessian_rank(spec, {0, 0}, zero));
  }

  TEST_CASE("rank verdicts on the catalog") {
    for (int d = 1; d <= 3; ++d) CHECK(assumption_check(catalog("heisenberg", {d}), 10, 1).pass);
    for (int p : {2, 3}) {
      auto rep = assumption_check(catalog("htype", {4, p}), 20, 2);
      CHECK(rep.pass);
      CHECK(rep.max_euler_residual < 1e-6);
      for (const auto& s : rep.samples) {
        CHECK(s.singular_values[p - 2] / s.singular_values[0] > 1e-3);
        CHECK(s.singular_values[p - 1] / s.singular_values[0] < 1e-6);
      }
    }
    auto th = assumption_check(catalog("tensor_heisenberg", {1, 1}), 10, 3);
    CHECK_FALSE(th.pass);
    CHECK(th.max_euler_residual < 1e-6);
    for (const auto& s : th.samples) CHECK(s.rank == 0);
    CHECK(assumption_check(catalog("diamond", {1, 1}), 10, 4).pass);
  }

  TEST_CASE("theoretical slopes") {
    CHECK(theoretical_slope(catalog("htype", {4, 3})) == -1.0);
    CHECK(theoretical_slope(catalog("htype", {4, 2})) == -0.5);
    CHECK(theoretical_slope(catalog("diamond", {1, 1})) == -0.5);
    CHECK(theoretical_slope(catalog("heisenberg", {2})) == 0.0);
    CHECK(theoretical_slope(catalog("tensor_heisenberg", {1, 1})) == 0.0);
    CHECK(std::signbit(theoretical_slope(catalog("tensor_heisenberg", {1, 1}))) == false);
    CHECK(factor_count(catalog("tensor_htype", {4, 2, 4, 3})) == 2);
  }

  TEST_CASE("log-log fit") {
    std::vector<double> x{1, 2, 4, 8, 16, 32}, y;
    for (double v : x) y.push_back(3.0 * std::pow(v, -0.7));
    auto f = fit_loglog(x, y);
    CHECK(f.slope == doctest::Approx(-0.7).epsilon(1e-12));
    CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(f.ci_high - f.ci_low < 1e-10);
    CHECK(f.points == 6);
    // alternating residual +-e on equally spaced log x; t(0.975, 4) = 2.7764451051977987
    std::vector<double> yn;
    const double e = 0.01;
    for (std::size_t i = 0; i < x.size(); ++i) yn.push_back(y[i] * std::exp(i % 2 ? -e : e));
    auto g = fit_loglog(x, yn);
    std::vector<double> lx;
    for (double v : x) lx.push_back(std::log(v));
    double mx = 0.0;
    for (double v : lx) mx += v / 6;
    double sxx = 0.0, sxy = 0.0, my = 0.0;
    for (std::size_t i = 0; i < 6; ++i) my += std::log(yn[i]) / 6;
    for (std::size_t i = 0; i < 6; ++i) {
      sxx += (lx[i] - mx) * (lx[i] - mx);
      sxy += (lx[i] - mx) * (std::log(yn[i]) - my);
    }
    double b = sxy / sxx, a = my - b * mx, rss = 0.0;
    for (std::size_t i = 0; i < 6; ++i) rss += std::pow(std::log(yn[i]) - a - b * lx[i], 2);
    double half = 2.7764451051977987 * std::sqrt(rss / 4 / sxx);
    CHECK(g.slope == doctest::Approx(b).epsilon(1e-12));
    CHECK(g.ci_high - g.slope == doctest::Approx(half).epsilon(1e-9));
    CHECK(g.slope - g.ci_low == doctest::Approx(half).epsilon(1e-9));
    std::vector<double> one{1.0};
    CHECK_THROWS(fit_loglog(one, one));
  }

  TEST_CASE("t grids") {
    auto g = parse_t_grid("20:500:12log");
    REQUIRE(g.size() == 12);
    CHECK(g.front() == 20.0);
    CHECK(g.back() == 500.0);
    CHECK(g[1] / g[0] == doctest::Approx(g[11] / g[10]));
    auto l = parse_t_grid("1:3:3lin");
    CHECK(l == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(parse_t_grid("1,10,100") == std::vector<double>{1.0, 10.0, 100.0});
    CHECK_THROWS(parse_t_grid("0:5:3log"));
    CHECK_THROWS(parse_t_grid("1:5:xlog"));
    CHECK_THROWS(parse_t_grid(""));
  }

  TEST_CASE("stationary grid") {
    auto h = catalog("heisenberg", {1});
    auto z = stationary_z_grid(h, {1.0, 2.0}, 1, false);
    // grad zeta = +-4 (2 alpha + 1)
    REQUIRE(z.size() == 4);
    CHECK(z[0][0] == 4.0);
    CHECK(z[1][0] == -4.0);
    CHECK(z[2][0] == 12.0);
    auto zb = stationary_z_grid(catalog("htype", {4, 2}), {1.0, 2.0}, 0, true);
    // (2, 0) and the 3 x 3 box of half-width 2
    CHECK(zb.size() == 9);
  }

  TEST_CASE("diamond decay follows the fresnel factor") {
    auto spec = catalog("diamond", {1, 1});
    WindowSpec w{1.0, 2.0};
    auto t = parse_t_grid("20:500:6log");
    DecayOptions o;
    o.slope_tolerance = 0.05;
    auto rep = decay_scan(spec, w, t, stationary_z_grid(spec, w, 2), o);
    CHECK(rep.pass);
    CHECK(rep.fit.points == 6);
    CHECK(rep.theory == -0.5);
    CHECK(rep.fit.slope == doctest::Approx(-0.5).epsilon(0.1));
  }

  TEST_CASE("decay scan drops failed points") {
    auto spec = catalog("heisenberg", {1});
    WindowSpec w{1.0, 2.0};
    DecayOptions o;
    o.budget.max_nodes_per_axis = 16;
    o.budget.rel_tol = 0.0;
    o.budget.abs_tol = 0.0;
    o.tol = 0.0;
    std::vector<double> t{10.0, 20.0, 40.0};
    auto rep = decay_scan(spec, w, t, {{4.0}}, o);
    CHECK_FALSE(rep.pass);
    for (bool u : rep.used) CHECK_FALSE(u);
    for (const auto& s : rep.samples) CHECK(!s.error.empty());
  }

  TEST_CASE("non-dispersion witness") {
    WindowSpec g{1.0, 2.0};
    // \int_1^2 theta(l) 4 l dl by composite rule
    double expect = 0.0;
    auto rule = gauss_legendre(8);
    for (int k = 0; k < 200; ++k)
      for (int i = 0; i < rule->size(); ++i) {
        double l = 1.0 + (k + 0.5 * (rule->nodes[i] + 1)) / 200.0;
        expect += 0.5 / 200.0 * rule->weights[i] * window(g, l) * 4.0 * l;
      }
    std::vector<WitnessEntry> es;
    for (double t : {1.0, 10.0, 100.0}) es.push_back(nondispersion_witness(catalog("heisenberg", {1}), g, t));
    CHECK(es[0].value.real() == doctest::Approx(expect).epsilon(1e-10));
    CHECK(es[2].z[0] == doctest::Approx(400.0));
    auto res = classify_witness(es);
    CHECK(res.classification == "constant");
    CHECK(res.spread < 1e-12);
    std::vector<WitnessEntry> ts;
    for (double t : {1.0, 10.0, 100.0}) ts.push_back(nondispersion_witness(catalog("tensor_heisenberg", {1, 1}), g, t));
    CHECK(ts[0].value.real() == doctest::Approx(expect * expect).epsilon(1e-10));
    CHECK(classify_witness(ts).classification == "constant");
    CHECK_THROWS_AS(nondispersion_witness(catalog("htype", {4, 2}), g, 1.0), NotLinear);
  }

  TEST_CASE("optimality witness") {
    // Heisenberg: the phase vanishes on the support of g
    std::vector<WitnessEntry> es;
    for (double t : {2.0, 50.0}) es.push_back(optimality_witness(catalog("heisenberg", {1}), t));
    CHECK(classify_witness(es).classification == "constant");
    CHECK(es[1].z[0] == doctest::Approx(200.0));
    // htype(4,3): modulus t roughly constant
    auto spec = catalog("htype", {4, 3});
    auto a = optimality_witness(spec, 100.0), b = optimality_witness(spec, 200.0);
    CHECK(a.modulus * 100.0 == doctest::Approx(b.modulus * 200.0).epsilon(0.05));
    WitnessOptions bad;
    bad.radius = 1.2;
    CHECK_THROWS(optimality_witness(spec, 10.0, bad));
    CHECK_THROWS_AS(optimality_witness(spec, 0.0), ZeroTime);
  }

  TEST_CASE("classification") {
    std::vector<WitnessEntry> es;
    for (double t : {1.0, 10.0, 100.0}) es.push_back(WitnessEntry{t, std::complex<double>(1.0 / t, 0.0), 1.0 / t});
    auto r = classify_witness(es);
    CHECK(r.classification == "power-law");
    CHECK(r.exponent == doctest::Approx(-1.0));
  }
}

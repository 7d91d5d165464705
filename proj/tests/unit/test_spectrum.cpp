#include <doctest.h>

#include <cmath>
#include <random>

#include "stratwave/errors.hpp"
#include "stratwave/spectrum.hpp"

using namespace stratwave;

TEST_SUITE("spectrum") {
  TEST_CASE("window shape") {
    WindowSpec w{1.0, 2.0};
    CHECK(window(w, 1.0) == 0.0);
    CHECK(window(w, 2.0) == 0.0);
    CHECK(window(w, 0.3) == 0.0);
    CHECK(window(w, 7.0) == 0.0);
    for (double s = 1.25; s <= 1.75; s += 0.05) CHECK(window(w, s) == 1.0);
    for (double s = 1.01; s < 1.25; s += 0.02) {
      CHECK(window(w, s) > 0.0);
      CHECK(window(w, s) < 1.0);
      CHECK(window(w, s) == doctest::Approx(window(w, 3.0 - s)).epsilon(1e-12));
      CHECK(window(w, s + 0.01) >= window(w, s));
    }
    // flat to all orders at the support edge
    CHECK(window(w, 1.0 + 1e-3) < 1e-100);
    CHECK_THROWS(WindowSpec{2.0, 1.0}.validate());
    CHECK_THROWS(WindowSpec{0.0, 1.0}.validate());
  }

  TEST_CASE("zeta examples") {
    auto h = catalog("heisenberg", {1});
    std::vector<double> l{0.5};
    CHECK(zeta(h, {2}, l) == doctest::Approx(10.0));
    auto ht = catalog("htype", {4, 3});
    std::vector<double> l3{0.0, 0.3, 0.4};
    CHECK(zeta(ht, {0, 1}, l3) == doctest::Approx(2.0));
    auto sp = make_spectral_point(ht, {1.0, 2.0}, {0, 1}, l3);
    CHECK(sp.zeta_j.size() == 2);
    CHECK(sp.zeta_j[1] == doctest::Approx(1.5));
    CHECK(sp.window_j[1] == 1.0);
    CHECK(sp.window == 0.0);
    CHECK(sp.nu.empty());
    CHECK_THROWS(zeta(ht, {0}, l3));
  }

  TEST_CASE("multi indices") {
    auto v = multi_indices(3, 4);
    CHECK(v.size() == 15);
    for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i - 1] < v[i]);
    for (auto& a : v) CHECK(a[0] + a[1] + a[2] == 4);
    CHECK(multi_indices(1, 5).size() == 1);
    CHECK(multi_indices(2, 0).size() == 1);
  }

  TEST_CASE("alpha support on Heisenberg") {
    auto h = catalog("heisenberg", {1});
    WindowSpec w{1.0, 2.0};
    auto s0 = alpha_support(h, w, 0);
    REQUIRE(s0.terms.size() == 1);
    CHECK(s0.terms[0].lambda_support[0].r_min == doctest::Approx(0.25));
    CHECK(s0.terms[0].lambda_support[0].r_max == doctest::Approx(0.5));
    auto s3 = alpha_support(h, w, 3);
    CHECK(s3.terms[0].lambda_support[0].r_min == doctest::Approx(1.0 / 28));
    CHECK(s3.terms[0].gamma_support[0].r_max == doctest::Approx(3.0 / 14));
    CHECK(s3.gamma_r_min == doctest::Approx(3.0 / 28));
  }

  TEST_CASE("alpha support drops empty terms") {
    // window [1, 1.2] with alpha = (0, 2): needs 1/(4) < |lambda| < 1.2/20
    auto h = catalog("heisenberg", {2});
    auto s = alpha_support(h, {1.0, 1.2}, 2);
    CHECK(s.terms.size() == 1);
    CHECK(s.terms[0].alpha == MultiIndex{1, 1});
    CHECK(alpha_support(h, {1.0, 1.2}, 1).terms.empty());
  }

  TEST_CASE("support contains every windowed lambda") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    WindowSpec w{1.0, 2.0};
    for (const char* name : {"heisenberg:2", "htype:4,3", "tensor_heisenberg:1,1", "diamond:1,2"}) {
      auto spec = catalog_from_string(name);
      auto num = spec.with_eta_mode(EtaMode::Numeric);
      for (int m = 0; m <= 3; ++m) {
        auto sup = alpha_support(spec, w, m);
        for (const auto& alpha : multi_indices(spec.d(), m)) {
          const AlphaTerm* term = nullptr;
          for (const auto& t : sup.terms)
            if (t.alpha == alpha) term = &t;
          for (int i = 0; i < 300; ++i) {
            std::vector<double> l(spec.p());
            for (auto& x : l) x = nd(rng);
            double scale = 1.2 * ud(rng);
            for (auto& x : l) x *= scale;
            double wp;
            try {
              wp = window_product(spec, w, alpha, l);
            } catch (const DegenerateLambda&) {
              continue;
            }
            if (wp == 0.0) continue;
            REQUIRE(term != nullptr);
            for (const auto& sb : term->lambda_support) {
              double r = 0.0;
              for (int c = 0; c < sb.dim; ++c) r += l[sb.center_offset + c] * l[sb.center_offset + c];
              r = std::sqrt(r);
              CHECK(r > sb.r_min * (1 - 1e-12));
              CHECK(r < sb.r_max * (1 + 1e-12));
            }
          }
        }
        if (spec.name().find("tensor") != std::string::npos) {
          CHECK_THROWS(alpha_support(num, w, m));
          continue;
        }
        // numeric mode gives one shell holding every admissible term
        auto nsup = alpha_support(num, w, m);
        CHECK(nsup.terms.size() == sup.terms.size());
        for (std::size_t i = 0; i < std::min(sup.terms.size(), nsup.terms.size()); ++i) {
          CHECK(nsup.terms[i].lambda_support[0].r_min <= sup.terms[i].lambda_support[0].r_min * (1 + 1e-9));
          CHECK(nsup.terms[i].lambda_support[0].r_max >= sup.terms[i].lambda_support[0].r_max * (1 - 1e-9));
        }
      }
    }
  }

  TEST_CASE("zeta gradient") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    for (const char* name : {"heisenberg:1", "htype:4,3", "tensor_htype:4,2,2,1", "diamond:1,1"}) {
      auto spec = catalog_from_string(name);
      for (int i = 0; i < 10; ++i) {
        std::vector<double> l(spec.p());
        for (auto& x : l) x = nd(rng);
        MultiIndex alpha(spec.d(), 0);
        alpha[0] = i % 3;
        auto g = zeta_gradient(spec, alpha, l);
        for (int c = 0; c < spec.p(); ++c) {
          auto up = l, down = l;
          up[c] += 1e-6;
          down[c] -= 1e-6;
          double fd = (zeta(spec, alpha, up) - zeta(spec, alpha, down)) / 2e-6;
          CHECK(std::abs(g[c] - fd) < 1e-6);
        }
      }
    }
    auto h = catalog("heisenberg", {1});
    std::vector<double> neg{-2.0};
    CHECK(zeta_gradient(h, {1}, neg)[0] == doctest::Approx(-12.0));
  }
}

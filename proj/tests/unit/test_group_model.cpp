#include <doctest.h>

#include <Eigen/SVD>
#include <cmath>
#include <random>

#include "stratwave/errors.hpp"
#include "stratwave/group_model.hpp"

using namespace stratwave;

namespace {

const std::vector<std::string> kCatalog = {"heisenberg:1", "heisenberg:2", "heisenberg:3", "htype:2,1", "htype:4,2",
                                           "htype:4,3",    "htype:8,5",    "htype:8,7",    "diamond:1,1", "diamond:1,2",
                                           "tensor_heisenberg:1,1", "tensor_heisenberg:2,1", "tensor_htype:4,2,4,1"};

std::vector<double> random_lambda(std::mt19937_64& rng, int p) {
  std::normal_distribution<double> n;
  std::vector<double> v(p);
  for (auto& x : v) x = n(rng);
  return v;
}

GroupElement random_element(std::mt19937_64& rng, const GroupSpec& spec) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  GroupElement x = GroupElement::identity(spec);
  for (auto* part : {&x.P, &x.Q, &x.R, &x.Z})
    for (auto& c : *part) c = u(rng);
  return x;
}

double max_diff(const GroupElement& a, const GroupElement& b) {
  auto va = a.first_layer(), vb = b.first_layer();
  double m = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) m = std::max(m, std::abs(va[i] - vb[i]));
  for (std::size_t i = 0; i < a.Z.size(); ++i) m = std::max(m, std::abs(a.Z[i] - b.Z[i]));
  return m;
}

}  // namespace

TEST_SUITE("group_model") {
  TEST_CASE("catalog dimensions") {
    auto h = catalog("heisenberg", {1});
    CHECK(h.p() == 1);
    CHECK(h.d() == 1);
    CHECK(h.k() == 0);
    auto ht = catalog("htype", {4, 3});
    CHECK(ht.p() == 3);
    CHECK(ht.d() == 2);
    CHECK(ht.k() == 0);
    auto th = catalog("tensor_heisenberg", {1, 1});
    CHECK(th.p() == 2);
    CHECK(th.d() == 2);
    auto dm = catalog("diamond", {1, 1});
    CHECK(dm.p() == 1);
    CHECK(dm.d() == 1);
    CHECK(dm.k() == 1);
    CHECK(dm.frame_mode() == FrameMode::CenterOnly);
    CHECK(ht.frame_mode() == FrameMode::Explicit);
    CHECK(catalog_from_string("heisenberg:2").d() == 2);
  }

  TEST_CASE("catalog errors") {
    CHECK_THROWS_AS(catalog("nilpotent", {1}), CatalogError);
    CHECK_THROWS_AS(catalog("htype", {6, 2}), CatalogError);
    CHECK_THROWS_AS(catalog("htype", {4, 4}), CatalogError);
    CHECK_THROWS_AS(catalog("htype", {3, 1}), CatalogError);
    CHECK_THROWS_AS(catalog("diamond", {3, 2}), CatalogError);
    CHECK_THROWS_AS(catalog("heisenberg", {0}), CatalogError);
    CHECK_THROWS_AS(catalog_from_string("heisenberg:x"), CatalogError);
  }

  TEST_CASE("b_form examples") {
    auto h = catalog("heisenberg", {1});
    std::vector<double> one{1.0};
    auto B = b_form(h, one);
    CHECK(B(0, 1) == 4.0);
    CHECK(B(1, 0) == -4.0);
    CHECK(B(0, 0) == 0.0);
    std::vector<double> zero{0.0};
    CHECK(b_form(h, zero).norm() == 0.0);
    auto th = catalog("tensor_heisenberg", {1, 1});
    std::vector<double> l{1.0, 0.0};
    auto Bt = b_form(th, l);
    // basis P1, P2, Q1, Q2
    CHECK(Bt(0, 2) == 4.0);
    CHECK(Bt(2, 0) == -4.0);
    CHECK(Bt(1, 3) == 0.0);
    CHECK((Bt + Bt.transpose()).norm() == 0.0);
  }

  TEST_CASE("eta examples") {
    std::vector<double> half{0.5};
    auto e = eta(catalog("heisenberg", {2}), half);
    REQUIRE(e.size() == 2);
    CHECK(e[0] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(e[1] == doctest::Approx(2.0).epsilon(1e-14));
    std::vector<double> l{3.0, 0.0, 4.0};
    auto e3 = eta(catalog("htype", {4, 3}), l);
    CHECK(e3[0] == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(e3[1] == doctest::Approx(5.0).epsilon(1e-14));
    auto h1 = catalog("heisenberg", {1});
    std::vector<double> one{1.0};
    CHECK(std::abs(eta(h1.with_eta_mode(EtaMode::Numeric), one)[0] - eta(h1, one)[0]) < 1e-12);
  }

  TEST_CASE("pfaffian and homogeneity") {
    std::vector<double> one{1.0};
    CHECK(pfaffian(catalog("heisenberg", {2}), one) == doctest::Approx(16.0));
    std::vector<double> unit{0.6, 0.0, 0.8};
    CHECK(pfaffian(catalog("htype", {4, 3}), unit) == doctest::Approx(1.0).epsilon(1e-13));
    std::mt19937_64 rng(7);
    for (const auto& name : kCatalog) {
      auto spec = catalog_from_string(name);
      for (int i = 0; i < 20; ++i) {
        auto l = random_lambda(rng, spec.p());
        double s = 0.3 + 2.0 * i / 20.0;
        auto ls = l;
        for (auto& x : ls) x *= s;
        auto e = eta(spec, l), es = eta(spec, ls);
        for (std::size_t j = 0; j < e.size(); ++j) CHECK(std::abs(es[j] - s * e[j]) < 1e-12 * (1 + s * e[j]));
        CHECK(pfaffian(spec, ls) == doctest::Approx(std::pow(s, spec.d()) * pfaffian(spec, l)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("numeric eta matches closed form") {
    std::mt19937_64 rng(11);
    for (const auto& name : kCatalog) {
      auto spec = catalog_from_string(name);
      auto num = spec.with_eta_mode(EtaMode::Numeric);
      for (int i = 0; i < 100; ++i) {
        auto l = random_lambda(rng, spec.p());
        auto a = eta(spec, l), b = eta(num, l);
        std::sort(a.begin(), a.end());
        REQUIRE(a.size() == b.size());
        for (std::size_t j = 0; j < a.size(); ++j) CHECK(std::abs(a[j] - b[j]) < 1e-10 * (1.0 + a[j]));
      }
    }
  }

  TEST_CASE("singular values of B: k zeros, 2d nonzero") {
    std::mt19937_64 rng(13);
    for (const auto& name : kCatalog) {
      auto spec = catalog_from_string(name);
      for (int i = 0; i < 100; ++i) {
        auto l = random_lambda(rng, spec.p());
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(b_form(spec, l));
        auto sv = svd.singularValues();
        int zeros = 0;
        for (int j = 0; j < sv.size(); ++j)
          if (sv[j] < 1e-10) ++zeros;
        CHECK(zeros == spec.k());
      }
    }
  }

  TEST_CASE("H-type structure is Clifford") {
    std::mt19937_64 rng(17);
    for (const auto& name : {"htype:2,1", "htype:4,2", "htype:4,3", "htype:8,4", "htype:8,7", "htype:16,6"}) {
      auto spec = catalog_from_string(name);
      for (double v : spec.structure_tensor()) CHECK((v == 0.0 || std::abs(v) == 1.0));
      for (int i = 0; i < 10; ++i) {
        auto l = random_lambda(rng, spec.p());
        double r2 = 0.0;
        for (double x : l) r2 += x * x;
        auto B = b_form(spec, l);
        Eigen::MatrixXd BtB = B.transpose() * B;
        CHECK((BtB - r2 * Eigen::MatrixXd::Identity(spec.dim_v(), spec.dim_v())).norm() < 1e-12 * (1 + r2));
      }
    }
  }

  TEST_CASE("degenerate lambda") {
    std::vector<double> zero{0.0};
    CHECK_THROWS_AS(eta(catalog("heisenberg", {1}), zero), DegenerateLambda);
    CHECK_THROWS_AS(eta(catalog("heisenberg", {1}).with_eta_mode(EtaMode::Numeric), zero), DegenerateLambda);
    std::vector<double> axis{1.0, 0.0};
    auto th = catalog("tensor_heisenberg", {1, 1});
    CHECK_THROWS_AS(eta(th, axis), DegenerateLambda);
    CHECK_THROWS_AS(eta(th.with_eta_mode(EtaMode::Numeric), axis), DegenerateLambda);
    CHECK_THROWS_AS(pfaffian(th, axis), DegenerateLambda);
  }

  TEST_CASE("frame is orthonormal and symplectic") {
    std::mt19937_64 rng(19);
    for (const auto& name : {"heisenberg:2", "htype:4,3", "htype:8,5", "tensor_heisenberg:1,2", "tensor_htype:4,2,2,1"}) {
      auto spec = catalog_from_string(name);
      for (int i = 0; i < 10; ++i) {
        auto l = random_lambda(rng, spec.p());
        auto F = frame(spec, l);
        auto e = eta(spec, l);
        const int n = spec.dim_v(), d = spec.d();
        CHECK((F.transpose() * F - Eigen::MatrixXd::Identity(n, n)).norm() < 1e-12);
        Eigen::MatrixXd C = F.transpose() * b_form(spec, l) * F;
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b) {
            CHECK(std::abs(C(a, d + b) - (a == b ? e[a] : 0.0)) < 1e-11 * (1 + e[a]));
            CHECK(std::abs(C(a, b)) < 1e-11 * (1 + e[a]));
            CHECK(std::abs(C(d + a, d + b)) < 1e-11 * (1 + e[a]));
          }
      }
    }
    std::vector<double> one{1.0};
    CHECK_THROWS_AS(frame(catalog("diamond", {1, 1}), one), FrameUnavailable);
    // Heisenberg: P = x, Q = sgn(lambda) y
    auto h = catalog("heisenberg", {1});
    std::vector<double> neg{-0.7};
    auto F = frame(h, neg);
    CHECK(F(0, 0) == doctest::Approx(1.0));
    CHECK(F(1, 1) == doctest::Approx(-1.0));
  }

  TEST_CASE("homogeneous dimension and dilations") {
    CHECK(homogeneous_dimension(catalog("heisenberg", {1})) == 4);
    CHECK(homogeneous_dimension(catalog("htype", {4, 3})) == 10);
    std::mt19937_64 rng(23);
    for (const auto& name : kCatalog) {
      auto spec = catalog_from_string(name);
      auto x = random_element(rng, spec), y = random_element(rng, spec);
      CHECK(max_diff(dilate(spec, 1.0, x), x) == 0.0);
      double t = 1.7;
      auto lhs = dilate(spec, t, group_product(spec, x, y));
      auto rhs = group_product(spec, dilate(spec, t, x), dilate(spec, t, y));
      CHECK(max_diff(lhs, rhs) < 1e-12 * 50);
    }
  }

  TEST_CASE("group law") {
    std::mt19937_64 rng(29);
    for (const auto& name : kCatalog) {
      auto spec = catalog_from_string(name);
      for (int i = 0; i < 20; ++i) {
        auto x = random_element(rng, spec), y = random_element(rng, spec), z = random_element(rng, spec);
        auto a = group_product(spec, group_product(spec, x, y), z);
        auto b = group_product(spec, x, group_product(spec, y, z));
        CHECK(max_diff(a, b) < 1e-12 * 10);
        CHECK(max_diff(group_product(spec, x, group_inverse(x)), GroupElement::identity(spec)) < 1e-12);
        auto c = GroupElement::identity(spec);
        c.Z = y.Z;
        auto xc = group_product(spec, x, c);
        auto sum = x;
        for (std::size_t l = 0; l < sum.Z.size(); ++l) sum.Z[l] += c.Z[l];
        CHECK(max_diff(xc, sum) == 0.0);
      }
    }
  }

  TEST_CASE("Heisenberg law matches (x,y,s)(x',y',s') = (x+x', y+y', s+s'-2xy'+2yx') after s -> -s") {
    auto h = catalog("heisenberg", {1});
    std::mt19937_64 rng(31);
    for (int i = 0; i < 20; ++i) {
      auto a = random_element(rng, h), b = random_element(rng, h);
      auto c = group_product(h, a, b);
      double s1 = -a.Z[0], s2 = -b.Z[0];
      double s = s1 + s2 - 2.0 * a.P[0] * b.Q[0] + 2.0 * a.Q[0] * b.P[0];
      CHECK(-c.Z[0] == doctest::Approx(s).epsilon(1e-14));
    }
  }

  TEST_CASE("json round trip") {
    for (const auto& name : kCatalog) {
      auto spec = catalog_from_string(name);
      auto back = group_from_json(to_json(spec));
      CHECK(back.name() == spec.name());
      CHECK(back.structure_tensor() == spec.structure_tensor());
      CHECK(back.eta_mode() == spec.eta_mode());
    }
    auto h = catalog("htype", {4, 2});
    std::string doc = to_json(h);
    auto pos = doc.find("\"catalog\"");
    std::string stripped = doc.substr(0, doc.rfind(',', pos)) + "\n}";
    auto pos2 = stripped.find("CLOSED_FORM");
    stripped.replace(pos2, 11, "NUMERIC");
    auto num = group_from_json(stripped);
    CHECK(num.eta_mode() == EtaMode::Numeric);
    CHECK(num.frame_mode() == FrameMode::CenterOnly);
    std::vector<double> l{0.3, -0.4};
    CHECK(eta(num, l)[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(group_from_json("{\"p\": 1}"), CatalogError);
    CHECK_THROWS_AS(group_from_json("not json"), CatalogError);
    CHECK_THROWS_AS(GroupSpec::from_structure("bad", 1, 1, 0, {0.0, 1.0, 1.0, 0.0}), CatalogError);
  }
}

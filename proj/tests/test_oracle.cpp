#include <doctest.h>

#include <cmath>

#include "ncdist/freeness_oracle.hpp"
#include "test_support.hpp"

using namespace ncdist;
using testsupport::Rng;

TEST_SUITE_BEGIN("oracle");

namespace {

long catalan(int n) {
  long c = 1;
  for (int k = 0; k < n; ++k) c = c * 2 * (2 * k + 1) / (k + 2);
  return c;
}

std::vector<ComplexMatrix> ones(std::size_t count, std::size_t dim) {
  return std::vector<ComplexMatrix>(count, ComplexMatrix::identity(dim));
}

// E[X c_1 X ... X] for coeff (x) X with scalar moments mu_k
MomentFn lifted_moments(const ComplexMatrix& coeff, std::vector<double> mu) {
  return [coeff, mu = std::move(mu)](std::span<const ComplexMatrix> inner) {
    const std::size_t m = inner.size() + 1;
    ComplexMatrix acc = coeff;
    for (const auto& c : inner) acc = acc * c * coeff;
    return Complex(mu.at(m)) * acc;
  };
}

}  // namespace

TEST_CASE("enumerate_nc counts follow the Catalan numbers") {
  for (int n = 1; n <= 10; ++n)
    CHECK(enumerate_nc(n, false).size() == static_cast<std::size_t>(catalan(n)));
  for (int m = 1; m <= 8; ++m)
    CHECK(enumerate_nc(2 * m, true).size() == static_cast<std::size_t>(catalan(m)));
  CHECK(enumerate_nc(3, true).empty());
  CHECK_THROWS_AS(enumerate_nc(11, false), CapError);
  CHECK_THROWS_AS(enumerate_nc(18, true), CapError);

  for (const auto& pi : enumerate_nc(8, false)) CHECK(is_noncrossing(pi));
}

TEST_CASE("the two pairings of four points") {
  auto ps = enumerate_nc(4, true);
  REQUIRE(ps.size() == 2);
  CHECK(ps[0].blocks == std::vector<std::vector<int>>{{1, 2}, {3, 4}});
  CHECK(ps[1].blocks == std::vector<std::vector<int>>{{1, 4}, {2, 3}});

  auto single = enumerate_nc(2, true);
  REQUIRE(single.size() == 1);
  CHECK(single[0].blocks == std::vector<std::vector<int>>{{1, 2}});
}

TEST_CASE("is_noncrossing rejects the crossing pairing") {
  NCPartition crossing{4, {{1, 3}, {2, 4}}};
  CHECK_FALSE(is_noncrossing(crossing));
}

TEST_CASE("eta_pi nesting semantics") {
  Rng rng(31);
  const std::size_t n = 2;
  auto eta = CovarianceMap::explicit_list(
      {testsupport::random_hermitian(rng, n), testsupport::random_hermitian(rng, n)});
  ComplexMatrix b1 = testsupport::random_matrix(rng, n);
  ComplexMatrix b2 = testsupport::random_matrix(rng, n);
  ComplexMatrix b3 = testsupport::random_matrix(rng, n);
  std::vector<ComplexMatrix> b{b1, b2, b3};

  NCPartition side{4, {{1, 2}, {3, 4}}};
  CHECK(testsupport::max_abs_diff(eta_pi(side, eta, b),
                                  eta.apply(b1) * b2 * eta.apply(b3)) < 1e-12);

  NCPartition nested{4, {{1, 4}, {2, 3}}};
  CHECK(testsupport::max_abs_diff(eta_pi(nested, eta, b),
                                  eta.apply(b1 * eta.apply(b2) * b3)) < 1e-12);
}

TEST_CASE("semicircular moments reproduce the Catalan sequence exactly") {
  auto eta = CovarianceMap::scalar(1.0);
  const double expected[] = {1.0, 2.0, 5.0, 14.0};
  for (int m = 1; m <= 4; ++m) {
    auto b = ones(static_cast<std::size_t>(2 * m - 1), 1);
    ComplexMatrix v = semicircular_moment(eta, b);
    CHECK(v(0, 0).real() == expected[m - 1]);  // dyadic-exact, no tolerance
    CHECK(v(0, 0).imag() == 0.0);
  }
  // odd moments vanish
  CHECK(semicircular_moment(eta, ones(2, 1))(0, 0) == Complex(0.0));
  // variance scaling: order 2m scales by sigma^{2m}
  auto eta2 = CovarianceMap::scalar(2.0);
  CHECK(semicircular_moment(eta2, ones(3, 1))(0, 0).real() == doctest::Approx(2.0 * 4.0));
  CHECK_THROWS_AS(semicircular_moment(eta, ones(12, 1)), CapError);
}

TEST_CASE("matrix-valued semicircular moment against the block covariance") {
  // eta((b_ij)) = [[b22, b21],[b12, b11+b22]] from S = [[0,S1],[S1,S2]]
  ComplexMatrix c1(2, 2, {0.0, 1.0, 1.0, 0.0});
  ComplexMatrix c2(2, 2, {0.0, 0.0, 0.0, 1.0});
  auto eta = CovarianceMap::explicit_list({c1, c2});

  Rng rng(32);
  ComplexMatrix b = testsupport::random_matrix(rng, 2);
  ComplexMatrix expected(2, 2, {b(1, 1), b(1, 0), b(0, 1), b(0, 0) + b(1, 1)});
  CHECK(testsupport::max_abs_diff(eta.apply(b), expected) < 1e-12);

  // second moment E[S 1 S] = eta(1)
  ComplexMatrix m2 = semicircular_moment(eta, ones(1, 2));
  CHECK(testsupport::max_abs_diff(m2, eta.apply(ComplexMatrix::identity(2))) < 1e-12);

  // fourth moment: ladder + nested pairing give eta(1)^2 + eta(eta(1)) =
  // diag(1,4) + diag(2,3) = diag(3,7); normalized trace 5
  ComplexMatrix m4 = semicircular_moment(eta, ones(3, 2));
  ComplexMatrix eta1 = eta.apply(ComplexMatrix::identity(2));
  CHECK(testsupport::max_abs_diff(m4, eta1 * eta1 + eta.apply(eta1)) < 1e-12);
  CHECK(0.5 * m4.trace().real() == doctest::Approx(5.0));
}

TEST_CASE("linear-action covariance checks Choi positivity") {
  ComplexMatrix id_action = ComplexMatrix::identity(4);
  auto ok = CovarianceMap::linear_action(2, id_action);
  Rng rng(33);
  ComplexMatrix b = testsupport::random_matrix(rng, 2);
  CHECK(testsupport::max_abs_diff(ok.apply(b), b) < 1e-14);

  // the transpose map is positive but not completely positive
  ComplexMatrix transpose_action(4, 4);
  transpose_action(0, 0) = 1.0;
  transpose_action(1, 2) = 1.0;
  transpose_action(2, 1) = 1.0;
  transpose_action(3, 3) = 1.0;
  CHECK_THROWS_AS(CovarianceMap::linear_action(2, transpose_action), ConfigError);
}

TEST_CASE("free cumulants: orders 1 to 3") {
  Rng rng(34);
  const std::size_t n = 2;
  ComplexMatrix coeff = testsupport::random_hermitian(rng, n);
  std::vector<double> mu{1.0, 0.3, 1.7, 0.4, 3.1, 0.9, 8.0, 2.5, 30.0};
  MomentFn E = lifted_moments(coeff, mu);

  CHECK(testsupport::max_abs_diff(free_cumulant(E, n, {}), E({})) < 1e-12);

  // kappa_2(a c, a) = E[a c a] - E[a] c E[a]
  ComplexMatrix c = testsupport::random_matrix(rng, n);
  std::vector<ComplexMatrix> inner{c};
  ComplexMatrix k2 = free_cumulant(E, n, inner);
  ComplexMatrix expect2 = E(inner) - E({}) * c * E({});
  CHECK(testsupport::max_abs_diff(k2, expect2) < 1e-12);

  // kappa_3 with unit interleavers: the five-term formula ending +2 E E E
  std::vector<ComplexMatrix> inner3 = ones(2, n);
  ComplexMatrix k3 = free_cumulant(E, n, inner3);
  ComplexMatrix m1 = E({});
  ComplexMatrix m2 = E(ones(1, n));
  ComplexMatrix m3 = E(ones(2, n));
  ComplexMatrix m_mid = E(std::vector<ComplexMatrix>{m1});  // E[a E[a] a]
  ComplexMatrix expect3 = m3 - m1 * m2 - m2 * m1 - m_mid + Complex(2.0) * m1 * m1 * m1;
  CHECK(testsupport::max_abs_diff(k3, expect3) < 1e-12);
}

TEST_CASE("moment-cumulant round trip is exact on dyadic input") {
  // dyadic weights/atoms make every intermediate value an exact double
  std::vector<std::pair<double, double>> wt{{0.5, -2.0}, {0.25, -1.0}, {0.25, 1.0}};
  auto m = atomic_scalar_moments(wt, 8);
  auto kappa = scalar_cumulants_from_moments(m);
  auto back = scalar_moments_from_cumulants(kappa);
  for (std::size_t k = 0; k < m.size(); ++k) CHECK(back[k] == m[k]);

  Rng rng(35);
  std::vector<double> mr(9);
  mr[0] = 1.0;
  for (std::size_t k = 1; k < mr.size(); ++k) mr[k] = rng.sym();
  auto kr = scalar_cumulants_from_moments(mr);
  auto br = scalar_moments_from_cumulants(kr);
  for (std::size_t k = 0; k < mr.size(); ++k)
    CHECK(br[k] == doctest::Approx(mr[k]).epsilon(1e-12));
}

TEST_CASE("semicircular scalar cumulants are (0, variance, 0, 0, ...)") {
  auto m = semicircular_scalar_moments(1.5, 8);
  auto kappa = scalar_cumulants_from_moments(m);
  CHECK(kappa[0] == doctest::Approx(0.0));
  CHECK(kappa[1] == doctest::Approx(1.5));
  for (std::size_t k = 2; k < kappa.size(); ++k) CHECK(std::abs(kappa[k]) < 1e-10);
}

TEST_CASE("mixed moments of free variables factor through the nesting") {
  Rng rng(36);
  const std::size_t n = 2;
  ComplexMatrix cx = testsupport::random_hermitian(rng, n);
  ComplexMatrix cy = testsupport::random_hermitian(rng, n);
  std::vector<double> mux{1.0, 0.5, 2.0, 0.75, 5.5, 2.0, 16.0, 7.0, 50.0};
  std::vector<double> muy{1.0, -0.25, 1.25, -0.5, 3.0, -1.5, 9.0, -4.0, 28.0};

  ScalarLiftedVariable X(cx, scalar_cumulants_from_moments(mux));
  ScalarLiftedVariable Y(cy, scalar_cumulants_from_moments(muy));
  std::vector<const FreeVariable*> vars{&X, &Y};

  MomentFn EX = lifted_moments(cx, mux);
  MomentFn EY = lifted_moments(cy, muy);

  ComplexMatrix b = testsupport::random_matrix(rng, n);
  ComplexMatrix b2 = testsupport::random_matrix(rng, n);

  // E[X b Y] = E[X] b E[Y]
  {
    std::vector<int> word{0, 1};
    std::vector<ComplexMatrix> inter{b};
    ComplexMatrix got = mixed_moment_free(vars, word, inter);
    CHECK(testsupport::max_abs_diff(got, EX({}) * b * EY({})) < 1e-11);
  }
  // E[X b1 Y b2 X] = E[X b1 E[Y] b2 X]
  {
    std::vector<int> word{0, 1, 0};
    std::vector<ComplexMatrix> inter{b, b2};
    ComplexMatrix got = mixed_moment_free(vars, word, inter);
    ComplexMatrix expect = EX(std::vector<ComplexMatrix>{b * EY({}) * b2});
    CHECK(testsupport::max_abs_diff(got, expect) < 1e-11);
  }
  // E[XYXY] = E[X] E[Y E[X] Y] + E[X E[Y] X] E[Y] - E[X] E[Y] E[X] E[Y]
  {
    std::vector<int> word{0, 1, 0, 1};
    auto inter = ones(3, n);
    ComplexMatrix got = mixed_moment_free(vars, word, inter);
    ComplexMatrix ex = EX({}), ey = EY({});
    ComplexMatrix expect = ex * EY(std::vector<ComplexMatrix>{ex}) +
                           EX(std::vector<ComplexMatrix>{ey}) * ey - ex * ey * ex * ey;
    CHECK(testsupport::max_abs_diff(got, expect) < 1e-11);
  }
}

TEST_CASE("mixed moments of free semicirculars vanish on alternating words") {
  // phi(S1 S2 S1 S2) = 0
  ComplexMatrix one = ComplexMatrix::identity(1);
  ScalarLiftedVariable S1(one, {0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0});
  ScalarLiftedVariable S2(one, {0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0});
  std::vector<const FreeVariable*> vars{&S1, &S2};
  std::vector<int> word{0, 1, 0, 1};
  auto inter = ones(3, 1);
  CHECK(mixed_moment_free(vars, word, inter)(0, 0) == Complex(0.0));
}

TEST_CASE("exponential bound on semicircular moments") {
  Rng rng(37);
  for (int rep = 0; rep < 5; ++rep) {
    const std::size_t n = 2;
    auto eta = CovarianceMap::explicit_list({testsupport::random_hermitian(rng, n)});
    const double eta_norm = eta.norm_bound();
    for (int m = 1; m <= 4; ++m) {
      std::vector<ComplexMatrix> b;
      double prod = 1.0;
      for (int j = 0; j < 2 * m - 1; ++j) {
        b.push_back(testsupport::random_matrix(rng, n));
        prod *= operator_norm(b.back());
      }
      const double lhs = operator_norm(semicircular_moment(eta, b));
      const double bound = std::pow(2.0 * std::max(eta_norm, 1.0), 2.0 * m) * prod;
      CHECK(lhs <= bound * (1.0 + 1e-9));
    }
  }
}

TEST_SUITE_END();

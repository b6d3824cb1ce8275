#include <doctest.h>

#include <cmath>

#include "ncdist/cauchy.hpp"
#include "test_support.hpp"

using namespace ncdist;
using testsupport::Rng;

TEST_SUITE_BEGIN("cauchy");

namespace {

const Complex I(0.0, 1.0);

// lower-half-plane branch of the standard semicircle transform
Complex semicircle_g(Complex z, double variance = 1.0) {
  const Complex root = std::sqrt(z * z - 4.0 * variance);
  Complex g = (z + root) / (2.0 * variance);
  if (g.imag() > 0.0) g = (z - root) / (2.0 * variance);
  return g;
}

}  // namespace

TEST_CASE("cauchy_constant on pinned inputs") {
  ComplexMatrix zero1(1, 1);
  CHECK(cauchy_constant(zero1, ComplexMatrix::scalar(1, 2.0 * I))(0, 0) == -0.5 * I);

  ComplexMatrix zero3(3, 3);
  CHECK(testsupport::max_abs_diff(cauchy_constant(zero3, ComplexMatrix::scalar(3, I)),
                                  ComplexMatrix::scalar(3, -I)) < 1e-14);

  std::vector<Complex> d{1.0, -1.0};
  ComplexMatrix b0 = ComplexMatrix::diagonal(d);
  ComplexMatrix g = cauchy_constant(b0, ComplexMatrix::scalar(2, I));
  CHECK(std::abs(g(0, 0) - 1.0 / (I - 1.0)) < 1e-14);
  CHECK(std::abs(g(1, 1) - 1.0 / (I + 1.0)) < 1e-14);
  CHECK(std::abs(g(0, 1)) < 1e-15);
}

TEST_CASE("cauchy_atomic on pinned inputs") {
  ComplexMatrix one(1, 1, {1.0});

  auto delta0 = FreeVariableSpec::atomic({{1.0, 0.0}});
  Rng rng(51);
  for (int rep = 0; rep < 5; ++rep) {
    ComplexMatrix z = testsupport::random_upper_half_plane(rng, 2);
    CHECK(testsupport::max_abs_diff(
              cauchy_atomic(ComplexMatrix::identity(2), delta0, z), solve_inverse(z)) < 1e-12);
  }

  auto pm1 = FreeVariableSpec::atomic({{0.5, -1.0}, {0.5, 1.0}});
  for (double y : {0.7, 1.3, 4.0}) {
    const Complex got = cauchy_atomic(one, pm1, ComplexMatrix::scalar(1, I * y))(0, 0);
    const Complex expect = -I * y / (y * y + 1.0);
    CHECK(std::abs(got - expect) < 1e-13);
  }

  // quarter(2 delta_{-2} + delta_{-1} + delta_{+1}): poles -2, -1, 1 with
  // residues 1/2, 1/4, 1/4
  auto mu = FreeVariableSpec::atomic({{0.5, -2.0}, {0.25, -1.0}, {0.25, 1.0}});
  for (int rep = 0; rep < 10; ++rep) {
    const Complex z(3.0 * rng.sym(), 0.2 + 2.0 * rng.uniform());
    const Complex got = cauchy_atomic(one, mu, ComplexMatrix::scalar(1, z))(0, 0);
    const Complex expect = 0.5 / (z + 2.0) + 0.25 / (z + 1.0) + 0.25 / (z - 1.0);
    CHECK(std::abs(got - expect) < 1e-13);
  }
}

TEST_CASE("atomic spec validation") {
  CHECK_THROWS_AS(FreeVariableSpec::atomic({{0.5, 0.0}, {0.4, 1.0}}), ConfigError);
  CHECK_THROWS_AS(FreeVariableSpec::atomic({{0.5, 1.0}, {0.5, 0.0}}), ConfigError);
  CHECK_THROWS_AS(FreeVariableSpec::semicircular(-1.0), ConfigError);
}

TEST_CASE("hrs fixed point: scalar closed form") {
  auto eta = CovarianceMap::scalar(1.0);
  ComplexMatrix w = hrs_fixed_point(eta, ComplexMatrix::scalar(1, 2.0 * I));
  CHECK(std::abs(w(0, 0) - I * (1.0 - std::sqrt(2.0))) < 1e-11);

  Rng rng(52);
  for (int rep = 0; rep < 20; ++rep) {
    const Complex z(4.0 * rng.sym(), 0.05 + 2.0 * rng.uniform());
    ComplexMatrix got = hrs_fixed_point(eta, ComplexMatrix::scalar(1, z));
    CHECK(std::abs(got(0, 0) - semicircle_g(z)) < 1e-10);
  }
}

TEST_CASE("hrs fixed point: zero covariance degenerates to the resolvent") {
  auto eta0 = CovarianceMap::explicit_list({ComplexMatrix(2, 2)});
  Rng rng(53);
  for (int rep = 0; rep < 5; ++rep) {
    ComplexMatrix z = testsupport::random_upper_half_plane(rng, 2);
    CHECK(testsupport::max_abs_diff(hrs_fixed_point(eta0, z), solve_inverse(z)) < 1e-10);
  }
}

TEST_CASE("hrs fixed point picks the lower branch on both diagonal blocks") {
  // eta = id on M_2 via the single coefficient 1
  auto eta = CovarianceMap::explicit_list({ComplexMatrix::identity(2)});
  std::vector<Complex> zd{2.0 * I, 0.5 + 3.0 * I};
  ComplexMatrix z = ComplexMatrix::diagonal(zd);
  ComplexMatrix w = hrs_fixed_point(eta, z);
  CHECK(std::abs(w(0, 0) - semicircle_g(zd[0])) < 1e-10);
  CHECK(std::abs(w(1, 1) - semicircle_g(zd[1])) < 1e-10);
  CHECK(std::abs(w(0, 1)) < 1e-10);
  CHECK(w(0, 0).imag() < 0.0);
  CHECK(w(1, 1).imag() < 0.0);
}

TEST_CASE("hrs norm and imaginary-part bounds") {
  Rng rng(54);
  for (int rep = 0; rep < 25; ++rep) {
    const std::size_t n = 1 + rng.index(3);
    std::vector<ComplexMatrix> coeffs;
    for (int j = 0; j <= rng.index(2); ++j)
      coeffs.push_back(testsupport::random_hermitian(rng, n));
    auto eta = CovarianceMap::explicit_list(coeffs);
    ComplexMatrix z = testsupport::random_upper_half_plane(rng, n, 0.2);
    ComplexMatrix w = hrs_fixed_point(eta, z);

    const double inv_im = 1.0 / min_eigenvalue(imaginary_part(z));
    CHECK(operator_norm(w) <= inv_im + 1e-8);
    CHECK(half_plane_membership(w, HalfPlane::lower).member());

    // Im w <= -[(||z|| + ||eta|| ||(Im z)^{-1}||)^2 ||(Im z)^{-1}||]^{-1}
    const double floor =
        1.0 / (std::pow(operator_norm(z) + eta.norm_bound() * inv_im, 2.0) * inv_im);
    const double top = jacobi_eigenvalues(imaginary_part(w)).back();
    CHECK(top <= -floor + 1e-8);
  }
}

TEST_CASE("damped iteration") {
  // constant map: one effective step
  ComplexMatrix c = ComplexMatrix::scalar(2, Complex(0.3, -0.8));
  SelfMap constant = [&c](const ComplexMatrix&) { return c; };
  SolveStats st;
  ComplexMatrix w = damped_iterate(constant, ComplexMatrix::scalar(2, -I), 1.0, 1000, &st);
  CHECK(testsupport::max_abs_diff(w, c) < 1e-12);
  CHECK(st.iterations <= 3);

  // alpha = 1 reproduces the plain hrs iterate
  auto eta = CovarianceMap::scalar(1.0);
  const Complex z(1.0, 0.8);
  SelfMap F = [&](const ComplexMatrix& ww) {
    return solve_inverse(ComplexMatrix::scalar(1, z) - eta.apply(ww));
  };
  ComplexMatrix w1 = damped_iterate(F, ComplexMatrix::scalar(1, -I), 1.0);
  CHECK(std::abs(w1(0, 0) - semicircle_g(z)) < 1e-10);

  // close to the real axis inside the support the plain iteration stalls
  // while the averaged one converges quickly
  const Complex hard(0.05, 2e-3);
  SelfMap Fh = [&](const ComplexMatrix& ww) {
    return solve_inverse(ComplexMatrix::scalar(1, hard) - eta.apply(ww));
  };
  SolveStats plain_stats, damped_stats;
  ComplexMatrix start = ComplexMatrix::scalar(1, -I);
  ComplexMatrix wd = damped_iterate(Fh, start, 0.5, kFixedPointCap, &damped_stats);
  CHECK(std::abs(wd(0, 0) - semicircle_g(hard)) < 1e-9);
  bool plain_converged = true;
  long plain_iters = kFixedPointCap;
  try {
    damped_iterate(Fh, start, 1.0, kFixedPointCap, &plain_stats);
    plain_iters = plain_stats.iterations;
  } catch (const ConvergenceError&) {
    plain_converged = false;
  }
  if (plain_converged) CHECK(plain_iters > 10 * damped_stats.iterations);
  CHECK(damped_stats.iterations * 10 < kFixedPointCap);
}

TEST_CASE("hrs auto-damping keeps hard points within the cap") {
  auto eta = CovarianceMap::scalar(1.0);
  SolveStats st;
  ComplexMatrix w =
      hrs_fixed_point(eta, ComplexMatrix::scalar(1, Complex(0.01, 1e-6)), nullptr, &st);
  CHECK(std::abs(w(0, 0) - semicircle_g(Complex(0.01, 1e-6))) < 1e-8);
}

TEST_CASE("every evaluator maps the upper half-plane into the lower one") {
  Rng rng(55);
  std::vector<EvaluatorPtr> evals;
  evals.push_back(make_constant_evaluator(testsupport::random_hermitian(rng, 2)));
  evals.push_back(make_atomic_evaluator(
      testsupport::random_hermitian(rng, 2),
      FreeVariableSpec::atomic({{0.25, -1.5}, {0.75, 0.5}})));
  evals.push_back(make_summand_evaluator(testsupport::random_hermitian(rng, 2),
                                         FreeVariableSpec::semicircular(0.7)));

  int checked = 0;
  for (const auto& ev : evals) {
    for (int rep = 0; rep < 34; ++rep) {
      const std::size_t m = 1 + rng.index(2);  // amplification level
      ComplexMatrix z = testsupport::random_upper_half_plane(rng, 2 * m, 0.1);
      ComplexMatrix g = ev->evaluate(z);
      CHECK(half_plane_membership(g, HalfPlane::lower).epsilon > 0.0);
      const double inv_im = 1.0 / min_eigenvalue(imaginary_part(z));
      CHECK(operator_norm(g) <= inv_im + 1e-8);
      ++checked;
    }
  }
  CHECK(checked >= 100);
}

TEST_CASE("evaluators respect direct sums and scalar similarities") {
  Rng rng(56);
  auto eta_coeff = testsupport::random_hermitian(rng, 2);
  std::vector<EvaluatorPtr> evals{
      make_constant_evaluator(testsupport::random_hermitian(rng, 2)),
      make_atomic_evaluator(testsupport::random_hermitian(rng, 2),
                            FreeVariableSpec::atomic({{0.5, -1.0}, {0.5, 2.0}})),
      make_semicircular_evaluator(CovarianceMap::explicit_list({eta_coeff})),
  };
  for (const auto& ev : evals) {
    const std::size_t n = ev->base_dim();
    for (int rep = 0; rep < 8; ++rep) {
      ComplexMatrix z1 = testsupport::random_upper_half_plane(rng, n, 0.3);
      ComplexMatrix z2 = testsupport::random_upper_half_plane(rng, 2 * n, 0.3);
      ComplexMatrix zsum(3 * n, 3 * n);
      zsum.set_block(0, 0, z1);
      zsum.set_block(n, n, z2);
      ComplexMatrix g = ev->evaluate(zsum);
      CHECK(testsupport::max_abs_diff(g.block(0, 0, n, n), ev->evaluate(z1)) < 1e-9);
      CHECK(testsupport::max_abs_diff(g.block(n, n, 2 * n, 2 * n), ev->evaluate(z2)) < 1e-9);
      CHECK(g.block(0, n, n, 2 * n).max_abs() < 1e-9);

      // similarity by an invertible scalar S (x) 1
      ComplexMatrix s(2, 2, {Complex(1.0), Complex(0.4, 0.1), Complex(0.0), Complex(1.3)});
      ComplexMatrix S = ComplexMatrix::kron(s, ComplexMatrix::identity(n));
      ComplexMatrix zb = testsupport::random_upper_half_plane(rng, 2 * n, 0.0);
      // lift far enough that S zb S^{-1} stays in the upper half-plane
      zb += ComplexMatrix::scalar(2 * n, 4.0 * I);
      ComplexMatrix conj_arg = S * zb * solve_inverse(S);
      REQUIRE(half_plane_membership(conj_arg, HalfPlane::upper).member());
      ComplexMatrix lhs = ev->evaluate(conj_arg);
      ComplexMatrix rhs = S * ev->evaluate(zb) * solve_inverse(S);
      CHECK(testsupport::max_abs_diff(lhs, rhs) < 1e-9);
    }
  }
}

TEST_CASE("series consistency: moments extracted at z = iy match the oracle") {
  // semicircular evaluator with a 2x2 covariance; oracle moments from the
  // pairing formula, solver moments by peeling the 1/z expansion at the
  // ladder y in {8, 16, 32, 64}
  Rng rng(57);
  ComplexMatrix c = testsupport::random_hermitian(rng, 2);
  c *= Complex(0.5);
  auto eta = CovarianceMap::explicit_list({c});
  auto ev = make_semicircular_evaluator(eta);

  std::vector<ComplexMatrix> oracle;  // M_0..M_10
  oracle.push_back(ComplexMatrix::identity(2));
  for (int k = 1; k <= 10; ++k) {
    std::vector<ComplexMatrix> b(static_cast<std::size_t>(k - 1), ComplexMatrix::identity(2));
    oracle.push_back(semicircular_moment(eta, b));
  }

  const double ys[] = {8.0, 16.0, 32.0, 64.0};
  for (int k = 0; k <= 6; ++k) {
    // peel all other oracle orders <= 10 off G(iy); the estimate from each
    // ladder point carries solver noise amplified by y^{k+1}, so the two
    // small-y points decide and the large-y points only corroborate
    ComplexMatrix est(2, 2);
    int used = 0;
    for (double y : ys) {
      const Complex z = I * y;
      ComplexMatrix g = ev->evaluate(ComplexMatrix::scalar(2, z));
      for (int j = 0; j <= 10; ++j) {
        if (j == k) continue;
        g -= oracle[static_cast<std::size_t>(j)] * std::pow(z, -(j + 1));
      }
      ComplexMatrix single = g * std::pow(z, k + 1);
      const double scale = std::max(1.0, oracle[static_cast<std::size_t>(k)].max_abs());
      const double single_err =
          testsupport::max_abs_diff(single, oracle[static_cast<std::size_t>(k)]) / scale;
      CHECK(single_err < (y <= 16.0 ? 2e-3 : 5e-2));
      if (y <= 16.0) {
        est += single;
        ++used;
      }
    }
    est *= Complex(1.0 / used);
    const double scale = std::max(1.0, oracle[static_cast<std::size_t>(k)].max_abs());
    CHECK(testsupport::max_abs_diff(est, oracle[static_cast<std::size_t>(k)]) / scale < 1e-3);
  }
}

TEST_CASE("contour moment extraction is solver-accurate") {
  auto eta = CovarianceMap::scalar(1.0);
  auto ev = make_semicircular_evaluator(eta);
  auto moments = extract_moments(*ev, 8, 4.0);
  const double catalan[] = {1.0, 0.0, 1.0, 0.0, 2.0, 0.0, 5.0, 0.0, 14.0};
  for (int k = 0; k <= 8; ++k)
    CHECK(std::abs(moments[static_cast<std::size_t>(k)](0, 0) - catalan[k]) < 1e-7);
}

TEST_SUITE_END();

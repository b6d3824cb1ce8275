#include <doctest.h>

#include <cmath>

#include "ncdist/convolve.hpp"
#include "ncdist/density.hpp"
#include "ncdist/linearize.hpp"
#include "test_support.hpp"

using namespace ncdist;
using testsupport::Rng;

TEST_SUITE_BEGIN("density");

namespace {

const Complex I(0.0, 1.0);

Complex semicircle_g(Complex z) {
  const Complex root = std::sqrt(z * z - 4.0);
  Complex g = (z + root) / 2.0;
  if (g.imag() > 0.0) g = (z - root) / 2.0;
  return g;
}

// evaluator of the symmetrized linearization pencil of a polynomial in
// semicircular / atomic variables
EvaluatorPtr pencil_evaluator(const NCPolynomial& p,
                              const std::vector<FreeVariableSpec>& specs) {
  LinearPencil pencil = symmetrize(p, linearize_polynomial(p));
  std::vector<PencilSummand> summands;
  for (int k = 1; k <= pencil.num_vars(); ++k)
    summands.push_back({pencil.coefficient(k), specs[static_cast<std::size_t>(k - 1)]});
  return convolve_pencil(pencil.coefficient(0), std::move(summands));
}

}  // namespace

TEST_CASE("scalar_cauchy of a constant's pencil is 1/(z - c)") {
  NCPolynomial c(1, {{Complex(2.0), {}}});
  LinearPencil pencil = symmetrize(c, linearize_polynomial(c));
  std::vector<PencilSummand> none{{pencil.coefficient(1), FreeVariableSpec::semicircular(1.0)}};
  auto ev = convolve_pencil(pencil.coefficient(0), none);
  Rng rng(71);
  for (int rep = 0; rep < 8; ++rep) {
    const Complex z(3.0 * rng.sym(), 0.2 + rng.uniform());
    const Complex got = scalar_cauchy(*ev, z, 1e-9);
    CHECK(std::abs(got - 1.0 / (z - 2.0)) < 1e-6);
  }
}

TEST_CASE("scalar_cauchy of p = x1 recovers the semicircle transform") {
  NCPolynomial p(1, {{Complex(1.0), {1}}});
  auto ev = pencil_evaluator(p, {FreeVariableSpec::semicircular(1.0)});
  Rng rng(72);
  for (int rep = 0; rep < 10; ++rep) {
    const Complex z(2.5 * rng.sym(), 0.05 + rng.uniform());
    const Complex got = scalar_cauchy(*ev, z, 1e-7);
    CHECK(std::abs(got - semicircle_g(z)) < 1e-5);
  }
}

TEST_CASE("p = x1^2: square-law transform, density and Catalan moments") {
  NCPolynomial p(1, {{Complex(1.0), {1, 1}}});
  auto ev = pencil_evaluator(p, {FreeVariableSpec::semicircular(1.0)});

  // G_{S^2}(z) = (1 - sqrt(1 - 4/z))/2, lower-half branch; spec pins z = i
  for (const Complex z : {Complex(0.0, 1.0), Complex(0.7, 3.0), Complex(-1.2, 0.4)}) {
    Complex expect = (1.0 - std::sqrt(1.0 - 4.0 / z)) / 2.0;
    if (expect.imag() > 0.0) expect = (1.0 + std::sqrt(1.0 - 4.0 / z)) / 2.0;
    CHECK(std::abs(scalar_cauchy(*ev, z, 1e-9) - expect) < 1e-7);
  }

  // density values against sqrt(4-t)/(2 pi sqrt(t)) on (0, 4)
  for (double t : {0.05, 0.5, 1.0, 2.5, 3.9}) {
    const double rho = -scalar_cauchy(*ev, Complex(t, 1e-4), 1e-8).imag() / M_PI;
    const double exact = std::sqrt(4.0 - t) / (2.0 * M_PI * std::sqrt(t));
    CHECK(rho == doctest::Approx(exact).epsilon(5e-3));
  }

  // moments of S^2 are phi(S^{2k}) = 1, 2, 5, 14
  ScalarCauchyAdapter g(ev, 1e-9);
  auto m = extract_moments(g, 4, 9.0);
  const double catalan[] = {1.0, 1.0, 2.0, 5.0, 14.0};
  for (int k = 0; k <= 4; ++k)
    CHECK(m[static_cast<std::size_t>(k)](0, 0).real() ==
          doctest::Approx(catalan[k]).epsilon(1e-6));
}

TEST_CASE("invert_stieltjes of a point mass is the Poisson kernel") {
  // delta_0 through a constant evaluator: G(z) = 1/z
  auto ev = make_constant_evaluator(ComplexMatrix(1, 1));
  auto grid = uniform_grid(-2.0, 2.0, 401);
  const double eps = 5e-2;
  auto dens = invert_stieltjes(*ev, grid, eps, 1e-8);
  for (std::size_t k = 0; k < grid.size(); k += 37) {
    const double t = grid[k];
    const double expect = eps / (M_PI * (t * t + eps * eps));
    CHECK(dens.values[k] == doctest::Approx(expect).epsilon(1e-6));
  }
}

TEST_CASE("semicircle density: value at 0 and decay outside the support") {
  NCPolynomial p(1, {{Complex(1.0), {1}}});
  auto ev = pencil_evaluator(p, {FreeVariableSpec::semicircular(1.0)});
  auto grid = uniform_grid(-3.0, 3.0, 601);
  auto dens = invert_stieltjes(*ev, grid, 1e-4, 1e-8);
  // rho(0) -> 1/pi
  const std::size_t mid = 300;
  CHECK(grid[mid] == doctest::Approx(0.0));
  CHECK(dens.values[mid] == doctest::Approx(1.0 / M_PI).epsilon(2e-3));
  // rho(+-2.5) -> 0
  const std::size_t right = 550;  // t = 2.5
  CHECK(grid[right] == doctest::Approx(2.5));
  CHECK(dens.values[right] < 2e-3);
  CHECK(dens.min_raw_value > -1e-10);
  CHECK(dens.mass == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("density moments of the semicircle match the Catalan values") {
  NCPolynomial p(1, {{Complex(1.0), {1}}});
  auto ev = pencil_evaluator(p, {FreeVariableSpec::semicircular(1.0)});
  auto grid = uniform_grid(-4.0, 4.0, 1601);
  auto dens = invert_stieltjes(*ev, grid, 1e-3, 1e-7);
  auto m = moments_from_density(dens, 4);
  CHECK(std::abs(m[1]) < 5e-3);          // odd moments vanish
  CHECK(std::abs(m[3]) < 5e-2);
  CHECK(m[2] == doctest::Approx(1.0).epsilon(0.01));
  CHECK(m[4] == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("total mass improves monotonically along the eps ladder") {
  NCPolynomial p(1, {{Complex(1.0), {1}}});
  auto ev = pencil_evaluator(p, {FreeVariableSpec::semicircular(1.0)});
  // the grid must resolve the sharpest eps, or the trapezoid floor dominates
  auto grid = uniform_grid(-8.0, 8.0, 3201);
  double prev_gap = 1.0;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    auto dens = invert_stieltjes(*ev, grid, eps, 1e-8);
    const double gap = std::abs(dens.mass - 1.0);
    CHECK(gap < prev_gap + 1e-12);
    prev_gap = gap;
  }
  CHECK(prev_gap < 0.02);
}

TEST_CASE("symmetric problems give symmetric densities") {
  // p = x1 with a symmetric atomic law plus nothing else
  NCPolynomial p(2, {{Complex(1.0), {1, 2}}, {Complex(1.0), {2, 1}}});
  auto ev = pencil_evaluator(p, {FreeVariableSpec::atomic({{0.5, -1.0}, {0.5, 1.0}}),
                                 FreeVariableSpec::semicircular(1.0)});
  auto grid = uniform_grid(-5.0, 5.0, 501);
  auto dens = invert_stieltjes(*ev, grid, 1e-3, 1e-7);
  CHECK(dens.failed_points == 0);
  for (std::size_t k = 0; k < grid.size() / 2; k += 11) {
    const std::size_t mirror = grid.size() - 1 - k;
    CHECK(dens.values[k] == doctest::Approx(dens.values[mirror]).epsilon(0.05).scale(1.0));
  }
  // odd moments ~ 0
  auto m = moments_from_density(dens, 3);
  CHECK(std::abs(m[1]) < 5e-3);
  CHECK(std::abs(m[3]) < 5e-2);
}

TEST_CASE("grid sweeps run identically across worker counts") {
  NCPolynomial p(1, {{Complex(1.0), {1}}});
  auto ev = pencil_evaluator(p, {FreeVariableSpec::semicircular(1.0)});
  auto grid = uniform_grid(-2.5, 2.5, 101);
  auto d1 = invert_stieltjes(*ev, grid, 1e-3, 1e-7, 1);
  auto d2 = invert_stieltjes(*ev, grid, 1e-3, 1e-7, 2);
  // warm-start chains differ between 1 and 2 workers, but every point must
  // be converged to the same solver tolerance
  for (std::size_t k = 0; k < grid.size(); ++k)
    CHECK(d1.values[k] == doctest::Approx(d2.values[k]).epsilon(1e-7).scale(1.0));
}

TEST_SUITE_END();

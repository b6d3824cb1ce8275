#include <doctest.h>

#include <cmath>

#include "ncdist/linearize.hpp"
#include "test_support.hpp"

using namespace ncdist;
using testsupport::Rng;

TEST_SUITE_BEGIN("linearize");

namespace {

const Complex I(0.0, 1.0);

// the affine matrix b_0 + sum b_k x_k at a formal scalar point, for
// entry-level comparisons against expected pencils
ComplexMatrix pencil_entry_sum(const LinearPencil& p, std::span<const Complex> x) {
  ComplexMatrix acc = p.coefficient(0);
  for (int k = 1; k <= p.num_vars(); ++k)
    acc += x[static_cast<std::size_t>(k - 1)] * p.coefficient(k);
  return acc;
}

std::vector<ComplexMatrix> random_tuple(Rng& rng, int d, std::size_t n) {
  std::vector<ComplexMatrix> X;
  for (int k = 0; k < d; ++k) X.push_back(testsupport::random_hermitian(rng, n));
  return X;
}

NCPolynomial random_polynomial(Rng& rng, int d, int max_degree, int max_terms) {
  std::vector<NCMonomial> terms;
  const int nt = 1 + rng.index(max_terms);
  for (int t = 0; t < nt; ++t) {
    NCMonomial m;
    m.coefficient = Complex(rng.sym(), rng.sym());
    const int deg = rng.index(max_degree + 1);
    for (int j = 0; j < deg; ++j) m.word.push_back(1 + rng.index(d));
    terms.push_back(std::move(m));
  }
  NCPolynomial p(d, std::move(terms));
  if (p.is_zero()) return NCPolynomial(d, {{Complex(1.0), {1}}});
  return p;
}

}  // namespace

TEST_CASE("monomial pencils match the staircase forms") {
  // constant alpha -> [[0, alpha],[1, -1]]
  NCPolynomial c(1, {{Complex(3.5), {}}});
  LinearPencil pc = linearize_polynomial(c);
  REQUIRE(pc.size() == 2);
  ComplexMatrix b0 = pc.coefficient(0);
  CHECK(b0(0, 1) == Complex(3.5));
  CHECK(b0(1, 0) == Complex(1.0));
  CHECK(b0(1, 1) == Complex(-1.0));
  CHECK(pc.coefficient(1).max_abs() == 0.0);

  // alpha x1 x2 x3 -> [[0, 0, alpha x1],[0, x2, -1],[x3, -1, 0]]
  NCPolynomial m3(3, {{Complex(2.0), {1, 2, 3}}});
  LinearPencil p3 = linearize_polynomial(m3);
  REQUIRE(p3.size() == 3);
  std::vector<Complex> x{Complex(5.0), Complex(7.0), Complex(11.0)};
  ComplexMatrix got = pencil_entry_sum(p3, x);
  ComplexMatrix expect(3, 3,
                       {0.0, 0.0, 2.0 * 5.0, 0.0, 7.0, -1.0, 11.0, -1.0, 0.0});
  CHECK(testsupport::max_abs_diff(got, expect) < 1e-14);
}

TEST_CASE("degree-5 staircase with -1 off-diagonal band") {
  NCPolynomial m5(2, {{Complex(1.0), {1, 2, 1, 2, 1}}});
  LinearPencil p = linearize_polynomial(m5);
  REQUIRE(p.size() == 5);
  // band of -1 below the anti-diagonal
  const auto& b0 = p.coefficient(0);
  for (std::size_t j = 1; j < 5; ++j) CHECK(b0(j, 5 - j) == Complex(-1.0));
  // Schur identity on random Hermitian tuples
  Rng rng(41);
  for (int rep = 0; rep < 5; ++rep) {
    auto X = random_tuple(rng, 2, 3);
    CHECK(pencil_schur_residual(p, m5, X, Complex(0.3, 1.1)) < 1e-10);
  }
}

TEST_CASE("sum rule size contract") {
  // sizes: 1 + sum over monomials of (max(deg, 2) - 1)
  Rng rng(42);
  for (int rep = 0; rep < 20; ++rep) {
    NCPolynomial p = random_polynomial(rng, 2, 4, 4);
    std::size_t expect = 1;
    for (const auto& t : p.terms()) expect += std::max<std::size_t>(t.word.size(), 2) - 1;
    CHECK(linearize_polynomial(p).size() == expect);
  }
  CHECK_THROWS_AS(linearize_polynomial(NCPolynomial(1, {})), ConfigError);
}

TEST_CASE("linearization satisfies the Schur identity on random polynomials") {
  Rng rng(43);
  for (int rep = 0; rep < 30; ++rep) {
    const int d = 1 + rng.index(3);
    NCPolynomial p = random_polynomial(rng, d, 4, 3);
    LinearPencil pencil = linearize_polynomial(p);
    const std::size_t n = 1 + static_cast<std::size_t>(rng.index(4));
    auto X = random_tuple(rng, d, n);
    CHECK(pencil_schur_residual(pencil, p, X, Complex(rng.sym(), 1.0 + rng.uniform())) < 1e-9);
  }
}

TEST_CASE("symmetrize produces exactly Hermitian coefficients") {
  Rng rng(44);
  ExprPtr e = parse("x1*x2 + x2*x1 + x1^2", 2);
  NCPolynomial p = to_polynomial(e, 2);
  LinearPencil raw = linearize_polynomial(p);
  LinearPencil sym = symmetrize(p, raw);
  CHECK(sym.size() == 1 + 2 * (raw.size() - 1));
  for (int k = 0; k <= 2; ++k) {
    const auto& b = sym.coefficient(k);
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j)
        CHECK(b(i, j) == std::conj(b(j, i)));  // assembled, not numerically symmetrized
  }
  CHECK(sym.is_selfadjoint());

  // same (1,1) Schur complement as the raw pencil: both give (z - p(X))^{-1}
  for (int rep = 0; rep < 10; ++rep) {
    auto X = random_tuple(rng, 2, 1 + static_cast<std::size_t>(rng.index(3)));
    const Complex z(rng.sym(), 1.0 + rng.uniform());
    CHECK(pencil_schur_residual(sym, p, X, z) < 1e-9);
    CHECK(pencil_schur_residual(raw, p, X, z) < 1e-9);
  }

  CHECK_THROWS_AS(symmetrize(to_polynomial(parse("x1*x2", 2), 2),
                             linearize_polynomial(to_polynomial(parse("x1*x2", 2), 2))),
                  ConfigError);
}

TEST_CASE("symmetrize on the trivial cases") {
  NCPolynomial lin(1, {{Complex(1.0), {1}}});
  LinearPencil sym = symmetrize(lin, linearize_polynomial(lin));
  CHECK(sym.is_selfadjoint());
  Rng rng(45);
  auto X = random_tuple(rng, 1, 2);
  CHECK(pencil_schur_residual(sym, lin, X, Complex(0.2, 0.9)) < 1e-10);

  NCPolynomial one(1, {{Complex(1.0), {}}});
  LinearPencil sym1 = symmetrize(one, linearize_polynomial(one));
  auto X1 = random_tuple(rng, 1, 2);
  CHECK(pencil_schur_residual(sym1, one, X1, Complex(0.4, 1.3)) < 1e-10);
}

TEST_CASE("linear representation of a single variable") {
  LinearRepresentation rep = represent_rational(parse("x1", 1));
  REQUIRE(rep.q_pencil.size() == 2);
  CHECK(rep.u(0, 0) == Complex(0.0));
  CHECK(rep.u(0, 1) == Complex(1.0));
  CHECK(rep.v(0, 0) == Complex(0.0));
  CHECK(rep.v(1, 0) == Complex(1.0));
  std::vector<Complex> x{Complex(3.0)};
  ComplexMatrix q = pencil_entry_sum(rep.q_pencil, x);
  ComplexMatrix expect(2, 2, {3.0, -1.0, -1.0, 0.0});
  CHECK(testsupport::max_abs_diff(q, expect) < 1e-14);
}

TEST_CASE("the nested-inverse representation chain of [x^-1 + y^-1]^-1") {
  // x^{-1}: u = (1,0,0), q = [[0,0,1],[0,-x,1],[1,1,0]], v = (1,0,0)^T
  LinearRepresentation rx = represent_rational(parse("inv(x1)", 2));
  REQUIRE(rx.q_pencil.size() == 3);
  {
    std::vector<Complex> x{Complex(4.0), Complex(0.0)};
    ComplexMatrix q = pencil_entry_sum(rx.q_pencil, x);
    ComplexMatrix expect(3, 3, {0.0, 0.0, 1.0, 0.0, -4.0, 1.0, 1.0, 1.0, 0.0});
    CHECK(testsupport::max_abs_diff(q, expect) == 0.0);
    CHECK(rx.u(0, 0) == Complex(1.0));
    CHECK(rx.u(0, 1) == Complex(0.0));
    CHECK(rx.u(0, 2) == Complex(0.0));
    CHECK(rx.v(0, 0) == Complex(1.0));
    CHECK(rx.v(1, 0) == Complex(0.0));
    CHECK(rx.v(2, 0) == Complex(0.0));
  }

  // x^{-1} + y^{-1}: block diagonal 6x6 with u = (1,0,0,1,0,0)
  LinearRepresentation rsum = represent_rational(parse("inv(x1)+inv(x2)", 2));
  REQUIRE(rsum.q_pencil.size() == 6);
  {
    std::vector<Complex> x{Complex(4.0), Complex(9.0)};
    ComplexMatrix q = pencil_entry_sum(rsum.q_pencil, x);
    ComplexMatrix expect(6, 6, {0.0, 0.0, 1.0, 0.0, 0.0, 0.0,  //
                                0.0, -4.0, 1.0, 0.0, 0.0, 0.0,  //
                                1.0, 1.0, 0.0, 0.0, 0.0, 0.0,  //
                                0.0, 0.0, 0.0, 0.0, 0.0, 1.0,  //
                                0.0, 0.0, 0.0, 0.0, -9.0, 1.0,  //
                                0.0, 0.0, 0.0, 1.0, 1.0, 0.0});
    CHECK(testsupport::max_abs_diff(q, expect) == 0.0);
    for (std::size_t j = 0; j < 6; ++j) {
      CHECK(rsum.u(0, j) == Complex(j == 0 || j == 3 ? 1.0 : 0.0));
      CHECK(rsum.v(j, 0) == Complex(j == 0 || j == 3 ? 1.0 : 0.0));
    }
  }

  // [x^{-1}+y^{-1}]^{-1}: the full 7x7, entry for entry
  LinearRepresentation rr = represent_rational(parse("inv(inv(x1)+inv(x2))", 2));
  REQUIRE(rr.q_pencil.size() == 7);
  {
    std::vector<Complex> x{Complex(4.0), Complex(9.0)};
    ComplexMatrix q = pencil_entry_sum(rr.q_pencil, x);
    ComplexMatrix expect(7, 7, {0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0,  //
                                1.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0,  //
                                0.0, 0.0, 4.0, -1.0, 0.0, 0.0, 0.0,  //
                                0.0, -1.0, -1.0, 0.0, 0.0, 0.0, 0.0,  //
                                1.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0,  //
                                0.0, 0.0, 0.0, 0.0, 0.0, 9.0, -1.0,  //
                                0.0, 0.0, 0.0, 0.0, -1.0, -1.0, 0.0});
    CHECK(testsupport::max_abs_diff(q, expect) == 0.0);
    for (std::size_t j = 0; j < 7; ++j) {
      CHECK(rr.u(0, j) == Complex(j == 0 ? 1.0 : 0.0));
      CHECK(rr.v(j, 0) == Complex(j == 0 ? 1.0 : 0.0));
    }
    // this representation is already selfadjoint, so no doubling happens
    LinearRepresentation sa = selfadjoint_representation(parse("inv(inv(x1)+inv(x2))", 2));
    CHECK(sa.q_pencil.size() == 7);
  }
}

TEST_CASE("schur_check on pinned cases") {
  Rng rng(46);

  // constant 5
  LinearRepresentation c5 = represent_rational(parse("5", 1), 1);
  auto X0 = random_tuple(rng, 1, 3);
  CHECK(schur_check(c5, parse("5", 1), X0) < 1e-12);

  // monomial x1 x2 x3 on random Hermitian 4x4 triples
  ExprPtr mono = parse("x1*x2*x3", 3);
  LinearRepresentation rm = represent_rational(mono);
  for (int rep = 0; rep < 5; ++rep) {
    auto X = random_tuple(rng, 3, 4);
    CHECK(schur_check(rm, mono, X) < 1e-10);
  }

  // [x^{-1}+y^{-1}]^{-1} at X = 2, Y = 3 gives 6/5
  ExprPtr r = parse("inv(inv(x1)+inv(x2))", 2);
  LinearRepresentation rr = represent_rational(r);
  std::vector<ComplexMatrix> scalars{ComplexMatrix(1, 1, {Complex(2.0)}),
                                     ComplexMatrix(1, 1, {Complex(3.0)})};
  CHECK(evaluate(r, scalars)(0, 0).real() == doctest::Approx(1.2).epsilon(1e-12));
  CHECK(schur_check(rr, r, scalars) < 1e-12);
}

TEST_CASE("schur_check fuzz over random expressions") {
  Rng rng(47);
  const char* shapes[] = {"x1*x2 - x2*x1", "inv(x1+4)*x2", "x1^2*x2 + 3",
                          "inv(x1+4) + inv(x2+4)", "x2*inv(x1*x1+3)*x2"};
  for (const char* s : shapes) {
    ExprPtr e = parse(s, 2);
    LinearRepresentation rep = represent_rational(e);
    for (int t = 0; t < 10; ++t) {
      const std::size_t n = 1 + static_cast<std::size_t>(rng.index(5));
      auto X = random_tuple(rng, 2, n);
      CHECK(schur_check(rep, e, X) < 1e-10);
    }
  }
}

TEST_CASE("selfadjoint doubling for expressions whose raw representation is not") {
  ExprPtr e = parse("x1*x2 + x2*x1", 2);
  LinearRepresentation sa = selfadjoint_representation(e);
  CHECK(sa.q_pencil.is_selfadjoint(1e-14));
  for (std::size_t j = 0; j < sa.u.cols(); ++j)
    CHECK(sa.u(0, j) == std::conj(sa.v(j, 0)));
  Rng rng(48);
  for (int t = 0; t < 10; ++t) {
    auto X = random_tuple(rng, 2, 3);
    CHECK(schur_check(sa, e, X) < 1e-10);
  }
}

TEST_SUITE_END();

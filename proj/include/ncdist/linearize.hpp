#ifndef NCDIST_LINEARIZE_HPP
#define NCDIST_LINEARIZE_HPP

// Selfadjoint linearizations of polynomials and linear representations of
// rational expressions.  A pencil stores the coefficients (b_0, b_1, .., b_d)
// of b_0 (x) 1 + sum_k b_k (x) x_k; polynomial linearizations embed the
// bordering row/column as the first row and column of the pencil.

#include <span>
#include <vector>

#include "ncdist/matalg.hpp"
#include "ncdist/ncexpr.hpp"

namespace ncdist {

class LinearPencil {
 public:
  LinearPencil() = default;
  LinearPencil(int num_vars, std::vector<ComplexMatrix> coefficients);

  int num_vars() const { return num_vars_; }
  std::size_t size() const { return coeff_.empty() ? 0 : coeff_[0].rows(); }
  const ComplexMatrix& coefficient(int k) const;  // k = 0..num_vars
  const std::vector<ComplexMatrix>& coefficients() const { return coeff_; }

  bool is_selfadjoint(double tol = 0.0) const;

  // b_0 (x) 1 + sum b_k (x) X_k on an N x N tuple, an (size*N) x (size*N) block matrix.
  ComplexMatrix evaluate(std::span<const ComplexMatrix> X) const;

 private:
  int num_vars_ = 0;
  std::vector<ComplexMatrix> coeff_;
};

// (u, q, v) with r = -u q^{-1} v; u is 1 x n and v is n x 1 over C.
struct LinearRepresentation {
  ComplexMatrix u;
  LinearPencil q_pencil;
  ComplexMatrix v;
};

// Monomial staircase plus the sum rule; the result is the full bordered
// pencil [[0, u],[v, q]] of size 1 + sum(max(deg_i, 2) - 1).  Throws on the
// zero polynomial, whose distribution is a point mass handled upstream.
LinearPencil linearize_polynomial(const NCPolynomial& p);

// Selfadjoint doubling (1/2)[[0, u, v*],[u*, 0, q*],[v, q, 0]] of a bordered
// pencil; requires p selfadjoint.
LinearPencil symmetrize(const NCPolynomial& p, const LinearPencil& raw);

// Recursive assembly by the scalar/variable, sum/product and inverse rules.
// num_vars < 0 means "as many as the expression mentions".
LinearRepresentation represent_rational(const ExprPtr& r, int num_vars = -1);

// Selfadjoint representation: the assembled one if it already satisfies
// u = v*, q = q*, otherwise the doubling applied at the root.
LinearRepresentation selfadjoint_representation(const ExprPtr& r, int num_vars = -1);

// Full bordered pencil [[0, u],[v, q]] of a representation.
LinearPencil bordered_pencil(const LinearRepresentation& rep);

// || r(X) + u q(X)^{-1} v || with u, v amplified over the size of the X_k.
double schur_check(const LinearRepresentation& rep, const ExprPtr& r,
                   std::span<const ComplexMatrix> X);

// Same identity for a bordered polynomial pencil: the (1,1) block of
// (Lambda(z) - pencil(X))^{-1} must equal (z - p(X))^{-1}.
double pencil_schur_residual(const LinearPencil& pencil, const NCPolynomial& p,
                             std::span<const ComplexMatrix> X, Complex z);

}  // namespace ncdist

#endif

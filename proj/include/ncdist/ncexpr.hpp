#ifndef NCDIST_NCEXPR_HPP
#define NCDIST_NCEXPR_HPP

// Non-commutative polynomials and rational expressions in x1..xd with the
// adjoint involution x_i* = x_i.  Expressions are immutable ASTs; polynomials
// keep a canonical graded-lexicographic term list so that selfadjointness is
// a syntactic check.

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ncdist/matalg.hpp"

namespace ncdist {

struct NCMonomial {
  Complex coefficient;
  std::vector<int> word;  // variable indices in 1..d; empty = constant term
};

class NCPolynomial {
 public:
  NCPolynomial() = default;
  // Canonicalizes: graded lex order on words, duplicates merged, zeros dropped.
  NCPolynomial(int num_vars, std::vector<NCMonomial> terms);

  int num_vars() const { return num_vars_; }
  const std::vector<NCMonomial>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;

  NCPolynomial adjoint() const;
  bool is_selfadjoint(double tol = 0.0) const;
  ComplexMatrix evaluate(std::span<const ComplexMatrix> X) const;
  std::string str() const;

 private:
  int num_vars_ = 0;
  std::vector<NCMonomial> terms_;
};

struct RationalExpr;
using ExprPtr = std::shared_ptr<const RationalExpr>;

struct RationalExpr {
  enum class Kind { constant, variable, sum, product, inverse };
  Kind kind;
  Complex value;       // constant
  int var_index = 0;   // variable, 1-based
  ExprPtr left, right; // sum / product
  ExprPtr child;       // inverse
};

ExprPtr make_constant(Complex c);
ExprPtr make_variable(int index);
ExprPtr make_sum(ExprPtr a, ExprPtr b);
ExprPtr make_product(ExprPtr a, ExprPtr b);
ExprPtr make_inverse(ExprPtr a);  // rejects the literal zero constant

// Grammar: variables x1..xd, decimal literals, the imaginary unit `i`,
// operators + - * ^k inv( ), parentheses.  ^k expands to a repeated product
// and ^0 is the constant 1.  Precedence: inv > ^ > * > +/-.
ExprPtr parse(std::string_view text, int num_vars);

ExprPtr adjoint(const ExprPtr& e);
bool is_selfadjoint(const ExprPtr& e);
bool is_polynomial(const ExprPtr& e);  // no inverse nodes
bool is_constant(const ExprPtr& e, Complex* value = nullptr);
int max_variable(const ExprPtr& e);

// Conversion for inverse-free expressions; throws ConfigError otherwise.
NCPolynomial to_polynomial(const ExprPtr& e, int num_vars);

// Recursive evaluation on a matrix tuple; inverse nodes use solve_inverse and
// report non-existing inverses as EvaluationError.
ComplexMatrix evaluate(const ExprPtr& e, std::span<const ComplexMatrix> X);

std::string print_expr(const ExprPtr& e);

// Structural equality after canonical normalization (sums sorted, constants
// folded).  Used by is_selfadjoint.
bool structurally_equal(const ExprPtr& a, const ExprPtr& b);

}  // namespace ncdist

#endif

#ifndef NCDIST_CONVOLVE_HPP
#define NCDIST_CONVOLVE_HPP

// Operator-valued additive free convolution: the two-summand subordination
// fixed point omega_1 = f_z(omega_1), f_z(w) = h_2(h_1(w) + z) + z, folded
// pairwise over the pencil summands.  Semicircular summands are merged into
// one covariance up front (their pencil sum is itself a matrix-valued
// semicircular), which both matches the block covariance formulas and keeps
// the fold shallow; the pure pairwise path stays available for testing.

#include <memory>
#include <vector>

#include "ncdist/cauchy.hpp"

namespace ncdist {

// G(z)^{-1} - z
ComplexMatrix h_transform(const CauchyEvaluator& g, const ComplexMatrix& z,
                          EvalContext* ctx = nullptr);

struct SubordinationState {
  ComplexMatrix omega1, omega2;
  double residual = 0.0;     // ||f_z(omega1) - omega1||
  double consistency = 0.0;  // ||F_2(omega2) + z - omega1 - omega2||
  long iterations = 0;
};

SubordinationState subordinate(const CauchyEvaluator& left, const CauchyEvaluator& right,
                               const ComplexMatrix& z, EvalContext* ctx = nullptr,
                               const ComplexMatrix* warm_start = nullptr);

class ConvolvedEvaluator final : public CauchyEvaluator {
 public:
  ConvolvedEvaluator(EvaluatorPtr left, EvaluatorPtr right);
  std::size_t base_dim() const override { return left_->base_dim(); }
  ComplexMatrix evaluate(const ComplexMatrix& z, EvalContext* ctx = nullptr) const override;

  const CauchyEvaluator& left() const { return *left_; }
  const CauchyEvaluator& right() const { return *right_; }

 private:
  EvaluatorPtr left_, right_;
};

struct PencilSummand {
  ComplexMatrix coeff;  // Hermitian
  FreeVariableSpec spec;
};

enum class FoldPolicy {
  merge_semicircular,  // combine all semicircular summands into one HRS solve
  pairwise_only,       // fold every summand through subordination
};

// Evaluator of b0 (x) 1 + sum_k coeff_k (x) X_k: left-fold of subordinate over
// the summands, with the b0 shift applied at the outermost layer.
EvaluatorPtr convolve_pencil(const ComplexMatrix& b0, std::vector<PencilSummand> summands,
                             FoldPolicy policy = FoldPolicy::merge_semicircular);

}  // namespace ncdist

#endif

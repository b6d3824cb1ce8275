#include "ncdist/convolve.hpp"

#include <algorithm>
#include <cmath>

namespace ncdist {

namespace {
const Complex kI(0.0, 1.0);
}

ComplexMatrix h_transform(const CauchyEvaluator& g, const ComplexMatrix& z, EvalContext* ctx) {
  ComplexMatrix gz = g.evaluate(z, ctx);
  return solve_inverse(gz) - z;
}

SubordinationState subordinate(const CauchyEvaluator& left, const CauchyEvaluator& right,
                               const ComplexMatrix& z, EvalContext* ctx,
                               const ComplexMatrix* warm_start) {
  if (!half_plane_membership(z, HalfPlane::upper).member())
    throw ConfigError("subordinate: z is not strictly in the upper half-plane");
  if (left.base_dim() != right.base_dim())
    throw DimensionError("subordinate: summand dimensions differ");

  auto f_z = [&](const ComplexMatrix& w) {
    return h_transform(right, h_transform(left, w, ctx) + z, ctx) + z;
  };

  ComplexMatrix w = warm_start ? *warm_start : z;
  if (warm_start && !half_plane_membership(w, HalfPlane::upper).member()) w = z;

  double alpha = 1.0;
  double residual = 0.0;
  double stall_reference = -1.0;
  long iter = 0;
  for (; iter < kFixedPointCap; ++iter) {
    ComplexMatrix fw = f_z(w);
    residual = (fw - w).frobenius_norm();
    w = (alpha == 1.0) ? std::move(fw) : (Complex(1.0 - alpha) * w + Complex(alpha) * fw);
    if (residual < kFixedPointTol) break;
    if (alpha == 1.0 && iter > 0 && iter % 50 == 0) {
      if (stall_reference >= 0.0 && residual > 0.99 * stall_reference) alpha = 0.5;
      stall_reference = residual;
    }
  }
  if (ctx) {
    ++ctx->stats.solves;
    ctx->stats.iterations += iter;
    ctx->stats.max_residual = std::max(ctx->stats.max_residual, residual);
  }
  if (residual >= kFixedPointTol)
    throw ConvergenceError("subordinate: iteration cap exceeded", residual, iter);

  SubordinationState st;
  st.omega1 = w;
  st.omega2 = z + h_transform(left, w, ctx);
  st.residual = residual;
  // F_2(omega2) + z = omega1 + omega2 is the half of the subordination
  // consistency pair that is not true by construction
  ComplexMatrix f2 = solve_inverse(right.evaluate(st.omega2, ctx));
  st.consistency = (f2 + z - st.omega1 - st.omega2).frobenius_norm();
  st.iterations = iter;
  if (st.consistency > 1e-9)
    throw ConvergenceError("subordinate: consistency identity violated", st.consistency, iter);
  return st;
}

ConvolvedEvaluator::ConvolvedEvaluator(EvaluatorPtr left, EvaluatorPtr right)
    : left_(std::move(left)), right_(std::move(right)) {
  if (!left_ || !right_) throw ConfigError("ConvolvedEvaluator: null summand");
  if (left_->base_dim() != right_->base_dim())
    throw DimensionError("ConvolvedEvaluator: summand dimensions differ");
}

ComplexMatrix ConvolvedEvaluator::evaluate(const ComplexMatrix& z, EvalContext* ctx) const {
  const ComplexMatrix* warm = ctx ? ctx->find(this, z.rows()) : nullptr;
  if (warm && ctx) ++ctx->stats.warm_hits;
  SubordinationState st = subordinate(*left_, *right_, z, ctx, warm);
  if (ctx) ctx->store(this, st.omega1);
  return left_->evaluate(st.omega1, ctx);
}

namespace {

class ShiftedEvaluator final : public CauchyEvaluator {
 public:
  ShiftedEvaluator(ComplexMatrix b0, EvaluatorPtr inner)
      : b0_(std::move(b0)), inner_(std::move(inner)) {
    if (!b0_.is_hermitian(1e-10)) throw ConfigError("ShiftedEvaluator: b0 must be Hermitian");
  }
  std::size_t base_dim() const override { return inner_->base_dim(); }
  ComplexMatrix evaluate(const ComplexMatrix& z, EvalContext* ctx) const override {
    const std::size_t m = z.rows() / b0_.rows();
    return inner_->evaluate(z - ComplexMatrix::kron(ComplexMatrix::identity(m), b0_), ctx);
  }

 private:
  ComplexMatrix b0_;
  EvaluatorPtr inner_;
};

}  // namespace

EvaluatorPtr convolve_pencil(const ComplexMatrix& b0, std::vector<PencilSummand> summands,
                             FoldPolicy policy) {
  if (!b0.is_square()) throw DimensionError("convolve_pencil: b0 must be square");
  const std::size_t n = b0.rows();
  std::erase_if(summands, [](const PencilSummand& s) { return s.coeff.max_abs() == 0.0; });
  for (const auto& s : summands)
    if (!s.coeff.is_square() || s.coeff.rows() != n)
      throw DimensionError("convolve_pencil: summand size mismatch");

  std::vector<EvaluatorPtr> evals;
  if (policy == FoldPolicy::merge_semicircular) {
    std::vector<ComplexMatrix> semi_coeffs;
    bool semi_placed = false;
    std::size_t semi_slot = 0;
    for (const auto& s : summands) {
      if (s.spec.kind == FreeVariableSpec::Kind::semicircular) {
        semi_coeffs.push_back(Complex(std::sqrt(s.spec.variance)) * s.coeff);
        if (!semi_placed) {
          semi_slot = evals.size();
          evals.push_back(nullptr);  // placeholder at the first semicircular position
          semi_placed = true;
        }
      } else {
        evals.push_back(make_atomic_evaluator(s.coeff, s.spec));
      }
    }
    if (semi_placed)
      evals[semi_slot] =
          make_semicircular_evaluator(CovarianceMap::explicit_list(std::move(semi_coeffs)));
  } else {
    for (const auto& s : summands) evals.push_back(make_summand_evaluator(s.coeff, s.spec));
  }

  EvaluatorPtr acc;
  if (evals.empty()) {
    acc = make_constant_evaluator(ComplexMatrix(n, n));
  } else {
    acc = evals[0];
    for (std::size_t k = 1; k < evals.size(); ++k)
      acc = std::make_shared<ConvolvedEvaluator>(acc, evals[k]);
  }
  if (b0.max_abs() == 0.0) return acc;
  return std::make_shared<ShiftedEvaluator>(b0, std::move(acc));
}

}  // namespace ncdist

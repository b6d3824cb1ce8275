#include "ncdist/cauchy.hpp"

#include <algorithm>
#include <cmath>

namespace ncdist {

namespace {

const Complex kI(0.0, 1.0);

void require_upper(const ComplexMatrix& z, const char* who) {
  if (!z.is_square()) throw DimensionError(std::string(who) + ": z must be square");
  if (!half_plane_membership(z, HalfPlane::upper).member())
    throw ConfigError(std::string(who) + ": z is not strictly in the upper half-plane");
}

double min_im_eigenvalue(const ComplexMatrix& z) {
  return min_eigenvalue(imaginary_part(z));
}

}  // namespace

FreeVariableSpec FreeVariableSpec::atomic(std::vector<Atom> atoms) {
  if (atoms.empty()) throw ConfigError("FreeVariableSpec: no atoms");
  double total = 0.0;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    if (atoms[k].weight <= 0.0) throw ConfigError("FreeVariableSpec: weights must be positive");
    if (k > 0 && atoms[k].position <= atoms[k - 1].position)
      throw ConfigError("FreeVariableSpec: atoms must be strictly increasing");
    total += atoms[k].weight;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw ConfigError("FreeVariableSpec: atomic weights must sum to 1");
  FreeVariableSpec s;
  s.kind = Kind::atomic;
  s.atoms = std::move(atoms);
  return s;
}

FreeVariableSpec FreeVariableSpec::semicircular(double variance) {
  if (variance <= 0.0) throw ConfigError("FreeVariableSpec: variance must be positive");
  FreeVariableSpec s;
  s.kind = Kind::semicircular;
  s.variance = variance;
  return s;
}

double FreeVariableSpec::support_radius() const {
  if (kind == Kind::semicircular) return 2.0 * std::sqrt(variance);
  double r = 0.0;
  for (const auto& a : atoms) r = std::max(r, std::abs(a.position));
  return r;
}

std::vector<double> FreeVariableSpec::moments(int max_order) const {
  if (kind == Kind::semicircular) return semicircular_scalar_moments(variance, max_order);
  std::vector<std::pair<double, double>> wt;
  for (const auto& a : atoms) wt.emplace_back(a.weight, a.position);
  return atomic_scalar_moments(wt, max_order);
}

std::vector<double> FreeVariableSpec::cumulants(int max_order) const {
  if (kind == Kind::semicircular) {
    std::vector<double> k(static_cast<std::size_t>(max_order), 0.0);
    if (max_order >= 2) k[1] = variance;
    return k;
  }
  return scalar_cumulants_from_moments(moments(max_order));
}

void SolveStats::merge(const SolveStats& o) {
  solves += o.solves;
  iterations += o.iterations;
  warm_hits += o.warm_hits;
  max_residual = std::max(max_residual, o.max_residual);
}

const ComplexMatrix* EvalContext::find(const void* key, std::size_t dim) const {
  auto it = slots_.find(key);
  if (it == slots_.end() || it->second.rows() != dim) return nullptr;
  return &it->second;
}

void EvalContext::store(const void* key, ComplexMatrix value) {
  slots_[key] = std::move(value);
}

ComplexMatrix cauchy_constant(const ComplexMatrix& b0, const ComplexMatrix& z) {
  require_upper(z, "cauchy_constant");
  if (!b0.is_hermitian(1e-10)) throw ConfigError("cauchy_constant: b0 must be Hermitian");
  if (z.rows() % b0.rows() != 0)
    throw DimensionError("cauchy_constant: z size must be a multiple of the base size");
  const std::size_t m = z.rows() / b0.rows();
  ComplexMatrix shifted = z - ComplexMatrix::kron(ComplexMatrix::identity(m), b0);
  return solve_inverse(shifted);
}

ComplexMatrix cauchy_atomic(const ComplexMatrix& coeff, const FreeVariableSpec& mu,
                            const ComplexMatrix& z) {
  require_upper(z, "cauchy_atomic");
  if (mu.kind != FreeVariableSpec::Kind::atomic)
    throw ConfigError("cauchy_atomic: spec is not atomic");
  if (z.rows() % coeff.rows() != 0)
    throw DimensionError("cauchy_atomic: z size must be a multiple of the base size");
  const std::size_t m = z.rows() / coeff.rows();
  ComplexMatrix lifted = ComplexMatrix::kron(ComplexMatrix::identity(m), coeff);
  ComplexMatrix acc(z.rows(), z.cols());
  for (const auto& a : mu.atoms)
    acc += Complex(a.weight) * solve_inverse(z - Complex(a.position) * lifted);
  return acc;
}

ComplexMatrix hrs_fixed_point(const CovarianceMap& eta, const ComplexMatrix& z,
                              const ComplexMatrix* w0, SolveStats* stats) {
  require_upper(z, "hrs_fixed_point");
  const std::size_t n = z.rows();
  if (n % eta.dim() != 0)
    throw DimensionError("hrs_fixed_point: z size must be a multiple of the covariance size");

  const double im_floor = min_im_eigenvalue(z);
  const double inv_im_norm = 1.0 / im_floor;

  // default start -i min(1, ||(Im z)^{-1}||/2): inside the invariant ball, but
  // capped so that z - eta(w0) never starts out numerically degenerate when
  // Im z has the tiny Lambda_eps filler on part of its diagonal
  const Complex start = -kI * std::min(1.0, 0.5 * inv_im_norm);
  ComplexMatrix w = w0 ? *w0 : ComplexMatrix::scalar(n, start);
  // a warm start from elsewhere might sit in the wrong half-plane; reset it
  if (w0 && min_eigenvalue(imaginary_part(w)) >= 0.0) w = ComplexMatrix::scalar(n, start);

  double alpha = 1.0;
  double residual = 0.0;
  double stall_reference = -1.0;
  long iter = 0;
  for (; iter < kFixedPointCap; ++iter) {
    ComplexMatrix fw = solve_inverse(z - eta.apply(w));
    ComplexMatrix next = (alpha == 1.0) ? fw : (Complex(1.0 - alpha) * w + Complex(alpha) * fw);
    residual = (z * next - ComplexMatrix::identity(n) - eta.apply(next) * next).frobenius_norm();
    w = std::move(next);
    if (residual < kFixedPointTol) break;
    if (alpha == 1.0 && iter > 0 && iter % 50 == 0) {
      if (stall_reference >= 0.0 && residual > 0.99 * stall_reference) alpha = 0.5;
      stall_reference = residual;
    }
  }
  if (stats) {
    ++stats->solves;
    stats->iterations += iter;
    stats->max_residual = std::max(stats->max_residual, residual);
  }
  if (residual >= kFixedPointTol)
    throw ConvergenceError("hrs_fixed_point: iteration cap exceeded", residual, iter);
  return w;
}

ComplexMatrix damped_iterate(const SelfMap& F, ComplexMatrix w0, double alpha, long cap,
                             SolveStats* stats) {
  if (alpha <= 0.0 || alpha > 1.0) throw ConfigError("damped_iterate: alpha must be in (0, 1]");
  ComplexMatrix w = std::move(w0);
  double delta = 0.0;
  long iter = 0;
  for (; iter < cap; ++iter) {
    ComplexMatrix fw = F(w);
    ComplexMatrix next = (alpha == 1.0) ? fw : (Complex(1.0 - alpha) * w + Complex(alpha) * fw);
    delta = (next - w).frobenius_norm();
    w = std::move(next);
    if (delta < 1e-12 * std::max(1.0, w.frobenius_norm())) break;
  }
  if (stats) {
    ++stats->solves;
    stats->iterations += iter;
  }
  if (iter >= cap)
    throw ConvergenceError("damped_iterate: iteration cap exceeded", delta, iter);
  return w;
}

namespace {

class ConstantEvaluator final : public CauchyEvaluator {
 public:
  explicit ConstantEvaluator(ComplexMatrix b0) : b0_(std::move(b0)) {
    if (!b0_.is_hermitian(1e-10)) throw ConfigError("ConstantEvaluator: b0 must be Hermitian");
  }
  std::size_t base_dim() const override { return b0_.rows(); }
  ComplexMatrix evaluate(const ComplexMatrix& z, EvalContext*) const override {
    return cauchy_constant(b0_, z);
  }

 private:
  ComplexMatrix b0_;
};

class AtomicEvaluator final : public CauchyEvaluator {
 public:
  AtomicEvaluator(ComplexMatrix coeff, FreeVariableSpec spec)
      : coeff_(std::move(coeff)), spec_(std::move(spec)) {
    if (!coeff_.is_hermitian(1e-10)) throw ConfigError("AtomicEvaluator: coefficient not Hermitian");
    if (spec_.kind != FreeVariableSpec::Kind::atomic)
      throw ConfigError("AtomicEvaluator: spec is not atomic");
  }
  std::size_t base_dim() const override { return coeff_.rows(); }
  ComplexMatrix evaluate(const ComplexMatrix& z, EvalContext*) const override {
    return cauchy_atomic(coeff_, spec_, z);
  }

 private:
  ComplexMatrix coeff_;
  FreeVariableSpec spec_;
};

class SemicircularEvaluator final : public CauchyEvaluator {
 public:
  explicit SemicircularEvaluator(CovarianceMap eta) : eta_(std::move(eta)) {}
  std::size_t base_dim() const override { return eta_.dim(); }
  ComplexMatrix evaluate(const ComplexMatrix& z, EvalContext* ctx) const override {
    const ComplexMatrix* warm = ctx ? ctx->find(this, z.rows()) : nullptr;
    if (warm && ctx) ++ctx->stats.warm_hits;
    ComplexMatrix w = hrs_fixed_point(eta_, z, warm, ctx ? &ctx->stats : nullptr);
    if (ctx) ctx->store(this, w);
    return w;
  }

 private:
  CovarianceMap eta_;
};

}  // namespace

EvaluatorPtr make_constant_evaluator(ComplexMatrix b0) {
  return std::make_shared<ConstantEvaluator>(std::move(b0));
}

EvaluatorPtr make_atomic_evaluator(ComplexMatrix coeff, FreeVariableSpec spec) {
  return std::make_shared<AtomicEvaluator>(std::move(coeff), std::move(spec));
}

EvaluatorPtr make_semicircular_evaluator(CovarianceMap eta) {
  return std::make_shared<SemicircularEvaluator>(std::move(eta));
}

EvaluatorPtr make_summand_evaluator(ComplexMatrix coeff, const FreeVariableSpec& spec) {
  if (spec.kind == FreeVariableSpec::Kind::atomic)
    return make_atomic_evaluator(std::move(coeff), spec);
  ComplexMatrix scaled = Complex(std::sqrt(spec.variance)) * coeff;
  return make_semicircular_evaluator(CovarianceMap::explicit_list({std::move(scaled)}));
}

std::vector<ComplexMatrix> extract_moments(const CauchyEvaluator& g, int max_order, double rho,
                                           int nodes, EvalContext* ctx) {
  if (max_order < 0 || rho <= 0.0) throw ConfigError("extract_moments: bad arguments");
  if (nodes < 8 || nodes % 2 != 0) throw ConfigError("extract_moments: nodes must be even, >= 8");
  const std::size_t n = g.base_dim();

  // midpoint rule on the circle; nodes come in conjugate pairs and
  // G(conj(z)) = G(z)*, so only the upper semicircle is evaluated
  std::vector<ComplexMatrix> moments(static_cast<std::size_t>(max_order) + 1,
                                     ComplexMatrix(n, n));
  const double step = 2.0 * M_PI / nodes;
  for (int j = 0; j < nodes / 2; ++j) {
    const double theta = step * (j + 0.5);
    const Complex zj = rho * std::exp(kI * theta);
    ComplexMatrix gz = g.evaluate(ComplexMatrix::scalar(n, zj), ctx);
    // contribution of z_j and its conjugate to (1/2 pi i) int z^k G(z) dz
    for (int k = 0; k <= max_order; ++k) {
      const Complex f = std::pow(zj, k + 1) * (kI * step) / (2.0 * M_PI * kI);
      ComplexMatrix term = f * gz + std::conj(f) * gz.adjoint();
      moments[static_cast<std::size_t>(k)] += term;
    }
  }
  return moments;
}

}  // namespace ncdist

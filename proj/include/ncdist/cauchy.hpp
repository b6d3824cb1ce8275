#ifndef NCDIST_CAUCHY_HPP
#define NCDIST_CAUCHY_HPP

// Operator-valued Cauchy-transform evaluators for the pencil building blocks:
// constants, scalar-distributed variables lifted by a coefficient matrix, and
// matrix-valued semicirculars through the half-plane fixed point
// w = (z - eta(w))^{-1}.  Evaluators accept arguments of size base_dim * m
// and act at amplification level m.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "ncdist/freeness_oracle.hpp"
#include "ncdist/matalg.hpp"

namespace ncdist {

struct FreeVariableSpec {
  struct Atom {
    double weight;
    double position;
  };
  enum class Kind { atomic, semicircular };

  Kind kind = Kind::semicircular;
  std::vector<Atom> atoms;  // atomic only; weights sum to 1, positions increasing
  double variance = 1.0;    // semicircular only

  static FreeVariableSpec atomic(std::vector<Atom> atoms);
  static FreeVariableSpec semicircular(double variance);

  double support_radius() const;
  std::vector<double> moments(int max_order) const;    // m_0..m_K
  std::vector<double> cumulants(int max_order) const;  // kappa_1..kappa_K
};

struct SolveStats {
  long solves = 0;
  long iterations = 0;
  long warm_hits = 0;
  double max_residual = 0.0;

  void merge(const SolveStats& o);
};

// Per-worker solver context: warm starts keyed by evaluator identity plus
// accumulated statistics.  Never shared across threads.
class EvalContext {
 public:
  const ComplexMatrix* find(const void* key, std::size_t dim) const;
  void store(const void* key, ComplexMatrix value);
  SolveStats stats;

 private:
  std::map<const void*, ComplexMatrix> slots_;
};

class CauchyEvaluator {
 public:
  virtual ~CauchyEvaluator() = default;
  virtual std::size_t base_dim() const = 0;
  virtual ComplexMatrix evaluate(const ComplexMatrix& z, EvalContext* ctx = nullptr) const = 0;
};

using EvaluatorPtr = std::shared_ptr<const CauchyEvaluator>;

// (z - b0 (x) 1)^{-1}
ComplexMatrix cauchy_constant(const ComplexMatrix& b0, const ComplexMatrix& z);

// sum_k w_k (z - t_k c (x) 1)^{-1} for an atomic scalar distribution
ComplexMatrix cauchy_atomic(const ComplexMatrix& coeff, const FreeVariableSpec& mu,
                            const ComplexMatrix& z);

// Unique solution w in the lower half-plane of z w = 1 + eta(w) w, by plain
// iteration of F_z(w) = (z - eta(w))^{-1} with automatic averaging when the
// residual stalls.  Cap 100000 iterations, then ConvergenceError.
ComplexMatrix hrs_fixed_point(const CovarianceMap& eta, const ComplexMatrix& z,
                              const ComplexMatrix* w0 = nullptr, SolveStats* stats = nullptr);

inline constexpr double kFixedPointTol = 1e-11;
inline constexpr long kFixedPointCap = 100000;

using SelfMap = std::function<ComplexMatrix(const ComplexMatrix&)>;

// w <- (1-alpha) w + alpha F(w) until ||dw|| < 1e-12 max(1, ||w||).
ComplexMatrix damped_iterate(const SelfMap& F, ComplexMatrix w0, double alpha,
                             long cap = kFixedPointCap, SolveStats* stats = nullptr);

EvaluatorPtr make_constant_evaluator(ComplexMatrix b0);
EvaluatorPtr make_atomic_evaluator(ComplexMatrix coeff, FreeVariableSpec spec);
EvaluatorPtr make_semicircular_evaluator(CovarianceMap eta);
// coeff (x) X for either spec kind
EvaluatorPtr make_summand_evaluator(ComplexMatrix coeff, const FreeVariableSpec& spec);

// Matrix moments E[X^k], k = 0..max_order, recovered from G as the Laurent
// coefficients (1/2 pi i) contour integral of z^k G(z 1) around a circle of
// radius rho > support radius.  Node count 64 puts the quadrature error far
// below the solver tolerance.
std::vector<ComplexMatrix> extract_moments(const CauchyEvaluator& g, int max_order, double rho,
                                           int nodes = 64, EvalContext* ctx = nullptr);

}  // namespace ncdist

#endif

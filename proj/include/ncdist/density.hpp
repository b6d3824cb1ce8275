#ifndef NCDIST_DENSITY_HPP
#define NCDIST_DENSITY_HPP

// Scalar Cauchy transform of the linearized variable, read off as the (1,1)
// entry of the pencil evaluator at Lambda_eps(z) = diag(z, i eps, ..., i eps),
// and Stieltjes inversion rho(t) = -Im g(t + i eps_z)/pi over a grid.

#include <complex>
#include <span>
#include <vector>

#include "ncdist/cauchy.hpp"

namespace ncdist {

struct PointStatus {
  bool converged = false;
  long iterations = 0;
  double residual = 0.0;
};

struct SpectralDensity {
  std::vector<double> grid;    // increasing t values
  std::vector<double> values;  // rho(t) >= 0; 0 at failed points
  std::vector<PointStatus> status;
  double eps_z = 0.0;
  double eps_pencil = 0.0;
  double mass = 0.0;           // trapezoid integral of rho
  int failed_points = 0;
  double min_raw_value = 0.0;  // most negative value seen before clamping
};

inline constexpr double kDefaultEpsZ = 1e-3;
inline constexpr double kDefaultEpsPencil = 1e-7;

// [G(Lambda_eps(z))]_{1,1}; z strictly above the real axis.
Complex scalar_cauchy(const CauchyEvaluator& pencil_evaluator, Complex z, double eps_pencil,
                      EvalContext* ctx = nullptr);

// Sweep of the grid at height eps_z; grid points are independent solves and
// run on `workers` threads (0 = hardware concurrency), each with its own
// warm-start context and a deterministic gather.  Failed points are recorded,
// never interpolated.
SpectralDensity invert_stieltjes(const CauchyEvaluator& pencil_evaluator,
                                 std::span<const double> grid, double eps_z = kDefaultEpsZ,
                                 double eps_pencil = kDefaultEpsPencil, int workers = 0,
                                 SolveStats* stats = nullptr);

std::vector<double> moments_from_density(const SpectralDensity& d, int max_order);

std::vector<double> uniform_grid(double lo, double hi, int points);

// The scalar transform of a linearized variable as a 1x1 evaluator (diagonal
// entries evaluated independently), so the Laurent-coefficient moment
// extraction applies to it.
class ScalarCauchyAdapter final : public CauchyEvaluator {
 public:
  ScalarCauchyAdapter(EvaluatorPtr pencil_evaluator, double eps_pencil)
      : inner_(std::move(pencil_evaluator)), eps_(eps_pencil) {}
  std::size_t base_dim() const override { return 1; }
  ComplexMatrix evaluate(const ComplexMatrix& z, EvalContext* ctx = nullptr) const override;

 private:
  EvaluatorPtr inner_;
  double eps_;
};

// tr G(z 1)/n as a 1x1 evaluator: the scalar transform of a matrix-valued
// variable viewed under the normalized trace.
class TraceCauchyAdapter final : public CauchyEvaluator {
 public:
  explicit TraceCauchyAdapter(EvaluatorPtr inner) : inner_(std::move(inner)) {}
  std::size_t base_dim() const override { return 1; }
  ComplexMatrix evaluate(const ComplexMatrix& z, EvalContext* ctx = nullptr) const override;

 private:
  EvaluatorPtr inner_;
};

}  // namespace ncdist

#endif

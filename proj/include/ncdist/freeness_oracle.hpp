#ifndef NCDIST_FREENESS_ORACLE_HPP
#define NCDIST_FREENESS_ORACLE_HPP

// Exact combinatorial engine: non-crossing partitions, the multiplicative
// moment maps E_pi, free cumulants via the subtraction recursion, and the
// pairing formula for operator-valued semicircular moments.  This module is
// the brute-force ground truth every analytic solver is tested against.

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "ncdist/matalg.hpp"

namespace ncdist {

struct NCPartition {
  int n = 0;
  std::vector<std::vector<int>> blocks;  // disjoint increasing 1-based lists covering 1..n
};

bool is_noncrossing(const NCPartition& pi);

// Exhaustive enumeration; |NC(n)| = Catalan(n), |NC2(2m)| = Catalan(m).
// Caps: n <= 16 for pairings, n <= 10 otherwise (CapError beyond).
std::vector<NCPartition> enumerate_nc(int n, bool pairings_only);

// Completely positive covariance, either b |-> sum_j c_j b c_j for Hermitian
// c_j, or an n^2 x n^2 linear action on row-stacked vec(b) that must pass a
// Choi positivity check at build time.  apply() accepts arguments of size
// dim*m and acts blockwise (the amplification id_m (x) eta).
class CovarianceMap {
 public:
  static CovarianceMap explicit_list(std::vector<ComplexMatrix> coeffs);
  static CovarianceMap linear_action(std::size_t dim, ComplexMatrix action);
  static CovarianceMap scalar(double variance = 1.0);

  std::size_t dim() const { return dim_; }
  ComplexMatrix apply(const ComplexMatrix& b) const;
  double norm_bound() const;
  bool is_explicit() const { return !coeffs_.empty() || action_.rows() == 0; }
  const std::vector<ComplexMatrix>& coefficients() const { return coeffs_; }

  CovarianceMap operator+(const CovarianceMap& other) const;

 private:
  CovarianceMap() = default;
  std::size_t dim_ = 1;
  std::vector<ComplexMatrix> coeffs_;  // explicit form
  ComplexMatrix action_;               // linear-action form (empty if explicit)
};

// Recursive evaluation of eta_pi(b_1,...,b_{2m-1}) for a non-crossing pairing:
// innermost interval pairs apply eta, results multiply into the enclosing
// argument slot in left-to-right order.
ComplexMatrix eta_pi(const NCPartition& pairing, const CovarianceMap& eta,
                     std::span<const ComplexMatrix> b);

// sum over NC2(k) of eta_pi; the zero matrix for odd k.  k = b.size() + 1.
ComplexMatrix semicircular_moment(const CovarianceMap& eta, std::span<const ComplexMatrix> b);

// B-valued moment source: moments(inner) = E[X c_1 X c_2 ... c_{m-1} X] where
// m = inner.size() + 1.
using MomentFn = std::function<ComplexMatrix(std::span<const ComplexMatrix>)>;

// kappa_n via kappa = moments - sum over proper non-crossing partitions of
// kappa_pi (n = inner.size() + 1, capped at 8).
ComplexMatrix free_cumulant(const MomentFn& moments, std::size_t dim,
                            std::span<const ComplexMatrix> inner);

// One free variable as seen by the mixed-moment engine: a B-valued cumulant
// functional kappa_{m}(X c_1, ..., X c_{m-1}, X).
class FreeVariable {
 public:
  virtual ~FreeVariable() = default;
  virtual std::size_t dim() const = 0;
  virtual ComplexMatrix cumulant(std::span<const ComplexMatrix> inner) const = 0;
};

// coeff (x) X for a scalar variable X with the given free cumulants; its
// B-valued cumulants are kappa_m * coeff c_1 coeff ... c_{m-1} coeff.
class ScalarLiftedVariable : public FreeVariable {
 public:
  ScalarLiftedVariable(ComplexMatrix coeff, std::vector<double> scalar_cumulants);
  std::size_t dim() const override { return coeff_.rows(); }
  ComplexMatrix cumulant(std::span<const ComplexMatrix> inner) const override;

 private:
  ComplexMatrix coeff_;
  std::vector<double> kappa_;  // kappa_[m-1] = kappa_m
};

// Cumulants derived from an arbitrary moment source by the subtraction
// recursion; used when only moments are known.
class MomentDefinedVariable : public FreeVariable {
 public:
  MomentDefinedVariable(MomentFn moments, std::size_t dim);
  std::size_t dim() const override { return dim_; }
  ComplexMatrix cumulant(std::span<const ComplexMatrix> inner) const override;

 private:
  MomentFn moments_;
  std::size_t dim_;
};

// E[X_{w_1} c_1 X_{w_2} c_2 ... X_{w_k}] for free variables, summing kappa_pi
// over non-crossing partitions whose blocks respect the word labels.  word is
// 0-based into vars; interleaved has word.size()-1 entries; total length <= 8.
ComplexMatrix mixed_moment_free(std::span<const FreeVariable* const> vars,
                                std::span<const int> word,
                                std::span<const ComplexMatrix> interleaved);

// Exact matrix moments E[(b0 + sum_k coeff_k (x) X_k)^j] for j <= max_order,
// from per-variable scalar free cumulants, via the vanishing-mixed-cumulants
// expansion over all words.  max_order <= 8.
std::vector<ComplexMatrix> pencil_moments(const ComplexMatrix& b0,
                                          std::span<const ComplexMatrix> coeffs,
                                          std::span<const std::vector<double>> scalar_cumulants,
                                          int max_order);

// --- scalar helpers -------------------------------------------------------

// m_0..m_K of an atomic measure sum w_i delta_{t_i}.
std::vector<double> atomic_scalar_moments(std::span<const std::pair<double, double>> wt, int K);
// m_0..m_K of the semicircular law with the given variance.
std::vector<double> semicircular_scalar_moments(double variance, int K);
// kappa_1..kappa_K from m_0..m_K (m_0 = 1) via the free moment-cumulant
// recursion, and its inverse.
std::vector<double> scalar_cumulants_from_moments(std::span<const double> m);
std::vector<double> scalar_moments_from_cumulants(std::span<const double> kappa);

}  // namespace ncdist

#endif

#ifndef NCDIST_MATALG_HPP
#define NCDIST_MATALG_HPP

// Dense complex matrix algebra with the half-plane geometry predicates used
// by every solver.  Matrices are small (pencil sizes stay well below 64)
// except in the random-matrix harness, which brings its own eigensolver.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "ncdist/errors.hpp"

namespace ncdist {

using Complex = std::complex<double>;

class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols) {}
  // Row-major entries; rejects NaN/Inf and size mismatch.
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix scalar(std::size_t n, Complex value);
  static ComplexMatrix diagonal(std::span<const Complex> d);
  static ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  Complex& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
  const std::vector<Complex>& data() const { return a_; }

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  bool is_hermitian(double tol = 1e-12) const;

  ComplexMatrix block(std::size_t r0, std::size_t c0, std::size_t r, std::size_t c) const;
  void set_block(std::size_t r0, std::size_t c0, const ComplexMatrix& b);

  ComplexMatrix& operator+=(const ComplexMatrix& o);
  ComplexMatrix& operator-=(const ComplexMatrix& o);
  ComplexMatrix& operator*=(Complex s);

  double frobenius_norm() const;
  double max_abs() const;
  Complex trace() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Complex> a_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(const ComplexMatrix& a);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex s, ComplexMatrix a);
ComplexMatrix operator*(ComplexMatrix a, Complex s);

enum class HalfPlane { upper, lower };

// Membership is decided against this tolerance on the smallest eigenvalue of
// the (signed) imaginary part.
inline constexpr double kHalfPlaneTol = 1e-12;

struct HalfPlaneCertificate {
  ComplexMatrix matrix;
  double epsilon = 0.0;  // largest eps with +-Im(matrix) >= eps*1, floored at 0
  bool member() const { return epsilon > kHalfPlaneTol; }
};

// (a - a*)/(2i); requires a square.
ComplexMatrix imaginary_part(const ComplexMatrix& a);
// (a + a*)/2; requires a square.
ComplexMatrix real_part(const ComplexMatrix& a);

// Inverse by partial-pivoted elimination.  Throws SingularMatrixError when a
// pivot falls below 1e-14 * max|entry|.
ComplexMatrix solve_inverse(const ComplexMatrix& a);

HalfPlaneCertificate half_plane_membership(const ComplexMatrix& a, HalfPlane side);

// Largest singular value via power iteration on a*a, relative tolerance 1e-10.
double operator_norm(const ComplexMatrix& a);

// Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations, ascending.
std::vector<double> jacobi_eigenvalues(const ComplexMatrix& hermitian);

double min_eigenvalue(const ComplexMatrix& hermitian);

}  // namespace ncdist

#endif

#include "ncdist/matalg.hpp"

#include <thread>

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace ncdist {

namespace {

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void require_square(const ComplexMatrix& a, const char* who) {
  if (!a.is_square())
    throw DimensionError(std::string(who) + ": matrix is not square");
}

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* who) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError(std::string(who) + ": shape mismatch");
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), a_(std::move(entries)) {
  if (a_.size() != rows_ * cols_)
    throw DimensionError("ComplexMatrix: entry count does not equal rows*cols");
  for (const Complex& z : a_)
    if (!finite(z)) throw DimensionError("ComplexMatrix: non-finite entry");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::scalar(std::size_t n, Complex value) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = value;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const Complex> d) {
  ComplexMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

ComplexMatrix ComplexMatrix::kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix m(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Complex s = a(i, j);
      if (s == Complex(0.0)) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          m(i * b.rows() + k, j * b.cols() + l) = s * b(k, l);
    }
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix m(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
  return m;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix m(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
  return m;
}

bool ComplexMatrix::is_hermitian(double tol) const {
  if (!is_square()) return false;
  const double scale = std::max(1.0, max_abs());
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i; j < cols_; ++j)
      if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tol * scale) return false;
  return true;
}

ComplexMatrix ComplexMatrix::block(std::size_t r0, std::size_t c0, std::size_t r,
                                   std::size_t c) const {
  if (r0 + r > rows_ || c0 + c > cols_) throw DimensionError("block: out of range");
  ComplexMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = (*this)(r0 + i, c0 + j);
  return m;
}

void ComplexMatrix::set_block(std::size_t r0, std::size_t c0, const ComplexMatrix& b) {
  if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_)
    throw DimensionError("set_block: out of range");
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
  require_same_shape(*this, o, "operator+=");
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
  require_same_shape(*this, o, "operator-=");
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex s) {
  for (Complex& z : a_) z *= s;
  return *this;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const Complex& z : a_) s += std::norm(z);
  return std::sqrt(s);
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const Complex& z : a_) m = std::max(m, std::abs(z));
  return m;
}

Complex ComplexMatrix::trace() const {
  Complex t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }

ComplexMatrix operator-(const ComplexMatrix& a) {
  ComplexMatrix m = a;
  return m *= Complex(-1.0);
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("operator*: inner dimension mismatch");
  ComplexMatrix c(a.rows(), b.cols());
  // i-k-j order keeps both streams contiguous in row-major storage.
  auto rows = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i)
      for (std::size_t k = 0; k < a.cols(); ++k) {
        const Complex aik = a(i, k);
        if (aik == Complex(0.0)) continue;
        for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
      }
  };
  static const std::size_t nthreads = std::max(1u, std::thread::hardware_concurrency());
  if (a.rows() >= 256 && nthreads > 1) {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < nthreads; ++w) {
      const std::size_t lo = a.rows() * w / nthreads;
      const std::size_t hi = a.rows() * (w + 1) / nthreads;
      pool.emplace_back(rows, lo, hi);
    }
    for (auto& t : pool) t.join();
  } else {
    rows(0, a.rows());
  }
  return c;
}

ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }

ComplexMatrix imaginary_part(const ComplexMatrix& a) {
  require_square(a, "imaginary_part");
  const std::size_t n = a.rows();
  ComplexMatrix m(n, n);
  const Complex half_over_i(0.0, -0.5);  // 1/(2i)
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m(i, j) = half_over_i * (a(i, j) - std::conj(a(j, i)));
  return m;
}

ComplexMatrix real_part(const ComplexMatrix& a) {
  require_square(a, "real_part");
  const std::size_t n = a.rows();
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));
  return m;
}

ComplexMatrix solve_inverse(const ComplexMatrix& a) {
  require_square(a, "solve_inverse");
  const std::size_t n = a.rows();
  const double threshold = 1e-14 * std::max(a.max_abs(), 1e-300);

  // Gauss-Jordan with partial pivoting on an augmented [a | 1] tableau.
  ComplexMatrix w = a;
  ComplexMatrix inv = ComplexMatrix::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot_row = col;
    double best = std::abs(w(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      const double v = std::abs(w(r, col));
      if (v > best) {
        best = v;
        pivot_row = r;
      }
    }
    if (best < threshold)
      throw SingularMatrixError("solve_inverse: numerically singular matrix", best);
    if (pivot_row != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(w(col, j), w(pivot_row, j));
        std::swap(inv(col, j), inv(pivot_row, j));
      }
    }
    const Complex p = w(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      w(col, j) /= p;
      inv(col, j) /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const Complex f = w(r, col);
      if (f == Complex(0.0)) continue;
      for (std::size_t j = 0; j < n; ++j) {
        w(r, j) -= f * w(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

HalfPlaneCertificate half_plane_membership(const ComplexMatrix& a, HalfPlane side) {
  require_square(a, "half_plane_membership");
  ComplexMatrix im = imaginary_part(a);
  if (side == HalfPlane::lower) im *= Complex(-1.0);
  const double lo = min_eigenvalue(im);
  HalfPlaneCertificate cert{a, std::max(lo, 0.0)};
  return cert;
}

double operator_norm(const ComplexMatrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  const double fro = a.frobenius_norm();
  if (fro == 0.0) return 0.0;

  // Power iteration on a*a.  The Frobenius norm bounds the spectral norm from
  // above and within sqrt(n), so it both seeds the scale and caps iterations.
  const std::size_t n = a.cols();
  std::vector<Complex> v(n);
  std::uint64_t state = 0x9e3779b97f4a7c15ull;
  auto next = [&state]() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return static_cast<double>(state >> 11) / 9007199254740992.0 - 0.5;
  };
  for (auto& z : v) z = Complex(next(), next());

  auto apply = [&a](const std::vector<Complex>& x) {
    std::vector<Complex> y(a.rows(), Complex(0.0));
    for (std::size_t i = 0; i < a.rows(); ++i) {
      Complex s = 0.0;
      for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
      y[i] = s;
    }
    std::vector<Complex> z(a.cols(), Complex(0.0));
    for (std::size_t i = 0; i < a.rows(); ++i) {
      const Complex yi = y[i];
      for (std::size_t j = 0; j < a.cols(); ++j) z[j] += std::conj(a(i, j)) * yi;
    }
    return z;
  };

  double lambda = 0.0;
  for (int it = 0; it < 500; ++it) {
    double nv = 0.0;
    for (const auto& z : v) nv += std::norm(z);
    nv = std::sqrt(nv);
    if (nv == 0.0) {
      for (auto& z : v) z = Complex(next(), next());
      continue;
    }
    for (auto& z : v) z /= nv;
    std::vector<Complex> w = apply(v);
    double next_lambda = 0.0;
    for (std::size_t j = 0; j < n; ++j) next_lambda += (std::conj(v[j]) * w[j]).real();
    next_lambda = std::max(next_lambda, 0.0);
    if (it > 3 && std::abs(next_lambda - lambda) <= 1e-10 * std::max(next_lambda, 1e-300)) {
      lambda = next_lambda;
      break;
    }
    lambda = next_lambda;
    v = std::move(w);
  }
  return std::sqrt(std::max(lambda, 0.0));
}

std::vector<double> jacobi_eigenvalues(const ComplexMatrix& hermitian) {
  require_square(hermitian, "jacobi_eigenvalues");
  const std::size_t n = hermitian.rows();
  ComplexMatrix m = hermitian;
  // Work on the Hermitian average so that tiny asymmetries do not feed the
  // rotation angles.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m(i, j) = 0.5 * (m(i, j) + std::conj(hermitian(j, i)));

  const double scale = std::max(m.frobenius_norm(), 1e-300);
  const double tol = 1e-12 * scale;

  auto offdiag = [&m, n]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * std::norm(m(i, j));
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < 100 && offdiag() > tol; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = m(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double app = m(p, p).real();
        const double aqq = m(q, q).real();
        // Complex Jacobi rotation: phase out a_pq, then rotate the 2x2 block
        // through the smaller of the two annihilating angles.
        const Complex phase = apq / std::abs(apq);
        const double g = std::abs(apq);
        const double tau = (app - aqq) / (2.0 * g);
        const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                      : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const Complex sp = s * phase;
        for (std::size_t k = 0; k < n; ++k) {
          const Complex mkp = m(k, p), mkq = m(k, q);
          m(k, p) = c * mkp + std::conj(sp) * mkq;
          m(k, q) = -sp * mkp + c * mkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex mpk = m(p, k), mqk = m(q, k);
          m(p, k) = c * mpk + sp * mqk;
          m(q, k) = -std::conj(sp) * mpk + c * mqk;
        }
        m(p, q) = std::conj(m(q, p));
      }
    }
  }

  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = m(i, i).real();
  std::sort(ev.begin(), ev.end());
  return ev;
}

double min_eigenvalue(const ComplexMatrix& hermitian) {
  const auto ev = jacobi_eigenvalues(hermitian);
  return ev.empty() ? 0.0 : ev.front();
}

}  // namespace ncdist

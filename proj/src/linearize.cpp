#include "ncdist/linearize.hpp"

#include <cmath>

namespace ncdist {

LinearPencil::LinearPencil(int num_vars, std::vector<ComplexMatrix> coefficients)
    : num_vars_(num_vars), coeff_(std::move(coefficients)) {
  if (coeff_.size() != static_cast<std::size_t>(num_vars_) + 1)
    throw DimensionError("LinearPencil: needs num_vars + 1 coefficient matrices");
  const std::size_t n = coeff_[0].rows();
  for (const auto& c : coeff_)
    if (!c.is_square() || c.rows() != n)
      throw DimensionError("LinearPencil: coefficients must be square of equal size");
}

const ComplexMatrix& LinearPencil::coefficient(int k) const {
  if (k < 0 || k > num_vars_) throw DimensionError("LinearPencil: coefficient index");
  return coeff_[static_cast<std::size_t>(k)];
}

bool LinearPencil::is_selfadjoint(double tol) const {
  for (const auto& c : coeff_)
    if (!c.is_hermitian(tol)) return false;
  return true;
}

ComplexMatrix LinearPencil::evaluate(std::span<const ComplexMatrix> X) const {
  if (static_cast<int>(X.size()) != num_vars_)
    throw DimensionError("LinearPencil::evaluate: wrong tuple length");
  const std::size_t N = X.empty() ? 1 : X[0].rows();
  for (const auto& x : X)
    if (!x.is_square() || x.rows() != N)
      throw DimensionError("LinearPencil::evaluate: matrices must be square of equal size");
  const std::size_t m = size();
  ComplexMatrix out(m * N, m * N);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      ComplexMatrix blockv(N, N);
      const Complex c0 = coeff_[0](i, j);
      for (std::size_t t = 0; t < N; ++t) blockv(t, t) = c0;
      for (int k = 1; k <= num_vars_; ++k) {
        const Complex ck = coeff_[static_cast<std::size_t>(k)](i, j);
        if (ck == Complex(0.0)) continue;
        blockv += ck * X[static_cast<std::size_t>(k - 1)];
      }
      out.set_block(i * N, j * N, blockv);
    }
  return out;
}

namespace {

std::vector<ComplexMatrix> zero_coeffs(int num_vars, std::size_t n) {
  return std::vector<ComplexMatrix>(static_cast<std::size_t>(num_vars) + 1, ComplexMatrix(n, n));
}

// Bordered monomial pencil of size max(deg, 2): the staircase of the proof
// for deg >= 2, the 2x2 forms for constants and linear terms.
std::vector<ComplexMatrix> monomial_pencil(const NCMonomial& t, int d) {
  const std::size_t k = t.word.size();
  if (k <= 1) {
    auto c = zero_coeffs(d, 2);
    c[0](1, 0) = 1.0;
    c[0](1, 1) = -1.0;
    if (k == 0)
      c[0](0, 1) = t.coefficient;
    else
      c[static_cast<std::size_t>(t.word[0])](0, 1) = t.coefficient;
    return c;
  }
  auto c = zero_coeffs(d, k);
  c[static_cast<std::size_t>(t.word[0])](0, k - 1) = t.coefficient;
  for (std::size_t j = 1; j < k; ++j) {
    c[static_cast<std::size_t>(t.word[j])](j, k - 1 - j) += 1.0;
    c[0](j, k - j) = -1.0;
  }
  return c;
}

}  // namespace

LinearPencil linearize_polynomial(const NCPolynomial& p) {
  if (p.is_zero())
    throw ConfigError("linearize_polynomial: the zero polynomial has no pencil");
  const int d = p.num_vars();

  std::vector<std::vector<ComplexMatrix>> monos;
  std::size_t total = 1;
  for (const auto& t : p.terms()) {
    monos.push_back(monomial_pencil(t, d));
    total += monos.back()[0].rows() - 1;
  }

  // sum rule: shared first row/column, q-blocks on the diagonal
  auto out = zero_coeffs(d, total);
  std::size_t off = 1;
  for (const auto& mono : monos) {
    const std::size_t n = mono[0].rows();
    for (int k = 0; k <= d; ++k) {
      const auto& src = mono[static_cast<std::size_t>(k)];
      auto& dst = out[static_cast<std::size_t>(k)];
      for (std::size_t j = 1; j < n; ++j) {
        dst(0, off + j - 1) = src(0, j);  // u_i
        dst(off + j - 1, 0) = src(j, 0);  // v_i
      }
      for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 1; j < n; ++j) dst(off + i - 1, off + j - 1) = src(i, j);
    }
    off += n - 1;
  }
  return LinearPencil(d, std::move(out));
}

LinearPencil symmetrize(const NCPolynomial& p, const LinearPencil& raw) {
  if (!p.is_selfadjoint())
    throw ConfigError("symmetrize: polynomial is not selfadjoint");
  const int d = raw.num_vars();
  const std::size_t n = raw.size();
  if (n < 2) throw DimensionError("symmetrize: pencil too small");
  const std::size_t m = n - 1;

  auto out = zero_coeffs(d, 1 + 2 * m);
  for (int k = 0; k <= d; ++k) {
    const auto& b = raw.coefficient(k);
    auto& dst = out[static_cast<std::size_t>(k)];
    for (std::size_t j = 0; j < m; ++j) {
      const Complex u = b(0, 1 + j);
      const Complex v = b(1 + j, 0);
      dst(0, 1 + j) = 0.5 * u;
      dst(1 + j, 0) = 0.5 * std::conj(u);
      dst(0, 1 + m + j) = 0.5 * std::conj(v);
      dst(1 + m + j, 0) = 0.5 * v;
    }
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        const Complex q = b(1 + i, 1 + j);
        dst(1 + m + i, 1 + j) = 0.5 * q;
        dst(1 + j, 1 + m + i) = 0.5 * std::conj(q);
      }
  }
  return LinearPencil(d, std::move(out));
}

namespace {

struct Rep {
  ComplexMatrix u;           // 1 x n over C
  std::vector<ComplexMatrix> q;  // pencil coefficients, n x n
  ComplexMatrix v;           // n x 1 over C
  int d = 0;
};

Rep rep_base(Complex lambda, int var, int d) {
  Rep r;
  r.d = d;
  r.u = ComplexMatrix(1, 2);
  r.u(0, 1) = 1.0;
  r.v = ComplexMatrix(2, 1);
  r.v(1, 0) = 1.0;
  r.q = zero_coeffs(d, 2);
  r.q[0](0, 1) = -1.0;
  r.q[0](1, 0) = -1.0;
  if (var == 0)
    r.q[0](0, 0) = lambda;
  else
    r.q[static_cast<std::size_t>(var)](0, 0) = 1.0;
  return r;
}

Rep rep_sum(const Rep& a, const Rep& b) {
  const std::size_t n1 = a.u.cols(), n2 = b.u.cols();
  Rep r;
  r.d = a.d;
  r.u = ComplexMatrix(1, n1 + n2);
  r.v = ComplexMatrix(n1 + n2, 1);
  for (std::size_t j = 0; j < n1; ++j) {
    r.u(0, j) = a.u(0, j);
    r.v(j, 0) = a.v(j, 0);
  }
  for (std::size_t j = 0; j < n2; ++j) {
    r.u(0, n1 + j) = b.u(0, j);
    r.v(n1 + j, 0) = b.v(j, 0);
  }
  r.q = zero_coeffs(a.d, n1 + n2);
  for (int k = 0; k <= a.d; ++k) {
    r.q[static_cast<std::size_t>(k)].set_block(0, 0, a.q[static_cast<std::size_t>(k)]);
    r.q[static_cast<std::size_t>(k)].set_block(n1, n1, b.q[static_cast<std::size_t>(k)]);
  }
  return r;
}

Rep rep_product(const Rep& a, const Rep& b) {
  const std::size_t n1 = a.u.cols(), n2 = b.u.cols();
  Rep r;
  r.d = a.d;
  r.u = ComplexMatrix(1, n2 + n1);
  for (std::size_t j = 0; j < n1; ++j) r.u(0, n2 + j) = a.u(0, j);
  r.v = ComplexMatrix(n1 + n2, 1);
  for (std::size_t j = 0; j < n2; ++j) r.v(n1 + j, 0) = b.v(j, 0);
  r.q = zero_coeffs(a.d, n1 + n2);
  // [[v1*u2, q1],[q2, 0]] with column blocks of widths n2, n1
  ComplexMatrix vu = a.v * b.u;  // n1 x n2
  r.q[0].set_block(0, 0, vu);
  for (int k = 0; k <= a.d; ++k) {
    r.q[static_cast<std::size_t>(k)].set_block(0, n2, a.q[static_cast<std::size_t>(k)]);
    r.q[static_cast<std::size_t>(k)].set_block(n1, 0, b.q[static_cast<std::size_t>(k)]);
  }
  return r;
}

Rep rep_inverse(const Rep& a) {
  const std::size_t n = a.u.cols();
  Rep r;
  r.d = a.d;
  r.u = ComplexMatrix(1, n + 1);
  r.u(0, 0) = 1.0;
  r.v = ComplexMatrix(n + 1, 1);
  r.v(0, 0) = 1.0;
  r.q = zero_coeffs(a.d, n + 1);
  for (std::size_t j = 0; j < n; ++j) {
    r.q[0](0, 1 + j) = a.u(0, j);
    r.q[0](1 + j, 0) = a.v(j, 0);
  }
  for (int k = 0; k <= a.d; ++k) {
    ComplexMatrix neg = -a.q[static_cast<std::size_t>(k)];
    r.q[static_cast<std::size_t>(k)].set_block(1, 1, neg);
  }
  return r;
}

Rep build_rep(const ExprPtr& e, int d) {
  switch (e->kind) {
    case RationalExpr::Kind::constant:
      return rep_base(e->value, 0, d);
    case RationalExpr::Kind::variable:
      return rep_base(0.0, e->var_index, d);
    case RationalExpr::Kind::sum:
      return rep_sum(build_rep(e->left, d), build_rep(e->right, d));
    case RationalExpr::Kind::product:
      return rep_product(build_rep(e->left, d), build_rep(e->right, d));
    case RationalExpr::Kind::inverse:
      return rep_inverse(build_rep(e->child, d));
  }
  throw Error("build_rep: corrupt expression node");
}

LinearRepresentation to_representation(Rep r) {
  LinearRepresentation out;
  out.u = std::move(r.u);
  out.v = std::move(r.v);
  out.q_pencil = LinearPencil(r.d, std::move(r.q));
  return out;
}

bool rep_is_selfadjoint(const LinearRepresentation& rep) {
  if (!rep.q_pencil.is_selfadjoint(1e-14)) return false;
  if (rep.u.cols() != rep.v.rows()) return false;
  for (std::size_t j = 0; j < rep.u.cols(); ++j)
    if (rep.u(0, j) != std::conj(rep.v(j, 0))) return false;
  return true;
}

}  // namespace

LinearRepresentation represent_rational(const ExprPtr& r, int num_vars) {
  const int d = num_vars >= 0 ? num_vars : max_variable(r);
  if (d < max_variable(r))
    throw ConfigError("represent_rational: expression mentions more variables than num_vars");
  return to_representation(build_rep(r, d));
}

LinearRepresentation selfadjoint_representation(const ExprPtr& r, int num_vars) {
  LinearRepresentation rep = represent_rational(r, num_vars);
  if (rep_is_selfadjoint(rep)) return rep;

  const int d = rep.q_pencil.num_vars();
  const std::size_t n = rep.q_pencil.size();
  const double s = 1.0 / std::sqrt(2.0);

  LinearRepresentation out;
  out.u = ComplexMatrix(1, 2 * n);
  out.v = ComplexMatrix(2 * n, 1);
  for (std::size_t j = 0; j < n; ++j) {
    out.u(0, j) = s * rep.u(0, j);
    out.u(0, n + j) = s * std::conj(rep.v(j, 0));
    out.v(j, 0) = s * std::conj(rep.u(0, j));
    out.v(n + j, 0) = s * rep.v(j, 0);
  }
  auto q = zero_coeffs(d, 2 * n);
  for (int k = 0; k <= d; ++k) {
    const auto& qk = rep.q_pencil.coefficient(k);
    auto& dst = q[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        dst(n + i, j) = qk(i, j);
        dst(j, n + i) = std::conj(qk(i, j));
      }
  }
  out.q_pencil = LinearPencil(d, std::move(q));
  return out;
}

LinearPencil bordered_pencil(const LinearRepresentation& rep) {
  const int d = rep.q_pencil.num_vars();
  const std::size_t n = rep.q_pencil.size();
  auto coeffs = zero_coeffs(d, n + 1);
  for (std::size_t j = 0; j < n; ++j) {
    coeffs[0](0, 1 + j) = rep.u(0, j);
    coeffs[0](1 + j, 0) = rep.v(j, 0);
  }
  for (int k = 0; k <= d; ++k)
    coeffs[static_cast<std::size_t>(k)].set_block(1, 1, rep.q_pencil.coefficient(k));
  return LinearPencil(d, std::move(coeffs));
}

double schur_check(const LinearRepresentation& rep, const ExprPtr& r,
                   std::span<const ComplexMatrix> X) {
  const std::size_t N = X.empty() ? 1 : X[0].rows();
  std::vector<ComplexMatrix> tuple(X.begin(), X.end());
  // align the tuple with the pencil's variable count
  while (static_cast<int>(tuple.size()) < rep.q_pencil.num_vars())
    tuple.push_back(ComplexMatrix(N, N));
  tuple.resize(static_cast<std::size_t>(rep.q_pencil.num_vars()), ComplexMatrix(N, N));

  ComplexMatrix rx = evaluate(r, tuple);
  ComplexMatrix qx = rep.q_pencil.evaluate(tuple);
  ComplexMatrix qinv;
  try {
    qinv = solve_inverse(qx);
  } catch (const SingularMatrixError&) {
    throw Error("schur_check: q(X) singular although r(X) is defined (representation bug)");
  }
  ComplexMatrix uamp = ComplexMatrix::kron(rep.u, ComplexMatrix::identity(N));
  ComplexMatrix vamp = ComplexMatrix::kron(rep.v, ComplexMatrix::identity(N));
  ComplexMatrix resid = rx + uamp * qinv * vamp;
  return operator_norm(resid);
}

double pencil_schur_residual(const LinearPencil& pencil, const NCPolynomial& p,
                             std::span<const ComplexMatrix> X, Complex z) {
  const std::size_t N = X.empty() ? 1 : X[0].rows();
  ComplexMatrix big = pencil.evaluate(X);
  ComplexMatrix lambda(big.rows(), big.cols());
  for (std::size_t t = 0; t < N; ++t) lambda(t, t) = z;
  ComplexMatrix corner = solve_inverse(lambda - big).block(0, 0, N, N);
  ComplexMatrix direct = solve_inverse(ComplexMatrix::scalar(N, z) - p.evaluate(X));
  return operator_norm(corner - direct);
}

}  // namespace ncdist

#include "ncdist/freeness_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace ncdist {

namespace {

constexpr int kPairingCap = 16;
constexpr int kPartitionCap = 10;
constexpr int kWordCap = 8;

void check_partition(const NCPartition& pi) {
  std::vector<char> seen(static_cast<std::size_t>(pi.n) + 1, 0);
  for (const auto& b : pi.blocks) {
    if (b.empty()) throw ConfigError("NCPartition: empty block");
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (b[k] < 1 || b[k] > pi.n || seen[static_cast<std::size_t>(b[k])])
        throw ConfigError("NCPartition: blocks must disjointly cover 1..n");
      if (k > 0 && b[k] <= b[k - 1]) throw ConfigError("NCPartition: blocks must increase");
      seen[static_cast<std::size_t>(b[k])] = 1;
    }
  }
  for (int i = 1; i <= pi.n; ++i)
    if (!seen[static_cast<std::size_t>(i)]) throw ConfigError("NCPartition: element missing");
}

// first-block recursion over a contiguous index range [lo, hi]
void enumerate_range(int lo, int hi, std::vector<std::vector<int>>& acc,
                     std::vector<NCPartition>& out, int n) {
  if (lo > hi) {
    NCPartition pi{n, acc};
    std::sort(pi.blocks.begin(), pi.blocks.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    out.push_back(std::move(pi));
    return;
  }
  // choose the block of lo: members lo = p_1 < p_2 < ... <= hi; the gaps
  // between consecutive members and the tail are partitioned independently
  std::vector<int> block{lo};
  auto rec = [&](auto&& self, int from) -> void {
    {  // close the block at its current members
      std::vector<std::pair<int, int>> gaps;
      for (std::size_t t = 0; t + 1 < block.size(); ++t)
        if (block[t] + 1 <= block[t + 1] - 1) gaps.emplace_back(block[t] + 1, block[t + 1] - 1);
      const int tail_lo = block.back() + 1;
      auto combine = [&](auto&& cself, std::size_t gi,
                         std::vector<std::vector<int>>& blocks_so_far) -> void {
        if (gi == gaps.size()) {
          const std::size_t mark = acc.size();
          acc.push_back(block);
          for (auto& b : blocks_so_far) acc.push_back(b);
          enumerate_range(tail_lo, hi, acc, out, n);
          acc.resize(mark);
          return;
        }
        std::vector<NCPartition> sub;
        std::vector<std::vector<int>> tmp;
        enumerate_range(gaps[gi].first, gaps[gi].second, tmp, sub, n);
        for (auto& sp : sub) {
          const std::size_t mark = blocks_so_far.size();
          for (auto& b : sp.blocks) blocks_so_far.push_back(b);
          cself(cself, gi + 1, blocks_so_far);
          blocks_so_far.resize(mark);
        }
      };
      std::vector<std::vector<int>> none;
      combine(combine, 0, none);
    }
    for (int p = from; p <= hi; ++p) {
      block.push_back(p);
      self(self, p + 1);
      block.pop_back();
    }
  };
  rec(rec, lo + 1);
}

void enumerate_pairings_range(int lo, int hi, std::vector<std::vector<int>>& acc,
                              std::vector<NCPartition>& out, int n) {
  if (lo > hi) {
    NCPartition pi{n, acc};
    std::sort(pi.blocks.begin(), pi.blocks.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    out.push_back(std::move(pi));
    return;
  }
  for (int j = lo + 1; j <= hi; j += 2) {
    acc.push_back({lo, j});
    // inside (lo, j) and outside (j, hi] are paired independently
    std::vector<NCPartition> inner;
    std::vector<std::vector<int>> tmp;
    enumerate_pairings_range(lo + 1, j - 1, tmp, inner, n);
    for (auto& ip : inner) {
      const std::size_t mark = acc.size();
      for (auto& b : ip.blocks) acc.push_back(b);
      enumerate_pairings_range(j + 1, hi, acc, out, n);
      acc.resize(mark);
    }
    acc.pop_back();
  }
}

}  // namespace

bool is_noncrossing(const NCPartition& pi) {
  check_partition(pi);
  std::vector<int> owner(static_cast<std::size_t>(pi.n) + 1, -1);
  for (std::size_t bi = 0; bi < pi.blocks.size(); ++bi)
    for (int e : pi.blocks[bi]) owner[static_cast<std::size_t>(e)] = static_cast<int>(bi);
  std::vector<int> stack;
  for (int i = 1; i <= pi.n; ++i) {
    const int b = owner[static_cast<std::size_t>(i)];
    if (!stack.empty() && stack.back() == b) {
      if (i == pi.blocks[static_cast<std::size_t>(b)].back()) stack.pop_back();
      continue;
    }
    // a block may only open here; if it appeared before (not on top) it crosses
    if (std::find(stack.begin(), stack.end(), b) != stack.end()) return false;
    if (i != pi.blocks[static_cast<std::size_t>(b)].front()) return false;
    if (i != pi.blocks[static_cast<std::size_t>(b)].back()) stack.push_back(b);
  }
  return true;
}

std::vector<NCPartition> enumerate_nc(int n, bool pairings_only) {
  if (n < 1) throw ConfigError("enumerate_nc: n must be positive");
  if (pairings_only) {
    if (n > kPairingCap) throw CapError("enumerate_nc: pairing size exceeds cap 16");
    if (n % 2 != 0) return {};
    std::vector<NCPartition> out;
    std::vector<std::vector<int>> acc;
    enumerate_pairings_range(1, n, acc, out, n);
    return out;
  }
  if (n > kPartitionCap) throw CapError("enumerate_nc: partition size exceeds cap 10");
  std::vector<NCPartition> out;
  std::vector<std::vector<int>> acc;
  enumerate_range(1, n, acc, out, n);
  return out;
}

CovarianceMap CovarianceMap::explicit_list(std::vector<ComplexMatrix> coeffs) {
  if (coeffs.empty()) throw ConfigError("CovarianceMap: empty coefficient list");
  const std::size_t n = coeffs[0].rows();
  for (const auto& c : coeffs) {
    if (!c.is_square() || c.rows() != n)
      throw ConfigError("CovarianceMap: coefficients must be square of equal size");
    if (!c.is_hermitian(1e-10))
      throw ConfigError("CovarianceMap: explicit coefficients must be Hermitian");
  }
  CovarianceMap m;
  m.dim_ = n;
  m.coeffs_ = std::move(coeffs);
  return m;
}

CovarianceMap CovarianceMap::linear_action(std::size_t dim, ComplexMatrix action) {
  if (action.rows() != dim * dim || action.cols() != dim * dim)
    throw ConfigError("CovarianceMap: action must be dim^2 x dim^2");
  CovarianceMap m;
  m.dim_ = dim;
  m.action_ = std::move(action);

  // Choi positivity: C[(i,k),(j,l)] = eta(E_ij)_{kl} must be psd.
  ComplexMatrix choi(dim * dim, dim * dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      ComplexMatrix eij(dim, dim);
      eij(i, j) = 1.0;
      ComplexMatrix img = m.apply(eij);
      for (std::size_t k = 0; k < dim; ++k)
        for (std::size_t l = 0; l < dim; ++l) choi(i * dim + k, j * dim + l) = img(k, l);
    }
  const double lo = min_eigenvalue(real_part(choi));
  if (lo < -1e-10 * std::max(1.0, choi.max_abs()))
    throw ConfigError("CovarianceMap: linear action is not completely positive");
  return m;
}

CovarianceMap CovarianceMap::scalar(double variance) {
  if (variance <= 0.0) throw ConfigError("CovarianceMap: variance must be positive");
  std::vector<ComplexMatrix> c{ComplexMatrix(1, 1, {std::sqrt(variance)})};
  return explicit_list(std::move(c));
}

ComplexMatrix CovarianceMap::apply(const ComplexMatrix& b) const {
  if (!b.is_square() || b.rows() % dim_ != 0)
    throw DimensionError("CovarianceMap::apply: size must be a multiple of dim");
  const std::size_t m = b.rows() / dim_;
  if (m == 1) {
    if (!coeffs_.empty()) {
      ComplexMatrix acc(dim_, dim_);
      for (const auto& c : coeffs_) acc += c * b * c;
      return acc;
    }
    // row-stacked vec
    ComplexMatrix out(dim_, dim_);
    for (std::size_t r = 0; r < dim_ * dim_; ++r) {
      Complex s = 0.0;
      for (std::size_t c = 0; c < dim_ * dim_; ++c)
        s += action_(r, c) * b(c / dim_, c % dim_);
      out(r / dim_, r % dim_) = s;
    }
    return out;
  }
  // amplification id_m (x) eta acts on each dim x dim block
  ComplexMatrix out(b.rows(), b.cols());
  for (std::size_t bi = 0; bi < m; ++bi)
    for (std::size_t bj = 0; bj < m; ++bj)
      out.set_block(bi * dim_, bj * dim_, apply(b.block(bi * dim_, bj * dim_, dim_, dim_)));
  return out;
}

double CovarianceMap::norm_bound() const {
  if (!coeffs_.empty()) {
    double s = 0.0;
    for (const auto& c : coeffs_) {
      const double n = operator_norm(c);
      s += n * n;
    }
    return s;
  }
  return operator_norm(action_);
}

CovarianceMap CovarianceMap::operator+(const CovarianceMap& other) const {
  if (dim_ != other.dim_) throw DimensionError("CovarianceMap: dimension mismatch in sum");
  if (!coeffs_.empty() && !other.coeffs_.empty()) {
    std::vector<ComplexMatrix> all = coeffs_;
    all.insert(all.end(), other.coeffs_.begin(), other.coeffs_.end());
    return explicit_list(std::move(all));
  }
  // fall back to summing linear actions; a sum of cp maps needs no re-check
  auto to_action = [](const CovarianceMap& m) {
    ComplexMatrix a(m.dim_ * m.dim_, m.dim_ * m.dim_);
    for (std::size_t i = 0; i < m.dim_; ++i)
      for (std::size_t j = 0; j < m.dim_; ++j) {
        ComplexMatrix eij(m.dim_, m.dim_);
        eij(i, j) = 1.0;
        ComplexMatrix img = m.apply(eij);
        for (std::size_t k = 0; k < m.dim_; ++k)
          for (std::size_t l = 0; l < m.dim_; ++l) a(k * m.dim_ + l, i * m.dim_ + j) = img(k, l);
      }
    return a;
  };
  CovarianceMap out;
  out.dim_ = dim_;
  out.action_ = to_action(*this) + to_action(other);
  return out;
}

namespace {

// shared token-list reduction behind eta_pi and kappa_pi: strips the leftmost
// interval block, feeds its inner constants to the block map, splices the
// value back into the surrounding word
struct Token {
  bool is_point = false;
  int point = 0;        // original 1-based position
  ComplexMatrix mat;    // when !is_point
};

using BlockFn = std::function<ComplexMatrix(std::span<const ComplexMatrix>)>;

ComplexMatrix multiplicative_map(const NCPartition& pi, const BlockFn& block_value,
                                 std::size_t dim, std::span<const ComplexMatrix> interleaved) {
  if (static_cast<int>(interleaved.size()) + 1 != pi.n)
    throw DimensionError("multiplicative_map: needs n-1 interleaved matrices");
  for (const auto& c : interleaved)
    if (!c.is_square() || c.rows() != dim)
      throw DimensionError("multiplicative_map: interleaved size mismatch");

  std::vector<int> owner(static_cast<std::size_t>(pi.n) + 1, -1);
  for (std::size_t bi = 0; bi < pi.blocks.size(); ++bi)
    for (int e : pi.blocks[bi]) owner[static_cast<std::size_t>(e)] = static_cast<int>(bi);

  std::vector<Token> toks;
  for (int p = 1; p <= pi.n; ++p) {
    toks.push_back({true, p, {}});
    if (p < pi.n) toks.push_back({false, 0, interleaved[static_cast<std::size_t>(p - 1)]});
  }

  std::vector<char> done(pi.blocks.size(), 0);
  std::size_t blocks_left = pi.blocks.size();
  while (blocks_left > 0) {
    // leftmost block whose points are all currently adjacent
    bool progressed = false;
    for (std::size_t start = 0; start < toks.size() && !progressed; ++start) {
      if (!toks[start].is_point) continue;
      const int b = owner[static_cast<std::size_t>(toks[start].point)];
      if (done[static_cast<std::size_t>(b)]) continue;
      const auto& block = pi.blocks[static_cast<std::size_t>(b)];
      if (toks[start].point != block.front()) continue;
      // try to match the whole block consecutively from here
      std::size_t pos = start;
      std::vector<ComplexMatrix> inner;
      bool match = true;
      for (std::size_t k = 1; k < block.size(); ++k) {
        ComplexMatrix between = ComplexMatrix::identity(dim);
        std::size_t q = pos + 1;
        bool sawmat = false;
        while (q < toks.size() && !toks[q].is_point) {
          between = sawmat ? between * toks[q].mat : toks[q].mat;
          sawmat = true;
          ++q;
        }
        if (q >= toks.size() || toks[q].point != block[k]) {
          match = false;
          break;
        }
        inner.push_back(between);
        pos = q;
      }
      if (!match) continue;
      ComplexMatrix value =
          block.size() == 1 ? block_value({}) : block_value(std::span<const ComplexMatrix>(inner));
      // splice [start..pos] -> Mat(value)
      std::vector<Token> next(toks.begin(), toks.begin() + static_cast<std::ptrdiff_t>(start));
      next.push_back({false, 0, std::move(value)});
      next.insert(next.end(), toks.begin() + static_cast<std::ptrdiff_t>(pos + 1), toks.end());
      toks = std::move(next);
      done[static_cast<std::size_t>(b)] = 1;
      --blocks_left;
      progressed = true;
    }
    if (!progressed)
      throw Error("multiplicative_map: no interval block found (crossing partition?)");
  }
  ComplexMatrix acc = ComplexMatrix::identity(dim);
  for (const auto& t : toks) acc = acc * t.mat;
  return acc;
}

}  // namespace

ComplexMatrix eta_pi(const NCPartition& pairing, const CovarianceMap& eta,
                     std::span<const ComplexMatrix> b) {
  check_partition(pairing);
  for (const auto& blk : pairing.blocks)
    if (blk.size() != 2) throw ConfigError("eta_pi: partition is not a pairing");
  if (!is_noncrossing(pairing)) throw ConfigError("eta_pi: pairing is crossing");
  return multiplicative_map(
      pairing,
      [&eta](std::span<const ComplexMatrix> inner) {
        return eta.apply(inner.empty() ? ComplexMatrix::identity(eta.dim()) : inner[0]);
      },
      eta.dim(), b);
}

ComplexMatrix semicircular_moment(const CovarianceMap& eta, std::span<const ComplexMatrix> b) {
  const int k = static_cast<int>(b.size()) + 1;
  if (k > 12) throw CapError("semicircular_moment: order exceeds cap 12");
  if (k % 2 != 0) return ComplexMatrix(eta.dim(), eta.dim());
  ComplexMatrix acc(eta.dim(), eta.dim());
  for (const auto& pi : enumerate_nc(k, true)) acc += eta_pi(pi, eta, b);
  return acc;
}

ComplexMatrix free_cumulant(const MomentFn& moments, std::size_t dim,
                            std::span<const ComplexMatrix> inner) {
  const int n = static_cast<int>(inner.size()) + 1;
  if (n > kWordCap) throw CapError("free_cumulant: order exceeds cap 8");
  if (n == 1) return moments({});
  ComplexMatrix acc = moments(inner);
  const BlockFn self = [&moments, dim](std::span<const ComplexMatrix> in) {
    return free_cumulant(moments, dim, in);
  };
  for (const auto& pi : enumerate_nc(n, false)) {
    if (pi.blocks.size() == 1) continue;  // the full block is the unknown
    acc -= multiplicative_map(pi, self, dim, inner);
  }
  return acc;
}

ScalarLiftedVariable::ScalarLiftedVariable(ComplexMatrix coeff, std::vector<double> scalar_cumulants)
    : coeff_(std::move(coeff)), kappa_(std::move(scalar_cumulants)) {
  if (!coeff_.is_square()) throw ConfigError("ScalarLiftedVariable: coefficient must be square");
}

ComplexMatrix ScalarLiftedVariable::cumulant(std::span<const ComplexMatrix> inner) const {
  const std::size_t m = inner.size() + 1;
  if (m > kappa_.size())
    throw CapError("ScalarLiftedVariable: cumulant order beyond precomputed table");
  const double km = kappa_[m - 1];
  const std::size_t n = dim();
  if (km == 0.0) return ComplexMatrix(n, n);
  ComplexMatrix acc = coeff_;
  for (const auto& c : inner) acc = acc * c * coeff_;
  return Complex(km) * acc;
}

MomentDefinedVariable::MomentDefinedVariable(MomentFn moments, std::size_t dim)
    : moments_(std::move(moments)), dim_(dim) {}

ComplexMatrix MomentDefinedVariable::cumulant(std::span<const ComplexMatrix> inner) const {
  return free_cumulant(moments_, dim_, inner);
}

ComplexMatrix mixed_moment_free(std::span<const FreeVariable* const> vars,
                                std::span<const int> word,
                                std::span<const ComplexMatrix> interleaved) {
  const int k = static_cast<int>(word.size());
  if (k == 0) throw ConfigError("mixed_moment_free: empty word");
  if (k > kWordCap) throw CapError("mixed_moment_free: word length exceeds cap 8");
  if (interleaved.size() + 1 != word.size())
    throw DimensionError("mixed_moment_free: needs word.size()-1 interleaved matrices");
  const std::size_t dim = vars.empty() ? 1 : vars[0]->dim();
  for (int w : word)
    if (w < 0 || w >= static_cast<int>(vars.size()))
      throw ConfigError("mixed_moment_free: word label out of range");

  // memoized moment of the subword [a, b] (inclusive letter indices)
  std::vector<std::vector<std::optional<ComplexMatrix>>> memo(
      word.size(), std::vector<std::optional<ComplexMatrix>>(word.size()));

  auto eval = [&](auto&& self, int a, int b) -> ComplexMatrix {
    if (a > b) return ComplexMatrix::identity(dim);
    auto& slot = memo[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
    if (slot) return *slot;
    ComplexMatrix acc(dim, dim);
    const int label = word[static_cast<std::size_t>(a)];
    // enumerate the block of the first letter: a = p_1 < ... < p_s <= b with
    // matching labels
    std::vector<int> block{a};
    auto rec = [&](auto&& rself, int from) -> void {
      // close the block here
      {
        std::vector<ComplexMatrix> args;
        for (std::size_t t = 0; t + 1 < block.size(); ++t) {
          const int p = block[t], q = block[t + 1];
          if (q == p + 1) {
            args.push_back(interleaved[static_cast<std::size_t>(p)]);
          } else {
            ComplexMatrix gap = self(self, p + 1, q - 1);
            args.push_back(interleaved[static_cast<std::size_t>(p)] * gap *
                           interleaved[static_cast<std::size_t>(q - 1)]);
          }
        }
        ComplexMatrix kap = vars[static_cast<std::size_t>(label)]->cumulant(
            std::span<const ComplexMatrix>(args));
        const int last = block.back();
        if (last < b)
          kap = kap * interleaved[static_cast<std::size_t>(last)] * self(self, last + 1, b);
        acc += kap;
      }
      for (int p = from; p <= b; ++p) {
        if (word[static_cast<std::size_t>(p)] != label) continue;
        block.push_back(p);
        rself(rself, p + 1);
        block.pop_back();
      }
    };
    rec(rec, a + 1);
    slot = acc;
    return acc;
  };
  return eval(eval, 0, k - 1);
}

std::vector<ComplexMatrix> pencil_moments(const ComplexMatrix& b0,
                                          std::span<const ComplexMatrix> coeffs,
                                          std::span<const std::vector<double>> scalar_cumulants,
                                          int max_order) {
  if (max_order < 0 || max_order > kWordCap)
    throw CapError("pencil_moments: order exceeds cap 8");
  if (coeffs.size() != scalar_cumulants.size())
    throw DimensionError("pencil_moments: one cumulant table per coefficient");
  const std::size_t n = b0.rows();

  std::vector<ScalarLiftedVariable> lifted;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    std::vector<double> kap = scalar_cumulants[k];
    kap.resize(static_cast<std::size_t>(std::max(max_order, 1)), 0.0);
    lifted.emplace_back(coeffs[k], std::move(kap));
  }
  // the constant b0 enters as a variable whose only cumulant is kappa_1 = b0
  std::vector<double> shift_kappa(static_cast<std::size_t>(std::max(max_order, 1)), 0.0);
  shift_kappa[0] = 1.0;
  ScalarLiftedVariable shift(b0, shift_kappa);
  std::vector<const FreeVariable*> vars;
  for (const auto& v : lifted) vars.push_back(&v);
  vars.push_back(&shift);
  const int m = static_cast<int>(vars.size());

  std::vector<ComplexMatrix> out;
  out.push_back(ComplexMatrix::identity(n));
  for (int j = 1; j <= max_order; ++j) {
    ComplexMatrix acc(n, n);
    std::vector<int> word(static_cast<std::size_t>(j), 0);
    std::vector<ComplexMatrix> inter(static_cast<std::size_t>(j - 1),
                                     ComplexMatrix::identity(n));
    long total = 1;
    for (int t = 0; t < j; ++t) total *= m;
    for (long code = 0; code < total; ++code) {
      long c = code;
      for (int t = 0; t < j; ++t) {
        word[static_cast<std::size_t>(t)] = static_cast<int>(c % m);
        c /= m;
      }
      acc += mixed_moment_free(vars, word, inter);
    }
    out.push_back(std::move(acc));
  }
  return out;
}

std::vector<double> atomic_scalar_moments(std::span<const std::pair<double, double>> wt, int K) {
  std::vector<double> m(static_cast<std::size_t>(K) + 1, 0.0);
  for (int k = 0; k <= K; ++k) {
    double s = 0.0;
    for (const auto& [w, t] : wt) s += w * std::pow(t, k);
    m[static_cast<std::size_t>(k)] = s;
  }
  return m;
}

std::vector<double> semicircular_scalar_moments(double variance, int K) {
  std::vector<double> m(static_cast<std::size_t>(K) + 1, 0.0);
  m[0] = 1.0;
  // Catalan recursion c_{k+1} = c_k * 2(2k+1)/(k+2)
  double catalan = 1.0;
  for (int j = 1; 2 * j <= K; ++j) {
    catalan = catalan * 2.0 * (2.0 * j - 1.0) / (j + 1.0);
    m[static_cast<std::size_t>(2 * j)] = catalan * std::pow(variance, j);
  }
  return m;
}

namespace {

// [z^t] M(z)^s for the series M with coefficients m[0..K]
std::vector<double> series_power(const std::vector<double>& m, int s, int K) {
  std::vector<double> p(static_cast<std::size_t>(K) + 1, 0.0);
  p[0] = 1.0;
  for (int rep = 0; rep < s; ++rep) {
    std::vector<double> q(static_cast<std::size_t>(K) + 1, 0.0);
    for (int i = 0; i <= K; ++i) {
      if (p[static_cast<std::size_t>(i)] == 0.0) continue;
      for (int j = 0; i + j <= K; ++j)
        q[static_cast<std::size_t>(i + j)] +=
            p[static_cast<std::size_t>(i)] * m[static_cast<std::size_t>(j)];
    }
    p = std::move(q);
  }
  return p;
}

}  // namespace

std::vector<double> scalar_cumulants_from_moments(std::span<const double> m) {
  const int K = static_cast<int>(m.size()) - 1;
  std::vector<double> mm(m.begin(), m.end());
  std::vector<double> kappa(static_cast<std::size_t>(K) + 1, 0.0);
  // m_n = sum_{s=1..n} kappa_s [z^{n-s}] M(z)^s
  std::vector<std::vector<double>> pw(static_cast<std::size_t>(K) + 1);
  for (int s = 1; s <= K; ++s) pw[static_cast<std::size_t>(s)] = series_power(mm, s, K);
  for (int n = 1; n <= K; ++n) {
    double rest = 0.0;
    for (int s = 1; s < n; ++s)
      rest += kappa[static_cast<std::size_t>(s)] *
              pw[static_cast<std::size_t>(s)][static_cast<std::size_t>(n - s)];
    kappa[static_cast<std::size_t>(n)] = mm[static_cast<std::size_t>(n)] - rest;
  }
  return {kappa.begin() + 1, kappa.end()};
}

std::vector<double> scalar_moments_from_cumulants(std::span<const double> kappa) {
  const int K = static_cast<int>(kappa.size());
  std::vector<double> m(static_cast<std::size_t>(K) + 1, 0.0);
  m[0] = 1.0;
  for (int n = 1; n <= K; ++n) {
    double s_acc = 0.0;
    for (int s = 1; s <= n; ++s) {
      // [z^{n-s}] M(z)^s using coefficients known so far (degrees < n suffice)
      const auto p = series_power(m, s, n - s);
      s_acc += kappa[static_cast<std::size_t>(s - 1)] * p[static_cast<std::size_t>(n - s)];
    }
    m[static_cast<std::size_t>(n)] = s_acc;
  }
  return m;
}

}  // namespace ncdist

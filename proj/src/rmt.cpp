#include "ncdist/rmt.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace ncdist {

namespace {

const Complex kI(0.0, 1.0);

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

void parallel_rows(std::size_t rows, int workers, const std::function<void(std::size_t, std::size_t)>& body) {
  static const int hw = std::max(1u, std::thread::hardware_concurrency());
  int n = workers > 0 ? workers : hw;
  n = std::max(1, std::min<int>(n, static_cast<int>(rows)));
  if (n == 1 || rows < 64) {
    body(0, rows);
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < n; ++w) {
    const std::size_t lo = rows * static_cast<std::size_t>(w) / static_cast<std::size_t>(n);
    const std::size_t hi = rows * (static_cast<std::size_t>(w) + 1) / static_cast<std::size_t>(n);
    pool.emplace_back(body, lo, hi);
  }
  for (auto& t : pool) t.join();
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(seed ^ mix64(stream * 0x9e3779b97f4a7c15ull + 0x6a09e667f3bcc909ull))) {}

std::uint64_t CounterRng::next_u64() {
  return mix64(key_ ^ (0x9e3779b97f4a7c15ull * ++counter_));
}

double CounterRng::uniform() {
  // (0,1): never exactly 0 so logs are safe
  return (static_cast<double>(next_u64() >> 11) + 0.5) / 9007199254740992.0;
}

double CounterRng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u = uniform(), v = uniform();
  const double r = std::sqrt(-2.0 * std::log(u));
  spare_ = r * std::sin(2.0 * M_PI * v);
  have_spare_ = true;
  return r * std::cos(2.0 * M_PI * v);
}

ComplexMatrix sample_gue(std::size_t N, std::uint64_t seed, std::uint64_t stream) {
  if (N < 1) throw ConfigError("sample_gue: N must be >= 1");
  CounterRng rng(seed, stream);
  ComplexMatrix a(N, N);
  const double off_sigma = 1.0 / std::sqrt(2.0 * static_cast<double>(N));
  const double diag_sigma = 1.0 / std::sqrt(static_cast<double>(N));
  for (std::size_t i = 0; i < N; ++i) {
    a(i, i) = diag_sigma * rng.gaussian();
    for (std::size_t j = i + 1; j < N; ++j) {
      const Complex z(off_sigma * rng.gaussian(), off_sigma * rng.gaussian());
      a(i, j) = z;
      a(j, i) = std::conj(z);
    }
  }
  return a;
}

ComplexMatrix sample_haar_unitary(std::size_t N, std::uint64_t seed, std::uint64_t stream) {
  if (N < 1) throw ConfigError("sample_haar_unitary: N must be >= 1");
  CounterRng rng(seed, stream);
  // complex Ginibre, then modified Gram-Schmidt with one reorthogonalization
  // pass; the R diagonal is positive by construction, which is exactly the
  // convention that makes Q Haar distributed
  std::vector<std::vector<Complex>> cols(N, std::vector<Complex>(N));
  for (std::size_t j = 0; j < N; ++j)
    for (std::size_t i = 0; i < N; ++i) cols[j][i] = Complex(rng.gaussian(), rng.gaussian());

  for (std::size_t j = 0; j < N; ++j) {
    auto& q = cols[j];
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        const auto& qk = cols[k];
        Complex proj = 0.0;
        for (std::size_t i = 0; i < N; ++i) proj += std::conj(qk[i]) * q[i];
        for (std::size_t i = 0; i < N; ++i) q[i] -= proj * qk[i];
      }
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < N; ++i) norm += std::norm(q[i]);
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < N; ++i) q[i] /= norm;
  }
  ComplexMatrix u(N, N);
  for (std::size_t j = 0; j < N; ++j)
    for (std::size_t i = 0; i < N; ++i) u(i, j) = cols[j][i];
  return u;
}

namespace {

std::vector<double> diagonal_atoms(const std::vector<FreeVariableSpec::Atom>& atoms,
                                   std::size_t N) {
  if (atoms.empty()) throw ConfigError("diagonal ensemble: no atoms");
  // largest-remainder apportionment so the multiplicities sum to N
  std::vector<std::size_t> counts(atoms.size());
  std::vector<std::pair<double, std::size_t>> rema;
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const double exact = atoms[k].weight * static_cast<double>(N);
    counts[k] = static_cast<std::size_t>(exact);
    assigned += counts[k];
    rema.emplace_back(exact - std::floor(exact), k);
  }
  std::sort(rema.rbegin(), rema.rend());
  for (std::size_t r = 0; assigned < N; ++r, ++assigned) counts[rema[r % rema.size()].second]++;
  std::vector<double> d;
  d.reserve(N);
  for (std::size_t k = 0; k < atoms.size(); ++k)
    d.insert(d.end(), counts[k], atoms[k].position);
  return d;
}

}  // namespace

ComplexMatrix realize_ensemble(const EnsembleSpec& spec, std::uint64_t trial) {
  const std::uint64_t stream = mix64(trial + 0x100 * spec.seed + 1);
  switch (spec.kind) {
    case EnsembleSpec::Kind::gue:
      return sample_gue(spec.size, spec.seed, stream);
    case EnsembleSpec::Kind::deterministic_diagonal: {
      auto d = diagonal_atoms(spec.atoms, spec.size);
      ComplexMatrix m(spec.size, spec.size);
      for (std::size_t i = 0; i < spec.size; ++i) m(i, i) = d[i];
      return m;
    }
    case EnsembleSpec::Kind::haar_conjugated_diagonal: {
      auto d = diagonal_atoms(spec.atoms, spec.size);
      ComplexMatrix u = sample_haar_unitary(spec.size, spec.seed, stream);
      ComplexMatrix m(spec.size, spec.size);
      // u diag(d) u*
      for (std::size_t i = 0; i < spec.size; ++i)
        for (std::size_t j = 0; j < spec.size; ++j) {
          Complex s = 0.0;
          for (std::size_t k = 0; k < spec.size; ++k)
            s += u(i, k) * d[k] * std::conj(u(j, k));
          m(i, j) = s;
        }
      return m;
    }
  }
  throw ConfigError("realize_ensemble: unknown kind");
}

std::vector<double> hermitian_spectrum(const ComplexMatrix& a, int workers) {
  if (!a.is_square()) throw DimensionError("hermitian_spectrum: matrix must be square");
  const std::size_t N = a.rows();
  if (N == 0) return {};
  if (N == 1) return {a(0, 0).real()};

  // work on the Hermitian average
  std::vector<Complex> m(N * N);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      m[i * N + j] = 0.5 * (a(i, j) + std::conj(a(j, i)));

  std::vector<double> d(N), e(N > 1 ? N - 1 : 0);
  std::vector<Complex> v(N), p(N), w(N);

  for (std::size_t k = 0; k + 2 < N; ++k) {
    const std::size_t mlen = N - k - 1;
    Complex* col = &m[(k + 1) * N + k];
    double sigma = 0.0;
    for (std::size_t i = 0; i < mlen; ++i) sigma += std::norm(col[i * N]);
    const Complex alpha = col[0];
    const double anorm = std::sqrt(sigma);
    d[k] = m[k * N + k].real();
    if (anorm < 1e-300) {
      e[k] = 0.0;
      continue;
    }
    const Complex phase = std::abs(alpha) > 0.0 ? alpha / std::abs(alpha) : Complex(1.0);
    // v = x + phase*|x| e1; H = 1 - tau v v* sends x to -phase |x| e1
    for (std::size_t i = 0; i < mlen; ++i) v[i] = col[i * N];
    v[0] += phase * anorm;
    double vnorm2 = 0.0;
    for (std::size_t i = 0; i < mlen; ++i) vnorm2 += std::norm(v[i]);
    const double tau = 2.0 / vnorm2;

    // p = tau * B v on the trailing block B = m[k+1.., k+1..]
    Complex* base = &m[(k + 1) * N + (k + 1)];
    parallel_rows(mlen, workers, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        const Complex* row = base + i * N;
        Complex s = 0.0;
        for (std::size_t j = 0; j < mlen; ++j) s += row[j] * v[j];
        p[i] = tau * s;
      }
    });
    Complex vp = 0.0;
    for (std::size_t i = 0; i < mlen; ++i) vp += std::conj(v[i]) * p[i];
    const Complex kappa = 0.5 * tau * vp;
    for (std::size_t i = 0; i < mlen; ++i) w[i] = p[i] - kappa * v[i];

    // B <- B - v w* - w v*
    parallel_rows(mlen, workers, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        Complex* row = base + i * N;
        const Complex vi = v[i], wi = w[i];
        for (std::size_t j = 0; j < mlen; ++j)
          row[j] -= vi * std::conj(w[j]) + wi * std::conj(v[j]);
      }
    });
    e[k] = anorm;  // |new off-diagonal|; the phases are a diagonal similarity
  }
  d[N - 2] = m[(N - 2) * N + (N - 2)].real();
  d[N - 1] = m[(N - 1) * N + (N - 1)].real();
  e[N - 2] = std::abs(m[(N - 1) * N + (N - 2)]);

  // implicit-shift QL on the real tridiagonal (d, e), eigenvalues only
  std::vector<double> sub(N, 0.0);
  for (std::size_t i = 0; i + 1 < N; ++i) sub[i] = e[i];
  for (std::size_t l = 0; l < N; ++l) {
    int iter = 0;
    std::size_t mm;
    do {
      for (mm = l; mm + 1 < N; ++mm) {
        const double dd = std::abs(d[mm]) + std::abs(d[mm + 1]);
        if (std::abs(sub[mm]) <= 1e-15 * dd) break;
      }
      if (mm != l) {
        if (++iter > 60) throw ConvergenceError("hermitian_spectrum: QL failed", sub[l], iter);
        double g = (d[l + 1] - d[l]) / (2.0 * sub[l]);
        double r = std::hypot(g, 1.0);
        g = d[mm] - d[l] + sub[l] / (g + (g >= 0.0 ? r : -r));
        double s = 1.0, c = 1.0, p = 0.0;
        bool underflow = false;
        for (std::size_t i1 = mm; i1-- > l;) {
          double f = s * sub[i1];
          const double b = c * sub[i1];
          r = std::hypot(f, g);
          sub[i1 + 1] = r;
          if (r == 0.0) {
            d[i1 + 1] -= p;
            sub[mm] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i1 + 1] - p;
          r = (d[i1] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i1 + 1] = g + p;
          g = c * r - b;
        }
        if (underflow) continue;
        d[l] -= p;
        sub[l] = g;
        sub[mm] = 0.0;
      }
    } while (mm != l);
  }
  std::vector<double> ev(d.begin(), d.end());
  std::sort(ev.begin(), ev.end());
  return ev;
}

namespace {

Histogram build_histogram(std::vector<double> samples, int aborted) {
  Histogram h;
  std::sort(samples.begin(), samples.end());
  h.total = samples.size();
  h.aborted_trials = aborted;
  if (samples.empty()) {
    h.samples = std::move(samples);
    return h;
  }
  const double lo = samples.front(), hi = samples.back();
  // Freedman-Diaconis width from the interquartile range
  const double q1 = samples[samples.size() / 4];
  const double q3 = samples[(3 * samples.size()) / 4];
  double width = 2.0 * (q3 - q1) / std::cbrt(static_cast<double>(samples.size()));
  if (width <= 0.0) width = (hi - lo > 0.0 ? (hi - lo) / 50.0 : 1.0);
  std::size_t nbins = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil((hi - lo) / width)));
  nbins = std::min<std::size_t>(nbins, 100000);
  h.bin_edges.resize(nbins + 1);
  for (std::size_t k = 0; k <= nbins; ++k)
    h.bin_edges[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(nbins);
  h.bin_edges.back() = hi;
  h.counts.assign(nbins, 0);
  for (double x : samples) {
    std::size_t bin = static_cast<std::size_t>((x - lo) / (hi - lo) * static_cast<double>(nbins));
    if (bin >= nbins) bin = nbins - 1;
    ++h.counts[bin];
  }
  h.samples = std::move(samples);
  return h;
}

}  // namespace

std::vector<double> Histogram::density_values() const {
  std::vector<double> v(counts.size(), 0.0);
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double w = bin_edges[k + 1] - bin_edges[k];
    if (w > 0.0 && total > 0)
      v[k] = static_cast<double>(counts[k]) / (static_cast<double>(total) * w);
  }
  return v;
}

Histogram assemble_and_spectrum(const SpectralModel& model,
                                std::span<const EnsembleSpec> ensembles, int trials,
                                int workers) {
  if (trials < 1) throw ConfigError("assemble_and_spectrum: trials must be >= 1");
  if (ensembles.empty()) throw ConfigError("assemble_and_spectrum: no ensembles");
  const std::size_t N = ensembles[0].size;
  for (const auto& e : ensembles)
    if (e.size != N) throw ConfigError("assemble_and_spectrum: ensemble sizes differ");

  std::vector<double> samples;
  int aborted = 0;
  for (int t = 0; t < trials; ++t) {
    std::vector<ComplexMatrix> X;
    X.reserve(ensembles.size());
    for (const auto& es : ensembles) X.push_back(realize_ensemble(es, static_cast<std::uint64_t>(t)));
    ComplexMatrix value;
    try {
      if (const ExprPtr* e = std::get_if<ExprPtr>(&model)) {
        value = evaluate(*e, X);
      } else {
        value = std::get<LinearPencil>(model).evaluate(X);
      }
    } catch (const EvaluationError&) {
      ++aborted;
      continue;
    }
    auto ev = hermitian_spectrum(value, workers);
    samples.insert(samples.end(), ev.begin(), ev.end());
  }
  return build_histogram(std::move(samples), aborted);
}

double ks_distance(const Histogram& h, const SpectralDensity& d) {
  if (h.samples.empty() || d.grid.size() < 2)
    throw ConfigError("ks_distance: empty histogram or density");
  // CDF of the density by cumulative trapezoid, normalized by its mass
  std::vector<double> cdf(d.grid.size(), 0.0);
  for (std::size_t k = 1; k < d.grid.size(); ++k)
    cdf[k] = cdf[k - 1] +
             0.5 * (d.values[k] + d.values[k - 1]) * (d.grid[k] - d.grid[k - 1]);
  const double mass = cdf.back();
  if (mass <= 0.0) throw ConfigError("ks_distance: density has no mass");
  for (double& c : cdf) c /= mass;

  auto density_cdf = [&](double x) {
    if (x <= d.grid.front()) return 0.0;
    if (x >= d.grid.back()) return 1.0;
    const auto it = std::upper_bound(d.grid.begin(), d.grid.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - d.grid.begin());
    const double t0 = d.grid[k - 1], t1 = d.grid[k];
    const double frac = (x - t0) / (t1 - t0);
    return cdf[k - 1] + frac * (cdf[k] - cdf[k - 1]);
  };

  const double n = static_cast<double>(h.samples.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < h.samples.size(); ++i) {
    const double F = density_cdf(h.samples[i]);
    ks = std::max(ks, std::abs(F - static_cast<double>(i) / n));
    ks = std::max(ks, std::abs(static_cast<double>(i + 1) / n - F));
  }
  return std::min(ks, 1.0);
}

}  // namespace ncdist

#include "ncdist/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace ncdist {

namespace {
const Complex kI(0.0, 1.0);
}

Complex scalar_cauchy(const CauchyEvaluator& pencil_evaluator, Complex z, double eps_pencil,
                      EvalContext* ctx) {
  if (z.imag() <= 0.0) throw ConfigError("scalar_cauchy: Im z must be positive");
  if (eps_pencil <= 0.0) throw ConfigError("scalar_cauchy: eps_pencil must be positive");
  const std::size_t n = pencil_evaluator.base_dim();
  ComplexMatrix lambda = ComplexMatrix::scalar(n, kI * eps_pencil);
  lambda(0, 0) = z;
  return pencil_evaluator.evaluate(lambda, ctx)(0, 0);
}

SpectralDensity invert_stieltjes(const CauchyEvaluator& pencil_evaluator,
                                 std::span<const double> grid, double eps_z, double eps_pencil,
                                 int workers, SolveStats* stats) {
  if (grid.size() < 2) throw ConfigError("invert_stieltjes: grid needs at least 2 points");
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (grid[k] <= grid[k - 1]) throw ConfigError("invert_stieltjes: grid must increase");
  if (eps_z <= 0.0) throw ConfigError("invert_stieltjes: eps_z must be positive");

  SpectralDensity out;
  out.grid.assign(grid.begin(), grid.end());
  out.values.assign(grid.size(), 0.0);
  out.status.assign(grid.size(), {});
  out.eps_z = eps_z;
  out.eps_pencil = eps_pencil;

  static const int hw = std::max(1u, std::thread::hardware_concurrency());
  int nworkers = workers > 0 ? workers : hw;
  nworkers = std::max(1, std::min<int>(nworkers, static_cast<int>(grid.size())));

  std::vector<SolveStats> worker_stats(static_cast<std::size_t>(nworkers));
  auto sweep = [&](int w) {
    // contiguous chunk, swept left to right so the warm starts track the grid
    const std::size_t lo = grid.size() * static_cast<std::size_t>(w) /
                           static_cast<std::size_t>(nworkers);
    const std::size_t hi = grid.size() * (static_cast<std::size_t>(w) + 1) /
                           static_cast<std::size_t>(nworkers);
    EvalContext ctx;
    for (std::size_t k = lo; k < hi; ++k) {
      const long iters_before = ctx.stats.iterations;
      try {
        const Complex g = scalar_cauchy(pencil_evaluator, Complex(grid[k], eps_z), eps_pencil, &ctx);
        out.values[k] = -g.imag() / M_PI;
        out.status[k].converged = true;
      } catch (const ConvergenceError& e) {
        out.status[k].converged = false;
        out.status[k].residual = e.residual;
      } catch (const Error&) {
        // singular intermediate solve etc.; reported as a failed point
        out.status[k].converged = false;
        out.status[k].residual = std::numeric_limits<double>::infinity();
      }
      out.status[k].iterations = ctx.stats.iterations - iters_before;
    }
    worker_stats[static_cast<std::size_t>(w)] = ctx.stats;
  };

  if (nworkers == 1) {
    sweep(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < nworkers; ++w) pool.emplace_back(sweep, w);
    for (auto& t : pool) t.join();
  }
  if (stats)
    for (const auto& ws : worker_stats) stats->merge(ws);

  for (std::size_t k = 0; k < out.values.size(); ++k) {
    if (!out.status[k].converged) {
      ++out.failed_points;
      out.values[k] = 0.0;
      continue;
    }
    out.min_raw_value = std::min(out.min_raw_value, out.values[k]);
    if (out.values[k] < 0.0) out.values[k] = 0.0;
  }

  double mass = 0.0;
  for (std::size_t k = 1; k < out.grid.size(); ++k)
    mass += 0.5 * (out.values[k] + out.values[k - 1]) * (out.grid[k] - out.grid[k - 1]);
  out.mass = mass;
  return out;
}

std::vector<double> moments_from_density(const SpectralDensity& d, int max_order) {
  std::vector<double> m(static_cast<std::size_t>(max_order) + 1, 0.0);
  for (int j = 0; j <= max_order; ++j) {
    double acc = 0.0;
    for (std::size_t k = 1; k < d.grid.size(); ++k) {
      const double fa = std::pow(d.grid[k - 1], j) * d.values[k - 1];
      const double fb = std::pow(d.grid[k], j) * d.values[k];
      acc += 0.5 * (fa + fb) * (d.grid[k] - d.grid[k - 1]);
    }
    m[static_cast<std::size_t>(j)] = acc;
  }
  return m;
}

std::vector<double> uniform_grid(double lo, double hi, int points) {
  if (points < 2 || !(lo < hi)) throw ConfigError("uniform_grid: bad range");
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k)
    g[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (points - 1);
  return g;
}

ComplexMatrix ScalarCauchyAdapter::evaluate(const ComplexMatrix& z, EvalContext* ctx) const {
  ComplexMatrix out(z.rows(), z.cols());
  for (std::size_t k = 0; k < z.rows(); ++k)
    out(k, k) = scalar_cauchy(*inner_, z(k, k), eps_, ctx);
  return out;
}

ComplexMatrix TraceCauchyAdapter::evaluate(const ComplexMatrix& z, EvalContext* ctx) const {
  const std::size_t n = inner_->base_dim();
  ComplexMatrix out(z.rows(), z.cols());
  for (std::size_t k = 0; k < z.rows(); ++k) {
    ComplexMatrix g = inner_->evaluate(ComplexMatrix::scalar(n, z(k, k)), ctx);
    out(k, k) = g.trace() / Complex(static_cast<double>(n));
  }
  return out;
}

}  // namespace ncdist

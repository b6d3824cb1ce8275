#ifndef NCDIST_RMT_HPP
#define NCDIST_RMT_HPP

// Monte-Carlo harness: GUE and Haar-unitary sampling with a counter-based
// generator, block-pencil assembly, Hermitian spectra via Householder
// tridiagonalization + implicit-shift QL, histograms and KS distances
// against computed densities.

#include <cstdint>
#include <variant>
#include <vector>

#include "ncdist/cauchy.hpp"
#include "ncdist/density.hpp"
#include "ncdist/linearize.hpp"
#include "ncdist/ncexpr.hpp"

namespace ncdist {

// Counter-based stream: value i of stream s is a mix of (seed, s, i), so any
// (trial, ensemble) pair gets an independent, reproducible stream.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);
  std::uint64_t next_u64();
  double uniform();   // (0, 1)
  double gaussian();  // standard normal, Box-Muller

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

struct EnsembleSpec {
  enum class Kind { gue, haar_conjugated_diagonal, deterministic_diagonal };
  Kind kind = Kind::gue;
  std::size_t size = 0;
  std::uint64_t seed = 0;
  // for the diagonal kinds: weight = multiplicity fraction, position = value
  std::vector<FreeVariableSpec::Atom> atoms;
};

struct Histogram {
  std::vector<double> bin_edges;  // increasing, counts.size() + 1 entries
  std::vector<std::uint64_t> counts;
  std::vector<double> samples;  // sorted eigenvalues behind the counts
  std::uint64_t total = 0;
  int aborted_trials = 0;

  std::vector<double> density_values() const;  // counts / (total * width)
};

ComplexMatrix sample_gue(std::size_t N, std::uint64_t seed, std::uint64_t stream = 0);
ComplexMatrix sample_haar_unitary(std::size_t N, std::uint64_t seed, std::uint64_t stream = 0);
ComplexMatrix realize_ensemble(const EnsembleSpec& spec, std::uint64_t trial);

// Eigenvalues of a Hermitian matrix, ascending.  Householder + QL; quadratic
// in memory, cubic in time, threaded over trailing updates.
std::vector<double> hermitian_spectrum(const ComplexMatrix& a, int workers = 0);

using SpectralModel = std::variant<ExprPtr, LinearPencil>;

// Per trial: draw every ensemble, evaluate the expression (or assemble the
// block matrix b_0 (x) 1 + sum b_k (x) X_k), accumulate eigenvalues.
// Rational evaluation hitting a singular inverse aborts the trial and is
// counted, not hidden.
Histogram assemble_and_spectrum(const SpectralModel& model,
                                std::span<const EnsembleSpec> ensembles, int trials,
                                int workers = 0);

// Sup distance between the empirical CDF of the samples and the CDF of the
// density (trapezoid-integrated, normalized by its mass).
double ks_distance(const Histogram& h, const SpectralDensity& d);

}  // namespace ncdist

#endif

#ifndef NCDIST_PIPELINE_HPP
#define NCDIST_PIPELINE_HPP

// End-to-end jobs: parse expression + variable specs, linearize, convolve,
// sweep, invert, optionally Monte-Carlo validate; everything the CLI and the
// shared-library surface expose.

#include <optional>
#include <string>

#include "ncdist/convolve.hpp"
#include "ncdist/density.hpp"
#include "ncdist/linearize.hpp"
#include "ncdist/rmt.hpp"

namespace ncdist {

struct JobConfig {
  std::string expression;
  int num_vars = 0;
  std::vector<FreeVariableSpec> variables;  // one per x1..xd

  bool grid_auto = true;
  double grid_min = 0.0, grid_max = 0.0;
  int grid_points = 2001;
  double eps_z = kDefaultEpsZ;
  double eps_pencil = kDefaultEpsPencil;
  int workers = 0;  // 0 = available parallelism
  bool oracle_check = false;

  std::size_t rmt_n = 1000;
  int rmt_trials = 1;
  std::uint64_t seed = 1;

  std::string to_json() const;
  static JobConfig from_json(const std::string& text);
  // {"x1": {"kind": "atomic", "atoms": [[w, t], ...]},
  //  "x2": {"kind": "semicircular", "variance": v}}
  void load_variables_json(const std::string& text);
};

struct MomentReport {
  Complex oracle = 0.0;
  std::optional<Complex> solver;  // when the word is selfadjoint
};

struct OracleCheck {
  int order = 0;
  double max_rel_error = 0.0;
};

struct JobReport {
  SpectralDensity density;
  SolveStats stats;
  Histogram histogram;  // validate mode
  double ks = -1.0;     // validate mode
  std::optional<MomentReport> moment;
  std::optional<OracleCheck> oracle;
  bool density_warning = false;  // a raw value fell below -1e-8
  bool converged = true;         // every requested quantity within tolerance
};

JobReport run_density(const JobConfig& cfg);
JobReport run_validate(const JobConfig& cfg);
JobReport run_moments(const JobConfig& cfg, const std::string& word);

// The evaluator of the selfadjoint pencil behind cfg's expression, plus the
// pencil itself; exposed for tests and the acceptance suite.
struct PencilSetup {
  LinearPencil pencil;
  EvaluatorPtr evaluator;
  double support_bound = 0.0;  // ||b0|| + sum ||b_k|| radius_k
};
PencilSetup build_pencil_setup(const JobConfig& cfg);

// Ensembles matching the variable specs: semicircular -> GUE, first atomic ->
// deterministic diagonal, later atomics -> Haar-conjugated diagonals.
std::vector<EnsembleSpec> matching_ensembles(const JobConfig& cfg);

int write_density_csv(const JobReport& report, const std::string& path);
int write_histogram_csv(const JobReport& report, const std::string& path);

}  // namespace ncdist

#endif

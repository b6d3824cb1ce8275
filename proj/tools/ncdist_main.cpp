// Command-line front end; talks to the library exclusively through the C
// interface in ncdist.h.

#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ncdist.h"

namespace {

struct JobHandle {
  ncdist_job* job = ncdist_job_create();
  ~JobHandle() { ncdist_job_destroy(job); }
};

struct ReportHandle {
  ncdist_report* report = nullptr;
  ~ReportHandle() { ncdist_report_destroy(report); }
};

int fail(ncdist_status status) {
  std::fprintf(stderr, "error: %s\n", ncdist_last_error());
  return static_cast<int>(status);
}

bool parse_grid(const std::string& text, double& lo, double& hi, int& points) {
  char extra = 0;
  return std::sscanf(text.c_str(), "%lf,%lf,%d%c", &lo, &hi, &points, &extra) == 3;
}

int load_vars(ncdist_job* job, const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::fprintf(stderr, "error: cannot read variable spec '%s'\n", path.c_str());
    return 2;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  const ncdist_status st = ncdist_job_load_variables_json(job, ss.str().c_str());
  if (st != NCDIST_OK) return fail(st);
  return 0;
}

void print_summary(const ncdist_report* report) {
  long iters = 0, solves = 0, warm = 0;
  double max_resid = 0.0;
  ncdist_report_solver_stats(report, &iters, &solves, &warm, &max_resid);
  std::printf("grid points: %zu (failed: %d)\n", ncdist_report_grid_size(report),
              ncdist_report_failed_points(report));
  std::printf("density mass: %.6f\n", ncdist_report_mass(report));
  std::printf("solver: %ld solves, %ld iterations, %ld warm starts, max residual %.3e\n",
              solves, iters, warm, max_resid);
  double oracle_err = 0.0;
  if (ncdist_report_oracle_error(report, &oracle_err) == NCDIST_OK)
    std::printf("oracle check: max relative moment error %.3e\n", oracle_err);
  const double ks = ncdist_report_ks(report);
  if (ks >= 0.0) std::printf("KS distance: %.4f\n", ks);
  const int aborted = ncdist_report_aborted_trials(report);
  if (aborted > 0) std::printf("aborted trials: %d\n", aborted);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral distributions of polynomials and rational expressions "
               "in free non-commutative random variables"};
  app.require_subcommand(1);

  std::string expr, vars_path, grid_text, out_path, hist_path, word, config_out;
  double eps_z = 1e-3, eps_pencil = 1e-7;
  int workers = 0;
  bool oracle_check = false;
  std::uint64_t rmt_n = 1000, seed = 1;
  int trials = 1;

  auto add_common = [&](CLI::App* cmd, bool needs_expr) {
    if (needs_expr) cmd->add_option("--expr", expr, "expression in x1..xd")->required();
    cmd->add_option("--vars", vars_path, "variable spec JSON file")->required();
    cmd->add_option("--eps", eps_z, "height above the real axis (default 1e-3)");
    cmd->add_option("--eps-pencil", eps_pencil, "Lambda_eps filler (default 1e-7)");
    cmd->add_option("--workers", workers, "worker threads (default: all cores)");
    cmd->add_flag("--oracle-check", oracle_check,
                  "compare solver moments against the combinatorial oracle");
    cmd->add_option("--dump-config", config_out, "write the resolved job config JSON");
  };

  CLI::App* density = app.add_subcommand("density", "compute the spectral density");
  add_common(density, true);
  density->add_option("--grid", grid_text, "a,b,n");
  density->add_option("--out", out_path, "density CSV path")->required();

  CLI::App* validate =
      app.add_subcommand("validate", "density plus a random-matrix cross-check");
  add_common(validate, true);
  validate->add_option("--grid", grid_text, "a,b,n");
  validate->add_option("--out", out_path, "density CSV path")->required();
  validate->add_option("--hist-out", hist_path, "histogram CSV path");
  validate->add_option("--rmt-n", rmt_n, "matrix size N");
  validate->add_option("--trials", trials, "number of trials");
  validate->add_option("--seed", seed, "base seed");

  CLI::App* moments = app.add_subcommand("moments", "exact mixed moments from the oracle");
  add_common(moments, false);
  moments->add_option("--word", word, "polynomial word, e.g. x1^8")->required();

  CLI11_PARSE(app, argc, argv);

  JobHandle jh;
  if (!jh.job) {
    std::fprintf(stderr, "error: out of memory\n");
    return 5;
  }
  if (int rc = load_vars(jh.job, vars_path); rc != 0) return rc;

  if (!grid_text.empty()) {
    double lo = 0, hi = 0;
    int pts = 0;
    if (!parse_grid(grid_text, lo, hi, pts)) {
      std::fprintf(stderr, "error: --grid expects a,b,n\n");
      return 2;
    }
    if (ncdist_status st = ncdist_job_set_grid(jh.job, lo, hi, pts); st != NCDIST_OK)
      return fail(st);
  }
  ncdist_job_set_eps(jh.job, eps_z, eps_pencil);
  ncdist_job_set_workers(jh.job, workers);
  ncdist_job_set_oracle_check(jh.job, oracle_check ? 1 : 0);
  ncdist_job_set_rmt(jh.job, rmt_n, trials, seed);

  ReportHandle rh;
  ncdist_status status = NCDIST_OK;
  if (density->parsed() || validate->parsed()) {
    if (ncdist_status st = ncdist_job_set_expression(jh.job, expr.c_str()); st != NCDIST_OK)
      return fail(st);
    status = density->parsed() ? ncdist_run_density(jh.job, &rh.report)
                               : ncdist_run_validate(jh.job, &rh.report);
  } else {
    // the moments word doubles as the expression for config validation
    if (ncdist_status st = ncdist_job_set_expression(jh.job, word.c_str()); st != NCDIST_OK)
      return fail(st);
    status = ncdist_run_moments(jh.job, word.c_str(), &rh.report);
  }

  if (!config_out.empty()) {
    size_t needed = 0;
    ncdist_job_to_json(jh.job, nullptr, 0, &needed);
    std::string buf(needed, '\0');
    if (ncdist_job_to_json(jh.job, buf.data(), buf.size(), nullptr) == NCDIST_OK) {
      std::ofstream out(config_out);
      out << buf.c_str();
    }
  }

  if (!rh.report) return fail(status);

  if (moments->parsed()) {
    double ore = 0, oim = 0, sre = 0, sim = 0;
    int have_solver = 0;
    if (ncdist_report_moment(rh.report, &ore, &oim, &have_solver, &sre, &sim) == NCDIST_OK) {
      if (oim == 0.0)
        std::printf("oracle moment: %.12g\n", ore);
      else
        std::printf("oracle moment: %.12g %+.12gi\n", ore, oim);
      if (have_solver) std::printf("solver moment: %.12g %+.12gi\n", sre, sim);
    }
  } else {
    if (!out_path.empty()) {
      if (ncdist_status st = ncdist_report_write_density_csv(rh.report, out_path.c_str());
          st != NCDIST_OK)
        return fail(st);
    }
    if (!hist_path.empty() && validate->parsed()) {
      if (ncdist_status st = ncdist_report_write_histogram_csv(rh.report, hist_path.c_str());
          st != NCDIST_OK)
        return fail(st);
    }
    print_summary(rh.report);
  }

  if (status != NCDIST_OK) return fail(status);
  return 0;
}

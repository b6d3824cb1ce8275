// C surface over the pipeline: opaque handles, status codes, thread-local
#include <memory>
// error text.  Exceptions never cross the boundary.

#include "ncdist.h"

#include <cstring>
#include <string>

#include "ncdist/pipeline.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

ncdist_status classify(const std::exception& e) {
  if (dynamic_cast<const ncdist::EvaluationError*>(&e)) return NCDIST_ERR_SINGULAR;
  if (dynamic_cast<const ncdist::ConvergenceError*>(&e)) return NCDIST_ERR_CONVERGENCE;
  if (dynamic_cast<const ncdist::ConfigError*>(&e) ||
      dynamic_cast<const ncdist::ParseError*>(&e) || dynamic_cast<const ncdist::CapError*>(&e))
    return NCDIST_ERR_CONFIG;
  return NCDIST_ERR_INTERNAL;
}

template <class F>
ncdist_status guarded(F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    set_error(e.what());
    return classify(e);
  } catch (...) {
    set_error("unknown error");
    return NCDIST_ERR_INTERNAL;
  }
}

}  // namespace

struct ncdist_job {
  ncdist::JobConfig cfg;
};

struct ncdist_report {
  ncdist::JobReport rep;
};

namespace {

template <class Runner>
ncdist_status run_into(ncdist_job* job, ncdist_report** report, Runner&& runner) {
  if (!job || !report) {
    set_error("null argument");
    return NCDIST_ERR_CONFIG;
  }
  *report = nullptr;
  return guarded([&]() -> ncdist_status {
    auto out = std::make_unique<ncdist_report>();
    out->rep = runner(job->cfg);
    const bool converged = out->rep.converged;
    *report = out.release();
    if (!converged) {
      set_error("run finished with unconverged quantities");
      return NCDIST_ERR_CONVERGENCE;
    }
    return NCDIST_OK;
  });
}

}  // namespace

extern "C" {

const char* ncdist_last_error(void) { return g_last_error.c_str(); }

ncdist_job* ncdist_job_create(void) { return new (std::nothrow) ncdist_job(); }

void ncdist_job_destroy(ncdist_job* job) { delete job; }

ncdist_status ncdist_job_set_expression(ncdist_job* job, const char* expression) {
  if (!job || !expression) {
    set_error("null argument");
    return NCDIST_ERR_CONFIG;
  }
  job->cfg.expression = expression;
  return NCDIST_OK;
}

ncdist_status ncdist_job_load_variables_json(ncdist_job* job, const char* json_text) {
  if (!job || !json_text) {
    set_error("null argument");
    return NCDIST_ERR_CONFIG;
  }
  return guarded([&] {
    job->cfg.load_variables_json(json_text);
    return NCDIST_OK;
  });
}

ncdist_status ncdist_job_set_num_vars(ncdist_job* job, int num_vars) {
  if (!job || num_vars < 1) {
    set_error("num_vars must be >= 1");
    return NCDIST_ERR_CONFIG;
  }
  job->cfg.num_vars = num_vars;
  job->cfg.variables.resize(static_cast<std::size_t>(num_vars),
                            ncdist::FreeVariableSpec::semicircular(1.0));
  return NCDIST_OK;
}

ncdist_status ncdist_job_set_variable_atomic(ncdist_job* job, int index, const double* weights,
                                             const double* positions, int count) {
  if (!job || !weights || !positions || count < 1) {
    set_error("bad atomic spec");
    return NCDIST_ERR_CONFIG;
  }
  return guarded([&] {
    std::vector<ncdist::FreeVariableSpec::Atom> atoms;
    for (int k = 0; k < count; ++k) atoms.push_back({weights[k], positions[k]});
    auto spec = ncdist::FreeVariableSpec::atomic(std::move(atoms));
    if (index < 1) throw ncdist::ConfigError("variable index must be >= 1");
    if (static_cast<int>(job->cfg.variables.size()) < index) {
      job->cfg.variables.resize(static_cast<std::size_t>(index),
                                ncdist::FreeVariableSpec::semicircular(1.0));
      job->cfg.num_vars = index;
    }
    job->cfg.variables[static_cast<std::size_t>(index - 1)] = std::move(spec);
    return NCDIST_OK;
  });
}

ncdist_status ncdist_job_set_variable_semicircular(ncdist_job* job, int index, double variance) {
  if (!job) {
    set_error("null job");
    return NCDIST_ERR_CONFIG;
  }
  return guarded([&] {
    auto spec = ncdist::FreeVariableSpec::semicircular(variance);
    if (index < 1) throw ncdist::ConfigError("variable index must be >= 1");
    if (static_cast<int>(job->cfg.variables.size()) < index) {
      job->cfg.variables.resize(static_cast<std::size_t>(index),
                                ncdist::FreeVariableSpec::semicircular(1.0));
      job->cfg.num_vars = index;
    }
    job->cfg.variables[static_cast<std::size_t>(index - 1)] = std::move(spec);
    return NCDIST_OK;
  });
}

ncdist_status ncdist_job_set_grid(ncdist_job* job, double lo, double hi, int points) {
  if (!job) {
    set_error("null job");
    return NCDIST_ERR_CONFIG;
  }
  job->cfg.grid_auto = false;
  job->cfg.grid_min = lo;
  job->cfg.grid_max = hi;
  job->cfg.grid_points = points;
  return NCDIST_OK;
}

ncdist_status ncdist_job_set_eps(ncdist_job* job, double eps_z, double eps_pencil) {
  if (!job) {
    set_error("null job");
    return NCDIST_ERR_CONFIG;
  }
  if (eps_z > 0.0) job->cfg.eps_z = eps_z;
  if (eps_pencil > 0.0) job->cfg.eps_pencil = eps_pencil;
  return NCDIST_OK;
}

ncdist_status ncdist_job_set_workers(ncdist_job* job, int workers) {
  if (!job) {
    set_error("null job");
    return NCDIST_ERR_CONFIG;
  }
  job->cfg.workers = workers;
  return NCDIST_OK;
}

ncdist_status ncdist_job_set_oracle_check(ncdist_job* job, int enabled) {
  if (!job) {
    set_error("null job");
    return NCDIST_ERR_CONFIG;
  }
  job->cfg.oracle_check = enabled != 0;
  return NCDIST_OK;
}

ncdist_status ncdist_job_set_rmt(ncdist_job* job, uint64_t n, int trials, uint64_t seed) {
  if (!job || n < 1 || trials < 1) {
    set_error("bad rmt options");
    return NCDIST_ERR_CONFIG;
  }
  job->cfg.rmt_n = n;
  job->cfg.rmt_trials = trials;
  job->cfg.seed = seed;
  return NCDIST_OK;
}

ncdist_status ncdist_job_to_json(const ncdist_job* job, char* buffer, size_t size,
                                 size_t* needed) {
  if (!job) {
    set_error("null job");
    return NCDIST_ERR_CONFIG;
  }
  return guarded([&] {
    const std::string text = job->cfg.to_json();
    if (needed) *needed = text.size() + 1;
    if (buffer && size > 0) {
      const size_t n = std::min(size - 1, text.size());
      std::memcpy(buffer, text.data(), n);
      buffer[n] = '\0';
      if (n < text.size()) return NCDIST_ERR_CONFIG;
    }
    return NCDIST_OK;
  });
}

ncdist_status ncdist_job_from_json(ncdist_job* job, const char* json_text) {
  if (!job || !json_text) {
    set_error("null argument");
    return NCDIST_ERR_CONFIG;
  }
  return guarded([&] {
    job->cfg = ncdist::JobConfig::from_json(json_text);
    return NCDIST_OK;
  });
}

ncdist_status ncdist_run_density(ncdist_job* job, ncdist_report** report) {
  return run_into(job, report, [](const ncdist::JobConfig& c) { return ncdist::run_density(c); });
}

ncdist_status ncdist_run_validate(ncdist_job* job, ncdist_report** report) {
  return run_into(job, report, [](const ncdist::JobConfig& c) { return ncdist::run_validate(c); });
}

ncdist_status ncdist_run_moments(ncdist_job* job, const char* word, ncdist_report** report) {
  if (!word) {
    set_error("null word");
    return NCDIST_ERR_CONFIG;
  }
  const std::string w = word;
  return run_into(job, report,
                  [&w](const ncdist::JobConfig& c) { return ncdist::run_moments(c, w); });
}

void ncdist_report_destroy(ncdist_report* report) { delete report; }

size_t ncdist_report_grid_size(const ncdist_report* report) {
  return report ? report->rep.density.grid.size() : 0;
}

ncdist_status ncdist_report_density_point(const ncdist_report* report, size_t index, double* t,
                                          double* rho, int* status_out, long* iterations,
                                          double* residual) {
  if (!report || index >= report->rep.density.grid.size()) {
    set_error("bad report index");
    return NCDIST_ERR_CONFIG;
  }
  const auto& d = report->rep.density;
  if (t) *t = d.grid[index];
  if (rho) *rho = d.values[index];
  if (status_out) *status_out = d.status[index].converged ? 1 : 0;
  if (iterations) *iterations = d.status[index].iterations;
  if (residual) *residual = d.status[index].residual;
  return NCDIST_OK;
}

double ncdist_report_mass(const ncdist_report* report) {
  return report ? report->rep.density.mass : 0.0;
}

double ncdist_report_ks(const ncdist_report* report) { return report ? report->rep.ks : -1.0; }

int ncdist_report_failed_points(const ncdist_report* report) {
  return report ? report->rep.density.failed_points : -1;
}

int ncdist_report_aborted_trials(const ncdist_report* report) {
  return report ? report->rep.histogram.aborted_trials : -1;
}

int ncdist_report_converged(const ncdist_report* report) {
  return report && report->rep.converged ? 1 : 0;
}

void ncdist_report_solver_stats(const ncdist_report* report, long* iterations, long* solves,
                                long* warm_hits, double* max_residual) {
  if (!report) return;
  const auto& s = report->rep.stats;
  if (iterations) *iterations = s.iterations;
  if (solves) *solves = s.solves;
  if (warm_hits) *warm_hits = s.warm_hits;
  if (max_residual) *max_residual = s.max_residual;
}

ncdist_status ncdist_report_oracle_error(const ncdist_report* report, double* max_rel_error) {
  if (!report || !report->rep.oracle) {
    set_error("no oracle check in this report");
    return NCDIST_ERR_CONFIG;
  }
  if (max_rel_error) *max_rel_error = report->rep.oracle->max_rel_error;
  return NCDIST_OK;
}

ncdist_status ncdist_report_moment(const ncdist_report* report, double* oracle_re,
                                   double* oracle_im, int* solver_available, double* solver_re,
                                   double* solver_im) {
  if (!report || !report->rep.moment) {
    set_error("no moment in this report");
    return NCDIST_ERR_CONFIG;
  }
  const auto& m = *report->rep.moment;
  if (oracle_re) *oracle_re = m.oracle.real();
  if (oracle_im) *oracle_im = m.oracle.imag();
  if (solver_available) *solver_available = m.solver.has_value() ? 1 : 0;
  if (solver_re) *solver_re = m.solver ? m.solver->real() : 0.0;
  if (solver_im) *solver_im = m.solver ? m.solver->imag() : 0.0;
  return NCDIST_OK;
}

ncdist_status ncdist_report_write_density_csv(const ncdist_report* report, const char* path) {
  if (!report || !path) {
    set_error("null argument");
    return NCDIST_ERR_CONFIG;
  }
  return guarded([&] {
    if (ncdist::write_density_csv(report->rep, path) != 0) {
      set_error(std::string("cannot write ") + path);
      return NCDIST_ERR_CONFIG;
    }
    return NCDIST_OK;
  });
}

ncdist_status ncdist_report_write_histogram_csv(const ncdist_report* report, const char* path) {
  if (!report || !path) {
    set_error("null argument");
    return NCDIST_ERR_CONFIG;
  }
  return guarded([&] {
    if (ncdist::write_histogram_csv(report->rep, path) != 0) {
      set_error(std::string("cannot write ") + path);
      return NCDIST_ERR_CONFIG;
    }
    return NCDIST_OK;
  });
}

}  // extern "C"

#include "ncdist/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace ncdist {

namespace {

using nlohmann::json;

json spec_to_json(const FreeVariableSpec& s) {
  json j;
  if (s.kind == FreeVariableSpec::Kind::atomic) {
    j["kind"] = "atomic";
    json atoms = json::array();
    for (const auto& a : s.atoms) atoms.push_back(json::array({a.weight, a.position}));
    j["atoms"] = atoms;
  } else {
    j["kind"] = "semicircular";
    j["variance"] = s.variance;
  }
  return j;
}

FreeVariableSpec spec_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "atomic") {
    std::vector<FreeVariableSpec::Atom> atoms;
    for (const auto& a : j.at("atoms"))
      atoms.push_back({a.at(0).get<double>(), a.at(1).get<double>()});
    return FreeVariableSpec::atomic(std::move(atoms));
  }
  if (kind == "semicircular")
    return FreeVariableSpec::semicircular(j.value("variance", 1.0));
  throw ConfigError("variable spec: unknown kind '" + kind + "'");
}

void validate_config(const JobConfig& cfg) {
  if (cfg.expression.empty()) throw ConfigError("config: empty expression");
  if (cfg.num_vars < 1) throw ConfigError("config: num_vars must be >= 1");
  if (static_cast<int>(cfg.variables.size()) != cfg.num_vars)
    throw ConfigError("config: exactly one spec per variable x1..x" +
                      std::to_string(cfg.num_vars));
  if (!cfg.grid_auto && !(cfg.grid_min < cfg.grid_max))
    throw ConfigError("config: grid min must be below max");
  if (cfg.grid_points < 3) throw ConfigError("config: grid needs at least 3 points");
  if (cfg.eps_z <= 0.0 || cfg.eps_pencil <= 0.0) throw ConfigError("config: eps must be positive");
}

}  // namespace

std::string JobConfig::to_json() const {
  json j;
  j["expression"] = expression;
  j["num_vars"] = num_vars;
  json vars = json::object();
  for (int k = 0; k < num_vars; ++k)
    vars["x" + std::to_string(k + 1)] = spec_to_json(variables[static_cast<std::size_t>(k)]);
  j["variables"] = vars;
  j["grid"] = grid_auto ? json(nullptr)
                        : json(json::array({grid_min, grid_max, grid_points}));
  j["grid_points"] = grid_points;
  j["eps_z"] = eps_z;
  j["eps_pencil"] = eps_pencil;
  j["workers"] = workers;
  j["oracle_check"] = oracle_check;
  j["rmt"] = {{"n", rmt_n}, {"trials", rmt_trials}, {"seed", seed}};
  return j.dump(2);
}

JobConfig JobConfig::from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    JobConfig cfg;
    cfg.expression = j.at("expression").get<std::string>();
    cfg.num_vars = j.at("num_vars").get<int>();
    cfg.variables.clear();
    const auto& vars = j.at("variables");
    for (int k = 0; k < cfg.num_vars; ++k) {
      const std::string key = "x" + std::to_string(k + 1);
      if (!vars.contains(key)) throw ConfigError("config: missing spec for " + key);
      cfg.variables.push_back(spec_from_json(vars.at(key)));
    }
    if (j.contains("grid") && !j.at("grid").is_null()) {
      cfg.grid_auto = false;
      cfg.grid_min = j.at("grid").at(0).get<double>();
      cfg.grid_max = j.at("grid").at(1).get<double>();
      cfg.grid_points = j.at("grid").at(2).get<int>();
    }
    if (j.contains("grid_points")) cfg.grid_points = j.at("grid_points").get<int>();
    cfg.eps_z = j.value("eps_z", kDefaultEpsZ);
    cfg.eps_pencil = j.value("eps_pencil", kDefaultEpsPencil);
    cfg.workers = j.value("workers", 0);
    cfg.oracle_check = j.value("oracle_check", false);
    if (j.contains("rmt")) {
      cfg.rmt_n = j.at("rmt").value("n", 1000);
      cfg.rmt_trials = j.at("rmt").value("trials", 1);
      cfg.seed = j.at("rmt").value("seed", 1);
    }
    return cfg;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
}

void JobConfig::load_variables_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    int max_index = 0;
    for (const auto& [key, value] : j.items()) {
      if (key.size() < 2 || key[0] != 'x' ||
          key.find_first_not_of("0123456789", 1) != std::string::npos)
        throw ConfigError("variable spec: keys must be x1..xd, got '" + key + "'");
      max_index = std::max(max_index, std::stoi(key.substr(1)));
      (void)value;
    }
    if (max_index < 1) throw ConfigError("variable spec: no variables");
    std::vector<FreeVariableSpec> parsed;
    for (int k = 1; k <= max_index; ++k) {
      const std::string key = "x" + std::to_string(k);
      if (!j.contains(key)) throw ConfigError("variable spec: missing " + key);
      parsed.push_back(spec_from_json(j.at(key)));
    }
    variables = std::move(parsed);
    num_vars = max_index;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("variable spec: invalid JSON: ") + e.what());
  }
}

PencilSetup build_pencil_setup(const JobConfig& cfg) {
  validate_config(cfg);
  ExprPtr expr = parse(cfg.expression, cfg.num_vars);
  if (!is_selfadjoint(expr))
    throw ConfigError("density mode requires a selfadjoint expression");

  PencilSetup setup;
  bool have_norm_bound = false;
  if (is_polynomial(expr)) {
    NCPolynomial p = to_polynomial(expr, cfg.num_vars);
    if (p.is_zero() || p.degree() == 0) {
      // a point mass delta_c: 1x1 "pencil" with the constant alone
      const Complex c = p.is_zero() ? Complex(0.0) : p.terms()[0].coefficient;
      std::vector<ComplexMatrix> coeffs(static_cast<std::size_t>(cfg.num_vars) + 1,
                                        ComplexMatrix(1, 1));
      coeffs[0](0, 0) = c;
      setup.pencil = LinearPencil(cfg.num_vars, std::move(coeffs));
      setup.evaluator = make_constant_evaluator(setup.pencil.coefficient(0));
      setup.support_bound = std::abs(c);
      return setup;
    }
    setup.pencil = symmetrize(p, linearize_polynomial(p));
    // ||p(X)|| <= sum over terms of |alpha| prod ||X_{i_j}||
    double bound = 0.0;
    for (const auto& t : p.terms()) {
      double term = std::abs(t.coefficient);
      for (int v : t.word)
        term *= cfg.variables[static_cast<std::size_t>(v - 1)].support_radius();
      bound += term;
    }
    setup.support_bound = bound;
    have_norm_bound = true;
  } else {
    setup.pencil = bordered_pencil(selfadjoint_representation(expr, cfg.num_vars));
  }

  std::vector<PencilSummand> summands;
  double pencil_radius = operator_norm(setup.pencil.coefficient(0));
  for (int k = 1; k <= cfg.num_vars; ++k) {
    const auto& coeff = setup.pencil.coefficient(k);
    const auto& spec = cfg.variables[static_cast<std::size_t>(k - 1)];
    pencil_radius += operator_norm(coeff) * spec.support_radius();
    summands.push_back({coeff, spec});
  }
  setup.evaluator = convolve_pencil(setup.pencil.coefficient(0), std::move(summands));
  // rational expressions carry no easy norm bound; start from the pencil
  // radius and let the sweep widen on a mass deficit
  if (!have_norm_bound) setup.support_bound = pencil_radius;
  return setup;
}

namespace {

std::vector<double> job_grid(const JobConfig& cfg, const PencilSetup& setup) {
  if (!cfg.grid_auto) return uniform_grid(cfg.grid_min, cfg.grid_max, cfg.grid_points);
  const double R = 1.0 + setup.support_bound;
  return uniform_grid(-R, R, cfg.grid_points);
}

void run_oracle_check(const JobConfig& cfg, const PencilSetup& setup, JobReport& report) {
  const int order = 6;
  std::vector<ComplexMatrix> coeffs;
  std::vector<std::vector<double>> cumulants;
  for (int k = 1; k <= cfg.num_vars; ++k) {
    coeffs.push_back(setup.pencil.coefficient(k));
    cumulants.push_back(cfg.variables[static_cast<std::size_t>(k - 1)].cumulants(order));
  }
  auto oracle = pencil_moments(setup.pencil.coefficient(0), coeffs, cumulants, order);
  auto solver =
      extract_moments(*setup.evaluator, order, 2.0 * setup.support_bound + 1.0);
  OracleCheck check;
  check.order = order;
  for (int k = 1; k <= order; ++k) {
    const double scale = std::max(1.0, oracle[static_cast<std::size_t>(k)].max_abs());
    const double err =
        (oracle[static_cast<std::size_t>(k)] - solver[static_cast<std::size_t>(k)]).max_abs() /
        scale;
    check.max_rel_error = std::max(check.max_rel_error, err);
  }
  report.oracle = check;
  if (check.max_rel_error > 1e-4) report.converged = false;
}

}  // namespace

JobReport run_density(const JobConfig& cfg) {
  PencilSetup setup = build_pencil_setup(cfg);
  JobReport report;
  auto grid = job_grid(cfg, setup);
  report.density =
      invert_stieltjes(*setup.evaluator, grid, cfg.eps_z, cfg.eps_pencil, cfg.workers,
                       &report.stats);
  // automatic windows may undershoot for rational expressions (there is no a
  // priori bound on ||r(X)||): widen while mass is visibly missing
  for (int attempt = 0; cfg.grid_auto && report.density.failed_points == 0 &&
                        report.density.mass < 0.98 && attempt < 3;
       ++attempt) {
    setup.support_bound = 2.0 * setup.support_bound + 1.0;
    grid = job_grid(cfg, setup);
    report.stats = {};
    report.density = invert_stieltjes(*setup.evaluator, grid, cfg.eps_z, cfg.eps_pencil,
                                      cfg.workers, &report.stats);
  }
  report.density_warning = report.density.min_raw_value < -1e-8;
  report.converged = report.density.failed_points == 0 && !report.density_warning;
  if (cfg.oracle_check) run_oracle_check(cfg, setup, report);
  return report;
}

std::vector<EnsembleSpec> matching_ensembles(const JobConfig& cfg) {
  std::vector<EnsembleSpec> ensembles;
  bool first_atomic = true;
  for (int k = 0; k < cfg.num_vars; ++k) {
    const auto& spec = cfg.variables[static_cast<std::size_t>(k)];
    EnsembleSpec e;
    e.size = cfg.rmt_n;
    e.seed = cfg.seed + static_cast<std::uint64_t>(k) * 7919;
    if (spec.kind == FreeVariableSpec::Kind::semicircular) {
      if (std::abs(spec.variance - 1.0) > 1e-12)
        throw ConfigError("validate mode models semicircular variables of unit variance only");
      e.kind = EnsembleSpec::Kind::gue;
    } else {
      // deterministic diagonal for the first atomic variable, Haar-rotated
      // copies for the rest, which is exactly the asymptotically free model
      e.kind = first_atomic ? EnsembleSpec::Kind::deterministic_diagonal
                            : EnsembleSpec::Kind::haar_conjugated_diagonal;
      e.atoms = spec.atoms;
      first_atomic = false;
    }
    ensembles.push_back(std::move(e));
  }
  return ensembles;
}

JobReport run_validate(const JobConfig& cfg) {
  JobReport report = run_density(cfg);
  ExprPtr expr = parse(cfg.expression, cfg.num_vars);
  auto ensembles = matching_ensembles(cfg);
  report.histogram =
      assemble_and_spectrum(expr, ensembles, cfg.rmt_trials, cfg.workers);
  if (report.histogram.total == 0)
    throw EvaluationError("validate: every trial hit a singular rational evaluation");
  report.ks = ks_distance(report.histogram, report.density);
  if (!(report.ks < 0.05)) report.converged = false;
  return report;
}

JobReport run_moments(const JobConfig& cfg, const std::string& word) {
  validate_config(cfg);
  ExprPtr expr = parse(word, cfg.num_vars);
  if (!is_polynomial(expr))
    throw ConfigError("moments mode takes a polynomial word");
  NCPolynomial p = to_polynomial(expr, cfg.num_vars);

  // oracle: sum of mixed moments over the monomials
  std::vector<ScalarLiftedVariable> lifted;
  const int cap = 8;
  for (int k = 0; k < cfg.num_vars; ++k)
    lifted.emplace_back(ComplexMatrix::identity(1),
                        cfg.variables[static_cast<std::size_t>(k)].cumulants(cap));
  std::vector<const FreeVariable*> vars;
  for (const auto& v : lifted) vars.push_back(&v);

  Complex oracle = 0.0;
  for (const auto& term : p.terms()) {
    if (term.word.empty()) {
      oracle += term.coefficient;
      continue;
    }
    if (term.word.size() > 8) throw CapError("moments mode: word length exceeds cap 8");
    std::vector<int> word_ids;
    for (int v : term.word) word_ids.push_back(v - 1);
    std::vector<ComplexMatrix> inter(term.word.size() - 1, ComplexMatrix::identity(1));
    oracle += term.coefficient * mixed_moment_free(vars, word_ids, inter)(0, 0);
  }

  JobReport report;
  MomentReport mr;
  mr.oracle = oracle;
  if (is_selfadjoint(expr) && p.degree() >= 1) {
    // solver channel: the first moment of p(X), read from the scalar
    // transform of the linearization
    JobConfig sub = cfg;
    sub.expression = word;
    PencilSetup setup = build_pencil_setup(sub);
    ScalarCauchyAdapter adapter(setup.evaluator, cfg.eps_pencil);
    auto scalar_m = extract_moments(adapter, 1, 2.0 * setup.support_bound + 1.0);
    mr.solver = scalar_m[1](0, 0);
    if (std::abs(*mr.solver - oracle) > 1e-4 * std::max(1.0, std::abs(oracle)))
      report.converged = false;
  }
  report.moment = mr;
  return report;
}

int write_density_csv(const JobReport& report, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) return -1;
  std::fprintf(f, "t,rho,status,iterations,residual\n");
  const auto& d = report.density;
  for (std::size_t k = 0; k < d.grid.size(); ++k) {
    const auto& st = d.status[k];
    if (st.converged)
      std::fprintf(f, "%.17g,%.17g,ok,%ld,%.17g\n", d.grid[k], d.values[k], st.iterations,
                   st.residual);
    else
      std::fprintf(f, "%.17g,,failed,%ld,%.17g\n", d.grid[k], st.iterations, st.residual);
  }
  std::fclose(f);
  return 0;
}

int write_histogram_csv(const JobReport& report, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) return -1;
  std::fprintf(f, "bin_left,bin_right,count,density_estimate\n");
  const auto& h = report.histogram;
  const auto dens = h.density_values();
  for (std::size_t k = 0; k < h.counts.size(); ++k)
    std::fprintf(f, "%.17g,%.17g,%llu,%.17g\n", h.bin_edges[k], h.bin_edges[k + 1],
                 static_cast<unsigned long long>(h.counts[k]), dens[k]);
  std::fclose(f);
  return 0;
}

}  // namespace ncdist

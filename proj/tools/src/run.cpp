#include "leanreg/cli/run.hpp"

#include <cmath>
#include <sstream>

#include "leanreg/cli/csv.hpp"
#include "leanreg/diagnostics.hpp"

namespace leanreg::cli {
namespace {

using nlohmann::json;

json vec_json(const Vec& v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

json mat_json(const Mat& m) {
  json a = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) vec_json(m.row_vec(i)).swap(a.emplace_back());
  return a;
}

std::string_view reference_name(Reference r) {
  switch (r) {
    case Reference::std_normal: return "normal";
    case Reference::student_t: return "t";
    case Reference::bootstrap: return "bootstrap";
  }
  return "normal";
}

std::optional<Reference> parse_reference(std::string_view s) {
  if (s == "normal") return Reference::std_normal;
  if (s == "t") return Reference::student_t;
  if (s == "bootstrap") return Reference::bootstrap;
  return std::nullopt;
}

std::optional<VarianceMethod> parse_variance(std::string_view s) {
  if (s == "classical") return VarianceMethod::classical;
  if (s == "hc0") return VarianceMethod::sandwich_hc0;
  if (s == "hc1") return VarianceMethod::sandwich_hc1;
  return std::nullopt;
}

std::optional<WeightDist> parse_weights(std::string_view s) {
  if (s == "gaussian") return WeightDist::gaussian;
  if (s == "rademacher") return WeightDist::rademacher;
  return std::nullopt;
}

[[noreturn]] void usage(const std::string& msg) { throw Error(ErrorCode::invalid_argument, msg); }

bool uses_data(Command c) {
  return c == Command::fit || c == Command::test || c == Command::bootstrap;
}

VarianceEstimate variance_of(const OlsFit& fit, VarianceMethod m) {
  switch (m) {
    case VarianceMethod::classical: return classical_avar(fit);
    case VarianceMethod::sandwich_hc0: return sandwich_avar(fit, false);
    case VarianceMethod::sandwich_hc1: return sandwich_avar(fit, true);
  }
  return sandwich_avar(fit);
}

BootstrapDraws draws_for(const RunConfig& c, const OlsFit& fit) {
  BootstrapOptions o;
  o.method = c.m > 0 ? BootstrapMethod::resample_m_of_n : BootstrapMethod::multiplier;
  o.m = c.m;
  o.b = c.b;
  o.dist = c.weights;
  o.seed = *c.seed;
  o.threads = c.threads;
  return run_bootstrap(fit, o);
}

json data_summary(const CsvData& t) {
  return {{"n", t.data.n()}, {"p", t.data.p()}, {"columns", t.x_names}, {"response", t.response}};
}

std::size_t resolve_coord(const std::string& coord, const CsvData& t) {
  for (std::size_t j = 0; j < t.x_names.size(); ++j)
    if (t.x_names[j] == coord) return j;
  std::size_t j = 0;
  std::istringstream in(coord);
  if (!(in >> j) || !in.eof()) {
    throw Error(ErrorCode::bad_coordinate, "no covariate named '" + coord + "'");
  }
  return j;
}

json test_json(const TestResult& r, double alpha) {
  json j = {{"statistic", r.statistic},
            {"reference", reference_name(r.reference)},
            {"p_value", r.p_value},
            {"reject", r.p_value <= alpha},
            {"null", vec_json(r.null_value)}};
  if (r.target_coord) j["coordinate"] = *r.target_coord;
  if (r.reference == Reference::student_t) j["df"] = r.df;
  if (r.reference == Reference::bootstrap) j["b"] = r.b;
  return j;
}

void run_fit(const RunConfig& c, Report& rep) {
  const CsvData t = read_csv(std::filesystem::path(c.data), c.response, c.add_intercept);
  const OlsFit fit = fit_ols(t.data);
  rep.results["data"] = data_summary(t);
  rep.results["beta_hat"] = vec_json(fit.beta_hat);

  // Classical and sandwich standard errors side by side.
  json se;
  se["hc0"] = vec_json(sandwich_avar(fit).se);
  if (fit.n > fit.p) {
    se["classical"] = vec_json(classical_avar(fit).se);
    se["hc1"] = vec_json(sandwich_avar(fit, true).se);
  } else {
    se["classical"] = nullptr;
    se["hc1"] = nullptr;
    rep.warnings.emplace_back("n <= p: classical and HC1 standard errors are undefined");
  }
  rep.results["se"] = se;
  rep.results["variance"] = to_string(c.variance);
  rep.results["avar"] = mat_json(variance_of(fit, c.variance).avar);
  if (c.variance == VarianceMethod::classical) {
    rep.warnings.emplace_back(
        "classical standard errors assume a linear mean and constant variance; the sandwich "
        "columns do not");
  }
}

void run_test(const RunConfig& c, Report& rep) {
  const CsvData t = read_csv(std::filesystem::path(c.data), c.response, c.add_intercept);
  const OlsFit fit = fit_ols(t.data);
  const VarianceEstimate var = variance_of(fit, c.variance);
  std::optional<BootstrapDraws> draws;
  if (c.reference == Reference::bootstrap) draws = draws_for(c, fit);
  const BootstrapDraws* dp = draws ? &*draws : nullptr;

  rep.results["data"] = data_summary(t);
  rep.results["variance"] = to_string(c.variance);
  rep.results["beta_hat"] = vec_json(fit.beta_hat);
  if (c.coord) {
    if (c.null.size() > 1) usage("--null takes one value when --coord is given");
    const double beta0 = c.null.empty() ? 0.0 : c.null[0];
    rep.results["kind"] = "t";
    rep.results["test"] =
        test_json(t_test(fit, var, resolve_coord(*c.coord, t), beta0, c.reference, dp), c.alpha);
  } else {
    Vec beta0(fit.p);
    if (!c.null.empty()) {
      if (c.null.size() != fit.p) {
        usage("--null needs " + std::to_string(fit.p) + " values for the max-|t| test");
      }
      beta0 = Vec(c.null);
    }
    rep.results["kind"] = "max_t";
    rep.results["test"] = test_json(max_t_test(fit, var, beta0, c.reference, dp), c.alpha);
    if (c.reference != Reference::bootstrap) {
      rep.warnings.emplace_back(
          "max-|t| with an analytic reference uses the Bonferroni bound; --reference bootstrap "
          "is recommended");
    }
  }
  if (c.reference != Reference::bootstrap) {
    rep.warnings.emplace_back(
        "the sandwich variance is conservative under non-identical sampling, so p-values are "
        "conservative");
  }
}

void run_bootstrap_cmd(const RunConfig& c, Report& rep) {
  if (c.variance == VarianceMethod::classical) {
    usage("bootstrap regions need --variance hc0 or hc1");
  }
  const CsvData t = read_csv(std::filesystem::path(c.data), c.response, c.add_intercept);
  const OlsFit fit = fit_ols(t.data);
  const VarianceEstimate var = variance_of(fit, c.variance);
  const BootstrapDraws draws = draws_for(c, fit);
  const auto rect = region_rectangle(fit, draws, var, c.alpha);
  const auto ell = region_ellipsoid(fit, draws, c.alpha);

  rep.results["data"] = data_summary(t);
  rep.results["beta_hat"] = vec_json(fit.beta_hat);
  rep.results["method"] = to_string(draws.method);
  if (draws.method == BootstrapMethod::multiplier) rep.results["weights"] = to_string(draws.dist);
  else rep.results["m"] = draws.m;
  rep.results["b"] = draws.b;
  rep.results["level"] = 1.0 - c.alpha;
  const double scale = std::sqrt(var.avar(0, 0) / static_cast<double>(fit.n));
  rep.results["rectangle"] = {{"critical_value", rect.half_widths[0] / scale},
                              {"half_widths", vec_json(rect.half_widths)},
                              {"lower", vec_json(fit.beta_hat - rect.half_widths)},
                              {"upper", vec_json(fit.beta_hat + rect.half_widths)}};
  rep.results["ellipsoid"] = {{"radius", ell.radius},
                              {"quad_form", mat_json(ell.quad_form)},
                              {"n", ell.n}};
}

std::string coverage_csv(const CoverageReport& r) {
  std::ostringstream out;
  out << "scenario,n,method,joint,coordinate,coverage,mc_se,mean_width\n";
  for (const auto& m : r.methods) {
    for (std::size_t j = 0; j < m.mean_width.size(); ++j) {
      const std::size_t e = m.joint ? 0 : j;
      out << r.scenario << ',' << r.n << ',' << to_string(m.method) << ','
          << (m.joint ? "true" : "false") << ',' << j << ',' << format_double(m.coverage[e])
          << ',' << format_double(m.mc_se[e]) << ',' << format_double(m.mean_width[j]) << '\n';
    }
  }
  return out.str();
}

void run_simulate(const RunConfig& c, Report& rep) {
  Dgp dgp = Dgp::canonical(*c.dgp);
  CoverageOptions o;
  o.alpha = c.alpha;
  o.b = c.b;
  o.weights = c.weights;
  o.threads = c.threads;
  const CoverageReport r = run_coverage(dgp, c.n, c.reps, o, *c.seed);
  const PopulationTargets pop = population_targets(dgp, c.n);

  json methods = json::array();
  for (const auto& m : r.methods) {
    methods.push_back({{"method", to_string(m.method)},
                       {"joint", m.joint},
                       {"coverage", m.coverage},
                       {"mc_se", m.mc_se},
                       {"mean_width", m.mean_width}});
  }
  json nulls = json::array();
  for (const auto& t : r.null_tests) {
    nulls.push_back({{"test", t.name}, {"rejection_rate", t.rejection_rate}, {"mc_se", t.mc_se}});
  }
  rep.results = {{"scenario", r.scenario},
                 {"n", r.n},
                 {"replications", r.replications},
                 {"excluded", r.excluded},
                 {"alpha", r.alpha},
                 {"seed", r.seed},
                 {"beta_n", vec_json(pop.beta_n)},
                 {"coverage", methods},
                 {"null_tests", nulls},
                 {"median_beta_error", r.median_beta_error}};
  if (r.excluded > 0) {
    rep.warnings.push_back(std::to_string(r.excluded) +
                           " singular replications were excluded from every rate");
  }
  rep.coverage_csv = coverage_csv(r);
}

void run_check(const RunConfig& c, Report& rep) {
  const Dgp dgp = Dgp::canonical(*c.dgp);
  const PopulationTargets pop = population_targets(dgp, c.n);
  Rng rng = make_rng(*c.seed, 0);
  const Dataset data = sample(dgp, c.n, rng);
  const OlsFit fit = fit_ols(data);
  const DetCheckReport d = det_inequality_check(fit.sigma_hat, fit.gamma_hat, pop.sigma_n, pop.gamma_n);
  const Mat gap = symmetric_part(pop.k_n_star - pop.k_n);

  rep.results["scenario"] = to_string(dgp.kind);
  rep.results["n"] = c.n;
  rep.results["population"] = {{"beta_n", vec_json(pop.beta_n)},
                               {"sigma_n", mat_json(pop.sigma_n)},
                               {"k_n", mat_json(pop.k_n)},
                               {"k_n_star", mat_json(pop.k_n_star)},
                               {"av_n", mat_json(pop.av_n)},
                               {"av_n_star", mat_json(pop.av_n_star)},
                               {"k_n_leq_k_n_star", psd_leq(pop.k_n, pop.k_n_star, 1e-12)},
                               {"lambda_min_gap", eig_sym_extremes(gap).lambda_min},
                               {"lambda_max_gap", eig_sym_extremes(gap).lambda_max}};
  rep.results["sample"] = {{"beta_hat", vec_json(fit.beta_hat)},
                           {"k_check_error_op", op_norm(symmetric_part(k_check(fit) - pop.k_n_star))}};
  rep.results["deterministic_inequality"] = {{"lambda_n", d.lambda_n},
                                             {"d2n", d.d2n},
                                             {"precondition_holds", d.precondition_holds},
                                             {"err_norm", d.err_norm},
                                             {"lin_term_norm", d.lin_term_norm},
                                             {"remainder_norm", d.remainder_norm},
                                             {"sandwich_ok", d.sandwich_ok},
                                             {"remainder_ok", d.remainder_ok}};
  rep.results["influence_remainder"] =
      influence_remainder(data, fit, pop.sigma_n, pop.beta_n, pop.score_means);
  if (!d.precondition_holds) {
    rep.warnings.emplace_back(
        "||sigma_hat - sigma_n||_op exceeds lambda_min(sigma_n) / 2; the inequality is not "
        "guaranteed at this n");
  }
}

}  // namespace

std::string_view to_string(Command c) noexcept {
  switch (c) {
    case Command::fit: return "fit";
    case Command::test: return "test";
    case Command::bootstrap: return "bootstrap";
    case Command::simulate: return "simulate";
    case Command::check: return "check";
  }
  return "fit";
}

std::optional<Command> parse_command(std::string_view name) noexcept {
  for (Command c : {Command::fit, Command::test, Command::bootstrap, Command::simulate,
                    Command::check}) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

bool is_stochastic(const RunConfig& c) {
  return c.command == Command::bootstrap || c.command == Command::simulate ||
         c.command == Command::check ||
         (c.command == Command::test && c.reference == Reference::bootstrap);
}

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument:
    case ErrorCode::bad_coordinate:
      return 2;
    case ErrorCode::missing_column:
    case ErrorCode::non_numeric_cell:
    case ErrorCode::empty_data:
    case ErrorCode::dimension_mismatch:
      return 3;
    case ErrorCode::not_symmetric:
    case ErrorCode::not_positive_definite:
    case ErrorCode::no_convergence:
    case ErrorCode::singular_design:
    case ErrorCode::degenerate_dof:
    case ErrorCode::zero_variance:
    case ErrorCode::integration_failure:
      return 4;
  }
  return 4;
}

void validate(const RunConfig& c) {
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) usage("alpha must lie in (0, 1)");
  if (is_stochastic(c) && !c.seed) {
    usage(std::string(to_string(c.command)) + " is stochastic and needs --seed or LEANREG_SEED");
  }
  if (uses_data(c.command)) {
    if (c.data.empty()) usage("--data is required");
    if (c.response.empty()) usage("--response is required");
  } else {
    if (!c.dgp) usage("--dgp is required");
    if (c.n == 0) usage("--n must be >= 1");
  }
  if (c.command == Command::simulate && c.reps == 0) usage("--reps must be >= 1");
  if (c.b == 0) usage("--B must be >= 1");
}

nlohmann::json to_json(const RunConfig& c) {
  json j;
  j["command"] = to_string(c.command);
  if (uses_data(c.command)) {
    j["data"] = c.data;
    j["response"] = c.response;
    j["add_intercept"] = c.add_intercept;
  } else {
    j["dgp"] = c.dgp ? json(to_string(*c.dgp)) : json(nullptr);
    j["n"] = c.n;
  }
  if (c.command == Command::simulate) j["reps"] = c.reps;
  if (c.command != Command::simulate && c.command != Command::check) {
    j["variance"] = to_string(c.variance);
  }
  if (c.command == Command::test) {
    j["reference"] = reference_name(c.reference);
    j["coord"] = c.coord ? json(*c.coord) : json(nullptr);
    j["null"] = c.null;
  }
  if (is_stochastic(c) && c.command != Command::check) {
    j["weights"] = to_string(c.weights);
    j["B"] = c.b;
    if (c.command != Command::simulate) j["m"] = c.m;
  }
  if (c.command != Command::fit && c.command != Command::check) j["alpha"] = c.alpha;
  j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
  return j;
}

RunConfig config_from_json(const nlohmann::json& in) {
  const json& j = in.contains("config") ? in.at("config") : in;
  if (!j.is_object()) usage("config must be a JSON object");
  RunConfig c;
  try {
    const auto cmd = parse_command(j.at("command").get<std::string>());
    if (!cmd) usage("unknown command in config");
    c.command = *cmd;
    c.data = j.value("data", std::string());
    c.response = j.value("response", std::string());
    c.add_intercept = j.value("add_intercept", false);
    if (j.contains("dgp") && !j["dgp"].is_null()) {
      c.dgp = parse_dgp_kind(j["dgp"].get<std::string>());
      if (!c.dgp) usage("unknown dgp in config");
    }
    c.n = j.value("n", c.n);
    c.reps = j.value("reps", c.reps);
    if (j.contains("variance")) {
      const auto v = parse_variance(j["variance"].get<std::string>());
      if (!v) usage("unknown variance in config");
      c.variance = *v;
    }
    if (j.contains("weights")) {
      const auto w = parse_weights(j["weights"].get<std::string>());
      if (!w) usage("unknown weights in config");
      c.weights = *w;
    }
    if (j.contains("reference")) {
      const auto r = parse_reference(j["reference"].get<std::string>());
      if (!r) usage("unknown reference in config");
      c.reference = *r;
    }
    c.b = j.value("B", c.b);
    c.m = j.value("m", c.m);
    c.alpha = j.value("alpha", c.alpha);
    if (j.contains("coord") && !j["coord"].is_null()) c.coord = j["coord"].get<std::string>();
    c.null = j.value("null", std::vector<double>{});
    if (j.contains("seed") && !j["seed"].is_null()) c.seed = j["seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    usage(std::string("malformed config: ") + e.what());
  }
  return c;
}

std::optional<Reference> reference_from_string(std::string_view s) { return parse_reference(s); }
std::optional<VarianceMethod> variance_from_string(std::string_view s) { return parse_variance(s); }
std::optional<WeightDist> weights_from_string(std::string_view s) { return parse_weights(s); }

nlohmann::json Report::to_json() const {
  json j;
  j["command"] = cli::to_string(command);
  j["config"] = config;
  if (error) {
    j["error"] = {{"code", leanreg::to_string(error->code())},
                  {"message", error->what()},
                  {"exit_code", exit_code()}};
  } else {
    j["results"] = results;
  }
  j["warnings"] = warnings;
  return j;
}

std::string Report::dump() const { return to_json().dump(2) + "\n"; }

Report run_command(const RunConfig& config) {
  Report rep;
  rep.command = config.command;
  rep.config = to_json(config);
  rep.results = json::object();
  try {
    validate(config);
    switch (config.command) {
      case Command::fit: run_fit(config, rep); break;
      case Command::test: run_test(config, rep); break;
      case Command::bootstrap: run_bootstrap_cmd(config, rep); break;
      case Command::simulate: run_simulate(config, rep); break;
      case Command::check: run_check(config, rep); break;
    }
  } catch (const Error& e) {
    rep.error = e;
    rep.results = json::object();
    rep.coverage_csv.clear();
  }
  return rep;
}

}  // namespace leanreg::cli

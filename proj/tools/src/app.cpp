#include "leanreg/cli/app.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>

#include "leanreg/cli/run.hpp"

namespace leanreg::cli {
namespace {

struct Flags {
  std::string variance = "hc0";
  std::string weights = "gaussian";
  std::string reference = "normal";
  std::string dgp;
  std::string coord;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string config;
};

int emit_usage_error(const std::string& msg, std::ostream& out, std::ostream& err) {
  const nlohmann::json j = {
      {"error", {{"code", "invalid_argument"}, {"message", msg}, {"exit_code", 2}}}};
  out << j.dump(2) << "\n";
  err << "leanreg: " << msg << "\n";
  return 2;
}

std::optional<std::uint64_t> seed_from_env() {
  const char* env = std::getenv("LEANREG_SEED");
  if (env == nullptr || *env == '\0') return std::nullopt;
  std::uint64_t v = 0;
  const std::string_view s(env);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::invalid_argument, "LEANREG_SEED is not an unsigned 64-bit integer");
  }
  return v;
}

bool write_outputs(const Report& rep, const std::string& path, std::ostream& out,
                   std::ostream& err) {
  const std::string body = rep.dump();
  if (path.empty()) {
    out << body;
    return true;
  }
  std::ofstream f(path, std::ios::binary);
  f << body;
  if (!rep.coverage_csv.empty()) {
    std::ofstream csv(std::filesystem::path(path).replace_extension(".csv"), std::ios::binary);
    csv << rep.coverage_csv;
  }
  if (!f) {
    err << "leanreg: cannot write " << path << "\n";
    return false;
  }
  return true;
}

}  // namespace

int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Assumption-lean least squares inference"};
  app.require_subcommand(0, 1);
  RunConfig cfg;
  Flags f;
  app.add_option("--config", f.config, "Replay a JSON config or a previous report");
  app.add_option("--out", f.out, "Write the JSON report here instead of stdout");
  app.add_option("--threads", cfg.threads, "Worker cap (0 = all cores); never changes results");

  const std::map<std::string, Command> names = {{"fit", Command::fit},
                                                {"test", Command::test},
                                                {"bootstrap", Command::bootstrap},
                                                {"simulate", Command::simulate},
                                                {"check", Command::check}};
  const char* help[] = {"Estimate beta with classical and sandwich standard errors",
                        "t or max-|t| test of a hypothesized coefficient vector",
                        "Score-bootstrap rectangle and ellipsoid confidence regions",
                        "Monte Carlo coverage study on a named DGP",
                        "Deterministic inequality and population diagnostics on a named DGP"};
  std::map<CLI::App*, Command> subs;
  int k = 0;
  for (const char* name : {"fit", "test", "bootstrap", "simulate", "check"}) {
    const Command c = names.at(name);
    CLI::App* s = app.add_subcommand(name, help[k++]);
    subs[s] = c;
    const bool data = c == Command::fit || c == Command::test || c == Command::bootstrap;
    if (data) {
      s->add_option("--data", cfg.data, "CSV file with a header row")->check(CLI::ExistingFile);
      s->add_option("--response", cfg.response, "Name of the response column");
      s->add_flag("--add-intercept", cfg.add_intercept, "Prepend a column of ones");
      s->add_option("--variance", f.variance)->check(CLI::IsMember({"classical", "hc0", "hc1"}));
    } else {
      s->add_option("--dgp", f.dgp, "Named data-generating process")
          ->check(CLI::IsMember({"linear_homoscedastic", "quadratic_mean_iid",
                                 "heteroscedastic_iid", "fixed_x_heteroscedastic",
                                 "fixed_x_nonidentical_mean"}));
      s->add_option("--n", cfg.n, "Sample size");
    }
    if (c == Command::simulate) s->add_option("--reps", cfg.reps, "Monte Carlo replications");
    if (c == Command::test || c == Command::bootstrap || c == Command::simulate) {
      s->add_option("--weights", f.weights)->check(CLI::IsMember({"gaussian", "rademacher"}));
      s->add_option("--B", cfg.b, "Bootstrap replicates");
      s->add_option("--alpha", cfg.alpha, "Level is 1 - alpha");
    }
    if (c == Command::test || c == Command::bootstrap) {
      s->add_option("--m", cfg.m, "Resample size; > 0 selects the m-of-n bootstrap");
    }
    if (c == Command::test) {
      s->add_option("--reference", f.reference)
          ->check(CLI::IsMember({"normal", "t", "bootstrap"}));
      s->add_option("--coord", f.coord, "Covariate name or index; omit for max-|t|");
      s->add_option("--null", cfg.null, "Hypothesized value(s), comma separated")
          ->delimiter(',');
    }
    if (c != Command::fit) s->add_option("--seed", f.seed, "64-bit seed (else LEANREG_SEED)");
    s->add_option("--out", f.out, "Write the JSON report here instead of stdout");
    s->add_option("--threads", cfg.threads, "Worker cap (0 = all cores)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    return emit_usage_error(e.what(), out, err);
  }

  try {
    if (!f.config.empty()) {
      if (!app.get_subcommands().empty()) {
        return emit_usage_error("--config replaces the subcommand", out, err);
      }
      std::ifstream in(f.config);
      if (!in) return emit_usage_error("cannot open config " + f.config, out, err);
      const unsigned threads = cfg.threads;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        return emit_usage_error(std::string("config is not valid JSON: ") + e.what(), out, err);
      }
      cfg = config_from_json(j);
      cfg.threads = threads;
    } else {
      if (app.get_subcommands().empty()) {
        return emit_usage_error("a subcommand or --config is required\n" + app.help(), out, err);
      }
      cfg.command = subs.at(app.get_subcommands().front());
      cfg.variance = *variance_from_string(f.variance);
      cfg.weights = *weights_from_string(f.weights);
      cfg.reference = *reference_from_string(f.reference);
      if (!f.dgp.empty()) cfg.dgp = parse_dgp_kind(f.dgp);
      if (!f.coord.empty()) cfg.coord = f.coord;
      cfg.seed = f.seed ? f.seed : seed_from_env();
    }
  } catch (const Error& e) {
    return emit_usage_error(e.what(), out, err);
  }

  const Report rep = run_command(cfg);
  if (rep.error) err << "leanreg: " << to_string(rep.error->code()) << ": " << rep.error->what() << "\n";
  for (const auto& w : rep.warnings) err << "leanreg: note: " << w << "\n";
  if (!write_outputs(rep, f.out, out, err)) return 3;
  return rep.exit_code();
}

}  // namespace leanreg::cli

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "leanreg/cli/app.hpp"
#include "leanreg/cli/csv.hpp"
#include "leanreg/cli/run.hpp"

using namespace leanreg;
using namespace leanreg::cli;

namespace {

const std::string kExample = std::string(LEANREG_TEST_DATA_DIR) + "/example.csv";

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::invalid_argument;
}

CsvData parse(const std::string& text, const char* response = "y", bool intercept = false) {
  std::istringstream in(text);
  return read_csv(in, response, intercept);
}

int run(std::vector<std::string> args, std::string* out_text = nullptr) {
  args.insert(args.begin(), "leanreg");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_main(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  return code;
}

RunConfig data_config(Command c) {
  RunConfig cfg;
  cfg.command = c;
  cfg.data = kExample;
  cfg.response = "y";
  cfg.add_intercept = true;
  return cfg;
}

}  // namespace

TEST(ReadCsv, ExampleFile) {
  const CsvData t = read_csv(std::filesystem::path(kExample), "y", true);
  EXPECT_EQ(t.data.x, (Mat{{1, 0}, {1, 1}, {1, 2}}));
  EXPECT_EQ(t.data.y, (Vec{0, 1, 4}));
  EXPECT_EQ(t.x_names, (std::vector<std::string>{"(intercept)", "x"}));
}

TEST(ReadCsv, ResponseAnywhereAndOrderKept) {
  const CsvData t = parse("a, y ,b\r\n1,10,2\n3,20,4\n\n");
  EXPECT_EQ(t.data.x, (Mat{{1, 2}, {3, 4}}));
  EXPECT_EQ(t.data.y, (Vec{10, 20}));
  EXPECT_EQ(t.x_names, (std::vector<std::string>{"a", "b"}));
}

TEST(ReadCsv, Errors) {
  EXPECT_EQ(code_of([] { parse("x,z\n1,2\n"); }), ErrorCode::missing_column);
  EXPECT_EQ(code_of([] { parse("y,x\n1,NaN\n"); }), ErrorCode::non_numeric_cell);
  EXPECT_EQ(code_of([] { parse("y,x\n1,inf\n"); }), ErrorCode::non_numeric_cell);
  EXPECT_EQ(code_of([] { parse("y,x\n1,abc\n"); }), ErrorCode::non_numeric_cell);
  EXPECT_EQ(code_of([] { parse("y,x\n1,\n"); }), ErrorCode::non_numeric_cell);
  EXPECT_EQ(code_of([] { parse("y,x\n1,2,3\n"); }), ErrorCode::non_numeric_cell);
  EXPECT_EQ(code_of([] { parse("y,x\n"); }), ErrorCode::empty_data);
  EXPECT_EQ(code_of([] { parse(""); }), ErrorCode::empty_data);
  try {
    parse("y,x\n1,2\n3,oops\n");
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("'x'"), std::string::npos);
  }
}

TEST(ReadCsv, WriteRoundTripIsExact) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z;
  std::ostringstream src;
  src << "y,a,b\n";
  for (int i = 0; i < 50; ++i) {
    src << format_double(z(rng) * 1e-7) << ',' << format_double(z(rng) * 1e9) << ','
        << format_double(1.0 / 3.0 + i) << '\n';
  }
  const CsvData first = parse(src.str());
  std::ostringstream written;
  write_csv(written, first);
  const CsvData second = parse(written.str());
  EXPECT_EQ(first.data.x, second.data.x);
  EXPECT_EQ(first.data.y, second.data.y);
  EXPECT_EQ(first.x_names, second.x_names);
}

TEST(RunCommand, FitMatchesDerivedExample) {
  const Report r = run_command(data_config(Command::fit));
  ASSERT_FALSE(r.error);
  const auto beta = r.results["beta_hat"].get<std::vector<double>>();
  EXPECT_NEAR(beta[0], -1.0 / 3.0, 1e-12);
  EXPECT_NEAR(beta[1], 2.0, 1e-12);
  const auto se = r.results["se"]["hc0"].get<std::vector<double>>();
  EXPECT_NEAR(se[0], std::sqrt(7.0 / 54.0), 1e-12);
  EXPECT_NEAR(se[1], std::sqrt(1.0 / 18.0), 1e-12);
  EXPECT_TRUE(r.results["se"].contains("classical"));
}

TEST(RunCommand, StochasticCommandsNeedSeed) {
  RunConfig c = data_config(Command::bootstrap);
  const Report r = run_command(c);
  ASSERT_TRUE(r.error);
  EXPECT_EQ(r.exit_code(), 2);
  c.seed = 1;
  c.alpha = 1.5;
  EXPECT_EQ(run_command(c).exit_code(), 2);
}

TEST(RunCommand, SimulateSingleReplication) {
  RunConfig c;
  c.command = Command::simulate;
  c.dgp = DgpKind::fixed_x_nonidentical_mean;
  c.n = 50;
  c.reps = 1;
  c.b = 99;
  c.seed = 4;
  const Report r = run_command(c);
  ASSERT_FALSE(r.error);
  for (const auto& m : r.results["coverage"])
    for (double cov : m["coverage"].get<std::vector<double>>()) EXPECT_TRUE(cov == 0.0 || cov == 1.0);
  EXPECT_NE(r.coverage_csv.find("bootstrap_ellipsoid"), std::string::npos);
}

TEST(RunCommand, ReplayAndThreadsAreByteIdentical) {
  std::vector<RunConfig> configs;
  RunConfig t = data_config(Command::test);
  t.reference = Reference::bootstrap;
  t.b = 200;
  t.seed = 9;
  configs.push_back(t);
  RunConfig b = data_config(Command::bootstrap);
  b.b = 300;
  b.m = 2;
  b.seed = 10;
  configs.push_back(b);
  RunConfig s;
  s.command = Command::simulate;
  s.dgp = DgpKind::heteroscedastic_iid;
  s.n = 60;
  s.reps = 30;
  s.b = 99;
  s.seed = 11;
  configs.push_back(s);
  RunConfig k;
  k.command = Command::check;
  k.dgp = DgpKind::quadratic_mean_iid;
  k.n = 200;
  k.seed = 12;
  configs.push_back(k);

  for (RunConfig c : configs) {
    c.threads = 1;
    const Report one = run_command(c);
    ASSERT_FALSE(one.error) << one.dump();
    c.threads = 4;
    EXPECT_EQ(run_command(c).dump(), one.dump());
    RunConfig replay = config_from_json(nlohmann::json::parse(one.dump()));
    replay.threads = 3;
    EXPECT_EQ(run_command(replay).dump(), one.dump());
  }
}

TEST(RunCommand, TestCoordinateByNameOrIndex) {
  RunConfig c = data_config(Command::test);
  c.coord = "x";
  c.null = {2.0};
  const Report by_name = run_command(c);
  ASSERT_FALSE(by_name.error);
  EXPECT_NEAR(by_name.results["test"]["p_value"].get<double>(), 1.0, 1e-9);
  c.coord = "1";
  EXPECT_EQ(run_command(c).results, by_name.results);
  c.coord = "nope";
  EXPECT_EQ(run_command(c).exit_code(), 2);
}

TEST(Main, ExitCodes) {
  std::string out;
  EXPECT_EQ(run({"fit", "--data", kExample, "--response", "y", "--add-intercept"}, &out), 0);
  EXPECT_NE(out.find("\"beta_hat\""), std::string::npos);
  EXPECT_EQ(run({"fit", "--data", kExample, "--response", "missing"}, &out), 3);
  EXPECT_NE(out.find("\"missing_column\""), std::string::npos);
  EXPECT_EQ(run({"fit", "--bogus"}), 2);
  EXPECT_EQ(run({}), 2);
  EXPECT_EQ(run({"fit", "--data", kExample, "--response", "y", "--variance", "hc7"}), 2);

  // Intercept plus a duplicate of it: singular design.
  const auto dir = std::filesystem::temp_directory_path();
  const auto path = dir / "leanreg_singular.csv";
  std::ofstream(path) << "y,a,b\n1,1,1\n2,1,1\n3,1,1\n";
  EXPECT_EQ(run({"fit", "--data", path.string(), "--response", "y"}, &out), 4);
  EXPECT_NE(out.find("singular_design"), std::string::npos);
}

TEST(Main, SeedFromEnvironmentAndConfigReplay) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto report = (dir / "leanreg_sim.json").string();
  ::setenv("LEANREG_SEED", "77", 1);
  ASSERT_EQ(run({"simulate", "--dgp", "quadratic_mean_iid", "--n", "40", "--reps", "5", "--B", "49",
                 "--out", report}),
            0);
  ::unsetenv("LEANREG_SEED");
  std::ifstream in(report);
  const std::string first((std::istreambuf_iterator<char>(in)), {});
  EXPECT_NE(first.find("\"seed\": 77"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(dir / "leanreg_sim.csv"));

  std::string replayed;
  ASSERT_EQ(run({"--config", report, "--threads", "2"}, &replayed), 0);
  EXPECT_EQ(replayed, first);
}

#include <gtest/gtest.h>

#include <sstream>

#include "mpet/experiment.hpp"

namespace {

using namespace mpet;

std::string render(const Table& t, OutputFormat f) {
  std::ostringstream os;
  emit_table(t, f, os);
  return os.str();
}

std::string config_error(std::string_view text, const std::vector<std::string>& overrides = {}) {
  try {
    (void)parse_config(text, overrides);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

TEST(Config, EmptyTextGivesDefaultErrorGrid) {
  const RunConfig c = parse_config("");
  EXPECT_EQ(c.experiment, Experiment::BiotErrors);
  EXPECT_EQ(c.mesh, (std::vector<int>{8, 16, 32, 64}));
  EXPECT_EQ(c.r_inv, (std::vector<double>{1.0, 1e2, 1e3, 1e4, 1e8, 1e16}));
  EXPECT_EQ(c.alpha_p, (std::vector<double>{1e-4}));
  EXPECT_EQ(c.lambda, (std::vector<double>{1e4}));
  EXPECT_DOUBLE_EQ(c.assembly.penalty, 10.0);
  EXPECT_DOUBLE_EQ(c.solver.reduction_tol, 1e-8);
  EXPECT_DOUBLE_EQ(c.tau, 1.0);
}

TEST(Config, FileValuesAndComments) {
  const RunConfig c = parse_config(
      "# comment line\n"
      "experiment = biot-minres\n"
      "mesh = 4, 8   # trailing comment\n"
      "r_inv = log:0:4:2\n"
      "reduction_tol = 1e-6\n"
      "policy = serial\n"
      "format = markdown\n");
  EXPECT_EQ(c.experiment, Experiment::BiotMinres);
  EXPECT_EQ(c.mesh, (std::vector<int>{4, 8}));
  ASSERT_EQ(c.r_inv.size(), 3u);
  EXPECT_DOUBLE_EQ(c.r_inv[2], 1e4);
  EXPECT_DOUBLE_EQ(c.solver.reduction_tol, 1e-6);
  EXPECT_EQ(c.solver.policy, ExecPolicy::Serial);
  EXPECT_EQ(c.format, OutputFormat::Markdown);
  // Grids not mentioned keep the experiment's defaults.
  EXPECT_EQ(c.lambda, (std::vector<double>{1.0, 1e4, 1e8}));
}

TEST(Config, OverridesWinOverFile) {
  const RunConfig c = parse_config("mesh = 4\nreduction_tol = 1e-4\n", {"reduction_tol=1e-6", "mesh=16,32"});
  EXPECT_DOUBLE_EQ(c.solver.reduction_tol, 1e-6);
  EXPECT_EQ(c.mesh, (std::vector<int>{16, 32}));
}

TEST(Config, ReductionTolReachesTheSolver) {
  const RunConfig loose = parse_config("", {"experiment=biot-minres", "mesh=8", "alpha_p=0", "lambda=1", "r_inv=1",
                                            "reduction_tol=1e-2", "polish_tol=0"});
  const RunConfig tight = parse_config("", {"experiment=biot-minres", "mesh=8", "alpha_p=0", "lambda=1", "r_inv=1",
                                            "reduction_tol=1e-10", "polish_tol=0"});
  const auto a = run_experiment(loose);
  const auto b = run_experiment(tight);
  EXPECT_LT(std::stoi(a.table.rows[0][3]), std::stoi(b.table.rows[0][3]));
}

TEST(Config, MalformedGridNamesTheField) {
  const std::string msg = config_error("r_inv = 1E0,,1E4\n");
  EXPECT_NE(msg.find("r_inv"), std::string::npos) << msg;
  EXPECT_NE(msg.find("line 1"), std::string::npos) << msg;
  const std::string flag = config_error("", {"lambda=1,x"});
  EXPECT_NE(flag.find("flag 'lambda'"), std::string::npos) << flag;
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_NE(config_error("colour = red\n").find("colour"), std::string::npos);
  EXPECT_NE(config_error("mesh = 12\n").find("power of two"), std::string::npos);
  EXPECT_NE(config_error("mesh = 512\n").find("max_mesh"), std::string::npos);
  EXPECT_FALSE(config_error("experiment = table9\n").empty());
  EXPECT_FALSE(config_error("just some words\n").empty());
  EXPECT_FALSE(config_error("r_inv = -1\n").empty());
  EXPECT_FALSE(config_error("penalty = 0\n").empty());
  EXPECT_FALSE(config_error("reduction_tol = 2\n").empty());
  EXPECT_FALSE(config_error("", {"experiment=converge", "mesh=8"}).empty());
  EXPECT_FALSE(config_error("", {"experiment=spectra", "networks=9"}).empty());
  EXPECT_FALSE(config_error("r_inv = log:0:4\n").empty());
}

TEST(Config, EveryKeyIsAccepted) {
  // Each documented key parses with a representative value.
  const std::map<std::string, std::string> sample = {
      {"experiment", "spectra"}, {"mesh", "2"},       {"max_mesh", "64"},        {"alpha_p", "1"},
      {"lambda", "1"},           {"r_inv", "1"},      {"k1_factors", "1"},       {"k2_factors", "1"},
      {"betas", "0"},            {"lambda_factors", "1"}, {"k_factors", "1"},   {"k3_factors", "1"},
      {"networks", "1"},         {"samples", "2"},    {"tau", "0.5"},            {"h2_term", "false"},
      {"penalty", "12"},         {"quad_degree", "4"}, {"rhs_quad_degree", "8"}, {"reduction_tol", "1e-6"},
      {"polish_tol", "0"},       {"refine_passes", "2"}, {"max_iters", "50"}, {"policy", "parallel"},    {"format", "csv"},
      {"output", "x.csv"},       {"seed", "42"}};
  for (const auto& key : config_keys()) {
    ASSERT_TRUE(sample.count(key)) << key;
    EXPECT_NO_THROW(parse_config(key + " = " + sample.at(key) + "\n")) << key;
  }
}

TEST(Table, FormatHelpers) {
  EXPECT_EQ(format_sci(0.21), "2.1E-1");
  EXPECT_EQ(format_sci(13.0), "1.3E1");
  EXPECT_EQ(format_sci(1.0), "1.0E0");
  EXPECT_EQ(format_sci(2.3e-9), "2.3E-9");
  EXPECT_EQ(format_sci(0.0), "0");
  EXPECT_EQ(format_param(1e16), "1E16");
  EXPECT_EQ(format_param(5e-10), "5E-10");
  EXPECT_EQ(format_param(2.5e3), "2.5E3");
  EXPECT_EQ(format_factor(0.004), "<0.01");
  EXPECT_EQ(format_factor(0.375), "0.38");
  EXPECT_EQ(format_h(64), "1/64");
}

TEST(Table, ErrorTableHeader) {
  const RunConfig c = default_config(Experiment::BiotErrors);
  std::ostringstream os;
  emit_table({experiment_header(c), {}}, OutputFormat::Csv, os);
  EXPECT_EQ(os.str(), "h,norm,1E0,1E2,1E3,1E4,1E8,1E16\n");
}

TEST(Table, MinresHeaderPairsIterationsAndFactors) {
  const auto h = experiment_header(default_config(Experiment::BiotMinres));
  ASSERT_EQ(h.size(), 3u + 12u);
  EXPECT_EQ(h[3], "1E0 it");
  EXPECT_EQ(h[4], "1E0 factor");
  EXPECT_EQ(h.back(), "1E16 factor");
}

TEST(Table, EmptyResultsGiveHeaderOnly) {
  const Table t{{"a", "b"}, {}};
  EXPECT_EQ(render(t, OutputFormat::Csv), "a,b\n");
  EXPECT_EQ(render(t, OutputFormat::Markdown), "| a | b |\n| --- | --- |\n");
}

TEST(Table, CsvQuotingAndMarkdownEscaping) {
  const Table t{{"x", "y"}, {{"1,2", "say \"hi\""}, {"a|b", "c"}}};
  EXPECT_EQ(render(t, OutputFormat::Csv), "x,y\n\"1,2\",\"say \"\"hi\"\"\"\na|b,c\n");
  EXPECT_NE(render(t, OutputFormat::Markdown).find("a\\|b"), std::string::npos);
  EXPECT_THROW(render({{"x"}, {{"1", "2"}}}, OutputFormat::Csv), std::invalid_argument);
}

// The CSV and markdown renderings carry the same cell strings.
TEST(Table, FormatIndependentPayload) {
  RunConfig c = parse_config("", {"mesh=4,8", "r_inv=1,1e8"});
  const Table t = run_experiment(c).table;
  const std::string csv = render(t, OutputFormat::Csv);
  const std::string md = render(t, OutputFormat::Markdown);
  std::istringstream cs(csv), ms(md);
  std::string cl, ml;
  std::getline(ms, ml);
  std::getline(cs, cl);
  std::getline(ms, ml);  // separator row
  std::vector<std::string> from_csv, from_md;
  while (std::getline(cs, cl)) {
    std::istringstream ls(cl);
    for (std::string cell; std::getline(ls, cell, ',');) from_csv.push_back(cell);
  }
  while (std::getline(ms, ml)) {
    std::istringstream ls(ml.substr(1));
    for (std::string cell; std::getline(ls, cell, '|');) from_md.push_back(cell.substr(1, cell.size() - 2));
  }
  EXPECT_EQ(from_csv, from_md);
  EXPECT_EQ(from_csv.size(), 2u * 3u * 4u);
}

TEST(Experiment, DeterministicOutput) {
  const RunConfig c = parse_config("", {"experiment=spectra", "mesh=2", "networks=1,2", "alpha_p=1", "lambda=1,1e8",
                                        "r_inv=1", "samples=3", "seed=11"});
  const std::string a = render(run_experiment(c).table, OutputFormat::Csv);
  const std::string b = render(run_experiment(c).table, OutputFormat::Csv);
  EXPECT_EQ(a, b);
  RunConfig other = c;
  other.seed = 12;
  EXPECT_NE(a, render(run_experiment(other).table, OutputFormat::Csv));
}

TEST(Experiment, ConvergeReportsRatios) {
  const RunConfig c = parse_config("", {"experiment=converge", "mesh=8,16", "r_inv=1"});
  const Table t = run_experiment(c).table;
  ASSERT_EQ(t.rows.size(), 6u);
  EXPECT_EQ(t.rows[0][6], "");
  const double ratio = std::stod(t.rows[1][6]);
  EXPECT_NEAR(ratio, 2.0, 0.2);
}

}  // namespace

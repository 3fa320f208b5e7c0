#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "geoeq/report/commands.hpp"
#include "geoeq/report/writer.hpp"

namespace rep = geoeq::report;

namespace {

rep::RunConfig figure(const std::string& name) {
  rep::RunConfig c;
  c.command = rep::Command::figure;
  c.figure = name;
  return c;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> fields(const std::string& line) { return rep::split_list(line); }

double number(const rep::Cell& c) { return std::get<double>(c); }

}  // namespace

TEST(Csv, FormatAndQuoting) {
  rep::Table t{"t", {"a", "b,c"}, {{1.0 / 3.0, std::string("x")}, {1e-9, std::string("y\"z")}}};
  const auto csv = rep::to_csv(t);
  EXPECT_EQ(csv, "a,\"b,c\"\n0.333333333333,x\n1e-09,\"y\"\"z\"\n");
  EXPECT_EQ(csv.find('\r'), std::string::npos);
}

TEST(Figure1, WageCurves) {
  const auto a = rep::run(figure("fig1"));
  ASSERT_EQ(a.tables.size(), 1u);
  const auto& t = a.tables[0];
  EXPECT_EQ(t.columns, (std::vector<std::string>{"h", "w@phi=0.1", "w@phi=0.5", "w@phi=0.7"}));
  ASSERT_EQ(t.rows.size(), 513u);
  const auto& half = t.rows[256];
  EXPECT_EQ(number(half[0]), 0.5);
  for (int k = 1; k <= 3; ++k) EXPECT_EQ(number(half[k]), 1.0);
  EXPECT_NEAR(number(t.rows.back()[1]), std::sqrt(10.0), 1e-12);
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    for (int k = 1; k <= 3; ++k) EXPECT_GT(number(t.rows[i][k]), number(t.rows[i - 1][k]));
  }
  const auto csv = lines(rep::to_csv(t));
  EXPECT_EQ(csv[0], "h,w@phi=0.1,w@phi=0.5,w@phi=0.7");
  EXPECT_EQ(csv[257], "0.5,1,1,1");
  EXPECT_EQ(csv.back(), "1,3.16227766017,1.41421356237,1.19522860933");
}

TEST(Figure2, UtilityCurves) {
  const auto a = rep::run(figure("fig2"));
  const auto& t = a.tables[0];
  EXPECT_EQ(t.columns,
            (std::vector<std::string>{"h", "delta_u@theta=0", "delta_u@theta=1", "delta_u@theta=2"}));
  for (int k = 1; k <= 3; ++k) EXPECT_EQ(number(t.rows[256][k]), 0.0);
  const auto& row = t.rows[static_cast<std::size_t>(0.8 * 512)];
  EXPECT_GT(number(row[3]), number(row[1]));
  EXPECT_EQ(a.json["shadow_checks"]["theta_order_violations_above_half"], 0);
  EXPECT_LT(a.json["shadow_checks"]["max_antisymmetry_error"].get<double>(), 1e-12);
}

TEST(Figure5, OverlayAndCoherence) {
  const auto a = rep::run(figure("fig5"));
  const auto& t = a.tables[0];
  EXPECT_EQ(t.columns, (std::vector<std::string>{"h", "delta_u@phi=0.3", "delta_u@phi=0.5",
                                                 "delta_u@phi=0.9", "delta_t"}));
  ASSERT_EQ(t.rows.size(), 511u);
  EXPECT_EQ(number(t.rows.front()[0]), 1.0 / 512);
  for (int k = 1; k <= 4; ++k) EXPECT_EQ(number(t.rows[255][k]), 0.0);
  EXPECT_TRUE(a.json["shadow_checks"]["crossings_match_equilibria"].get<bool>());
  const auto& per = a.json["results"]["per_phi"];
  EXPECT_EQ(per[0]["grid_crossings_above_half"].size(), 1u);
  EXPECT_EQ(per[1]["grid_crossings_above_half"].size(), 1u);
  EXPECT_EQ(per[2]["grid_crossings_above_half"].size(), 0u);
}

TEST(Sweep, TableAndBifurcationRecord) {
  rep::RunConfig c;
  c.command = rep::Command::sweep;
  c.param = geoeq::SweepParameter::mu;
  c.phi = 0.4;
  c.theta = 1.0;
  c.steps = 41;
  const auto a = rep::run(c);
  EXPECT_EQ(a.tables[0].columns,
            (std::vector<std::string>{"parameter", "h_star", "stability", "kind"}));
  const auto& bif = a.json["results"]["bifurcations"];
  ASSERT_EQ(bif.size(), 1u);
  EXPECT_EQ(bif[0]["threshold_match"]["convention"], "mu_d");
  EXPECT_EQ(bif[0]["criticality"], "supercritical");
  EXPECT_EQ(a.json["shadow_checks"]["stable_branch_monotonicity_violations"], 0);
  const auto svg = rep::render_svg(*a.plot);
  EXPECT_NE(svg.find("stroke-dasharray"), std::string::npos);
  EXPECT_NE(svg.find("supercritical"), std::string::npos);
}

TEST(Thresholds, Table) {
  rep::RunConfig c;
  c.command = rep::Command::thresholds;
  c.sigma = 2.0;
  c.phi = 0.4;
  const auto a = rep::run(c);
  ASSERT_EQ(a.tables.size(), 2u);
  const auto& t = a.tables[0];
  EXPECT_EQ(std::get<std::string>(t.rows[0][0]), "mu_d");
  EXPECT_NEAR(number(t.rows[0][1]), 1.8 / 3.4, 1e-15);
  EXPECT_NEAR(number(t.rows[5][1]), 0.75, 1e-15);  // phi_b at mu = 0.2
  EXPECT_EQ(a.json["shadow_checks"]["mu_threshold_match_log_utility"]["convention"], "mu_d");
  EXPECT_EQ(a.tables[1].columns, (std::vector<std::string>{"w", "X", "mu_p"}));
}

TEST(Equilibria, Table) {
  rep::RunConfig c;
  c.command = rep::Command::equilibria;
  c.sigma = 2.5;
  c.phi = 0.3;
  const auto a = rep::run(c);
  const auto csv = lines(rep::to_csv(a.tables[0]));
  EXPECT_EQ(csv[0], "h_star,w,kind,stability,slope,residual");
  ASSERT_EQ(csv.size(), 4u);
  EXPECT_EQ(fields(csv[2])[2], "symmetric_dispersion");
  EXPECT_EQ(fields(csv[2])[3], "unstable");
  EXPECT_EQ(fields(csv[3])[3], "stable");
}

TEST(Determinism, FigureOutputsIgnoreThreadCount) {
  for (const auto& name : rep::figure_names()) {
    auto c = figure(name);
    c.threads = 1;
    const auto a = rep::run(c);
    c.threads = 0;
    const auto b = rep::run(c);
    ASSERT_EQ(a.tables.size(), b.tables.size());
    for (std::size_t i = 0; i < a.tables.size(); ++i) {
      EXPECT_EQ(rep::to_csv(a.tables[i]), rep::to_csv(b.tables[i])) << name;
    }
    EXPECT_EQ(a.json.dump(), b.json.dump()) << name;
  }
}

TEST(Config, FlagsWinOverFile) {
  rep::RunConfig c;
  c.sigma = 3.0;
  const auto j = nlohmann::json::parse(R"({"sigma": 5, "phi": 0.25, "thetas": [0, 2], "format": "csv,svg"})");
  rep::merge_config_file(c, j);
  EXPECT_EQ(*c.sigma, 3.0);
  EXPECT_EQ(*c.phi, 0.25);
  EXPECT_EQ(c.thetas, (std::vector<double>{0, 2}));
  EXPECT_EQ(c.formats, (std::vector<std::string>{"csv", "svg"}));
  EXPECT_THROW(rep::merge_config_file(c, nlohmann::json::parse(R"({"grid": "x"})")),
               geoeq::ConfigError);
}

TEST(Config, Validation) {
  rep::RunConfig c;
  c.phi = 0.5;
  c.tau = 2.0;
  EXPECT_THROW(rep::run(c), geoeq::ConfigError);
  c = {};
  c.steps = 1;
  EXPECT_THROW(rep::run(c), geoeq::ConfigError);
  c = {};
  c.formats = {"pdf"};
  EXPECT_THROW(rep::run(c), geoeq::ConfigError);
  c = figure("fig9");
  EXPECT_THROW(rep::run(c), geoeq::ConfigError);
  c = {};
  c.phi = 1.5;
  EXPECT_THROW(rep::run(c), geoeq::DomainError);
  c = {};
  c.tau = 2.0;
  EXPECT_NEAR(rep::run(c).json["config"]["phi"].get<double>(), 0.5, 1e-15);
}

TEST(Writer, WritesRequestedFormats) {
  const auto dir = std::filesystem::temp_directory_path() / "geoeq_writer_test";
  std::filesystem::remove_all(dir);
  const auto a = rep::run(figure("fig1"));
  const auto written = rep::write_artifacts(a, dir, {"csv", "svg"});
  ASSERT_EQ(written.size(), 2u);
  EXPECT_TRUE(std::filesystem::exists(dir / "fig1.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "fig1.svg"));
  EXPECT_FALSE(std::filesystem::exists(dir / "fig1.json"));
  std::ifstream in(dir / "fig1.csv", std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), rep::to_csv(a.tables[0]));
  std::filesystem::remove_all(dir);
}

TEST(Writer, ReportsPathOnFailure) {
  const auto file = std::filesystem::temp_directory_path() / "geoeq_not_a_dir";
  std::ofstream(file) << "x";
  const auto a = rep::run(figure("fig1"));
  try {
    rep::write_artifacts(a, file / "sub", {"csv"});
    FAIL() << "expected IoError";
  } catch (const geoeq::IoError& e) {
    EXPECT_NE(e.path().find("geoeq_not_a_dir"), std::string::npos);
  }
  std::filesystem::remove(file);
}

#include <gtest/gtest.h>

#include "iimhhl/experiment.hpp"

using namespace iimhhl;
using namespace iimhhl::experiment;

namespace {

std::string parse_error(const std::string& text) {
  try {
    parse_sweep_spec(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SpecParseError);
    return e.what();
  }
  return "no error";
}

const char* kSmallSweep = R"({
  "kappa": [10], "solution": [1, 2], "p": [4], "shots": [200],
  "strategy": ["none", "abs-ratio"], "repeats": 2, "iters": 3
})";

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Median, OddEvenEmpty) {
  EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(median({4.0, 1.0, 2.0, 3.0}), 2.5);
  EXPECT_TRUE(std::isnan(median({})));
}

TEST(Format, NumbersRoundTrip) {
  for (double v : {0.1, 1e-17, 123456.789, 2.0 / 3.0}) EXPECT_EQ(std::stod(format_number(v)), v);
}

TEST(Sweep, ParsesAndRunsCartesianProduct) {
  const auto spec = parse_sweep_spec(kSmallSweep);
  EXPECT_EQ(spec.solution.size(), 2u);
  EXPECT_EQ(spec.strategy[1], ShiftStrategy::AbsRatio);
  const auto csv = run_sweep(spec);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kSweepHeader);
  EXPECT_EQ(count_lines(csv), 1u + 1 * 2 * 1 * 1 * 2 * 2 * 3);
  EXPECT_EQ(csv, run_sweep(spec));
}

TEST(Sweep, EmptyAxisGivesHeaderOnly) {
  const auto spec = parse_sweep_spec(R"({"kappa": [], "solution": [1], "p": [4], "shots": [10], "strategy": ["none"]})");
  EXPECT_EQ(run_sweep(spec), std::string(kSweepHeader) + "\n");
}

TEST(Sweep, Diagnostics) {
  EXPECT_NE(parse_error("{\n  \"kappa\": [10,\n}").find("line 3"), std::string::npos);
  EXPECT_NE(parse_error(R"({"kappa": 10, "solution": [1], "p": [4], "shots": [1], "strategy": []})").find("'kappa'"),
            std::string::npos);
  EXPECT_NE(parse_error(R"({"kappa": [10], "solution": [3], "p": [4], "shots": [1], "strategy": []})")
                .find("solution[0]"),
            std::string::npos);
  EXPECT_NE(parse_error(R"({"kappa": [10], "solution": [1], "p": [4], "shots": [0], "strategy": []})").find("shots[0]"),
            std::string::npos);
  EXPECT_NE(parse_error(R"({"kappa": [10], "solution": [1], "p": [4], "shots": [1], "strategy": ["abs_ratio"]})")
                .find("strategy[0]"),
            std::string::npos);
  EXPECT_NE(parse_error(R"({"kappa": [10], "solution": [1], "p": [4], "shots": [1]})").find("'strategy' missing"),
            std::string::npos);
  EXPECT_NE(parse_error(R"({"kappa": [10], "solution": [1], "p": [4], "shots": [1], "strategy": [], "mode": "x"})")
                .find("'mode'"),
            std::string::npos);
  EXPECT_NE(parse_error(R"({"kappa": [10], "solution": [1], "p": [4], "shots": [1], "strategy": [], "name": "a/b"})")
                .find("'name'"),
            std::string::npos);
}

TEST(Figure, LongFormatAndMedians) {
  FigureOptions opt;
  opt.repeats = 3;
  opt.iterations = 4;
  const auto fig = run_figure("f2", opt);
  const auto csv = figure_csv(fig.rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kFigureHeader);
  // 6 series x (3 seeds + median) x 4 iterations.
  EXPECT_EQ(fig.rows.size(), 6u * 4u * 4u);
  EXPECT_EQ(fig.series.size(), 6u);
  ASSERT_TRUE(fig.resolution.has_value());
  EXPECT_EQ(*fig.resolution, 1.0 / 16.0);
  std::vector<double> first;
  double med = 0.0;
  for (const auto& r : fig.rows) {
    if (r.strategy != "none" || r.iteration != 0) continue;
    if (r.seed == "median") med = r.rel_error;
    else first.push_back(r.rel_error);
  }
  EXPECT_EQ(med, median(first));
  EXPECT_EQ(csv, figure_csv(run_figure("f2", opt).rows));
}

TEST(Figure, BudgetUsesMeasurementAxis) {
  FigureOptions opt;
  opt.repeats = 1;
  opt.iterations = 3;
  const auto fig = run_figure("f7", opt);
  ASSERT_EQ(fig.series.size(), 2u);
  EXPECT_EQ(fig.series[0].x, (std::vector<double>{1000, 2000, 3000}));
  EXPECT_EQ(fig.series[1].x, (std::vector<double>{10000, 20000, 30000}));
}

TEST(Figure, UnknownIdIsSpecError) {
  try {
    run_figure("f9", FigureOptions{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SpecParseError);
  }
}

TEST(Svg, HasSeriesAndResolutionGuide) {
  FigureResult fig;
  fig.id = "t";
  fig.title = "a < b";
  fig.x_label = "iteration";
  fig.series.push_back({"none", {0, 1, 2}, {1e-1, 1e-3, 0.0}, false});
  fig.resolution = 1.0 / 16;
  const auto svg = render_svg(fig);
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("data-series=\"none\""), std::string::npos);
  EXPECT_NE(svg.find("data-series=\"resolution\""), std::string::npos);
  EXPECT_NE(svg.find("a &lt; b"), std::string::npos);
  EXPECT_EQ(svg.find("nan"), std::string::npos);
  EXPECT_EQ(svg.find("inf"), std::string::npos);
}

TEST(Outputs, AtomicCommitWritesAll) {
  const auto dir = std::filesystem::temp_directory_path() / "iimhhl_atomic_test";
  std::filesystem::remove_all(dir);
  AtomicOutputs out;
  out.add(dir / "a.csv", "x\n");
  out.add(dir / "b.svg", "<svg/>");
  out.commit();
  EXPECT_TRUE(std::filesystem::exists(dir / "a.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "b.svg"));
  EXPECT_FALSE(std::filesystem::exists(dir / "a.csv.partial"));
  std::filesystem::remove_all(dir);
}

TEST(Outputs, ValidateSpec) {
  ExperimentSpec spec;
  spec.name = "ok-name_1";
  EXPECT_NO_THROW(validate(spec));
  spec.name = "../bad";
  EXPECT_THROW(validate(spec), Error);
  spec.name = "fine";
  spec.repeats = 0;
  EXPECT_THROW(validate(spec), Error);
}

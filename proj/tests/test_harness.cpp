#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ermlab/harness.hpp"

using namespace ermlab;

namespace {

ExperimentConfig small_config(std::vector<Reduction> reductions, std::vector<std::size_t> ns, int trials) {
  ExperimentConfig c;
  c.reductions = std::move(reductions);
  c.n_values = std::move(ns);
  c.trials = trials;
  c.seed = 5;
  c.threads = 2;
  return c;
}

std::size_t count_table_rows(const std::string& markdown) {
  std::istringstream in(markdown);
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line))
    if (line.rfind("| ", 0) == 0) ++rows;
  return rows;
}

}  // namespace

TEST_CASE("cells alternate planted YES and NO with distinct seeds") {
  const auto cells = expand_cells(small_config({Reduction::Svm, Reduction::GradRelu}, {4, 8}, 4));
  REQUIRE(cells.size() == 16);
  std::set<std::uint64_t> seeds;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    CHECK(cells[i].index == i);
    CHECK(cells[i].planted == (cells[i].trial % 2 == 0 ? Planted::Yes : Planted::No));
    seeds.insert(cells[i].seed);
  }
  CHECK(seeds.size() == cells.size());
}

TEST_CASE("trial records agree with the oracle") {
  ExperimentConfig config = small_config({Reduction::Svm}, {8}, 1);
  const auto cells = expand_cells(config);
  const TrialRecord yes = run_trial(config, cells[0]);
  CHECK(yes.oracle == Answer::Yes);
  CHECK(yes.agree);
  CHECK_FALSE(yes.error.has_value());

  config = small_config({Reduction::GradRelu}, {8}, 2);
  const TrialRecord no = run_trial(config, expand_cells(config)[1]);
  CHECK(no.oracle == Answer::No);
  CHECK(no.verdict == Answer::No);
  CHECK(no.agree);
  CHECK(no.stat_lo.find_first_not_of("0.e+-") == std::string::npos);
}

TEST_CASE("forced tie is recorded as UNDECIDABLE") {
  ExperimentConfig config = small_config({Reduction::Kpca}, {4}, 1);
  config.options.force_tie = true;
  const TrialRecord r = run_trial(config, expand_cells(config)[0]);
  CHECK(r.verdict == Answer::Undecidable);
  CHECK_FALSE(r.agree);
  CHECK_FALSE(r.error.has_value());
  RunReport report;
  report.records = {r};
  CHECK(report.summary().undecidable == 1);
  CHECK(report.summary().agreed == 0);
  CHECK(report.exit_code() == 2);
}

TEST_CASE("failures are recorded, not dropped") {
  ExperimentConfig config = small_config({Reduction::Krr}, {4}, 1);
  config.options.c_multiplier = "1";
  const RunReport report = run_suite(config);
  REQUIRE(report.records.size() == 1);
  CHECK(report.records[0].error.has_value());
  CHECK(report.summary().failed == 1);
  CHECK(report.exit_code() == 1);
}

TEST_CASE("configuration validation") {
  CHECK_THROWS_AS(run_suite(small_config({}, {4}, 1)), ParameterError);
  CHECK_THROWS_AS(run_suite(small_config({Reduction::Svm}, {1}, 1)), ParameterError);
  CHECK_THROWS_AS(run_suite(small_config({Reduction::Svm}, {4}, 0)), ParameterError);
  CHECK_THROWS_AS(config_from_json(R"({"reductions": "all", "bogus": 1})"), ParseError);
  CHECK_THROWS_AS(config_from_json("[1,2]"), ParseError);
  CHECK_THROWS_AS(parse_format("xml"), ParameterError);
}

TEST_CASE("config JSON round trip") {
  const ExperimentConfig config = config_from_json(
      R"({"reductions": ["svm", "nn_logistic"], "n": [4, 6], "trials": 3, "seed": 9, "c_multiplier": "50",
          "T": 20, "lambda": "0.01", "precision_start": 300, "outputs": {"csv": "x.csv"}})");
  CHECK(config.reductions == std::vector<Reduction>{Reduction::Svm, Reduction::NnLogistic});
  CHECK(config.n_values == std::vector<std::size_t>{4, 6});
  CHECK(config.options.T == 20);
  CHECK(config.options.precision == 300);
  CHECK(config.csv_path == "x.csv");
  const ExperimentConfig again = config_from_json(config_to_json(config));
  CHECK(config_to_json(again) == config_to_json(config));
  CHECK(config_from_json(R"({"reductions": "all", "n": [4]})").reductions.size() == std::size(kAllReductions));
}

TEST_CASE("reports: CSV header, markdown rows, JSON round trip") {
  ExperimentConfig config = small_config({Reduction::GradRelu, Reduction::Kpca}, {4, 6}, 3);
  const RunReport report = run_suite(config);
  REQUIRE(report.records.size() == 12);
  CHECK(report.exit_code() == 0);

  const std::string csv = emit_report(report, ReportFormat::Csv);
  CHECK(csv.substr(0, csv.find('\n')) == "trial,reduction,n,d,t,oracle,verdict,agree,stat_lo,stat_hi,thresh_lo,thresh_hi,bits,ms");
  CHECK(count_table_rows(emit_report(report, ReportFormat::Markdown)) == report.records.size() + 1);

  const RunReport back = report_from_json(emit_report(report, ReportFormat::Json));
  CHECK(back == report);
  CHECK(emit_report(back, ReportFormat::Json) == emit_report(report, ReportFormat::Json));
  CHECK_THROWS_AS(report_from_json("{"), ParseError);
}

TEST_CASE("suite outputs are written to the configured paths") {
  const auto dir = std::filesystem::temp_directory_path() / "ermlab_harness_outputs";
  std::filesystem::create_directories(dir);
  ExperimentConfig config = small_config({Reduction::GradSigmoid}, {5}, 2);
  config.json_path = (dir / "r.json").string();
  config.csv_path = (dir / "r.csv").string();
  config.markdown_path = (dir / "r.md").string();
  const RunReport report = run_suite(config);
  for (const auto& p : {*config.json_path, *config.csv_path, *config.markdown_path})
    CHECK(std::filesystem::file_size(p) > 0);
  std::ifstream in(*config.json_path);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(report_from_json(text.str()) == report);
  std::filesystem::remove_all(dir);

  config.csv_path = "/nonexistent/dir/r.csv";
  config.json_path.reset();
  config.markdown_path.reset();
  CHECK_THROWS_AS(run_suite(config), IoError);
}

TEST_CASE("identical configs give identical untimed reports") {
  ExperimentConfig config = small_config({Reduction::Svm, Reduction::NnHinge, Reduction::GradSigmoid}, {4, 5}, 2);
  const RunReport first = run_suite(config);
  config.threads = 1;
  const RunReport second = run_suite(config);
  CHECK(report_without_timing(first) == report_without_timing(second));
  CHECK(report_without_timing(first).find(",ms") == std::string::npos);
}

TEST_CASE("oracle benchmark rows") {
  BenchConfig config;
  config.n_start = 16;
  config.doublings = 2;
  config.d = 32;
  config.samples = 3;
  config.repeats = 2;
  const RunReport report = bench_scaling(config);
  REQUIRE(report.bench.size() == 3);
  CHECK(report.bench[0].n == 16);
  CHECK(report.bench[2].n == 64);
  CHECK_FALSE(report.bench[0].ratio.has_value());
  CHECK(report.bench[1].ratio.has_value());
  const std::string csv = emit_report(report, ReportFormat::Csv);
  CHECK(csv.rfind("n,d,repeats,median_ms,ratio\n", 0) == 0);
}

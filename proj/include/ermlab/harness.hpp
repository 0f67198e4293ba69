#pragma once

// Experiment runner: generate, reduce, decide, compare with the brute-force
// oracle, and report. Also the oracle timing benchmark.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ermlab/instances.hpp"
#include "ermlab/verdict.hpp"

namespace ermlab {

// Runs the named distinguisher. The network reductions normalize an OVP
// instance first when it is not already normalized.
ReductionVerdict decide(const VectorPairInstance& inst, Reduction reduction, const ReductionOptions& options);

// The instance a reduction actually sees (normalized for the network ones).
VectorPairInstance prepare_instance(const VectorPairInstance& inst, Reduction reduction);

struct ExperimentConfig {
  std::vector<Reduction> reductions;
  std::vector<std::size_t> n_values;
  // Fixed dimension / threshold; max(4, ceil(log2(n)^2)) and max(2, d/4) when absent.
  std::optional<std::size_t> d;
  std::optional<int> t;
  int trials = 25;
  std::uint64_t seed = 1;
  ReductionOptions options;
  // Worker threads; hardware concurrency when 0.
  int threads = 0;
  std::optional<std::string> json_path;
  std::optional<std::string> csv_path;
  std::optional<std::string> markdown_path;

  // ParameterError on an empty reduction set, n < 2, or trials < 1.
  void validate() const;
};

// All reductions, n in {4, 8, 16}, 25 trials each.
ExperimentConfig default_suite_config();
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& config);

// One (reduction, n, trial) cell. Even trials plant a YES, odd ones a NO.
struct TrialCell {
  std::size_t index = 0;
  Reduction reduction = Reduction::Svm;
  std::size_t n = 0;
  int trial = 0;
  Planted planted = Planted::Yes;
  std::uint64_t seed = 0;
};

std::vector<TrialCell> expand_cells(const ExperimentConfig& config);

// The instance a cell generates, before prepare_instance.
GenerateParams cell_params(const ExperimentConfig& config, const TrialCell& cell);

struct TrialRecord {
  std::size_t trial = 0;
  Reduction reduction = Reduction::Svm;
  std::size_t n = 0;
  std::size_t d = 0;
  std::optional<int> t;
  Planted planted = Planted::Yes;
  std::uint64_t seed = 0;
  std::uint64_t digest = 0;
  Answer oracle = Answer::No;
  Answer verdict = Answer::Undecidable;
  bool agree = false;
  // Decimal endpoints, lower rounded down and upper rounded up.
  std::string stat_lo;
  std::string stat_hi;
  std::string thresh_lo;
  std::string thresh_hi;
  long bits = 0;
  int escalations = 0;
  double ms = 0;
  // Set when the reduction threw; the trial counts as failed.
  std::optional<std::string> error;

  bool operator==(const TrialRecord&) const = default;
};

TrialRecord run_trial(const ExperimentConfig& config, const TrialCell& cell);

struct BenchRow {
  std::size_t n = 0;
  std::size_t d = 0;
  int repeats = 0;
  double median_ms = 0;
  // Median over rounds of this size's time over the previous size's time in
  // the same round; absent on the first row.
  std::optional<double> ratio;

  bool operator==(const BenchRow&) const = default;
};

struct Summary {
  std::size_t total = 0;
  std::size_t decided = 0;
  std::size_t agreed = 0;
  std::size_t disagreed = 0;
  std::size_t undecidable = 0;
  std::size_t failed = 0;

  double agreement_rate() const { return decided == 0 ? 1.0 : static_cast<double>(agreed) / decided; }
  double undecidable_rate() const { return total == 0 ? 0.0 : static_cast<double>(undecidable) / total; }
};

struct RunReport {
  std::vector<TrialRecord> records;
  std::vector<BenchRow> bench;

  Summary summary() const;
  Summary summary(Reduction reduction) const;
  // 0 when all decided trials agree and none are undecidable, 1 on any
  // disagreement or failure, 2 when only undecidable trials remain.
  int exit_code() const;

  bool operator==(const RunReport&) const = default;
};

RunReport run_suite(const ExperimentConfig& config);

struct BenchConfig {
  std::size_t n_start = 64;
  int doublings = 3;
  std::size_t d = 64;
  int samples = 9;
  // Oracle calls per sample; calibrated on the first size when 0.
  int repeats = 0;
  std::uint64_t seed = 1;
};

// Median oracle wall time per n, doubling n each row.
RunReport bench_scaling(const BenchConfig& config);

enum class ReportFormat { Json, Csv, Markdown };

ReportFormat parse_format(std::string_view text);
inline constexpr const char* kCsvHeader = "trial,reduction,n,d,t,oracle,verdict,agree,stat_lo,stat_hi,thresh_lo,thresh_hi,bits,ms";

std::string emit_report(const RunReport& report, ReportFormat format);
void emit_report(const RunReport& report, ReportFormat format, const std::string& path);
RunReport report_from_json(const std::string& text);
// The report text with timing columns removed, for determinism checks.
std::string report_without_timing(const RunReport& report);

}  // namespace ermlab

// Command-line front end over the C interface.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ermlab/ermlab.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUndecidable = 2;

struct StringDeleter {
  void operator()(char* p) const { ermlab_string_free(p); }
};
struct InstanceDeleter {
  void operator()(ermlab_instance* p) const { ermlab_instance_free(p); }
};
struct ReportDeleter {
  void operator()(ermlab_report* p) const { ermlab_report_free(p); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;
using Instance = std::unique_ptr<ermlab_instance, InstanceDeleter>;
using Report = std::unique_ptr<ermlab_report, ReportDeleter>;

class CallFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void check(ermlab_status status) {
  if (status != ERMLAB_OK) throw CallFailed(ermlab_last_error());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CallFailed("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CallFailed("cannot open '" + path + "' for writing");
  out << text;
}

std::string emit(const ermlab_report* report, const std::string& format) {
  char* raw = nullptr;
  check(ermlab_report_emit(report, format.c_str(), &raw));
  return OwnedString(raw).get();
}

const char* answer_name(ermlab_answer a) {
  switch (a) {
    case ERMLAB_YES: return "YES";
    case ERMLAB_NO: return "NO";
    default: return "UNDECIDABLE";
  }
}

// Exit code from a report: 0 ok, 1 disagreement or failure, 2 undecidable.
int summarize(const ermlab_report* report) {
  std::size_t total = 0, agreed = 0, disagreed = 0, undecidable = 0, failed = 0;
  int code = 0;
  check(ermlab_report_summary(report, &total, &agreed, &disagreed, &undecidable, &failed, &code));
  std::cerr << "trials " << total << ", agreed " << agreed << ", disagreed " << disagreed << ", undecidable "
            << undecidable << ", failed " << failed << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified reductions from OVP and BHCP to empirical risk minimization"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate an OVP or BHCP instance as JSON");
  std::string gen_kind = "ovp";
  std::size_t gen_n = 8, gen_m = 0, gen_d = 0;
  int gen_t = 0;
  std::string gen_planted = "random";
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  bool gen_normalize = false;
  gen->add_option("--kind", gen_kind, "ovp or bhcp")->check(CLI::IsMember({"ovp", "bhcp"}));
  gen->add_option("--n", gen_n, "Size of A")->check(CLI::PositiveNumber);
  gen->add_option("--m", gen_m, "Size of B (default n)");
  gen->add_option("--d", gen_d, "Dimension (default max(4, ceil(log2(n)^2)))");
  gen->add_option("--t", gen_t, "BHCP distance threshold (default max(2, d/4))");
  gen->add_option("--planted", gen_planted, "yes, no or random")->check(CLI::IsMember({"yes", "no", "random"}));
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--out", gen_out, "Output file (default stdout)");
  gen->add_flag("--normalize", gen_normalize, "Pad to equal-weight B vectors");

  // decide
  auto* dec = app.add_subcommand("decide", "Run one reduction on an instance file");
  std::string dec_reduction;
  std::string dec_input;
  std::optional<long> dec_precision;
  std::optional<std::string> dec_cmult;
  std::string dec_options;
  bool dec_check = false;
  dec->add_option("--reduction", dec_reduction,
                  "svm, svm_bias, svm_soft, kpca, krr, nn, nn_hinge, nn_logistic, grad_relu or grad_sigmoid")
      ->required();
  dec->add_option("--input", dec_input, "Instance JSON file")->required();
  dec->add_option("--precision", dec_precision, "Starting precision in bits");
  dec->add_option("--c-mult", dec_cmult, "Kernel multiplier Q in C = Q ln n");
  dec->add_option("--options", dec_options, "Further options as a JSON object");
  dec->add_flag("--check", dec_check, "Compare with the brute-force oracle (exit 1 on disagreement)");

  // verify
  auto* ver = app.add_subcommand("verify", "Run an experiment suite against the oracle");
  std::string ver_suite = "default";
  std::string ver_json, ver_csv, ver_markdown;
  ver->add_option("--suite", ver_suite, "default or a config JSON file");
  ver->add_option("--json", ver_json, "Write the JSON report here");
  ver->add_option("--csv", ver_csv, "Write the CSV report here");
  ver->add_option("--markdown", ver_markdown, "Write the markdown report here");

  // bench
  auto* bench = app.add_subcommand("bench", "Time the brute-force oracle across doubling n");
  std::size_t bench_n = 64, bench_d = 64;
  int bench_doublings = 3;
  std::uint64_t bench_seed = 1;
  std::string bench_format = "markdown";
  bench->add_option("--n-start", bench_n, "First n")->check(CLI::Range(2, 1 << 20));
  bench->add_option("--doublings", bench_doublings, "Number of doublings")->check(CLI::Range(0, 16));
  bench->add_option("--d", bench_d, "Fixed dimension");
  bench->add_option("--seed", bench_seed, "Instance seed");
  bench->add_option("--format", bench_format, "json, csv or markdown")
      ->check(CLI::IsMember({"json", "csv", "markdown"}));

  // report
  auto* rep = app.add_subcommand("report", "Convert a JSON report to another format");
  std::string rep_format = "markdown";
  std::string rep_input;
  std::string rep_out;
  rep->add_option("--format", rep_format, "json, csv or markdown")
      ->check(CLI::IsMember({"json", "csv", "markdown"}));
  rep->add_option("--input", rep_input, "JSON report file")->required();
  rep->add_option("--out", rep_out, "Output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      ermlab_instance* raw = nullptr;
      check(ermlab_instance_generate(gen_kind.c_str(), gen_n, gen_m, gen_d, gen_t, gen_planted.c_str(), gen_seed, &raw));
      Instance inst(raw);
      if (gen_normalize) {
        check(ermlab_instance_normalize(inst.get(), &raw));
        inst.reset(raw);
      }
      char* text = nullptr;
      check(ermlab_instance_to_json(inst.get(), &text));
      write_output(OwnedString(text).get(), gen_out);
      return kExitOk;
    }

    if (dec->parsed()) {
      ermlab_instance* raw = nullptr;
      check(ermlab_instance_read(dec_input.c_str(), &raw));
      Instance inst(raw);
      std::string options = dec_options;
      if (dec_precision || dec_cmult) {
        // Splice the flag values into the options object.
        std::string extra;
        if (dec_precision) extra += "\"precision_start\": " + std::to_string(*dec_precision);
        if (dec_cmult) extra += std::string(extra.empty() ? "" : ", ") + "\"c_multiplier\": \"" + *dec_cmult + "\"";
        const auto close = options.rfind('}');
        if (options.empty() || close == std::string::npos) {
          options = "{" + extra + "}";
        } else {
          const bool empty_object = options.find_first_not_of(" \t\n{") == close;
          options = options.substr(0, close) + (empty_object ? "" : ", ") + extra + "}";
        }
      }
      ermlab_answer answer = ERMLAB_UNDECIDABLE;
      char* verdict = nullptr;
      check(ermlab_decide(inst.get(), dec_reduction.c_str(), options.empty() ? nullptr : options.c_str(), &answer,
                          &verdict));
      std::cout << OwnedString(verdict).get();
      if (answer == ERMLAB_UNDECIDABLE) return kExitUndecidable;
      if (dec_check) {
        ermlab_answer oracle = ERMLAB_NO;
        check(ermlab_oracle(inst.get(), &oracle, nullptr));
        std::cerr << "oracle " << answer_name(oracle) << ", reduction " << answer_name(answer) << "\n";
        if (oracle != answer) return kExitFailure;
      }
      return kExitOk;
    }

    if (ver->parsed()) {
      ermlab_report* raw = nullptr;
      if (ver_suite == "default") {
        check(ermlab_run_suite(nullptr, &raw));
      } else {
        const std::string config = read_file(ver_suite);
        check(ermlab_run_suite(config.c_str(), &raw));
      }
      Report report(raw);
      if (!ver_json.empty()) check(ermlab_report_write(report.get(), "json", ver_json.c_str()));
      if (!ver_csv.empty()) check(ermlab_report_write(report.get(), "csv", ver_csv.c_str()));
      if (!ver_markdown.empty()) check(ermlab_report_write(report.get(), "markdown", ver_markdown.c_str()));
      if (ver_json.empty() && ver_csv.empty() && ver_markdown.empty()) std::cout << emit(report.get(), "csv");
      return summarize(report.get());
    }

    if (bench->parsed()) {
      ermlab_report* raw = nullptr;
      check(ermlab_bench(bench_n, bench_doublings, bench_d, bench_seed, &raw));
      Report report(raw);
      std::cout << emit(report.get(), bench_format);
      return kExitOk;
    }

    if (rep->parsed()) {
      const std::string text = read_file(rep_input);
      ermlab_report* raw = nullptr;
      check(ermlab_report_load(text.c_str(), &raw));
      Report report(raw);
      write_output(emit(report.get(), rep_format), rep_out);
      return kExitOk;
    }
  } catch (const CallFailed& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

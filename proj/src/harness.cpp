#include "ermlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ermlab/kpca.hpp"
#include "ermlab/krr.hpp"
#include "ermlab/nn.hpp"
#include "ermlab/oracles.hpp"
#include "ermlab/svm.hpp"

namespace ermlab {

using json = nlohmann::ordered_json;

VectorPairInstance prepare_instance(const VectorPairInstance& inst, Reduction reduction) {
  const bool network = reduction == Reduction::NnHinge || reduction == Reduction::NnLogistic;
  if (network && inst.kind == ProblemKind::OVP && !inst.normalized) return normalize(inst);
  return inst;
}

ReductionVerdict decide(const VectorPairInstance& inst, Reduction reduction, const ReductionOptions& options) {
  if (inst.kind != source_kind(reduction)) {
    throw ParameterError(std::string(to_string(reduction)) + " needs a " + to_string(source_kind(reduction)) +
                         " instance");
  }
  const VectorPairInstance prepared = prepare_instance(inst, reduction);
  switch (reduction) {
    case Reduction::Svm: return svm_distinguisher(prepared, options);
    case Reduction::SvmBias: return bias_svm_distinguisher(prepared, options);
    case Reduction::SvmSoft: return soft_margin_distinguisher(prepared, options);
    case Reduction::Kpca: return kpca_distinguisher(prepared, options);
    case Reduction::Krr: return krr_distinguisher(prepared, options);
    case Reduction::NnHinge: return nn_distinguisher(prepared, LossKind::Hinge, options);
    case Reduction::NnLogistic: return nn_distinguisher(prepared, LossKind::Logistic, options);
    case Reduction::GradRelu: return gradient_distinguisher(prepared, Gadget::Relu, options);
    case Reduction::GradSigmoid: return gradient_distinguisher(prepared, Gadget::Sigmoid, options);
  }
  throw ParameterError("unknown reduction");
}

// ---------------------------------------------------------------------------
// Configuration

void ExperimentConfig::validate() const {
  if (reductions.empty()) throw ParameterError("experiment needs at least one reduction");
  if (n_values.empty()) throw ParameterError("experiment needs at least one n");
  for (std::size_t n : n_values) {
    if (n < 2) throw ParameterError("experiment n must be at least 2");
  }
  if (trials < 1) throw ParameterError("experiment trials must be at least 1");
  if (d && *d == 0) throw ParameterError("experiment d must be positive");
}

ExperimentConfig default_suite_config() {
  ExperimentConfig config;
  config.reductions.assign(std::begin(kAllReductions), std::end(kAllReductions));
  config.n_values = {4, 8, 16};
  config.trials = 25;
  config.seed = 2024;
  return config;
}

namespace {

const std::set<std::string> kConfigKeys = {
    "reductions", "n",       "d",          "t",         "trials",        "seed",           "c_multiplier",
    "T",          "K_loss",  "K_box",      "lambda",    "activation",    "gradient_loss",  "precision_start",
    "precision_cap", "force_tie", "threads", "outputs",
};

template <typename T>
T field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(std::string("config field '") + key + "' has the wrong type");
  }
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!kConfigKeys.count(key)) throw ParseError("unknown config field '" + key + "'");
  }
  ExperimentConfig config = default_suite_config();
  if (j.contains("reductions")) {
    const json& r = j["reductions"];
    config.reductions.clear();
    if (r.is_string() && r.get<std::string>() == "all") {
      config.reductions.assign(std::begin(kAllReductions), std::end(kAllReductions));
    } else if (r.is_array()) {
      for (const auto& name : r) {
        if (!name.is_string()) throw ParseError("config field 'reductions' must hold names");
        config.reductions.push_back(parse_reduction(name.get<std::string>()));
      }
    } else {
      throw ParseError("config field 'reductions' must be \"all\" or an array of names");
    }
  }
  if (j.contains("n")) config.n_values = field<std::vector<std::size_t>>(j, "n");
  if (j.contains("d") && !j["d"].is_null()) config.d = field<std::size_t>(j, "d");
  if (j.contains("t") && !j["t"].is_null()) config.t = field<int>(j, "t");
  if (j.contains("trials")) config.trials = field<int>(j, "trials");
  if (j.contains("seed")) config.seed = field<std::uint64_t>(j, "seed");
  if (j.contains("threads")) config.threads = field<int>(j, "threads");
  ReductionOptions& o = config.options;
  if (j.contains("c_multiplier")) o.c_multiplier = field<std::string>(j, "c_multiplier");
  if (j.contains("T")) o.T = field<long>(j, "T");
  if (j.contains("K_loss")) o.K_loss = field<long>(j, "K_loss");
  if (j.contains("K_box")) o.K_box = field<int>(j, "K_box");
  if (j.contains("lambda")) o.lambda = field<std::string>(j, "lambda");
  if (j.contains("activation")) o.activation = field<std::string>(j, "activation");
  if (j.contains("gradient_loss")) o.gradient_loss = field<std::string>(j, "gradient_loss");
  if (j.contains("precision_start")) o.precision = field<Precision>(j, "precision_start");
  if (j.contains("precision_cap")) o.precision_cap = field<Precision>(j, "precision_cap");
  if (j.contains("force_tie")) o.force_tie = field<bool>(j, "force_tie");
  if (j.contains("outputs")) {
    const json& out = j["outputs"];
    if (!out.is_object()) throw ParseError("config field 'outputs' must be an object");
    if (out.contains("json")) config.json_path = field<std::string>(out, "json");
    if (out.contains("csv")) config.csv_path = field<std::string>(out, "csv");
    if (out.contains("markdown")) config.markdown_path = field<std::string>(out, "markdown");
  }
  config.validate();
  return config;
}

std::string config_to_json(const ExperimentConfig& config) {
  json j;
  j["reductions"] = json::array();
  for (Reduction r : config.reductions) j["reductions"].push_back(to_string(r));
  j["n"] = config.n_values;
  j["d"] = config.d ? json(*config.d) : json(nullptr);
  j["t"] = config.t ? json(*config.t) : json(nullptr);
  j["trials"] = config.trials;
  j["seed"] = config.seed;
  const ReductionOptions& o = config.options;
  j["c_multiplier"] = o.c_multiplier;
  if (o.T) j["T"] = *o.T;
  j["K_loss"] = o.K_loss;
  j["K_box"] = o.K_box;
  if (o.lambda) j["lambda"] = *o.lambda;
  if (o.activation) j["activation"] = *o.activation;
  j["gradient_loss"] = o.gradient_loss;
  if (o.precision) j["precision_start"] = *o.precision;
  if (o.precision_cap) j["precision_cap"] = *o.precision_cap;
  if (o.force_tie) j["force_tie"] = true;
  j["threads"] = config.threads;
  json out = json::object();
  if (config.json_path) out["json"] = *config.json_path;
  if (config.csv_path) out["csv"] = *config.csv_path;
  if (config.markdown_path) out["markdown"] = *config.markdown_path;
  if (!out.empty()) j["outputs"] = out;
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Trials

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t name_hash(std::string_view name) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

std::vector<TrialCell> expand_cells(const ExperimentConfig& config) {
  config.validate();
  std::vector<TrialCell> cells;
  for (Reduction r : config.reductions) {
    for (std::size_t n : config.n_values) {
      for (int k = 0; k < config.trials; ++k) {
        TrialCell cell;
        cell.index = cells.size();
        cell.reduction = r;
        cell.n = n;
        cell.trial = k;
        cell.planted = k % 2 == 0 ? Planted::Yes : Planted::No;
        // Seeds depend on the reduction name, not its position in the list.
        std::uint64_t s = splitmix(config.seed ^ name_hash(to_string(r)));
        s = splitmix(s ^ n);
        cell.seed = splitmix(s ^ static_cast<std::uint64_t>(k));
        cells.push_back(cell);
      }
    }
  }
  return cells;
}

GenerateParams cell_params(const ExperimentConfig& config, const TrialCell& cell) {
  GenerateParams params;
  params.kind = source_kind(cell.reduction);
  params.n = cell.n;
  params.d = config.d.value_or(default_dimension(cell.n));
  if (params.kind == ProblemKind::BHCP) params.t = config.t.value_or(default_threshold(params.d));
  params.planted = cell.planted;
  params.seed = cell.seed;
  return params;
}

TrialRecord run_trial(const ExperimentConfig& config, const TrialCell& cell) {
  TrialRecord rec;
  rec.trial = cell.index;
  rec.reduction = cell.reduction;
  rec.n = cell.n;
  rec.planted = cell.planted;
  rec.seed = cell.seed;
  const GenerateParams params = cell_params(config, cell);
  if (params.kind == ProblemKind::BHCP) rec.t = params.t;
  rec.d = params.d;
  try {
    const VectorPairInstance inst = prepare_instance(generate(params), cell.reduction);
    rec.digest = digest(inst);
    rec.oracle = solve(inst).has_pair ? Answer::Yes : Answer::No;
    const ReductionVerdict v = decide(inst, cell.reduction, config.options);
    rec.verdict = v.answer;
    rec.agree = v.answer == rec.oracle;
    rec.stat_lo = v.statistic.lo().to_string(20, MPFR_RNDD);
    rec.stat_hi = v.statistic.hi().to_string(20, MPFR_RNDU);
    rec.thresh_lo = v.threshold.lo().to_string(20, MPFR_RNDD);
    rec.thresh_hi = v.threshold.hi().to_string(20, MPFR_RNDU);
    rec.bits = static_cast<long>(v.precision_bits_used);
    rec.escalations = v.escalations;
    rec.ms = v.solve_ms;
  } catch (const std::exception& e) {
    rec.verdict = Answer::Undecidable;
    rec.agree = false;
    rec.error = e.what();
  }
  return rec;
}

RunReport run_suite(const ExperimentConfig& config) {
  const std::vector<TrialCell> cells = expand_cells(config);
  RunReport report;
  report.records.resize(cells.size());
  int workers = config.threads > 0 ? config.threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, static_cast<int>(std::max<std::size_t>(cells.size(), 1)));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) report.records[i] = run_trial(config, cells[i]);
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (config.json_path) emit_report(report, ReportFormat::Json, *config.json_path);
  if (config.csv_path) emit_report(report, ReportFormat::Csv, *config.csv_path);
  if (config.markdown_path) emit_report(report, ReportFormat::Markdown, *config.markdown_path);
  return report;
}

namespace {

Summary summarize(const std::vector<TrialRecord>& records, std::optional<Reduction> only) {
  Summary s;
  for (const auto& r : records) {
    if (only && r.reduction != *only) continue;
    ++s.total;
    if (r.error) {
      ++s.failed;
    } else if (r.verdict == Answer::Undecidable) {
      ++s.undecidable;
    } else {
      ++s.decided;
      if (r.agree) {
        ++s.agreed;
      } else {
        ++s.disagreed;
      }
    }
  }
  return s;
}

}  // namespace

Summary RunReport::summary() const { return summarize(records, std::nullopt); }
Summary RunReport::summary(Reduction reduction) const { return summarize(records, reduction); }

int RunReport::exit_code() const {
  const Summary s = summary();
  if (s.disagreed > 0 || s.failed > 0) return 1;
  if (s.undecidable > 0) return 2;
  return 0;
}

// ---------------------------------------------------------------------------
// Benchmark

RunReport bench_scaling(const BenchConfig& config) {
  if (config.n_start < 2 || config.doublings < 0 || config.samples < 1 || config.d == 0) {
    throw ParameterError("bench needs n_start >= 2, doublings >= 0, samples >= 1, d >= 1");
  }
  using clock = std::chrono::steady_clock;
  volatile std::size_t sink = 0;
  auto instance_for = [&](std::size_t n) {
    GenerateParams p;
    p.kind = ProblemKind::OVP;
    p.n = n;
    p.d = config.d;
    p.planted = Planted::Random;
    p.seed = splitmix(config.seed ^ n);
    return generate(p);
  };
  auto time_calls = [&](const VectorPairInstance& inst, int repeats) {
    const auto t0 = clock::now();
    for (int r = 0; r < repeats; ++r) sink = sink + solve_ovp(inst).extremal_value;
    return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  };
  int repeats = config.repeats;
  if (repeats <= 0) {
    // Enough calls that the smallest size takes about 10 ms per sample.
    const VectorPairInstance first = instance_for(config.n_start);
    const double once = std::max(time_calls(first, 3) / 3, 1e-4);
    repeats = std::max(1, static_cast<int>(std::ceil(10.0 / once)));
  }
  std::vector<VectorPairInstance> instances;
  std::size_t n = config.n_start;
  for (int k = 0; k <= config.doublings; ++k, n *= 2) instances.push_back(instance_for(n));
  for (const auto& inst : instances) time_calls(inst, 1);
  // Rounds visit every size in turn so drifts in machine speed hit all sizes
  // alike; ratios are taken within a round.
  std::vector<std::vector<double>> times(instances.size());
  std::vector<std::vector<double>> ratios(instances.size());
  for (int s = 0; s < config.samples; ++s) {
    for (std::size_t k = 0; k < instances.size(); ++k) {
      times[k].push_back(time_calls(instances[k], repeats));
      if (k > 0 && times[k - 1].back() > 0) ratios[k].push_back(times[k].back() / times[k - 1].back());
    }
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  RunReport report;
  for (std::size_t k = 0; k < instances.size(); ++k) {
    BenchRow row;
    row.n = instances[k].n();
    row.d = config.d;
    row.repeats = repeats;
    row.median_ms = median(times[k]);
    if (!ratios[k].empty()) row.ratio = median(ratios[k]);
    report.bench.push_back(row);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Reports

ReportFormat parse_format(std::string_view text) {
  if (text == "json") return ReportFormat::Json;
  if (text == "csv") return ReportFormat::Csv;
  if (text == "markdown" || text == "md") return ReportFormat::Markdown;
  throw ParameterError("unknown report format '" + std::string(text) + "'");
}

namespace {

const char* answer_cell(const TrialRecord& r) { return r.error ? "ERROR" : to_string(r.verdict); }

std::string fixed(double v, int digits) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << v;
  return out.str();
}

std::string csv_row(const TrialRecord& r, bool timing) {
  std::ostringstream out;
  out << r.trial << ',' << to_string(r.reduction) << ',' << r.n << ',' << r.d << ',';
  if (r.t) out << *r.t;
  out << ',' << to_string(r.oracle) << ',' << answer_cell(r) << ',' << (r.agree ? "true" : "false") << ','
      << r.stat_lo << ',' << r.stat_hi << ',' << r.thresh_lo << ',' << r.thresh_hi << ',' << r.bits;
  if (timing) out << ',' << fixed(r.ms, 3);
  return out.str();
}

std::string emit_csv(const RunReport& report) {
  std::ostringstream out;
  if (report.records.empty() && !report.bench.empty()) {
    out << "n,d,repeats,median_ms,ratio\n";
    for (const auto& b : report.bench) {
      out << b.n << ',' << b.d << ',' << b.repeats << ',' << fixed(b.median_ms, 4) << ',';
      if (b.ratio) out << fixed(*b.ratio, 3);
      out << '\n';
    }
    return out.str();
  }
  out << kCsvHeader << '\n';
  for (const auto& r : report.records) out << csv_row(r, true) << '\n';
  return out.str();
}

std::string emit_markdown(const RunReport& report) {
  std::ostringstream out;
  out << "# Run report\n\n";
  if (!report.records.empty()) {
    const Summary s = report.summary();
    out << "- trials: " << s.total << "\n- decided: " << s.decided << "\n- agreed: " << s.agreed
        << "\n- disagreed: " << s.disagreed << "\n- undecidable: " << s.undecidable << "\n- failed: " << s.failed
        << "\n- agreement rate: " << fixed(100 * s.agreement_rate(), 2) << "%\n\n";
    out << "| trial | reduction | n | d | t | oracle | verdict | agree | stat_lo | stat_hi | thresh_lo | thresh_hi | bits | ms |\n";
    out << "|---|---|---|---|---|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& r : report.records) {
      out << "| " << r.trial << " | " << to_string(r.reduction) << " | " << r.n << " | " << r.d << " | "
          << (r.t ? std::to_string(*r.t) : "") << " | " << to_string(r.oracle) << " | " << answer_cell(r) << " | "
          << (r.agree ? "yes" : "no") << " | " << r.stat_lo << " | " << r.stat_hi << " | " << r.thresh_lo << " | "
          << r.thresh_hi << " | " << r.bits << " | " << fixed(r.ms, 3) << " |\n";
    }
  }
  if (!report.bench.empty()) {
    if (!report.records.empty()) out << '\n';
    out << "| n | d | repeats | median ms | ratio |\n|---|---|---|---|---|\n";
    for (const auto& b : report.bench) {
      out << "| " << b.n << " | " << b.d << " | " << b.repeats << " | " << fixed(b.median_ms, 4) << " | "
          << (b.ratio ? fixed(*b.ratio, 3) : "") << " |\n";
    }
  }
  return out.str();
}

json record_json(const TrialRecord& r) {
  json j;
  j["trial"] = r.trial;
  j["reduction"] = to_string(r.reduction);
  j["n"] = r.n;
  j["d"] = r.d;
  j["t"] = r.t ? json(*r.t) : json(nullptr);
  j["planted"] = to_string(r.planted);
  j["seed"] = r.seed;
  j["digest"] = r.digest;
  j["oracle"] = to_string(r.oracle);
  j["verdict"] = to_string(r.verdict);
  j["agree"] = r.agree;
  j["statistic"] = {{"lo", r.stat_lo}, {"hi", r.stat_hi}, {"bits", r.bits}};
  j["threshold"] = {{"lo", r.thresh_lo}, {"hi", r.thresh_hi}, {"bits", r.bits}};
  j["escalations"] = r.escalations;
  j["ms"] = r.ms;
  j["error"] = r.error ? json(*r.error) : json(nullptr);
  return j;
}

Answer parse_answer(const std::string& text) {
  if (text == "YES") return Answer::Yes;
  if (text == "NO") return Answer::No;
  if (text == "UNDECIDABLE") return Answer::Undecidable;
  throw ParseError("unknown answer '" + text + "'");
}

std::string emit_json(const RunReport& report) {
  json j;
  const Summary s = report.summary();
  j["summary"] = {{"total", s.total},         {"decided", s.decided}, {"agreed", s.agreed},
                  {"disagreed", s.disagreed}, {"undecidable", s.undecidable}, {"failed", s.failed}};
  j["records"] = json::array();
  for (const auto& r : report.records) j["records"].push_back(record_json(r));
  j["bench"] = json::array();
  for (const auto& b : report.bench) {
    json row = {{"n", b.n}, {"d", b.d}, {"repeats", b.repeats}, {"median_ms", b.median_ms}};
    row["ratio"] = b.ratio ? json(*b.ratio) : json(nullptr);
    j["bench"].push_back(row);
  }
  return j.dump(2) + "\n";
}

}  // namespace

std::string emit_report(const RunReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::Json: return emit_json(report);
    case ReportFormat::Csv: return emit_csv(report);
    case ReportFormat::Markdown: return emit_markdown(report);
  }
  throw ParameterError("unknown report format");
}

void emit_report(const RunReport& report, ReportFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << emit_report(report, format);
  if (!out) throw IoError("failed writing '" + path + "'");
}

RunReport report_from_json(const std::string& text) {
  RunReport report;
  try {
    const json j = json::parse(text);
    for (const auto& r : j.at("records")) {
      TrialRecord rec;
      rec.trial = r.at("trial").get<std::size_t>();
      rec.reduction = parse_reduction(r.at("reduction").get<std::string>());
      rec.n = r.at("n").get<std::size_t>();
      rec.d = r.at("d").get<std::size_t>();
      if (!r.at("t").is_null()) rec.t = r.at("t").get<int>();
      rec.planted = parse_planted(r.at("planted").get<std::string>());
      rec.seed = r.at("seed").get<std::uint64_t>();
      rec.digest = r.at("digest").get<std::uint64_t>();
      rec.oracle = parse_answer(r.at("oracle").get<std::string>());
      rec.verdict = parse_answer(r.at("verdict").get<std::string>());
      rec.agree = r.at("agree").get<bool>();
      rec.stat_lo = r.at("statistic").at("lo").get<std::string>();
      rec.stat_hi = r.at("statistic").at("hi").get<std::string>();
      rec.thresh_lo = r.at("threshold").at("lo").get<std::string>();
      rec.thresh_hi = r.at("threshold").at("hi").get<std::string>();
      rec.bits = r.at("statistic").at("bits").get<long>();
      rec.escalations = r.at("escalations").get<int>();
      rec.ms = r.at("ms").get<double>();
      if (!r.at("error").is_null()) rec.error = r.at("error").get<std::string>();
      report.records.push_back(std::move(rec));
    }
    if (j.contains("bench")) {
      for (const auto& b : j.at("bench")) {
        BenchRow row;
        row.n = b.at("n").get<std::size_t>();
        row.d = b.at("d").get<std::size_t>();
        row.repeats = b.at("repeats").get<int>();
        row.median_ms = b.at("median_ms").get<double>();
        if (!b.at("ratio").is_null()) row.ratio = b.at("ratio").get<double>();
        report.bench.push_back(row);
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed report JSON: ") + e.what());
  }
  return report;
}

std::string report_without_timing(const RunReport& report) {
  std::string out = "trial,reduction,n,d,t,oracle,verdict,agree,stat_lo,stat_hi,thresh_lo,thresh_hi,bits\n";
  for (const auto& r : report.records) out += csv_row(r, false) + "\n";
  return out;
}

}  // namespace ermlab

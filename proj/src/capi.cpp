#include "ermlab/ermlab.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include <json.hpp>

#include "ermlab/harness.hpp"
#include "ermlab/oracles.hpp"

struct ermlab_instance {
  ermlab::VectorPairInstance value;
};

struct ermlab_report {
  ermlab::RunReport value;
};

namespace {

thread_local std::string g_last_error;

ermlab_status fail(ermlab_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Maps the library's exception types onto status codes.
template <typename F>
ermlab_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return ERMLAB_OK;
  } catch (const ermlab::ParseError& e) {
    return fail(ERMLAB_PARSE_ERROR, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(ERMLAB_PARSE_ERROR, e.what());
  } catch (const ermlab::ValidationError& e) {
    return fail(ERMLAB_INVALID_ARGUMENT, e.what());
  } catch (const ermlab::GenerationError& e) {
    return fail(ERMLAB_INVALID_ARGUMENT, e.what());
  } catch (const ermlab::ParameterError& e) {
    return fail(ERMLAB_INVALID_ARGUMENT, e.what());
  } catch (const ermlab::DomainError& e) {
    return fail(ERMLAB_DOMAIN_ERROR, e.what());
  } catch (const ermlab::SolverError& e) {
    return fail(ERMLAB_SOLVER_ERROR, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(ERMLAB_INVALID_ARGUMENT, e.what());
  } catch (const ermlab::IoError& e) {
    return fail(ERMLAB_IO_ERROR, e.what());
  } catch (const std::bad_alloc&) {
    return fail(ERMLAB_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(ERMLAB_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(ERMLAB_INTERNAL_ERROR, "unknown error");
  }
}

char* duplicate(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

void require(bool condition, const char* message) {
  if (!condition) throw std::invalid_argument(message);
}

ermlab_answer to_c(ermlab::Answer a) {
  switch (a) {
    case ermlab::Answer::Yes: return ERMLAB_YES;
    case ermlab::Answer::No: return ERMLAB_NO;
    case ermlab::Answer::Undecidable: return ERMLAB_UNDECIDABLE;
  }
  return ERMLAB_UNDECIDABLE;
}

ermlab::ReductionOptions options_from_json(const char* text) {
  if (!text || !*text) return {};
  // Reuse the experiment-config parser for the option keys.
  const auto j = nlohmann::json::parse(text);
  if (!j.is_object()) throw ermlab::ParseError("options must be a JSON object");
  return ermlab::config_from_json(j.dump()).options;
}

}  // namespace

extern "C" {

const char* ermlab_last_error(void) { return g_last_error.c_str(); }

const char* ermlab_version(void) { return "1.0.0"; }

void ermlab_string_free(char* text) { std::free(text); }

ermlab_status ermlab_instance_generate(const char* kind, size_t n, size_t m, size_t d, int t, const char* planted,
                                       uint64_t seed, ermlab_instance** out) {
  return guarded([&] {
    require(kind && planted && out, "null argument");
    ermlab::GenerateParams p;
    p.kind = ermlab::parse_kind(kind);
    p.n = n;
    if (m != 0) p.m = m;
    p.d = d != 0 ? d : ermlab::default_dimension(n);
    p.t = t != 0 ? t : ermlab::default_threshold(p.d);
    p.planted = ermlab::parse_planted(planted);
    p.seed = seed;
    *out = new ermlab_instance{ermlab::generate(p)};
  });
}

ermlab_status ermlab_instance_from_json(const char* json, ermlab_instance** out) {
  return guarded([&] {
    require(json && out, "null argument");
    *out = new ermlab_instance{ermlab::from_json(json)};
  });
}

ermlab_status ermlab_instance_read(const char* path, ermlab_instance** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new ermlab_instance{ermlab::read_instance(path)};
  });
}

ermlab_status ermlab_instance_write(const ermlab_instance* inst, const char* path) {
  return guarded([&] {
    require(inst && path, "null argument");
    ermlab::write_instance(inst->value, path);
  });
}

ermlab_status ermlab_instance_to_json(const ermlab_instance* inst, char** out) {
  return guarded([&] {
    require(inst && out, "null argument");
    *out = duplicate(ermlab::to_json(inst->value));
  });
}

ermlab_status ermlab_instance_normalize(const ermlab_instance* inst, ermlab_instance** out) {
  return guarded([&] {
    require(inst && out, "null argument");
    *out = new ermlab_instance{ermlab::normalize(inst->value)};
  });
}

ermlab_status ermlab_instance_digest(const ermlab_instance* inst, uint64_t* out) {
  return guarded([&] {
    require(inst && out, "null argument");
    *out = ermlab::digest(inst->value);
  });
}

void ermlab_instance_free(ermlab_instance* inst) { delete inst; }

ermlab_status ermlab_oracle(const ermlab_instance* inst, ermlab_answer* answer, long* extremal) {
  return guarded([&] {
    require(inst && answer, "null argument");
    const ermlab::OracleVerdict v = ermlab::solve(inst->value);
    *answer = v.has_pair ? ERMLAB_YES : ERMLAB_NO;
    if (extremal) *extremal = v.extremal_value;
  });
}

ermlab_status ermlab_decide(const ermlab_instance* inst, const char* reduction, const char* options_json,
                            ermlab_answer* answer, char** verdict_json) {
  return guarded([&] {
    require(inst && reduction && answer, "null argument");
    const ermlab::Reduction r = ermlab::parse_reduction(reduction);
    const ermlab::ReductionOptions options = options_from_json(options_json);
    const ermlab::ReductionVerdict v = ermlab::decide(inst->value, r, options);
    *answer = to_c(v.answer);
    if (verdict_json) {
      nlohmann::ordered_json j;
      j["reduction"] = ermlab::to_string(v.reduction);
      j["answer"] = ermlab::to_string(v.answer);
      j["statistic"] = {{"lo", v.statistic.lo().to_string(20, MPFR_RNDD)},
                        {"hi", v.statistic.hi().to_string(20, MPFR_RNDU)}};
      j["threshold"] = {{"lo", v.threshold.lo().to_string(20, MPFR_RNDD)},
                        {"hi", v.threshold.hi().to_string(20, MPFR_RNDU)}};
      j["precision_bits"] = v.precision_bits_used;
      j["escalations"] = v.escalations;
      j["ms"] = v.solve_ms;
      *verdict_json = duplicate(j.dump(2) + "\n");
    }
  });
}

ermlab_status ermlab_run_suite(const char* config_json, ermlab_report** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    const ermlab::ExperimentConfig config =
        config_json ? ermlab::config_from_json(config_json) : ermlab::default_suite_config();
    *out = new ermlab_report{ermlab::run_suite(config)};
  });
}

ermlab_status ermlab_bench(size_t n_start, int doublings, size_t d, uint64_t seed, ermlab_report** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    ermlab::BenchConfig config;
    config.n_start = n_start;
    config.doublings = doublings;
    if (d != 0) config.d = d;
    config.seed = seed;
    *out = new ermlab_report{ermlab::bench_scaling(config)};
  });
}

ermlab_status ermlab_report_load(const char* json, ermlab_report** out) {
  return guarded([&] {
    require(json && out, "null argument");
    *out = new ermlab_report{ermlab::report_from_json(json)};
  });
}

ermlab_status ermlab_report_emit(const ermlab_report* report, const char* format, char** out) {
  return guarded([&] {
    require(report && format && out, "null argument");
    *out = duplicate(ermlab::emit_report(report->value, ermlab::parse_format(format)));
  });
}

ermlab_status ermlab_report_write(const ermlab_report* report, const char* format, const char* path) {
  return guarded([&] {
    require(report && format && path, "null argument");
    ermlab::emit_report(report->value, ermlab::parse_format(format), path);
  });
}

ermlab_status ermlab_report_untimed(const ermlab_report* report, char** out) {
  return guarded([&] {
    require(report && out, "null argument");
    *out = duplicate(ermlab::report_without_timing(report->value));
  });
}

ermlab_status ermlab_report_summary(const ermlab_report* report, size_t* total, size_t* agreed, size_t* disagreed,
                                    size_t* undecidable, size_t* failed, int* exit_code) {
  return guarded([&] {
    require(report != nullptr, "null argument");
    const ermlab::Summary s = report->value.summary();
    if (total) *total = s.total;
    if (agreed) *agreed = s.agreed;
    if (disagreed) *disagreed = s.disagreed;
    if (undecidable) *undecidable = s.undecidable;
    if (failed) *failed = s.failed;
    if (exit_code) *exit_code = report->value.exit_code();
  });
}

void ermlab_report_free(ermlab_report* report) { delete report; }

}  // extern "C"

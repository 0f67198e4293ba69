/* Exercises the shared library through its C header only. */

#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "ermlab/ermlab.h"

static int failures = 0;

#define EXPECT(cond)                                                  \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

static void test_instances(void) {
  ermlab_instance* inst = NULL;
  EXPECT(ermlab_instance_generate("bhcp", 6, 0, 0, 0, "yes", 3, &inst) == ERMLAB_OK);
  ermlab_answer answer = ERMLAB_NO;
  long extremal = -1;
  EXPECT(ermlab_oracle(inst, &answer, &extremal) == ERMLAB_OK);
  EXPECT(answer == ERMLAB_YES);
  EXPECT(extremal >= 0);

  char* text = NULL;
  EXPECT(ermlab_instance_to_json(inst, &text) == ERMLAB_OK);
  ermlab_instance* copy = NULL;
  EXPECT(ermlab_instance_from_json(text, &copy) == ERMLAB_OK);
  uint64_t d1 = 0, d2 = 1;
  EXPECT(ermlab_instance_digest(inst, &d1) == ERMLAB_OK);
  EXPECT(ermlab_instance_digest(copy, &d2) == ERMLAB_OK);
  EXPECT(d1 == d2);
  ermlab_string_free(text);
  ermlab_instance_free(copy);

  char* verdict = NULL;
  EXPECT(ermlab_decide(inst, "kpca", NULL, &answer, &verdict) == ERMLAB_OK);
  EXPECT(answer == ERMLAB_YES);
  EXPECT(verdict != NULL && strstr(verdict, "\"answer\": \"YES\"") != NULL);
  ermlab_string_free(verdict);

  EXPECT(ermlab_decide(inst, "svm", "{\"c_multiplier\": \"100\", \"precision_start\": 512}", &answer, NULL) ==
         ERMLAB_OK);
  EXPECT(answer == ERMLAB_YES);
  ermlab_instance_free(inst);
}

static void test_errors(void) {
  ermlab_instance* inst = NULL;
  EXPECT(ermlab_instance_generate("tsp", 4, 0, 0, 0, "yes", 1, &inst) == ERMLAB_PARSE_ERROR);
  EXPECT(strlen(ermlab_last_error()) > 0);
  EXPECT(ermlab_instance_generate("ovp", 4, 0, 1, 0, "yes", 1, &inst) == ERMLAB_INVALID_ARGUMENT);
  EXPECT(ermlab_instance_from_json("{\"kind\": \"ovp\"", &inst) == ERMLAB_PARSE_ERROR);
  EXPECT(ermlab_instance_read("/nonexistent/instance.json", &inst) == ERMLAB_IO_ERROR);
  EXPECT(ermlab_instance_generate(NULL, 4, 0, 0, 0, "yes", 1, &inst) == ERMLAB_INVALID_ARGUMENT);

  EXPECT(ermlab_instance_generate("ovp", 4, 0, 0, 0, "no", 1, &inst) == ERMLAB_OK);
  ermlab_answer answer;
  EXPECT(ermlab_decide(inst, "nosuch", NULL, &answer, NULL) == ERMLAB_INVALID_ARGUMENT);
  /* Kernel reductions need BHCP input. */
  EXPECT(ermlab_decide(inst, "krr", NULL, &answer, NULL) == ERMLAB_INVALID_ARGUMENT);
  EXPECT(ermlab_decide(inst, "grad_relu", "{\"unknown\": 1}", &answer, NULL) == ERMLAB_PARSE_ERROR);
  EXPECT(ermlab_decide(inst, "grad_relu", NULL, &answer, NULL) == ERMLAB_OK);
  EXPECT(strlen(ermlab_last_error()) == 0);
  EXPECT(answer == ERMLAB_NO);
  ermlab_instance_free(inst);
}

static void test_reports(void) {
  ermlab_report* report = NULL;
  EXPECT(ermlab_run_suite("{\"reductions\": [\"grad_relu\", \"nn_hinge\"], \"n\": [4], \"trials\": 4, \"seed\": 3}",
                          &report) == ERMLAB_OK);
  size_t total = 0, agreed = 0, disagreed = 9, undecidable = 9, failed = 9;
  int code = -1;
  EXPECT(ermlab_report_summary(report, &total, &agreed, &disagreed, &undecidable, &failed, &code) == ERMLAB_OK);
  EXPECT(total == 8);
  EXPECT(agreed == 8);
  EXPECT(disagreed == 0 && undecidable == 0 && failed == 0);
  EXPECT(code == 0);

  char* json = NULL;
  EXPECT(ermlab_report_emit(report, "json", &json) == ERMLAB_OK);
  ermlab_report* back = NULL;
  EXPECT(ermlab_report_load(json, &back) == ERMLAB_OK);
  char* a = NULL;
  char* b = NULL;
  EXPECT(ermlab_report_untimed(report, &a) == ERMLAB_OK);
  EXPECT(ermlab_report_untimed(back, &b) == ERMLAB_OK);
  EXPECT(a && b && strcmp(a, b) == 0);
  char* csv = NULL;
  EXPECT(ermlab_report_emit(report, "xml", &csv) == ERMLAB_INVALID_ARGUMENT);
  ermlab_string_free(a);
  ermlab_string_free(b);
  ermlab_string_free(json);
  ermlab_report_free(back);
  ermlab_report_free(report);

  ermlab_report* empty = NULL;
  EXPECT(ermlab_run_suite("{\"reductions\": [], \"n\": [4]}", &empty) == ERMLAB_INVALID_ARGUMENT);
}

int main(void) {
  EXPECT(strcmp(ermlab_version(), "1.0.0") == 0);
  test_instances();
  test_errors();
  test_reports();
  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("all C interface checks passed\n");
  return 0;
}

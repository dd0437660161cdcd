#include <stdio.h>
#include <string.h>

#include "gl2k.h"

#define EXPECT(cond)                                                  \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__, #cond, \
              gl2k_last_error());                                     \
      return 1;                                                       \
    }                                                                 \
  } while (0)

int main(void) {
  Gl2kField *q = NULL;
  EXPECT(gl2k_field_rational(&q) == GL2K_STATUS_OK);

  Gl2kDatum *datum = NULL;
  EXPECT(gl2k_datum_new(q, 5, 0, 0, 1, 0, 7, 0, &datum) == GL2K_STATUS_OK);
  int64_t x = 0, y = 0, numer = 0, denom = 0;
  EXPECT(gl2k_datum_delta(datum, &x, &y) == GL2K_STATUS_OK);
  EXPECT(x == 45 && y == 0);
  EXPECT(gl2k_datum_finite_orbital(datum, &numer, &denom) == GL2K_STATUS_OK);
  EXPECT(numer == 5 && denom == 1);

  double value[2], closed[2], tail;
  EXPECT(gl2k_global_dirichlet(datum, 0.8, 0.0, 100, value, closed, &tail) ==
         GL2K_STATUS_UNSUPPORTED);
  EXPECT(strlen(gl2k_last_error()) > 0);

  Gl2kField *bad = NULL;
  EXPECT(gl2k_field_quadratic(12, &bad) == GL2K_STATUS_INVALID_ARGUMENT);
  EXPECT(bad == NULL);

  Gl2kReport *report = NULL;
  EXPECT(gl2k_run_suite("verify-orbital",
                        "[orbital]\ndelta_max = 200\nd_max = 5\nrandom = 20\n",
                        &report) == GL2K_STATUS_OK);
  bool pass = false;
  EXPECT(gl2k_report_pass(report, &pass) == GL2K_STATUS_OK && pass);
  char *json = NULL;
  EXPECT(gl2k_report_json(report, &json) == GL2K_STATUS_OK);
  EXPECT(strstr(json, "\"suite\": \"verify-orbital\"") != NULL);

  gl2k_string_free(json);
  gl2k_report_free(report);
  gl2k_datum_free(datum);
  gl2k_field_free(q);
  puts("ok");
  return 0;
}

/* Compiles the public header as C and exercises it from a C translation unit. */
#include <stdio.h>

#include "obsdict/obsdict.h"

int main(void) {
  obsd_options opts;
  obsd_options_init(&opts);
  double lambdas[4] = {0.0, 0.0, 0.5, 0.0};
  double inf = 0.0;
  if (obsd_carleson_disc(lambdas, 2, &inf) != OBSD_OK) return 1;
  if (inf < 0.49 || inf > 0.51) return 1;
  obsd_system* sys = NULL;
  if (obsd_system_load_string("{", &sys) != OBSD_ERR_PARSE) return 1;
  printf("obsdict %s: %s\n", obsd_version(), obsd_last_error_message());
  return 0;
}

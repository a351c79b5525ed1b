/* The public header must compile as plain C. */
#include <phaseplane/phaseplane.h>

#include <math.h>
#include <stdio.h>

int main(void) {
  pp_system* sys = NULL;
  pp_period p;
  pp_options o = pp_options_default();
  if (pp_system_catalog("harmonic", NULL, NULL, 0, &sys) != PP_OK) return 1;
  if (pp_period_symmetric(sys, 1.0, &o, 1e-12, &p) != PP_OK) return 2;
  pp_system_free(sys);
  if (fabs(p.T - 6.283185307179586) > 1e-8) return 3;
  printf("T = %.17g\n", p.T);
  return 0;
}

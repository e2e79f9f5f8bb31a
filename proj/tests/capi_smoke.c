/*
  Copyright 2026 The MVPS Authors

  Licensed under the Apache License, Version 2.0 (the "License");
  you may not use this file except in compliance with the License.
  You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

  Unless required by applicable law or agreed to in writing, software
  distributed under the License is distributed on an "AS IS" BASIS,
  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
  See the License for the specific language governing permissions and
  limitations under the License.

*/

/* Compiled as C to keep mvps.h C-clean. */

#include <stdio.h>

#include "mvps/mvps.h"

int main(void) {
  mvps_space* space = NULL;
  mvps_kernel* kernel = NULL;
  mvps_report* report = NULL;
  const double nu[2] = {0.5, 0.5};
  int ok = 1;
  if (mvps_space_create(2, NULL, &space) != MVPS_OK) return 1;
  if (mvps_kernel_identity(space, &kernel) != MVPS_OK) return 1;
  if (mvps_check_balanced(kernel, nu, &report) != MVPS_OK) return 1;
  ok = mvps_report_passed(report);
  printf("mvps %s balanced=%d\n", mvps_version(), ok);
  mvps_report_free(report);
  mvps_kernel_free(kernel);
  mvps_space_free(space);
  return ok ? 0 : 1;
}

#pragma once

#include <cstddef>

// Quick invariant suite behind `dfbsim selftest`: prints one PASS/FAIL line
// per check, returns the number of failures.
int run_selftest(std::size_t n_sections);

#pragma once

// Standard normal tail helpers used across the library.

namespace globalnull {

// Upper tail 1 - Phi(x), computed through erfc so it keeps full relative
// accuracy deep into the tail (until it underflows near x = 38.5).
double normal_upper_tail(double x);

// Two-sided p-value 2 * (1 - Phi(|x|)).
double two_sided_pvalue(double x);

// log(1 - Phi(x)); finite for every finite x.
double log_normal_upper_tail(double x);

// Inverse of the upper tail: returns x with 1 - Phi(x) = q, for q in (0, 1).
double normal_upper_quantile(double q);

double normal_pdf(double x);

} // namespace globalnull

#pragma once

namespace effectci {

// Regularized lower incomplete gamma P(a, x); series for x < a+1, continued
// fraction otherwise.
double regularized_gamma_p(double a, double x);

// Standard normal quantile (rational approximation, used as a starting
// point only).
double normal_quantile(double p);

// Chi-square quantile: q with P(df/2, q/2) = p, via a Wilson-Hilferty start
// refined by Newton iterations on the regularized incomplete gamma.
double chisq_quantile(int df, double p);

}  // namespace effectci

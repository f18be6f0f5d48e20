#pragma once

namespace longterm {

// Regularized incomplete gamma functions P(a,x) and Q(a,x) = 1 - P(a,x),
// and the regularized incomplete beta function I_x(a,b). Implemented with
// the classic series / continued-fraction split so p-values do not depend
// on platform math libraries. Absolute accuracy better than 1e-12 over the
// ranges exercised by the tests.
double gamma_p(double a, double x);
double gamma_q(double a, double x);
double incomplete_beta(double a, double b, double x);

// Survival functions used by the test statistics.
double chi_square_sf(double x, double df);
// Two-sided p-value for a Student-t statistic with df degrees of freedom.
double student_t_two_sided_p(double t, double df);
// Standard normal CDF.
double normal_cdf(double x);

}  // namespace longterm

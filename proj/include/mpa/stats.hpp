#pragma once

#include <vector>

namespace mpa {

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation
// (modified Lentz). Absolute error below 1e-10 for the parameter ranges
// used by the t distribution.
double regularized_incomplete_beta(double a, double b, double x);

// Student-t survival function P(T > t) at df degrees of freedom.
double student_t_sf(double t, double df);

struct TTestResult {
    double t_statistic = 0.0;
    double degrees_of_freedom = 0.0;
    double p_value_two_sided = 1.0;
};

// Welch two-sample t-test with Welch-Satterthwaite degrees of freedom and a
// two-sided p-value. Samples use the n-1 variance convention. Both samples
// having zero variance and equal means degenerates to t = 0, p = 1.
TTestResult welch_t_from_samples(const std::vector<double>& a, const std::vector<double>& b);

// Summary-statistic variant. The reported standard deviations are treated as
// population (n denominator) values and converted to sample variances via
// s^2 = sd^2 * n / (n - 1); this convention reproduces the reference
// summary-table t statistics, whereas feeding them through unchanged does not.
TTestResult welch_t_from_summary(double mean_a, double sd_a_population, int n_a,
                                 double mean_b, double sd_b_population, int n_b);

} // namespace mpa

#include "mpa/stats.hpp"

#include <cmath>
#include <limits>

#include "mpa/errors.hpp"

namespace mpa {

namespace {

// Continued fraction for the incomplete beta function, modified Lentz scheme.
double ibeta_continued_fraction(double a, double b, double x) {
    constexpr double kTiny = 1e-300;
    constexpr double kEps = 1e-15;
    constexpr int kMaxIter = 500;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

} // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw InvalidArgument("beta parameters must be positive");
    if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    // The continued fraction converges fast for x below the mean; mirror otherwise.
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * ibeta_continued_fraction(a, b, x) / a;
    return 1.0 - front * ibeta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_sf(double t, double df) {
    if (!(df > 0.0)) throw InvalidArgument("degrees of freedom must be positive");
    if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
    if (std::isinf(t)) return t > 0.0 ? 0.0 : 1.0;
    if (t < 0.0) return 1.0 - student_t_sf(-t, df);
    const double x = df / (df + t * t);
    return 0.5 * regularized_incomplete_beta(0.5 * df, 0.5, x);
}

namespace {

TTestResult welch_from_moments(double mean_a, double var_a, double n_a,
                               double mean_b, double var_b, double n_b) {
    TTestResult r;
    const double sa = var_a / n_a;
    const double sb = var_b / n_b;
    const double se2 = sa + sb;
    if (se2 == 0.0) {
        // Degenerate: both samples constant. Equal means define t = 0, p = 1;
        // distinct means are an infinitely significant difference.
        r.degrees_of_freedom = n_a + n_b - 2.0;
        if (mean_a == mean_b) {
            r.t_statistic = 0.0;
            r.p_value_two_sided = 1.0;
        } else {
            r.t_statistic = mean_a > mean_b ? std::numeric_limits<double>::infinity()
                                            : -std::numeric_limits<double>::infinity();
            r.p_value_two_sided = 0.0;
        }
        return r;
    }
    r.t_statistic = (mean_a - mean_b) / std::sqrt(se2);
    r.degrees_of_freedom = se2 * se2 /
                           (sa * sa / (n_a - 1.0) + sb * sb / (n_b - 1.0));
    r.p_value_two_sided = 2.0 * student_t_sf(std::abs(r.t_statistic), r.degrees_of_freedom);
    return r;
}

} // namespace

TTestResult welch_t_from_samples(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2)
        throw InvalidArgument("welch t-test requires at least two samples per side");
    auto mean_var = [](const std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        return std::pair<double, double>(mean, ss / static_cast<double>(v.size() - 1));
    };
    const auto [ma, va] = mean_var(a);
    const auto [mb, vb] = mean_var(b);
    return welch_from_moments(ma, va, static_cast<double>(a.size()),
                              mb, vb, static_cast<double>(b.size()));
}

TTestResult welch_t_from_summary(double mean_a, double sd_a_population, int n_a,
                                 double mean_b, double sd_b_population, int n_b) {
    if (n_a < 2 || n_b < 2)
        throw InvalidArgument("welch t-test requires at least two samples per side");
    const double va = sd_a_population * sd_a_population * n_a / (n_a - 1.0);
    const double vb = sd_b_population * sd_b_population * n_b / (n_b - 1.0);
    return welch_from_moments(mean_a, va, n_a, mean_b, vb, n_b);
}

} // namespace mpa

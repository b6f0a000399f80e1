#pragma once

#include <string>
#include <vector>

#include "mpa/errors.hpp"

namespace mpa {

// Interpolation nodes with strictly increasing abscissae (minimum gap 1e-9).
struct KnotSet {
    std::vector<double> xs;
    std::vector<double> ys;

    std::size_t size() const { return xs.size(); }
    void validate() const; // throws InvalidKnots
};

enum class SplineKind { ClampedCubic, Pchip };

std::string to_string(SplineKind kind);
SplineKind spline_kind_from_string(const std::string& name);

// Piecewise cubic in local power basis per interval:
//   s(x) = y_i + b_i*u + c_i*u^2 + d_i*u^3,  u = x - xs[i].
// Outside [xs.front(), xs.back()] the value extends as a constant and the
// derivative is zero; with clamped end slopes this extension stays C1.
class PiecewiseCubic {
public:
    PiecewiseCubic() = default;

    double eval(double x) const;
    double operator()(double x) const { return eval(x); }
    std::vector<double> eval(const std::vector<double>& xs) const;
    double eval_derivative(double x) const;

    SplineKind kind() const { return kind_; }
    const std::vector<double>& knot_xs() const { return xs_; }
    const std::vector<double>& knot_ys() const { return ys_; }

private:
    friend PiecewiseCubic fit_from_slopes(const KnotSet& knots, SplineKind kind,
                                          const std::vector<double>& slopes);

    // Locates the interval index for x in [xs.front(), xs.back()].
    std::size_t interval_of(double x) const;

    SplineKind kind_ = SplineKind::ClampedCubic;
    std::vector<double> xs_, ys_;
    std::vector<double> b_, c_, d_; // per-interval coefficients, size m-1
};

// Interpolating C2 cubic spline with s'(xs.front()) = s'(xs.back()) = 0,
// solved via the slope-form tridiagonal system. For two knots this is the
// unique cubic through both with zero end slopes.
PiecewiseCubic fit_clamped_cubic(const KnotSet& knots);

// Fritsch-Carlson monotone piecewise cubic Hermite interpolant: zero slope
// at local extrema, weighted harmonic mean on monotone stretches, one-sided
// shape-preserving endpoint formula. Never overshoots the data range of any
// interval.
PiecewiseCubic fit_pchip(const KnotSet& knots);

PiecewiseCubic fit_spline(const KnotSet& knots, SplineKind kind);

} // namespace mpa

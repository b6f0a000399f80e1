#include "mpa/splines.hpp"

#include <algorithm>
#include <cmath>

namespace mpa {

namespace {
constexpr double kMinKnotGap = 1e-9;
}

void KnotSet::validate() const {
    if (xs.size() != ys.size()) throw InvalidKnots("xs and ys must have equal length");
    if (xs.size() < 2) throw InvalidKnots("need at least two knots");
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
        if (!(xs[i + 1] - xs[i] >= kMinKnotGap))
            throw InvalidKnots("knot xs must increase by at least 1e-9 (index " +
                               std::to_string(i) + ")");
    for (double v : xs)
        if (!std::isfinite(v)) throw InvalidKnots("non-finite knot x");
    for (double v : ys)
        if (!std::isfinite(v)) throw InvalidKnots("non-finite knot y");
}

std::string to_string(SplineKind kind) {
    return kind == SplineKind::ClampedCubic ? "clamped-cubic" : "pchip";
}

SplineKind spline_kind_from_string(const std::string& name) {
    if (name == "clamped-cubic" || name == "clamped") return SplineKind::ClampedCubic;
    if (name == "pchip") return SplineKind::Pchip;
    throw InvalidArgument("unknown spline kind '" + name + "'");
}

std::size_t PiecewiseCubic::interval_of(double x) const {
    // Left-closed intervals; the last interval is right-closed.
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    const auto idx = static_cast<std::size_t>(it - xs_.begin());
    if (idx == 0) return 0;
    if (idx >= xs_.size()) return xs_.size() - 2;
    return idx - 1;
}

double PiecewiseCubic::eval(double x) const {
    if (x <= xs_.front()) return ys_.front();
    if (x >= xs_.back()) return ys_.back();
    const std::size_t i = interval_of(x);
    const double u = x - xs_[i];
    return ys_[i] + u * (b_[i] + u * (c_[i] + u * d_[i]));
}

std::vector<double> PiecewiseCubic::eval(const std::vector<double>& xs) const {
    std::vector<double> out;
    out.reserve(xs.size());
    for (double x : xs) out.push_back(eval(x));
    return out;
}

double PiecewiseCubic::eval_derivative(double x) const {
    if (x < xs_.front() || x > xs_.back()) return 0.0;
    const std::size_t i = interval_of(x);
    const double u = x - xs_[i];
    return b_[i] + u * (2.0 * c_[i] + u * 3.0 * d_[i]);
}

// Builds interval coefficients from per-knot slopes (Hermite form). Shared by
// both fits so evaluation is identical regardless of how slopes were derived.
PiecewiseCubic fit_from_slopes(const KnotSet& knots, SplineKind kind,
                               const std::vector<double>& slopes) {
    PiecewiseCubic s;
    s.kind_ = kind;
    s.xs_ = knots.xs;
    s.ys_ = knots.ys;
    const std::size_t m = knots.size();
    s.b_.resize(m - 1);
    s.c_.resize(m - 1);
    s.d_.resize(m - 1);
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const double h = knots.xs[i + 1] - knots.xs[i];
        const double delta = (knots.ys[i + 1] - knots.ys[i]) / h;
        s.b_[i] = slopes[i];
        s.c_[i] = (3.0 * delta - 2.0 * slopes[i] - slopes[i + 1]) / h;
        s.d_[i] = (slopes[i] + slopes[i + 1] - 2.0 * delta) / (h * h);
    }
    return s;
}

PiecewiseCubic fit_clamped_cubic(const KnotSet& knots) {
    knots.validate();
    const std::size_t m = knots.size();
    std::vector<double> slopes(m, 0.0); // clamped ends: s'(x0) = s'(x_{m-1}) = 0

    if (m > 2) {
        // C2 continuity at interior knots gives a tridiagonal system in the
        // slopes:
        //   (1/h_{i-1}) s_{i-1} + 2(1/h_{i-1} + 1/h_i) s_i + (1/h_i) s_{i+1}
        //     = 3 (delta_{i-1}/h_{i-1} + delta_i/h_i)
        // with s_0 and s_{m-1} fixed at zero. Thomas elimination.
        const std::size_t k = m - 2;
        std::vector<double> sub(k), diag(k), sup(k), rhs(k);
        for (std::size_t i = 1; i + 1 < m; ++i) {
            const double hl = knots.xs[i] - knots.xs[i - 1];
            const double hr = knots.xs[i + 1] - knots.xs[i];
            const double dl = (knots.ys[i] - knots.ys[i - 1]) / hl;
            const double dr = (knots.ys[i + 1] - knots.ys[i]) / hr;
            const std::size_t r = i - 1;
            sub[r] = 1.0 / hl;
            diag[r] = 2.0 * (1.0 / hl + 1.0 / hr);
            sup[r] = 1.0 / hr;
            rhs[r] = 3.0 * (dl / hl + dr / hr);
        }
        for (std::size_t r = 1; r < k; ++r) {
            const double w = sub[r] / diag[r - 1];
            diag[r] -= w * sup[r - 1];
            rhs[r] -= w * rhs[r - 1];
        }
        slopes[m - 2] = rhs[k - 1] / diag[k - 1];
        for (std::size_t r = k - 1; r-- > 0;)
            slopes[r + 1] = (rhs[r] - sup[r] * slopes[r + 2]) / diag[r];
    }
    return fit_from_slopes(knots, SplineKind::ClampedCubic, slopes);
}

namespace {

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

// Shape-preserving endpoint slope (three-point one-sided formula with the
// Fritsch-Carlson limiters).
double pchip_edge_slope(double h0, double h1, double d0, double d1) {
    double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (sign_of(s) != sign_of(d0)) {
        s = 0.0;
    } else if (sign_of(d0) != sign_of(d1) && std::abs(s) > 3.0 * std::abs(d0)) {
        s = 3.0 * d0;
    }
    return s;
}

} // namespace

PiecewiseCubic fit_pchip(const KnotSet& knots) {
    knots.validate();
    const std::size_t m = knots.size();
    std::vector<double> h(m - 1), delta(m - 1);
    for (std::size_t i = 0; i + 1 < m; ++i) {
        h[i] = knots.xs[i + 1] - knots.xs[i];
        delta[i] = (knots.ys[i + 1] - knots.ys[i]) / h[i];
    }

    std::vector<double> slopes(m, 0.0);
    if (m == 2) {
        slopes[0] = slopes[1] = delta[0];
    } else {
        for (std::size_t i = 1; i + 1 < m; ++i) {
            if (sign_of(delta[i - 1]) * sign_of(delta[i]) <= 0) {
                slopes[i] = 0.0; // local extremum or flat neighbor
            } else {
                const double w1 = 2.0 * h[i] + h[i - 1];
                const double w2 = h[i] + 2.0 * h[i - 1];
                slopes[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        slopes[0] = pchip_edge_slope(h[0], h[1], delta[0], delta[1]);
        slopes[m - 1] = pchip_edge_slope(h[m - 2], h[m - 3], delta[m - 2], delta[m - 3]);
    }
    return fit_from_slopes(knots, SplineKind::Pchip, slopes);
}

PiecewiseCubic fit_spline(const KnotSet& knots, SplineKind kind) {
    return kind == SplineKind::ClampedCubic ? fit_clamped_cubic(knots) : fit_pchip(knots);
}

} // namespace mpa

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace brenv::quad {

struct Result {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = true;
};

struct Options {
    double abs_tol = 1e-12;
    int max_depth = 60;
};

namespace detail {

template <class F>
void simpson_step(const F& f, double a, double b, double fa, double fm, double fb, double whole,
                  double tol, int depth, const Options& opts, Result& out)
{
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    // Below this level the Richardson difference is rounding noise.
    const double noise = 64.0 * std::numeric_limits<double>::epsilon() * (std::abs(left) + std::abs(right));

    if (std::abs(delta) <= 15.0 * tol || std::abs(delta) <= noise || lm <= a || rm >= b) {
        out.value += left + right + delta / 15.0;
        out.error_estimate += std::abs(delta) / 15.0;
        return;
    }
    if (depth >= opts.max_depth) {
        out.value += left + right + delta / 15.0;
        out.error_estimate += std::abs(delta) / 15.0;
        out.converged = false;
        return;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, opts, out);
    simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, opts, out);
}

}  // namespace detail

/// Adaptive Simpson on [lo, hi]. f must be finite on the closed interval.
template <class F>
Result adaptive_simpson(const F& f, double lo, double hi, const Options& opts = {})
{
    Result out;
    if (hi == lo) return out;
    const double fa = f(lo);
    const double fm = f(0.5 * (lo + hi));
    const double fb = f(hi);
    const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    detail::simpson_step(f, lo, hi, fa, fm, fb, whole, opts.abs_tol, 0, opts, out);
    return out;
}

/// Integral over [0, hi] of log_coeff * ln(m) + smooth(m).
///
/// The logarithmic part uses the antiderivative m ln m - m; only the smooth
/// remainder goes through adaptive Simpson. Requires hi > 0.
template <class F>
Result integrate_log_endpoint(const F& smooth, double log_coeff, double hi, const Options& opts = {})
{
    Result out = adaptive_simpson(smooth, 0.0, hi, opts);
    out.value += log_coeff * (hi * std::log(hi) - hi);
    return out;
}

/// Split point for integrands with a logarithmic singularity at 0 on [0, hi].
inline double log_head_width(double hi) { return std::min(1e-6, 0.5 * hi); }

}  // namespace brenv::quad

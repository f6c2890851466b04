#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace cwave {

/// Parameters for the self-refining quadrature used across the special
/// function evaluators. `truncation_y_max` caps the upper cut applied to
/// the unbounded integrals (the cosh-substitution variable); `rel_tol` is
/// the target for the self-reported relative error estimate obtained by
/// node doubling.
struct QuadratureSpec {
    int node_count = 64;
    double truncation_y_max = 60.0;
    double rel_tol = 1e-10;

    void validate() const {
        if (node_count < 16)
            throw std::invalid_argument("QuadratureSpec: node_count must be >= 16");
        if (!(truncation_y_max > 0.0))
            throw std::invalid_argument("QuadratureSpec: truncation_y_max must be > 0");
        if (!(rel_tol > 0.0) || rel_tol > 1e-4)
            throw std::invalid_argument("QuadratureSpec: rel_tol must lie in (0, 1e-4]");
    }
};

/// Raised when node doubling exhausts its refinement budget before the
/// requested tolerance is met. Carries the last estimate so callers can
/// decide whether to accept it.
struct ConvergenceError : std::runtime_error {
    double last_estimate;
    double last_rel_error;
    ConvergenceError(const std::string& what, double estimate, double rel_error)
        : std::runtime_error(what), last_estimate(estimate), last_rel_error(rel_error) {}
};

struct QuadratureResult {
    double value = 0.0;
    double rel_error = 0.0;  // self-estimated, from the last doubling
    int panels = 0;
};

namespace detail {

// 16-point Gauss-Legendre rule on [-1, 1] (positive half; nodes symmetric).
inline constexpr double kGaussNodes16[8] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
inline constexpr double kGaussWeights16[8] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

template <class F>
double gauss_panels(const F& f, double a, double b, int panels) {
    const double h = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        const double half = 0.5 * h;
        double s = 0.0;
        for (int k = 0; k < 8; ++k) {
            const double dx = half * kGaussNodes16[k];
            s += kGaussWeights16[k] * (f(mid + dx) + f(mid - dx));
        }
        total += half * s;
    }
    return total;
}

}  // namespace detail

/// Composite 16-point Gauss-Legendre with panel doubling until the
/// estimate between consecutive levels meets `rel_tol`.
template <class F>
QuadratureResult integrate(const F& f, double a, double b, const QuadratureSpec& spec) {
    spec.validate();
    if (!(b > a)) return {0.0, 0.0, 0};
    int panels = std::max(1, spec.node_count / 16);
    double prev = detail::gauss_panels(f, a, b, panels);
    constexpr int kMaxDoublings = 14;
    double rel = std::numeric_limits<double>::infinity();
    for (int it = 0; it < kMaxDoublings; ++it) {
        panels *= 2;
        const double cur = detail::gauss_panels(f, a, b, panels);
        const double scale = std::max(std::abs(cur), std::numeric_limits<double>::min());
        rel = std::abs(cur - prev) / scale;
        prev = cur;
        if (rel <= spec.rel_tol) return {cur, rel, panels};
    }
    throw ConvergenceError("quadrature failed to reach rel_tol after max refinement",
                           prev, rel);
}

}  // namespace cwave

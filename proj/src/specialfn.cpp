#include "cwave/specialfn.hpp"

#include <algorithm>
#include <cmath>

namespace cwave::specialfn {

namespace {

// log(cosh(z)) without overflow.
double log_cosh(double z) {
    const double a = std::abs(z);
    return a + std::log1p(std::exp(-2.0 * a)) - M_LN2;
}

// Log of the K_nu integrand at y.
double log_integrand(double nu, double t, double y) {
    return -t * std::cosh(y) + log_cosh(nu * y);
}

// Smallest y (within the cap) where the integrand has fallen below
// 1e-18 of its peak. The peak sits at y = 0 when t >= nu^2 and slightly
// to the right otherwise; sampling a few points covers both cases.
double upper_cut(double nu, double t, const QuadratureSpec& quad) {
    double log_peak = log_integrand(nu, t, 0.0);
    for (double y : {0.5, 1.0, 2.0, 4.0})
        log_peak = std::max(log_peak, log_integrand(nu, t, y));
    const double log_target = log_peak + std::log(1e-18);
    double y = 1.0;
    while (y < quad.truncation_y_max && log_integrand(nu, t, y) > log_target)
        y *= 1.25;
    return std::min(y, quad.truncation_y_max);
}

}  // namespace

double bessel_k(double nu, double t, const QuadratureSpec& quad) {
    if (!(nu >= 0.0) || !std::isfinite(nu))
        throw std::domain_error("bessel_k: order must be finite and nonnegative");
    if (!(t > 0.0))
        throw std::domain_error("bessel_k: argument must be positive");
    quad.validate();
    const double y_cut = upper_cut(nu, t, quad);
    const auto integrand = [nu, t](double y) {
        return std::exp(log_integrand(nu, t, y));
    };
    return integrate(integrand, 0.0, y_cut, quad).value;
}

double bessel_k_derivative(double nu, double t, const QuadratureSpec& quad) {
    const double k_next = bessel_k(nu + 1.0, t, quad);
    const double k_same = (nu > 0.0) ? bessel_k(nu, t, quad) : 0.0;
    return -k_next + (nu > 0.0 ? (nu / t) * k_same : 0.0);
}

double sphere_surface(int n) {
    if (n < 1) throw std::domain_error("sphere_surface: dimension must be >= 1");
    if (n == 1) return 2.0;
    return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

double phi(int n, double r, const QuadratureSpec& quad) {
    if (n < 1) throw std::domain_error("phi: dimension must be >= 1");
    if (!(r >= 0.0)) throw std::domain_error("phi: radius must be >= 0");
    if (n == 1) return std::exp(r) + std::exp(-r);
    quad.validate();
    // |S^{n-2}| with the |S^0| = 2 convention equals sphere_surface(n-1).
    const double shell = sphere_surface(n - 1);
    const int m = n - 2;
    const auto integrand = [r, m](double th) {
        const double s = std::sin(th);
        return std::exp(r * std::cos(th)) * (m == 0 ? 1.0 : std::pow(s, m));
    };
    return shell * integrate(integrand, 0.0, M_PI, quad).value;
}

double rho(double mu, double t, const QuadratureSpec& quad) {
    if (!(mu > 0.0)) throw std::domain_error("rho: mu must be positive");
    const double ell = 0.5 * std::abs(mu - 1.0);
    return std::pow(1.0 + t, 0.5 * (mu + 1.0)) * bessel_k(ell, 1.0 + t, quad);
}

double rho_log_derivative(double mu, double t, const QuadratureSpec& quad) {
    if (!(mu > 0.0)) throw std::domain_error("rho_log_derivative: mu must be positive");
    if (!(t >= 0.0)) throw std::domain_error("rho_log_derivative: t must be >= 0");
    const double ell = 0.5 * std::abs(mu - 1.0);
    const double ratio = bessel_k(ell + 1.0, 1.0 + t, quad) / bessel_k(ell, 1.0 + t, quad);
    return (mu + 1.0 + std::abs(mu - 1.0)) / (2.0 * (1.0 + t)) - ratio;
}

double m_weight(const DampingSpec& damping, double t) {
    if (damping.mode != DampingMode::Scattering)
        throw std::logic_error("m_weight: requires scattering damping");
    damping.validate();
    if (!(t >= 0.0)) throw std::domain_error("m_weight: t must be >= 0");
    const double tail =
        damping.b0 * std::pow(1.0 + t, 1.0 - damping.kappa) / (damping.kappa - 1.0);
    return std::exp(-tail);
}

double phi_ball_integral(int n, double r_power, double R, double t,
                         const QuadratureSpec& quad) {
    if (n < 1) throw std::domain_error("phi_ball_integral: dimension must be >= 1");
    if (!(r_power >= 1.0))
        throw std::domain_error("phi_ball_integral: power must be >= 1");
    if (!(R > 0.0)) throw std::domain_error("phi_ball_integral: R must be > 0");
    if (!(t >= 0.0)) throw std::domain_error("phi_ball_integral: t must be >= 0");
    quad.validate();
    const double surface = sphere_surface(n);
    const auto integrand = [n, r_power, &quad](double s) {
        const double base = phi(n, s, quad);
        const double radial = (n == 1) ? 1.0 : std::pow(s, n - 1);
        return std::pow(base, r_power) * radial;
    };
    // Inner phi calls already refine to quad.rel_tol; a slightly looser
    // outer target avoids chasing their residual noise.
    QuadratureSpec outer = quad;
    outer.rel_tol = std::min(1e-4, quad.rel_tol * 100.0);
    return surface * integrate(integrand, 0.0, R + t, outer).value;
}

}  // namespace cwave::specialfn

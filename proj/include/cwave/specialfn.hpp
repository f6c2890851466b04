#pragma once

#include <stdexcept>

#include "cwave/quadrature.hpp"

namespace cwave {

enum class DampingMode { None, Classical, ScaleInvariant, Scattering };

/// Damping coefficient of the second wave equation:
///   None            b(t) = 0
///   Classical       b(t) = 1
///   ScaleInvariant  b(t) = mu / (1 + t),          mu > 0
///   Scattering      b(t) = b0 * (1 + t)^(-kappa), b0 >= 0, kappa > 1
/// The scattering family is nonnegative and integrable on [0, inf), with a
/// closed-form tail used by m_weight.
struct DampingSpec {
    DampingMode mode = DampingMode::None;
    double mu = 0.0;
    double b0 = 0.0;
    double kappa = 2.0;

    static DampingSpec none() { return {DampingMode::None, 0.0, 0.0, 2.0}; }
    static DampingSpec classical() { return {DampingMode::Classical, 0.0, 0.0, 2.0}; }
    static DampingSpec scale_invariant(double mu_) {
        return {DampingMode::ScaleInvariant, mu_, 0.0, 2.0};
    }
    static DampingSpec scattering(double b0_, double kappa_) {
        return {DampingMode::Scattering, 0.0, b0_, kappa_};
    }

    double coefficient(double t) const {
        switch (mode) {
            case DampingMode::None: return 0.0;
            case DampingMode::Classical: return 1.0;
            case DampingMode::ScaleInvariant: return mu / (1.0 + t);
            case DampingMode::Scattering: return b0 * std::pow(1.0 + t, -kappa);
        }
        return 0.0;
    }

    void validate() const {
        if (mode == DampingMode::ScaleInvariant && !(mu > 0.0))
            throw std::invalid_argument("DampingSpec: scale-invariant mode requires mu > 0");
        if (mode == DampingMode::Scattering) {
            if (!(b0 >= 0.0))
                throw std::invalid_argument("DampingSpec: scattering mode requires b0 >= 0");
            if (!(kappa > 1.0))
                throw std::invalid_argument("DampingSpec: scattering mode requires kappa > 1");
        }
    }
};

namespace specialfn {

/// K_nu(t) = \int_0^inf exp(-t cosh y) cosh(nu y) dy for t > 0, nu >= 0.
/// The upper cut is placed where the integrand drops below 1e-18 of its
/// peak (capped by quad.truncation_y_max), then the panel count doubles
/// until quad.rel_tol is met.
double bessel_k(double nu, double t, const QuadratureSpec& quad = {});

/// d/dt K_nu(t) = -K_{nu+1}(t) + (nu/t) K_nu(t), built from two bessel_k calls.
double bessel_k_derivative(double nu, double t, const QuadratureSpec& quad = {});

/// Radial profile of the exponential-type eigenfunction of the Laplacian
/// (Delta phi = phi): e^r + e^{-r} in dimension 1, and the polar reduction
/// |S^{n-2}| \int_0^pi exp(r cos th) sin(th)^{n-2} dth for n >= 2.
double phi(int n, double r, const QuadratureSpec& quad = {});

/// rho(t) = (1+t)^{(mu+1)/2} K_l(1+t), l = |mu-1|/2.
double rho(double mu, double t, const QuadratureSpec& quad = {});

/// rho'(t)/rho(t) = (mu+1+|mu-1|) / (2(1+t)) - K_{l+1}(1+t) / K_l(1+t).
double rho_log_derivative(double mu, double t, const QuadratureSpec& quad = {});

/// m(t) = exp(-\int_t^inf b(s) ds) for the scattering damping family,
/// using the closed-form tail b0 (1+t)^{1-kappa} / (kappa-1).
double m_weight(const DampingSpec& damping, double t);

/// \int_{B_{R+t}} phi(x)^r dx via radial quadrature (r_power >= 1).
double phi_ball_integral(int n, double r_power, double R, double t,
                         const QuadratureSpec& quad = {});

/// Surface measure |S^{n-1}| with the convention |S^0| = 2.
double sphere_surface(int n);

}  // namespace specialfn
}  // namespace cwave

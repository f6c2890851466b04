#include <doctest.h>

#include <cmath>

#include "cwave/specialfn.hpp"
#include "oracles.hpp"

using namespace cwave;
using specialfn::bessel_k;
using specialfn::bessel_k_derivative;
using specialfn::m_weight;
using specialfn::phi;
using specialfn::phi_ball_integral;
using specialfn::rho;
using specialfn::rho_log_derivative;

namespace {
const QuadratureSpec quad{};
}

TEST_SUITE("specialfn") {

TEST_CASE("bessel_k matches the half-integer closed forms") {
    CHECK(bessel_k(0.5, 1.0, quad) == doctest::Approx(oracles::k_half(1.0)).epsilon(1e-10));
    CHECK(bessel_k(0.5, 2.0, quad) == doctest::Approx(oracles::k_half(2.0)).epsilon(1e-10));
    CHECK(bessel_k(1.5, 1.0, quad) ==
          doctest::Approx(oracles::k_three_halves(1.0)).epsilon(1e-10));
}

TEST_CASE("bessel_k agrees with the brute-force Simpson oracle") {
    for (double nu : {0.0, 1.0, 2.0})
        for (double t : {0.5, 1.0, 3.0, 10.0})
            CHECK(bessel_k(nu, t, quad) ==
                  doctest::Approx(oracles::bessel_k_simpson(nu, t)).epsilon(1e-9));
}

TEST_CASE("bessel_k large-argument normalization") {
    const double ratio = bessel_k(0.0, 30.0, quad) / (std::sqrt(M_PI / 60.0) * std::exp(-30.0));
    CHECK(ratio == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("bessel_k ordering in order and argument") {
    CHECK(bessel_k(1.0, 1.0, quad) > bessel_k(0.0, 1.0, quad));
    for (double nu : {0.0, 0.5, 1.5})
        for (double t : {0.3, 1.0, 4.0}) {
            CHECK(bessel_k(nu + 0.7, t, quad) > bessel_k(nu, t, quad));
            CHECK(bessel_k(nu, 1.3 * t, quad) < bessel_k(nu, t, quad));
        }
}

TEST_CASE("bessel_k domain and spec validation errors") {
    CHECK_THROWS_AS(bessel_k(0.5, 0.0, quad), std::domain_error);
    CHECK_THROWS_AS(bessel_k(0.5, -1.0, quad), std::domain_error);
    CHECK_THROWS_AS(bessel_k(-1.0, 1.0, quad), std::domain_error);
    QuadratureSpec bad = quad;
    bad.node_count = 8;
    CHECK_THROWS_AS(bessel_k(0.5, 1.0, bad), std::invalid_argument);
    bad = quad;
    bad.rel_tol = 1e-3;  // above the documented cap
    CHECK_THROWS_AS(bessel_k(0.5, 1.0, bad), std::invalid_argument);
}

TEST_CASE("self-reported error does not grow with node count") {
    // More starting nodes at fixed truncation must not worsen the estimate
    // by more than rel_tol.
    auto estimate = [&](int nodes) {
        QuadratureSpec q = quad;
        q.node_count = nodes;
        const auto f = [](double y) { return std::exp(-2.0 * std::cosh(y)); };
        return integrate(f, 0.0, 8.0, q).rel_error;
    };
    const double e16 = estimate(16), e32 = estimate(32), e64 = estimate(64);
    CHECK(e32 <= e16 + quad.rel_tol);
    CHECK(e64 <= e32 + quad.rel_tol);
}

TEST_CASE("bessel_k_derivative identity") {
    CHECK(bessel_k_derivative(0.0, 1.0, quad) ==
          doctest::Approx(-bessel_k(1.0, 1.0, quad)).epsilon(1e-12));
    CHECK(bessel_k_derivative(0.5, 1.0, quad) ==
          doctest::Approx(-oracles::k_three_halves(1.0) + 0.5 * oracles::k_half(1.0))
              .epsilon(1e-9));
    // central finite-difference oracle
    const double h = 1e-4;
    const double fd = (bessel_k(1.0, 2.0 + h, quad) - bessel_k(1.0, 2.0 - h, quad)) / (2 * h);
    CHECK(bessel_k_derivative(1.0, 2.0, quad) == doctest::Approx(fd).epsilon(1e-5));
}

TEST_CASE("phi closed values") {
    CHECK(phi(1, 0.0, quad) == doctest::Approx(2.0));
    CHECK(phi(2, 0.0, quad) == doctest::Approx(2.0 * M_PI).epsilon(1e-10));
    for (double r : {0.5, 1.0, 3.0})
        CHECK(phi(3, r, quad) ==
              doctest::Approx(4.0 * M_PI * std::sinh(r) / r).epsilon(1e-10));
    CHECK_THROWS_AS(phi(0, 1.0, quad), std::domain_error);
}

TEST_CASE("phi solves the radial eigenfunction equation") {
    QuadratureSpec tight = quad;
    tight.rel_tol = 1e-12;
    const double h = 0.02;
    for (int n : {1, 2, 3})
        for (double r : {0.0, 0.7, 2.0}) {
            auto f = [&](double x) { return phi(n, std::abs(x), tight); };
            const double d2 = (-f(r + 2 * h) + 16 * f(r + h) - 30 * f(r) +
                               16 * f(r - h) - f(r - 2 * h)) /
                              (12 * h * h);
            double resid;
            if (r == 0.0) {
                resid = n * d2 - f(r);
            } else {
                const double d1 =
                    (-f(r + 2 * h) + 8 * f(r + h) - 8 * f(r - h) + f(r - 2 * h)) /
                    (12 * h);
                resid = d2 + (n - 1) * d1 / r - f(r);
            }
            CHECK(std::abs(resid) / f(r) < 1e-5);
        }
}

TEST_CASE("rho closed form at mu = 2 and prefactor at mu = 1") {
    for (double t : {0.0, 1.0, 5.0})
        CHECK(rho(2.0, t, quad) ==
              doctest::Approx(std::sqrt(M_PI / 2.0) * (1.0 + t) * std::exp(-(1.0 + t)))
                  .epsilon(1e-10));
    CHECK(rho(1.0, 0.0, quad) == doctest::Approx(bessel_k(0.0, 1.0, quad)).epsilon(1e-12));
}

TEST_CASE("rho_log_derivative closed form, limit, and positivity") {
    // mu = 2 has rho proportional to (1+t) e^{-(1+t)}, so the ratio is
    // 1/(1+t) - 1; in particular 0 at t = 0.
    CHECK(rho_log_derivative(2.0, 0.0, quad) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rho_log_derivative(2.0, 1.0, quad) == doctest::Approx(-0.5).epsilon(1e-10));
    const double h = 1e-4;
    for (double mu : {0.5, 1.0, 3.0}) {
        const double fd =
            (std::log(rho(mu, 2.0 + h, quad)) - std::log(rho(mu, 2.0 - h, quad))) /
            (2 * h);
        CHECK(rho_log_derivative(mu, 2.0, quad) == doctest::Approx(fd).epsilon(1e-6));
        CHECK(std::abs(rho_log_derivative(mu, 50.0, quad) + 1.0) < 0.05);
        for (double t : {0.0, 1.0, 10.0, 40.0})
            CHECK(mu / (1.0 + t) - rho_log_derivative(mu, t, quad) > 0.0);
    }
}

TEST_CASE("m_weight values and properties") {
    const auto damping = DampingSpec::scattering(1.0, 2.0);
    CHECK(m_weight(damping, 0.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    double prev = 0.0;
    for (double t : {0.0, 0.5, 2.0, 10.0, 100.0}) {
        const double m = m_weight(damping, t);
        CHECK(m > prev);
        CHECK(m <= 1.0);
        prev = m;
    }
    CHECK(m_weight(DampingSpec::scattering(3.0, 1.5), 1e12) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK_THROWS_AS(m_weight(DampingSpec::none(), 0.0), std::logic_error);
    CHECK_THROWS_AS(m_weight(DampingSpec::scale_invariant(1.0), 0.0), std::logic_error);
}

TEST_CASE("phi_ball_integral hand values and growth envelope") {
    CHECK(phi_ball_integral(1, 1.0, 1.0, 0.0, quad) ==
          doctest::Approx(2.0 * (std::exp(1.0) - std::exp(-1.0))).epsilon(1e-8));
    CHECK(phi_ball_integral(1, 2.0, 1.0, 0.0, quad) ==
          doctest::Approx(std::exp(2.0) - std::exp(-2.0) + 4.0).epsilon(1e-8));
    CHECK_THROWS_AS(phi_ball_integral(1, 0.5, 1.0, 0.0, quad), std::domain_error);

    // bounded ratio against e^{rt} (R+t)^{(n-1)(1-r/2)} on a coarse t grid
    const std::pair<int, double> cases[] = {{2, 1.0}, {3, 2.0}};
    for (const auto& [n, rp] : cases) {
        double lo = 1e300, hi = 0.0;
        for (double t : {0.0, 5.0, 10.0, 20.0, 40.0}) {
            const double ratio =
                phi_ball_integral(n, rp, 1.0, t, quad) /
                (std::exp(rp * t) * std::pow(1.0 + t, (n - 1) * (1.0 - rp / 2.0)));
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        CHECK(hi / lo < 3.0);
    }
}

TEST_CASE("phi grows like r^{-(n-1)/2} e^r up to a bounded factor") {
    // The limit constant is not pinned; only boundedness of the ratio is.
    for (int n : {2, 3}) {
        double lo = 1e300, hi = 0.0;
        for (double r : {5.0, 10.0, 20.0, 30.0, 40.0}) {
            const double ratio =
                phi(n, r, quad) / (std::pow(r, -0.5 * (n - 1)) * std::exp(r));
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        CHECK(hi / lo < 2.0);
    }
}

TEST_CASE("rho satisfies its damped ODE") {
    QuadratureSpec tight = quad;
    tight.rel_tol = 1e-12;
    const double h = 0.02;
    for (double mu : {0.5, 1.0, 2.0, 3.0})
        for (double t : {0.0, 4.0, 12.0, 20.0}) {
            auto f = [&](double s) { return rho(mu, s, tight); };
            auto g = [&](double s) { return mu / (1.0 + s) * f(s); };
            const double d2 = (-f(t + 2 * h) + 16 * f(t + h) - 30 * f(t) +
                               16 * f(t - h) - f(t - 2 * h)) /
                              (12 * h * h);
            const double dg =
                (-g(t + 2 * h) + 8 * g(t + h) - 8 * g(t - h) + g(t - 2 * h)) / (12 * h);
            const double resid = d2 - f(t) - dg;
            const double scale = std::abs(d2) + std::abs(f(t)) + std::abs(dg);
            CHECK(std::abs(resid) / scale < 1e-5);
        }
}

TEST_CASE("damping spec validation") {
    CHECK_THROWS_AS(DampingSpec::scale_invariant(0.0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(DampingSpec::scattering(1.0, 1.0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(DampingSpec::scattering(-1.0, 2.0).validate(), std::invalid_argument);
    CHECK(DampingSpec::scattering(0.0, 2.0).coefficient(3.0) == 0.0);
    CHECK(DampingSpec::scale_invariant(2.0).coefficient(1.0) == doctest::Approx(1.0));
    CHECK(DampingSpec::classical().coefficient(7.0) == 1.0);
}

}  // TEST_SUITE

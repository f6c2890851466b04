#include "cwave/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace cwave::verify {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double half_integer_k(double nu, double t) {
    const double base = std::sqrt(M_PI / (2.0 * t)) * std::exp(-t);
    if (nu == 0.5) return base;
    if (nu == 1.5) return base * (1.0 + 1.0 / t);
    if (nu == 2.5) return base * (1.0 + 3.0 / t + 3.0 / (t * t));
    throw std::logic_error("half_integer_k: unsupported order");
}

Record make(const std::string& id, const std::string& stmt, double margin) {
    return {id, stmt, margin, margin >= 0.0};
}

}  // namespace

std::vector<Record> specialfn_suite(const QuadratureSpec& quad) {
    std::vector<Record> out;

    {  // Half-integer closed forms.
        double worst = 0.0;
        for (int i = 0; i < 40; ++i) {
            const double t = 0.1 * std::pow(500.0, i / 39.0);
            for (double nu : {0.5, 1.5}) {
                const double got = specialfn::bessel_k(nu, t, quad);
                const double want = half_integer_k(nu, t);
                worst = std::max(worst, std::abs(got - want) / want);
            }
        }
        out.push_back(make("besselk_half_integer",
                           "K_{1/2}, K_{3/2} match closed forms to 1e-8",
                           1e-8 - worst));
    }

    {  // Derivative recurrence vs central finite differences.
        double worst = 0.0;
        for (double nu : {0.0, 0.5, 1.0, 2.0})
            for (double t : {0.5, 1.0, 2.0, 5.0, 10.0}) {
                const double h = 1e-4 * t;
                const double fd = (specialfn::bessel_k(nu, t + h, quad) -
                                   specialfn::bessel_k(nu, t - h, quad)) /
                                  (2.0 * h);
                const double rec = specialfn::bessel_k_derivative(nu, t, quad);
                worst = std::max(worst, std::abs(fd - rec) / std::abs(rec));
            }
        out.push_back(make("besselk_derivative_identity",
                           "dK/dt = -K_{nu+1} + (nu/t) K_nu vs finite differences, 1e-5",
                           1e-5 - worst));
    }

    {  // Monotone in both arguments.
        double worst = kInf;
        for (double nu : {0.0, 0.5, 1.0, 1.5})
            for (double t : {0.5, 1.0, 2.0, 5.0, 20.0}) {
                const double k0 = specialfn::bessel_k(nu, t, quad);
                worst = std::min(worst, specialfn::bessel_k(nu + 0.5, t, quad) - k0);
                worst = std::min(worst, k0 - specialfn::bessel_k(nu, t * 1.25, quad));
            }
        out.push_back(make("besselk_monotone",
                           "K_nu(t) increasing in nu, decreasing in t", worst));
    }

    {  // Large-argument normalization.
        const double got = specialfn::bessel_k(0.0, 30.0, quad);
        const double ref = std::sqrt(M_PI / 60.0) * std::exp(-30.0);
        const double ratio = got / ref;
        out.push_back(make("besselk_asymptotic",
                           "K_0(30) / (sqrt(pi/2t) e^{-t}) = 1 +- 0.05",
                           0.05 - std::abs(ratio - 1.0)));
    }

    {  // Radial eigenfunction identity for phi (4th-order stencils keep the
       // finite-difference noise well under the 1e-5 budget).
        QuadratureSpec tight = quad;
        tight.rel_tol = 1e-12;
        double worst = 0.0;
        const double h = 0.02;
        for (int n : {1, 2, 3})
            for (double r : {0.0, 0.3, 1.0, 2.5, 6.0}) {
                const auto f = [&](double x) {
                    return specialfn::phi(n, std::abs(x), tight);
                };
                const double f0 = f(r);
                const double d2 = (-f(r + 2 * h) + 16.0 * f(r + h) - 30.0 * f0 +
                                   16.0 * f(r - h) - f(r - 2 * h)) /
                                  (12.0 * h * h);
                double resid;
                if (r == 0.0) {
                    resid = n * d2 - f0;
                } else {
                    const double d1 = (-f(r + 2 * h) + 8.0 * f(r + h) -
                                       8.0 * f(r - h) + f(r - 2 * h)) /
                                      (12.0 * h);
                    resid = d2 + (n - 1) * d1 / r - f0;
                }
                worst = std::max(worst, std::abs(resid) / f0);
            }
        out.push_back(make("phi_radial_eigenfunction",
                           "phi'' + (n-1)/r phi' = phi within 1e-5", 1e-5 - worst));
    }

    {  // rho solves its damped ODE.
        QuadratureSpec tight = quad;
        tight.rel_tol = 1e-12;
        double worst = 0.0;
        const double h = 0.02;
        for (double mu : {0.5, 1.0, 2.0, 3.0})
            for (int i = 0; i <= 20; ++i) {
                const double t = static_cast<double>(i);
                const auto f = [&](double s) { return specialfn::rho(mu, s, tight); };
                const auto damped = [&](double s) { return mu / (1.0 + s) * f(s); };
                const double r0 = f(t);
                const double d2 = (-f(t + 2 * h) + 16.0 * f(t + h) - 30.0 * r0 +
                                   16.0 * f(t - h) - f(t - 2 * h)) /
                                  (12.0 * h * h);
                const double dterm = (-damped(t + 2 * h) + 8.0 * damped(t + h) -
                                      8.0 * damped(t - h) + damped(t - 2 * h)) /
                                     (12.0 * h);
                const double resid = d2 - r0 - dterm;
                const double scale = std::abs(d2) + std::abs(r0) + std::abs(dterm);
                worst = std::max(worst, std::abs(resid) / scale);
            }
        out.push_back(make("rho_ode_residual",
                           "rho'' - rho - d/dt(mu/(1+t) rho) = 0 within 1e-5",
                           1e-5 - worst));
    }

    {  // Damping-ratio positivity and the [1, 3] window.
        double worst_pos = kInf;
        double worst_t2 = 0.0;
        bool window_ok = true;
        for (double mu : {0.5, 1.0, 2.0, 3.0}) {
            double t2 = kInf;
            for (int i = 0; i <= 160; ++i) {
                const double t = 0.25 * i;
                const double ratio = specialfn::rho_log_derivative(mu, t, quad);
                worst_pos = std::min(worst_pos, mu / (1.0 + t) - ratio);
                const double window = mu / (1.0 + t) - 2.0 * ratio;
                const bool inside = window >= 1.0 && window <= 3.0;
                if (inside && t2 == kInf) t2 = t;
                if (!inside && t2 != kInf) window_ok = false;  // must persist
            }
            if (t2 == kInf) window_ok = false;
            worst_t2 = std::max(worst_t2, t2);
        }
        out.push_back(make("damping_ratio_positive",
                           "mu/(1+t) - rho'/rho > 0 on the sampled grid", worst_pos));
        out.push_back(make("damping_ratio_window",
                           "1 <= mu/(1+t) - 2 rho'/rho <= 3 from T2_hat <= 10 onward",
                           window_ok ? 10.0 - worst_t2 : -1.0));
    }

    {  // rho'/rho -> -1.
        double worst = 0.0;
        for (double mu : {0.5, 1.0, 2.0, 3.0})
            worst = std::max(worst,
                             std::abs(specialfn::rho_log_derivative(mu, 50.0, quad) + 1.0));
        out.push_back(make("rho_log_derivative_limit",
                           "rho'/rho at t = 50 equals -1 +- 0.05", 0.05 - worst));
    }

    {  // Squared-decay sandwich for rho.
        bool ok = true;
        double worst_c1 = 0.0, worst_t1 = 0.0;
        for (double mu : {0.5, 1.0, 2.0, 3.0}) {
            std::vector<double> ts, ratios;
            for (int i = 0; i <= 80; ++i) {
                const double t = 0.5 * i;
                const double r = specialfn::rho(mu, t, quad);
                ts.push_back(t);
                ratios.push_back(r * r * std::pow(1.0 + t, -mu) * std::exp(2.0 * t));
            }
            const double tail = ratios.back();
            size_t first = ratios.size();
            for (size_t k = 0; k < ratios.size(); ++k) {
                bool stays = true;
                for (size_t j = k; j < ratios.size(); ++j)
                    if (ratios[j] < 0.5 * tail || ratios[j] > 2.0 * tail) {
                        stays = false;
                        break;
                    }
                if (stays) {
                    first = k;
                    break;
                }
            }
            if (first == ratios.size()) {
                ok = false;
                continue;
            }
            worst_t1 = std::max(worst_t1, ts[first]);
            for (size_t j = first; j < ratios.size(); ++j)
                worst_c1 = std::max({worst_c1, ratios[j], 1.0 / ratios[j]});
        }
        out.push_back(make("rho_squared_sandwich",
                           "e^{-2t}/C1 <= rho^2 (1+t)^{-mu} <= C1 e^{-2t} past T1_hat",
                           ok ? 100.0 - worst_c1 : -1.0));
        (void)worst_t1;
    }

    {  // Ball-integral growth rate (factor-3 envelope around the median).
        double worst_factor = 0.0;
        const double R = 1.0;
        const std::pair<int, double> cases[] = {{1, 1.0}, {2, 1.0}, {2, 2.0}, {3, 2.0}};
        for (const auto& [n, rp] : cases) {
            std::vector<double> ratios;
            for (int i = 0; i <= 20; ++i) {
                const double t = 2.0 * i;
                const double ball = specialfn::phi_ball_integral(n, rp, R, t, quad);
                const double model =
                    std::exp(rp * t) * std::pow(R + t, (n - 1) * (1.0 - rp / 2.0));
                ratios.push_back(ball / model);
            }
            std::vector<double> sorted = ratios;
            std::sort(sorted.begin(), sorted.end());
            const double median = sorted[sorted.size() / 2];
            for (double r : ratios)
                worst_factor = std::max({worst_factor, r / median, median / r});
        }
        out.push_back(make("phi_ball_growth",
                           "ball integral / (e^{rt} (R+t)^{(n-1)(1-r/2)}) within 3x of median",
                           3.0 - worst_factor));
    }

    {  // m-weight bounds, monotonicity, and the logarithmic derivative.
        const auto damping = DampingSpec::scattering(1.0, 2.0);
        double worst = kInf;
        const double m0 = specialfn::m_weight(damping, 0.0);
        worst = std::min(worst, 1e-12 - std::abs(m0 - std::exp(-1.0)));
        double prev = m0;
        for (int i = 1; i <= 50; ++i) {
            const double t = 0.5 * i;
            const double m = specialfn::m_weight(damping, t);
            worst = std::min(worst, m - prev);   // increasing
            worst = std::min(worst, 1.0 - m);    // bounded by 1
            worst = std::min(worst, m - m0);     // floor at m(0)
            prev = m;
        }
        double fd_worst = 0.0;
        for (double t : {0.0, 1.0, 10.0}) {
            const double h = 1e-5;
            const auto m = [&](double s) { return specialfn::m_weight(damping, s); };
            // second-order one-sided stencil at the t = 0 boundary
            const double fd = (t - h >= 0.0)
                                  ? (m(t + h) - m(t - h)) / (2.0 * h)
                                  : (-3.0 * m(t) + 4.0 * m(t + h) - m(t + 2 * h)) /
                                        (2.0 * h);
            const double want = damping.coefficient(t) * m(t);
            fd_worst = std::max(fd_worst, std::abs(fd - want) / want);
        }
        out.push_back(make("m_weight_bounds",
                           "m(0) = e^{-||b||_1} <= m(t) <= 1, nondecreasing", worst));
        out.push_back(make("m_weight_derivative", "m'(t) = b(t) m(t) within 1e-6",
                           1e-6 - fd_worst));
    }

    {  // Roots of the factorization x^2 - 3x + 1 used by the u-functional.
        const double s = std::sqrt(5.0);
        const double a1 = 0.5 * (3.0 + s), a2 = 0.5 * (3.0 - s);
        const double worst =
            std::max(std::abs(a1 * a2 - 1.0), std::abs(a1 + a2 - 3.0));
        out.push_back(make("u0_factorization_roots",
                           "roots of x^2 - 3x + 1: product 1, sum 3", 1e-12 - worst));
    }

    return out;
}

solver::ModelConfig golden_scale_invariant(double dr) {
    solver::ModelConfig cfg;
    cfg.n = 1;
    cfg.exps = {1.5, 1.5};
    cfg.damping = DampingSpec::scale_invariant(1.0);
    cfg.epsilon = 0.3;
    cfg.data = {};
    cfg.grid.dr = dr;
    cfg.time.t_max = 20.0;
    return cfg;
}

solver::ModelConfig golden_scattering(double dr) {
    solver::ModelConfig cfg;
    cfg.n = 1;
    cfg.exps = {2.0, 2.0};
    cfg.damping = DampingSpec::scattering(1.0, 2.0);
    cfg.epsilon = 0.3;
    cfg.data = {};
    cfg.grid.dr = dr;
    cfg.time.t_max = 20.0;
    return cfg;
}

std::vector<Record> functional_suite(const solver::ModelConfig& config,
                                     const QuadratureSpec& quad) {
    std::vector<Record> out;
    const auto traced = functionals::run_with_trace(config, quad);
    const auto& tr = traced.trace;
    const bool si = traced.kernel.uses_psi2();
    const std::string tag = si ? "si" : "scat";

    double scale = 0.0;
    for (size_t k = 0; k < tr.times.size(); ++k)
        scale = std::max({scale, std::abs(tr.U0[k]), std::abs(tr.V0[k]),
                          std::abs(tr.V1[k])});
    const double tol = 10.0 * tr.quad_tolerance + 1e-12 * std::max(scale, 1.0);

    auto min_of = [](const std::vector<double>& v) {
        return *std::min_element(v.begin(), v.end());
    };
    out.push_back(make(tag + "_u0_nonneg", "U0 >= 0 (weighted average of u)",
                       (min_of(tr.U0) + tol) / std::max(scale, 1e-30)));
    out.push_back(make(tag + "_v0_nonneg", "V0 >= 0 (weighted average of v)",
                       (min_of(tr.V0) + tol) / std::max(scale, 1e-30)));
    out.push_back(make(tag + "_v1_nonneg", "V1 >= 0 (weighted average of dv)",
                       (min_of(tr.V1) + tol) / std::max(scale, 1e-30)));

    const auto ode = functionals::check_u0_ode(tr, traced.snapshots, traced.kernel);
    out.push_back(make(tag + "_u0_ode_residual",
                       "U0'' + 3 U0' + U0 = <|dv|^p, psi1> within 5e-2",
                       5e-2 - ode.rel_residual));

    const auto fr =
        functionals::check_frames(tr, traced.snapshots, traced.kernel, config);
    out.push_back(make(tag + "_u1_source_bound",
                       "U1(t) >= int_0^t e^{2(s-t)} <|dv|^p, psi1> ds",
                       fr.precursor_margin + 0.02));
    out.push_back(make(tag + "_frame_constants",
                       "both frame inequalities hold on t >= T6_hat with "
                       "positive fitted constants",
                       fr.frames_hold ? std::min(fr.C_hat, fr.K_hat) : -1.0));

    if (si) {
        out.push_back(make("si_data_weight_imu", "I_mu > 0 for admissible data",
                           tr.I_mu));
        const double holder =
            functionals::holder_margin(tr, traced.snapshots, traced.kernel, config);
        out.push_back(make("si_holder_cross_bound",
                           "V1^p <= <|dv|^p, psi1> (cross ball factor)^{p-1}",
                           holder + 1e-6));
    } else {
        out.push_back(make("scat_v1_floor",
                           "V1(t) >= K2 eps + K3 (accumulated source), K2, K3 > 0",
                           (fr.K2 > 0.0 && fr.K3 > 0.0 && fr.v1_floor_from_zero)
                               ? fr.scattering_margin + 1e-9
                               : -1.0));
    }
    out.push_back(make(tag + "_data_weight_j", "J > 0 for admissible data", tr.J));

    const auto fits = functionals::fit_constants(tr, traced.kernel);
    out.push_back(make(tag + "_plateau_fits",
                       "fitted lower-bound constants K0, K1 positive",
                       fits.valid ? std::min(fits.K0, fits.K1) : -1.0));

    {  // Weight identities: d/dt psi1 = -psi1; psi2 solves the adjoint ODE.
        const auto& k = traced.kernel;
        const double h = 1e-5;
        double worst = 0.0;
        for (double t : {0.0, 1.0, 3.0})
            for (double r : {0.0, 0.5, 1.5}) {
                const double fd = (k.psi1(t + h, r) - k.psi1(t, r)) / h;
                worst = std::max(worst,
                                 std::abs(fd + k.psi1(t + 0.5 * h, r)) / k.psi1(t, r));
            }
        out.push_back(
            make(tag + "_psi1_decay", "d/dt psi1 = -psi1 within 1e-4", 1e-4 - worst));
    }
    if (si) {
        const auto& k = traced.kernel;
        const double h = 5e-3;
        double worst = 0.0;
        const double mu = config.damping.mu;
        for (double t : {0.5, 2.0, 5.0})
            for (double r : {0.0, 0.8, 2.0}) {
                const double c0 = k.psi2(t, r);
                const double d2t =
                    (k.psi2(t + h, r) - 2.0 * c0 + k.psi2(t - h, r)) / (h * h);
                const double lap = c0;  // Delta(rho phi) = rho phi exactly
                const auto damped = [&](double s) {
                    return mu / (1.0 + s) * k.psi2(s, r);
                };
                const double dterm = (damped(t + h) - damped(t - h)) / (2.0 * h);
                const double resid = d2t - lap - dterm;
                const double sc = std::abs(d2t) + std::abs(lap) + std::abs(dterm);
                worst = std::max(worst, std::abs(resid) / sc);
            }
        out.push_back(make("si_psi2_adjoint",
                           "psi2 solves the adjoint damped wave ODE within 1e-4",
                           1e-4 - worst));
    }
    return out;
}

FittedConstants fit_golden_constants(double dr) {
    FittedConstants out;
    {
        const auto cfg = golden_scale_invariant(dr);
        const auto traced = functionals::run_with_trace(cfg);
        out.scale_invariant = functionals::fit_constants(traced.trace, traced.kernel);
        out.scale_invariant_frames = functionals::check_frames(
            traced.trace, traced.snapshots, traced.kernel, cfg);
    }
    {
        const auto cfg = golden_scattering(dr);
        const auto traced = functionals::run_with_trace(cfg);
        out.scattering = functionals::fit_constants(traced.trace, traced.kernel);
        out.scattering_frames = functionals::check_frames(
            traced.trace, traced.snapshots, traced.kernel, cfg);
    }
    return out;
}

void write_records_csv(const std::vector<Record>& records, const std::string& path) {
    std::ofstream f(path, std::ios::out | std::ios::trunc);
    if (!f) throw std::runtime_error("write_records_csv: cannot open " + path);
    f << "check_id,statement,worst_margin,verdict\n";
    for (const auto& r : records) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", r.margin);
        f << r.check_id << ",\"" << r.statement << "\"," << buf << ','
          << (r.pass ? "PASS" : "FAIL") << '\n';
    }
}

std::string format_records_text(const std::vector<Record>& records) {
    std::ostringstream os;
    for (const auto& r : records) {
        os << (r.pass ? "[PASS] " : "[FAIL] ") << r.check_id << ": " << r.statement
           << " (worst margin " << r.margin << ")\n";
    }
    size_t passed = 0;
    for (const auto& r : records) passed += r.pass ? 1 : 0;
    os << passed << "/" << records.size() << " checks passed\n";
    return os.str();
}

bool all_pass(const std::vector<Record>& records) {
    return std::all_of(records.begin(), records.end(),
                       [](const Record& r) { return r.pass; });
}

}  // namespace cwave::verify

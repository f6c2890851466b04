#include "cwave/frames.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cwave::frames {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double exp_or_inf(double ln_value) {
    if (ln_value > 709.0) return kInf;
    return std::exp(ln_value);
}
}  // namespace

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::Subcritical: return "subcritical";
        case Regime::Critical: return "critical";
        case Regime::OutOfRange: return "out_of_range";
    }
    return "?";
}

BlowupClassifier classify(int n, const DampingSpec& damping, const ExponentPair& exps,
                          double critical_tol) {
    if (n < 1) throw std::invalid_argument("classify: dimension must be >= 1");
    exps.validate();
    damping.validate();
    BlowupClassifier out;
    out.critical_tol = critical_tol;
    out.n_eff = (damping.mode == DampingMode::ScaleInvariant)
                    ? static_cast<double>(n) + damping.mu
                    : static_cast<double>(n);
    const double pq = exps.pq();
    out.pq = pq;
    out.theta = 1.0 / (pq - 1.0) - 0.5 * (out.n_eff - 1.0);
    if (out.theta > critical_tol)
        out.regime = Regime::Subcritical;
    else if (out.theta < -critical_tol)
        out.regime = Regime::OutOfRange;
    else
        out.regime = Regime::Critical;
    out.lambda_value =
        std::max(exps.p + 1.0, exps.q + 1.0) / (pq - 1.0) - 0.5 * (n - 1.0);
    return out;
}

FrameSchedule build_schedule(double T0, const ExponentPair& exps, int j_max) {
    if (!(T0 > 0.0)) throw std::invalid_argument("build_schedule: T0 must be > 0");
    if (j_max < 1) throw std::invalid_argument("build_schedule: j_max must be >= 1");
    exps.validate();
    FrameSchedule s;
    s.T0 = T0;
    s.exps = exps;
    const double pq = exps.pq();
    s.ell.resize(j_max + 1);
    s.L.resize(j_max + 1);
    s.Lambda.resize(j_max + 1);
    s.ell[0] = std::max(1.0 / (2.0 * T0), 1.0);
    s.L[0] = s.ell[0];
    for (int j = 1; j <= j_max; ++j) {
        s.ell[j] = 1.0 + std::pow(pq, -j);
        s.L[j] = s.L[j - 1] * s.ell[j];
    }
    // Tail of the convergent product beyond j_max, to machine precision.
    double log_tail = 0.0;
    for (int j = j_max + 1;; ++j) {
        const double term = std::pow(pq, -j);
        if (term < 1e-18) break;
        log_tail += std::log1p(term);
    }
    s.L_limit = s.L[j_max] * std::exp(log_tail);
    for (int j = 0; j <= j_max; ++j)
        s.Lambda[j] = 1.0 + (2.0 - std::pow(2.0, -j)) / T0;
    s.Lambda_limit = 1.0 + 2.0 / T0;
    return s;
}

SequenceTriple closed_forms(double n_eff, const ExponentPair& exps, int j) {
    if (j < 0) throw std::invalid_argument("closed_forms: j must be >= 0");
    exps.validate();
    const double pq = exps.pq();
    const double growth = std::pow(pq, j) - 1.0;
    SequenceTriple out;
    out.alpha = 0.5 * (n_eff - 1.0) * growth;
    out.beta = growth / (pq - 1.0);
    out.gamma = out.beta;
    return out;
}

SequenceTriple closed_forms_by_recursion(double n_eff, const ExponentPair& exps, int j) {
    if (j < 0) throw std::invalid_argument("closed_forms: j must be >= 0");
    exps.validate();
    const double pq = exps.pq();
    SequenceTriple out;  // zero base case
    for (int k = 0; k < j; ++k) {
        out.alpha = 0.5 * (n_eff - 1.0) * (pq - 1.0) + pq * out.alpha;
        out.beta = 1.0 + pq * out.beta;
        out.gamma = 1.0 + pq * out.gamma;
    }
    return out;
}

RationalTriple closed_forms_exact(const Rational& n_eff, const Rational& pq, int j) {
    if (j < 0) throw std::invalid_argument("closed_forms_exact: j must be >= 0");
    RationalTriple out;
    const Rational growth = pq.pow(j) - Rational(1);
    out.alpha = (n_eff - Rational(1)) / Rational(2) * growth;
    out.beta = growth / (pq - Rational(1));
    out.gamma = out.beta;
    return out;
}

RationalTriple closed_forms_by_recursion_exact(const Rational& n_eff, const Rational& pq,
                                               int j) {
    if (j < 0) throw std::invalid_argument("closed_forms_exact: j must be >= 0");
    RationalTriple out{Rational(0), Rational(0), Rational(0)};
    const Rational step = (n_eff - Rational(1)) * (pq - Rational(1)) / Rational(2);
    for (int k = 0; k < j; ++k) {
        out.alpha = step + pq * out.alpha;
        out.beta = Rational(1) + pq * out.beta;
        out.gamma = Rational(1) + pq * out.gamma;
    }
    return out;
}

DoubleSum double_sum_identity(double pq, int j) {
    if (j < 1) throw std::invalid_argument("double_sum_identity: j must be >= 1");
    if (!(pq > 1.0)) throw std::invalid_argument("double_sum_identity: pq must be > 1");
    DoubleSum out;
    double power = 1.0;
    for (int k = 0; k < j; ++k) {
        out.lhs += (j - k) * power;
        power *= pq;
    }
    const double denom = pq - 1.0;
    out.rhs = (std::pow(pq, j + 1) - pq) / (denom * denom) - j / denom;
    return out;
}

DoubleSumExact double_sum_identity_exact(const Rational& pq, int j) {
    if (j < 1) throw std::invalid_argument("double_sum_identity: j must be >= 1");
    DoubleSumExact out{Rational(0), Rational(0)};
    Rational power(1);
    for (int k = 0; k < j; ++k) {
        out.lhs = out.lhs + Rational(j - k) * power;
        power = power * pq;
    }
    const Rational d = pq - Rational(1);
    out.rhs = (pq.pow(j + 1) - pq) / (d * d) - Rational(j) / d;
    return out;
}

IterationConstants iteration_constants(const FrameSchedule& schedule,
                                       const BlowupClassifier& classifier,
                                       const BaseConstants& base, int j_max) {
    if (classifier.regime == Regime::OutOfRange)
        throw std::logic_error("iteration_constants: classifier regime is out of range");
    if (!(base.K1 > 0.0) || !(base.C > 0.0) || !(base.K > 0.0))
        throw std::invalid_argument("iteration_constants: base constants must be positive");
    if (j_max < 1) throw std::invalid_argument("iteration_constants: j_max must be >= 1");
    if (static_cast<int>(schedule.ell.size()) <= j_max)
        throw std::invalid_argument("iteration_constants: schedule shorter than j_max");

    IterationConstants out;
    out.regime = classifier.regime;
    out.n_eff = classifier.n_eff;
    out.pq = schedule.pq();
    out.q = schedule.exps.q;
    out.base = base;

    const double pq = out.pq;
    const double q = out.q;
    const double ln_pq = std::log(pq);

    out.alpha.resize(j_max + 1);
    out.beta.resize(j_max + 1);
    out.gamma.resize(j_max + 1);
    for (int j = 0; j <= j_max; ++j) {
        const auto t = closed_forms(out.n_eff, schedule.exps, j);
        out.alpha[j] = t.alpha;
        out.beta[j] = t.beta;
        out.gamma[j] = t.gamma;
    }

    // ln C_{j+1} = ln K + q ln C + q ln(pq - 1/2) + pq ln C_j
    //            - q ln 2 - beta_j pq ln ell_{j+1} - 2q(j+1) ln pq - ln(beta_j pq + 1)
    out.ln_C.resize(j_max + 1);
    out.ln_C[0] = std::log(base.K1);
    const double ln_step_fixed = std::log(base.K) + q * std::log(base.C) +
                                 q * std::log(pq - 0.5) - q * M_LN2;
    for (int j = 0; j < j_max; ++j) {
        out.ln_C[j + 1] = ln_step_fixed + pq * out.ln_C[j] -
                          out.beta[j] * pq * std::log(schedule.ell[j + 1]) -
                          2.0 * q * (j + 1) * ln_pq - std::log(out.beta[j] * pq + 1.0);
    }

    // ln D_{j+1} = ln K + q ln C + pq ln D_j - 2q(j+1) ln 2 - ln(1 + pq gamma_j)
    out.ln_D.resize(j_max + 1);
    out.ln_D[0] = std::log(base.K1);
    const double ln_step_crit = std::log(base.K) + q * std::log(base.C);
    for (int j = 0; j < j_max; ++j) {
        out.ln_D[j + 1] = ln_step_crit + pq * out.ln_D[j] -
                          2.0 * q * (j + 1) * M_LN2 - std::log(1.0 + pq * out.gamma[j]);
    }

    out.M = 1.1 * std::exp(pq / (pq - 1.0));

    out.D = base.K * std::pow(base.C, q) * std::pow(pq - 0.5, q) * (pq - 1.0) *
            std::pow(2.0, -q) / out.M;
    out.Q = std::pow(pq, 2.0 * q + 1.0);
    const double ln_D_const = std::log(out.D);
    const double ln_Q = std::log(out.Q);
    out.ln_E = std::log(base.K1) - pq * ln_Q / ((pq - 1.0) * (pq - 1.0)) +
               ln_D_const / (pq - 1.0);
    out.E = exp_or_inf(out.ln_E);
    out.ln_E_tilde =
        out.ln_E - (0.5 * (out.n_eff - 1.0) + 1.0 / (pq - 1.0)) * M_LN2;
    out.E_tilde = exp_or_inf(out.ln_E_tilde);

    out.D_tilde = base.K * std::pow(base.C, q) * (pq - 1.0);
    out.Q_tilde = std::pow(2.0, 2.0 * q) * pq;
    const double ln_Dt = std::log(out.D_tilde);
    const double ln_Qt = std::log(out.Q_tilde);
    out.ln_N = std::log(base.K1) + ln_Dt / (pq - 1.0) -
               pq * ln_Qt / ((pq - 1.0) * (pq - 1.0));
    out.N = exp_or_inf(out.ln_N);
    out.c = 2.0 * exp_or_inf(-(pq - 1.0) * out.ln_N);

    // Smallest j with  (ln Q/(pq-1)) j - ln D/(pq-1) + pq ln Q/(pq-1)^2 > 0.
    const auto first_positive = [&](double ln_q_const, double ln_d_const) {
        const double slope = ln_q_const / (pq - 1.0);
        const double offset =
            -ln_d_const / (pq - 1.0) + pq * ln_q_const / ((pq - 1.0) * (pq - 1.0));
        int j = std::max(0, static_cast<int>(std::floor(-offset / slope)) - 2);
        while (slope * j + offset <= 0.0) ++j;
        return j;
    };
    out.j0 = first_positive(ln_Q, ln_D_const);
    out.j2 = first_positive(ln_Qt, ln_Dt);
    return out;
}

double LifespanEnvelope::bound(double eps) const {
    if (!(eps > 0.0)) throw std::domain_error("LifespanEnvelope::bound: eps must be > 0");
    if (regime == Regime::Subcritical)
        return exp_or_inf((-1.0 / theta) * (ln_E_tilde + std::log(eps)));
    const double arg = ln_constant + (pq - 1.0) * std::log(1.0 / eps);
    if (arg > std::log(709.0)) return kInf;  // exp(exp(arg)) overflows
    return exp_or_inf(std::exp(arg));
}

LifespanEnvelope envelope(const BlowupClassifier& classifier,
                          const IterationConstants& constants) {
    if (classifier.regime == Regime::OutOfRange)
        throw std::logic_error("envelope: classifier regime is out of range");
    LifespanEnvelope env;
    env.regime = classifier.regime;
    env.theta = classifier.theta;
    env.pq = constants.pq;
    env.ln_E_tilde = constants.ln_E_tilde;
    if (classifier.regime == Regime::Subcritical) {
        env.exponent = -1.0 / classifier.theta;
        env.ln_constant = -constants.ln_E_tilde / classifier.theta;
        env.constant_C = exp_or_inf(env.ln_constant);
    } else {
        env.exponent = constants.pq - 1.0;
        env.ln_constant = M_LN2 - (constants.pq - 1.0) * constants.ln_N;
        env.constant_C = constants.c;
    }
    return env;
}

double lower_bound_envelope(double t, int j, double eps,
                            const IterationConstants& constants,
                            const BlowupClassifier& classifier,
                            const FrameSchedule& schedule) {
    if (j < 0) throw std::invalid_argument("lower_bound_envelope: j must be >= 0");
    if (!(eps > 0.0))
        throw std::domain_error("lower_bound_envelope: eps must be > 0");
    const double pq_pow_j = std::pow(constants.pq, j);
    if (classifier.regime == Regime::Subcritical) {
        if (j >= static_cast<int>(schedule.L.size()) ||
            j >= static_cast<int>(constants.ln_C.size()))
            throw std::invalid_argument("lower_bound_envelope: j beyond schedule");
        const double start = schedule.L[j] * schedule.T0;
        if (t < start)
            throw std::domain_error("lower_bound_envelope: t below the sliced start");
        const double shifted = t - start;
        double ln_val = constants.ln_C[j] + pq_pow_j * std::log(eps) -
                        constants.alpha[j] * std::log1p(t);
        if (constants.beta[j] > 0.0) {
            if (shifted <= 0.0) return 0.0;
            ln_val += constants.beta[j] * std::log(shifted);
        }
        return exp_or_inf(ln_val);
    }
    if (classifier.regime == Regime::Critical) {
        if (j >= static_cast<int>(schedule.Lambda.size()) ||
            j >= static_cast<int>(constants.ln_D.size()))
            throw std::invalid_argument("lower_bound_envelope: j beyond schedule");
        const double start = schedule.Lambda[j] * schedule.T0;
        if (t < start)
            throw std::domain_error("lower_bound_envelope: t below the sliced start");
        const double log_ratio = std::log(t / start);
        double ln_val = constants.ln_D[j] + pq_pow_j * std::log(eps);
        if (constants.gamma[j] > 0.0) {
            if (log_ratio <= 0.0) return 0.0;
            ln_val += constants.gamma[j] * std::log(log_ratio);
        }
        return exp_or_inf(ln_val);
    }
    throw std::logic_error("lower_bound_envelope: classifier regime is out of range");
}

}  // namespace cwave::frames

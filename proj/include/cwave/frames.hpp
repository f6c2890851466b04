#pragma once

#include <vector>

#include "cwave/rational.hpp"
#include "cwave/specialfn.hpp"

namespace cwave::frames {

struct ExponentPair {
    double p = 2.0;
    double q = 2.0;

    double pq() const { return p * q; }
    void validate() const {
        if (!(p > 1.0) || !(q > 1.0))
            throw std::invalid_argument("ExponentPair: p and q must exceed 1");
    }
};

enum class Regime { Subcritical, Critical, OutOfRange };

const char* regime_name(Regime r);

/// theta = 1/(pq-1) - (n_eff-1)/2, with n_eff = n + mu under scale-invariant
/// damping and n otherwise. `lambda_value` is the companion classifier
/// max{(p+1)/(pq-1), (q+1)/(pq-1)} - (n-1)/2 for the undamped system,
/// exposed read-only.
struct BlowupClassifier {
    double n_eff = 1.0;
    double theta = 0.0;
    double pq = 4.0;
    Regime regime = Regime::Subcritical;
    double lambda_value = 0.0;
    double critical_tol = 1e-12;
};

BlowupClassifier classify(int n, const DampingSpec& damping, const ExponentPair& exps,
                          double critical_tol = 1e-12);

/// Slicing sequences for one instance:
///   ell_0 = max{1/(2 T0), 1},  ell_j = 1 + (pq)^{-j}        (j >= 1)
///   L_j   = prod_{k<=j} ell_k, L_limit = prod_{k} ell_k
///   Lambda_j = 1 + (2 - 2^{-j})/T0, Lambda_limit = 1 + 2/T0
struct FrameSchedule {
    double T0 = 1.0;
    ExponentPair exps;
    std::vector<double> ell;
    std::vector<double> L;
    double L_limit = 1.0;
    std::vector<double> Lambda;
    double Lambda_limit = 1.0;

    double pq() const { return exps.pq(); }
};

FrameSchedule build_schedule(double T0, const ExponentPair& exps, int j_max);

struct SequenceTriple {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
};

/// alpha_j = (n_eff-1)/2 ((pq)^j - 1), beta_j = gamma_j = ((pq)^j - 1)/(pq - 1).
SequenceTriple closed_forms(double n_eff, const ExponentPair& exps, int j);

/// Same values produced by running the recursions
///   alpha_{j+1} = (n_eff-1)(pq-1)/2 + pq alpha_j, beta_{j+1} = 1 + pq beta_j,
///   gamma_{j+1} = 1 + pq gamma_j
/// from the zero base case.
SequenceTriple closed_forms_by_recursion(double n_eff, const ExponentPair& exps, int j);

struct RationalTriple {
    Rational alpha, beta, gamma;
};

RationalTriple closed_forms_exact(const Rational& n_eff, const Rational& pq, int j);
RationalTriple closed_forms_by_recursion_exact(const Rational& n_eff, const Rational& pq,
                                               int j);

/// lhs = sum_{k=0}^{j-1} (j-k)(pq)^k,
/// rhs = ((pq)^{j+1} - pq)/(pq-1)^2 - j/(pq-1); the two agree identically.
struct DoubleSum {
    double lhs = 0.0;
    double rhs = 0.0;
};
DoubleSum double_sum_identity(double pq, int j);

struct DoubleSumExact {
    Rational lhs, rhs;
};
DoubleSumExact double_sum_identity_exact(const Rational& pq, int j);

/// The three constants the functional lower bounds feed in: the first
/// plateau level K1 and the two frame constants C (source -> U1) and
/// K (source -> V1). Existence-only in the analysis; values come from
/// fits or caller overrides.
struct BaseConstants {
    double K1 = 1.0;
    double C = 1.0;
    double K = 1.0;
};

struct IterationConstants {
    Regime regime = Regime::Subcritical;
    double n_eff = 1.0;
    double pq = 4.0;
    double q = 2.0;
    BaseConstants base;

    // subcritical family: V1 >= C_j eps^{(pq)^j} (1+t)^{-alpha_j} (t - L_j T0)^{beta_j}
    std::vector<double> ln_C;
    std::vector<double> alpha;
    std::vector<double> beta;

    // critical family: V1 >= D_j eps^{(pq)^j} ln(t/(Lambda_j T0))^{gamma_j}
    std::vector<double> ln_D;
    std::vector<double> gamma;

    double M = 0.0;        // cap on ell_{j+1}^{beta_j pq}: limit e^{pq/(pq-1)} + 10%
    double D = 0.0, Q = 0.0, ln_E = 0.0, E = 0.0;
    double ln_E_tilde = 0.0, E_tilde = 0.0;
    double D_tilde = 0.0, Q_tilde = 0.0, ln_N = 0.0, N = 0.0, c = 0.0;
    int j0 = 0;  // smallest j making the linear-in-j residual term positive
    int j2 = 0;  // critical analogue
};

IterationConstants iteration_constants(const FrameSchedule& schedule,
                                       const BlowupClassifier& classifier,
                                       const BaseConstants& base, int j_max);

/// Lifespan upper bound shape:
///   Subcritical: bound(eps) = (E_tilde eps)^{-1/theta}
///   Critical:    bound(eps) = exp(c eps^{-(pq-1)})
struct LifespanEnvelope {
    Regime regime = Regime::Subcritical;
    double constant_C = 1.0;   // subcritical E_tilde^{-1/theta}; critical c
    double ln_constant = 0.0;
    double exponent = 0.0;     // -1/theta subcritical; pq-1 critical
    double theta = 0.0;
    double pq = 4.0;
    double ln_E_tilde = 0.0;

    double bound(double eps) const;
};

LifespanEnvelope envelope(const BlowupClassifier& classifier,
                          const IterationConstants& constants);

/// j-th member of the lower-bound sequence at time t, evaluated in log
/// space; +inf when the exponent overflows the double range. Throws a
/// domain error for t below the sliced start L_j T0 (resp. Lambda_j T0).
double lower_bound_envelope(double t, int j, double eps,
                            const IterationConstants& constants,
                            const BlowupClassifier& classifier,
                            const FrameSchedule& schedule);

}  // namespace cwave::frames

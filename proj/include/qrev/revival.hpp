#ifndef QREV_REVIVAL_HPP
#define QREV_REVIVAL_HPP

#include <functional>
#include <optional>

#include "qrev/mathieu.hpp"
#include "qrev/spectra.hpp"
#include "qrev/time_value.hpp"

namespace qrev {

// Relative guard width for the resonance and perturbation-breakdown
// singularities. Values inside the band are treated as singular; anything
// outside is legitimate near-resonance physics.
inline constexpr double kSingularityEps = 1e-9;

// Resonance factor Delta = (1 - 1/(N omega))^-1. Throws
// ResonanceSingularityError inside the guard band around omega = 1/N.
// The lambda = 0 convention Delta = 1 is applied by compute_timescales, not
// here.
double delta_factor(double omega, int N);

// mu = N^2 hbar zeta Delta / (2 omega).
double mu_factor(int N, double hbar, double zeta, double delta, double omega);

struct ModFactors {
    double M_cl = 0.0; // <= 0 for |mu| < 1
    double M_Q = 0.0;  // >= 0 for |mu| < 1
};

// Drive-induced fractional shifts of the two time scales:
//   M_cl = -1/2 (lambda V zeta Delta^2 / omega^2)^2 / (1 - mu^2)^2
//   M_Q  = +1/2 (lambda V zeta Delta^2 / omega^2)^2 (3 + mu^2)/(1 - mu^2)^3
// mu is an explicit input (not recomputed) so the factors can be probed at
// controlled parameter combinations.
ModFactors mod_factors(double lambda, double V, double zeta, double delta, double omega,
                       double mu);

struct DrivenTimes {
    double Tl_cl = 0.0;
    TimeValue Tl_Q;
};

// Tl_cl = (1 - M_cl) T0_cl Delta ; Tl_Q = (1 - M_Q) T0_Q, unbounded T0_Q
// passing through.
DrivenTimes driven_times(double T0_cl, TimeValue T0_Q, double delta, double M_cl, double M_Q);

struct TimescaleOptions {
    double h = 0.0;        // FD step; 0 -> 1e-4 * max(1, |n0|)
    double rel_tol = 1e-3; // h vs h/2 agreement required
};

// Recurrence time of order j in {1,2,3}: 2 pi / omega^(j) with
// omega^(j) = (j! hbar)^-1 d^j E / dn^j at n0 = I0 / hbar, by central finite
// differences of the supplied energy function. j=1 is the classical period,
// j=2 the revival time. A derivative lost in rounding noise at both steps
// reports an unbounded time; estimates that disagree above the noise floor
// throw DerivativeInstabilityError.
TimeValue timescale_j(const std::function<double(double)>& energy, double I0, int j, double hbar,
                      const TimescaleOptions& opts = {});

enum class Regime { vanishing, weak, strong, intermediate };

const char* regime_name(Regime r);

struct RegimeThresholds {
    double weak_mu = 0.1;   // weak: |mu| < weak_mu and |q| < weak_q
    double weak_q = 1.0;
    double strong_q = 1.0;  // strong: |q| >= strong_q and |beta| < strong_beta
    double strong_beta = 0.1;
    double zeta_eps = 0.0;  // |zeta| <= zeta_eps -> vanishing
};

Regime classify_regime(double mu, double q, double beta, double zeta,
                       const RegimeThresholds& thr = {});

struct RegimeReport {
    Regime regime = Regime::intermediate;
    // Relation defect, left minus right over the right-hand magnitude;
    // evaluated in the rate domain (unbounded -> 0) when a time is
    // unbounded.
    double residual = 0.0;
    std::optional<double> C_k; // power-law slope constant, when applicable
    double alpha = 0.0;
    double beta = 0.0;
};

// Weak nonlinearity (T_Q >> T_cl): checks
//   3 Tl_cl T0_Q + Delta T0_cl Tl_Q = 4 Delta T0_Q T0_cl
// with the substitutions M_cl = -alpha, M_Q = +3 alpha,
// alpha = 1/2 (lambda V zeta / omega^2)^2, which make it an exact identity.
// (The source relation's printed "M_Q = -3 M_cl = -3 alpha" contradicts the
// explicit M-factor signs; the signs used here are the consistent set.)
RegimeReport weak_regime(const ResonanceContext& ctx, double T0_cl, TimeValue T0_Q, double delta);

// Strong nonlinearity: checks Tl_cl T0_Q - Delta T0_cl Tl_Q = 0 with
// M_cl = M_Q = -beta, beta = 1/2 (4 lambda V / (N^2 zeta hbar^2))^2.
RegimeReport strong_regime(const ResonanceContext& ctx, double T0_cl, TimeValue T0_Q,
                           double delta);

// Power-law interdependence: C_k = (2/Delta)((k+2)/(k-2))(r+1/2) and the
// applicable linear relation between Tl_Q and Tl_cl (weak: Tl_Q =
// -3 C_k Tl_cl + 4 T0_Q ; strong: Tl_Q = C_k Tl_cl), evaluated with the
// regime's substituted modification factor of magnitude mod_mag (alpha or
// beta). k = 2 is rejected.
RegimeReport powerlaw_interdependence(const PowerLawSystem& sys, double r, double delta,
                                      Regime regime, double mod_mag = 0.0);

// Principal output record: everything the theory predicts for one parameter
// point.
struct TimeScales {
    double delta = 1.0;
    double mu = 0.0;
    double M_cl = 0.0;
    double M_Q = 0.0;
    double T0_cl = 0.0;
    TimeValue T0_Q;
    double Tl_cl = 0.0;
    TimeValue Tl_Q;
    double alpha = 0.0;
    double beta = 0.0;
};

struct TimesReport {
    TimeScales times;
    double q = 0.0;   // Mathieu parameter (0 when zeta = 0)
    double nu0 = 0.0; // nu(k = 0)
    Regime regime = Regime::intermediate;
    double weak_residual = 0.0;
    double strong_residual = 0.0;
};

// Full pipeline for one parameter point. lambda = 0 short-circuits to the
// undriven convention (Delta = 1, M = 0, Tl = T0 bit-exactly) without
// touching the resonance guards.
TimesReport compute_timescales(const ResonanceContext& ctx, const RegimeThresholds& thr = {});

} // namespace qrev

#endif

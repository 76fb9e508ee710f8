#include "qrev/revival.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace qrev {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();
} // namespace

double delta_factor(double omega, int N) {
    if (N < 1) throw DomainError("delta_factor: N must be >= 1");
    if (omega == 0.0) throw DomainError("delta_factor: omega must be nonzero");
    const double omega_n = 1.0 / N;
    if (std::abs(omega - omega_n) < kSingularityEps * omega_n) {
        std::ostringstream msg;
        msg << "delta_factor: omega = " << omega << " sits on the N=" << N
            << " resonance; Delta diverges";
        throw ResonanceSingularityError(msg.str());
    }
    return 1.0 / (1.0 - omega_n / omega);
}

double mu_factor(int N, double hbar, double zeta, double delta, double omega) {
    if (omega == 0.0) throw DomainError("mu_factor: omega must be nonzero");
    return static_cast<double>(N) * N * hbar * zeta * delta / (2.0 * omega);
}

ModFactors mod_factors(double lambda, double V, double zeta, double delta, double omega,
                       double mu) {
    const double denom = 1.0 - mu * mu;
    if (std::abs(denom) < kSingularityEps) {
        std::ostringstream msg;
        msg << "mod_factors: |mu| = " << std::abs(mu)
            << " is at the perturbation breakdown |mu| = 1";
        throw PerturbationBreakdownError(msg.str());
    }
    const double base = lambda * V * zeta * delta * delta / (omega * omega);
    const double b2 = base * base;
    ModFactors m;
    m.M_cl = -0.5 * b2 / (denom * denom);
    m.M_Q = 0.5 * b2 * (3.0 + mu * mu) / (denom * denom * denom);
    return m;
}

DrivenTimes driven_times(double T0_cl, TimeValue T0_Q, double delta, double M_cl, double M_Q) {
    DrivenTimes t;
    t.Tl_cl = (1.0 - M_cl) * T0_cl * delta;
    t.Tl_Q = T0_Q.scaled(1.0 - M_Q);
    return t;
}

TimeValue timescale_j(const std::function<double(double)>& energy, double I0, int j, double hbar,
                      const TimescaleOptions& opts) {
    if (j < 1 || j > 3) throw DomainError("timescale_j: j must be 1, 2 or 3");
    if (!(hbar > 0.0)) throw DomainError("timescale_j: hbar must be positive");
    const double n0 = I0 / hbar;
    const double h = opts.h > 0.0 ? opts.h : 1e-4 * std::max(1.0, std::abs(n0));

    auto deriv = [&](double step) {
        switch (j) {
            case 1: return (energy(n0 + step) - energy(n0 - step)) / (2.0 * step);
            case 2:
                return (energy(n0 + step) - 2.0 * energy(n0) + energy(n0 - step)) /
                       (step * step);
            default:
                return (energy(n0 + 2.0 * step) - 2.0 * energy(n0 + step) +
                        2.0 * energy(n0 - step) - energy(n0 - 2.0 * step)) /
                       (2.0 * step * step * step);
        }
    };

    const double d1 = deriv(h);
    const double d2 = deriv(h / 2.0);
    // Rounding floor: cancellation of function values ~|E| leaves this much
    // noise in a j-th difference at step h/2.
    const double floor =
        64.0 * std::max(1.0, std::abs(energy(n0))) * kEps / std::pow(h / 2.0, j);
    const double mag = std::max(std::abs(d1), std::abs(d2));
    if (std::abs(d1 - d2) > opts.rel_tol * mag) {
        if (mag <= floor) {
            // Derivative indistinguishable from zero: unbounded time scale.
            return TimeValue::unbounded();
        }
        std::ostringstream msg;
        msg << "timescale_j: j=" << j << " estimates at h and h/2 disagree (" << d1 << " vs "
            << d2 << ")";
        throw DerivativeInstabilityError(msg.str());
    }
    if (mag <= floor) return TimeValue::unbounded();

    double fact = 1.0;
    for (int i = 2; i <= j; ++i) fact *= i;
    const double omega_j = d2 / (fact * hbar);
    if (omega_j == 0.0) return TimeValue::unbounded();
    return TimeValue::finite(2.0 * kPi / omega_j);
}

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::vanishing: return "vanishing";
        case Regime::weak: return "weak";
        case Regime::strong: return "strong";
        default: return "intermediate";
    }
}

Regime classify_regime(double mu, double q, double beta, double zeta,
                       const RegimeThresholds& thr) {
    if (std::abs(zeta) <= thr.zeta_eps) return Regime::vanishing;
    if (std::abs(mu) < thr.weak_mu && std::abs(q) < thr.weak_q) return Regime::weak;
    if (std::abs(q) >= thr.strong_q && std::abs(beta) < thr.strong_beta) return Regime::strong;
    return Regime::intermediate;
}

namespace {

double weak_alpha(const ResonanceContext& ctx) {
    const double w2 = ctx.spectrum.omega * ctx.spectrum.omega;
    const double x = ctx.lambda * ctx.V * ctx.spectrum.zeta / w2;
    return 0.5 * x * x;
}

double strong_beta(const ResonanceContext& ctx) {
    const double h = ctx.spectrum.hbar;
    const double den = static_cast<double>(ctx.N) * ctx.N * ctx.spectrum.zeta * h * h;
    if (den == 0.0) return 0.0;
    const double x = 4.0 * ctx.lambda * ctx.V / den;
    return 0.5 * x * x;
}

} // namespace

RegimeReport weak_regime(const ResonanceContext& ctx, double T0_cl, TimeValue T0_Q,
                         double delta) {
    RegimeReport rep;
    rep.regime = Regime::weak;
    rep.alpha = weak_alpha(ctx);
    const double alpha = rep.alpha;
    if (T0_Q.is_unbounded()) {
        // Rate domain: every term in the relation carries a factor 1/T0_Q
        // or 1/Tl_Q, all zero here.
        rep.residual = 0.0;
        return rep;
    }
    const double t0q = T0_Q.value();
    const double tl_cl = (1.0 + alpha) * T0_cl * delta;   // M_cl = -alpha
    const double tl_q = (1.0 - 3.0 * alpha) * t0q;        // M_Q = +3 alpha
    const double lhs = 3.0 * tl_cl * t0q + delta * T0_cl * tl_q;
    const double rhs = 4.0 * delta * t0q * T0_cl;
    rep.residual = (lhs - rhs) / std::abs(rhs);
    return rep;
}

RegimeReport strong_regime(const ResonanceContext& ctx, double T0_cl, TimeValue T0_Q,
                           double delta) {
    RegimeReport rep;
    rep.regime = Regime::strong;
    rep.beta = strong_beta(ctx);
    const double beta = rep.beta;
    if (T0_Q.is_unbounded()) {
        rep.residual = 0.0;
        return rep;
    }
    const double t0q = T0_Q.value();
    const double tl_cl = (1.0 + beta) * T0_cl * delta; // M_cl = -beta
    const double tl_q = (1.0 + beta) * t0q;            // M_Q = -beta
    const double lhs = tl_cl * t0q - delta * T0_cl * tl_q;
    rep.residual = lhs / std::abs(tl_cl * t0q);
    return rep;
}

RegimeReport powerlaw_interdependence(const PowerLawSystem& sys, double r, double delta,
                                      Regime regime, double mod_mag) {
    if (std::abs(sys.k_exp - 2.0) < kHarmonicBand)
        throw DomainError("powerlaw_interdependence: C_k is undefined at k = 2");
    if (regime != Regime::weak && regime != Regime::strong)
        throw DomainError("powerlaw_interdependence: regime must be weak or strong");
    const double k = sys.k_exp;
    const double C_k = 2.0 / delta * (k + 2.0) / (k - 2.0) * (r + 0.5);
    UnmodulatedTimes t0 = unmodulated_times(sys, r);
    const double t0q = t0.T0_Q.value(); // finite since k != 2

    RegimeReport rep;
    rep.regime = regime;
    rep.C_k = C_k;
    double tl_cl, tl_q, rhs;
    if (regime == Regime::weak) {
        rep.alpha = mod_mag;
        tl_cl = (1.0 + mod_mag) * t0.T0_cl * delta;
        tl_q = (1.0 - 3.0 * mod_mag) * t0q;
        rhs = -3.0 * C_k * tl_cl + 4.0 * t0q;
    } else {
        rep.beta = mod_mag;
        tl_cl = (1.0 + mod_mag) * t0.T0_cl * delta;
        tl_q = (1.0 + mod_mag) * t0q;
        rhs = C_k * tl_cl;
    }
    rep.residual = (tl_q - rhs) / std::max(std::abs(rhs), std::abs(tl_q));
    return rep;
}

TimesReport compute_timescales(const ResonanceContext& ctx, const RegimeThresholds& thr) {
    const SpectrumModel& sp = ctx.spectrum;
    if (!(sp.omega > 0.0)) throw DomainError("compute_timescales: omega must be positive");

    TimesReport rep;
    TimeScales& ts = rep.times;
    ts.T0_cl = 2.0 * kPi / sp.omega;
    ts.T0_Q = sp.zeta == 0.0 ? TimeValue::unbounded()
                             : TimeValue::finite(4.0 * kPi / (sp.hbar * sp.zeta));

    if (ctx.lambda == 0.0) {
        // No resonances without modulation: Delta = 1, the modification
        // factors disappear, and the driven times equal the undriven ones
        // bit-exactly.
        ts.delta = 1.0;
        ts.mu = sp.zeta == 0.0 ? 0.0 : mu_factor(ctx.N, sp.hbar, sp.zeta, 1.0, sp.omega);
        ts.M_cl = 0.0;
        ts.M_Q = 0.0;
        ts.Tl_cl = ts.T0_cl;
        ts.Tl_Q = ts.T0_Q;
        ts.alpha = 0.0;
        ts.beta = 0.0;
        rep.q = 0.0;
        rep.nu0 = sp.zeta == 0.0 ? 0.0 : nu_of_k(ctx, 0.0);
        rep.regime = classify_regime(ts.mu, rep.q, ts.beta, sp.zeta, thr);
        rep.weak_residual = 0.0;
        rep.strong_residual = 0.0;
        return rep;
    }

    ts.delta = delta_factor(sp.omega, ctx.N);
    ts.mu = mu_factor(ctx.N, sp.hbar, sp.zeta, ts.delta, sp.omega);
    ModFactors m = mod_factors(ctx.lambda, ctx.V, sp.zeta, ts.delta, sp.omega, ts.mu);
    ts.M_cl = m.M_cl;
    ts.M_Q = m.M_Q;
    DrivenTimes dt = driven_times(ts.T0_cl, ts.T0_Q, ts.delta, ts.M_cl, ts.M_Q);
    ts.Tl_cl = dt.Tl_cl;
    ts.Tl_Q = dt.Tl_Q;

    RegimeReport weak = weak_regime(ctx, ts.T0_cl, ts.T0_Q, ts.delta);
    RegimeReport strong = strong_regime(ctx, ts.T0_cl, ts.T0_Q, ts.delta);
    ts.alpha = weak.alpha;
    ts.beta = strong.beta;
    rep.q = sp.zeta == 0.0 ? 0.0 : mathieu_q(ctx);
    rep.nu0 = sp.zeta == 0.0 ? 0.0 : nu_of_k(ctx, 0.0);
    rep.regime = classify_regime(ts.mu, rep.q, ts.beta, sp.zeta, thr);
    rep.weak_residual = weak.residual;
    rep.strong_residual = strong.residual;
    return rep;
}

} // namespace qrev

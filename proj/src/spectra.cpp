#include "qrev/spectra.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace qrev {

namespace {
constexpr double kPi = std::numbers::pi;
} // namespace

void PowerLawSystem::validate() const {
    if (!(V0 > 0.0) || !(a > 0.0) || !(mass > 0.0) || !(hbar > 0.0))
        throw DomainError("PowerLawSystem: V0, a, mass, hbar must all be positive");
    if (!(k_exp > 0.0)) throw DomainError("PowerLawSystem: exponent k must be positive");
}

double powerlaw_energy(const PowerLawSystem& sys, double n) {
    sys.validate();
    if (n < 0.0) throw DomainError("powerlaw_energy: n must be >= 0");
    const double k = sys.k_exp;
    // Gamma ratio via lgamma: 1/k is large for small k and Gamma overflows.
    const double lg =
        std::lgamma(1.0 / k + 1.5) - std::lgamma(1.0 / k + 1.0) - std::lgamma(1.5);
    const double inner = (n + 0.5) * kPi * sys.hbar / (2.0 * sys.a * std::sqrt(2.0 * sys.mass)) *
                         std::pow(sys.V0, 1.0 / k) * std::exp(lg);
    return std::pow(inner, 2.0 * k / (k + 2.0));
}

double powerlaw_omega(const PowerLawSystem& sys, double r) {
    if (!(r > 0.0)) throw DomainError("powerlaw_omega: r must be > 0");
    const double k = sys.k_exp;
    return (2.0 * k / (k + 2.0)) / (r + 0.5) * powerlaw_energy(sys, r) / sys.hbar;
}

double powerlaw_zeta(const PowerLawSystem& sys, double r) {
    if (!(r > 0.0)) throw DomainError("powerlaw_zeta: r must be > 0");
    const double k = sys.k_exp;
    if (std::abs(k - 2.0) < kHarmonicBand) return 0.0;
    return (2.0 * k * (k - 2.0) / ((k + 2.0) * (k + 2.0))) / ((r + 0.5) * (r + 0.5)) *
           powerlaw_energy(sys, r) / (sys.hbar * sys.hbar);
}

UnmodulatedTimes unmodulated_times(const PowerLawSystem& sys, double r) {
    UnmodulatedTimes t;
    t.T0_cl = 2.0 * kPi / powerlaw_omega(sys, r);
    const double zeta = powerlaw_zeta(sys, r);
    t.T0_Q = zeta == 0.0 ? TimeValue::unbounded()
                         : TimeValue::finite(4.0 * kPi / (sys.hbar * zeta));
    return t;
}

SpectrumModel powerlaw_spectrum(const PowerLawSystem& sys, double r) {
    SpectrumModel m;
    m.energy = [sys](double n) { return powerlaw_energy(sys, n); };
    m.r = r;
    m.omega = powerlaw_omega(sys, r);
    m.zeta = powerlaw_zeta(sys, r);
    m.hbar = sys.hbar;
    return m;
}

PotentialGrid powerlaw_box(const PowerLawSystem& sys, int n_levels, int n_points) {
    sys.validate();
    if (n_levels < 1 || n_points < 16) throw DomainError("powerlaw_box: bad sizes");
    const double e_top = powerlaw_energy(sys, static_cast<double>(n_levels));
    const double z_turn = sys.a * std::pow(e_top / sys.V0, 1.0 / sys.k_exp);
    const double half = z_turn / 0.7;
    const double cap = 1e3 * e_top;
    PotentialGrid g;
    g.z_min = -half;
    g.z_max = half;
    g.v.resize(n_points);
    for (int i = 0; i < n_points; ++i) {
        const double z = g.z_min + (g.z_max - g.z_min) * i / n_points;
        g.v[i] = std::min(sys.V0 * std::pow(std::abs(z / sys.a), sys.k_exp), cap);
    }
    return g;
}

NumericSpectrum solve_spectrum(const PotentialGrid& pot, double mass, double hbar, int n_levels,
                               bool want_vectors) {
    const int p = static_cast<int>(pot.v.size());
    if (p < 16) throw DomainError("solve_spectrum: grid too small");
    if (n_levels < 1 || n_levels > p / 2)
        throw DomainError("solve_spectrum: n_levels out of range for this grid");
    const double dz = pot.dz();
    const double kin = hbar * hbar / (2.0 * mass * dz * dz);

    std::vector<double> diag(p), off(p - 1, -kin);
    for (int i = 0; i < p; ++i) diag[i] = 2.0 * kin + pot.v[i];

    NumericSpectrum ns;
    ns.energies.resize(n_levels);
    ns.n_points = p;
    ns.z_min = pot.z_min;
    ns.dz = dz;

    std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(n_levels));
    lapack_int m_found = 0;
    lapack_int info;
    if (want_vectors) {
        ns.states.assign(static_cast<std::size_t>(p) * n_levels, 0.0);
        info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', p, diag.data(), off.data(), 0.0, 0.0, 1,
                              n_levels, 0.0, &m_found, ns.energies.data(), ns.states.data(), p,
                              isuppz.data());
    } else {
        info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'N', 'I', p, diag.data(), off.data(), 0.0, 0.0, 1,
                              n_levels, 0.0, &m_found, ns.energies.data(), nullptr, p,
                              isuppz.data());
    }
    if (info != 0 || m_found != n_levels) {
        std::ostringstream msg;
        msg << "solve_spectrum: dstevr failed, info=" << info << " found=" << m_found;
        throw ConvergenceError(msg.str());
    }
    if (want_vectors) {
        // Normalize to sum |phi|^2 dz = 1, fix the largest component positive.
        for (int j = 0; j < n_levels; ++j) {
            double* v = ns.states.data() + static_cast<std::size_t>(j) * p;
            double s2 = 0.0;
            int imax = 0;
            for (int i = 0; i < p; ++i) {
                s2 += v[i] * v[i];
                if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
            }
            double scale = 1.0 / std::sqrt(s2 * dz);
            if (v[imax] < 0.0) scale = -scale;
            for (int i = 0; i < p; ++i) v[i] *= scale;
        }
    }
    return ns;
}

namespace {

// Cubic Lagrange through the four tabulated levels around n.
double interp_energy(const std::vector<double>& e, double n) {
    const int last = static_cast<int>(e.size()) - 1;
    int i0 = static_cast<int>(std::floor(n)) - 1;
    i0 = std::clamp(i0, 0, last - 3);
    double out = 0.0;
    for (int j = 0; j < 4; ++j) {
        double lj = 1.0;
        for (int l = 0; l < 4; ++l) {
            if (l == j) continue;
            lj *= (n - (i0 + l)) / static_cast<double>(j - l);
        }
        out += lj * e[i0 + j];
    }
    return out;
}

} // namespace

std::vector<double> numeric_energies(const PotentialGrid& pot, double mass, double hbar,
                                     int n_levels, const NumericSpectrumOptions& opts) {
    NumericSpectrum coarse = solve_spectrum(pot, mass, hbar, n_levels, false);

    std::vector<double> energies = coarse.energies;
    if (opts.check_refinement || opts.richardson) {
        PotentialGrid fine;
        fine.z_min = pot.z_min;
        fine.z_max = pot.z_max;
        fine.v.resize(2 * pot.v.size());
        for (std::size_t i = 0; i < fine.v.size(); ++i) {
            // Midpoint resample: average neighbors for the new odd nodes.
            if (i % 2 == 0) {
                fine.v[i] = pot.v[i / 2];
            } else {
                const std::size_t a = i / 2, b = std::min(a + 1, pot.v.size() - 1);
                fine.v[i] = 0.5 * (pot.v[a] + pot.v[b]);
            }
        }
        NumericSpectrum refined = solve_spectrum(fine, mass, hbar, n_levels, false);
        if (opts.check_refinement) {
            for (int j = 0; j < n_levels; ++j) {
                const double ref = std::max(std::abs(refined.energies[j]), 1e-300);
                const double shift = std::abs(refined.energies[j] - coarse.energies[j]) / ref;
                if (shift > opts.refine_tol) {
                    std::ostringstream msg;
                    msg << "numeric_spectrum: level " << j << " moved by " << shift
                        << " (rel) under grid refinement x2; last iterates "
                        << coarse.energies[j] << " -> " << refined.energies[j];
                    throw ConvergenceError(msg.str());
                }
            }
        }
        if (opts.richardson) {
            for (int j = 0; j < n_levels; ++j)
                energies[j] = (4.0 * refined.energies[j] - coarse.energies[j]) / 3.0;
        } else {
            energies = refined.energies;
        }
    }
    return energies;
}

SpectrumModel numeric_spectrum(const PotentialGrid& pot, double mass, double hbar, int n_levels,
                               double r, const NumericSpectrumOptions& opts) {
    if (!(r >= 1.5) || !(r <= n_levels - 2.5))
        throw DomainError("numeric_spectrum: need 1.5 <= r <= n_levels - 2.5");
    std::vector<double> energies = numeric_energies(pot, mass, hbar, n_levels, opts);

    SpectrumModel m;
    m.energy = [energies](double n) {
        if (n < 0.0) throw DomainError("numeric spectrum: n must be >= 0");
        if (n > static_cast<double>(energies.size()) - 1.0)
            throw DomainError("numeric spectrum: n beyond tabulated levels");
        return interp_energy(energies, n);
    };
    m.r = r;
    m.hbar = hbar;
    // Unit-step central differences at r (exact lattice differences when r
    // is an integer level index).
    m.omega = (m.energy(r + 1.0) - m.energy(r - 1.0)) / (2.0 * hbar);
    m.zeta = (m.energy(r + 1.0) - 2.0 * m.energy(r) + m.energy(r - 1.0)) / (hbar * hbar);
    return m;
}

double matrix_element(const NumericSpectrum& ns, int bra, int ket, std::span<const double> c) {
    if (ns.states.empty()) throw DomainError("matrix_element: spectrum solved without vectors");
    const int nlev = static_cast<int>(ns.energies.size());
    if (bra < 0 || ket < 0 || bra >= nlev || ket >= nlev)
        throw DomainError("matrix_element: state index out of range");
    if (static_cast<int>(c.size()) != ns.n_points)
        throw DomainError("matrix_element: coupling not sampled on the solver grid");
    auto vb = ns.state(bra);
    auto vk = ns.state(ket);
    double acc = 0.0;
    for (int i = 0; i < ns.n_points; ++i) acc += vb[i] * c[i] * vk[i];
    return std::abs(acc * ns.dz);
}

} // namespace qrev

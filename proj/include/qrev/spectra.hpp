#ifndef QREV_SPECTRA_HPP
#define QREV_SPECTRA_HPP

#include <functional>
#include <span>
#include <vector>

#include "qrev/errors.hpp"
#include "qrev/time_value.hpp"

namespace qrev {

// Power-law well V1(z) = V0 |z/a|^k in the dimensionless units used
// throughout: energies in units of V0's scale, lengths of a, and a scaled
// Planck constant hbar.
struct PowerLawSystem {
    double V0 = 1.0;
    double a = 1.0;
    double k_exp = 2.0;
    double mass = 1.0;
    double hbar = 1.0;

    void validate() const; // throws DomainError on a non-physical system
};

// Below this distance from k = 2 the spectrum is treated as exactly linear:
// zeta is set to 0 and the revival time to unbounded, instead of letting
// cancellation in (k - 2) fake a finite value.
inline constexpr double kHarmonicBand = 1e-9;

// Semiclassical eigenvalue of the power-law well at (possibly fractional)
// quantum number n.
double powerlaw_energy(const PowerLawSystem& sys, double n);

// Classical frequency omega = E'_r / hbar at mean quantum number r.
double powerlaw_omega(const PowerLawSystem& sys, double r);

// Spectral curvature zeta = E''_r / hbar^2; sign follows (k - 2), exactly 0
// inside the harmonic band.
double powerlaw_zeta(const PowerLawSystem& sys, double r);

struct UnmodulatedTimes {
    double T0_cl = 0.0;  // classical period 2 pi / omega
    TimeValue T0_Q;      // revival time 4 pi / (hbar zeta); unbounded at k = 2
};

UnmodulatedTimes unmodulated_times(const PowerLawSystem& sys, double r);

// Spectrum abstraction used by the resonance analysis: eigenenergy as a
// function of (real) quantum number plus its first two scaled derivatives at
// the packet center r. hbar rides along because omega and zeta are defined
// through it.
struct SpectrumModel {
    std::function<double(double)> energy; // n -> E_n, n >= 0 (half-integer offsets fine)
    double r = 0.0;
    double omega = 0.0; // E'_r / hbar
    double zeta = 0.0;  // E''_r / hbar^2
    double hbar = 1.0;
};

// Analytic backend packaged as a SpectrumModel.
SpectrumModel powerlaw_spectrum(const PowerLawSystem& sys, double r);

// ---------------------------------------------------------------------------
// Numeric oracle backend: direct diagonalization of H0 = p^2/2m + V1 on a
// grid with a symmetric second-order Laplacian and hard-wall boundaries.

// Potential sampled on n_points nodes z_i = z_min + i dz, dz = (z_max -
// z_min)/n_points (the rightmost node is z_max - dz, matching the periodic
// propagation grid). Ghost walls sit one node outside each end.
struct PotentialGrid {
    double z_min = 0.0;
    double z_max = 0.0;
    std::vector<double> v;

    double dz() const { return (z_max - z_min) / static_cast<double>(v.size()); }
    double z_at(std::size_t i) const { return z_min + static_cast<double>(i) * dz(); }
};

// Sample V0|z/a|^k on a symmetric box sized so the n_levels-th WKB turning
// point sits at 70% of the half-width. The potential is clipped at
// 1e3 * E(n_levels): for steep walls (large k) the unclipped edge values
// reach ~1e18 and their norm contaminates every eigenvalue at machine
// precision, while the clipped barrier is still a thousand times the levels
// of interest.
PotentialGrid powerlaw_box(const PowerLawSystem& sys, int n_levels, int n_points);

// Raw single-grid eigensolve. Eigenvectors (optional) are normalized to
// sum |phi|^2 dz = 1 with the largest-magnitude component positive, stored
// column-major (n_points x n_levels).
struct NumericSpectrum {
    std::vector<double> energies; // ascending, size n_levels
    std::vector<double> states;   // empty unless requested
    int n_points = 0;
    double z_min = 0.0;
    double dz = 0.0;

    std::span<const double> state(int j) const {
        return {states.data() + static_cast<std::size_t>(j) * n_points,
                static_cast<std::size_t>(n_points)};
    }
};

NumericSpectrum solve_spectrum(const PotentialGrid& pot, double mass, double hbar, int n_levels,
                               bool want_vectors = false);

struct NumericSpectrumOptions {
    // Refine the grid x2 and fail if any of the first n_levels eigenvalues
    // moves by more than this (relative). The shift between two raw
    // second-order solves is the h^2 term itself, so this guards against
    // gross under-resolution; the Richardson-extrapolated result is far
    // more accurate than the raw shift.
    double refine_tol = 1e-3;
    bool check_refinement = true;
    // Return Richardson-extrapolated energies from the two solves (kills the
    // h^2 discretization term; the convergence check uses the raw values).
    bool richardson = true;
};

// Eigenvalue table with the refinement check and (by default) Richardson
// extrapolation applied.
std::vector<double> numeric_energies(const PotentialGrid& pot, double mass, double hbar,
                                     int n_levels, const NumericSpectrumOptions& opts = {});

// SpectrumModel built from the numeric solve: E(n) is a cubic interpolant
// through the tabulated levels, omega and zeta come from unit-step central
// differences at r. Requires 1.5 <= r <= n_levels - 2.5.
SpectrumModel numeric_spectrum(const PotentialGrid& pot, double mass, double hbar, int n_levels,
                               double r, const NumericSpectrumOptions& opts = {});

// |<bra| c(z) |ket>| for eigenstates of a NumericSpectrum solved with
// vectors; c is sampled on the same grid. Used for the resonant coupling
// matrix element (dipole: c(z) = z).
double matrix_element(const NumericSpectrum& ns, int bra, int ket, std::span<const double> c);

} // namespace qrev

#endif

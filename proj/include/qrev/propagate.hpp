#ifndef QREV_PROPAGATE_HPP
#define QREV_PROPAGATE_HPP

#include <complex>
#include <optional>
#include <vector>

#include "qrev/spectra.hpp"

namespace qrev {

// Periodic FFT box for the split-operator propagator. dt may be negative
// (time-reversed stepping).
struct Grid {
    double z_min = 0.0;
    double z_max = 0.0;
    int n_points = 0; // power of two, >= 256
    double dt = 0.0;

    double dz() const { return (z_max - z_min) / n_points; }
    void validate() const;
};

struct WavePacketState {
    Grid grid;
    std::vector<std::complex<double>> psi; // amplitude per node
    double t = 0.0;
    double mass = 1.0;
    double hbar = 1.0;
    std::vector<double> v0; // static potential sampled on the grid

    double norm() const; // sum |psi|^2 dz
};

// Drive side of H = H0 + lambda V(z) sin t. coupling holds V(z) sampled on
// the propagation grid; empty means undriven.
struct CouplingDrive {
    double lambda = 0.0;
    int N = 1;
    std::vector<double> coupling;
};

struct AutocorrelationSeries {
    std::vector<double> times;
    std::vector<std::complex<double>> amplitudes; // <psi(0)|psi(t)>

    double abs2(std::size_t i) const { return std::norm(amplitudes[i]); }
    std::size_t size() const { return times.size(); }
};

// Every sample_every-th step keep only samples at (near) integer multiples
// of `period` — used to read driven dynamics stroboscopically at the drive
// period, where the rotating-frame phases of the resonance ansatz cancel.
AutocorrelationSeries stroboscopic(const AutocorrelationSeries& s, double period);

// Gaussian superposition of H0 eigenstates, c_n ~ exp(-(n-n0)^2/(2 width^2))
// (width is the amplitude-distribution width; the population distribution
// has std width/sqrt(2)). width below 0.05 collapses to the single nearest
// eigenstate. ns must carry eigenvectors on the same grid. Throws GridError
// if the packet edge amplitude exceeds 1e-8 of its peak.
WavePacketState init_packet(const NumericSpectrum& ns, const PotentialGrid& pot, double n0,
                            double width, double dt, double mass, double hbar);

// dt resolving both the drive period (2 pi) and the populated spectrum:
// min(2 pi / (20 (E + 4 sigma_E)/hbar), 2 pi / 20) for driven systems.
double suggested_dt(const WavePacketState& state, bool driven);

struct EvolveOptions {
    int sample_every = 10;
    double norm_tol = 1e-8;      // InstabilityError beyond this drift
    double edge_tol = 1e-6;      // InstabilityError when edge/peak exceeds this
    bool track_energy = false;   // record <H0> at samples (undriven diagnostics)
};

struct EvolveMonitor {
    std::vector<double> norms;    // at samples
    std::vector<double> energies; // <H0>, only when track_energy
    double max_norm_drift = 0.0;
};

// Second-order split-operator evolution of H0 + lambda V(z) sin t:
// half-kinetic, full potential with sin evaluated at the step midpoint,
// half-kinetic. Autocorrelation against the t=0 state sampled every
// sample_every steps (the t=0 sample included). Unitary by construction;
// norm is monitored against round-off drift.
AutocorrelationSeries evolve(WavePacketState& state, const CouplingDrive& drive, double t_end,
                             const EvolveOptions& opts = {}, EvolveMonitor* monitor = nullptr);

struct DetectOptions {
    // T_cl: peaks in the early window qualify at >= cl_prominence times the
    // window's largest peak prominence.
    double cl_prominence = 0.5;
    double early_window = 0.3;     // fraction of the span scanned for classical peaks
    double revival_threshold = 0.7; // |A|^2 the revival peak must reach
    double late_window = 0.15;      // revival search starts after this fraction
};

struct RevivalEstimate {
    std::optional<double> T_cl_est;
    std::optional<double> T_Q_est;
    double confidence = 0.0; // prominence of the revival peak
};

// Classical period from the mean spacing of qualifying early-time peaks
// (quadratic sub-sample interpolation); revival time from the late-time
// envelope maximum above the threshold, refined by a parabola through the
// neighboring classical-peak heights. Flat or featureless series report
// nothing rather than failing.
RevivalEstimate detect_times(const AutocorrelationSeries& series, const DetectOptions& opts = {});

} // namespace qrev

#endif

#include "qrev/propagate.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

namespace qrev {

namespace {

constexpr double kPi = std::numbers::pi;

// FFTW plan creation/destruction is not thread-safe; executing distinct
// plans is.
std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

struct FftPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    fftw_complex* buf = nullptr;
    int n = 0;

    explicit FftPair(int n_points) : n(n_points) {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        buf = fftw_alloc_complex(static_cast<std::size_t>(n));
        fwd = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~FftPair() {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(buf);
    }
    FftPair(const FftPair&) = delete;
    FftPair& operator=(const FftPair&) = delete;

    std::complex<double>* data() { return reinterpret_cast<std::complex<double>*>(buf); }
    void forward() { fftw_execute(fwd); }
    void backward() { fftw_execute(bwd); }
};

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

} // namespace

void Grid::validate() const {
    if (!is_power_of_two(n_points) || n_points < 256)
        throw DomainError("Grid: n_points must be a power of two >= 256");
    if (!(z_max > z_min)) throw DomainError("Grid: z_max must exceed z_min");
    if (dt == 0.0 || !std::isfinite(dt)) throw DomainError("Grid: dt must be nonzero and finite");
}

double WavePacketState::norm() const {
    double s = 0.0;
    for (const auto& c : psi) s += std::norm(c);
    return s * grid.dz();
}

WavePacketState init_packet(const NumericSpectrum& ns, const PotentialGrid& pot, double n0,
                            double width, double dt, double mass, double hbar) {
    if (ns.states.empty()) throw DomainError("init_packet: spectrum solved without vectors");
    const int p = ns.n_points;
    const int nlev = static_cast<int>(ns.energies.size());
    if (static_cast<int>(pot.v.size()) != p)
        throw DomainError("init_packet: potential grid does not match the solver grid");

    WavePacketState st;
    st.grid.z_min = pot.z_min;
    st.grid.z_max = pot.z_max;
    st.grid.n_points = p;
    st.grid.dt = dt;
    st.grid.validate();
    st.mass = mass;
    st.hbar = hbar;
    st.v0 = pot.v;
    st.psi.assign(p, {0.0, 0.0});

    // c_n ~ exp(-(n-n0)^2 / (2 width^2)); tiny widths degenerate to the
    // single nearest eigenstate.
    std::vector<double> c(nlev, 0.0);
    if (width < 0.05) {
        const int n = std::clamp(static_cast<int>(std::lround(n0)), 0, nlev - 1);
        c[n] = 1.0;
    } else {
        double s2 = 0.0;
        for (int n = 0; n < nlev; ++n) {
            const double d = (n - n0) / width;
            c[n] = std::exp(-0.5 * d * d);
            s2 += c[n] * c[n];
        }
        const double scale = 1.0 / std::sqrt(s2);
        for (double& x : c) x *= scale;
        // The Gaussian must be fully contained in the solved levels.
        if (c[nlev - 1] > 1e-6 || c[0] > 1e-6)
            throw DomainError("init_packet: packet weight reaches the solved-level boundary; "
                              "increase n_levels or lower n0/width");
    }
    for (int n = 0; n < nlev; ++n) {
        if (c[n] == 0.0) continue;
        auto phi = ns.state(n);
        for (int i = 0; i < p; ++i) st.psi[i] += c[n] * phi[i];
    }
    // Renormalize (grid-level orthonormality is only approximate).
    const double nrm = std::sqrt(st.norm());
    for (auto& x : st.psi) x /= nrm;

    double peak = 0.0;
    for (const auto& x : st.psi) peak = std::max(peak, std::abs(x));
    const int edge = std::max(2, p / 128);
    double worst = 0.0;
    for (int i = 0; i < edge; ++i)
        worst = std::max({worst, std::abs(st.psi[i]), std::abs(st.psi[p - 1 - i])});
    if (worst > 1e-8 * peak) {
        std::ostringstream msg;
        msg << "init_packet: boundary amplitude " << worst / peak
            << " of peak exceeds 1e-8; the box is too small for this packet";
        throw GridError(msg.str());
    }
    return st;
}

namespace {

// <H0> of the current state: kinetic part in momentum space, potential part
// in position space.
double mean_energy(const WavePacketState& st, FftPair& fft) {
    const int p = st.grid.n_points;
    const double dz = st.grid.dz();
    std::complex<double>* buf = fft.data();
    std::copy(st.psi.begin(), st.psi.end(), buf);
    fft.forward();
    const double dk = 2.0 * kPi / (st.grid.z_max - st.grid.z_min);
    double kin = 0.0, nrm = 0.0;
    for (int i = 0; i < p; ++i) {
        const int m = i < p / 2 ? i : i - p;
        const double k = dk * m;
        const double w = std::norm(buf[i]);
        kin += w * (st.hbar * st.hbar * k * k) / (2.0 * st.mass);
        nrm += w;
    }
    double pot = 0.0;
    for (int i = 0; i < p; ++i) pot += std::norm(st.psi[i]) * st.v0[i];
    return kin / nrm + pot * dz / st.norm();
}

} // namespace

double suggested_dt(const WavePacketState& state, bool driven) {
    FftPair fft(state.grid.n_points);
    const double e_mean = mean_energy(state, fft);
    // Spread estimate from the populated potential range: crude but cheap —
    // use 3x the mean as the resolved top of the packet's spectrum.
    const double e_top = 3.0 * std::max(std::abs(e_mean), 1e-12);
    double dt = 2.0 * kPi / (20.0 * e_top / state.hbar);
    if (driven) dt = std::min(dt, 2.0 * kPi / 20.0);
    return dt;
}

AutocorrelationSeries evolve(WavePacketState& state, const CouplingDrive& drive, double t_end,
                             const EvolveOptions& opts, EvolveMonitor* monitor) {
    state.grid.validate();
    const int p = state.grid.n_points;
    if (static_cast<int>(state.psi.size()) != p || static_cast<int>(state.v0.size()) != p)
        throw DomainError("evolve: state arrays do not match the grid");
    const bool driven = drive.lambda != 0.0;
    if (driven && static_cast<int>(drive.coupling.size()) != p)
        throw DomainError("evolve: coupling not sampled on the grid");
    if (opts.sample_every < 1) throw DomainError("evolve: sample_every must be >= 1");

    const double dt = state.grid.dt;
    const double span = t_end - state.t;
    const long n_steps = std::lround(span / dt);
    if (n_steps < 0) throw DomainError("evolve: t_end is behind the current time for this dt");

    const double dz = state.grid.dz();
    const double dk = 2.0 * kPi / (state.grid.z_max - state.grid.z_min);

    // Half-step kinetic phase in momentum space (FFT frequency order).
    std::vector<std::complex<double>> half_kin(p);
    for (int i = 0; i < p; ++i) {
        const int m = i < p / 2 ? i : i - p;
        const double k = dk * m;
        const double ek = state.hbar * k * k / (2.0 * state.mass); // E/hbar
        half_kin[i] = std::polar(1.0, -0.5 * ek * dt);
    }
    // Static potential phase for a full step.
    std::vector<std::complex<double>> v_phase(p);
    for (int i = 0; i < p; ++i) v_phase[i] = std::polar(1.0, -state.v0[i] * dt / state.hbar);

    FftPair fft(p);
    std::complex<double>* buf = fft.data();

    // Reference spectrum (t = 0 state) for k-space autocorrelation and norm:
    // sum conj(Psi0_k) Psi_k dz / p equals the position-space overlap.
    std::copy(state.psi.begin(), state.psi.end(), buf);
    fft.forward();
    std::vector<std::complex<double>> ref(buf, buf + p);
    const double wgt = dz / p;

    AutocorrelationSeries series;
    series.times.reserve(static_cast<std::size_t>(n_steps / opts.sample_every) + 2);
    if (monitor) {
        monitor->norms.clear();
        monitor->energies.clear();
        monitor->max_norm_drift = 0.0;
    }

    const double norm0 = state.norm();
    const int edge = std::max(2, p / 128);
    double peak0 = 0.0;
    for (const auto& x : state.psi) peak0 = std::max(peak0, std::abs(x));

    auto record = [&](double t) {
        std::complex<double> acc = 0.0;
        double nrm = 0.0;
        for (int i = 0; i < p; ++i) {
            acc += std::conj(ref[i]) * buf[i];
            nrm += std::norm(buf[i]);
        }
        series.times.push_back(t);
        series.amplitudes.push_back(acc * wgt);
        const double drift = std::abs(nrm * wgt - norm0);
        if (monitor) {
            monitor->norms.push_back(nrm * wgt);
            monitor->max_norm_drift = std::max(monitor->max_norm_drift, drift);
        }
        if (drift > opts.norm_tol) {
            std::ostringstream msg;
            msg << "evolve: norm drifted by " << drift << " at t = " << t;
            throw InstabilityError(msg.str());
        }
    };

    auto check_edge_and_energy = [&](double t) {
        // Needs position-space amplitudes; buf currently holds k-space, so
        // copy and invert.
        std::vector<std::complex<double>> keep(buf, buf + p);
        fft.backward();
        double worst = 0.0;
        for (int i = 0; i < edge; ++i)
            worst = std::max({worst, std::abs(buf[i]), std::abs(buf[p - 1 - i])});
        worst /= p; // unnormalized inverse transform
        if (worst > opts.edge_tol * peak0) {
            std::ostringstream msg;
            msg << "evolve: edge amplitude " << worst / peak0 << " of initial peak at t = " << t
                << "; wave packet is reaching the box";
            throw InstabilityError(msg.str());
        }
        if (monitor && opts.track_energy) {
            WavePacketState tmp = state;
            for (int i = 0; i < p; ++i) tmp.psi[i] = buf[i] / static_cast<double>(p);
            FftPair efft(p);
            monitor->energies.push_back(mean_energy(tmp, efft));
        }
        std::copy(keep.begin(), keep.end(), buf);
    };

    // t = 0 sample.
    record(state.t);
    if (monitor && opts.track_energy) check_edge_and_energy(state.t);

    double t = state.t;
    for (long step = 0; step < n_steps; ++step) {
        // Half kinetic (buf holds the k-space state).
        for (int i = 0; i < p; ++i) buf[i] *= half_kin[i];
        fft.backward();
        // Full potential at the step midpoint; the inverse transform is
        // unnormalized, fold 1/p into this pass.
        const double inv = 1.0 / p;
        if (driven) {
            const double s = drive.lambda * std::sin(t + 0.5 * dt) * dt / state.hbar;
            for (int i = 0; i < p; ++i)
                buf[i] *= v_phase[i] * std::polar(inv, -s * drive.coupling[i]);
        } else {
            for (int i = 0; i < p; ++i) buf[i] *= v_phase[i] * inv;
        }
        fft.forward();
        for (int i = 0; i < p; ++i) buf[i] *= half_kin[i];
        t += dt;
        if ((step + 1) % opts.sample_every == 0 || step + 1 == n_steps) {
            record(t);
            check_edge_and_energy(t);
        }
    }

    // Write the final state back to position space.
    fft.backward();
    for (int i = 0; i < p; ++i) state.psi[i] = buf[i] / static_cast<double>(p);
    state.t = t;
    return series;
}

AutocorrelationSeries stroboscopic(const AutocorrelationSeries& s, double period) {
    if (!(period > 0.0)) throw DomainError("stroboscopic: period must be positive");
    AutocorrelationSeries out;
    if (s.times.empty()) return out;
    const double t0 = s.times.front();
    long want = 0;
    for (std::size_t i = 0; i < s.times.size(); ++i) {
        const double target = t0 + static_cast<double>(want) * period;
        if (s.times[i] + 1e-9 * period >= target) {
            // Closest sample to the stroboscopic instant.
            std::size_t best = i;
            if (i > 0 && std::abs(s.times[i - 1] - target) < std::abs(s.times[i] - target))
                best = i - 1;
            out.times.push_back(s.times[best]);
            out.amplitudes.push_back(s.amplitudes[best]);
            ++want;
        }
    }
    return out;
}

namespace {

struct Peak {
    double t = 0.0;      // interpolated location
    double height = 0.0; // interpolated |A|^2
    double prominence = 0.0;
    std::size_t idx = 0;
};

// Local maxima with quadratic sub-sample interpolation and standard
// prominence (drop to the higher of the two bounding valleys, where valleys
// are bounded by the nearest higher peak or the series end).
std::vector<Peak> find_peaks(const AutocorrelationSeries& s) {
    const std::size_t n = s.size();
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = s.abs2(i);

    std::vector<Peak> peaks;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(v[i] > v[i - 1] && v[i] >= v[i + 1])) continue;
        Peak p;
        p.idx = i;
        const double denom = v[i - 1] - 2.0 * v[i] + v[i + 1];
        double shift = 0.0;
        if (denom < 0.0) shift = 0.5 * (v[i - 1] - v[i + 1]) / denom;
        shift = std::clamp(shift, -0.5, 0.5);
        p.t = s.times[i] + shift * (s.times[i + 1] - s.times[i]);
        p.height = v[i] - 0.25 * (v[i - 1] - v[i + 1]) * shift;
        // prominence
        double left_min = v[i], right_min = v[i];
        for (std::size_t j = i; j-- > 0;) {
            if (v[j] > v[i]) break;
            left_min = std::min(left_min, v[j]);
        }
        for (std::size_t j = i + 1; j < n; ++j) {
            if (v[j] > v[i]) break;
            right_min = std::min(right_min, v[j]);
        }
        p.prominence = v[i] - std::max(left_min, right_min);
        peaks.push_back(p);
    }
    return peaks;
}

} // namespace

RevivalEstimate detect_times(const AutocorrelationSeries& series, const DetectOptions& opts) {
    RevivalEstimate est;
    if (series.size() < 8) return est;
    const double t0 = series.times.front();
    const double span = series.times.back() - t0;
    std::vector<Peak> peaks = find_peaks(series);
    if (peaks.empty()) return est;

    // --- classical period: early-window peaks, relative prominence gate ---
    const double t_early = t0 + opts.early_window * span;
    double max_prom = 0.0;
    for (const Peak& p : peaks)
        if (p.t <= t_early) max_prom = std::max(max_prom, p.prominence);
    std::vector<const Peak*> early;
    for (const Peak& p : peaks)
        if (p.t <= t_early && p.prominence >= opts.cl_prominence * max_prom && max_prom > 0.0)
            early.push_back(&p);
    if (early.size() >= 2) {
        double mean = (early.back()->t - early.front()->t) / (early.size() - 1);
        if (mean > 0.0) est.T_cl_est = mean;
    }

    // --- revival: late-window envelope maximum above the threshold ---
    double t_late = t0 + opts.late_window * span;
    if (est.T_cl_est) t_late = std::max(t_late, t0 + 3.0 * *est.T_cl_est);
    const Peak* best = nullptr;
    for (const Peak& p : peaks) {
        if (p.t < t_late) continue;
        if (!best || p.height > best->height) best = &p;
    }
    if (best && best->height >= opts.revival_threshold) {
        est.confidence = best->prominence;
        // Refine the envelope maximum with a parabola through the best peak
        // and its highest neighbor peaks on each side (the envelope is
        // sampled by the classical-peak comb).
        const Peak *left = nullptr, *right = nullptr;
        for (const Peak& p : peaks) {
            if (p.t < best->t && (!left || p.t > left->t)) left = &p;
            if (p.t > best->t && (!right || p.t < right->t)) right = &p;
        }
        double t_rev = best->t;
        if (left && right) {
            const double d = left->height - 2.0 * best->height + right->height;
            if (d < 0.0) {
                // Unequal spacings: fit a parabola through the three points.
                const double x1 = left->t - best->t, x2 = right->t - best->t;
                const double y1 = left->height - best->height,
                             y2 = right->height - best->height;
                const double det = x1 * x1 * x2 - x2 * x2 * x1;
                if (det != 0.0) {
                    const double aq = (y1 * x2 - y2 * x1) / det;
                    const double bq = (y2 * x1 * x1 - y1 * x2 * x2) / det;
                    if (aq < 0.0) {
                        const double vtx = -bq / (2.0 * aq);
                        if (vtx > x1 && vtx < x2) t_rev = best->t + vtx;
                    }
                }
            }
        }
        est.T_Q_est = t_rev;
    }
    return est;
}

} // namespace qrev

#ifndef QREV_MATHIEU_HPP
#define QREV_MATHIEU_HPP

#include <complex>
#include <map>
#include <optional>

#include "qrev/spectra.hpp"

namespace qrev {

// Characteristic values a_nu(q) of y'' + (a - 2q cos 2z) y = 0 for solutions
// e^{i nu z} * (pi-periodic), real fractional order nu, real q. The computed
// branch is the one continuous in q from a(nu, 0) = nu^2; for integer nu,
// where that limit is degenerate, the default is the branch whose
// eigenvector is symmetric under the exponent reflection n -> -nu-n
// (cos-type); Branch::antisymmetric requests the sin-type partner.
enum class MathieuBackend { tridiagonal, continued_fraction };
enum class Branch { symmetric, antisymmetric };

struct MathieuOptions {
    MathieuBackend backend = MathieuBackend::tridiagonal;
    Branch branch = Branch::symmetric;
    double nu_max = 50.0;
    double q_max = 1e4;
    int basis_start = 20;  // Fourier cutoff M, doubled until converged
    int basis_cap = 4096;
    double tol = 1e-12;
};

double characteristic_value(double nu, double q, const MathieuOptions& opts = {});

// Characteristic value together with the Fourier coefficients c_n of the
// pi-periodic factor, g~(z) = e^{i nu z} sum_n c_n e^{2 i n z}; tridiagonal
// backend only. Coefficients are real for real q, normalized to unit sum of
// squares, with entries below 1e-14 dropped.
struct MathieuSolution {
    double a_char = 0.0;
    std::map<int, double> coeffs;
};

MathieuSolution characteristic_solution(double nu, double q, const MathieuOptions& opts = {});

struct MathieuParams {
    double nu = 0.0;
    double q = 0.0;
    double a_char = 0.0;
};

// One nonlinear resonance of H0 + lambda V(z) sin t, reduced to Mathieu
// form. V is the resonant coupling matrix element treated as a supplied
// constant (deriving it from V(z) is the caller's job; see
// matrix_element()). Hbar0 is the mean unperturbed energy; it defaults to
// E_r and only shifts every quasi-energy by a constant.
struct ResonanceContext {
    int N = 1;
    double lambda = 0.0;
    double V = 0.0;
    SpectrumModel spectrum;
    double Hbar0 = 0.0;
    double E_r = 0.0;
};

ResonanceContext make_resonance_context(const SpectrumModel& spectrum, int N, double lambda,
                                        double V, std::optional<double> Hbar0 = std::nullopt);

// q = 4 lambda V / (N^2 zeta hbar^2); throws VanishingNonlinearityError when
// the spectrum is linear.
double mathieu_q(const ResonanceContext& ctx);

// Mathieu order of quasi-level k: nu = 2k/N + 2(omega - 1/N)/(N zeta hbar).
// k may be any real here; quasi_energy() enforces the even-integer contract.
double nu_of_k(const ResonanceContext& ctx, double k_index);

struct QuasiEnergyLevel {
    int k_index = 0;
    double nu = 0.0;
    double a_char = 0.0;
    double energy = 0.0;                 // quasi-energy
    std::map<int, double> fourier_coeffs; // c_n of the pi-periodic factor
};

// Quasi-energy of level k (even integer):
//   E_k = (hbar^2 N^2 zeta / 8) a_{nu(k)}(q) - (omega - 1/N)^2/(2 zeta) + Hbar0.
QuasiEnergyLevel quasi_energy(const ResonanceContext& ctx, int k_index,
                              const MathieuOptions& opts = {});

// Same quasi-energy extended smoothly to real k via fractional nu(k); used
// for derivative-based time scales.
std::function<double(double)> quasi_energy_fn(const ResonanceContext& ctx,
                                              const MathieuOptions& opts = {});

// Expansion coefficients C_m of the quasi-energy state over unperturbed
// levels |m>, keyed by the integer offset m - r = k + n N. Carries the
// phases e^{-i (nu + 2n) pi / 4} from the theta = 2z + pi/2 change of
// variable; sum |C|^2 = 1.
std::map<int, std::complex<double>> floquet_coefficients(const QuasiEnergyLevel& level,
                                                         const ResonanceContext& ctx);

} // namespace qrev

#endif

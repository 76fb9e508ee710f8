#include "qrev/mathieu.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace qrev {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kIntegerTol = 1e-9;

bool near_integer(double nu, int* which) {
    const int v = static_cast<int>(std::lround(nu));
    if (std::abs(nu - v) < kIntegerTol) {
        *which = v;
        return true;
    }
    return false;
}

// ---------------------------------------------------------------------
// Tridiagonal backend. Fourier basis e^{i(nu+2n)z}, n = -M..M, turns the
// Mathieu operator into a real symmetric tridiagonal matrix with diagonal
// (nu+2n)^2 and off-diagonal q. For q != 0 the matrix is unreduced, so its
// eigenvalues are simple and eigenvalue curves cannot cross in q: the branch
// continuous from a(nu,0) = nu^2 keeps the sorted rank that nu^2 holds in
// the q = 0 diagonal. Integer nu has a degenerate q = 0 pair; the two
// members are told apart by eigenvector parity under the exponent
// reflection n -> -nu-n.

struct TriSelect {
    int rank = 0;   // 0-based rank of the target eigenvalue
    bool pair = false;
};

TriSelect tri_select(double anu) {
    TriSelect s;
    int v = 0;
    if (near_integer(anu, &v) && v != 0) {
        s.rank = v - 1;
        s.pair = true;
    } else if (near_integer(anu, &v)) {
        s.rank = 0;
    } else {
        // # of basis exponents with (nu+2n)^2 < nu^2 <=> integers in (-nu, 0)
        s.rank = static_cast<int>(std::ceil(anu)) - 1;
        if (s.rank < 0) s.rank = 0;
    }
    return s;
}

struct TriResult {
    double a = 0.0;
    std::vector<double> vec; // size 2M+1, index n+M; empty unless requested
    int M = 0;
};

TriResult tri_solve_at(double anu, double q, int M, const TriSelect& sel, Branch branch,
                       bool want_vec) {
    const int dim = 2 * M + 1;
    std::vector<double> diag(dim), off(dim - 1, q);
    for (int i = 0; i < dim; ++i) {
        const double e = anu + 2.0 * (i - M);
        diag[i] = e * e;
    }
    const int ncols = sel.pair ? 2 : 1;
    std::vector<double> w(ncols);
    std::vector<double> z;
    std::vector<lapack_int> isuppz(2 * ncols);
    lapack_int found = 0;
    lapack_int info;
    const bool vectors = want_vec || sel.pair;
    if (vectors) {
        z.assign(static_cast<std::size_t>(dim) * ncols, 0.0);
        info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', dim, diag.data(), off.data(), 0.0, 0.0,
                              sel.rank + 1, sel.rank + ncols, 0.0, &found, w.data(), z.data(), dim,
                              isuppz.data());
    } else {
        info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'N', 'I', dim, diag.data(), off.data(), 0.0, 0.0,
                              sel.rank + 1, sel.rank + ncols, 0.0, &found, w.data(), nullptr, dim,
                              isuppz.data());
    }
    if (info != 0 || found != ncols)
        throw ConvergenceError("mathieu tridiagonal: dstevr failed");

    TriResult r;
    r.M = M;
    int col = 0;
    if (sel.pair) {
        // Parity score under n -> -V-n (V = round(anu)): +1 symmetric
        // (cos-type), -1 antisymmetric (sin-type).
        const int V = static_cast<int>(std::lround(anu));
        double score[2] = {0.0, 0.0};
        for (int c = 0; c < 2; ++c) {
            const double* vc = z.data() + static_cast<std::size_t>(c) * dim;
            for (int i = 0; i < dim; ++i) {
                const int n = i - M;
                const int nr = -V - n;
                if (nr >= -M && nr <= M) score[c] += vc[i] * vc[nr + M];
            }
        }
        const bool want_sym = branch == Branch::symmetric;
        col = (score[0] >= score[1]) == want_sym ? 0 : 1;
    }
    r.a = w[col];
    if (want_vec) {
        r.vec.assign(z.begin() + static_cast<std::size_t>(col) * dim,
                     z.begin() + static_cast<std::size_t>(col + 1) * dim);
    }
    return r;
}

TriResult tri_characteristic(double nu, double q, const MathieuOptions& opts, bool want_vec) {
    const double anu = std::abs(nu);
    const TriSelect sel = tri_select(anu);
    if (sel.pair && opts.branch == Branch::antisymmetric) {
        // fine: handled via parity selection
    } else if (!sel.pair && opts.branch == Branch::antisymmetric) {
        throw DomainError(
            "characteristic_value: antisymmetric branch exists only for nonzero integer nu");
    }

    // Basis must cover the n = 0 center, the rank window, and the coupling
    // spread (the eigenvector turns over near (nu+2n)^2 ~ 2|q|).
    int M = std::max({opts.basis_start, static_cast<int>(anu / 2) + 4,
                      static_cast<int>(std::sqrt(std::abs(q)) / 1.4) + 4, sel.rank + 2});
    TriResult prev = tri_solve_at(anu, q, M, sel, opts.branch, false);
    while (2 * M <= opts.basis_cap) {
        M *= 2;
        TriResult cur = tri_solve_at(anu, q, M, sel, opts.branch, false);
        if (std::abs(cur.a - prev.a) <= opts.tol * std::max(1.0, std::abs(cur.a))) {
            return want_vec ? tri_solve_at(anu, q, M, sel, opts.branch, true) : cur;
        }
        prev = cur;
    }
    std::ostringstream msg;
    msg << "characteristic_value: no convergence at basis cap M=" << opts.basis_cap
        << " (last iterates " << prev.a << ", M=" << prev.M << ")";
    throw ConvergenceError(msg.str());
}

// ---------------------------------------------------------------------
// Continued-fraction backend. Characteristic equation pivoted on the
// dominant Fourier coefficient; the root is tracked by homotopy in q from
// a(nu,0) = nu^2 (continuity in q is the branch definition, which keeps
// this route independent of the eigensolver).

// Tail ratio R_n = c_n/c_{n-1} (sign=+1) or L_n = c_{-n}/c_{-n+1}
// (sign=-1) from backward recursion, tail length grown until stable.
double cf_tail(int start_n, double nu, double a, double q, int sign) {
    int tail = start_n + 40 + static_cast<int>(std::sqrt(std::abs(q))) +
               static_cast<int>(std::abs(nu) / 2);
    double prev = 0.0;
    bool have_prev = false;
    for (int grow = 0; grow < 60; ++grow) {
        double r = 0.0;
        for (int n = tail; n >= start_n; --n) {
            const double e = nu + sign * 2.0 * n;
            double den = e * e - a + q * r;
            if (den == 0.0) den = 1e-300;
            r = -q / den;
        }
        if (have_prev && std::abs(r - prev) <= 1e-15 * std::max(1.0, std::abs(r))) return r;
        prev = r;
        have_prev = true;
        tail += 20;
    }
    return prev;
}

double cf_f_fractional(double nu, double a, double q) {
    return (nu * nu - a) + q * (cf_tail(1, nu, a, q, +1) + cf_tail(1, nu, a, q, -1));
}

// Upward ratio H_J = A_J / A_{J-1} for the reduced cos-series lattices.
double cf_up_even(int J, double a, double q) {
    int tail = J + 40 + static_cast<int>(std::sqrt(std::abs(q)));
    double prev = 0.0;
    bool have_prev = false;
    for (int grow = 0; grow < 60; ++grow) {
        double r = 0.0;
        for (int j = tail; j >= J; --j) {
            double den = a - 4.0 * j * j - q * r;
            if (den == 0.0) den = 1e-300;
            r = (j == 1 ? 2.0 * q : q) / den;
        }
        if (have_prev && std::abs(r - prev) <= 1e-15 * std::max(1.0, std::abs(r))) return r;
        prev = r;
        have_prev = true;
        tail += 20;
    }
    return prev;
}

double cf_up_odd(int J, double a, double q) {
    int tail = J + 40 + static_cast<int>(std::sqrt(std::abs(q)));
    double prev = 0.0;
    bool have_prev = false;
    for (int grow = 0; grow < 60; ++grow) {
        double r = 0.0;
        for (int j = tail; j >= J; --j) {
            const double e = 2.0 * j + 1.0;
            double den = a - e * e - q * r;
            if (den == 0.0) den = 1e-300;
            r = q / den;
        }
        if (have_prev && std::abs(r - prev) <= 1e-15 * std::max(1.0, std::abs(r))) return r;
        prev = r;
        have_prev = true;
        tail += 20;
    }
    return prev;
}

// cos-type characteristic function for integer order V >= 0, pivoted at the
// dominant coefficient (J = s). Roots continuous from V^2.
double cf_f_integer(int V, double a, double q) {
    if (V % 2 == 0) {
        const int s = V / 2;
        if (s == 0) return a - q * cf_up_even(1, a, q);
        double K = q / a; // A_0/A_1 from the J=0 row
        for (int J = 1; J < s; ++J) K = q / (a - 4.0 * J * J - (J == 1 ? 2.0 * q : q) * K);
        return (a - 4.0 * s * s) - (s == 1 ? 2.0 * q : q) * K - q * cf_up_even(s + 1, a, q);
    }
    const int s = (V - 1) / 2;
    if (s == 0) return a - 1.0 - q - q * cf_up_odd(1, a, q);
    double K = q / (a - 1.0 - q); // A_0/A_1 from the J=0 row
    for (int J = 1; J < s; ++J) {
        const double e = 2.0 * J + 1.0;
        K = q / (a - e * e - q * K);
    }
    const double e = 2.0 * s + 1.0;
    return (a - e * e) - q * K - q * cf_up_odd(s + 1, a, q);
}

struct SecantFail {};

double secant_root(const std::function<double(double)>& f, double x_guess, double tol) {
    double x0 = x_guess;
    double x1 = x_guess + 1e-6 * std::max(1.0, std::abs(x_guess));
    double f0 = f(x0), f1 = f(x1);
    for (int it = 0; it < 60; ++it) {
        if (f1 == f0) throw SecantFail{};
        const double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if (!std::isfinite(x2)) throw SecantFail{};
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f(x1);
        if (std::abs(x1 - x0) <= tol * std::max(1.0, std::abs(x1))) return x1;
    }
    throw SecantFail{};
}

double cf_characteristic(double nu, double q_target, const MathieuOptions& opts) {
    if (opts.branch == Branch::antisymmetric)
        throw DomainError(
            "characteristic_value: the continued-fraction backend computes the default "
            "(symmetric) branch only");
    const double anu = std::abs(nu);
    int V = 0;
    const bool is_int = near_integer(anu, &V);
    auto f_of = [&](double a, double q) {
        return is_int ? cf_f_integer(V, a, q) : cf_f_fractional(anu, a, q);
    };

    double a = anu * anu;
    if (q_target == 0.0) return a;

    int nsteps = std::clamp(static_cast<int>(std::ceil(std::abs(q_target) / 0.25)), 8, 400);
    for (int attempt = 0;; ++attempt) {
        const double dq = q_target / nsteps;
        double a_cur = anu * anu;
        double slope = 0.0;
        bool ok = true;
        for (int i = 1; i <= nsteps; ++i) {
            const double q = dq * i;
            const double pred = a_cur + slope * dq;
            double root;
            try {
                root = secant_root([&](double x) { return f_of(x, q); }, pred, 1e-13);
            } catch (const SecantFail&) {
                ok = false;
                break;
            }
            // |da/dq| <= 2 for Mathieu characteristic curves; a larger jump
            // means the root finder slid onto a neighboring branch.
            if (std::abs(root - a_cur) > 4.0 * std::abs(dq) + 1e-3) {
                ok = false;
                break;
            }
            slope = (root - a_cur) / dq;
            a_cur = root;
        }
        if (ok) return a_cur;
        if (attempt >= 6) {
            std::ostringstream msg;
            msg << "characteristic_value: continued-fraction homotopy failed for nu=" << nu
                << " q=" << q_target << " (last root " << a << ", steps " << nsteps << ")";
            throw ConvergenceError(msg.str());
        }
        a = a_cur;
        nsteps *= 2;
    }
}

void check_domain(double nu, double q, const MathieuOptions& opts) {
    if (std::abs(nu) > opts.nu_max)
        throw DomainError("characteristic_value: |nu| exceeds configured max");
    if (std::abs(q) > opts.q_max)
        throw DomainError("characteristic_value: |q| exceeds configured max");
}

} // namespace

double characteristic_value(double nu, double q, const MathieuOptions& opts) {
    check_domain(nu, q, opts);
    if (q == 0.0) {
        if (opts.branch == Branch::antisymmetric) {
            int V = 0;
            if (!near_integer(std::abs(nu), &V) || V == 0)
                throw DomainError(
                    "characteristic_value: antisymmetric branch exists only for nonzero "
                    "integer nu");
        }
        return nu * nu;
    }
    if (opts.backend == MathieuBackend::continued_fraction) return cf_characteristic(nu, q, opts);
    return tri_characteristic(nu, q, opts, false).a;
}

MathieuSolution characteristic_solution(double nu, double q, const MathieuOptions& opts) {
    check_domain(nu, q, opts);
    MathieuSolution sol;
    if (q == 0.0) {
        sol.a_char = nu * nu;
        sol.coeffs[0] = 1.0;
        return sol;
    }
    TriResult r = tri_characteristic(nu, q, opts, true);
    sol.a_char = r.a;
    double s2 = 0.0;
    for (double c : r.vec) s2 += c * c;
    const double scale = 1.0 / std::sqrt(s2);
    for (int i = 0; i < static_cast<int>(r.vec.size()); ++i) {
        const double c = r.vec[i] * scale;
        if (std::abs(c) > 1e-14) sol.coeffs[i - r.M] = c;
    }
    // Phase convention: dominant coefficient positive.
    double cmax = 0.0;
    for (auto& [n, c] : sol.coeffs)
        if (std::abs(c) > std::abs(cmax)) cmax = c;
    if (cmax < 0.0)
        for (auto& [n, c] : sol.coeffs) c = -c;
    return sol;
}

ResonanceContext make_resonance_context(const SpectrumModel& spectrum, int N, double lambda,
                                        double V, std::optional<double> Hbar0) {
    if (N < 1) throw DomainError("ResonanceContext: N must be >= 1");
    if (lambda < 0.0) throw DomainError("ResonanceContext: lambda must be >= 0");
    ResonanceContext ctx;
    ctx.N = N;
    ctx.lambda = lambda;
    ctx.V = V;
    ctx.spectrum = spectrum;
    ctx.E_r = spectrum.energy ? spectrum.energy(spectrum.r) : 0.0;
    ctx.Hbar0 = Hbar0.value_or(ctx.E_r);
    return ctx;
}

double mathieu_q(const ResonanceContext& ctx) {
    const double zeta = ctx.spectrum.zeta;
    if (zeta == 0.0)
        throw VanishingNonlinearityError(
            "mathieu_q: zeta = 0, the Mathieu reduction degenerates for a linear spectrum");
    const double h = ctx.spectrum.hbar;
    return 4.0 * ctx.lambda * ctx.V / (static_cast<double>(ctx.N) * ctx.N * zeta * h * h);
}

double nu_of_k(const ResonanceContext& ctx, double k_index) {
    const double zeta = ctx.spectrum.zeta;
    if (zeta == 0.0) throw VanishingNonlinearityError("nu_of_k: zeta = 0");
    const double N = ctx.N;
    return 2.0 * k_index / N +
           2.0 * (ctx.spectrum.omega - 1.0 / N) / (N * zeta * ctx.spectrum.hbar);
}

namespace {

double quasi_energy_value(const ResonanceContext& ctx, double a_char) {
    const double h = ctx.spectrum.hbar;
    const double zeta = ctx.spectrum.zeta;
    const double N = ctx.N;
    const double det = ctx.spectrum.omega - 1.0 / N;
    return h * h * N * N * zeta / 8.0 * a_char - det * det / (2.0 * zeta) + ctx.Hbar0;
}

} // namespace

QuasiEnergyLevel quasi_energy(const ResonanceContext& ctx, int k_index,
                              const MathieuOptions& opts) {
    if (k_index % 2 != 0)
        throw DomainError("quasi_energy: k must be an even integer (pi-periodic solutions)");
    QuasiEnergyLevel lvl;
    lvl.k_index = k_index;
    lvl.nu = nu_of_k(ctx, k_index);
    const double q = mathieu_q(ctx);
    MathieuSolution sol = characteristic_solution(lvl.nu, q, opts);
    lvl.a_char = sol.a_char;
    lvl.fourier_coeffs = std::move(sol.coeffs);
    lvl.energy = quasi_energy_value(ctx, lvl.a_char);
    return lvl;
}

std::function<double(double)> quasi_energy_fn(const ResonanceContext& ctx,
                                              const MathieuOptions& opts) {
    const double q = mathieu_q(ctx); // also validates zeta != 0
    return [ctx, opts, q](double k) {
        const double nu = nu_of_k(ctx, k);
        return quasi_energy_value(ctx, characteristic_value(nu, q, opts));
    };
}

std::map<int, std::complex<double>> floquet_coefficients(const QuasiEnergyLevel& level,
                                                         const ResonanceContext& ctx) {
    if (level.fourier_coeffs.empty())
        throw DomainError("floquet_coefficients: level has no Fourier coefficients");
    std::map<int, std::complex<double>> out;
    for (const auto& [n, c] : level.fourier_coeffs) {
        // Frequency matching of e^{i(nu+2n)z} against e^{-i(m-r)theta/N}
        // with theta = 2z + pi/2 puts coefficient n at offset k + nN with a
        // unit phase from the theta origin shift.
        const int offset = level.k_index + n * ctx.N;
        const double phase = -(level.nu + 2.0 * n) * kPi / 4.0;
        out[offset] = std::polar(c, phase);
    }
    return out;
}

} // namespace qrev

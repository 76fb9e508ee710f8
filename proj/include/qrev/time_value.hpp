#ifndef QREV_TIME_VALUE_HPP
#define QREV_TIME_VALUE_HPP

#include <cmath>
#include <string>

#include "qrev/errors.hpp"

namespace qrev {

// A recurrence time scale that may be physically unbounded (harmonic spectra
// revive only after infinite time). Unbounded is a distinguished state, not
// an IEEE infinity: arithmetic that needs a number must either branch on
// is_unbounded() or work in the reciprocal (rate) domain where unbounded
// maps to 0. Finite values are signed; the sign tracks the spectral
// curvature direction (k < 2 power laws have zeta < 0).
class TimeValue {
  public:
    TimeValue() = default;

    static TimeValue finite(double t) {
        if (!std::isfinite(t)) throw DomainError("TimeValue::finite: non-finite input");
        TimeValue v;
        v.t_ = t;
        return v;
    }
    static TimeValue unbounded() {
        TimeValue v;
        v.unbounded_ = true;
        return v;
    }
    // Rate -> time; rate 0 means unbounded.
    static TimeValue from_rate(double rate) {
        return rate == 0.0 ? unbounded() : finite(1.0 / rate);
    }

    bool is_unbounded() const { return unbounded_; }

    double value() const {
        if (unbounded_) throw DomainError("TimeValue::value: unbounded time has no finite value");
        return t_;
    }

    // 1/t with unbounded -> 0 (exact in the reciprocal domain).
    double rate() const { return unbounded_ ? 0.0 : 1.0 / t_; }

    // Multiplicative modification, e.g. by (1 - M) factors; preserves the
    // unbounded state.
    TimeValue scaled(double factor) const {
        return unbounded_ ? unbounded() : finite(t_ * factor);
    }

    double magnitude_or(double fallback) const { return unbounded_ ? fallback : std::abs(t_); }

  private:
    double t_ = 0.0;
    bool unbounded_ = false;
};

inline std::string to_string(const TimeValue& t) {
    if (t.is_unbounded()) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", t.value());
    return buf;
}

} // namespace qrev

#endif

#pragma once

#include <complex>
#include <cstdint>
#include <numbers>

#include "oam/errors.hpp"

namespace oam {

// A rotation angle. Rational multiples of pi keep their (num/den) form so
// that phases like e^{i m pi} evaluate to exactly +-1 and the even/odd
// routing logic of the interferometers stays free of rounding residue.
// Arbitrary angles fall back to floating-point radians.
class Angle {
public:
    // pi / k (k may be negative; k == 0 is rejected).
    static Angle pi_over(std::int64_t k) {
        if (k == 0) throw Error("Angle::pi_over: zero divisor");
        Angle a;
        a.exact_ = true;
        a.num_ = k < 0 ? -1 : 1;
        a.den_ = k < 0 ? -k : k;
        return a;
    }

    static Angle radians(double value) {
        Angle a;
        a.exact_ = false;
        a.radians_ = value;
        return a;
    }

    // e^{i * m * angle} for an integer multiplier m (an ell value, or
    // ell * occupation for stacked photons).
    std::complex<double> phase(std::int64_t m) const {
        if (!exact_) return std::polar(1.0, static_cast<double>(m) * radians_);
        const std::int64_t p = m * num_;
        if (p % den_ == 0) {
            const std::int64_t half_turns = p / den_;
            return (half_turns % 2 == 0) ? std::complex<double>(1.0, 0.0)
                                         : std::complex<double>(-1.0, 0.0);
        }
        if ((2 * p) % den_ == 0) {
            const std::int64_t quarter_turns = (((2 * p / den_) % 4) + 4) % 4;
            return (quarter_turns == 1) ? std::complex<double>(0.0, 1.0)
                                        : std::complex<double>(0.0, -1.0);
        }
        const std::int64_t two_den = 2 * den_;
        const std::int64_t reduced = ((p % two_den) + two_den) % two_den;
        return std::polar(1.0, std::numbers::pi * static_cast<double>(reduced) /
                                   static_cast<double>(den_));
    }

    double value() const {
        if (!exact_) return radians_;
        return std::numbers::pi * static_cast<double>(num_) / static_cast<double>(den_);
    }

    bool exact() const { return exact_; }
    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

private:
    Angle() = default;
    bool exact_ = true;
    std::int64_t num_ = 0;  // angle = pi * num_ / den_ when exact_
    std::int64_t den_ = 1;
    double radians_ = 0.0;  // when !exact_
};

}  // namespace oam

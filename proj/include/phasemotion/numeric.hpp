#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>

namespace phasemotion {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kHalfPi = std::numbers::pi / 2.0;

// Compensated summation. Means computed through this are independent of
// how callers chunk their loops, which keeps results deterministic.
class KahanSum {
public:
    void add(double x) {
        const double y = x - comp_;
        const double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Maps an angle to the representative in (-pi, pi]. std::remainder is exact,
// so for |x| < 2*pi this returns the same double as the direct k*2*pi search.
inline double wrap_to_pi(double x) {
    double r = std::remainder(x, kTwoPi);
    if (r <= -kPi) r += kTwoPi;
    return r;
}

}  // namespace phasemotion

#pragma once

#include <cmath>
#include <vector>

#include "phasemotion/errors.hpp"
#include "phasemotion/numeric.hpp"

namespace phasemotion {

struct SeriesPair {
    std::vector<double> x;  // predictions
    std::vector<double> y;  // ground truth

    void validate() const {
        if (x.size() != y.size()) throw validation_error("SeriesPair: lengths differ");
        if (x.size() < 2) throw validation_error("SeriesPair: need at least 2 samples");
        for (size_t i = 0; i < x.size(); ++i)
            if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
                throw validation_error("SeriesPair: non-finite value");
    }
};

namespace detail {

struct Moments {
    double mean_x, mean_y, var_x, var_y, cov;  // population (1/N)
};

inline Moments moments(const SeriesPair& pair) {
    pair.validate();
    const double n = static_cast<double>(pair.x.size());
    KahanSum sx, sy;
    for (size_t i = 0; i < pair.x.size(); ++i) {
        sx.add(pair.x[i]);
        sy.add(pair.y[i]);
    }
    Moments m{};
    m.mean_x = sx.value() / n;
    m.mean_y = sy.value() / n;
    KahanSum vx, vy, cv;
    for (size_t i = 0; i < pair.x.size(); ++i) {
        const double dx = pair.x[i] - m.mean_x;
        const double dy = pair.y[i] - m.mean_y;
        vx.add(dx * dx);
        vy.add(dy * dy);
        cv.add(dx * dy);
    }
    m.var_x = vx.value() / n;
    m.var_y = vy.value() / n;
    m.cov = cv.value() / n;
    return m;
}

}  // namespace detail

// Pearson correlation with population variances. If either series is
// constant, rho is defined as 0.
inline double pearson(const SeriesPair& pair) {
    const auto m = detail::moments(pair);
    if (m.var_x == 0.0 || m.var_y == 0.0) return 0.0;
    return m.cov / (std::sqrt(m.var_x) * std::sqrt(m.var_y));
}

// Concordance correlation coefficient:
//   CCC = 2*rho*sx*sy / (sx^2 + sy^2 + (mx - my)^2)
// with population (1/N) variances. Both series constant and equal makes the
// expression 0/0 and raises undefined_metric_error.
inline double ccc(const SeriesPair& pair) {
    const auto m = detail::moments(pair);
    const double mean_gap = m.mean_x - m.mean_y;
    const double denom = m.var_x + m.var_y + mean_gap * mean_gap;
    if (denom == 0.0) throw undefined_metric_error("ccc: both series constant and equal");
    if (m.var_x == 0.0 || m.var_y == 0.0) return 0.0;  // rho convention
    // grouped so the expression is exactly symmetric in x and y
    const double sxy = std::sqrt(m.var_x) * std::sqrt(m.var_y);
    const double rho = m.cov / sxy;
    return 2.0 * rho * sxy / denom;
}

}  // namespace phasemotion

#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "phasemotion/errors.hpp"
#include "phasemotion/image.hpp"
#include "phasemotion/numeric.hpp"

namespace phasemotion {

// Dense per-pixel displacement in pixels.
struct FlowField {
    int width = 0;
    int height = 0;
    std::vector<double> u;  // horizontal
    std::vector<double> v;  // vertical

    FlowField() = default;
    FlowField(int w, int h)
        : width(w), height(h), u(static_cast<size_t>(w) * h, 0.0), v(static_cast<size_t>(w) * h, 0.0) {}
};

namespace detail {

inline double pix(const GrayImage& f, int x, int y) {
    x = std::clamp(x, 0, f.width - 1);
    y = std::clamp(y, 0, f.height - 1);
    return f.at(x, y);
}

inline double pix(const std::vector<double>& a, int w, int h, int x, int y) {
    x = std::clamp(x, 0, w - 1);
    y = std::clamp(y, 0, h - 1);
    return a[static_cast<size_t>(y) * w + x];
}

// Weighted neighborhood average used by the classical scheme:
// 1/6 on the 4-neighbors, 1/12 on the diagonals.
inline void local_average(const std::vector<double>& src, std::vector<double>& dst, int w, int h) {
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double cross = pix(src, w, h, x - 1, y) + pix(src, w, h, x + 1, y) +
                                 pix(src, w, h, x, y - 1) + pix(src, w, h, x, y + 1);
            const double diag = pix(src, w, h, x - 1, y - 1) + pix(src, w, h, x + 1, y - 1) +
                                pix(src, w, h, x - 1, y + 1) + pix(src, w, h, x + 1, y + 1);
            dst[static_cast<size_t>(y) * w + x] = cross / 6.0 + diag / 12.0;
        }
}

}  // namespace detail

// Classical Horn-Schunck flow: synchronous Jacobi iterations of
//   u <- ubar - Ix*(Ix*ubar + Iy*vbar + It) / (alpha^2 + Ix^2 + Iy^2)
// and symmetrically for v. Central-difference spatial gradients averaged over
// the two frames, replicated borders, zero initialization. Deterministic for
// fixed inputs.
inline FlowField horn_schunck(const GrayImage& f0, const GrayImage& f1, double alpha = 15.0,
                              int iters = 100) {
    if (!f0.same_shape(f1)) throw dimension_error("horn_schunck: frame dimensions differ");
    if (!(alpha > 0.0)) throw validation_error("horn_schunck: alpha must be positive");
    if (iters < 1) throw validation_error("horn_schunck: iters must be >= 1");

    const int w = f0.width;
    const int h = f0.height;
    const size_t n = f0.size();
    std::vector<double> ix(n), iy(n), it(n);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const size_t i = static_cast<size_t>(y) * w + x;
            ix[i] = 0.25 * (detail::pix(f0, x + 1, y) - detail::pix(f0, x - 1, y) +
                            detail::pix(f1, x + 1, y) - detail::pix(f1, x - 1, y));
            iy[i] = 0.25 * (detail::pix(f0, x, y + 1) - detail::pix(f0, x, y - 1) +
                            detail::pix(f1, x, y + 1) - detail::pix(f1, x, y - 1));
            it[i] = f1.data[i] - f0.data[i];
        }

    FlowField flow(w, h);
    std::vector<double> ubar(n), vbar(n);
    const double a2 = alpha * alpha;
    for (int iter = 0; iter < iters; ++iter) {
        detail::local_average(flow.u, ubar, w, h);
        detail::local_average(flow.v, vbar, w, h);
        for (size_t i = 0; i < n; ++i) {
            const double t = (ix[i] * ubar[i] + iy[i] * vbar[i] + it[i]) /
                             (a2 + ix[i] * ix[i] + iy[i] * iy[i]);
            flow.u[i] = ubar[i] - ix[i] * t;
            flow.v[i] = vbar[i] - iy[i] * t;
        }
    }
    return flow;
}

struct FlowStats {
    double mean = 0.0;
    double median = 0.0;
    double max = 0.0;
};

inline FlowStats flow_magnitude_stats(const FlowField& flow) {
    FlowStats stats;
    if (flow.u.empty()) return stats;
    std::vector<double> mag(flow.u.size());
    KahanSum sum;
    for (size_t i = 0; i < flow.u.size(); ++i) {
        mag[i] = std::hypot(flow.u[i], flow.v[i]);
        sum.add(mag[i]);
        stats.max = std::max(stats.max, mag[i]);
    }
    stats.mean = sum.value() / static_cast<double>(mag.size());
    std::nth_element(mag.begin(), mag.begin() + mag.size() / 2, mag.end());
    stats.median = mag[mag.size() / 2];
    return stats;
}

}  // namespace phasemotion

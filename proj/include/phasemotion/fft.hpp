#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

#include "phasemotion/errors.hpp"
#include "phasemotion/image.hpp"
#include "phasemotion/numeric.hpp"

namespace phasemotion {

using cdouble = std::complex<double>;

namespace detail {

inline bool is_pow2(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline size_t next_pow2(size_t n) {
    size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Smallest-prime factorization; empty when a factor above `limit` remains.
inline std::vector<int> smooth_factors(size_t n, int limit = 13) {
    std::vector<int> factors;
    size_t rest = n;
    for (int p = 2; p <= limit && rest > 1; ++p)
        while (rest % p == 0) {
            factors.push_back(p);
            rest /= p;
        }
    if (rest != 1) factors.clear();
    return factors;
}

}  // namespace detail

// Precomputed 1-D DFT of a fixed length, kernel exp(-2*pi*i*jk/n).
// Lengths whose prime factors are <= 13 run through a mixed-radix
// Cooley-Tukey kernel; anything else falls back to Bluestein's chirp-z on a
// power-of-two grid. Plans are immutable after construction and safe to share
// across threads; scratch space is provided per call.
class FftPlan {
public:
    explicit FftPlan(size_t n) : n_(n) {
        if (n == 0) throw dimension_error("FftPlan: zero length");
        factors_ = detail::smooth_factors(n);
        if (!factors_.empty() || n == 1) {
            twiddles_.resize(n);
            for (size_t k = 0; k < n; ++k)
                twiddles_[k] = std::polar(1.0, -kTwoPi * static_cast<double>(k) / static_cast<double>(n));
        } else {
            m_ = detail::next_pow2(2 * n - 1);
            sub_.reset(new FftPlan(m_));
            chirp_.resize(n);
            for (size_t k = 0; k < n; ++k) {
                // angle = -pi*k^2/n, with k^2 reduced mod 2n to keep it exact
                const size_t k2 = (k * k) % (2 * n);
                chirp_[k] = std::polar(1.0, -kPi * static_cast<double>(k2) / static_cast<double>(n));
            }
            chirp_spectrum_.assign(m_, cdouble{0.0, 0.0});
            chirp_spectrum_[0] = std::conj(chirp_[0]);
            for (size_t k = 1; k < n; ++k) {
                chirp_spectrum_[k] = std::conj(chirp_[k]);
                chirp_spectrum_[m_ - k] = std::conj(chirp_[k]);
            }
            std::vector<cdouble> scratch(m_);
            sub_->forward(chirp_spectrum_.data(), scratch);
        }
    }

    size_t length() const { return n_; }
    size_t scratch_size() const { return m_ == 0 ? n_ : m_; }

    // Unnormalized forward DFT, in place. `scratch` must hold scratch_size().
    void forward(cdouble* x, std::vector<cdouble>& scratch) const {
        if (scratch.size() < scratch_size()) scratch.resize(scratch_size());
        if (n_ == 1) return;
        if (m_ == 0) {
            std::copy(x, x + n_, scratch.begin());
            work(x, scratch.data(), n_, 1, factors_.data());
            return;
        }
        // Bluestein: convolve the chirped signal with the precomputed chirp
        cdouble* a = scratch.data();
        std::vector<cdouble> sub_scratch(sub_->scratch_size());
        for (size_t k = 0; k < n_; ++k) a[k] = x[k] * chirp_[k];
        std::fill(a + n_, a + m_, cdouble{0.0, 0.0});
        sub_->forward(a, sub_scratch);
        for (size_t k = 0; k < m_; ++k) a[k] = std::conj(a[k] * chirp_spectrum_[k]);
        sub_->forward(a, sub_scratch);
        const double inv_m = 1.0 / static_cast<double>(m_);
        for (size_t k = 0; k < n_; ++k) x[k] = std::conj(a[k]) * inv_m * chirp_[k];
    }

    void forward(cdouble* x) const {
        std::vector<cdouble> scratch(scratch_size());
        forward(x, scratch);
    }

    // Inverse DFT with 1/n normalization, in place.
    void inverse(cdouble* x, std::vector<cdouble>& scratch) const {
        for (size_t k = 0; k < n_; ++k) x[k] = std::conj(x[k]);
        forward(x, scratch);
        const double inv_n = 1.0 / static_cast<double>(n_);
        for (size_t k = 0; k < n_; ++k) x[k] = std::conj(x[k]) * inv_n;
    }

    void inverse(cdouble* x) const {
        std::vector<cdouble> scratch(scratch_size());
        inverse(x, scratch);
    }

private:
    // Recursive decimation-in-time over the factor list. `in` holds the data
    // with the given stride; results land contiguously in `out`. out and in
    // never alias (top-level out = caller's buffer, in = scratch copy).
    void work(cdouble* out, const cdouble* in, size_t n, size_t stride, const int* factors) const {
        const size_t p = static_cast<size_t>(*factors);
        const size_t m = n / p;
        if (m == 1) {
            for (size_t q = 0; q < p; ++q) out[q] = in[q * stride];
        } else {
            for (size_t q = 0; q < p; ++q)
                work(out + q * m, in + q * stride, m, stride * p, factors + 1);
        }
        // combine: X[u + j*m] = sum_q W_n^{qu} W_p^{qj} S_q[u]
        const size_t tw_step = n_ / n;
        if (p == 2) {
            for (size_t u = 0; u < m; ++u) {
                const cdouble t1 = out[m + u] * twiddles_[u * tw_step];
                const cdouble t0 = out[u];
                out[u] = t0 + t1;
                out[m + u] = t0 - t1;
            }
            return;
        }
        const size_t root_p = n_ / p;
        cdouble t[13];
        for (size_t u = 0; u < m; ++u) {
            // q*u < p*m = n, so the index stays below n_
            for (size_t q = 0; q < p; ++q) t[q] = out[q * m + u] * twiddles_[q * u * tw_step];
            for (size_t j = 0; j < p; ++j) {
                cdouble acc = t[0];
                for (size_t q = 1; q < p; ++q) acc += t[q] * twiddles_[((q * j) % p) * root_p];
                out[u + j * m] = acc;
            }
        }
    }

    size_t n_ = 0;
    size_t m_ = 0;  // Bluestein grid; 0 for the mixed-radix path
    std::vector<int> factors_;
    std::vector<cdouble> twiddles_;
    std::vector<cdouble> chirp_;
    std::vector<cdouble> chirp_spectrum_;
    std::unique_ptr<FftPlan> sub_;
};

// Row-major W x H complex grid.
struct ComplexPlane {
    int width = 0;
    int height = 0;
    std::vector<cdouble> v;

    ComplexPlane() = default;
    ComplexPlane(int w, int h) : width(w), height(h), v(static_cast<size_t>(w) * h) {}
    cdouble& at(int x, int y) { return v[static_cast<size_t>(y) * width + x]; }
    cdouble at(int x, int y) const { return v[static_cast<size_t>(y) * width + x]; }
};

// Pair of 1-D plans reused across the rows and columns of one grid size.
class Fft2Plan {
public:
    Fft2Plan(int width, int height) : w_(width), h_(height), row_(width), col_(height) {}

    void forward(ComplexPlane& p) const { transform(p, /*inverse=*/false); }
    void inverse(ComplexPlane& p) const { transform(p, /*inverse=*/true); }

private:
    void transform(ComplexPlane& p, bool inverse) const {
        if (p.width != w_ || p.height != h_)
            throw dimension_error("Fft2Plan: plane does not match plan dimensions");
        std::vector<cdouble> scratch(std::max(row_.scratch_size(), col_.scratch_size()));
        for (int y = 0; y < h_; ++y) {
            cdouble* row = p.v.data() + static_cast<size_t>(y) * w_;
            inverse ? row_.inverse(row, scratch) : row_.forward(row, scratch);
        }
        std::vector<cdouble> col(static_cast<size_t>(h_));
        for (int x = 0; x < w_; ++x) {
            for (int y = 0; y < h_; ++y) col[y] = p.at(x, y);
            inverse ? col_.inverse(col.data(), scratch) : col_.forward(col.data(), scratch);
            for (int y = 0; y < h_; ++y) p.at(x, y) = col[y];
        }
    }

    int w_;
    int h_;
    FftPlan row_;
    FftPlan col_;
};

inline ComplexPlane fft2_of_real(const GrayImage& img) {
    ComplexPlane p(img.width, img.height);
    for (size_t i = 0; i < img.data.size(); ++i) p.v[i] = cdouble{img.data[i], 0.0};
    Fft2Plan plan(img.width, img.height);
    plan.forward(p);
    return p;
}

}  // namespace phasemotion

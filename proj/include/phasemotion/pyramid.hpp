#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "phasemotion/errors.hpp"
#include "phasemotion/fft.hpp"
#include "phasemotion/image.hpp"
#include "phasemotion/numeric.hpp"

namespace phasemotion {

struct PyramidSpec {
    int n_scales = 2;
    int n_orientations = 2;
    std::vector<double> orientation_angles = {0.0, kHalfPi};  // X then Y

    void validate() const {
        if (n_scales < 1) throw validation_error("PyramidSpec: n_scales must be >= 1");
        if (n_orientations < 1) throw validation_error("PyramidSpec: n_orientations must be >= 1");
        if (orientation_angles.size() != static_cast<size_t>(n_orientations))
            throw validation_error("PyramidSpec: need one angle per orientation");
        for (size_t i = 0; i < orientation_angles.size(); ++i)
            for (size_t j = i + 1; j < orientation_angles.size(); ++j) {
                const double d = std::remainder(orientation_angles[i] - orientation_angles[j], kPi);
                if (std::abs(d) < 1e-9)
                    throw validation_error("PyramidSpec: orientation angles must be distinct modulo pi");
            }
    }
};

// Frequency-domain masks for every scale and orientation. Scale s lives on a
// grid downsampled by 2^s in each dimension; all masks are real in [0,1] and
// every band-pass mask is exactly zero at DC. omega[s] is the radial center
// of the band-pass annulus in radians per input pixel, halving per scale.
struct FilterBank {
    int width = 0;
    int height = 0;
    PyramidSpec spec;
    std::vector<double> omega;
    std::vector<GrayImage> lowpass;                 // [scale]
    std::vector<std::vector<GrayImage>> bandpass;   // [scale][orientation]

    int grid_width(int scale) const { return width >> scale; }
    int grid_height(int scale) const { return height >> scale; }
};

namespace detail {

// Signed DFT bin index for position k on an axis of length n.
inline int signed_bin(int k, int n) { return k < (n + 1) / 2 ? k : k - n; }

// Raised-cosine low-pass in log frequency: 1 below pi/4, 0 above pi/2.
inline double lowpass_radial(double r) {
    if (r <= kPi / 4.0) return 1.0;
    if (r >= kPi / 2.0) return 0.0;
    return std::cos(kHalfPi * std::log2(4.0 * r / kPi));
}

// Quadrature complement of the low-pass. Multiplied by the low-pass in the
// decomposition it forms a one-octave annulus on (pi/4, pi/2), whose
// arithmetic center is 3*pi/8: the nominal band frequency.
inline double bandpass_radial(double r) {
    if (r <= 0.0) return 0.0;
    const double lp = lowpass_radial(r);
    return std::sqrt(std::max(0.0, 1.0 - lp * lp));
}

// cos^(K-1) wedge centered on theta, restricted to a half plane so the
// sub-band keeps only one of each conjugate frequency pair.
inline double angular_gain(double phi, double theta, int n_orientations) {
    const double d = wrap_to_pi(phi - theta);
    if (std::abs(d) >= kHalfPi) return 0.0;
    double g = 1.0;
    const double c = std::cos(d);
    for (int k = 1; k < n_orientations; ++k) g *= c;
    return g;
}

}  // namespace detail

inline FilterBank build_filter_bank(int width, int height, const PyramidSpec& spec = {}) {
    spec.validate();
    const int factor = 1 << (spec.n_scales - 1);
    if (width < 8 * factor || height < 8 * factor)
        throw dimension_error("build_filter_bank: image too small for requested scales");
    if (width % factor != 0 || height % factor != 0)
        throw dimension_error("build_filter_bank: dimensions must be divisible by 2^(n_scales-1)");

    FilterBank bank;
    bank.width = width;
    bank.height = height;
    bank.spec = spec;
    bank.omega.resize(spec.n_scales);
    bank.lowpass.reserve(spec.n_scales);
    bank.bandpass.resize(spec.n_scales);

    double omega = 3.0 * kPi / 8.0;
    for (int s = 0; s < spec.n_scales; ++s, omega *= 0.5) {
        bank.omega[s] = omega;
        const int gw = bank.grid_width(s);
        const int gh = bank.grid_height(s);
        GrayImage low(gw, gh);
        std::vector<GrayImage> bands(spec.n_orientations, GrayImage(gw, gh));
        for (int y = 0; y < gh; ++y) {
            const double wy = kTwoPi * detail::signed_bin(y, gh) / gh;
            for (int x = 0; x < gw; ++x) {
                const double wx = kTwoPi * detail::signed_bin(x, gw) / gw;
                const double r = std::hypot(wx, wy);
                low.at(x, y) = detail::lowpass_radial(r);
                const double radial = detail::bandpass_radial(r);
                if (radial == 0.0) continue;  // bands stay exactly 0, including DC
                const double phi = std::atan2(wy, wx);
                for (int o = 0; o < spec.n_orientations; ++o)
                    bands[o].at(x, y) =
                        radial * detail::angular_gain(phi, spec.orientation_angles[o], spec.n_orientations);
            }
        }
        bank.lowpass.push_back(std::move(low));
        bank.bandpass[s] = std::move(bands);
    }
    return bank;
}

// Complex sub-band responses for each scale and orientation.
struct PyramidCoefficients {
    PyramidSpec spec;
    std::vector<double> omega;
    std::vector<std::vector<ComplexPlane>> bands;  // [scale][orientation]
};

// Phase plane with its validity mask. Invalid pixels hold exactly 0.
struct PhaseMap {
    GrayImage value;
    std::vector<uint8_t> valid;
};

// Frequency-domain pyramid decomposition. Per scale the running spectrum is
// multiplied by that scale's low-pass, each oriented band is inverse
// transformed, and the low-passed spectrum is cropped to the central half in
// each dimension (with the 1/4 amplitude correction of 2x2 decimation) to
// form the next, coarser scale. FFT boundaries are periodic; edge effects
// within one filter width of the border are expected.
inline PyramidCoefficients decompose(const GrayImage& img, const FilterBank& bank) {
    if (img.width != bank.width || img.height != bank.height)
        throw dimension_error("decompose: image does not match filter bank grid");

    PyramidCoefficients out;
    out.spec = bank.spec;
    out.omega = bank.omega;
    out.bands.resize(bank.spec.n_scales);

    ComplexPlane spectrum = fft2_of_real(img);
    for (int s = 0; s < bank.spec.n_scales; ++s) {
        const int gw = bank.grid_width(s);
        const int gh = bank.grid_height(s);
        const GrayImage& low = bank.lowpass[s];
        for (size_t i = 0; i < spectrum.v.size(); ++i) spectrum.v[i] *= low.data[i];

        const FftPlan row_plan(gw);
        const FftPlan col_plan(gh);
        std::vector<cdouble> scratch(std::max(row_plan.scratch_size(), col_plan.scratch_size()));
        std::vector<cdouble> col(static_cast<size_t>(gh));
        out.bands[s].reserve(bank.spec.n_orientations);
        for (int o = 0; o < bank.spec.n_orientations; ++o) {
            const GrayImage& mask = bank.bandpass[s][o];
            ComplexPlane band(gw, gh);
            // inverse row pass; rows where the mask vanishes stay zero
            for (int y = 0; y < gh; ++y) {
                const double* mrow = mask.data.data() + static_cast<size_t>(y) * gw;
                bool any = false;
                for (int x = 0; x < gw; ++x)
                    if (mrow[x] != 0.0) {
                        any = true;
                        break;
                    }
                if (!any) continue;
                cdouble* brow = band.v.data() + static_cast<size_t>(y) * gw;
                const cdouble* srow = spectrum.v.data() + static_cast<size_t>(y) * gw;
                for (int x = 0; x < gw; ++x) brow[x] = srow[x] * mrow[x];
                row_plan.inverse(brow, scratch);
            }
            // inverse column pass
            for (int x = 0; x < gw; ++x) {
                for (int y = 0; y < gh; ++y) col[y] = band.at(x, y);
                col_plan.inverse(col.data(), scratch);
                for (int y = 0; y < gh; ++y) band.at(x, y) = col[y];
            }
            out.bands[s].push_back(std::move(band));
        }

        if (s + 1 < bank.spec.n_scales) {
            const int nw = gw / 2;
            const int nh = gh / 2;
            ComplexPlane next(nw, nh);
            for (int y = 0; y < nh; ++y) {
                const int sy = (detail::signed_bin(y, nh) + gh) % gh;
                for (int x = 0; x < nw; ++x) {
                    const int sx = (detail::signed_bin(x, nw) + gw) % gw;
                    next.at(x, y) = spectrum.at(sx, sy) * 0.25;
                }
            }
            spectrum = std::move(next);
        }
    }
    return out;
}

inline GrayImage amplitude_of(const ComplexPlane& band) {
    GrayImage amp(band.width, band.height);
    for (size_t i = 0; i < band.v.size(); ++i) {
        const double re = band.v[i].real();
        const double im = band.v[i].imag();
        amp.data[i] = std::sqrt(re * re + im * im);
    }
    return amp;
}

inline std::vector<std::vector<GrayImage>> amplitude(const PyramidCoefficients& coeffs) {
    std::vector<std::vector<GrayImage>> out(coeffs.bands.size());
    for (size_t s = 0; s < coeffs.bands.size(); ++s)
        for (const ComplexPlane& band : coeffs.bands[s]) out[s].push_back(amplitude_of(band));
    return out;
}

// Phase as the four-quadrant arctangent in (-pi, pi]. Pixels whose amplitude
// is below eps_amp = 1e-6 * mean sub-band amplitude (or exactly zero) carry
// phase 0 with the mask bit cleared; phase is unreliable there.
inline PhaseMap phase_of(const ComplexPlane& band) {
    PhaseMap out;
    out.value = GrayImage(band.width, band.height);
    out.valid.assign(band.v.size(), 0);

    KahanSum amp_sum;
    std::vector<double> amp(band.v.size());
    for (size_t i = 0; i < band.v.size(); ++i) {
        const double re = band.v[i].real();
        const double im = band.v[i].imag();
        amp[i] = std::sqrt(re * re + im * im);
        amp_sum.add(amp[i]);
    }
    const double eps_amp = 1e-6 * (amp_sum.value() / static_cast<double>(band.v.size()));

    for (size_t i = 0; i < band.v.size(); ++i) {
        if (amp[i] > 0.0 && amp[i] >= eps_amp) {
            double p = std::atan2(band.v[i].imag(), band.v[i].real());
            if (p == -kPi) p = kPi;
            out.value.data[i] = p;
            out.valid[i] = 1;
        }
    }
    return out;
}

inline std::vector<std::vector<PhaseMap>> phase(const PyramidCoefficients& coeffs) {
    std::vector<std::vector<PhaseMap>> out(coeffs.bands.size());
    for (size_t s = 0; s < coeffs.bands.size(); ++s)
        for (const ComplexPlane& band : coeffs.bands[s]) out[s].push_back(phase_of(band));
    return out;
}

}  // namespace phasemotion

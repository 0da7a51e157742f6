#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "phasemotion/errors.hpp"
#include "phasemotion/image.hpp"
#include "phasemotion/numeric.hpp"
#include "phasemotion/parallel.hpp"
#include "phasemotion/pyramid.hpp"

namespace phasemotion {

// Unwrapped phase differences of one sub-band between two consecutive frames.
// Valid values lie in (-pi, pi]; invalid pixels are exactly 0 with the mask
// bit cleared. weight carries the mean sub-band amplitude of the two frames
// and is used by the translation estimator; it may be empty (uniform).
struct PhaseDiffField {
    GrayImage delta;
    std::vector<uint8_t> valid;
    GrayImage weight;
    double omega = 0.0;
    int scale = 0;
    int orientation = 0;
};

// [scale][orientation] fields of one frame pair.
using PhaseDiffSet = std::vector<std::vector<PhaseDiffField>>;

namespace detail {

inline std::vector<double> gaussian_kernel(double sigma) {
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        k[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += k[i + radius];
    }
    for (double& v : k) v /= sum;
    return k;
}

// Separable convolution with clamped borders. The interior runs clamp-free.
inline GrayImage blur_separable(const GrayImage& img, const std::vector<double>& kernel) {
    const int radius = static_cast<int>(kernel.size() / 2);
    const int w = img.width;
    const int h = img.height;
    const int taps = 2 * radius + 1;
    GrayImage tmp(w, h);
    for (int y = 0; y < h; ++y) {
        const double* src = img.data.data() + static_cast<size_t>(y) * w;
        double* dst = tmp.data.data() + static_cast<size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            if (x >= radius && x < w - radius) {
                for (int i = 0; i < taps; ++i) acc += kernel[i] * src[x - radius + i];
            } else {
                for (int i = -radius; i <= radius; ++i)
                    acc += kernel[i + radius] * src[std::clamp(x + i, 0, w - 1)];
            }
            dst[x] = acc;
        }
    }
    GrayImage out(w, h);
    for (int y = 0; y < h; ++y) {
        double* dst = out.data.data() + static_cast<size_t>(y) * w;
        const bool interior = y >= radius && y < h - radius;
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            if (interior) {
                const double* src = tmp.data.data() + static_cast<size_t>(y - radius) * w + x;
                for (int i = 0; i < taps; ++i) acc += kernel[i] * src[static_cast<size_t>(i) * w];
            } else {
                for (int i = -radius; i <= radius; ++i)
                    acc += kernel[i + radius] * tmp.at(x, std::clamp(y + i, 0, h - 1));
            }
            dst[x] = acc;
        }
    }
    return out;
}

// Angle of the Gaussian-blurred phasor planes, masked.
inline PhaseMap phase_of_blurred(GrayImage re, GrayImage im, const std::vector<double>& kernel,
                                 std::vector<uint8_t> valid) {
    re = blur_separable(re, kernel);
    im = blur_separable(im, kernel);
    PhaseMap out;
    out.value = GrayImage(re.width, re.height);
    out.valid = std::move(valid);
    for (size_t i = 0; i < re.data.size(); ++i) {
        if (!out.valid[i]) continue;
        double p = std::atan2(im.data[i], re.data[i]);
        if (p == -kPi) p = kPi;
        out.value.data[i] = p;
    }
    return out;
}

}  // namespace detail

// Amplitude-weighted Gaussian smoothing of a phase image. Angles wrap, so the
// blur runs on the complex phasor A*exp(j*phase) and the angle is re-extracted;
// the output is back in (-pi, pi]. The validity mask is carried through.
inline PhaseMap denoise_phase(const PhaseMap& phase, const GrayImage& amp, double sigma) {
    if (!phase.value.same_shape(amp))
        throw dimension_error("denoise_phase: phase and amplitude dimensions differ");
    if (!(sigma > 0.0)) throw validation_error("denoise_phase: sigma must be positive");

    GrayImage re(amp.width, amp.height);
    GrayImage im(amp.width, amp.height);
    for (size_t i = 0; i < amp.data.size(); ++i) {
        re.data[i] = amp.data[i] * std::cos(phase.value.data[i]);
        im.data[i] = amp.data[i] * std::sin(phase.value.data[i]);
    }
    return detail::phase_of_blurred(std::move(re), std::move(im), detail::gaussian_kernel(sigma),
                                    phase.valid);
}

// Denoised phase of a raw sub-band. The coefficient plane already is the
// amplitude-weighted phasor A*exp(j*phase), so the blur can run on its real
// and imaginary parts directly; equal to phase_of + denoise_phase up to
// round-off in the phasor resynthesis. The validity mask follows the same
// relative amplitude floor as phase_of.
inline PhaseMap denoise_subband_phase(const ComplexPlane& band, const GrayImage& amp, double sigma) {
    if (!(sigma > 0.0)) throw validation_error("denoise_subband_phase: sigma must be positive");
    KahanSum amp_sum;
    for (double a : amp.data) amp_sum.add(a);
    const double eps_amp = 1e-6 * (amp_sum.value() / static_cast<double>(amp.data.size()));
    std::vector<uint8_t> valid(amp.data.size(), 0);
    for (size_t i = 0; i < amp.data.size(); ++i)
        if (amp.data[i] > 0.0 && amp.data[i] >= eps_amp) valid[i] = 1;

    GrayImage re(band.width, band.height);
    GrayImage im(band.width, band.height);
    for (size_t i = 0; i < band.v.size(); ++i) {
        re.data[i] = band.v[i].real();
        im.data[i] = band.v[i].imag();
    }
    return detail::phase_of_blurred(std::move(re), std::move(im), detail::gaussian_kernel(sigma),
                                    std::move(valid));
}

// Wrapped difference phase_t1 - phase_t in (-pi, pi]; the unique k*2*pi is
// added so the result lands in range. Valid where both inputs are valid.
inline PhaseDiffField phase_difference(const PhaseMap& phase_t, const PhaseMap& phase_t1) {
    if (!phase_t.value.same_shape(phase_t1.value))
        throw dimension_error("phase_difference: sub-band dimensions differ");
    PhaseDiffField out;
    out.delta = GrayImage(phase_t.value.width, phase_t.value.height);
    out.valid.assign(out.delta.size(), 0);
    for (size_t i = 0; i < out.delta.size(); ++i) {
        if (phase_t.valid[i] && phase_t1.valid[i]) {
            out.valid[i] = 1;
            out.delta.data[i] = wrap_to_pi(phase_t1.value.data[i] - phase_t.value.data[i]);
        }
    }
    return out;
}

// Subtracts the mean of valid pixels over the whole sub-band, cancelling
// uniform translation (head movement). Values are re-wrapped to (-pi, pi].
inline PhaseDiffField remove_rigid_motion(const PhaseDiffField& field) {
    KahanSum sum;
    size_t n = 0;
    for (size_t i = 0; i < field.delta.size(); ++i) {
        if (field.valid[i]) {
            sum.add(field.delta.data[i]);
            ++n;
        }
    }
    PhaseDiffField out = field;
    if (n == 0) return out;
    const double mean = sum.value() / static_cast<double>(n);
    for (size_t i = 0; i < out.delta.size(); ++i)
        if (out.valid[i]) out.delta.data[i] = wrap_to_pi(out.delta.data[i] - mean);
    return out;
}

struct SnippetOptions {
    double sigma = 2.0;        // denoise blur, pixels
    bool remove_rigid = true;  // off when estimating global translation
};

// Full per-pair pipeline over a window of T frames:
// decompose -> phase -> denoise -> difference -> rigid-motion removal.
// Returns T-1 PhaseDiffSets. Frames are analyzed independently (and possibly
// concurrently); results do not depend on the execution order.
inline std::vector<PhaseDiffSet> snippet_phase_diffs(const FrameSequence& window,
                                                     const FilterBank& bank,
                                                     const SnippetOptions& opt = {}) {
    window.validate();
    if (window.frames.size() < 2)
        throw sequence_error("snippet_phase_diffs: need at least 2 frames");

    const int n_frames = static_cast<int>(window.frames.size());
    struct FrameAnalysis {
        std::vector<std::vector<GrayImage>> amp;
        std::vector<std::vector<PhaseMap>> phi;
    };
    std::vector<FrameAnalysis> analyzed(n_frames);
    parallel_for(n_frames, [&](int t) {
        const PyramidCoefficients coeffs = decompose(window.frames[t], bank);
        FrameAnalysis a;
        a.amp = amplitude(coeffs);
        a.phi.resize(coeffs.bands.size());
        for (size_t s = 0; s < coeffs.bands.size(); ++s)
            for (size_t o = 0; o < coeffs.bands[s].size(); ++o)
                a.phi[s].push_back(denoise_subband_phase(coeffs.bands[s][o], a.amp[s][o], opt.sigma));
        analyzed[t] = std::move(a);
    });

    std::vector<PhaseDiffSet> pairs(n_frames - 1);
    for (int t = 0; t + 1 < n_frames; ++t) {
        const FrameAnalysis& a = analyzed[t];
        const FrameAnalysis& b = analyzed[t + 1];
        PhaseDiffSet set(bank.spec.n_scales);
        for (int s = 0; s < bank.spec.n_scales; ++s) {
            for (int o = 0; o < bank.spec.n_orientations; ++o) {
                PhaseDiffField f = phase_difference(a.phi[s][o], b.phi[s][o]);
                f.omega = bank.omega[s];
                f.scale = s;
                f.orientation = o;
                f.weight = GrayImage(f.delta.width, f.delta.height);
                for (size_t i = 0; i < f.weight.data.size(); ++i)
                    f.weight.data[i] = 0.5 * (a.amp[s][o].data[i] + b.amp[s][o].data[i]);
                if (opt.remove_rigid) f = remove_rigid_motion(f);
                set[s].push_back(std::move(f));
            }
        }
        pairs[t] = std::move(set);
    }
    return pairs;
}

// Channel-major stack of one scale's phase differences: channel c holds
// pair t = c / n_orientations, orientation c % n_orientations.
struct SnippetTensor {
    int channels = 0;
    int height = 0;
    int width = 0;
    int t_pairs = 0;
    int n_orientations = 0;
    double omega = 0.0;
    std::vector<double> data;  // [c][y][x]

    double& at(int c, int y, int x) {
        return data[(static_cast<size_t>(c) * height + y) * width + x];
    }
    double at(int c, int y, int x) const {
        return data[(static_cast<size_t>(c) * height + y) * width + x];
    }
};

// One tensor per scale.
inline std::vector<SnippetTensor> pack_snippet(const std::vector<PhaseDiffSet>& pairs) {
    if (pairs.empty()) throw validation_error("pack_snippet: no phase-diff fields");
    const int t_pairs = static_cast<int>(pairs.size());
    const int n_scales = static_cast<int>(pairs[0].size());
    const int n_orient = n_scales > 0 ? static_cast<int>(pairs[0][0].size()) : 0;
    for (const PhaseDiffSet& set : pairs)
        if (static_cast<int>(set.size()) != n_scales ||
            (n_scales > 0 && static_cast<int>(set[0].size()) != n_orient))
            throw dimension_error("pack_snippet: inconsistent sub-band layout across pairs");

    std::vector<SnippetTensor> out(n_scales);
    for (int s = 0; s < n_scales; ++s) {
        const GrayImage& ref = pairs[0][s][0].delta;
        SnippetTensor& tensor = out[s];
        tensor.channels = t_pairs * n_orient;
        tensor.height = ref.height;
        tensor.width = ref.width;
        tensor.t_pairs = t_pairs;
        tensor.n_orientations = n_orient;
        tensor.omega = pairs[0][s][0].omega;
        tensor.data.resize(static_cast<size_t>(tensor.channels) * ref.height * ref.width);
        for (int t = 0; t < t_pairs; ++t)
            for (int o = 0; o < n_orient; ++o) {
                const GrayImage& d = pairs[t][s][o].delta;
                if (!d.same_shape(ref))
                    throw dimension_error("pack_snippet: field dimensions differ within a scale");
                const int c = t * n_orient + o;
                std::copy(d.data.begin(), d.data.end(),
                          tensor.data.begin() + static_cast<size_t>(c) * ref.height * ref.width);
            }
    }
    return out;
}

// Inverse of pack_snippet channel indexing; returns [pair][scale][orientation] planes.
inline std::vector<std::vector<std::vector<GrayImage>>> unpack_snippet(
    const std::vector<SnippetTensor>& tensors) {
    if (tensors.empty()) throw validation_error("unpack_snippet: no tensors");
    const int t_pairs = tensors[0].t_pairs;
    const int n_orient = tensors[0].n_orientations;
    std::vector<std::vector<std::vector<GrayImage>>> out(
        t_pairs, std::vector<std::vector<GrayImage>>(tensors.size()));
    for (size_t s = 0; s < tensors.size(); ++s) {
        const SnippetTensor& tensor = tensors[s];
        if (tensor.t_pairs != t_pairs || tensor.n_orientations != n_orient)
            throw dimension_error("unpack_snippet: inconsistent tensor metadata");
        for (int t = 0; t < t_pairs; ++t)
            for (int o = 0; o < n_orient; ++o) {
                const int c = t * n_orient + o;
                GrayImage plane(tensor.width, tensor.height);
                const size_t base = static_cast<size_t>(c) * tensor.height * tensor.width;
                std::copy(tensor.data.begin() + base,
                          tensor.data.begin() + base + plane.size(), plane.data.begin());
                out[t][s].push_back(std::move(plane));
            }
    }
    return out;
}

// Global displacement along the sub-band's orientation axis, in input pixels,
// from the amplitude-weighted mean of the phase differences. Only meaningful
// for a globally translated pair with |displacement| <= pi/omega.
inline double estimate_translation(const PhaseDiffField& field) {
    KahanSum weighted;
    KahanSum weights;
    size_t n_valid = 0;
    const bool uniform = field.weight.data.empty();
    for (size_t i = 0; i < field.delta.size(); ++i) {
        if (!field.valid[i]) continue;
        ++n_valid;
        const double w = uniform ? 1.0 : field.weight.data[i];
        weighted.add(w * field.delta.data[i]);
        weights.add(w);
    }
    if (n_valid * 100 < field.delta.size() || weights.value() <= 0.0)
        throw insufficient_signal_error("estimate_translation: fewer than 1% valid pixels");
    // omega is in input-resolution units, so the result is in input pixels.
    return -(weighted.value() / weights.value()) / field.omega;
}

}  // namespace phasemotion

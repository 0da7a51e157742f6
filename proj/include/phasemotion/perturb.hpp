#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "phasemotion/errors.hpp"
#include "phasemotion/flow.hpp"
#include "phasemotion/image.hpp"
#include "phasemotion/numeric.hpp"
#include "phasemotion/parallel.hpp"
#include "phasemotion/phase_motion.hpp"

namespace phasemotion {

// splitmix64 (Vigna). Stateless and index-addressable: output i of a stream
// is mix64(seed + (i+1)*0x9e3779b97f4a7c15), identical to advancing the
// sequential generator i+1 times. Test vectors: seed 0 yields
// 0xe220a8397b1dcdaf, 0x6e789e6aa1b965f4, 0x06c45d188009454f.
inline uint64_t splitmix64_mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t splitmix64_at(uint64_t seed, uint64_t index) {
    return splitmix64_mix(seed + (index + 1) * 0x9e3779b97f4a7c15ULL);
}

// Uniform double in (0, 1] from the top 53 bits. The open lower end keeps
// every sampled gamma exponent strictly positive even at beta = 1.
inline double uniform01_at(uint64_t seed, uint64_t index) {
    return static_cast<double>((splitmix64_at(seed, index) >> 11) + 1) * 0x1.0p-53;
}

struct GammaJitterSpec {
    double beta = 0.0;  // illumination variability in [0, 1]
    uint64_t seed = 0;

    void validate() const {
        if (!(beta >= 0.0 && beta <= 1.0))
            throw validation_error("GammaJitterSpec: beta must be in [0, 1]");
    }
};

// Per-frame gamma exponent: U[1-beta, 1+beta] at stream position `index`.
inline double gamma_for_frame(const GammaJitterSpec& spec, uint64_t index) {
    spec.validate();
    return (1.0 - spec.beta) + 2.0 * spec.beta * uniform01_at(spec.seed, index);
}

// Pointwise u^gamma on [0,1] values. gamma == 1 is the exact identity.
inline GrayImage gamma_corrupt_frame(const GrayImage& img, double gamma) {
    if (!(gamma > 0.0)) throw validation_error("gamma_corrupt_frame: gamma must be positive");
    GrayImage out = img;
    if (gamma == 1.0) return out;
    for (double& v : out.data) v = std::clamp(std::pow(v, gamma), 0.0, 1.0);
    return out;
}

// Same seed gives bit-identical output; beta = 0 is the identity.
inline FrameSequence gamma_corrupt_sequence(const FrameSequence& seq, const GammaJitterSpec& spec) {
    spec.validate();
    FrameSequence out;
    out.frame_rate = seq.frame_rate;
    out.frames.resize(seq.frames.size());
    parallel_for(static_cast<int>(seq.frames.size()), [&](int t) {
        out.frames[t] = gamma_corrupt_frame(seq.frames[t], gamma_for_frame(spec, t));
    });
    return out;
}

enum class MotionPipeline { phase_diff, flow };

inline const char* pipeline_name(MotionPipeline p) {
    return p == MotionPipeline::phase_diff ? "phase_diff" : "flow";
}

struct SweepRow {
    double beta = 0.0;
    uint64_t seed = 0;
    MotionPipeline pipeline = MotionPipeline::phase_diff;
    int n_pairs = 0;
    double mean_abs_dev = 0.0;
    double normalized_dev = 0.0;
};

struct SweepOptions {
    PyramidSpec pyramid;
    double sigma = 2.0;
    double alpha = 15.0;
    int iters = 100;
};

namespace detail {

struct Deviation {
    double mean_abs_dev = 0.0;
    double normalized = 0.0;
};

// Mean |corrupt - clean| over mutually valid pixels, normalized by the mean
// |clean| over the same pixels.
inline Deviation phase_deviation(const std::vector<PhaseDiffSet>& clean,
                                 const std::vector<PhaseDiffSet>& corrupt) {
    KahanSum dev, ref;
    size_t n = 0;
    for (size_t p = 0; p < clean.size(); ++p)
        for (size_t s = 0; s < clean[p].size(); ++s)
            for (size_t o = 0; o < clean[p][s].size(); ++o) {
                const PhaseDiffField& a = clean[p][s][o];
                const PhaseDiffField& b = corrupt[p][s][o];
                for (size_t i = 0; i < a.delta.size(); ++i) {
                    if (!a.valid[i] || !b.valid[i]) continue;
                    dev.add(std::abs(b.delta.data[i] - a.delta.data[i]));
                    ref.add(std::abs(a.delta.data[i]));
                    ++n;
                }
            }
    Deviation d;
    if (n == 0) return d;
    d.mean_abs_dev = dev.value() / static_cast<double>(n);
    const double ref_mean = ref.value() / static_cast<double>(n);
    d.normalized = d.mean_abs_dev == 0.0 ? 0.0 : d.mean_abs_dev / ref_mean;
    return d;
}

inline Deviation flow_deviation(const std::vector<FlowField>& clean,
                                const std::vector<FlowField>& corrupt) {
    KahanSum dev, ref;
    size_t n = 0;
    for (size_t p = 0; p < clean.size(); ++p) {
        for (size_t i = 0; i < clean[p].u.size(); ++i) {
            dev.add(std::abs(corrupt[p].u[i] - clean[p].u[i]));
            dev.add(std::abs(corrupt[p].v[i] - clean[p].v[i]));
            ref.add(std::abs(clean[p].u[i]));
            ref.add(std::abs(clean[p].v[i]));
            n += 2;
        }
    }
    Deviation d;
    if (n == 0) return d;
    d.mean_abs_dev = dev.value() / static_cast<double>(n);
    const double ref_mean = ref.value() / static_cast<double>(n);
    d.normalized = d.mean_abs_dev == 0.0 ? 0.0 : d.mean_abs_dev / ref_mean;
    return d;
}

inline std::vector<FlowField> flow_over_pairs(const FrameSequence& seq, const SweepOptions& opt) {
    std::vector<FlowField> flows(seq.frames.size() - 1);
    parallel_for(static_cast<int>(flows.size()), [&](int t) {
        flows[t] = horn_schunck(seq.frames[t], seq.frames[t + 1], opt.alpha, opt.iters);
    });
    return flows;
}

}  // namespace detail

// Corrupts the sequence at each (beta, seed), reruns the chosen motion
// pipeline, and reports the deviation of the corrupted motion fields from the
// clean ones. The clean run is computed once per pipeline.
inline std::vector<SweepRow> robustness_sweep(const FrameSequence& seq,
                                              const std::vector<double>& betas,
                                              const std::vector<uint64_t>& seeds,
                                              MotionPipeline pipeline,
                                              const SweepOptions& opt = {}) {
    seq.validate();
    if (seq.frames.size() < 2) throw sequence_error("robustness_sweep: need at least 2 frames");
    if (betas.empty() || seeds.empty())
        throw validation_error("robustness_sweep: need at least one beta and one seed");

    const int n_pairs = static_cast<int>(seq.frames.size()) - 1;
    std::vector<SweepRow> rows;
    rows.reserve(betas.size() * seeds.size());

    if (pipeline == MotionPipeline::phase_diff) {
        const FilterBank bank = build_filter_bank(seq.frames[0].width, seq.frames[0].height, opt.pyramid);
        SnippetOptions snip;
        snip.sigma = opt.sigma;
        const auto clean = snippet_phase_diffs(seq, bank, snip);
        for (double beta : betas)
            for (uint64_t seed : seeds) {
                const auto corrupted = gamma_corrupt_sequence(seq, GammaJitterSpec{beta, seed});
                const auto fields = snippet_phase_diffs(corrupted, bank, snip);
                const auto d = detail::phase_deviation(clean, fields);
                rows.push_back({beta, seed, pipeline, n_pairs, d.mean_abs_dev, d.normalized});
            }
    } else {
        const auto clean = detail::flow_over_pairs(seq, opt);
        for (double beta : betas)
            for (uint64_t seed : seeds) {
                const auto corrupted = gamma_corrupt_sequence(seq, GammaJitterSpec{beta, seed});
                const auto flows = detail::flow_over_pairs(corrupted, opt);
                const auto d = detail::flow_deviation(clean, flows);
                rows.push_back({beta, seed, pipeline, n_pairs, d.mean_abs_dev, d.normalized});
            }
    }
    return rows;
}

}  // namespace phasemotion
